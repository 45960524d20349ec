mod common;

use hodge_gp::data::random_complex;
use hodge_gp::spectral::{classify, edge_diffusion, harmonic_basis, ClassifyTol, HodgeProjector};
use hodge_gp::{eigendecompose, hodge_decompose, Degree, Error, HodgeBlock, SimplicialComplex2};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn complex_strategy() -> impl Strategy<Value = SimplicialComplex2> {
    (3usize..12, 0.2f64..0.9, 0.0f64..=1.0, any::<u64>())
        .prop_filter_map("empty graph", |(n, p, fill, seed)| {
            random_complex(n, p, fill, seed).ok()
        })
}

fn filled_triangle() -> SimplicialComplex2 {
    SimplicialComplex2::from_indices(1..=3, &[[1, 2], [1, 3], [2, 3]], &[[1, 2, 3]], false).unwrap()
}

fn open_triangle() -> SimplicialComplex2 {
    SimplicialComplex2::from_indices(1..=3, &[[1, 2], [1, 3], [2, 3]], &[], false).unwrap()
}

fn seven_node() -> SimplicialComplex2 {
    SimplicialComplex2::from_indices(
        1..=7,
        &[
            [1, 2],
            [1, 3],
            [1, 4],
            [2, 3],
            [2, 5],
            [3, 4],
            [3, 5],
            [3, 6],
            [5, 6],
            [5, 7],
        ],
        &[[1, 2, 3], [2, 3, 5], [3, 5, 6]],
        false,
    )
    .unwrap()
}

fn approx(a: &DVector<f64>, b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

#[test]
fn seven_node_has_one_hole() {
    assert_eq!(eigendecompose(&seven_node(), None).unwrap().dims().0, 1);
}

#[test]
fn filled_triangle_blocks() {
    let s = eigendecompose(&filled_triangle(), None).unwrap();
    assert_eq!(s.dims(), (0, 2, 1));
    assert!(approx(&s.gradient.values, &[3.0, 3.0], 1e-12));
    assert!(approx(&s.curl.values, &[3.0], 1e-12));
}

#[test]
fn open_triangle_harmonic_vector() {
    let s = eigendecompose(&open_triangle(), None).unwrap();
    assert_eq!(s.dims().0, 1);
    let u = s.harmonic.vectors.column(0).into_owned();
    let expect = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
    assert!((u.dot(&expect).abs() - 1.0).abs() < 1e-12);
}

#[test]
fn classification_examples() {
    let sc = filled_triangle();
    let tol = ClassifyTol::for_lambda_max(3.0);
    let curl = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
    assert_eq!(classify(&curl, 3.0, &sc, tol).unwrap(), HodgeBlock::Curl);
    let grad = DVector::from_vec(vec![1.0, 1.0, 0.0]) / 2f64.sqrt();
    assert_eq!(
        classify(&grad, 3.0, &sc, tol).unwrap(),
        HodgeBlock::Gradient
    );
    let zero = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
    assert_eq!(
        classify(&zero, 0.0, &open_triangle(), tol).unwrap(),
        HodgeBlock::Harmonic
    );
    let mixed = (&curl + &grad).normalize();
    assert!(matches!(
        classify(&mixed, 3.0, &sc, tol),
        Err(Error::Classification { .. })
    ));
}

#[test]
fn decomposition_examples() {
    let sc = filled_triangle();
    let f0 = sc
        .cochain(Degree::Node, DVector::from_vec(vec![0.3, -1.0, 2.0]))
        .unwrap();
    let f1 = sc.grad(&f0).unwrap();
    let parts = hodge_decompose(&sc, &f1).unwrap();
    assert!((parts.gradient.values() - f1.values()).amax() < 1e-12);
    assert!(parts.curl.values().amax() < 1e-12 && parts.harmonic.values().amax() < 1e-12);

    let open = open_triangle();
    let f1 = open
        .cochain(Degree::Edge, DVector::from_vec(vec![1.0, -1.0, 1.0]))
        .unwrap();
    let parts = hodge_decompose(&open, &f1).unwrap();
    assert!((parts.harmonic.values() - f1.values()).amax() < 1e-12);
    assert_eq!(
        parts.energy_fractions().map(|e| (e * 1e10).round() / 1e10),
        [1.0, 0.0, 0.0]
    );

    let sc = seven_node();
    let mut r = common::rng(5);
    let f = DVector::from_vec(common::normal_vec(&mut r, 10));
    let parts = hodge_decompose(&sc, &sc.cochain(Degree::Edge, f.clone()).unwrap()).unwrap();
    let sum = parts.harmonic.values() + parts.gradient.values() + parts.curl.values();
    assert!((sum - &f).norm() / f.norm() < 1e-10);
}

#[test]
fn diffusion_examples() {
    let sc = seven_node();
    let s = eigendecompose(&sc, None).unwrap();
    let mut r = common::rng(9);
    let phi0 = sc
        .cochain(
            Degree::Edge,
            DVector::from_vec(common::normal_vec(&mut r, 10)),
        )
        .unwrap();
    assert_eq!(
        edge_diffusion(&s, &phi0, 1.0, 2.0, 0.0).unwrap(),
        phi0.clone()
    );
    let t = 1e3 / s.lambda_min_positive().unwrap();
    let late = edge_diffusion(&s, &phi0, 1.0, 2.0, t).unwrap();
    let uh = &s.harmonic.vectors;
    let off = late.values() - uh * (uh.transpose() * late.values());
    assert!(off.norm() / phi0.values().norm() < 1e-6);

    let h = sc.cochain(Degree::Edge, uh.column(0).into_owned()).unwrap();
    for t in [0.5, 10.0, 1e4] {
        let out = edge_diffusion(&s, &h, 0.7, 1.3, t).unwrap();
        assert!((out.values() - h.values()).amax() < 1e-12);
    }
    assert!(matches!(
        edge_diffusion(&s, &phi0, -1.0, 1.0, 1.0),
        Err(Error::Usage(_))
    ));
    assert!(matches!(
        edge_diffusion(&s, &phi0, 1.0, 1.0, -1.0),
        Err(Error::Usage(_))
    ));
}

#[test]
fn truncation_rejected_beyond_edge_count() {
    assert!(matches!(
        eigendecompose(&seven_node(), Some(11)),
        Err(Error::Usage(_))
    ));
}

#[test]
fn truncation_with_more_triangles_than_edges() {
    // filled K7: 21 edges, 35 triangles, L1 = 7 I on the edge space
    let sc = random_complex(7, 1.0, 1.0, 0).unwrap();
    assert!(sc.num_triangles() > sc.num_edges());
    let t = eigendecompose(&sc, Some(10)).unwrap();
    assert_eq!(t.dims().0, 0);
    assert_eq!(t.dims().1 + t.dims().2, 10);
    for v in t.gradient.values.iter().chain(t.curl.values.iter()) {
        assert!((v - 7.0).abs() < 1e-9);
    }
    let (g, c) = (&t.gradient.vectors, &t.curl.vectors);
    assert!((sc.b2().transpose() * g).amax() < 1e-9);
    assert!((sc.b1() * c).amax() < 1e-9);
    assert!(harmonic_basis(&sc).unwrap().ncols() == 0);
}

#[test]
fn summary_serializes_counts() {
    let s = eigendecompose(&seven_node(), None).unwrap();
    let json = serde_json::to_value(s.summary()).unwrap();
    assert_eq!(json["harmonic"]["count"], 1);
    assert_eq!(json["num_edges"], 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_invariants(sc in complex_strategy()) {
        let s = eigendecompose(&sc, None).unwrap();
        let (nh, ng, nc) = s.dims();
        prop_assert_eq!(nh + ng + nc, sc.num_edges());
        prop_assert_eq!(nh, harmonic_basis(&sc).unwrap().ncols());
        let (_, u, _) = s.concatenated();
        let gram = u.transpose() * &u;
        prop_assert!((gram - DMatrix::identity(u.ncols(), u.ncols())).amax() < 1e-8);
        let (b1, b2) = (sc.b1(), sc.b2());
        let lmax = s.lambda_max().max(1.0);
        for (j, u) in s.gradient.vectors.column_iter().enumerate() {
            prop_assert!((b2.transpose() * u).norm() <= 1e-6 * lmax.sqrt());
            prop_assert!(((&b1 * u).norm_squared() - s.gradient.values[j]).abs() < 1e-8 * lmax);
        }
        for (j, u) in s.curl.vectors.column_iter().enumerate() {
            prop_assert!((&b1 * u).norm() <= 1e-6 * lmax.sqrt());
            prop_assert!(((b2.transpose() * u).norm_squared() - s.curl.values[j]).abs() < 1e-8 * lmax);
        }
        for u in s.harmonic.vectors.column_iter() {
            prop_assert!((&b1 * u).norm() <= 1e-6 && (b2.transpose() * u).norm() <= 1e-6);
        }
        for b in HodgeBlock::ALL {
            let v = &s.block(b).values;
            prop_assert!(v.iter().zip(v.iter().skip(1)).all(|(a, b)| a <= b));
        }
        let l1 = sc.laplacians().l1;
        prop_assert!((s.reconstruct() - &l1).amax() <= 1e-8 * l1.amax().max(1.0));
    }

    #[test]
    fn decomposition_is_orthogonal_and_idempotent(sc in complex_strategy(), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let f = DVector::from_vec(common::normal_vec(&mut r, sc.num_edges()));
        let proj = HodgeProjector::new(&sc).unwrap();
        let parts = proj.decompose(&sc.cochain(Degree::Edge, f.clone()).unwrap()).unwrap();
        let (h, g, c) = (parts.harmonic.values(), parts.gradient.values(), parts.curl.values());
        prop_assert!((h + g + c - &f).norm() / f.norm() < 1e-10);
        let n2 = f.norm_squared();
        prop_assert!(h.dot(g).abs() / n2 < 1e-10);
        prop_assert!(h.dot(c).abs() / n2 < 1e-10);
        prop_assert!(g.dot(c).abs() / n2 < 1e-10);
        let again = proj.decompose(&parts.gradient).unwrap();
        prop_assert!((again.gradient.values() - g).amax() < 1e-10 * f.norm());
        prop_assert!(again.harmonic.values().amax() < 1e-10 * f.norm());
        prop_assert!(again.curl.values().amax() < 1e-10 * f.norm());
    }

    #[test]
    fn full_truncation_matches_dense(sc in complex_strategy()) {
        let full = eigendecompose(&sc, None).unwrap();
        let trunc = eigendecompose(&sc, Some(sc.num_edges())).unwrap();
        prop_assert_eq!(full.dims(), trunc.dims());
        let sorted = |s: &hodge_gp::HodgeSpectrum| {
            let mut v: Vec<f64> = s.concatenated().0.iter().copied().collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        for (a, b) in sorted(&full).iter().zip(&sorted(&trunc)) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn truncation_keeps_harmonic_block(sc in complex_strategy(), frac in 0.1f64..0.9) {
        let full = eigendecompose(&sc, None).unwrap();
        let l = ((sc.num_edges() as f64 * frac) as usize).max(1);
        let t = eigendecompose(&sc, Some(l)).unwrap();
        prop_assert!(t.is_truncated());
        prop_assert_eq!(t.dims().0, full.dims().0);
        let kept = t.dims().1 + t.dims().2;
        prop_assert_eq!(kept, l.min(sc.num_edges() - full.dims().0));
        // kept eigenvalues are the largest ones
        let mut all: Vec<f64> = [&full.gradient.values, &full.curl.values].iter().flat_map(|v| v.iter().copied()).collect();
        all.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut got: Vec<f64> = [&t.gradient.values, &t.curl.values].iter().flat_map(|v| v.iter().copied()).collect();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in all.iter().zip(&got) {
            prop_assert!((a - b).abs() < 1e-8 * all[0].max(1.0));
        }
    }
}
