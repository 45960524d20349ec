#![allow(dead_code)]

use hodge_gp::data::random_complex;
use hodge_gp::gp::GpModel;
use hodge_gp::kernels::{KernelContext, KernelSpec, SpectrumFn};
use hodge_gp::spectral::harmonic_basis;
use hodge_gp::{HodgeBlock, SimplicialComplex2};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random complexes with a mix of filled and open triangles.
pub fn random_complexes(count: usize, seed: u64, max_edges: usize) -> Vec<SimplicialComplex2> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut s = seed.wrapping_mul(1000);
    while out.len() < count {
        s += 1;
        let n = r.random_range(5..12);
        let p = r.random_range(0.3..0.8);
        let fill = r.random_range(0.2..0.9);
        if let Ok(sc) = random_complex(n, p, fill, s) {
            if sc.num_edges() >= 4 && sc.num_edges() <= max_edges {
                out.push(sc);
            }
        }
    }
    out
}

/// Random complexes that have at least one triangle and one hole.
pub fn complexes_with_holes(count: usize, seed: u64) -> Vec<SimplicialComplex2> {
    let mut out = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count {
        s += 1;
        for sc in random_complexes(1, s, 40) {
            if sc.num_triangles() > 0 && harmonic_basis(&sc).unwrap().ncols() > 0 {
                out.push(sc);
            }
        }
    }
    out
}

pub fn random_matern(r: &mut ChaCha8Rng) -> SpectrumFn {
    SpectrumFn::matern(
        r.random_range(0.5..2.0),
        r.random_range(0.5..2.0),
        r.random_range(0.5..2.5),
    )
}

pub fn random_diffusion(r: &mut ChaCha8Rng) -> SpectrumFn {
    SpectrumFn::diffusion(r.random_range(0.5..2.0), r.random_range(0.3..1.5))
}

pub fn random_psi(r: &mut ChaCha8Rng) -> SpectrumFn {
    if r.random_bool(0.5) {
        random_matern(r)
    } else {
        random_diffusion(r)
    }
}

/// One randomly parameterized spec of every kernel family, named.
pub fn every_family(r: &mut ChaCha8Rng) -> Vec<(&'static str, KernelSpec)> {
    vec![
        (
            "node-matern",
            KernelSpec::Node {
                psi: random_matern(r),
            },
        ),
        (
            "node-diffusion",
            KernelSpec::Node {
                psi: random_diffusion(r),
            },
        ),
        (
            "matern",
            KernelSpec::NonHcEdge {
                psi: random_matern(r),
            },
        ),
        (
            "diffusion",
            KernelSpec::NonHcEdge {
                psi: random_diffusion(r),
            },
        ),
        (
            "hc-matern",
            KernelSpec::HcEdge {
                harmonic_variance: r.random_range(0.5..2.0),
                gradient: random_matern(r),
                curl: random_matern(r),
            },
        ),
        (
            "hc-diffusion",
            KernelSpec::HcEdge {
                harmonic_variance: r.random_range(0.5..2.0),
                gradient: random_diffusion(r),
                curl: random_diffusion(r),
            },
        ),
        (
            "gradient-matern",
            KernelSpec::SubspaceEdge {
                block: HodgeBlock::Gradient,
                psi: random_matern(r),
            },
        ),
        (
            "curl-diffusion",
            KernelSpec::SubspaceEdge {
                block: HodgeBlock::Curl,
                psi: random_diffusion(r),
            },
        ),
        (
            "harmonic",
            KernelSpec::SubspaceEdge {
                block: HodgeBlock::Harmonic,
                psi: random_matern(r),
            },
        ),
        (
            "grad-of-node",
            KernelSpec::GradOfNode { psi: random_psi(r) },
        ),
        (
            "composed-hc",
            KernelSpec::ComposedHc {
                harmonic_variance: r.random_range(0.5..2.0),
                node: random_psi(r),
                triangle: random_psi(r),
            },
        ),
        ("hodge-pinv", KernelSpec::HodgeLaplacianPinv),
        (
            "line-graph-matern",
            KernelSpec::LineGraphNode {
                psi: random_matern(r),
            },
        ),
        (
            "line-graph-diffusion",
            KernelSpec::LineGraphNode {
                psi: random_diffusion(r),
            },
        ),
    ]
}

/// Random training/test split of `0..n` with at least one of each.
pub fn random_split(r: &mut ChaCha8Rng, n: usize) -> (Vec<usize>, Vec<usize>) {
    loop {
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for i in 0..n {
            if r.random_bool(0.5) {
                train.push(i)
            } else {
                test.push(i)
            }
        }
        if !train.is_empty() && !test.is_empty() {
            return (train, test);
        }
    }
}

pub fn normal_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, r))
        .collect()
}

/// Joint-Gaussian conditioning with an explicit dense inverse.
pub fn dense_conditioning(
    k: &DMatrix<f64>,
    k_cross: &DMatrix<f64>,
    train: &[usize],
    test: &[usize],
    y: &[f64],
    noise: f64,
) -> (Vec<f64>, Vec<f64>) {
    let k_tr = k.select_rows(train).select_columns(train)
        + DMatrix::identity(train.len(), train.len()) * noise;
    let inv = k_tr.try_inverse().expect("invertible training covariance");
    let k_star = k_cross.select_rows(train).select_columns(test);
    let mean = k_star.transpose() * &inv * DVector::from_column_slice(y);
    let k_ss = k_cross.select_rows(test).select_columns(test);
    let post = &k_ss - k_star.transpose() * &inv * &k_star;
    (
        mean.iter().copied().collect(),
        post.diagonal().iter().copied().collect(),
    )
}

/// Largest relative disagreement between the analytic gradient of the
/// training objective and central differences with step `h`.
pub fn gradient_error(model: &GpModel, ctx: &KernelContext, theta: &[f64], h: f64) -> f64 {
    let mut kernel = model.kernel_spec.assemble(ctx).unwrap();
    let (_, grad) = model.objective(&mut kernel, ctx, theta).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..theta.len() {
        let mut tp = theta.to_vec();
        let mut tm = theta.to_vec();
        tp[i] += h;
        tm[i] -= h;
        let fp = model.objective(&mut kernel, ctx, &tp).unwrap().0;
        let fm = model.objective(&mut kernel, ctx, &tm).unwrap().0;
        let fd = (fp - fm) / (2.0 * h);
        let err = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1e-3);
        worst = worst.max(err);
    }
    worst
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
