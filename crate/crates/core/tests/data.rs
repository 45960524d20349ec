mod common;

use std::fs;
use std::path::Path;

use hodge_gp::data::{
    load_flow_csv, random_complex, sample_hodge_flow, split, synth_forex, write_flow_csv, Dataset,
    FlowKind, NoiseLevel, OrientationPolicy,
};
use hodge_gp::io::write_complex_json;
use hodge_gp::spectral::HodgeProjector;
use hodge_gp::{Error, NodeId, SimplicialComplex2};
use proptest::prelude::*;

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

fn fx_complex(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("complex.json");
    fs::write(
        &path,
        r#"{"nodes": ["EUR", "GBP", "USD"], "edges": [["EUR", "USD"], ["EUR", "GBP"], ["GBP", "USD"]]}"#,
    )
    .unwrap();
    path
}

fn load(dir: &Path, csv: &str, policy: OrientationPolicy) -> hodge_gp::Result<Dataset> {
    let flow = dir.join("flow.csv");
    fs::write(&flow, csv).unwrap();
    load_flow_csv(fx_complex(dir), flow, policy, true, 0.5, 1)
}

#[test]
fn resigning_against_canonical_orientation() {
    let dir = tempfile::tempdir().unwrap();
    let body =
        |first: &str| format!("simplex,value\n{first},0.2\nEUR-GBP,0.1\nGBP-USD,0.4\nUSD-GBP,9\n");
    // four rows, the last a duplicate of the third
    let err = load(dir.path(), &body("EUR-USD"), OrientationPolicy::Resign).unwrap_err();
    assert!(
        matches!(err, Error::Ingestion { row: Some(4), .. }),
        "{err}"
    );

    let csv = "simplex,value,split\nEUR-USD,0.2,train\nEUR-GBP,0.1,test\nGBP-USD,0.4,train\n";
    let ds = load(dir.path(), csv, OrientationPolicy::Resign).unwrap_err();
    assert!(matches!(ds, Error::Usage(_)), "one test edge is too few");

    let sc = &load(
        dir.path(),
        "simplex,value\nEUR-USD,0.2\nEUR-GBP,0.1\nGBP-USD,0.4\nGBP-EUR,1\n",
        OrientationPolicy::Resign,
    )
    .unwrap_err();
    assert!(matches!(sc, Error::Ingestion { row: Some(4), .. }));

    let big = SimplicialComplex2::build(
        ["EUR", "GBP", "JPY", "USD"].map(NodeId::from).to_vec(),
        vec![
            ["EUR", "USD"].map(NodeId::from),
            ["EUR", "GBP"].map(NodeId::from),
            ["GBP", "USD"].map(NodeId::from),
            ["JPY", "USD"].map(NodeId::from),
            ["EUR", "JPY"].map(NodeId::from),
        ],
        vec![],
        true,
    )
    .unwrap();
    write_complex_json(&big, dir.path().join("big.json")).unwrap();
    let read = |csv: &str| {
        fs::write(dir.path().join("f.csv"), csv).unwrap();
        load_flow_csv(
            dir.path().join("big.json"),
            dir.path().join("f.csv"),
            OrientationPolicy::Resign,
            true,
            0.5,
            3,
        )
    };
    let eur_usd = big
        .oriented_edge(&NodeId::from("EUR"), &NodeId::from("USD"))
        .unwrap()
        .0;
    let rows = "EUR-GBP,0.1\nGBP-USD,0.4\nJPY-USD,1.0\nEUR-JPY,-0.3\n";
    let a = read(&format!("simplex,value\nEUR-USD,0.2\n{rows}")).unwrap();
    assert_eq!(a.flow.values()[eur_usd], 0.2);
    let b = read(&format!("simplex,value\nUSD-EUR,0.2\n{rows}")).unwrap();
    assert_eq!(b.flow.values()[eur_usd], -0.2);

    fs::write(
        dir.path().join("f.csv"),
        format!("simplex,value\nUSD-EUR,0.2\n{rows}"),
    )
    .unwrap();
    let strict = load_flow_csv(
        dir.path().join("big.json"),
        dir.path().join("f.csv"),
        OrientationPolicy::RequireCanonical,
        true,
        0.5,
        3,
    );
    assert!(matches!(strict, Err(Error::Ingestion { row: Some(1), .. })));

    let unknown = read("simplex,value\nEUR-GBP,0.1\nCHF-USD,0.3\n").unwrap_err();
    assert!(matches!(unknown, Error::Ingestion { row: Some(2), .. }));
}

#[test]
fn split_column_or_seeded_split() {
    let dir = tempfile::tempdir().unwrap();
    let sc = random_complex(10, 0.7, 0.5, 6).unwrap();
    let ds = sample_hodge_flow(&sc, FlowKind::Gradient, 2, 0.0).unwrap();
    write_complex_json(&sc, dir.path().join("c.json")).unwrap();
    // half of the edges, with an explicit split
    let half: Vec<usize> = (0..sc.num_edges()).step_by(2).collect();
    let mut csv = String::from("simplex,value,split\n");
    for (k, &e) in half.iter().enumerate() {
        let s = if k % 3 == 0 { "train" } else { "test" };
        csv += &format!("{},{},{s}\n", sc.edge_label(e), ds.flow.values()[e]);
    }
    fs::write(dir.path().join("f.csv"), &csv).unwrap();
    let got = load_flow_csv(
        dir.path().join("c.json"),
        dir.path().join("f.csv"),
        OrientationPolicy::Resign,
        false,
        0.5,
        0,
    )
    .unwrap();
    let train: Vec<usize> = half
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 3 == 0)
        .map(|(_, &e)| e)
        .collect();
    assert_eq!(got.train_indices(), train);
    assert_eq!(
        got.train_indices().len() + got.test_indices().len(),
        half.len()
    );
    assert_eq!(got.observed.iter().filter(|&&o| o).count(), half.len());

    let plain: String = csv
        .lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
        .collect();
    fs::write(dir.path().join("g.csv"), &plain).unwrap();
    let load = |seed| {
        load_flow_csv(
            dir.path().join("c.json"),
            dir.path().join("g.csv"),
            OrientationPolicy::Resign,
            false,
            0.5,
            seed,
        )
        .unwrap()
    };
    let (a, b) = (load(4), load(4));
    assert_eq!(a.train_mask, b.train_mask);
    assert!(a.train_indices().iter().all(|e| half.contains(e)));
    assert!(a.test_indices().iter().all(|e| half.contains(e)));
    assert_eq!(
        a.train_indices().len(),
        (half.len() as f64 * 0.5).round() as usize
    );

    let mixed = csv.replacen(",train\n", ",\n", 1);
    fs::write(dir.path().join("h.csv"), &mixed).unwrap();
    let err = load_flow_csv(
        dir.path().join("c.json"),
        dir.path().join("h.csv"),
        OrientationPolicy::Resign,
        false,
        0.5,
        0,
    );
    assert!(matches!(err, Err(Error::Ingestion { .. })));
}

#[test]
fn canonical_files_round_trip_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let ds = split(
        &synth_forex(9, 0.8, 1.0, NoiseLevel::RelativeToSignal(0.05), 3).unwrap(),
        0.3,
        2,
    )
    .unwrap();
    write_complex_json(&ds.complex, dir.path().join("c.json")).unwrap();
    let mut first = Vec::new();
    write_flow_csv(&ds, &mut first).unwrap();
    fs::write(dir.path().join("f.csv"), &first).unwrap();
    let back = load_flow_csv(
        dir.path().join("c.json"),
        dir.path().join("f.csv"),
        OrientationPolicy::RequireCanonical,
        false,
        0.5,
        0,
    )
    .unwrap();
    assert_eq!(back.train_mask, ds.train_mask);
    assert_eq!(back.observations, ds.observations);
    let mut second = Vec::new();
    write_flow_csv(&back, &mut second).unwrap();
    assert_eq!(first, second);
}

#[test]
fn bundle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = split(
        &sample_hodge_flow(
            &seven_node(),
            FlowKind::Mixed {
                harmonic: 1.0,
                gradient: 0.5,
                curl: 2.0,
            },
            8,
            0.1,
        )
        .unwrap(),
        0.4,
        1,
    )
    .unwrap();
    ds.write_bundle(dir.path()).unwrap();
    for f in [
        "complex.json",
        "flow.csv",
        "truth.csv",
        "mask.csv",
        "provenance.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let back = Dataset::read_bundle(dir.path()).unwrap();
    assert_eq!(back.flow, ds.flow);
    assert_eq!(back.observations, ds.observations);
    assert_eq!(back.train_mask, ds.train_mask);
    assert_eq!(back.noise_level, ds.noise_level);
    assert_eq!(back.provenance, ds.provenance);
    let prov: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("provenance.json")).unwrap())
            .unwrap();
    assert_eq!(prov["seed"], 8);
    assert_eq!(prov["rng"], "ChaCha8");
}

#[test]
fn mixed_flow_energies_match_generating_parts() {
    let sc = seven_node();
    let ds = sample_hodge_flow(
        &sc,
        FlowKind::Mixed {
            harmonic: 1.0,
            gradient: 1.0,
            curl: 1.0,
        },
        12,
        0.0,
    )
    .unwrap();
    let g = hodge_gp::data::gradient_flow(&sc, 12);
    let c = hodge_gp::data::curl_flow(&sc, 12);
    let h = hodge_gp::data::harmonic_flow(&sc, 12).unwrap();
    let parts = HodgeProjector::new(&sc)
        .unwrap()
        .decompose(&ds.flow)
        .unwrap();
    assert!((parts.gradient.values().norm_squared() - g.norm_squared()).abs() < 1e-10);
    assert!((parts.curl.values().norm_squared() - c.norm_squared()).abs() < 1e-10);
    assert!((parts.harmonic.values().norm_squared() - h.norm_squared()).abs() < 1e-10);
    assert_eq!(ds.observations, ds.flow);
}

#[test]
fn forex_examples() {
    let ds = synth_forex(25, 1.0, 1.0, NoiseLevel::Absolute(0.0), 2024).unwrap();
    let sc = &ds.complex;
    assert_eq!(
        (sc.num_nodes(), sc.num_edges(), sc.num_triangles()),
        (25, 300, 2300)
    );
    assert!(sc.curl(&ds.flow).unwrap().values().amax() < 1e-12);
    let f = ds.flow.values();
    let rate = |a: &NodeId, b: &NodeId| {
        let (e, s) = sc.oriented_edge(a, b).unwrap();
        s * f[e]
    };
    for [i, j, k] in sc.labelled_triangles().into_iter().take(200) {
        assert!((rate(&i, &j) + rate(&j, &k) + rate(&k, &i)).abs() < 1e-12);
        assert!((rate(&i, &j).exp() * rate(&j, &i).exp() - 1.0).abs() < 1e-12);
    }
    let noisy = synth_forex(25, 1.0, 1.0, NoiseLevel::RelativeToSignal(0.01), 2024).unwrap();
    assert_eq!(noisy.flow, ds.flow);
    assert!((noisy.noise_level - 0.01 * ds.signal_std()).abs() < 1e-15);
    assert!(matches!(
        synth_forex(2, 1.0, 1.0, NoiseLevel::Absolute(0.0), 1),
        Err(Error::Usage(_))
    ));
}

#[test]
fn split_examples() {
    let ds = sample_hodge_flow(&seven_node(), FlowKind::Curl, 1, 0.0).unwrap();
    let a = split(&ds, 0.5, 3).unwrap();
    assert_eq!(a.train_mask, split(&ds, 0.5, 3).unwrap().train_mask);
    assert_eq!((a.train_indices().len(), a.test_indices().len()), (5, 5));
    assert_ne!(a.train_mask, split(&ds, 0.5, 4).unwrap().train_mask);
    assert!(matches!(split(&ds, 0.9, 3), Err(Error::Usage(_))));
    assert!(matches!(split(&ds, 0.0, 3), Err(Error::Usage(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_flows_are_pure_and_deterministic(
        n in 5usize..14, p in 0.3f64..0.9, fill in 0.2f64..1.0, seed in any::<u64>(),
    ) {
        let Ok(sc) = random_complex(n, p, fill, seed) else { return Ok(()) };
        let again = random_complex(n, p, fill, seed).unwrap();
        prop_assert_eq!(sc.b2_int(), again.b2_int());
        let g = sample_hodge_flow(&sc, FlowKind::Gradient, seed, 0.3).unwrap();
        prop_assert_eq!(&g.observations, &sample_hodge_flow(&again, FlowKind::Gradient, seed, 0.3).unwrap().observations);
        let scale = g.flow.values().amax().max(1.0);
        prop_assert!(sc.curl(&g.flow).unwrap().values().amax() <= 1e-14 * scale);
        if sc.num_triangles() > 0 {
            let c = sample_hodge_flow(&sc, FlowKind::Curl, seed, 0.3).unwrap();
            let scale = c.flow.values().amax().max(1.0);
            prop_assert!(sc.div(&c.flow).unwrap().values().amax() <= 1e-14 * scale);
        }
    }

    #[test]
    fn split_sizes_follow_ratio(ratio in 0.2f64..0.8, seed in any::<u64>()) {
        let ds = synth_forex(8, 1.0, 1.0, NoiseLevel::Absolute(0.1), 1).unwrap();
        let s = split(&ds, ratio, seed).unwrap();
        prop_assert_eq!(s.train_indices().len(), (ratio * 28.0).round() as usize);
        prop_assert_eq!(s.train_indices().len() + s.test_indices().len(), 28);
    }
}
