//! Synthetic datasets and flow-file ingestion.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with the caller's seed;
//! independent quantities draw from separate streams of the same seed so
//! that, for example, the gradient part of a mixed flow equals the pure
//! gradient flow generated with the same seed.

use std::collections::HashSet;
use std::fs::{self, File};
use std::path::Path;

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::complex::{Cochain, Degree, NodeId, SimplicialComplex2};
use crate::error::{Error, Result};
use crate::io::{read_cochain_rows, read_complex_json, write_cochain_csv, write_complex_json};
use crate::spectral::harmonic_basis;

/// Name of the generator used for every stochastic operation.
pub const RNG_NAME: &str = "ChaCha8";

const STREAM_GRADIENT: u64 = 0;
const STREAM_CURL: u64 = 1;
const STREAM_HARMONIC: u64 = 2;
const STREAM_NOISE: u64 = 3;
const STREAM_SPLIT: u64 = 4;
const STREAM_GRAPH: u64 = 5;
const STREAM_FILL: u64 = 6;

/// The 25 most traded currencies in order of turnover, used as node names by the forex generator.
pub const CURRENCIES: [&str; 25] = [
    "USD", "EUR", "JPY", "GBP", "AUD", "CAD", "CHF", "CNY", "HKD", "NZD", "SEK", "KRW", "SGD",
    "NOK", "MXN", "INR", "RUB", "ZAR", "TRY", "BRL", "TWD", "DKK", "PLN", "THB", "IDR",
];

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Where a dataset came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub rng: String,
    pub params: serde_json::Value,
}

/// An edge flow on a complex with its observation and split masks.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub complex: SimplicialComplex2,
    /// Noise-free flow (equal to `observations` for ingested files).
    pub flow: Cochain,
    /// Flow with observation noise added.
    pub observations: Cochain,
    /// Edges that carry a value at all.
    pub observed: Vec<bool>,
    /// Training edges; the rest of the observed edges form the test set.
    pub train_mask: Option<Vec<bool>>,
    pub noise_level: f64,
    pub provenance: Provenance,
}

impl Dataset {
    fn new(
        complex: SimplicialComplex2,
        flow: DVector<f64>,
        noise_level: f64,
        seed: u64,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut noisy = flow.clone();
        if noise_level > 0.0 {
            let mut r = rng(seed, STREAM_NOISE);
            let normal = Normal::new(0.0, noise_level)
                .map_err(|e| Error::Generation(format!("noise level {noise_level}: {e}")))?;
            for v in noisy.iter_mut() {
                *v += normal.sample(&mut r);
            }
        }
        let n = flow.len();
        Ok(Self {
            flow: Cochain::new(Degree::Edge, flow)?,
            observations: Cochain::new(Degree::Edge, noisy)?,
            observed: vec![true; n],
            train_mask: None,
            complex,
            noise_level,
            provenance,
        })
    }

    pub fn train_indices(&self) -> Vec<usize> {
        match &self.train_mask {
            Some(m) => (0..m.len()).filter(|&i| m[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Observed edges outside the training set.
    pub fn test_indices(&self) -> Vec<usize> {
        match &self.train_mask {
            Some(m) => (0..m.len())
                .filter(|&i| self.observed[i] && !m[i])
                .collect(),
            None => (0..self.observed.len())
                .filter(|&i| self.observed[i])
                .collect(),
        }
    }

    pub fn values_at(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.observations.values()[i]).collect()
    }

    /// Sample standard deviation of the noise-free flow.
    pub fn signal_std(&self) -> f64 {
        std_dev(self.flow.values())
    }

    /// Writes `complex.json`, `flow.csv`, `truth.csv`, `mask.csv` and
    /// `provenance.json` into `dir`.
    pub fn write_bundle(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_complex_json(&self.complex, dir.join("complex.json"))?;
        write_cochain_csv(
            &self.complex,
            Degree::Edge,
            self.observations.values(),
            Some(&self.observed),
            File::create(dir.join("flow.csv"))?,
        )?;
        write_cochain_csv(
            &self.complex,
            Degree::Edge,
            self.flow.values(),
            Some(&self.observed),
            File::create(dir.join("truth.csv"))?,
        )?;
        let mut w = csv::Writer::from_path(dir.join("mask.csv"))?;
        w.write_record(["simplex", "train"])?;
        if let Some(mask) = &self.train_mask {
            for (i, &m) in mask.iter().enumerate() {
                if self.observed[i] {
                    w.write_record([self.complex.edge_label(i), u8::from(m).to_string()])?;
                }
            }
        }
        w.flush()?;
        let prov = BundleProvenance {
            provenance: self.provenance.clone(),
            noise_level: self.noise_level,
        };
        fs::write(
            dir.join("provenance.json"),
            serde_json::to_string_pretty(&prov)? + "\n",
        )?;
        Ok(())
    }

    /// Reads a directory written by [`Dataset::write_bundle`].
    pub fn read_bundle(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let complex = read_complex_json(dir.join("complex.json"), false)?;
        let n = complex.num_edges();
        let mut observations = DVector::zeros(n);
        let mut observed = vec![false; n];
        for r in read_cochain_rows(&complex, Degree::Edge, File::open(dir.join("flow.csv"))?)? {
            observations[r.index] = r.value;
            observed[r.index] = true;
        }
        let mut flow = observations.clone();
        let truth = dir.join("truth.csv");
        if truth.exists() {
            for r in read_cochain_rows(&complex, Degree::Edge, File::open(truth)?)? {
                flow[r.index] = r.value;
            }
        }
        let mask_rows = read_mask_csv(&complex, &dir.join("mask.csv"))?;
        let train_mask = if mask_rows.iter().any(|m| m.is_some()) {
            Some(mask_rows.iter().map(|m| m.unwrap_or(false)).collect())
        } else {
            None
        };
        let prov: BundleProvenance =
            serde_json::from_str(&fs::read_to_string(dir.join("provenance.json"))?)?;
        let ds = Self {
            complex,
            flow: Cochain::new(Degree::Edge, flow)?,
            observations: Cochain::new(Degree::Edge, observations)?,
            observed,
            train_mask,
            noise_level: prov.noise_level,
            provenance: prov.provenance,
        };
        if let Some(m) = &ds.train_mask {
            check_mask(m, &ds.observed)?;
        }
        Ok(ds)
    }
}

#[derive(Serialize, Deserialize)]
struct BundleProvenance {
    #[serde(flatten)]
    provenance: Provenance,
    noise_level: f64,
}

fn read_mask_csv(sc: &SimplicialComplex2, path: &Path) -> Result<Vec<Option<bool>>> {
    let mut out = vec![None; sc.num_edges()];
    if !path.exists() {
        return Ok(out);
    }
    let parser = crate::io::SimplexParser::new(sc);
    let mut rdr = csv::Reader::from_path(path)?;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let (idx, _) = parser
            .parse(Degree::Edge, rec.get(0).unwrap_or(""))
            .ok_or_else(|| Error::ingestion(Some(i + 1), "unknown simplex in mask.csv"))?;
        out[idx] = Some(rec.get(1) == Some("1"));
    }
    Ok(out)
}

fn std_dev(v: &DVector<f64>) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mean = v.mean();
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Erdős–Rényi graph on `n_nodes` integer-labelled nodes restricted to its
/// largest connected component, with a fraction of its 3-cliques filled.
pub fn random_complex(
    n_nodes: usize,
    edge_prob: f64,
    triangle_fill_ratio: f64,
    seed: u64,
) -> Result<SimplicialComplex2> {
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::Usage(format!(
            "edge probability must be in (0, 1], got {edge_prob}"
        )));
    }
    if !(0.0..=1.0).contains(&triangle_fill_ratio) {
        return Err(Error::Usage(format!(
            "triangle fill ratio must be in [0, 1], got {triangle_fill_ratio}"
        )));
    }
    let graph = gnp(n_nodes, edge_prob, seed, |i| NodeId::Int(i as i64))?;
    fill_cliques(&graph, triangle_fill_ratio, seed)
}

fn gnp(n: usize, p: f64, seed: u64, label: impl Fn(usize) -> NodeId) -> Result<SimplicialComplex2> {
    let mut r = rng(seed, STREAM_GRAPH);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.random::<f64>() < p {
                edges.push([label(i), label(j)]);
            }
        }
    }
    let full = SimplicialComplex2::build((0..n).map(&label).collect(), edges, vec![], false)?;
    let giant = full
        .connected_components()
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b.cmp(a)))
        .unwrap_or_default();
    if giant.len() < 2 {
        return Err(Error::Generation(format!(
            "random graph with n={n}, p={p}, seed={seed} has no edges"
        )));
    }
    Ok(full.induced(&giant))
}

fn fill_cliques(graph: &SimplicialComplex2, ratio: f64, seed: u64) -> Result<SimplicialComplex2> {
    let cliques =
        SimplicialComplex2::build(graph.nodes().to_vec(), graph.labelled_edges(), vec![], true)?;
    let mut all: Vec<[NodeId; 3]> = cliques.labelled_triangles();
    let keep = (ratio * all.len() as f64).round() as usize;
    if keep < all.len() {
        let mut r = rng(seed, STREAM_FILL);
        all.shuffle(&mut r);
        all.truncate(keep);
    }
    SimplicialComplex2::build(graph.nodes().to_vec(), graph.labelled_edges(), all, false)
}

/// Which Hodge subspace a synthetic flow is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FlowKind {
    Gradient,
    Curl,
    Harmonic,
    Mixed {
        harmonic: f64,
        gradient: f64,
        curl: f64,
    },
}

/// `B1ᵀ z` with `z ~ N(0, I)` on nodes.
pub fn gradient_flow(sc: &SimplicialComplex2, seed: u64) -> DVector<f64> {
    let mut r = rng(seed, STREAM_GRADIENT);
    let f0 = DVector::from_fn(sc.num_nodes(), |_, _| StandardNormal.sample(&mut r));
    sc.grad_values(&f0)
}

/// `B2 z` with `z ~ N(0, I)` on triangles.
pub fn curl_flow(sc: &SimplicialComplex2, seed: u64) -> DVector<f64> {
    let mut r = rng(seed, STREAM_CURL);
    let f2 = DVector::from_fn(sc.num_triangles(), |_, _| StandardNormal.sample(&mut r));
    sc.curl_adjoint_values(&f2)
}

/// `U_H z` with `z ~ N(0, I)` on an orthonormal harmonic basis.
pub fn harmonic_flow(sc: &SimplicialComplex2, seed: u64) -> Result<DVector<f64>> {
    let basis = harmonic_basis(sc)?;
    if basis.ncols() == 0 {
        return Err(Error::Generation(
            "the complex has no harmonic flows (no holes)".into(),
        ));
    }
    let mut r = rng(seed, STREAM_HARMONIC);
    let coeffs = DVector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut r));
    Ok(basis * coeffs)
}

/// A flow from one Hodge subspace, or a weighted mix, plus Gaussian noise.
pub fn sample_hodge_flow(
    sc: &SimplicialComplex2,
    which: FlowKind,
    seed: u64,
    noise: f64,
) -> Result<Dataset> {
    if !(noise >= 0.0) {
        return Err(Error::Usage(format!(
            "noise level must be >= 0, got {noise}"
        )));
    }
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Generation(format!("the complex has no {what}")))
        }
    };
    let flow = match which {
        FlowKind::Gradient => {
            need(sc.num_edges() > 0, "edges")?;
            gradient_flow(sc, seed)
        }
        FlowKind::Curl => {
            need(sc.num_triangles() > 0, "triangles")?;
            curl_flow(sc, seed)
        }
        FlowKind::Harmonic => harmonic_flow(sc, seed)?,
        FlowKind::Mixed {
            harmonic,
            gradient,
            curl,
        } => {
            let mut f = DVector::zeros(sc.num_edges());
            if gradient != 0.0 {
                f += gradient_flow(sc, seed) * gradient;
            }
            if curl != 0.0 {
                need(sc.num_triangles() > 0, "triangles")?;
                f += curl_flow(sc, seed) * curl;
            }
            if harmonic != 0.0 {
                f += harmonic_flow(sc, seed)? * harmonic;
            }
            f
        }
    };
    let provenance = Provenance {
        generator: "hodge_flow".into(),
        seed: Some(seed),
        rng: RNG_NAME.into(),
        params: serde_json::json!({ "which": which, "noise": noise }),
    };
    Dataset::new(sc.clone(), flow, noise, seed, provenance)
}

/// Observation noise for generators that scale it to the signal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseLevel {
    Absolute(f64),
    /// Multiple of the sample standard deviation of the clean flow.
    RelativeToSignal(f64),
}

/// Arbitrage-free exchange market: log-rates `f1(i,j) = v_j - v_i` for
/// log-valuations `v ~ N(0, scale²)`, every 3-clique closed as a triangle.
pub fn synth_forex(
    n_currencies: usize,
    pair_prob: f64,
    potential_scale: f64,
    noise: NoiseLevel,
    seed: u64,
) -> Result<Dataset> {
    if n_currencies < 3 {
        return Err(Error::Usage(format!(
            "need at least 3 currencies, got {n_currencies}"
        )));
    }
    if !(pair_prob > 0.0 && pair_prob <= 1.0) {
        return Err(Error::Usage(format!(
            "pair probability must be in (0, 1], got {pair_prob}"
        )));
    }
    if !(potential_scale > 0.0) {
        return Err(Error::Usage(format!(
            "potential scale must be positive, got {potential_scale}"
        )));
    }
    let label = |i: usize| match CURRENCIES.get(i) {
        Some(c) => NodeId::Name((*c).to_string()),
        None => NodeId::Name(format!("X{i:03}")),
    };
    let sc = fill_cliques(&gnp(n_currencies, pair_prob, seed, label)?, 1.0, seed)?;
    let mut r = rng(seed, STREAM_GRADIENT);
    let potentials = DVector::from_fn(sc.num_nodes(), |_, _| {
        let z: f64 = StandardNormal.sample(&mut r);
        potential_scale * z
    });
    let flow = sc.grad_values(&potentials);
    let sigma = match noise {
        NoiseLevel::Absolute(s) => s,
        NoiseLevel::RelativeToSignal(k) => k * std_dev(&flow),
    };
    if !(sigma >= 0.0) {
        return Err(Error::Usage(format!(
            "noise level must be >= 0, got {sigma}"
        )));
    }
    let provenance = Provenance {
        generator: "synth_forex".into(),
        seed: Some(seed),
        rng: RNG_NAME.into(),
        params: serde_json::json!({
            "n_currencies": n_currencies,
            "pair_prob": pair_prob,
            "potential_scale": potential_scale,
            "noise": noise,
        }),
    };
    Dataset::new(sc, flow, sigma, seed, provenance)
}

/// How rows written against the stored orientation are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationPolicy {
    /// Flip the sign of rows written `j-i` for a stored edge `i-j`.
    #[default]
    Resign,
    /// Reject rows not written in the stored orientation.
    RequireCanonical,
}

/// Reads a complex and an edge-flow file into a dataset.
///
/// The split comes from the flow file's `split` column when present,
/// otherwise a seeded random split of the observed edges at
/// `fallback_ratio` is drawn.
pub fn load_flow_csv(
    complex_file: impl AsRef<Path>,
    flow_file: impl AsRef<Path>,
    policy: OrientationPolicy,
    infer_triangles: bool,
    fallback_ratio: f64,
    seed: u64,
) -> Result<Dataset> {
    let complex = read_complex_json(complex_file.as_ref(), infer_triangles)?;
    let rows = read_cochain_rows(&complex, Degree::Edge, File::open(flow_file.as_ref())?)?;
    let n = complex.num_edges();
    let mut values = DVector::zeros(n);
    let mut observed = vec![false; n];
    let mut splits = vec![None; n];
    for (i, r) in rows.iter().enumerate() {
        if policy == OrientationPolicy::RequireCanonical && !r.canonical {
            return Err(Error::ingestion(
                Some(i + 1),
                format!(
                    "edge {} is not written in canonical orientation",
                    complex.edge_label(r.index)
                ),
            ));
        }
        values[r.index] = r.value;
        observed[r.index] = true;
        splits[r.index] = r.split;
    }
    let provenance = Provenance {
        generator: "load_flow_csv".into(),
        seed: Some(seed),
        rng: RNG_NAME.into(),
        params: serde_json::json!({
            "complex": complex_file.as_ref().display().to_string(),
            "flow": flow_file.as_ref().display().to_string(),
            "policy": policy,
        }),
    };
    let flow = Cochain::new(Degree::Edge, values)?;
    let mut ds = Dataset {
        complex,
        observations: flow.clone(),
        flow,
        observed,
        train_mask: None,
        noise_level: 0.0,
        provenance,
    };
    let with_split = rows.iter().filter(|r| r.split.is_some()).count();
    if with_split > 0 {
        if with_split != rows.len() {
            return Err(Error::ingestion(
                None,
                "the split column must be set on every row or none",
            ));
        }
        let mask: Vec<bool> = splits.iter().map(|s| s.unwrap_or(false)).collect();
        check_mask(&mask, &ds.observed)?;
        ds.train_mask = Some(mask);
        ds.provenance.params["split_source"] = "file".into();
        Ok(ds)
    } else {
        ds.provenance.params["split_source"] = "seeded".into();
        ds.provenance.params["train_ratio"] = fallback_ratio.into();
        split(&ds, fallback_ratio, seed)
    }
}

/// Writes the observed edges as `simplex,value[,split]` in stored order.
pub fn write_flow_csv(ds: &Dataset, writer: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    match &ds.train_mask {
        Some(_) => w.write_record(["simplex", "value", "split"])?,
        None => w.write_record(["simplex", "value"])?,
    }
    for i in 0..ds.complex.num_edges() {
        if !ds.observed[i] {
            continue;
        }
        let label = ds.complex.edge_label(i);
        let value = ds.observations.values()[i].to_string();
        match &ds.train_mask {
            Some(m) => {
                w.write_record([label, value, if m[i] { "train" } else { "test" }.into()])?
            }
            None => w.write_record([label, value])?,
        }
    }
    w.flush()?;
    Ok(())
}

fn check_mask(mask: &[bool], observed: &[bool]) -> Result<()> {
    let train = mask
        .iter()
        .zip(observed)
        .filter(|(m, o)| **m && **o)
        .count();
    let test = mask
        .iter()
        .zip(observed)
        .filter(|(m, o)| !**m && **o)
        .count();
    if train < 2 || test < 2 {
        return Err(Error::Usage(format!(
            "a split needs at least 2 training and 2 test edges, got {train} and {test}"
        )));
    }
    Ok(())
}

/// Uniformly random train/test split of the observed edges.
pub fn split(ds: &Dataset, train_ratio: f64, seed: u64) -> Result<Dataset> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::Usage(format!(
            "train ratio must be in (0, 1), got {train_ratio}"
        )));
    }
    let mut candidates: Vec<usize> = (0..ds.observed.len()).filter(|&i| ds.observed[i]).collect();
    let n_train = (train_ratio * candidates.len() as f64).round() as usize;
    let mut r = rng(seed, STREAM_SPLIT);
    candidates.shuffle(&mut r);
    let chosen: HashSet<usize> = candidates[..n_train.min(candidates.len())]
        .iter()
        .copied()
        .collect();
    let mask: Vec<bool> = (0..ds.observed.len())
        .map(|i| chosen.contains(&i))
        .collect();
    check_mask(&mask, &ds.observed)?;
    let mut out = ds.clone();
    out.train_mask = Some(mask);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;

    #[test]
    fn dense_full_fill_gives_filled_triangle() {
        let sc = random_complex(3, 1.0, 1.0, 9).unwrap();
        assert_eq!(
            (sc.num_nodes(), sc.num_edges(), sc.num_triangles()),
            (3, 3, 1)
        );
    }

    #[test]
    fn zero_fill_has_no_triangles() {
        let sc = random_complex(12, 0.6, 0.0, 2).unwrap();
        assert_eq!(sc.num_triangles(), 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_complex(15, 0.3, 0.5, 77).unwrap();
        let b = random_complex(15, 0.3, 0.5, 77).unwrap();
        assert_eq!(a.b1_int(), b.b1_int());
        assert_eq!(a.b2_int(), b.b2_int());
        let fa = gradient_flow(&a, 4);
        let fb = gradient_flow(&b, 4);
        assert_eq!(fa, fb);
    }

    #[test]
    fn empty_graph_is_generation_error() {
        assert!(matches!(
            random_complex(1, 0.5, 0.0, 0),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn harmonic_on_filled_triangle_is_error() {
        assert!(matches!(
            sample_hodge_flow(&filled_triangle(), FlowKind::Harmonic, 0, 0.0),
            Err(Error::Generation(_))
        ));
    }

    #[test]
    fn gradient_and_curl_flows_are_exactly_pure() {
        let sc = seven_node();
        let g = sample_hodge_flow(&sc, FlowKind::Gradient, 3, 0.1).unwrap();
        let c = sample_hodge_flow(&sc, FlowKind::Curl, 3, 0.1).unwrap();
        // integer-exact up to the three-term rounding of floating point sums
        assert!(sc.curl(&g.flow).unwrap().values().amax() < 1e-14);
        assert!(sc.div(&c.flow).unwrap().values().amax() < 1e-14);
        assert!(g.observations != g.flow);
    }

    #[test]
    fn forex_is_arbitrage_free() {
        let ds = synth_forex(8, 1.0, 1.0, NoiseLevel::Absolute(0.0), 5).unwrap();
        let sc = &ds.complex;
        assert_eq!(sc.num_edges(), 28);
        assert_eq!(sc.num_triangles(), 56);
        assert!(sc.curl(&ds.flow).unwrap().values().amax() < 1e-12);
        let f = ds.flow.values();
        let usd = NodeId::from("USD");
        let eur = NodeId::from("EUR");
        let (e, s) = sc.oriented_edge(&usd, &eur).unwrap();
        let (e2, s2) = sc.oriented_edge(&eur, &usd).unwrap();
        assert_eq!(e, e2);
        assert!(((s * f[e]).exp() * (s2 * f[e]).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_counts_and_determinism() {
        let ds = sample_hodge_flow(&seven_node(), FlowKind::Gradient, 1, 0.0).unwrap();
        let a = split(&ds, 0.4, 11).unwrap();
        let b = split(&ds, 0.4, 11).unwrap();
        assert_eq!(a.train_mask, b.train_mask);
        assert_eq!(a.train_indices().len(), 4);
        assert_eq!(a.test_indices().len(), 6);
        assert!(matches!(split(&ds, 0.1, 1), Err(Error::Usage(_))));
        assert!(matches!(split(&ds, 1.0, 1), Err(Error::Usage(_))));
    }
}
