//! Hodge spectra of edge Laplacians.
//!
//! The eigenvectors of `L1` are split into the harmonic space `ker(L1)`,
//! the gradient space `im(B1ᵀ)` and the curl space `im(B2)`. Eigenvalues
//! shared between the gradient and curl spaces make a plain eigensolver
//! return mixed vectors; such eigenspaces are re-diagonalized against the
//! down Laplacian so every returned column is pure.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::complex::{Cochain, Degree, SimplicialComplex2};
use crate::error::{Error, Result};

/// Eigenvalues `λ ≤ ZERO_TOL · λmax` are treated as zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Relative residual bound used to recognise gradient and curl eigenvectors.
pub const RESIDUAL_TOL: f64 = 1e-6;
/// Consecutive eigenvalues closer than `CLUSTER_TOL · λmax` form one eigenspace.
const CLUSTER_TOL: f64 = 1e-6;
const EIGEN_MAX_ITER: usize = 10_000;
const KRYLOV_SEED: u64 = 0x5eed_1a2c;

/// One of the three Hodge subspaces of edge flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HodgeBlock {
    Harmonic,
    Gradient,
    Curl,
}

impl HodgeBlock {
    pub const ALL: [HodgeBlock; 3] = [HodgeBlock::Harmonic, HodgeBlock::Gradient, HodgeBlock::Curl];

    pub fn short(self) -> &'static str {
        match self {
            HodgeBlock::Harmonic => "H",
            HodgeBlock::Gradient => "G",
            HodgeBlock::Curl => "C",
        }
    }
}

/// Eigenpairs sorted by ascending eigenvalue; eigenvectors are columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenbasis {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigenbasis {
    pub fn empty(rows: usize) -> Self {
        Self {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(rows, 0),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `U diag(w) Uᵀ`.
    pub fn weighted_outer(&self, weights: &DVector<f64>) -> DMatrix<f64> {
        let scaled = scale_columns(&self.vectors, weights);
        scaled * self.vectors.transpose()
    }

    fn sorted(mut values: DVector<f64>, mut vectors: DMatrix<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        values = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
        vectors = vectors.select_columns(&order);
        Self { values, vectors }
    }
}

/// Full symmetric eigendecomposition with ascending eigenvalues.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<Eigenbasis> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigenbasis::empty(0));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::Numerical(format!(
            "symmetric eigensolver did not converge on a {n}x{n} matrix within {EIGEN_MAX_ITER} iterations"
        ))
    })?;
    Ok(Eigenbasis::sorted(eig.eigenvalues, eig.eigenvectors))
}

/// Eigendecomposition of a graph-type Laplacian; round-off negatives are
/// clamped to zero.
pub fn laplacian_eigen(l: &DMatrix<f64>) -> Result<Eigenbasis> {
    let mut eb = symmetric_eigen(l)?;
    let lmax = eb.values.iter().fold(0.0f64, |a, &v| a.max(v));
    for v in eb.values.iter_mut() {
        if *v <= ZERO_TOL * lmax {
            *v = 0.0;
        }
    }
    Ok(eb)
}

/// Eigenpairs of `L1` partitioned into the three Hodge subspaces.
#[derive(Clone, Debug)]
pub struct HodgeSpectrum {
    pub harmonic: Eigenbasis,
    pub gradient: Eigenbasis,
    pub curl: Eigenbasis,
    /// Number of retained non-harmonic modes when truncated.
    pub truncated: Option<usize>,
}

impl HodgeSpectrum {
    pub fn block(&self, block: HodgeBlock) -> &Eigenbasis {
        match block {
            HodgeBlock::Harmonic => &self.harmonic,
            HodgeBlock::Gradient => &self.gradient,
            HodgeBlock::Curl => &self.curl,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.harmonic.vectors.nrows()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated.is_some()
    }

    /// `(n_H, n_G, n_C)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.harmonic.len(), self.gradient.len(), self.curl.len())
    }

    pub fn lambda_max(&self) -> f64 {
        self.gradient
            .values
            .iter()
            .chain(self.curl.values.iter())
            .fold(0.0, |a: f64, &b| a.max(b))
    }

    /// Smallest nonzero eigenvalue among the retained modes.
    pub fn lambda_min_positive(&self) -> Option<f64> {
        self.gradient
            .values
            .iter()
            .chain(self.curl.values.iter())
            .copied()
            .reduce(f64::min)
    }

    /// All eigenpairs `[U_H U_G U_C]` with their block labels.
    pub fn concatenated(&self) -> (DVector<f64>, DMatrix<f64>, Vec<HodgeBlock>) {
        let n = self.num_edges();
        let total = self.harmonic.len() + self.gradient.len() + self.curl.len();
        let mut values = DVector::zeros(total);
        let mut vectors = DMatrix::zeros(n, total);
        let mut labels = Vec::with_capacity(total);
        let mut col = 0;
        for b in HodgeBlock::ALL {
            let eb = self.block(b);
            for k in 0..eb.len() {
                values[col] = eb.values[k];
                vectors.set_column(col, &eb.vectors.column(k));
                labels.push(b);
                col += 1;
            }
        }
        (values, vectors, labels)
    }

    /// `Σ_b U_b Λ_b U_bᵀ`; equals `L1` for a full spectrum.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.num_edges();
        let mut out = DMatrix::zeros(n, n);
        for b in HodgeBlock::ALL {
            let eb = self.block(b);
            out += eb.weighted_outer(&eb.values);
        }
        out
    }

    /// Projector `U_b U_bᵀ` onto the retained part of one block.
    pub fn projector(&self, block: HodgeBlock) -> DMatrix<f64> {
        let eb = self.block(block);
        &eb.vectors * eb.vectors.transpose()
    }

    /// Summary suitable for JSON export.
    pub fn summary(&self) -> SpectrumSummary {
        let part = |eb: &Eigenbasis| BlockSummary {
            count: eb.len(),
            eigenvalues: eb.values.iter().copied().collect(),
        };
        SpectrumSummary {
            num_edges: self.num_edges(),
            truncated: self.truncated,
            harmonic: part(&self.harmonic),
            gradient: part(&self.gradient),
            curl: part(&self.curl),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub count: usize,
    pub eigenvalues: Vec<f64>,
}

/// Per-block eigenvalues and counts of a [`HodgeSpectrum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub num_edges: usize,
    pub truncated: Option<usize>,
    pub harmonic: BlockSummary,
    pub gradient: BlockSummary,
    pub curl: BlockSummary,
}

/// Thresholds used by [`classify`].
#[derive(Clone, Copy, Debug)]
pub struct ClassifyTol {
    /// Absolute eigenvalue threshold for the harmonic space.
    pub zero: f64,
    /// Relative bound on `‖B2ᵀu‖ / √λ` (gradient) or `‖B1 u‖ / √λ` (curl).
    pub residual: f64,
}

impl ClassifyTol {
    pub fn for_lambda_max(lambda_max: f64) -> Self {
        Self {
            zero: ZERO_TOL * lambda_max.max(f64::MIN_POSITIVE),
            residual: RESIDUAL_TOL,
        }
    }
}

/// Assigns a unit eigenvector of `L1` to its Hodge subspace.
pub fn classify(
    u: &DVector<f64>,
    lambda: f64,
    sc: &SimplicialComplex2,
    tol: ClassifyTol,
) -> Result<HodgeBlock> {
    if lambda <= tol.zero {
        return Ok(HodgeBlock::Harmonic);
    }
    let curl_residual = sc.curl_values(u).norm();
    let div_residual = sc.div_values(u).norm();
    let bound = tol.residual * lambda.sqrt();
    if curl_residual <= bound {
        Ok(HodgeBlock::Gradient)
    } else if div_residual <= bound {
        Ok(HodgeBlock::Curl)
    } else {
        Err(Error::Classification {
            eigenvalue: lambda,
            curl_residual,
            div_residual,
        })
    }
}

/// Eigendecomposes `L1` and splits the eigenvectors into Hodge subspaces.
///
/// With `truncation = Some(l)` only the `l` largest non-harmonic modes are
/// kept, found by block Krylov iteration on the smaller Gram matrix of
/// `B1ᵀ` and of `B2`. The harmonic basis is always complete.
pub fn eigendecompose(sc: &SimplicialComplex2, truncation: Option<usize>) -> Result<HodgeSpectrum> {
    match truncation {
        None => full_spectrum(sc),
        Some(l) if l > sc.num_edges() => Err(Error::Usage(format!(
            "truncation {l} exceeds the number of edges {}",
            sc.num_edges()
        ))),
        Some(l) => truncated_spectrum(sc, l),
    }
}

fn full_spectrum(sc: &SimplicialComplex2) -> Result<HodgeSpectrum> {
    let n = sc.num_edges();
    let laps = sc.laplacians();
    let eig = symmetric_eigen(&laps.l1)?;
    let lambda_max = eig.values.iter().fold(0.0f64, |a, &v| a.max(v));
    let tol = ClassifyTol::for_lambda_max(lambda_max);

    let mut harmonic = Vec::new();
    let mut gradient: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut curl: Vec<(f64, DVector<f64>)> = Vec::new();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= CLUSTER_TOL * lambda_max {
            end += 1;
        }
        let cols: Vec<usize> = (start..end).collect();
        let labels: Vec<Result<HodgeBlock>> = cols
            .iter()
            .map(|&c| classify(&eig.vectors.column(c).into_owned(), eig.values[c], sc, tol))
            .collect();
        let any_failed = labels.iter().any(|l| l.is_err());
        let mixed = labels.iter().any(|l| matches!(l, Ok(HodgeBlock::Gradient)))
            && labels.iter().any(|l| matches!(l, Ok(HodgeBlock::Curl)));
        if (any_failed || mixed) && eig.values[start] > tol.zero {
            let space = eig.vectors.select_columns(&cols);
            let (g, c) = split_eigenspace(&space, &laps.ld, &laps.l1, lambda_max)?;
            gradient.extend(g);
            curl.extend(c);
        } else {
            for (&c, label) in cols.iter().zip(labels) {
                let u = eig.vectors.column(c).into_owned();
                match label? {
                    HodgeBlock::Harmonic => harmonic.push(u),
                    HodgeBlock::Gradient => gradient.push((eig.values[c], u)),
                    HodgeBlock::Curl => curl.push((eig.values[c], u)),
                }
            }
        }
        start = end;
    }

    for (lambda, u) in gradient.iter().chain(curl.iter()) {
        classify(u, *lambda, sc, tol)?;
    }

    Ok(HodgeSpectrum {
        harmonic: Eigenbasis {
            values: DVector::zeros(harmonic.len()),
            vectors: columns_to_matrix(n, &harmonic),
        },
        gradient: pairs_to_basis(n, gradient),
        curl: pairs_to_basis(n, curl),
        truncated: None,
    })
}

/// Splits an invariant subspace of `L1` into its gradient and curl parts.
///
/// Spectral subspaces of `L1` are invariant under the projector onto
/// `im(B1ᵀ)`, so diagonalizing `Vᵀ Ld V` separates them exactly: gradient
/// directions carry the eigenvalue, curl directions carry zero.
fn split_eigenspace(
    space: &DMatrix<f64>,
    ld: &DMatrix<f64>,
    l1: &DMatrix<f64>,
    lambda_max: f64,
) -> Result<(Vec<(f64, DVector<f64>)>, Vec<(f64, DVector<f64>)>)> {
    let m = space.transpose() * ld * space;
    let inner = symmetric_eigen(&symmetrize(m))?;
    let rotated = space * &inner.vectors;
    let threshold = 0.5 * inner.values.iter().fold(0.0f64, |a, &v| a.max(v));
    let threshold = threshold.max(ZERO_TOL * lambda_max);
    let (mut g_cols, mut c_cols) = (Vec::new(), Vec::new());
    for k in 0..inner.len() {
        if inner.values[k] > threshold {
            g_cols.push(k);
        } else {
            c_cols.push(k);
        }
    }
    let rediagonalize = |cols: &[usize]| -> Result<Vec<(f64, DVector<f64>)>> {
        if cols.is_empty() {
            return Ok(Vec::new());
        }
        let q = rotated.select_columns(cols);
        let t = symmetrize(q.transpose() * l1 * &q);
        let e = symmetric_eigen(&t)?;
        let v = &q * &e.vectors;
        Ok((0..e.len())
            .map(|k| (e.values[k], v.column(k).normalize()))
            .collect())
    };
    Ok((rediagonalize(&g_cols)?, rediagonalize(&c_cols)?))
}

fn truncated_spectrum(sc: &SimplicialComplex2, l: usize) -> Result<HodgeSpectrum> {
    let n = sc.num_edges();
    let harmonic = harmonic_basis(sc)?;
    let keep = l.min(n - harmonic.ncols());

    let mut candidates: Vec<(f64, DVector<f64>, HodgeBlock)> = Vec::new();
    if keep > 0 {
        let grad = top_column_modes(&sc.b1().transpose(), keep, KRYLOV_SEED)?;
        let curl = top_column_modes(&sc.b2(), keep, KRYLOV_SEED ^ 0xc0ffee)?;
        candidates.extend(grad.into_iter().map(|(l, u)| (l, u, HodgeBlock::Gradient)));
        candidates.extend(curl.into_iter().map(|(l, u)| (l, u, HodgeBlock::Curl)));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(keep);

    let (mut gradient, mut curl) = (Vec::new(), Vec::new());
    for (lambda, u, block) in candidates {
        match block {
            HodgeBlock::Gradient => gradient.push((lambda, u)),
            _ => curl.push((lambda, u)),
        }
    }
    Ok(HodgeSpectrum {
        harmonic: Eigenbasis {
            values: DVector::zeros(harmonic.ncols()),
            vectors: harmonic,
        },
        gradient: pairs_to_basis(n, gradient),
        curl: pairs_to_basis(n, curl),
        truncated: Some(keep),
    })
}

/// Orthonormal basis of `ker(L1)` built from the incidence matrices.
///
/// Fundamental cycles of a spanning forest span `ker(B1)`. With `Q` an
/// orthonormal basis of that space, `im(B2) ⊆ ker(B1)` gives
/// `ker(L1) = Q ker(Qᵀ Lu Q)`, an eigenproblem of size `dim ker(B1)`.
pub fn harmonic_basis(sc: &SimplicialComplex2) -> Result<DMatrix<f64>> {
    let n = sc.num_edges();
    let cycles = fundamental_cycles(sc);
    if cycles.ncols() == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let q = cycles.qr().q();
    let b2 = sc.b2();
    let up = q.transpose() * &b2;
    let restricted = laplacian_eigen(&symmetrize(&up * up.transpose()))?;
    let null: Vec<usize> = (0..restricted.len())
        .filter(|&k| restricted.values[k] == 0.0)
        .collect();
    Ok(q * restricted.vectors.select_columns(&null))
}

/// Orthonormal basis of `im(D)`, from whichever of `DᵀD` and `DDᵀ` is
/// smaller.
pub(crate) fn column_space(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if d.ncols() <= d.nrows() {
        return Ok(image_basis(
            d,
            &laplacian_eigen(&symmetrize(d.transpose() * d))?,
        ));
    }
    let eb = laplacian_eigen(&symmetrize(d * d.transpose()))?;
    let keep: Vec<usize> = (0..eb.len()).filter(|&k| eb.values[k] > 0.0).collect();
    Ok(eb.vectors.select_columns(&keep))
}

/// The `k` largest nonzero eigenpairs of `DDᵀ`, found by block Krylov
/// iteration on the smaller of `DᵀD` and `DDᵀ`.
fn top_column_modes(d: &DMatrix<f64>, k: usize, seed: u64) -> Result<Vec<(f64, DVector<f64>)>> {
    let lifted = d.ncols() <= d.nrows();
    let gram = if lifted {
        d.transpose() * d
    } else {
        d * d.transpose()
    };
    let top = top_eigenpairs(&symmetrize(gram), k, seed)?;
    let lmax = top.values.iter().fold(0.0f64, |a, &v| a.max(v));
    let mut out = Vec::new();
    for j in 0..top.len() {
        if top.values[j] <= ZERO_TOL * lmax {
            continue;
        }
        let v = top.vectors.column(j);
        let u = if lifted { d * v } else { v.into_owned() };
        out.push((top.values[j], u.normalize()));
    }
    Ok(out)
}

/// Orthonormal basis of `im(D)` from the eigenpairs of `DᵀD`: the columns
/// `D u / √λ` for every nonzero `λ`.
pub(crate) fn image_basis(d: &DMatrix<f64>, gram: &Eigenbasis) -> DMatrix<f64> {
    let keep: Vec<usize> = (0..gram.len()).filter(|&k| gram.values[k] > 0.0).collect();
    let mut out = d * gram.vectors.select_columns(&keep);
    for (mut col, &k) in out.column_iter_mut().zip(&keep) {
        col /= gram.values[k].sqrt();
    }
    out
}

/// Columns are the signed indicator vectors of the fundamental cycles.
fn fundamental_cycles(sc: &SimplicialComplex2) -> DMatrix<f64> {
    let n0 = sc.num_nodes();
    let edges = sc.edges();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n0];
    for (e, &[i, j]) in edges.iter().enumerate() {
        adjacency[i].push((j, e));
        adjacency[j].push((i, e));
    }
    // BFS forest: parent edge and depth per node
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n0];
    let mut depth = vec![usize::MAX; n0];
    let mut in_tree = vec![false; edges.len()];
    for root in 0..n0 {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adjacency[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, e));
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let non_tree: Vec<usize> = (0..edges.len()).filter(|&e| !in_tree[e]).collect();
    let mut z = DMatrix::zeros(edges.len(), non_tree.len());
    // orientation sign of traversing edge e from node a to node b
    let step = |e: usize, from: usize| -> f64 {
        if edges[e][0] == from {
            1.0
        } else {
            -1.0
        }
    };
    for (col, &e) in non_tree.iter().enumerate() {
        let [i, j] = edges[e];
        // cycle i -> j along e, then j -> ... -> i along tree paths
        z[(e, col)] = 1.0;
        let (mut a, mut b) = (j, i);
        let mut tail_a = Vec::new(); // path from j upward, traversed forward
        let mut tail_b = Vec::new(); // path from i upward, traversed backward
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = parent[a].expect("non-root has a parent");
                tail_a.push((pe, a));
                a = p;
            } else {
                let (p, pe) = parent[b].expect("non-root has a parent");
                tail_b.push((pe, p));
                b = p;
            }
        }
        for (pe, from) in tail_a {
            z[(pe, col)] += step(pe, from);
        }
        for (pe, from) in tail_b {
            z[(pe, col)] += step(pe, from);
        }
    }
    z
}

/// The `k` largest eigenpairs of a symmetric PSD matrix by randomized block
/// Krylov iteration with full reorthogonalization and Rayleigh–Ritz
/// extraction. The block size exceeds `k`, so eigenvalues of multiplicity up
/// to the block size are resolved.
pub fn top_eigenpairs(a: &DMatrix<f64>, k: usize, seed: u64) -> Result<Eigenbasis> {
    let n = a.nrows();
    let k = k.min(n);
    if k == 0 {
        return Ok(Eigenbasis::empty(n));
    }
    let block = (k + 8).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_block =
        |cols: usize| DMatrix::from_fn(n, cols, |_, _| StandardNormal.sample(&mut rng));
    let scale = a.abs().max().max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale * n as f64;

    let mut basis = DMatrix::<f64>::zeros(n, 0);
    let mut next = random_block(block);
    let max_rounds = n / block + 50;
    let mut last_residual = f64::INFINITY;
    for _round in 0..max_rounds {
        let fresh = orthonormalize_against(&basis, &next);
        let fresh = if fresh.ncols() == 0 {
            if basis.ncols() >= n {
                break;
            }
            orthonormalize_against(&basis, &random_block(block))
        } else {
            fresh
        };
        if fresh.ncols() == 0 {
            break;
        }
        basis = concat_columns(&basis, &fresh);
        let projected = symmetrize(basis.transpose() * a * &basis);
        let ritz = symmetric_eigen(&projected)?;
        let m = ritz.len();
        let take = k.min(m);
        let top: Vec<usize> = (m - take..m).collect();
        let vectors = &basis * ritz.vectors.select_columns(&top);
        let values = DVector::from_iterator(take, top.iter().map(|&i| ritz.values[i]));
        let residual = (a * &vectors - scale_columns(&vectors, &values))
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        last_residual = residual;
        if (take == k && residual <= tol && basis.ncols() >= block) || basis.ncols() >= n {
            return Ok(Eigenbasis::sorted(values, vectors));
        }
        next = a * &fresh;
    }
    Err(Error::Numerical(format!(
        "block Krylov eigensolver did not converge: n={n}, k={k}, block={block}, \
         basis size={}, max Ritz residual={last_residual:.3e} (tolerance {tol:.3e})",
        basis.ncols()
    )))
}

/// Orthonormalizes the columns of `x` against `q` and each other
/// (two passes of classical Gram–Schmidt), dropping dependent columns.
fn orthonormalize_against(q: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in x.column_iter() {
        let mut v = c.into_owned();
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            if q.ncols() > 0 {
                let coeffs = q.transpose() * &v;
                v -= q * coeffs;
            }
            for w in &kept {
                let d = w.dot(&v);
                v.axpy(-d, w, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-10 * original {
            kept.push(v / norm);
        }
    }
    columns_to_matrix(x.nrows(), &kept)
}

/// Orthogonal projections of an edge flow onto the three Hodge subspaces.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeComponents {
    pub harmonic: Cochain,
    pub gradient: Cochain,
    pub curl: Cochain,
}

impl HodgeComponents {
    pub fn component(&self, block: HodgeBlock) -> &Cochain {
        match block {
            HodgeBlock::Harmonic => &self.harmonic,
            HodgeBlock::Gradient => &self.gradient,
            HodgeBlock::Curl => &self.curl,
        }
    }

    /// Squared norms of the three parts divided by their total.
    pub fn energy_fractions(&self) -> [f64; 3] {
        let e = HodgeBlock::ALL.map(|b| self.component(b).values().norm_squared());
        let total: f64 = e.iter().sum();
        if total == 0.0 {
            [0.0; 3]
        } else {
            e.map(|v| v / total)
        }
    }
}

/// Least-squares projectors onto `im(B1ᵀ)` and `im(B2)`.
///
/// Precomputes orthonormal bases of `im(B1ᵀ)` and `im(B2)` once so that
/// many flows (or a matrix of flows, one per column) can be decomposed
/// cheaply.
#[derive(Clone, Debug)]
pub struct HodgeProjector {
    gradient: DMatrix<f64>,
    curl: DMatrix<f64>,
}

impl HodgeProjector {
    pub fn new(sc: &SimplicialComplex2) -> Result<Self> {
        Ok(Self {
            gradient: column_space(&sc.b1().transpose())?,
            curl: column_space(&sc.b2())?,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.gradient.nrows()
    }

    /// Column-wise decomposition: returns `(harmonic, gradient, curl)`.
    pub fn decompose_columns(
        &self,
        flows: &DMatrix<f64>,
    ) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let gradient = &self.gradient * (self.gradient.transpose() * flows);
        let curl = &self.curl * (self.curl.transpose() * flows);
        let harmonic = flows - &gradient - &curl;
        (harmonic, gradient, curl)
    }

    pub fn decompose(&self, f1: &Cochain) -> Result<HodgeComponents> {
        if f1.degree() != Degree::Edge || f1.len() != self.num_edges() {
            return Err(Error::Usage(format!(
                "hodge decomposition needs an edge cochain of length {}",
                self.num_edges()
            )));
        }
        let m = DMatrix::from_column_slice(f1.len(), 1, f1.values().as_slice());
        let (h, g, c) = self.decompose_columns(&m);
        let edge = |m: DMatrix<f64>| Cochain::new(Degree::Edge, m.column(0).into_owned());
        Ok(HodgeComponents {
            harmonic: edge(h)?,
            gradient: edge(g)?,
            curl: edge(c)?,
        })
    }
}

/// Splits an edge flow into harmonic, gradient and curl parts.
pub fn hodge_decompose(sc: &SimplicialComplex2, f1: &Cochain) -> Result<HodgeComponents> {
    HodgeProjector::new(sc)?.decompose(f1)
}

/// Solution of the edge diffusion `dφ/dt = -(μ Ld + γ Lu) φ` at time `t`.
pub fn edge_diffusion(
    spectrum: &HodgeSpectrum,
    phi0: &Cochain,
    mu: f64,
    gamma: f64,
    t: f64,
) -> Result<Cochain> {
    if !(mu > 0.0 && gamma > 0.0) {
        return Err(Error::Usage(format!(
            "diffusion rates must be positive, got mu={mu}, gamma={gamma}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Usage(format!(
            "diffusion time must be non-negative, got {t}"
        )));
    }
    if spectrum.is_truncated() {
        return Err(Error::Usage(
            "edge diffusion needs an untruncated spectrum".into(),
        ));
    }
    if phi0.degree() != Degree::Edge || phi0.len() != spectrum.num_edges() {
        return Err(Error::Usage(format!(
            "initial condition must be an edge cochain of length {}",
            spectrum.num_edges()
        )));
    }
    if t == 0.0 {
        return Ok(phi0.clone());
    }
    let phi = phi0.values();
    let mut out = DVector::zeros(phi.len());
    for (block, rate) in [
        (HodgeBlock::Harmonic, 0.0),
        (HodgeBlock::Gradient, mu),
        (HodgeBlock::Curl, gamma),
    ] {
        let eb = spectrum.block(block);
        if eb.is_empty() {
            continue;
        }
        let coeffs = eb.vectors.transpose() * phi;
        let decayed = coeffs.zip_map(&eb.values, |c, l| c * (-t * rate * l).exp());
        out += &eb.vectors * decayed;
    }
    Cochain::new(Degree::Edge, out)
}

pub(crate) fn scale_columns(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (mut col, &s) in out.column_iter_mut().zip(w.iter()) {
        col *= s;
    }
    out
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn concat_columns(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

fn columns_to_matrix(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols.len());
    for (k, c) in cols.iter().enumerate() {
        m.set_column(k, c);
    }
    m
}

fn pairs_to_basis(rows: usize, pairs: Vec<(f64, DVector<f64>)>) -> Eigenbasis {
    let values = DVector::from_iterator(pairs.len(), pairs.iter().map(|p| p.0));
    let cols: Vec<DVector<f64>> = pairs.into_iter().map(|p| p.1).collect();
    Eigenbasis::sorted(values, columns_to_matrix(rows, &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::*;

    fn gram_defect(m: &DMatrix<f64>) -> f64 {
        (m.transpose() * m - DMatrix::identity(m.ncols(), m.ncols()))
            .abs()
            .max()
    }

    #[test]
    fn filled_triangle_blocks() {
        let s = eigendecompose(&filled_triangle(), None).unwrap();
        assert_eq!(s.dims(), (0, 2, 1));
        for v in s.gradient.values.iter().chain(s.curl.values.iter()) {
            assert!((v - 3.0).abs() < 1e-10);
        }
        let u = s.curl.vectors.column(0);
        let expect = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
        assert!((u.dot(&expect).abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn open_triangle_harmonic() {
        let s = eigendecompose(&open_triangle(), None).unwrap();
        assert_eq!(s.dims(), (1, 2, 0));
        let u = s.harmonic.vectors.column(0);
        let expect = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
        assert!((u.dot(&expect).abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn seven_node_has_one_hole() {
        let sc = seven_node();
        let s = eigendecompose(&sc, None).unwrap();
        assert_eq!(s.dims().0, 1);
        let (_, all, _) = s.concatenated();
        assert!(gram_defect(&all) < 1e-8);
        let l1 = sc.laplacians().l1;
        assert!((s.reconstruct() - &l1).abs().max() < 1e-8 * l1.abs().max());
    }

    #[test]
    fn classify_basic_vectors() {
        let sc = filled_triangle();
        let tol = ClassifyTol::for_lambda_max(3.0);
        let c = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3f64.sqrt();
        assert_eq!(classify(&c, 3.0, &sc, tol).unwrap(), HodgeBlock::Curl);
        let g = DVector::from_vec(vec![1.0, 1.0, 0.0]) / 2f64.sqrt();
        assert_eq!(classify(&g, 3.0, &sc, tol).unwrap(), HodgeBlock::Gradient);
        assert_eq!(classify(&g, 0.0, &sc, tol).unwrap(), HodgeBlock::Harmonic);
        let mixed = (c + g).normalize();
        assert!(matches!(
            classify(&mixed, 3.0, &sc, tol),
            Err(Error::Classification { .. })
        ));
    }

    #[test]
    fn harmonic_basis_matches_kernel_dimension() {
        let sc = seven_node();
        let h = harmonic_basis(&sc).unwrap();
        assert_eq!(h.ncols(), 1);
        let l1 = sc.laplacians().l1;
        assert!((&l1 * &h).norm() < 1e-10);
    }

    #[test]
    fn truncated_full_rank_equals_dense() {
        let sc = seven_node();
        let full = eigendecompose(&sc, None).unwrap();
        let trunc = eigendecompose(&sc, Some(sc.num_edges())).unwrap();
        assert_eq!(full.dims(), trunc.dims());
        let sorted = |s: &HodgeSpectrum| {
            let mut v: Vec<f64> = s.concatenated().0.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (a, b) in sorted(&full).iter().zip(sorted(&trunc)) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn truncation_keeps_largest_and_all_harmonic() {
        let sc = seven_node();
        let full = eigendecompose(&sc, None).unwrap();
        let trunc = eigendecompose(&sc, Some(3)).unwrap();
        assert_eq!(trunc.truncated, Some(3));
        assert_eq!(trunc.harmonic.len(), 1);
        assert_eq!(trunc.gradient.len() + trunc.curl.len(), 3);
        let mut all: Vec<f64> = full.concatenated().0.iter().copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let mut kept: Vec<f64> = trunc
            .gradient
            .values
            .iter()
            .chain(trunc.curl.values.iter())
            .copied()
            .collect();
        kept.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in all.iter().zip(kept) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn truncation_beyond_edges_is_rejected() {
        assert!(matches!(
            eigendecompose(&filled_triangle(), Some(4)),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn decompose_open_cycle_flow_is_harmonic() {
        let sc = open_triangle();
        let f = sc
            .cochain(Degree::Edge, DVector::from_vec(vec![1.0, -1.0, 1.0]))
            .unwrap();
        let parts = hodge_decompose(&sc, &f).unwrap();
        assert!((parts.harmonic.values() - f.values()).norm() < 1e-12);
        assert!(parts.gradient.values().norm() < 1e-12);
        assert!(parts.curl.values().norm() < 1e-12);
    }

    #[test]
    fn diffusion_edge_cases() {
        let sc = seven_node();
        let s = eigendecompose(&sc, None).unwrap();
        let phi0 = sc
            .cochain(Degree::Edge, DVector::from_fn(10, |i, _| (i as f64).sin()))
            .unwrap();
        let at_zero = edge_diffusion(&s, &phi0, 1.0, 2.0, 0.0).unwrap();
        assert!((at_zero.values() - phi0.values()).norm() < 1e-12);
        let h = sc
            .cochain(Degree::Edge, s.harmonic.vectors.column(0).into_owned())
            .unwrap();
        let later = edge_diffusion(&s, &h, 0.5, 3.0, 7.0).unwrap();
        assert!((later.values() - h.values()).norm() < 1e-12);
        assert!(edge_diffusion(&s, &phi0, -1.0, 1.0, 1.0).is_err());
        assert!(edge_diffusion(&s, &phi0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn top_eigenpairs_with_repeated_eigenvalue() {
        // complete graph K6: L0 spectrum {0, 6 x5}
        let n = 6;
        let l = DMatrix::from_fn(n, n, |i, j| if i == j { (n - 1) as f64 } else { -1.0 });
        let top = top_eigenpairs(&l, 4, 3).unwrap();
        assert_eq!(top.len(), 4);
        for v in top.values.iter() {
            assert!((v - 6.0).abs() < 1e-9);
        }
        assert!(gram_defect(&top.vectors) < 1e-10);
    }
}
