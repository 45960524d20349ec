//! Spectral covariance kernels on nodes, edges and triangles.
//!
//! Every kernel here is a sum of blocks `Φ diag(w(λ)) Φᵀ`, where `Φ` is a
//! fixed basis (eigenvectors, or eigenvectors pushed through an incidence
//! matrix) and `w` is a spectral weight driven by hyperparameters. Keeping
//! that factored form around makes sub-matrices, samples and
//! hyperparameter derivatives cheap.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::spectral::{
    eigendecompose, laplacian_eigen, scale_columns, symmetric_eigen, symmetrize, Eigenbasis,
    HodgeBlock, HodgeSpectrum,
};

/// Default Matérn smoothness when ν is held fixed.
pub const DEFAULT_NU: f64 = 1.5;

/// Spectral weight family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `σ² (2ν/κ² + λ)^(-ν)`
    Matern,
    /// `σ² exp(-κ² λ / 2)`
    Diffusion,
}

/// A spectral weight function `Ψ(λ)` with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFn {
    pub family: Family,
    pub variance: f64,
    pub lengthscale: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Whether ν is a trainable hyperparameter (Matérn only).
    #[serde(default = "default_true")]
    pub learn_nu: bool,
}

fn default_nu() -> f64 {
    DEFAULT_NU
}

fn default_true() -> bool {
    true
}

impl SpectrumFn {
    pub fn matern(variance: f64, lengthscale: f64, nu: f64) -> Self {
        Self {
            family: Family::Matern,
            variance,
            lengthscale,
            nu,
            learn_nu: true,
        }
    }

    pub fn diffusion(variance: f64, lengthscale: f64) -> Self {
        Self {
            family: Family::Diffusion,
            variance,
            lengthscale,
            nu: DEFAULT_NU,
            learn_nu: false,
        }
    }

    /// Same family with ν held fixed.
    pub fn with_fixed_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self.learn_nu = false;
        self
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        match self.family {
            Family::Matern => {
                let a = 2.0 * self.nu / (self.lengthscale * self.lengthscale) + lambda;
                self.variance * a.powf(-self.nu)
            }
            Family::Diffusion => {
                self.variance * (-0.5 * self.lengthscale * self.lengthscale * lambda).exp()
            }
        }
    }

    pub fn eval_all(&self, lambdas: &DVector<f64>) -> DVector<f64> {
        lambdas.map(|l| self.eval(l))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.variance.is_finite()
            && self.variance >= 0.0
            && self.lengthscale.is_finite()
            && match self.family {
                Family::Matern => self.lengthscale > 0.0 && self.nu.is_finite() && self.nu > 0.0,
                Family::Diffusion => self.lengthscale >= 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "invalid spectrum function parameters: {self:?}"
            )))
        }
    }

    fn learns_nu(&self) -> bool {
        self.family == Family::Matern && self.learn_nu
    }

    fn param_names(&self) -> Vec<&'static str> {
        let mut names = vec!["variance", "lengthscale"];
        if self.learns_nu() {
            names.push("nu");
        }
        names
    }

    fn params(&self) -> Vec<f64> {
        let mut p = vec![self.variance, self.lengthscale];
        if self.learns_nu() {
            p.push(self.nu);
        }
        p
    }

    fn set_params(&mut self, p: &[f64]) {
        self.variance = p[0];
        self.lengthscale = p[1];
        if self.learns_nu() {
            self.nu = p[2];
        }
    }

    /// `∂Ψ/∂p` for each trainable parameter, in [`Self::params`] order.
    fn param_derivatives(&self, lambda: f64) -> Vec<f64> {
        let (s2, k, nu) = (self.variance, self.lengthscale, self.nu);
        match self.family {
            Family::Matern => {
                let a = 2.0 * nu / (k * k) + lambda;
                let base = a.powf(-nu);
                let mut d = vec![base, s2 * nu * a.powf(-nu - 1.0) * 4.0 * nu / (k * k * k)];
                if self.learns_nu() {
                    d.push(s2 * base * (-a.ln() - nu * 2.0 / (k * k * a)));
                }
                d
            }
            Family::Diffusion => {
                let e = (-0.5 * k * k * lambda).exp();
                vec![e, -s2 * e * k * lambda]
            }
        }
    }
}

/// Declarative description of a kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Graph kernel on nodes, a function of `L0`.
    Node { psi: SpectrumFn },
    /// One spectral function of `L1` shared by all Hodge subspaces.
    NonHcEdge { psi: SpectrumFn },
    /// Independent harmonic, gradient and curl kernels summed.
    HcEdge {
        harmonic_variance: f64,
        gradient: SpectrumFn,
        curl: SpectrumFn,
    },
    /// A single Hodge subspace. The harmonic block uses only `psi.variance`.
    SubspaceEdge { block: HodgeBlock, psi: SpectrumFn },
    /// Gradient of a node GP, `B1ᵀ K0 B1`.
    GradOfNode { psi: SpectrumFn },
    /// `K_H + B1ᵀ K0 B1 + B2 K2 B2ᵀ` with node and triangle kernels.
    ComposedHc {
        harmonic_variance: f64,
        node: SpectrumFn,
        triangle: SpectrumFn,
    },
    /// Pseudo-inverse of `L1ᵀ L1`.
    HodgeLaplacianPinv,
    /// Node kernel on the line graph of the complex.
    LineGraphNode { psi: SpectrumFn },
}

impl KernelSpec {
    pub fn hc_matern(
        harmonic_variance: f64,
        gradient: (f64, f64, f64),
        curl: (f64, f64, f64),
    ) -> Self {
        KernelSpec::HcEdge {
            harmonic_variance,
            gradient: SpectrumFn::matern(gradient.0, gradient.1, gradient.2),
            curl: SpectrumFn::matern(curl.0, curl.1, curl.2),
        }
    }

    /// Whether the kernel lives on edges (as opposed to nodes).
    pub fn is_edge_kernel(&self) -> bool {
        !matches!(self, KernelSpec::Node { .. })
    }

    fn spectrum_fns(&self) -> Vec<(&'static str, &SpectrumFn)> {
        match self {
            KernelSpec::Node { psi }
            | KernelSpec::NonHcEdge { psi }
            | KernelSpec::SubspaceEdge { psi, .. }
            | KernelSpec::GradOfNode { psi }
            | KernelSpec::LineGraphNode { psi } => vec![("psi", psi)],
            KernelSpec::HcEdge { gradient, curl, .. } => {
                vec![("gradient", gradient), ("curl", curl)]
            }
            KernelSpec::ComposedHc { node, triangle, .. } => {
                vec![("node", node), ("triangle", triangle)]
            }
            KernelSpec::HodgeLaplacianPinv => vec![],
        }
    }

    fn spectrum_fns_mut(&mut self) -> Vec<&mut SpectrumFn> {
        match self {
            KernelSpec::Node { psi }
            | KernelSpec::NonHcEdge { psi }
            | KernelSpec::SubspaceEdge { psi, .. }
            | KernelSpec::GradOfNode { psi }
            | KernelSpec::LineGraphNode { psi } => vec![psi],
            KernelSpec::HcEdge { gradient, curl, .. } => vec![gradient, curl],
            KernelSpec::ComposedHc { node, triangle, .. } => vec![node, triangle],
            KernelSpec::HodgeLaplacianPinv => vec![],
        }
    }

    fn harmonic_variance(&self) -> Option<f64> {
        match self {
            KernelSpec::HcEdge {
                harmonic_variance, ..
            }
            | KernelSpec::ComposedHc {
                harmonic_variance, ..
            } => Some(*harmonic_variance),
            _ => None,
        }
    }

    fn subspace_uses_variance_only(&self) -> bool {
        matches!(
            self,
            KernelSpec::SubspaceEdge {
                block: HodgeBlock::Harmonic,
                ..
            }
        )
    }

    /// Names of the trainable hyperparameters, e.g. `gradient.nu`.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.harmonic_variance().is_some() {
            names.push("harmonic.variance".to_string());
        }
        if self.subspace_uses_variance_only() {
            names.push("psi.variance".to_string());
            return names;
        }
        for (prefix, f) in self.spectrum_fns() {
            names.extend(f.param_names().into_iter().map(|n| format!("{prefix}.{n}")));
        }
        names
    }

    /// Current values of the trainable hyperparameters.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::new();
        if let Some(v) = self.harmonic_variance() {
            p.push(v);
        }
        if self.subspace_uses_variance_only() {
            p.push(self.spectrum_fns()[0].1.variance);
            return p;
        }
        for (_, f) in self.spectrum_fns() {
            p.extend(f.params());
        }
        p
    }

    pub fn num_params(&self) -> usize {
        self.params().len()
    }

    /// Copy with hyperparameters replaced, in [`Self::params`] order.
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        if params.len() != self.num_params() {
            return Err(Error::Usage(format!(
                "kernel expects {} hyperparameters, got {}",
                self.num_params(),
                params.len()
            )));
        }
        let mut out = self.clone();
        let mut rest = params;
        match &mut out {
            KernelSpec::HcEdge {
                harmonic_variance, ..
            }
            | KernelSpec::ComposedHc {
                harmonic_variance, ..
            } => {
                *harmonic_variance = rest[0];
                rest = &rest[1..];
            }
            _ => {}
        }
        if out.subspace_uses_variance_only() {
            out.spectrum_fns_mut()[0].variance = rest[0];
            return Ok(out);
        }
        for f in out.spectrum_fns_mut() {
            let n = f.params().len();
            f.set_params(&rest[..n]);
            rest = &rest[n..];
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.harmonic_variance() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Usage(format!(
                    "harmonic variance must be >= 0, got {v}"
                )));
            }
        }
        for (_, f) in self.spectrum_fns() {
            f.validate()?;
        }
        Ok(())
    }

    /// Factored form of this kernel over the bases held by `ctx`.
    pub fn assemble(&self, ctx: &KernelContext) -> Result<SpectralKernel> {
        self.validate()?;
        let spectrum = ctx.spectrum();
        let mut blocks = Vec::new();
        let mut offset = 0;
        let mut push = |blocks: &mut Vec<KernelBlock>, basis: DMatrix<f64>, lambdas, weight| {
            let n = match &weight {
                BlockWeight::Spectral(psi) => psi.params().len(),
                BlockWeight::Scale(_) => 1,
                BlockWeight::Fixed(_) => 0,
            };
            blocks.push(KernelBlock {
                label: String::new(),
                basis,
                lambdas,
                weight,
                param_offset: offset,
            });
            offset += n;
        };
        let spectral = |psi: &SpectrumFn| BlockWeight::Spectral(psi.clone());
        match self {
            KernelSpec::Node { psi } => {
                let eb = ctx.node_eigen()?;
                push(
                    &mut blocks,
                    eb.vectors.clone(),
                    eb.values.clone(),
                    spectral(psi),
                );
                label_last(&mut blocks, "node");
            }
            KernelSpec::LineGraphNode { psi } => {
                let eb = ctx.line_graph_eigen()?;
                push(
                    &mut blocks,
                    eb.vectors.clone(),
                    eb.values.clone(),
                    spectral(psi),
                );
                label_last(&mut blocks, "line_graph");
            }
            KernelSpec::NonHcEdge { psi } => {
                let (values, vectors, _) = spectrum.concatenated();
                push(&mut blocks, vectors, values, spectral(psi));
                label_last(&mut blocks, "edge");
            }
            KernelSpec::HcEdge {
                harmonic_variance,
                gradient,
                curl,
            } => {
                let h = &spectrum.harmonic;
                push(
                    &mut blocks,
                    h.vectors.clone(),
                    h.values.clone(),
                    BlockWeight::Scale(*harmonic_variance),
                );
                label_last(&mut blocks, "H");
                let g = &spectrum.gradient;
                push(
                    &mut blocks,
                    g.vectors.clone(),
                    g.values.clone(),
                    spectral(gradient),
                );
                label_last(&mut blocks, "G");
                let c = &spectrum.curl;
                push(
                    &mut blocks,
                    c.vectors.clone(),
                    c.values.clone(),
                    spectral(curl),
                );
                label_last(&mut blocks, "C");
            }
            KernelSpec::SubspaceEdge { block, psi } => {
                let eb = spectrum.block(*block);
                let weight = match block {
                    HodgeBlock::Harmonic => BlockWeight::Scale(psi.variance),
                    _ => spectral(psi),
                };
                push(&mut blocks, eb.vectors.clone(), eb.values.clone(), weight);
                label_last(&mut blocks, block.short());
            }
            KernelSpec::GradOfNode { psi } => {
                let eb = ctx.node_eigen()?;
                let basis = ctx.complex().b1().transpose() * &eb.vectors;
                push(&mut blocks, basis, eb.values.clone(), spectral(psi));
                label_last(&mut blocks, "G");
            }
            KernelSpec::ComposedHc {
                harmonic_variance,
                node,
                triangle,
            } => {
                let h = &spectrum.harmonic;
                push(
                    &mut blocks,
                    h.vectors.clone(),
                    h.values.clone(),
                    BlockWeight::Scale(*harmonic_variance),
                );
                label_last(&mut blocks, "H");
                let node_eb = ctx.node_eigen()?;
                let basis = ctx.complex().b1().transpose() * &node_eb.vectors;
                push(&mut blocks, basis, node_eb.values.clone(), spectral(node));
                label_last(&mut blocks, "G");
                let tri_eb = ctx.triangle_eigen()?;
                let basis = ctx.complex().b2() * &tri_eb.vectors;
                push(
                    &mut blocks,
                    basis,
                    tri_eb.values.clone(),
                    spectral(triangle),
                );
                label_last(&mut blocks, "C");
            }
            KernelSpec::HodgeLaplacianPinv => {
                if spectrum.is_truncated() {
                    return Err(Error::Usage(
                        "the Hodge Laplacian pseudo-inverse kernel needs a full spectrum".into(),
                    ));
                }
                for b in [HodgeBlock::Gradient, HodgeBlock::Curl] {
                    let eb = spectrum.block(b);
                    let w = eb.values.map(|l| 1.0 / (l * l));
                    push(
                        &mut blocks,
                        eb.vectors.clone(),
                        eb.values.clone(),
                        BlockWeight::Fixed(w),
                    );
                    label_last(&mut blocks, b.short());
                }
            }
        }
        Ok(SpectralKernel {
            blocks,
            num_params: offset,
            rows: ctx.rows_for(self),
        })
    }

    /// Dense kernel matrix, checked for symmetry and positive semi-definiteness.
    pub fn build(&self, ctx: &KernelContext) -> Result<KernelMatrix> {
        let matrix = self.assemble(ctx)?.matrix();
        KernelMatrix::checked(matrix, self.clone(), ctx.spectrum().truncated)
    }

    /// Spectral weights `(λ, Ψ(λ), block)` as plotted against the spectrum.
    pub fn spectral_density(&self, ctx: &KernelContext) -> Result<Vec<SpectralPoint>> {
        let spectrum = ctx.spectrum();
        let mut out = Vec::new();
        let mut emit = |block: &str, lambdas: &DVector<f64>, f: &dyn Fn(f64) -> f64| {
            for &l in lambdas.iter() {
                out.push(SpectralPoint {
                    lambda: l,
                    psi: f(l),
                    block: block.to_string(),
                });
            }
        };
        match self {
            KernelSpec::Node { psi } => emit("node", &ctx.node_eigen()?.values, &|l| psi.eval(l)),
            KernelSpec::LineGraphNode { psi } => {
                emit("line_graph", &ctx.line_graph_eigen()?.values, &|l| {
                    psi.eval(l)
                })
            }
            KernelSpec::NonHcEdge { psi } => {
                for b in HodgeBlock::ALL {
                    emit(b.short(), &spectrum.block(b).values, &|l| psi.eval(l));
                }
            }
            KernelSpec::HcEdge {
                harmonic_variance,
                gradient,
                curl,
            } => {
                emit("H", &spectrum.harmonic.values, &|_| *harmonic_variance);
                emit("G", &spectrum.gradient.values, &|l| gradient.eval(l));
                emit("C", &spectrum.curl.values, &|l| curl.eval(l));
            }
            KernelSpec::SubspaceEdge { block, psi } => {
                let f = |l: f64| match block {
                    HodgeBlock::Harmonic => psi.variance,
                    _ => psi.eval(l),
                };
                emit(block.short(), &spectrum.block(*block).values, &f);
            }
            KernelSpec::GradOfNode { psi } => {
                emit("G", &spectrum.gradient.values, &|l| l * psi.eval(l))
            }
            KernelSpec::ComposedHc {
                harmonic_variance,
                node,
                triangle,
            } => {
                emit("H", &spectrum.harmonic.values, &|_| *harmonic_variance);
                emit("G", &spectrum.gradient.values, &|l| l * node.eval(l));
                emit("C", &spectrum.curl.values, &|l| l * triangle.eval(l));
            }
            KernelSpec::HodgeLaplacianPinv => {
                emit("H", &spectrum.harmonic.values, &|_| 0.0);
                emit("G", &spectrum.gradient.values, &|l| 1.0 / (l * l));
                emit("C", &spectrum.curl.values, &|l| 1.0 / (l * l));
            }
        }
        Ok(out)
    }
}

fn label_last(blocks: &mut [KernelBlock], label: &str) {
    if let Some(b) = blocks.last_mut() {
        b.label = label.to_string();
    }
}

/// One row of a spectral-kernel dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub psi: f64,
    pub block: String,
}

/// Complex plus the eigenbases kernels are built from. Node, triangle and
/// line-graph eigenbases are computed on first use.
#[derive(Debug)]
pub struct KernelContext {
    complex: SimplicialComplex2,
    spectrum: HodgeSpectrum,
    node: OnceLock<Eigenbasis>,
    triangle: OnceLock<Eigenbasis>,
    line_graph: OnceLock<Eigenbasis>,
}

impl KernelContext {
    pub fn new(complex: SimplicialComplex2, truncation: Option<usize>) -> Result<Self> {
        let spectrum = eigendecompose(&complex, truncation)?;
        Ok(Self::from_parts(complex, spectrum))
    }

    pub fn from_parts(complex: SimplicialComplex2, spectrum: HodgeSpectrum) -> Self {
        Self {
            complex,
            spectrum,
            node: OnceLock::new(),
            triangle: OnceLock::new(),
            line_graph: OnceLock::new(),
        }
    }

    pub fn complex(&self) -> &SimplicialComplex2 {
        &self.complex
    }

    pub fn spectrum(&self) -> &HodgeSpectrum {
        &self.spectrum
    }

    fn cached(
        cell: &OnceLock<Eigenbasis>,
        make: impl FnOnce() -> Result<Eigenbasis>,
    ) -> Result<&Eigenbasis> {
        if let Some(v) = cell.get() {
            return Ok(v);
        }
        let v = make()?;
        Ok(cell.get_or_init(|| v))
    }

    /// Eigenbasis of `L0`.
    pub fn node_eigen(&self) -> Result<&Eigenbasis> {
        Self::cached(&self.node, || {
            laplacian_eigen(&self.complex.laplacians().l0)
        })
    }

    /// Eigenbasis of `L2`.
    pub fn triangle_eigen(&self) -> Result<&Eigenbasis> {
        Self::cached(&self.triangle, || {
            laplacian_eigen(&self.complex.laplacians().l2)
        })
    }

    /// Eigenbasis of the line-graph Laplacian.
    pub fn line_graph_eigen(&self) -> Result<&Eigenbasis> {
        Self::cached(&self.line_graph, || {
            laplacian_eigen(&self.complex.line_graph_laplacian())
        })
    }

    fn rows_for(&self, spec: &KernelSpec) -> usize {
        if spec.is_edge_kernel() {
            self.complex.num_edges()
        } else {
            self.complex.num_nodes()
        }
    }
}

#[derive(Clone, Debug)]
enum BlockWeight {
    /// `Ψ(λ)`.
    Spectral(SpectrumFn),
    /// Constant weight, itself a trainable variance.
    Scale(f64),
    /// Weights with no hyperparameters.
    Fixed(DVector<f64>),
}

#[derive(Clone, Debug)]
struct KernelBlock {
    label: String,
    basis: DMatrix<f64>,
    lambdas: DVector<f64>,
    weight: BlockWeight,
    param_offset: usize,
}

impl KernelBlock {
    fn weights(&self) -> DVector<f64> {
        match &self.weight {
            BlockWeight::Spectral(psi) => psi.eval_all(&self.lambdas),
            BlockWeight::Scale(s) => DVector::from_element(self.lambdas.len(), *s),
            BlockWeight::Fixed(w) => w.clone(),
        }
    }

    /// `∂w/∂p` per trainable parameter of this block.
    fn weight_derivatives(&self) -> Vec<DVector<f64>> {
        match &self.weight {
            BlockWeight::Spectral(psi) => {
                let np = psi.params().len();
                let mut out = vec![DVector::zeros(self.lambdas.len()); np];
                for (k, &l) in self.lambdas.iter().enumerate() {
                    for (p, d) in psi.param_derivatives(l).into_iter().enumerate() {
                        out[p][k] = d;
                    }
                }
                out
            }
            BlockWeight::Scale(_) => vec![DVector::from_element(self.lambdas.len(), 1.0)],
            BlockWeight::Fixed(_) => vec![],
        }
    }
}

/// A kernel in factored form `Σ_b Φ_b diag(w_b) Φ_bᵀ`.
#[derive(Clone, Debug)]
pub struct SpectralKernel {
    blocks: Vec<KernelBlock>,
    num_params: usize,
    rows: usize,
}

impl SpectralKernel {
    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    /// Replaces the hyperparameters, in [`KernelSpec::params`] order.
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::Usage(format!(
                "kernel expects {} hyperparameters, got {}",
                self.num_params,
                params.len()
            )));
        }
        for b in &mut self.blocks {
            let at = b.param_offset;
            match &mut b.weight {
                BlockWeight::Spectral(psi) => {
                    let n = psi.params().len();
                    psi.set_params(&params[at..at + n]);
                }
                BlockWeight::Scale(s) => *s = params[at],
                BlockWeight::Fixed(_) => {}
            }
        }
        Ok(())
    }

    /// Labels of the additive blocks, e.g. `["H", "G", "C"]`.
    pub fn block_labels(&self) -> Vec<&str> {
        self.blocks.iter().map(|b| b.label.as_str()).collect()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.rows);
        for b in &self.blocks {
            out += scale_columns(&b.basis, &b.weights()) * b.basis.transpose();
        }
        symmetrize(out)
    }

    /// Dense matrix of the additive block with the given label.
    pub fn block_matrix(&self, label: &str) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.rows);
        for b in self.blocks.iter().filter(|b| b.label == label) {
            out += scale_columns(&b.basis, &b.weights()) * b.basis.transpose();
        }
        symmetrize(out)
    }

    /// `K[rows, cols]` without forming the full matrix.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        self.blocks_submatrix(rows, cols, |_| true)
    }

    /// `K_label[rows, cols]` for one additive block.
    pub fn block_submatrix(&self, label: &str, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        self.blocks_submatrix(rows, cols, |b| b.label == label)
    }

    fn blocks_submatrix(
        &self,
        rows: &[usize],
        cols: &[usize],
        keep: impl Fn(&KernelBlock) -> bool,
    ) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        for b in self.blocks.iter().filter(|b| keep(b)) {
            let left = scale_columns(&b.basis.select_rows(rows), &b.weights());
            out += left * b.basis.select_rows(cols).transpose();
        }
        out
    }

    /// Prior variance of every row: `diag(K)`.
    pub fn diagonal(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.rows);
        for b in &self.blocks {
            let w = b.weights();
            for r in 0..self.rows {
                out[r] += b
                    .basis
                    .row(r)
                    .iter()
                    .zip(w.iter())
                    .map(|(x, w)| x * x * w)
                    .sum::<f64>();
            }
        }
        out
    }

    /// `tr(W ∂K[rows,rows]/∂p)` for every trainable parameter `p`.
    pub fn trace_derivatives(&self, rows: &[usize], w: &DMatrix<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.num_params];
        for b in &self.blocks {
            let derivs = b.weight_derivatives();
            if derivs.is_empty() {
                continue;
            }
            let phi = b.basis.select_rows(rows);
            let wphi = w * &phi;
            // q_k = φ_kᵀ W φ_k
            let q = DVector::from_iterator(
                phi.ncols(),
                phi.column_iter()
                    .zip(wphi.column_iter())
                    .map(|(a, b)| a.dot(&b)),
            );
            for (p, d) in derivs.iter().enumerate() {
                out[b.param_offset + p] += d.dot(&q);
            }
        }
        out
    }

    /// Draws `f = Σ_b Φ_b diag(√w_b) v_b` for standard normal `v`, one
    /// sample per column of the returned matrix.
    pub fn sample_with(&self, count: usize, mut normal: impl FnMut() -> f64) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, count);
        for b in &self.blocks {
            let sqrt_w = b.weights().map(|w| w.max(0.0).sqrt());
            let v = DMatrix::from_fn(b.basis.ncols(), count, |_, _| normal());
            let mut scaled = v;
            for (mut row, s) in scaled.row_iter_mut().zip(sqrt_w.iter()) {
                row *= *s;
            }
            out += &b.basis * scaled;
        }
        out
    }
}

/// A dense covariance matrix with its provenance.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub matrix: DMatrix<f64>,
    pub spec: KernelSpec,
    pub truncated: Option<usize>,
}

impl KernelMatrix {
    /// Symmetrizes and verifies `min λ ≥ -1e-8 · max λ`.
    pub fn checked(
        matrix: DMatrix<f64>,
        spec: KernelSpec,
        truncated: Option<usize>,
    ) -> Result<Self> {
        let scale = matrix.abs().max();
        let asym = (&matrix - matrix.transpose()).abs().max();
        if asym > 1e-12 * scale.max(1.0) {
            return Err(Error::Numerical(format!(
                "kernel matrix asymmetric by {asym:.3e}"
            )));
        }
        let matrix = symmetrize(matrix);
        let eig = symmetric_eigen(&matrix)?;
        let (min, max) = eig
            .values
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        if matrix.nrows() > 0 && min < -1e-8 * max.max(f64::MIN_POSITIVE) {
            return Err(Error::Numerical(format!(
                "kernel matrix is not positive semi-definite: min eigenvalue {min:.3e}, max {max:.3e}"
            )));
        }
        Ok(Self {
            matrix,
            spec,
            truncated,
        })
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }
}

/// `U0 Ψ(Λ0) U0ᵀ` for a node eigenbasis.
pub fn node_kernel(node_eigen: &Eigenbasis, psi: &SpectrumFn) -> Result<KernelMatrix> {
    psi.validate()?;
    KernelMatrix::checked(
        symmetrize(node_eigen.weighted_outer(&psi.eval_all(&node_eigen.values))),
        KernelSpec::Node { psi: psi.clone() },
        None,
    )
}

/// `U1 Ψ(Λ1) U1ᵀ` with one spectral function for all subspaces.
pub fn non_hc_edge_kernel(spectrum: &HodgeSpectrum, psi: &SpectrumFn) -> Result<KernelMatrix> {
    psi.validate()?;
    let (values, vectors, _) = spectrum.concatenated();
    let eb = Eigenbasis { values, vectors };
    KernelMatrix::checked(
        symmetrize(eb.weighted_outer(&psi.eval_all(&eb.values))),
        KernelSpec::NonHcEdge { psi: psi.clone() },
        spectrum.truncated,
    )
}

/// Kernel supported on one Hodge subspace. The harmonic block is
/// `σ² U_H U_Hᵀ`.
pub fn subspace_kernel(
    spectrum: &HodgeSpectrum,
    block: HodgeBlock,
    psi: &SpectrumFn,
) -> Result<KernelMatrix> {
    psi.validate()?;
    let eb = spectrum.block(block);
    let weights = match block {
        HodgeBlock::Harmonic => DVector::from_element(eb.len(), psi.variance),
        _ => psi.eval_all(&eb.values),
    };
    KernelMatrix::checked(
        symmetrize(eb.weighted_outer(&weights)),
        KernelSpec::SubspaceEdge {
            block,
            psi: psi.clone(),
        },
        spectrum.truncated,
    )
}

/// `K_H + K_G + K_C` with independent hyperparameters.
pub fn hc_kernel(
    spectrum: &HodgeSpectrum,
    harmonic_variance: f64,
    gradient: &SpectrumFn,
    curl: &SpectrumFn,
) -> Result<KernelMatrix> {
    let h = subspace_kernel(
        spectrum,
        HodgeBlock::Harmonic,
        &SpectrumFn::diffusion(harmonic_variance, 0.0),
    )?;
    let g = subspace_kernel(spectrum, HodgeBlock::Gradient, gradient)?;
    let c = subspace_kernel(spectrum, HodgeBlock::Curl, curl)?;
    KernelMatrix::checked(
        h.matrix + g.matrix + c.matrix,
        KernelSpec::HcEdge {
            harmonic_variance,
            gradient: gradient.clone(),
            curl: curl.clone(),
        },
        spectrum.truncated,
    )
}

/// Covariance of the gradient of a node GP, `B1ᵀ K0 B1`.
pub fn grad_of_node_kernel(
    sc: &SimplicialComplex2,
    node_eigen: &Eigenbasis,
    psi: &SpectrumFn,
) -> Result<KernelMatrix> {
    let k0 = node_kernel(node_eigen, psi)?;
    let b1 = sc.b1();
    KernelMatrix::checked(
        symmetrize(b1.transpose() * k0.matrix * &b1),
        KernelSpec::GradOfNode { psi: psi.clone() },
        None,
    )
}

/// The same gradient kernel built on the edge spectrum as
/// `U_G diag(λ Ψ0(λ)) U_Gᵀ`.
pub fn grad_of_node_kernel_spectral(
    spectrum: &HodgeSpectrum,
    psi: &SpectrumFn,
) -> Result<KernelMatrix> {
    psi.validate()?;
    let g = &spectrum.gradient;
    let w = g.values.map(|l| l * psi.eval(l));
    KernelMatrix::checked(
        symmetrize(g.weighted_outer(&w)),
        KernelSpec::GradOfNode { psi: psi.clone() },
        spectrum.truncated,
    )
}

/// `K_H + B1ᵀ K0 B1 + B2 K2 B2ᵀ` from node and triangle GPs.
pub fn composed_hc_kernel(
    ctx: &KernelContext,
    node: &SpectrumFn,
    triangle: &SpectrumFn,
    harmonic_variance: f64,
) -> Result<KernelMatrix> {
    KernelSpec::ComposedHc {
        harmonic_variance,
        node: node.clone(),
        triangle: triangle.clone(),
    }
    .build(ctx)
}

/// `(L1ᵀ L1)†`: weight `λ⁻²` on non-harmonic modes, zero on harmonic ones.
pub fn hodge_laplacian_pinv_kernel(spectrum: &HodgeSpectrum) -> Result<KernelMatrix> {
    if spectrum.is_truncated() {
        return Err(Error::Usage(
            "the Hodge Laplacian pseudo-inverse kernel needs a full spectrum".into(),
        ));
    }
    let mut m = DMatrix::zeros(spectrum.num_edges(), spectrum.num_edges());
    for b in [HodgeBlock::Gradient, HodgeBlock::Curl] {
        let eb = spectrum.block(b);
        m += eb.weighted_outer(&eb.values.map(|l| 1.0 / (l * l)));
    }
    KernelMatrix::checked(symmetrize(m), KernelSpec::HodgeLaplacianPinv, None)
}

/// Node kernel on the line-graph eigenbasis.
pub fn line_graph_kernel(line_graph_eigen: &Eigenbasis, psi: &SpectrumFn) -> Result<KernelMatrix> {
    let mut k = node_kernel(line_graph_eigen, psi)?;
    k.spec = KernelSpec::LineGraphNode { psi: psi.clone() };
    Ok(k)
}
