use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hodge_gp::kernels::{KernelSpec, SpectrumFn};
use serde::Serialize;

/// Gaussian processes on the edges of simplicial 2-complexes.
///
/// Log verbosity is read from `HODGE_GP_LOG` (e.g. `info`, `debug`).
#[derive(Debug, Parser)]
#[command(name = "hodge-gp", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic complex or dataset bundle.
    Generate(GenerateArgs),
    /// Split an edge flow into harmonic, gradient and curl parts.
    Decompose(DecomposeArgs),
    /// Hodge-Laplacian eigenvalues by block.
    Spectrum(SpectrumArgs),
    /// Fit a GP over several restarts and evaluate on held-out edges.
    FitPredict(FitPredictArgs),
    /// Draw prior samples of an edge kernel.
    Sample(SampleArgs),
    /// Evolve an edge flow under the Hodge heat equation.
    Diffuse(DiffuseArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    HcMatern,
    HcDiffusion,
    Matern,
    Diffusion,
    LineGraphMatern,
    LineGraphDiffusion,
    GradOfNode,
    ComposedHc,
    HodgePinv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChoice {
    Matern,
    Diffusion,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct KernelArgs {
    /// Kernel family.
    #[arg(long, value_enum, default_value = "hc-matern")]
    pub kernel: KernelChoice,
    /// Spectral family of the node and triangle kernels used by
    /// `grad-of-node` and `composed-hc`.
    #[arg(long, value_enum, default_value = "matern")]
    pub family: FamilyChoice,
    /// Hold the Matérn smoothness fixed at this value instead of learning it.
    #[arg(long)]
    pub nu: Option<f64>,
    /// Initial (or, for sampling, exact) variance of every spectral block.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    /// Initial lengthscale of every spectral block.
    #[arg(long, default_value_t = 1.0)]
    pub lengthscale: f64,
    /// Initial harmonic variance of the Hodge-compositional kernels.
    #[arg(long, default_value_t = 1.0)]
    pub harmonic_variance: f64,
    /// Keep only the `l` largest non-harmonic eigenpairs.
    #[arg(long, value_name = "l")]
    pub truncate: Option<usize>,
}

impl KernelArgs {
    fn psi(&self, family: FamilyChoice) -> SpectrumFn {
        match family {
            FamilyChoice::Matern => {
                let f = SpectrumFn::matern(
                    self.variance,
                    self.lengthscale,
                    hodge_gp::kernels::DEFAULT_NU,
                );
                match self.nu {
                    Some(nu) => f.with_fixed_nu(nu),
                    None => f,
                }
            }
            FamilyChoice::Diffusion => SpectrumFn::diffusion(self.variance, self.lengthscale),
        }
    }

    pub fn spec(&self) -> KernelSpec {
        use FamilyChoice::{Diffusion, Matern};
        let h = self.harmonic_variance;
        match self.kernel {
            KernelChoice::HcMatern => KernelSpec::HcEdge {
                harmonic_variance: h,
                gradient: self.psi(Matern),
                curl: self.psi(Matern),
            },
            KernelChoice::HcDiffusion => KernelSpec::HcEdge {
                harmonic_variance: h,
                gradient: self.psi(Diffusion),
                curl: self.psi(Diffusion),
            },
            KernelChoice::Matern => KernelSpec::NonHcEdge {
                psi: self.psi(Matern),
            },
            KernelChoice::Diffusion => KernelSpec::NonHcEdge {
                psi: self.psi(Diffusion),
            },
            KernelChoice::LineGraphMatern => KernelSpec::LineGraphNode {
                psi: self.psi(Matern),
            },
            KernelChoice::LineGraphDiffusion => KernelSpec::LineGraphNode {
                psi: self.psi(Diffusion),
            },
            KernelChoice::GradOfNode => KernelSpec::GradOfNode {
                psi: self.psi(self.family),
            },
            KernelChoice::ComposedHc => KernelSpec::ComposedHc {
                harmonic_variance: h,
                node: self.psi(self.family),
                triangle: self.psi(self.family),
            },
            KernelChoice::HodgePinv => KernelSpec::HodgeLaplacianPinv,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ComplexArgs {
    /// Complex JSON file (`nodes`, `edges`, optional `triangles`).
    #[arg(long)]
    pub complex: PathBuf,
    /// Close every 3-clique of the edge list as a triangle.
    #[arg(long)]
    pub infer_triangles: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    /// Edge flow CSV (`simplex,value`); absent edges are zero.
    #[arg(long)]
    pub flow: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    /// Keep only the `l` largest non-harmonic eigenpairs.
    #[arg(long, value_name = "l")]
    pub truncate: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct FitPredictArgs {
    /// Complex JSON file; requires `--flow`.
    #[arg(long, requires = "flow", conflicts_with = "bundle")]
    pub complex: Option<PathBuf>,
    /// Edge flow CSV (`simplex,value[,split]`).
    #[arg(long, requires = "complex")]
    pub flow: Option<PathBuf>,
    /// Dataset bundle directory written by `generate`.
    #[arg(long, required_unless_present = "complex")]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub infer_triangles: bool,
    /// Reject flow rows not written in the complex's edge orientation.
    #[arg(long)]
    pub strict_orientation: bool,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Fraction of observed edges used for training when the data carries
    /// no split of its own (or with `--resplit`).
    #[arg(long, default_value_t = 0.2)]
    pub train_ratio: f64,
    /// Draw a fresh split per restart even if the data has one.
    #[arg(long)]
    pub resplit: bool,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Start every restart from the flag values instead of `N(0, 1)` draws
    /// of the unconstrained hyperparameters.
    #[arg(long)]
    pub fixed_init: bool,
    /// Initial observation-noise variance.
    #[arg(long, default_value_t = 1.0)]
    pub init_noise: f64,
    /// Master seed; restart seeds are derived from it and the restart index.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report predictions and checkpoint of the restart with the lowest
    /// final training loss instead of the first successful one.
    #[arg(long)]
    pub best_of_restarts: bool,
    /// Also write posterior means of the three Hodge components.
    #[arg(long)]
    pub components: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Take the kernel from a `checkpoint.json` written by `fit-predict`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DiffuseArgs {
    #[command(flatten)]
    pub complex: ComplexArgs,
    /// Initial edge flow; a seeded standard-normal flow when absent.
    #[arg(long)]
    pub flow: Option<PathBuf>,
    /// Rate of the down (gradient) Laplacian.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Rate of the up (curl) Laplacian.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Explicit comma-separated time grid.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_max", "steps"])]
    pub times: Option<Vec<f64>>,
    /// Last time of a geometric grid; defaults to `1e3 / λ_min⁺`.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of nonzero times on the geometric grid.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenerateKind {
    /// Random complex only (`complex.json`).
    Complex,
    /// Random complex with a Hodge flow, as a dataset bundle.
    Flow,
    /// Arbitrage-free exchange market, as a dataset bundle.
    Forex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowChoice {
    Gradient,
    Curl,
    Harmonic,
    Mixed,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GenerateKind,
    /// Use this complex for `flow` instead of a random one.
    #[arg(long)]
    pub complex: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Fraction of 3-cliques closed as triangles.
    #[arg(long, default_value_t = 0.5)]
    pub fill: f64,
    #[arg(long, value_enum, default_value = "gradient")]
    pub flow: FlowChoice,
    /// Harmonic, gradient and curl weights of a mixed flow.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 1.0])]
    pub weights: Vec<f64>,
    /// Absolute observation-noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise standard deviation as a fraction of the flow's standard
    /// deviation (used when `--noise` is absent).
    #[arg(long, default_value_t = 0.01)]
    pub relative_noise: f64,
    #[arg(long, default_value_t = 25)]
    pub currencies: usize,
    #[arg(long, default_value_t = 1.0)]
    pub pair_prob: f64,
    /// Standard deviation of the log-valuations.
    #[arg(long, default_value_t = 1.0)]
    pub potential_scale: f64,
    #[arg(long, default_value_t = 0.2)]
    pub train_ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}
