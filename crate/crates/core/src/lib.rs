//! Gaussian processes on the edges of simplicial 2-complexes.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex`] builds oriented 2-complexes and the discrete gradient,
//!   divergence and curl operators.
//! * [`spectral`] splits the Hodge Laplacian spectrum into harmonic,
//!   gradient and curl subspaces and decomposes edge flows.
//! * [`kernels`] turns spectra and hyperparameters into covariance
//!   matrices, including the Hodge-compositional sum `K_H + K_G + K_C`.
//! * [`gp`] performs exact regression, marginal-likelihood fitting,
//!   sampling and evaluation.
//! * [`data`] generates synthetic complexes and flows and ingests files.
//! * [`io`] reads and writes the JSON and CSV formats.

pub mod complex;
pub mod data;
pub mod error;
pub mod gp;
pub mod io;
pub mod kernels;
pub mod spectral;

pub use complex::{Cochain, Degree, Laplacians, NodeId, SimplicialComplex2};
pub use error::{Error, Result};
pub use gp::{FitConfig, GpModel, PosteriorResult};
pub use kernels::{Family, KernelContext, KernelMatrix, KernelSpec, SpectrumFn};
pub use spectral::{eigendecompose, hodge_decompose, HodgeBlock, HodgeComponents, HodgeSpectrum};
