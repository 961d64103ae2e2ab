//! Spectral toolkit for fractional Bourgain-Brezis inequalities.
//!
//! Fields on the torus `T^n` are stored as band-limited Fourier coefficient
//! tables with values in the complex Clifford algebra on `n` generators
//! (complex scalars on the circle). On top of that the crate provides the
//! Fourier multipliers and Dirac operators, the explicit kernels inverting
//! `D²`, Sobolev and sum-space norms, power series on the disk, the
//! decomposition solver, and the randomized verification harness.

pub mod clifford;
pub mod decomposition;
pub mod disk;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod norms;
pub mod operators;
pub mod spectral;

pub use num_complex::Complex64;

pub use clifford::{Blade, CliffordElement, MAX_GENERATORS};
pub use decomposition::{smooth_complement, solve_decomposition, DecompositionResult, SmoothComplement};
pub use disk::{analytic_projection, PowerSeries};
pub use error::{Error, Result};
pub use experiments::{verify_bb, verify_bergman, BergmanConfig, ExperimentConfig, InequalityReport};
pub use kernels::{sup_norm_scan, KernelSpec};
pub use norms::{
    l1_norm, l2_norm, sobolev_norm, sum_space_norm, sum_space_norm_with, SobolevWeight, SumSpaceOptions,
    SumSpaceSplit, Tolerance,
};
pub use operators::MultiplierOp;
pub use spectral::{
    convolve, forward_transform, inverse_transform, project_zero_mean, FrequencyIndex, GridField,
    SpectralField,
};
