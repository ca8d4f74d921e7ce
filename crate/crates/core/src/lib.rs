//! Algebra of linear quantum feedback networks with squeezing components.
//!
//! Everything here is built on the doubled-up representation
//! `Δ(E−, E+) = [[E−, E+], [E+#, E−#]]`, which acts on stacked
//! (annihilator, creator) vectors. The crate provides:
//!
//! * [`doubled`]: doubled-up matrices, the `♭` involution and products.
//! * [`symplectic`]: Bogoliubov (symplectic) matrices and the Shale
//!   decomposition into passive unitaries and diagonal squeezing.
//! * [`generator`]: the Lie algebra `sp(C^m)`, exponentials, logarithms and
//!   the `ζ` classification of one-mode generators.
//! * [`gaussian`]: Gaussian covariance data `(N, M)` and its vacuum dilation.
//! * [`component`]: `(S̃, C̃, Ω̃)` components, the series product and inverses.
//! * [`state_space`]: realizations `(Ã, B̃, C̃, D̃)` and Hurwitz stability.
//! * [`transfer`]: transfer functions, sweeps, quadratures and inverses.
//! * [`network`]: partitions, the Möbius map, zero-delay and finite-delay
//!   feedback reduction and compilation of wired networks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::many_single_char_names)]

extern crate alloc;

pub mod component;
pub mod doubled;
pub mod error;
pub mod gaussian;
pub mod generator;
pub mod linalg;
pub mod network;
pub mod state_space;
pub mod symplectic;
pub mod transfer;

pub use component::{ComponentKind, LinearComponent};
pub use doubled::DoubledMatrix;
pub use error::{Error, Result};
pub use gaussian::{ArakiWoodsFactors, GaussianState, ItoTable, StateKind};
pub use generator::{GeneratorAnalysis, LogResult, SpGenerator};
pub use linalg::CMatrix;
pub use network::{
    CompiledNetwork, DelayVector, Edge, NetworkGraph, PartitionedComponent, PortRef,
};
pub use state_space::{ClosedFormStability, StabilityReport, StateSpace};
pub use symplectic::{ShaleFactors, SymplecticMatrix};
pub use transfer::{FreqValue, FrequencySweep, QuadratureResponse, TransferFunction};

pub use num_complex::Complex64;

/// Default construction tolerance (max-norm over entries).
pub const DEFAULT_TOL: f64 = 1e-9;
