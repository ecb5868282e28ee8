//! Decoherence, diffusion and geometric-phase numerics for a dephasing qubit
//! coupled to structured environments.
//!
//! All quantities are expressed in units of the qubit frequency Ω: times are
//! `Ωt`, frequencies `ω/Ω`. The crate is organised bottom-up:
//!
//! * [`numerics`]: Gamma function, semi-infinite quadrature, numerical
//!   differentiation and sign-change bracketing.
//! * [`envmodels`]: spectral densities, thermal and non-equilibrium baths,
//!   decoherence factors `F(t)`, diffusion coefficients `D(t)` and the
//!   negative-diffusion Markovianity diagnostic.
//! * [`qubit`]: the reduced density matrix and its closed-form eigensystem.
//! * [`gp`]: the mixed-state kinematic geometric phase over one period and
//!   its first-order corrections.
//! * [`sweep`]: rectangular parameter grids (figure datasets) and their
//!   CSV/JSON serialization.

pub mod envmodels;
pub mod error;
pub mod gp;
pub mod numerics;
pub mod qubit;
pub mod sweep;

pub use envmodels::{
    EnvKind, Environment, MarkovReport, NonEqEnv, NonEqMode, SpectralDensity, ThermalEnv,
};
pub use error::{Error, Result};
pub use gp::{GpResult, GpRun};
pub use numerics::{QuadratureSpec, SignChangeReport};
pub use qubit::{BlochInitial, EigenPair, ReducedDensity};
pub use sweep::{Axis, SweepTable};

/// Crate version, recorded in sweep provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
