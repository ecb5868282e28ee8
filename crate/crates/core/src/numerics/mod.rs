//! Numerical kernel shared by the environment and geometric-phase modules.
//!
//! Everything here is a pure function of its inputs.

mod diff;
mod gamma;
mod quadrature;
mod roots;

pub use diff::derivative;
pub use gamma::{gamma, sin_pi};
pub use quadrature::{
    integrate_interval, integrate_semi_infinite, integrate_semi_infinite_with, Quadrature,
    QuadratureSpec, SemiInfiniteOptions,
};
pub use roots::{find_sign_changes, SignChangeReport};
