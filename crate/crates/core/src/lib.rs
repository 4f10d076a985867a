//! Spectral Galerkin solver for the one-dimensional thin-film equation with
//! exact-curvature surface tension
//!
//! ```text
//! u_t = (m(u) p_x)_x,    p = -(u_x / sqrt(1 + u_x^2))_x - delta u_xx
//! ```
//!
//! on `(-l, l)` with Neumann conditions, together with the diagnostics that
//! check the energy, entropy, positivity and regularity estimates along
//! computed trajectories.

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod galerkin;
pub mod io;
pub mod model;
pub mod quad;
pub mod run;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, PressureMode};
pub use spectral::{Basis, CollocationField, DomainSpec, SpectralField};
