//! Spectral solver and verification workbench for the linear primitive
//! equations of the ocean on `T^2 x (0, a)`.
//!
//! Every unknown is expanded in horizontal Fourier modes `zeta = (xi, eta)`
//! and the Dirichlet sine basis `e_k(z) = sqrt(2/a) sin(k pi z / a)` in depth.
//! After a Fourier-Laplace transform in time the problem decouples into one
//! small dense system per frequency `lambda` and mode `zeta`; the pressure
//! reduces to a trace constant `p0` plus the hydrostatic primitive of the
//! temperature.
//!
//! Module map:
//! - [`params`], [`profile`]: domain types and weighted Sobolev norms.
//! - [`vertical`]: exact operations in the sine basis.
//! - [`solver`]: per-mode solves and pressure recovery.
//! - [`estimates`]: `M_sigma`, spectrum and form bounds, regularity sweeps.
//! - [`time`]: transforms, time evolution, pressure split, a Crank-Nicolson
//!   oracle and the counter-example multiplier.
//! - [`verify`]: registry of numerical claims with pass/fail thresholds.
//! - [`config`], [`cli`], [`output`]: batch front end.

pub mod cli;
pub mod config;
pub mod error;
pub mod estimates;
pub mod linalg;
pub mod output;
pub mod params;
pub mod profile;
pub mod quad;
pub mod random;
pub mod solver;
pub mod time;
pub mod verify;
pub mod vertical;

pub use error::{Error, Result};
pub use params::{make_spectral_point, HorizontalMode, PhysicalParams, SobolevIndex, SpectralPoint};
pub use profile::{ModalField, VerticalProfile};
pub use solver::{ModeRHS, ModeSolution};
