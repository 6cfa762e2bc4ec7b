//! Quantum-Langevin radiation reaction toolkit.
//!
//! Bath spectral distributions and memory kernels, fluctuation-dissipation
//! correlation functions, deterministic radiation-reaction trajectory
//! integrators (Abraham-Lorentz, finite-cutoff, Ford-O'Connell,
//! relativistic), radiated-energy functionals, and stochastic
//! Langevin/microbath simulation.

pub mod bath;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod ode;
pub mod quad;
pub mod relativistic;
pub mod response;
pub mod stochastic;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
