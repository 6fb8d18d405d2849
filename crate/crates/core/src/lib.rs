//! Single-photon cross-Kerr detection with a three-level transmon in a waveguide.
//!
//! The crate computes the signal-to-noise ratio of a homodyne probe that is
//! displaced by zero or one control photon, using three independent
//! formulations:
//!
//! * [`cascade`]: stochastic master equation for a fictitious source cavity
//!   cascaded into the transmon, unravelled into homodyne trajectories;
//! * [`fock`]: deterministic Fock-state master-equation hierarchy driven by a
//!   one-photon wave packet, with the signal variance from a regression sweep;
//! * [`analytic`]: closed-form solution on resonance with `gamma_c = 2 gamma_b`.
//!
//! [`variants`] covers squeezed probes, ensembles, transmon chains and the
//! four-level reduction. [`snr`] holds estimators, sweeps and the optimizer,
//! and [`cli`] the config-driven experiment runner.

pub mod acceptance;
pub mod analytic;
pub mod cascade;
pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod lindblad;
pub mod model;
pub mod ode;
pub mod pulse;
pub mod qutrit;
pub mod regression;
pub mod snr;
pub mod variants;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
