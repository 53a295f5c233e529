//! Outage probability of a UAV communication link in the presence of a single
//! interfering node.
//!
//! The link model is interference limited: the SIR is the ratio of the faded
//! main-link power to the faded interference power. Each link is LoS with a
//! probability that depends on its elevation angle; LoS links see Rician
//! fading (noncentral chi-squared power, 2 degrees of freedom) and NLoS links
//! see Rayleigh fading (unit-mean exponential power).
//!
//! * [`specfun`]: modified Bessel functions and the first-order Marcum Q-function.
//! * [`geometry`]: node positions, link distances and elevation angles.
//! * [`channel`]: angle-dependent LoS probability, path-loss exponent, Rician
//!   factor, and the fading distributions.
//! * [`outage`]: closed-form conditional outage probabilities and their mixture.
//! * [`montecarlo`]: a deterministic, parallel trial-level simulator.
//! * [`analysis`]: sweeps, optimal height, LoS/NLoS crossing point, and
//!   integral identity checks.
//! * [`config`] and [`csv`]: scenario files and CSV output used by the CLI.

pub mod analysis;
pub mod channel;
pub mod config;
pub mod csv;
mod error;
pub mod geometry;
pub mod montecarlo;
pub mod outage;
pub mod quad;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
