//! Verification laboratory for the level-2 higher equations of motion of bulk
//! and boundary Liouville CFT.
//!
//! The crate pairs exact symbolic computations (Fock-space Virasoro
//! representations over `ℚ(i)(α, b)`) with closed-form special-function
//! evaluations and independent numerical oracles: quadrature, Monte Carlo and
//! Gaussian multiplicative chaos simulation.

pub mod cli;
pub mod closedform;
pub mod coef;
pub mod config;
pub mod error;
pub mod fock;
pub mod gmc;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod suite;

pub use error::{HemError, Result};
pub use params::{delta, kac_alpha, phase, KacLabel, KacSign, Params, Partition, Phase};
