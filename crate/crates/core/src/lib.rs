//! Correlation-based user scheduling and beamforming for massive MIMO,
//! simulated over a clustered geometry-based stochastic channel.
//!
//! The base station learns only the second-order statistics of each user's
//! channel. From the Toeplitz spatial covariance it builds a binned
//! eigenvalue spectrum per user, schedules users greedily on spectral norm
//! with an overlap threshold, and beamforms on an approximate eigenchannel
//! assembled from the occupied bins. Two baselines bracket it: a greedy
//! channel-norm scheduler with zero-forcing on MMSE channel estimates
//! (instantaneous CSI), and a bin-occupancy scheduler with dominant-
//! eigenvector beamforming (statistics only, no interference nulling).
//!
//! Modules follow the pipeline: [`geometry`] draws a random cell,
//! [`channel`] assembles channel and covariance matrices, [`spectrum`]
//! bins the covariance spectrum, [`scheduling`] selects users,
//! [`precoding`] builds beamformers, [`metrics`] evaluates rates over
//! Monte Carlo drops, [`sweep`] orchestrates experiments, and
//! [`acceptance`] bundles the verification suite run by `cusbf check`.

pub mod acceptance;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod precoding;
pub mod scheduling;
pub mod spectrum;
pub mod sweep;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use scheduling::Scheme;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant as used by the noise-power formula.
pub const BOLTZMANN: f64 = 1.381e-23;
