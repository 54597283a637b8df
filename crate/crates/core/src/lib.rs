//! Channel response of a molecular-communication link in a cylindrical tube
//! with uniform flow and an absorbing ring receiver on the wall.
//!
//! * [`analytic`]: Bessel-series concentration, conditional survival,
//!   arrival probability `R(t)` and arrival rate `r(t)`.
//! * [`mcsim`]: Brownian particle simulator with drift, reflecting wall and
//!   absorbing ring.
//! * [`metrics`]: RMSE / NMSE / NRMSE between theory and simulation.
//! * [`pipeline`]: the end-to-end comparison and the six reference scenarios.

pub mod analytic;
pub mod csvio;
pub mod error;
pub mod mcsim;
pub mod metrics;
pub mod pipeline;
pub mod quadrature;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use analytic::{CrossingTimes, ResponseCurve, ResponseKind, SeriesModel, Truncation};
pub use scenario::{RegimeReport, Scenario};
pub use mcsim::{EnsembleResult, SimConfig};
pub use metrics::CurvePair;
