//! Special-function kernel: Bessel `J0`/`J1` and their zeros, the Gaussian
//! tail `Q`, and inverse Gaussian primitives.
//!
//! Everything here is a pure function; the only shared state is the root
//! table, built once per process behind a `OnceLock`.

mod bessel;
mod inverse_gaussian;
mod normal;

pub use bessel::{bessel_j, bessel_root, j0, j1, BesselOrder, BesselRootTable, CACHED_ROOTS};
pub use inverse_gaussian::InverseGaussianParams;
pub use normal::{log_q, phi, q_function};

use crate::error::Result;

pub fn ig_pdf(p: &InverseGaussianParams, x: f64) -> f64 {
    p.pdf(x)
}

pub fn ig_tail(p: &InverseGaussianParams, x: f64) -> Result<f64> {
    p.tail(x)
}

pub fn ig_tilted_partial(p: &InverseGaussianParams, s: f64, x: f64) -> Result<f64> {
    p.tilted_partial(s, x)
}
