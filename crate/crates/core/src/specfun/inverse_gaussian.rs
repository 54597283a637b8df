//! Inverse Gaussian law `IG[mu, lambda]`: the first-passage time of a
//! Brownian motion with drift `v` and diffusivity `D` through a level at
//! distance `d` has `mu = d / v` and `lambda = d^2 / (2 D)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::normal::{log_q, q_function};
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseGaussianParams {
    mu: f64,
    lambda: f64,
}

impl InverseGaussianParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(domain(
                "InverseGaussianParams",
                format!("need finite mu > 0 and lambda > 0, got mu = {mu}, lambda = {lambda}"),
            ));
        }
        Ok(Self { mu, lambda })
    }

    /// First-passage law through a plane `distance` downstream.
    pub fn first_passage(distance: f64, velocity: f64, diffusion: f64) -> Result<Self> {
        Self::new(
            distance / velocity,
            distance * distance / (2.0 * diffusion),
        )
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn std_dev(&self) -> f64 {
        (self.mu.powi(3) / self.lambda).sqrt()
    }

    pub fn mode(&self) -> f64 {
        let k = 1.5 * self.mu / self.lambda;
        self.mu * ((1.0 + k * k).sqrt() - k)
    }

    /// Density; zero off the positive axis.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || x.is_infinite() {
            return 0.0;
        }
        let (mu, lambda) = (self.mu, self.lambda);
        let log_norm = 0.5 * (lambda / (2.0 * PI * x.powi(3))).ln();
        (log_norm - lambda * (x - mu).powi(2) / (2.0 * mu * mu * x)).exp()
    }

    /// `P{X <= x}`.
    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        tilted_cdf(self.mu, self.lambda, self.mu, x)
    }

    /// `P{X > x}` in the two-Q-function form. Domain error for `x < 0`.
    ///
    /// With `a = sqrt(lambda/x) (x/mu - 1)` and `b = sqrt(lambda/x) (x/mu + 1)`
    /// the tail is `Q(a) - exp(2 lambda/mu) Q(b)`; the second product is formed
    /// in log space because `2 lambda / mu` can exceed the range of `exp`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(domain("ig_tail", format!("x = {x} must be >= 0")));
        }
        Ok(self.tail_unchecked(x))
    }

    pub(crate) fn tail_unchecked(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x.is_infinite() {
            return 0.0;
        }
        let (mu, lambda) = (self.mu, self.lambda);
        let scale = (lambda / x).sqrt();
        let a = scale * (x / mu - 1.0);
        let b = scale * (x / mu + 1.0);
        let v = q_function(a) - (2.0 * lambda / mu + log_q(b)).exp();
        v.clamp(0.0, 1.0)
    }

    /// `integral_0^x exp(-s t) f(t) dt` by exponential tilting:
    /// `exp(lambda/mu - lambda/mu_s) CDF_{IG[mu_s, lambda]}(x)` with
    /// `mu_s = mu / sqrt(1 + 2 s mu^2 / lambda)`.
    pub fn tilted_partial(&self, s: f64, x: f64) -> Result<f64> {
        if s < 0.0 || s.is_nan() || x < 0.0 || x.is_nan() {
            return Err(domain(
                "ig_tilted_partial",
                format!("need s >= 0 and x >= 0, got s = {s}, x = {x}"),
            ));
        }
        Ok(self.tilted_partial_unchecked(s, x))
    }

    pub(crate) fn tilted_partial_unchecked(&self, s: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (mu, lambda) = (self.mu, self.lambda);
        let mu_s = mu / (1.0 + 2.0 * s * mu * mu / lambda).sqrt();
        if x.is_infinite() {
            return (lambda / mu - lambda / mu_s).exp();
        }
        tilted_cdf(mu, lambda, mu_s, x)
    }
}

/// `exp(lambda/mu - lambda/mu_s) * CDF_{IG[mu_s, lambda]}(x)`, every
/// exponential factor folded into log space before exponentiating.
fn tilted_cdf(mu: f64, lambda: f64, mu_s: f64, x: f64) -> f64 {
    let scale = (lambda / x).sqrt();
    let a = scale * (x / mu_s - 1.0);
    let b = scale * (x / mu_s + 1.0);
    let shift = lambda / mu - lambda / mu_s;
    let first = if shift == 0.0 {
        q_function(-a)
    } else {
        (shift + q_function(-a).ln()).exp()
    };
    let second = (lambda / mu + lambda / mu_s + log_q(b)).exp();
    first + second
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_parameters() {
        assert!(InverseGaussianParams::new(0.0, 1.0).is_err());
        assert!(InverseGaussianParams::new(1.0, -1.0).is_err());
        assert!(InverseGaussianParams::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn density_at_mean() {
        let p = InverseGaussianParams::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.pdf(1.0), (1.0 / (2.0 * PI)).sqrt(), epsilon = 1e-15);
        assert_eq!(p.pdf(0.0), 0.0);
        assert_eq!(p.pdf(-2.0), 0.0);
    }

    #[test]
    fn tail_edges() {
        let p = InverseGaussianParams::first_passage(20.0, 2000.0, 400.0).unwrap();
        assert_eq!(p.tail(0.0).unwrap(), 1.0);
        assert!(p.tail(-1e-3).is_err());
        let mut prev = 1.0;
        for i in 1..400 {
            let t = p.tail(i as f64 * 1e-4).unwrap();
            assert!(t <= prev + 1e-15);
            prev = t;
        }
        assert!(prev < 1e-12);
        // huge 2 lambda / mu must not overflow
        let stiff = InverseGaussianParams::first_passage(20.0, 3000.0, 100.0).unwrap();
        assert!(2.0 * stiff.lambda() / stiff.mu() > 500.0);
        assert!(stiff.tail(stiff.mu()).unwrap().is_finite());
    }

    #[test]
    fn tilted_partial_edges() {
        let p = InverseGaussianParams::new(1.0, 1.0).unwrap();
        assert_eq!(p.tilted_partial(0.5, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(p.tilted_partial(0.0, 1e6).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.tilted_partial(0.0, 3.0).unwrap(), p.cdf(3.0), epsilon = 0.0);
        assert!(p.tilted_partial(-1.0, 1.0).is_err());
        assert!(p.tilted_partial(1.0, -1.0).is_err());
    }

    #[test]
    fn cdf_plus_tail_is_one() {
        let p = InverseGaussianParams::new(0.01, 0.5).unwrap();
        for x in [0.002, 0.008, 0.01, 0.013, 0.03] {
            assert_abs_diff_eq!(p.cdf(x) + p.tail(x).unwrap(), 1.0, epsilon = 1e-14);
        }
    }
}
