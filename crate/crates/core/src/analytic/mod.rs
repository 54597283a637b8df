//! Approximate channel response for the flow-dominated regime.
//!
//! The concentration obeys the advection–diffusion equation in cylindrical
//! coordinates with the standard Laplacian
//! `∂²/∂r² + (1/r) ∂/∂r + (1/r²) ∂²/∂θ² + ∂²/∂z²`, a point release on the
//! axis at `z = 0`, a reflecting wall except on the receiver band
//! `z ∈ [d1, d2)` where it is absorbing, and decay as `|z| → ∞`.
//!
//! It is not solved exactly. Instead the cross-section sees a reflecting
//! wall before the molecule reaches `d1` (time `t1`), an absorbing wall while
//! it is inside the band (until `t2`), and a reflecting wall afterwards.
//! Each period has a Bessel-series solution; the axial factor is a drifting
//! Gaussian. Randomising `t1` and `t2 - t1` with their inverse Gaussian
//! first-passage laws turns the conditional survival into `R(t)` and `r(t)`.

mod response;
mod series;

pub use response::{arrival_probability, arrival_rate, ResponseOptions};
pub use series::SeriesModel;

pub use crate::quadrature::{adaptive_quadrature, Quadrature, QuadratureResult};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scenario::Scenario;

/// Series truncation orders: `m_max` zeros of `J0` (indices 1..=m_max),
/// zeros of `J1` with indices 0..=n_max, and `γ` coefficients 0..=l_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub m_max: usize,
    pub n_max: usize,
    pub l_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(10, 10)
    }
}

impl Truncation {
    /// `l_max` defaults to `n_max`.
    pub fn new(m_max: usize, n_max: usize) -> Self {
        Self {
            m_max,
            n_max,
            l_max: n_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(domain("Truncation", "m_max must be >= 1"));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            m_max: 2 * self.m_max,
            n_max: 2 * self.n_max,
            l_max: 2 * self.l_max,
        }
    }

    /// Mass that the truncated `J0`-zero series fails to carry,
    /// `1 - sum_{m <= m_max} 4 / j_{0,m}^2`.
    ///
    /// The truncated arrival probability can undershoot 0 or lose
    /// monotonicity by at most about this much, and the truncated rate
    /// misses roughly this fraction of the arrivals.
    pub fn epsilon(&self) -> f64 {
        let carried: f64 = (1..=self.m_max)
            .map(|m| {
                let j = crate::specfun::bessel_root(crate::specfun::BesselOrder::Zero, m)
                    .expect("m >= 1");
                4.0 / (j * j)
            })
            .sum();
        (1.0 - carried).max(0.0)
    }
}

/// Crossing times of the receiver planes, `0 < t1 < t2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingTimes {
    t1: f64,
    t2: f64,
}

impl CrossingTimes {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1.is_finite() && t2.is_finite() && t1 > 0.0 && t2 > t1) {
            return Err(domain(
                "CrossingTimes",
                format!("need 0 < t1 < t2, got t1 = {t1}, t2 = {t2}"),
            ));
        }
        Ok(Self { t1, t2 })
    }

    /// Pure-advection crossing times `d1 / v` and `d2 / v`.
    pub fn nominal(s: &Scenario) -> Result<Self> {
        Self::new(s.d1 / s.v, s.d2 / s.v)
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Time spent in `[t1, t2]` up to `t`.
    pub fn occupation(&self, t: f64) -> f64 {
        (t - self.t1).clamp(0.0, self.t2 - self.t1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    ArrivalProbability,
    ArrivalRate,
    Survival,
}

impl ResponseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ArrivalProbability => "arrival_probability",
            Self::ArrivalRate => "arrival_rate",
            Self::Survival => "survival",
        }
    }
}

impl std::str::FromStr for ResponseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "arrival_probability" => Ok(Self::ArrivalProbability),
            "arrival_rate" => Ok(Self::ArrivalRate),
            "survival" => Ok(Self::Survival),
            other => Err(format!("unknown response kind `{other}`")),
        }
    }
}

/// A sampled response on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: ResponseKind,
}

impl ResponseCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: ResponseKind) -> Result<Self> {
        if times.len() != values.len() {
            return Err(domain(
                "ResponseCurve",
                format!("{} times but {} values", times.len(), values.len()),
            ));
        }
        check_grid(&times)?;
        Ok(Self {
            times,
            values,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Linear interpolation; `None` outside `[times[0], times[last]]`.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t < first || t > last {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return Some(self.values[0]);
        }
        if i == self.times.len() {
            return self.values.last().copied();
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// Values clamped to `[0, 1]` (arrival probability and survival only),
    /// for reporting. Computations keep the raw series values.
    pub fn clamped(&self) -> Self {
        let values = match self.kind {
            ResponseKind::ArrivalRate => self.values.iter().map(|v| v.max(0.0)).collect(),
            _ => self.values.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        };
        Self {
            values,
            ..self.clone()
        }
    }
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(domain("time grid", "non-finite time"));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(domain(
            "time grid",
            format!("not strictly increasing at {} -> {}", w[0], w[1]),
        ));
    }
    Ok(())
}

/// `{0, step, 2 step, ..., n step}` with `n = round(horizon / step)`.
pub fn uniform_grid(horizon: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && horizon > 0.0 && step.is_finite() && horizon.is_finite()) {
        return Err(domain(
            "uniform_grid",
            format!("need horizon > 0 and step > 0, got {horizon}, {step}"),
        ));
    }
    let n = (horizon / step).round() as usize;
    Ok((0..=n).map(|k| k as f64 * step).collect())
}

/// `(4 π D t)^{-1/2} exp(-(z - v t)^2 / (4 D t))`, µm⁻¹.
pub fn axial_concentration(s: &Scenario, z: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("axial_concentration", format!("t = {t} must be > 0")));
    }
    let four_dt = 4.0 * s.d_coef * t;
    Ok((-(z - s.v * t).powi(2) / four_dt).exp() / (std::f64::consts::PI * four_dt).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn crossing_times_validate() {
        assert!(CrossingTimes::new(1.0, 1.0).is_err());
        assert!(CrossingTimes::new(0.0, 1.0).is_err());
        let ct = CrossingTimes::new(1.0, 1.5).unwrap();
        assert_eq!(ct.occupation(0.5), 0.0);
        assert_eq!(ct.occupation(1.2), 1.2 - 1.0);
        assert_eq!(ct.occupation(9.0), 0.5);
    }

    #[test]
    fn axial_gaussian() {
        let s = Scenario::new(10.0, 2000.0, 400.0, 2000.0, 2020.0);
        let peak = axial_concentration(&s, 2000.0, 1.0).unwrap();
        assert!(peak > axial_concentration(&s, 1999.0, 1.0).unwrap());
        assert!(peak > axial_concentration(&s, 2001.0, 1.0).unwrap());
        // sigma = sqrt(2 D t) = sqrt(800)
        let sigma = 800f64.sqrt();
        assert_abs_diff_eq!(sigma, 28.284_271_247_461_9, epsilon = 1e-12);
        let ratio = axial_concentration(&s, 2000.0 + sigma, 1.0).unwrap() / peak;
        assert_abs_diff_eq!(ratio, (-0.5f64).exp(), epsilon = 1e-14);
        assert!(axial_concentration(&s, 0.0, 0.0).is_err());
    }

    #[test]
    fn curve_rejects_bad_grid() {
        assert!(ResponseCurve::new(vec![0.0, 0.0], vec![1.0, 2.0], ResponseKind::Survival).is_err());
        assert!(ResponseCurve::new(vec![0.0, 1.0], vec![1.0], ResponseKind::Survival).is_err());
    }

    #[test]
    fn interpolation() {
        let c = ResponseCurve::new(vec![0.0, 1.0, 3.0], vec![0.0, 1.0, 0.0], ResponseKind::ArrivalRate)
            .unwrap();
        assert_eq!(c.interpolate(0.5), Some(0.5));
        assert_eq!(c.interpolate(2.0), Some(0.5));
        assert_eq!(c.interpolate(3.0), Some(0.0));
        assert_eq!(c.interpolate(3.1), None);
    }

    #[test]
    fn grid_arithmetic() {
        let g = uniform_grid(3.5, 0.01).unwrap();
        assert_eq!(g.len(), 351);
        assert!(uniform_grid(0.0, 0.01).is_err());
    }

    #[test]
    fn truncation_epsilon_shrinks() {
        let e10 = Truncation::new(10, 10).epsilon();
        let e500 = Truncation::new(500, 10).epsilon();
        assert!(e10 > 0.03 && e10 < 0.05, "{e10}");
        assert!(e500 < 1e-3 && e500 < e10);
    }
}
