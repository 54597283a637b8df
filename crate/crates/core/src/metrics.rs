//! Goodness of fit between a theoretical curve (test, `x_i`) and a simulated
//! one (reference, `y_i`) sampled on a common grid.

use crate::analytic::{uniform_grid, ResponseCurve};
use crate::error::{domain, Error, Result};
use crate::mcsim::EnsembleResult;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePair {
    times: Vec<f64>,
    test: Vec<f64>,
    reference: Vec<f64>,
}

impl CurvePair {
    pub fn new(times: Vec<f64>, test: Vec<f64>, reference: Vec<f64>) -> Result<Self> {
        if times.len() != test.len() || times.len() != reference.len() {
            return Err(domain(
                "CurvePair",
                format!(
                    "length mismatch: {} times, {} test, {} reference",
                    times.len(),
                    test.len(),
                    reference.len()
                ),
            ));
        }
        if times.len() < 2 {
            return Err(domain("CurvePair", "need at least 2 samples"));
        }
        crate::analytic::check_grid(&times)?;
        if test.iter().chain(&reference).any(|v| !v.is_finite()) {
            return Err(domain("CurvePair", "non-finite sample"));
        }
        Ok(Self {
            times,
            test,
            reference,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn test(&self) -> &[f64] {
        &self.test
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn sse(&self) -> f64 {
        self.test
            .iter()
            .zip(&self.reference)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    }

    /// `Σ (y_i − ȳ)²`, rejected when zero.
    fn spread(&self) -> Result<f64> {
        let n = self.reference.len() as f64;
        let mean = self.reference.iter().sum::<f64>() / n;
        let s: f64 = self.reference.iter().map(|y| (y - mean) * (y - mean)).sum();
        if s > 0.0 {
            Ok(s)
        } else {
            Err(Error::UndefinedMetric("reference curve is constant"))
        }
    }
}

pub fn rmse(p: &CurvePair) -> f64 {
    (p.sse() / p.len() as f64).sqrt()
}

/// `1 − Σ(x−y)² / Σ(y−ȳ)²`.
pub fn nmse(p: &CurvePair) -> Result<f64> {
    Ok(1.0 - p.sse() / p.spread()?)
}

/// `1 − sqrt(Σ(x−y)² / Σ(y−ȳ)²)`.
pub fn nrmse(p: &CurvePair) -> Result<f64> {
    Ok(1.0 - (p.sse() / p.spread()?).sqrt())
}

/// Samples a theory curve and a simulated CDF on `{k · grid_step}` up to the
/// simulation horizon. Theory is interpolated linearly, the simulation is read
/// as a right-continuous step function.
pub fn align(theory: &ResponseCurve, sim: &EnsembleResult, grid_step: f64) -> Result<CurvePair> {
    align_curves(theory, &sim.empirical_cdf, sim.config.horizon, grid_step)
}

/// As [`align`] with the reference given as a step curve directly.
pub fn align_curves(
    theory: &ResponseCurve,
    reference: &ResponseCurve,
    horizon: f64,
    grid_step: f64,
) -> Result<CurvePair> {
    let times = uniform_grid(horizon, grid_step)?;
    let mut test = Vec::with_capacity(times.len());
    let mut refv = Vec::with_capacity(times.len());
    for &t in &times {
        test.push(theory.interpolate(t).ok_or_else(|| {
            domain("align", format!("t = {t} outside the theory curve"))
        })?);
        refv.push(step_lookup(reference, t).ok_or_else(|| {
            domain("align", format!("t = {t} outside the simulated curve"))
        })?);
    }
    CurvePair::new(times, test, refv)
}

/// Value at the last grid point `<= t`; a point within 1e-9 relative of `t`
/// counts as reached.
fn step_lookup(c: &ResponseCurve, t: f64) -> Option<f64> {
    let (first, last) = (*c.times.first()?, *c.times.last()?);
    let slack = 1e-9 * t.abs().max(1.0);
    if t < first - slack || t > last + slack {
        return None;
    }
    let i = c.times.partition_point(|&x| x <= t + slack);
    Some(c.values[i.max(1) - 1])
}
