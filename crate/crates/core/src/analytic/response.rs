//! Arrival probability `R(t)` and arrival rate `r(t)`.
//!
//! With `T1 ~ IG[d1/v, d1²/(2D)]` the first passage through `z = d1`,
//! `Δ ~ IG[(d2−d1)/v, (d2−d1)²/(2D)]` the transit across the band, and
//! `κ_m(t1) = Σ_n c_{m,n} e^{−D j'_{1,n}² t1}`, the survival is
//!
//! ```text
//! S(t) = P{T1 > t} + ∫_0^t f_T1(t1) Σ_m κ_m(t1) E_m(t − t1) dt1
//! E_m(u) = ∫_0^u e^{−s_m δ} f_Δ(δ) dδ + e^{−s_m u} P{Δ > u},   s_m = D j'_{0,m}²
//! ```
//!
//! The inner δ-integral is closed form (exponential tilting), so each grid
//! point costs a single one-dimensional quadrature over `t1`. The rate is
//!
//! ```text
//! r(t) = ∫_0^t f_T1(t1) P{Δ > t − t1} Σ_m s_m κ_m(t1) e^{−s_m (t − t1)} dt1
//! ```
//!
//! which is `R'(t)` in the untruncated limit. With finitely many modes the
//! two differ by `f_T1(t) (1 − Σ_m κ_m(t))`, of order [`Truncation::epsilon`].
//!
//! [`Truncation::epsilon`]: super::Truncation::epsilon

use rayon::prelude::*;

use super::{check_grid, ResponseCurve, ResponseKind, SeriesModel};
use crate::error::{domain, Result};
use crate::quadrature::Quadrature;
use crate::specfun::InverseGaussianParams;

/// Probability mass of `T1` allowed outside the integration window.
const WINDOW_TAIL: f64 = 1e-13;
/// `P{Δ > u}` below this counts as zero.
const TRANSIT_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseOptions {
    /// Relative tolerance of the outer quadrature; the absolute tolerance is
    /// a hundredth of it.
    pub quad_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of the `t1` window around `d1 / v`, in standard deviations
    /// of `T1`. Widened automatically until the excluded mass is below 1e-13.
    pub window_sigmas: f64,
}

impl Default for ResponseOptions {
    fn default() -> Self {
        Self {
            quad_tol: 1e-8,
            max_subdivisions: 2000,
            window_sigmas: 12.0,
        }
    }
}

impl ResponseOptions {
    pub fn with_tol(quad_tol: f64) -> Self {
        Self {
            quad_tol,
            ..Self::default()
        }
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature {
            abs_tol: 1e-2 * self.quad_tol,
            rel_tol: self.quad_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

struct Kernel<'a> {
    model: &'a SeriesModel,
    t1_law: InverseGaussianParams,
    transit: InverseGaussianParams,
    absorbing: Vec<f64>,
    reflecting: Vec<f64>,
    lo: f64,
    hi: f64,
    /// transit durations beyond this are treated as certain to have ended
    u_max: f64,
}

impl<'a> Kernel<'a> {
    fn new(model: &'a SeriesModel, opts: &ResponseOptions) -> Result<Self> {
        let s = model.scenario();
        let t1_law = s.t1_law()?;
        let transit = s.transit_law()?;
        let (mean, sd) = (t1_law.mean(), t1_law.std_dev());
        let mut lo = (mean - opts.window_sigmas * sd).max(0.0);
        while lo > 0.0 && t1_law.cdf(lo) > 0.5 * WINDOW_TAIL {
            lo = (lo - sd).max(0.0);
        }
        let mut hi = mean + opts.window_sigmas * sd;
        while t1_law.tail_unchecked(hi) > 0.5 * WINDOW_TAIL {
            hi += sd;
        }
        let mut u_max = transit.mean() + 8.0 * transit.std_dev();
        while transit.tail_unchecked(u_max) > TRANSIT_TAIL {
            u_max += transit.std_dev();
        }
        Ok(Self {
            model,
            t1_law,
            transit,
            absorbing: model.absorbing_rates(),
            reflecting: model.reflecting_rates(),
            lo,
            hi,
            u_max,
        })
    }

    /// `κ_m(t1)` for m = 1..=m_max.
    fn kappa(&self, t1: f64) -> Vec<f64> {
        let decay: Vec<f64> = self.reflecting.iter().map(|r| (-r * t1).exp()).collect();
        (1..=self.model.truncation().m_max)
            .map(|m| {
                self.model
                    .c_row(m)
                    .iter()
                    .zip(&decay)
                    .map(|(c, e)| c * e)
                    .sum()
            })
            .collect()
    }

    /// `Σ_m κ_m(t1) E_m(u)`; `u = None` means the transit is over.
    fn survival_sum(&self, t1: f64, u: Option<f64>) -> f64 {
        let kappa = self.kappa(t1);
        match u {
            Some(u) => {
                let tail = self.transit.tail_unchecked(u);
                kappa
                    .iter()
                    .zip(&self.absorbing)
                    .map(|(k, &s)| {
                        k * (self.transit.tilted_partial_unchecked(s, u) + (-s * u).exp() * tail)
                    })
                    .sum()
            }
            None => kappa
                .iter()
                .zip(&self.absorbing)
                .map(|(k, &s)| k * self.transit.tilted_partial_unchecked(s, f64::INFINITY))
                .sum(),
        }
    }

    fn rate_sum(&self, t1: f64, u: f64) -> f64 {
        let kappa = self.kappa(t1);
        kappa
            .iter()
            .zip(&self.absorbing)
            .map(|(k, &s)| s * k * (-s * u).exp())
            .sum()
    }

    /// `∫ f_T1(t1) Σ_m κ_m(t1) E_m(t − t1) dt1` over the window up to `t`.
    fn absorbed_part(&self, t: f64, q: &Quadrature) -> Result<f64> {
        let upper = t.min(self.hi);
        if upper <= self.lo {
            return Ok(0.0);
        }
        // below `split` the transit has surely ended and E_m is constant
        let split = (t - self.u_max).clamp(self.lo, upper);
        let mut total = 0.0;
        if split > self.lo {
            total += q
                .integrate(
                    |t1| self.t1_law.pdf(t1) * self.survival_sum(t1, None),
                    self.lo,
                    split,
                )?
                .value;
        }
        if upper > split {
            total += q
                .integrate(
                    |t1| self.t1_law.pdf(t1) * self.survival_sum(t1, Some(t - t1)),
                    split,
                    upper,
                )?
                .value;
        }
        Ok(total)
    }

    fn arrival_probability_at(&self, t: f64, q: &Quadrature) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(self.t1_law.cdf(t) - self.absorbed_part(t, q)?)
    }

    fn arrival_rate_at(&self, t: f64, q: &Quadrature) -> Result<f64> {
        let lower = self.lo.max(t - self.u_max);
        let upper = t.min(self.hi);
        if t <= 0.0 || upper <= lower {
            return Ok(0.0);
        }
        Ok(q.integrate(
            |t1| {
                let u = t - t1;
                self.t1_law.pdf(t1) * self.transit.tail_unchecked(u) * self.rate_sum(t1, u)
            },
            lower,
            upper,
        )?
        .value)
    }
}

fn check_inputs(times: &[f64], opts: &ResponseOptions) -> Result<()> {
    check_grid(times)?;
    if let Some(t) = times.iter().find(|&&t| t < 0.0) {
        return Err(domain("response grid", format!("negative time {t}")));
    }
    if !(opts.quad_tol > 0.0) {
        return Err(domain("response", format!("quad_tol = {} must be > 0", opts.quad_tol)));
    }
    Ok(())
}

/// `R(t) = 1 − S(t)` on `times`. Grid points are evaluated in parallel; each
/// value depends only on its own `t`, so the result is order independent.
pub fn arrival_probability(
    model: &SeriesModel,
    times: &[f64],
    opts: &ResponseOptions,
) -> Result<ResponseCurve> {
    check_inputs(times, opts)?;
    let kernel = Kernel::new(model, opts)?;
    let q = opts.quadrature();
    // every t past the window plus the longest transit shares one value
    let saturation = kernel.hi + kernel.u_max;
    let saturated = kernel.arrival_probability_at(saturation, &q)?;
    let values = times
        .par_iter()
        .map(|&t| {
            if t >= saturation {
                Ok(saturated + (kernel.t1_law.cdf(t) - kernel.t1_law.cdf(saturation)))
            } else {
                kernel.arrival_probability_at(t, &q)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ResponseCurve::new(times.to_vec(), values, ResponseKind::ArrivalProbability)
}

/// `r(t)` on `times`, one quadrature per grid point.
pub fn arrival_rate(
    model: &SeriesModel,
    times: &[f64],
    opts: &ResponseOptions,
) -> Result<ResponseCurve> {
    check_inputs(times, opts)?;
    let kernel = Kernel::new(model, opts)?;
    let q = opts.quadrature();
    let values = times
        .par_iter()
        .map(|&t| kernel.arrival_rate_at(t, &q))
        .collect::<Result<Vec<_>>>()?;
    ResponseCurve::new(times.to_vec(), values, ResponseKind::ArrivalRate)
}
