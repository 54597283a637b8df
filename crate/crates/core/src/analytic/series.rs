use std::f64::consts::PI;

use super::{axial_concentration, CrossingTimes, Truncation};
use crate::error::{domain, Error, Result};
use crate::scenario::Scenario;
use crate::specfun::{j0, j1, BesselOrder, BesselRootTable};

/// Truncated series for one scenario with the scenario-only coefficients
/// (`α_n`, `c_{m,n}`) cached. `β_m` and `γ_ℓ` depend on the crossing times
/// and are computed on demand.
#[derive(Debug, Clone)]
pub struct SeriesModel {
    scenario: Scenario,
    trunc: Truncation,
    /// `j_{0,m}`, m = 1..=m_max (stored at m - 1)
    zeros0: BesselRootTable,
    /// `j_{1,n}`, n = 0..=max(n_max, l_max)
    zeros1: BesselRootTable,
    /// `J1(j_{0,m})`
    j1_at_zeros0: Vec<f64>,
    /// `J0(j_{1,n})`
    j0_at_zeros1: Vec<f64>,
    alpha: Vec<f64>,
    /// row-major, `m_max` rows of `n_max + 1`
    c: Vec<f64>,
}

impl SeriesModel {
    pub fn new(scenario: Scenario, trunc: Truncation) -> Result<Self> {
        scenario.validate()?;
        trunc.validate()?;
        let zeros0 = BesselRootTable::new(BesselOrder::Zero, trunc.m_max)?;
        let zeros1 = BesselRootTable::new(BesselOrder::One, trunc.n_max.max(trunc.l_max) + 1)?;
        let j1_at_zeros0: Vec<f64> = zeros0.roots().iter().map(|&x| j1(x)).collect();
        let j0_at_zeros1: Vec<f64> = zeros1.roots().iter().map(|&x| j0(x)).collect();
        let area = PI * scenario.rho * scenario.rho;
        let alpha = j0_at_zeros1[..=trunc.n_max]
            .iter()
            .map(|&v| 1.0 / (area * v * v))
            .collect();
        let mut c = Vec::with_capacity(trunc.m_max * (trunc.n_max + 1));
        for &a in zeros0.roots() {
            for n in 0..=trunc.n_max {
                let b = zeros1.roots()[n];
                let gap = a * a - b * b;
                if gap == 0.0 {
                    return Err(domain(
                        "SeriesModel",
                        format!("coincident zeros j0 = {a}, j1 = {b}"),
                    ));
                }
                c.push(4.0 / (gap * j0_at_zeros1[n]));
            }
        }
        Ok(Self {
            scenario,
            trunc,
            zeros0,
            zeros1,
            j1_at_zeros0,
            j0_at_zeros1,
            alpha,
            c,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    /// `j_{0,m}`, `m >= 1`.
    pub fn zero0(&self, m: usize) -> f64 {
        self.zeros0.roots()[m - 1]
    }

    /// `j_{1,n}`, `n >= 0`.
    pub fn zero1(&self, n: usize) -> f64 {
        self.zeros1.roots()[n]
    }

    /// Decay rate `D j'^2 = D (j / ρ)^2` of a radial mode with zero `j`.
    pub(crate) fn rate(&self, zero: f64) -> f64 {
        let k = zero / self.scenario.rho;
        self.scenario.d_coef * k * k
    }

    /// Decay rates of the absorbing-wall modes, m = 1..=m_max.
    pub(crate) fn absorbing_rates(&self) -> Vec<f64> {
        self.zeros0.roots().iter().map(|&j| self.rate(j)).collect()
    }

    /// Decay rates of the reflecting-wall modes, n = 0..=n_max.
    pub(crate) fn reflecting_rates(&self) -> Vec<f64> {
        self.zeros1.roots()[..=self.trunc.n_max]
            .iter()
            .map(|&j| self.rate(j))
            .collect()
    }

    pub(crate) fn c_row(&self, m: usize) -> &[f64] {
        let w = self.trunc.n_max + 1;
        &self.c[(m - 1) * w..m * w]
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.trunc.m_max {
            return Err(Error::IndexOutOfRange {
                what: "m",
                index: m,
                valid: format!("1..={}", self.trunc.m_max),
            });
        }
        Ok(())
    }

    fn check_n(&self, n: usize, max: usize, what: &'static str) -> Result<()> {
        if n > max {
            return Err(Error::IndexOutOfRange {
                what,
                index: n,
                valid: format!("0..={max}"),
            });
        }
        Ok(())
    }

    /// `α_n = (π ρ²)⁻¹ J0(j_{1,n})⁻²`.
    pub fn alpha_coeff(&self, n: usize) -> Result<f64> {
        self.check_n(n, self.trunc.n_max, "n")?;
        Ok(self.alpha[n])
    }

    /// `c_{m,n} = 4 / ((j_{0,m}² − j_{1,n}²) J0(j_{1,n}))`.
    pub fn c_mn(&self, m: usize, n: usize) -> Result<f64> {
        self.check_m(m)?;
        self.check_n(n, self.trunc.n_max, "n")?;
        Ok(self.c_row(m)[n])
    }

    /// Projection of the reflecting-wall profile at `t1` onto the
    /// absorbing-wall modes:
    /// `β_m = (2/(πρ²)) (j_{0,m}/J1(j_{0,m})) Σ_n e^{−D j'_{1,n}² t1} / (J0(j_{1,n}) (j_{0,m}² − j_{1,n}²))`.
    pub fn beta_coeff(&self, m: usize, t1: f64) -> Result<f64> {
        self.check_m(m)?;
        if !(t1 > 0.0) {
            return Err(domain("beta_coeff", format!("t1 = {t1} must be > 0")));
        }
        Ok(self.beta_unchecked(m, t1))
    }

    fn beta_unchecked(&self, m: usize, t1: f64) -> f64 {
        let a = self.zero0(m);
        let rho = self.scenario.rho;
        // c_{m,n} already holds 4 / (J0(j_{1,n}) (a² − j_{1,n}²))
        let sum: f64 = self
            .c_row(m)
            .iter()
            .zip(self.reflecting_rates())
            .map(|(&c, rate)| c * (-rate * t1).exp())
            .sum();
        sum * 0.25 * 2.0 / (PI * rho * rho) * a / self.j1_at_zeros0[m - 1]
    }

    /// Projection of the absorbing-wall profile at `t2` back onto the
    /// reflecting-wall modes, `γ_ℓ`.
    pub fn gamma_coeff(&self, l: usize, ct: &CrossingTimes) -> Result<f64> {
        self.check_n(l, self.trunc.l_max, "l")?;
        Ok(self.gamma_unchecked(l, ct))
    }

    fn gamma_unchecked(&self, l: usize, ct: &CrossingTimes) -> f64 {
        let rho = self.scenario.rho;
        let b = self.zero1(l);
        let reflecting = self.reflecting_rates();
        let dwell = ct.t2() - ct.t1();
        let mut total = 0.0;
        for m in 1..=self.trunc.m_max {
            let a = self.zero0(m);
            let inner: f64 = self
                .c_row(m)
                .iter()
                .zip(&reflecting)
                .map(|(&c, &rate)| c * (-rate * ct.t1()).exp())
                .sum();
            // inner = 4 Σ_n e^{..} / (J0(j_{1,n}) (a² − j_{1,n}²))
            total += a * a * (-self.rate(a) * dwell).exp() / (a * a - b * b) * 0.25 * inner;
        }
        4.0 / (PI * rho * rho) / self.j0_at_zeros1[l] * total
    }

    /// Cross-sectional density `c_{r,θ}(r | t)` in µm⁻², axisymmetric.
    pub fn radial_concentration(&self, r: f64, t: f64, ct: &CrossingTimes) -> Result<f64> {
        let rho = self.scenario.rho;
        if !(0.0..=rho).contains(&r) {
            return Err(domain(
                "radial_concentration",
                format!("r = {r} outside [0, {rho}]"),
            ));
        }
        if !(t >= 0.0) {
            return Err(domain("radial_concentration", format!("t = {t} must be >= 0")));
        }
        let x = r / rho;
        let value = if t < ct.t1() {
            (0..=self.trunc.n_max)
                .map(|n| {
                    let j = self.zero1(n);
                    self.alpha[n] * j0(j * x) * (-self.rate(j) * t).exp()
                })
                .sum()
        } else if t < ct.t2() {
            (1..=self.trunc.m_max)
                .map(|m| {
                    let j = self.zero0(m);
                    self.beta_unchecked(m, ct.t1()) * j0(j * x) * (-self.rate(j) * (t - ct.t1())).exp()
                })
                .sum()
        } else {
            (0..=self.trunc.l_max)
                .map(|l| {
                    let j = self.zero1(l);
                    self.gamma_unchecked(l, ct) * j0(j * x) * (-self.rate(j) * (t - ct.t2())).exp()
                })
                .sum()
        };
        Ok(value)
    }

    /// `N_e c_{r,θ}(r | t) c_z(z | t)` in µm⁻³; `theta` does not enter.
    pub fn concentration(&self, r: f64, _theta: f64, z: f64, t: f64, ct: &CrossingTimes) -> Result<f64> {
        let radial = self.radial_concentration(r, t, ct)?;
        let axial = axial_concentration(&self.scenario, z, t)?;
        Ok(self.scenario.n_emit as f64 * radial * axial)
    }

    /// `S(t | t1, t2) = Σ_{m,n} c_{m,n} exp(−D (j'_{1,n}² t1 + j'_{0,m}² w(t)))`
    /// with `w(t)` the time spent in `[t1, t2]` up to `t`.
    pub fn conditional_survival(&self, t: f64, ct: &CrossingTimes) -> f64 {
        let w = ct.occupation(t);
        let reflecting: Vec<f64> = self
            .reflecting_rates()
            .iter()
            .map(|rate| (-rate * ct.t1()).exp())
            .collect();
        (1..=self.trunc.m_max)
            .map(|m| {
                let decay = (-self.rate(self.zero0(m)) * w).exp();
                let row: f64 = self.c_row(m).iter().zip(&reflecting).map(|(c, e)| c * e).sum();
                row * decay
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::reference_case;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn ex2(trunc: Truncation) -> SeriesModel {
        SeriesModel::new(reference_case(2).unwrap().scenario(), trunc).unwrap()
    }

    #[test]
    fn alpha_values() {
        let m = ex2(Truncation::default());
        assert_relative_eq!(m.alpha_coeff(0).unwrap(), 1.0 / (100.0 * PI), max_relative = 1e-15);
        // 1 / (100 π J0(j_{1,1})²), J0(j_{1,1}) = -0.402759395702553 (mpmath)
        assert_relative_eq!(m.alpha_coeff(1).unwrap(), 0.019_622_700_087_322_94, max_relative = 1e-12);
        assert!(m.alpha_coeff(11).is_err());
        let wide = SeriesModel::new(reference_case(5).unwrap().scenario(), Truncation::default()).unwrap();
        for n in 0..=10 {
            assert_relative_eq!(
                wide.alpha_coeff(n).unwrap(),
                m.alpha_coeff(n).unwrap() / 4.0,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn c_values_and_ranges() {
        let m = ex2(Truncation::default());
        // 4 / j_{0,1}², j_{0,1} = 2.404825557695773
        assert_relative_eq!(m.c_mn(1, 0).unwrap(), 0.691_660_276_122_579_7, max_relative = 1e-13);
        assert!(m.c_mn(0, 0).is_err());
        assert!(m.c_mn(11, 0).is_err());
        assert!(m.c_mn(1, 11).is_err());
    }

    #[test]
    fn beta_independent_recomputation() {
        // Literal transcription of the coefficient formula, root by root.
        let model = ex2(Truncation::default());
        let s = model.scenario();
        let t1 = s.d1 / s.v;
        assert_eq!(t1, 1.0);
        let a = crate::specfun::bessel_root(BesselOrder::Zero, 1).unwrap();
        let mut sum = 0.0;
        for n in 0..=10 {
            let b = crate::specfun::bessel_root(BesselOrder::One, n).unwrap();
            let jp = b / s.rho;
            sum += (1.0 / j0(b)) * (-jp * jp * s.d_coef * t1).exp() / (a * a - b * b);
        }
        let expected = 2.0 / (PI * s.rho * s.rho) * a / j1(a) * sum;
        assert_relative_eq!(model.beta_coeff(1, t1).unwrap(), expected, max_relative = 1e-12);
        assert!(model.beta_coeff(0, t1).is_err());
        assert!(model.beta_coeff(1, 0.0).is_err());
    }

    #[test]
    fn beta_large_t1_limit() {
        let model = ex2(Truncation::default());
        let rho = model.scenario().rho;
        for m in 1..=4 {
            let a = model.zero0(m);
            let limit = 2.0 / (PI * rho * rho) * a / (j1(a) * a * a);
            assert_relative_eq!(model.beta_coeff(m, 50.0).unwrap(), limit, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_mass_link() {
        let model = ex2(Truncation::default());
        let s = *model.scenario();
        let ct = CrossingTimes::new(0.95, 0.962).unwrap();
        let mut via_c = 0.0;
        for m in 1..=10 {
            for n in 0..=10 {
                let rate_n = model.rate(model.zero1(n));
                let rate_m = model.rate(model.zero0(m));
                via_c += model.c_mn(m, n).unwrap() * (-(rate_n * ct.t1() + rate_m * (ct.t2() - ct.t1()))).exp();
            }
        }
        let via_gamma = model.gamma_coeff(0, &ct).unwrap() * PI * s.rho * s.rho;
        assert_relative_eq!(via_gamma, via_c, max_relative = 1e-12);
        // identical to the conditional survival after the receiver
        assert_relative_eq!(model.conditional_survival(5.0, &ct), via_c, max_relative = 1e-12);
        assert!(model.gamma_coeff(11, &ct).is_err());
        for l in 0..=10 {
            assert!(model.gamma_coeff(l, &ct).unwrap().is_finite());
        }
    }

    #[test]
    fn absorbing_wall_in_period_two() {
        let model = ex2(Truncation::default());
        let ct = CrossingTimes::nominal(model.scenario()).unwrap();
        for frac in [0.0, 0.3, 0.9] {
            let t = ct.t1() + frac * (ct.t2() - ct.t1());
            let wall = model.radial_concentration(model.scenario().rho, t, &ct).unwrap();
            assert_abs_diff_eq!(wall, 0.0, epsilon = 1e-14);
        }
        assert!(model.radial_concentration(10.5, 0.5, &ct).is_err());
        assert!(model.radial_concentration(-0.1, 0.5, &ct).is_err());
    }

    #[test]
    fn survival_plateaus() {
        let model = ex2(Truncation::default());
        let ct = CrossingTimes::nominal(model.scenario()).unwrap();
        let before = model.conditional_survival(0.0, &ct);
        assert_eq!(model.conditional_survival(0.5 * ct.t1(), &ct), before);
        assert_eq!(model.conditional_survival(ct.t1(), &ct), before);
        let after = model.conditional_survival(ct.t2(), &ct);
        assert_eq!(model.conditional_survival(ct.t2() + 1.0, &ct), after);
        let span = ct.t2() - ct.t1();
        assert!(
            model.conditional_survival(ct.t1() + 0.6 * span, &ct)
                <= model.conditional_survival(ct.t1() + 0.3 * span, &ct)
        );
        assert!(after < before);
    }

    #[test]
    fn theta_and_emission_linearity() {
        let model = ex2(Truncation::default());
        let ct = CrossingTimes::nominal(model.scenario()).unwrap();
        let a = model.concentration(3.0, 0.0, 1900.0, 0.95, &ct).unwrap();
        let b = model.concentration(3.0, PI, 1900.0, 0.95, &ct).unwrap();
        assert_eq!(a, b);
        let doubled = SeriesModel::new(
            Scenario {
                n_emit: 2 * model.scenario().n_emit,
                ..*model.scenario()
            },
            model.truncation(),
        )
        .unwrap();
        assert_eq!(doubled.concentration(3.0, 0.0, 1900.0, 0.95, &ct).unwrap(), 2.0 * a);
    }
}
