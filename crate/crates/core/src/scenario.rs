//! Physical scenario: tube, flow, diffusion, receiver placement.
//!
//! Units are fixed throughout the crate: lengths in µm, times in s,
//! velocities in µm/s, diffusivities and kinematic viscosity in µm²/s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::InverseGaussianParams;

/// Kinematic viscosity of water, µm²/s.
pub const WATER_KINEMATIC_VISCOSITY: f64 = 1e6;

/// Laminar flow below this Reynolds number.
pub const LAMINAR_REYNOLDS_LIMIT: f64 = 2000.0;

pub const DEFAULT_PECLET_THRESHOLD: f64 = 10.0;

fn default_kin_visc() -> f64 {
    WATER_KINEMATIC_VISCOSITY
}

fn default_n_emit() -> u64 {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Tube radius.
    pub rho: f64,
    /// Axial flow velocity.
    pub v: f64,
    /// Diffusion coefficient.
    pub d_coef: f64,
    /// Transmitter to receiver start.
    pub d1: f64,
    /// Receiver end.
    pub d2: f64,
    #[serde(default = "default_n_emit")]
    pub n_emit: u64,
    #[serde(default = "default_kin_visc")]
    pub kin_visc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub reynolds: f64,
    pub peclet: f64,
    pub laminar: bool,
    pub flow_dominated: bool,
}

impl std::fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Re={} Pe={} laminar={} flow_dominated={}",
            round_sig(self.reynolds, 6),
            round_sig(self.peclet, 6),
            self.laminar,
            self.flow_dominated
        )
    }
}

pub(crate) fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

impl Scenario {
    /// A scenario with `N_e = 1000` and water viscosity.
    pub fn new(rho: f64, v: f64, d_coef: f64, d1: f64, d2: f64) -> Self {
        Self {
            rho,
            v,
            d_coef,
            d1,
            d2,
            n_emit: default_n_emit(),
            kin_visc: WATER_KINEMATIC_VISCOSITY,
        }
    }

    /// Lists every violated invariant; empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                out.push(msg);
            }
        };
        need(self.rho.is_finite() && self.rho > 0.0, format!("rho = {} must be > 0", self.rho));
        need(self.v.is_finite() && self.v > 0.0, format!("v = {} must be > 0", self.v));
        need(
            self.d_coef.is_finite() && self.d_coef > 0.0,
            format!("d_coef = {} must be > 0", self.d_coef),
        );
        need(self.d1.is_finite() && self.d1 > 0.0, format!("d1 = {} must be > 0", self.d1));
        need(
            self.d2.is_finite() && self.d2 > self.d1,
            format!("d2 = {} must exceed d1 = {}", self.d2, self.d1),
        );
        need(self.n_emit >= 1, "n_emit must be >= 1".to_owned());
        need(
            self.kin_visc.is_finite() && self.kin_visc > 0.0,
            format!("kin_visc = {} must be > 0", self.kin_visc),
        );
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn receiver_length(&self) -> f64 {
        self.d2 - self.d1
    }

    /// Law of `T1`, the first passage through the plane `z = d1`.
    pub fn t1_law(&self) -> Result<InverseGaussianParams> {
        InverseGaussianParams::first_passage(self.d1, self.v, self.d_coef)
    }

    /// Law of `T2 - T1`, the transit time across the receiver.
    pub fn transit_law(&self) -> Result<InverseGaussianParams> {
        InverseGaussianParams::first_passage(self.receiver_length(), self.v, self.d_coef)
    }
}

/// `Re = rho v / nu`.
pub fn reynolds(s: &Scenario) -> f64 {
    s.rho * s.v / s.kin_visc
}

/// `Pe = rho v / D`.
pub fn peclet(s: &Scenario) -> f64 {
    s.rho * s.v / s.d_coef
}

/// Flow-regime flags. Only an invalid scenario is an error; callers decide
/// whether a turbulent or diffusion-dominated report is fatal.
/// The Péclet comparison is inclusive.
pub fn validate_regime(s: &Scenario, pe_threshold: f64) -> Result<RegimeReport> {
    let mut violations = s.violations();
    if !(pe_threshold.is_finite() && pe_threshold > 0.0) {
        violations.push(format!("pe_threshold = {pe_threshold} must be > 0"));
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let re = reynolds(s);
    let pe = peclet(s);
    Ok(RegimeReport {
        reynolds: re,
        peclet: pe,
        laminar: re < LAMINAR_REYNOLDS_LIMIT,
        flow_dominated: pe >= pe_threshold,
    })
}

/// One row of the reference parameter table, with its printed outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCase {
    pub id: u32,
    pub rho: f64,
    pub v: f64,
    pub d_coef: f64,
    pub d1: f64,
    pub reynolds: f64,
    pub peclet: f64,
    pub nrmse: f64,
}

/// Receiver length shared by every reference case, µm.
pub const REFERENCE_RECEIVER_LENGTH: f64 = 20.0;

pub const REFERENCE_CASES: [ReferenceCase; 6] = [
    ReferenceCase { id: 1, rho: 10.0, v: 1000.0, d_coef: 700.0, d1: 2000.0, reynolds: 0.01, peclet: 14.2857, nrmse: 0.9824 },
    ReferenceCase { id: 2, rho: 10.0, v: 2000.0, d_coef: 400.0, d1: 2000.0, reynolds: 0.02, peclet: 50.0, nrmse: 0.9610 },
    ReferenceCase { id: 3, rho: 10.0, v: 3000.0, d_coef: 100.0, d1: 2000.0, reynolds: 0.03, peclet: 300.0, nrmse: 0.9848 },
    ReferenceCase { id: 4, rho: 20.0, v: 1000.0, d_coef: 700.0, d1: 3000.0, reynolds: 0.02, peclet: 28.5714, nrmse: 0.9488 },
    ReferenceCase { id: 5, rho: 20.0, v: 2000.0, d_coef: 400.0, d1: 3000.0, reynolds: 0.04, peclet: 100.0, nrmse: 0.9518 },
    ReferenceCase { id: 6, rho: 20.0, v: 3000.0, d_coef: 100.0, d1: 3000.0, reynolds: 0.06, peclet: 600.0, nrmse: 0.9600 },
];

impl ReferenceCase {
    pub fn scenario(&self) -> Scenario {
        Scenario::new(
            self.rho,
            self.v,
            self.d_coef,
            self.d1,
            self.d1 + REFERENCE_RECEIVER_LENGTH,
        )
    }
}

/// Reference case by its 1-based id.
pub fn reference_case(id: u32) -> Option<&'static ReferenceCase> {
    REFERENCE_CASES.iter().find(|c| c.id == id)
}
