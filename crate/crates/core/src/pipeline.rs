//! Theory against simulation, end to end.

use serde::Serialize;

use crate::analytic::{arrival_probability, uniform_grid, ResponseCurve, ResponseOptions, SeriesModel, Truncation};
use crate::error::Result;
use crate::mcsim::{run_ensemble, EnsembleResult, SimConfig};
use crate::metrics::{align, align_curves, nmse, nrmse, rmse, CurvePair};
use crate::scenario::{reynolds, peclet, validate_regime, ReferenceCase, RegimeReport, Scenario, REFERENCE_CASES};

/// Allowed distance from the reference NRMSE in a reproduced row.
pub const NRMSE_TOLERANCE: f64 = 0.05;
/// Allowed distance from the reference Péclet number (printed to 4 decimals).
pub const PECLET_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scores {
    pub rmse: f64,
    pub nmse: f64,
    pub nrmse: f64,
    pub n_samples: usize,
}

impl Scores {
    pub fn of(pair: &CurvePair) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pair),
            nmse: nmse(pair)?,
            nrmse: nrmse(pair)?,
            n_samples: pair.len(),
        })
    }
}

/// `R(t)` on `{k · grid_step}` up to `horizon`.
pub fn theory_curve(
    s: &Scenario,
    trunc: Truncation,
    horizon: f64,
    grid_step: f64,
    opts: &ResponseOptions,
) -> Result<ResponseCurve> {
    let model = SeriesModel::new(*s, trunc)?;
    arrival_probability(&model, &uniform_grid(horizon, grid_step)?, opts)
}

#[derive(Debug, Clone)]
pub struct Validation {
    pub regime: RegimeReport,
    pub theory: ResponseCurve,
    pub simulation: EnsembleResult,
    pub scores: Scores,
}

/// Runs the series model and the simulator on the same scenario and scores
/// the arrival-probability curves.
pub fn validate(
    s: &Scenario,
    trunc: Truncation,
    sim: &SimConfig,
    grid_step: f64,
    pe_threshold: f64,
    opts: &ResponseOptions,
) -> Result<Validation> {
    let regime = validate_regime(s, pe_threshold)?;
    sim.validate()?;
    let theory = theory_curve(s, trunc, sim.horizon, grid_step, opts)?;
    let simulation = run_ensemble(s, sim)?;
    let scores = Scores::of(&align(&theory, &simulation, grid_step)?)?;
    Ok(Validation {
        regime,
        theory,
        simulation,
        scores,
    })
}

/// Theory scored against itself; a check of the comparison plumbing.
pub fn self_validate(
    s: &Scenario,
    trunc: Truncation,
    horizon: f64,
    grid_step: f64,
    opts: &ResponseOptions,
) -> Result<Scores> {
    let theory = theory_curve(s, trunc, horizon, grid_step, opts)?;
    Scores::of(&align_curves(&theory, &theory, horizon, grid_step)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Row {
    pub example_id: u32,
    pub reynolds: f64,
    pub reynolds_ref: f64,
    pub peclet: f64,
    pub peclet_ref: f64,
    pub nrmse_ref: f64,
    /// `None` if the example could not be computed.
    pub scores: Option<Scores>,
    pub final_absorbed_fraction: Option<f64>,
    pub theory_at_horizon: Option<f64>,
    pub failures: Vec<String>,
}

impl Table2Row {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Min, max, mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Table2Report {
    pub rows: Vec<Table2Row>,
    pub validations: Vec<Option<Validation>>,
}

impl Table2Report {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(Table2Row::passed)
    }

    fn collect(&self, f: impl Fn(&Scores) -> f64) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.scores.as_ref().map(&f)).collect()
    }

    pub fn nrmse_summary(&self) -> Option<Summary> {
        Summary::of(&self.collect(|s| s.nrmse))
    }

    pub fn rmse_summary(&self) -> Option<Summary> {
        Summary::of(&self.collect(|s| s.rmse))
    }
}

fn check_row(case: &ReferenceCase, s: &Scenario, outcome: &Result<Validation>) -> Table2Row {
    let re = reynolds(s);
    let pe = peclet(s);
    let mut failures = Vec::new();
    if (re - case.reynolds).abs() > 1e-12 * case.reynolds {
        failures.push(format!("Re {re} differs from {}", case.reynolds));
    }
    if (pe - case.peclet).abs() > PECLET_TOLERANCE {
        failures.push(format!("Pe {pe} differs from {}", case.peclet));
    }
    let (scores, absorbed, theory_end) = match outcome {
        Ok(v) => {
            if (v.scores.nrmse - case.nrmse).abs() > NRMSE_TOLERANCE {
                failures.push(format!(
                    "NRMSE {:.4} outside {} ± {NRMSE_TOLERANCE}",
                    v.scores.nrmse, case.nrmse
                ));
            }
            (
                Some(v.scores),
                Some(v.simulation.final_absorbed_fraction()),
                v.theory.values.last().copied(),
            )
        }
        Err(e) => {
            failures.push(e.to_string());
            (None, None, None)
        }
    };
    Table2Row {
        example_id: case.id,
        reynolds: re,
        reynolds_ref: case.reynolds,
        peclet: pe,
        peclet_ref: case.peclet,
        nrmse_ref: case.nrmse,
        scores,
        final_absorbed_fraction: absorbed,
        theory_at_horizon: theory_end,
        failures,
    }
}

/// All six reference examples. A failing example is recorded in its row and
/// does not stop the others.
pub fn reproduce_table2(
    trunc: Truncation,
    sim: &SimConfig,
    grid_step: f64,
    pe_threshold: f64,
    opts: &ResponseOptions,
) -> Table2Report {
    let mut rows = Vec::new();
    let mut validations = Vec::new();
    for case in &REFERENCE_CASES {
        let s = case.scenario();
        let outcome = validate(&s, trunc, sim, grid_step, pe_threshold, opts);
        rows.push(check_row(case, &s, &outcome));
        validations.push(outcome.ok());
    }
    Table2Report { rows, validations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{reference_case, DEFAULT_PECLET_THRESHOLD};

    #[test]
    fn self_validation_is_perfect() {
        let s = reference_case(2).unwrap().scenario();
        let sc = self_validate(&s, Truncation::default(), 3.5, 0.01, &ResponseOptions::default()).unwrap();
        assert_eq!(sc.nrmse, 1.0);
        assert_eq!(sc.nmse, 1.0);
        assert_eq!(sc.rmse, 0.0);
        assert_eq!(sc.n_samples, 351);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean), (1.0, 3.0, 2.0));
        assert!((s.std - 1.0).abs() < 1e-15);
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn row_checks_flag_failures() {
        let case = reference_case(1).unwrap();
        let s = case.scenario();
        let failed: Result<Validation> = Err(crate::Error::UndefinedMetric("test"));
        let row = check_row(case, &s, &failed);
        assert!(!row.passed());
        assert_eq!(row.failures.len(), 1);
        assert_eq!(row.reynolds, row.reynolds_ref);
    }

    #[test]
    fn small_validation_runs() {
        let s = reference_case(3).unwrap().scenario();
        let sim = SimConfig {
            dt: 1e-4,
            n_molecules: 300,
            replications: 2,
            seed: 5,
            ..SimConfig::default()
        };
        let v = validate(&s, Truncation::default(), &sim, 0.01, DEFAULT_PECLET_THRESHOLD, &ResponseOptions::default())
            .unwrap();
        assert_eq!(v.scores.n_samples, 351);
        assert!(v.scores.nrmse > 0.0 && v.scores.nrmse <= 1.0);
        assert!(v.regime.flow_dominated);
    }
}
