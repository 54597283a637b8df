//! Run configuration: a TOML file overlaid with command-line flags.
//!
//! ```toml
//! seed = 1
//! grid_step = 0.01
//! example_id = 2          # or a [scenario] table
//! pe_threshold = 10.0
//! quad_tol = 1e-8
//!
//! [scenario]
//! rho = 10.0
//! v = 2000.0
//! d_coef = 400.0
//! d1 = 2000.0
//! d2 = 2020.0
//!
//! [sim]
//! dt = 1e-5
//! horizon = 3.5
//! n_molecules = 1000
//! replications = 100
//! bin_width = 0.01
//! tube_length = 3500.0
//! early_exit_sigma = 10.0
//!
//! [trunc]
//! m_max = 10
//! n_max = 10
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ringtube_core::analytic::ResponseOptions;
use ringtube_core::scenario::{reference_case, DEFAULT_PECLET_THRESHOLD};
use ringtube_core::{Scenario, SimConfig, Truncation};

use crate::{CommonArgs, Failure};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    grid_step: Option<f64>,
    example_id: Option<u32>,
    pe_threshold: Option<f64>,
    quad_tol: Option<f64>,
    scenario: Option<Scenario>,
    #[serde(default)]
    sim: SimSection,
    trunc: Option<TruncSection>,
}

/// `[sim]` without a seed; the seed lives at the top level only.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSection {
    dt: Option<f64>,
    horizon: Option<f64>,
    n_molecules: Option<usize>,
    replications: Option<usize>,
    bin_width: Option<f64>,
    tube_length: Option<f64>,
    early_exit_sigma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncSection {
    m_max: usize,
    n_max: usize,
    l_max: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub example_id: Option<u32>,
    pub sim: SimConfig,
    pub trunc: Truncation,
    pub grid_step: f64,
    pub pe_threshold: f64,
    pub quad_tol: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn response_options(&self) -> ResponseOptions {
        ResponseOptions::with_tol(self.quad_tol)
    }

    pub fn require_scenario(&self) -> Result<Scenario, Failure> {
        self.scenario.ok_or_else(|| {
            Failure::Usage("no scenario: give a [scenario] table, example_id, or --example".into())
        })
    }

    pub fn label(&self) -> String {
        match self.example_id {
            Some(id) => format!("ex{id}"),
            None => "custom".to_owned(),
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_trunc(arg: &str) -> Result<Truncation, String> {
    let (m, n) = arg
        .split_once(',')
        .ok_or_else(|| format!("expected M,N, got `{arg}`"))?;
    let m = m.trim().parse().map_err(|e| format!("bad M in `{arg}`: {e}"))?;
    let n = n.trim().parse().map_err(|e| format!("bad N in `{arg}`: {e}"))?;
    Ok(Truncation::new(m, n))
}

pub fn resolve(args: &CommonArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(p) => read_file(p)?,
        None => FileConfig::default(),
    };
    let example_id = args.example.or(file.example_id);
    let scenario = match (file.scenario, example_id) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage("give either [scenario] or example_id, not both".into()))
        }
        (Some(s), None) => Some(s),
        (None, Some(id)) => Some(
            reference_case(id)
                .ok_or_else(|| Failure::Usage(format!("no example {id}; valid ids are 1..=6")))?
                .scenario(),
        ),
        (None, None) => None,
    };

    let d = SimConfig::default();
    let sec = file.sim;
    let mut sim = SimConfig {
        dt: sec.dt.unwrap_or(d.dt),
        horizon: sec.horizon.unwrap_or(d.horizon),
        n_molecules: sec.n_molecules.unwrap_or(d.n_molecules),
        replications: sec.replications.unwrap_or(d.replications),
        seed: file.seed.unwrap_or(d.seed),
        bin_width: sec.bin_width.unwrap_or(d.bin_width),
        tube_length: sec.tube_length.unwrap_or(d.tube_length),
        early_exit_sigma: sec.early_exit_sigma.unwrap_or(d.early_exit_sigma),
    };
    if let Some(seed) = args.seed {
        sim.seed = seed;
    }
    if let Some(dt) = args.dt {
        sim.dt = dt;
    }
    if let Some(r) = args.replications {
        sim.replications = r;
    }
    if args.no_early_exit {
        sim.early_exit_sigma = 0.0;
    }

    let mut trunc = match file.trunc {
        Some(t) => Truncation {
            m_max: t.m_max,
            n_max: t.n_max,
            l_max: t.l_max.unwrap_or(t.n_max),
        },
        None => Truncation::default(),
    };
    if let Some(t) = args.trunc {
        trunc = t;
    }

    let cfg = RunConfig {
        scenario,
        example_id,
        sim,
        trunc,
        grid_step: args.grid_step.or(file.grid_step).unwrap_or(0.01),
        pe_threshold: file.pe_threshold.unwrap_or(DEFAULT_PECLET_THRESHOLD),
        quad_tol: file.quad_tol.unwrap_or(1e-8),
        output_dir: args.out.clone(),
    };
    check(&cfg)?;
    Ok(cfg)
}

fn check(cfg: &RunConfig) -> Result<(), Failure> {
    let mut problems = Vec::new();
    if let Some(s) = &cfg.scenario {
        problems.extend(s.violations());
    }
    problems.extend(cfg.sim.violations());
    if !(cfg.sim.horizon > 0.0) {
        problems.push(format!("horizon = {} must be > 0", cfg.sim.horizon));
    }
    if cfg.trunc.m_max == 0 {
        problems.push("trunc m_max must be >= 1".into());
    }
    if !(cfg.grid_step > 0.0 && cfg.grid_step.is_finite()) {
        problems.push(format!("grid_step = {} must be > 0", cfg.grid_step));
    } else if cfg.grid_step > cfg.sim.horizon {
        problems.push(format!("grid_step = {} exceeds the horizon", cfg.grid_step));
    }
    if !(cfg.pe_threshold > 0.0) {
        problems.push(format!("pe_threshold = {} must be > 0", cfg.pe_threshold));
    }
    if !(cfg.quad_tol > 0.0) {
        problems.push(format!("quad_tol = {} must be > 0", cfg.quad_tol));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(problems.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trunc_flag() {
        assert_eq!(parse_trunc("20, 5").unwrap(), Truncation::new(20, 5));
        assert!(parse_trunc("20").is_err());
        assert!(parse_trunc("a,1").is_err());
    }

    #[test]
    fn file_format() {
        let text = r#"
            seed = 3
            example_id = 2
            [sim]
            dt = 1e-4
            replications = 4
            [trunc]
            m_max = 12
            n_max = 8
        "#;
        let f: FileConfig = toml::from_str(text).unwrap();
        assert_eq!(f.seed, Some(3));
        assert_eq!(f.sim.dt, Some(1e-4));
        assert_eq!(f.trunc.unwrap().l_max, None);
        assert!(toml::from_str::<FileConfig>("[sim]\nseed = 1\n").is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1\n").is_err());
    }
}
