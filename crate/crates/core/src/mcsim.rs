//! Particle-based Brownian dynamics in the tube.
//!
//! Molecules start on the axis at `z = 0` and take Euler–Maruyama steps:
//! independent `N(0, 2 D dt)` kicks in `x`, `y`, `z` plus drift `v dt` along
//! the axis. After each step a particle outside the wall is absorbed if its
//! new `z` lies in `[d1, d2)`, otherwise it is reflected radially
//! (`r -> 2ρ - r`, angle kept). Detection happens at step ends only.
//!
//! Every particle draws from its own ChaCha8 stream keyed by
//! `(seed, replication, particle)`, so results are bit-identical however the
//! work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ResponseCurve, ResponseKind};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Time step, s.
    pub dt: f64,
    /// Simulated duration, s.
    pub horizon: f64,
    /// Molecules per replication.
    pub n_molecules: usize,
    pub replications: usize,
    pub seed: u64,
    /// Width of the rate-histogram bins and spacing of the empirical CDF grid, s.
    pub bin_width: f64,
    /// Particles past this `z` (µm) leave the simulated tube for good.
    pub tube_length: f64,
    /// Particles further downstream than `d2 + early_exit_sigma * sqrt(2 D (horizon - t))`
    /// are retired early; 0 disables.
    pub early_exit_sigma: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-5,
            horizon: 3.5,
            n_molecules: 1000,
            replications: 100,
            seed: 0,
            bin_width: 0.01,
            tube_length: 3500.0,
            early_exit_sigma: 10.0,
        }
    }
}

impl SimConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            out.push(format!("dt = {} must be > 0", self.dt));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            out.push(format!("horizon = {} must be >= dt", self.horizon));
        }
        if !(self.bin_width >= self.dt && self.bin_width.is_finite()) {
            out.push(format!("bin_width = {} must be >= dt", self.bin_width));
        }
        if self.n_molecules == 0 {
            out.push("n_molecules must be >= 1".to_owned());
        }
        if self.replications == 0 {
            out.push("replications must be >= 1".to_owned());
        }
        if !(self.tube_length > 0.0) {
            out.push(format!("tube_length = {} must be > 0", self.tube_length));
        }
        if !(self.early_exit_sigma >= 0.0) {
            out.push(format!("early_exit_sigma = {} must be >= 0", self.early_exit_sigma));
        }
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

    pub fn n_steps(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }

    pub fn total_molecules(&self) -> usize {
        self.n_molecules * self.replications
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    Alive,
    Absorbed(f64),
    Exited(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub status: Status,
}

impl ParticleState {
    /// On the axis at the transmitter plane.
    pub fn released() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 0.0,
            status: Status::Alive,
        }
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Per-scenario constants of the update rule.
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    sigma: f64,
    drift: f64,
    rho: f64,
    d1: f64,
    d2: f64,
}

impl Stepper {
    pub fn new(s: &Scenario, dt: f64) -> Self {
        Self {
            sigma: (2.0 * s.d_coef * dt).sqrt(),
            drift: s.v * dt,
            rho: s.rho,
            d1: s.d1,
            d2: s.d2,
        }
    }

    /// One Euler–Maruyama step ending at `t_end`, followed by wall handling.
    /// Returns `true` if the overshoot was so large (beyond `2ρ`) that the
    /// particle had to be clamped onto the wall.
    pub fn advance<R: Rng + ?Sized>(&self, p: &mut ParticleState, t_end: f64, rng: &mut R) -> bool {
        debug_assert!(matches!(p.status, Status::Alive));
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        let nz: f64 = rng.sample(StandardNormal);
        p.x += self.sigma * nx;
        p.y += self.sigma * ny;
        p.z += self.drift + self.sigma * nz;
        self.apply_wall(p, t_end)
    }

    /// Absorb or reflect a particle that has left the cross-section.
    pub fn apply_wall(&self, p: &mut ParticleState, t_end: f64) -> bool {
        let r2 = p.x * p.x + p.y * p.y;
        if r2 <= self.rho * self.rho {
            return false;
        }
        if p.z >= self.d1 && p.z < self.d2 {
            p.status = Status::Absorbed(t_end);
            return false;
        }
        let r = r2.sqrt();
        let mut reflected = 2.0 * self.rho - r;
        let clamped = reflected < 0.0;
        if clamped {
            reflected = self.rho;
        }
        let scale = reflected / r;
        p.x *= scale;
        p.y *= scale;
        clamped
    }
}

/// Spec-level single step: `p` advanced by `dt` to time `t_end`.
pub fn step<R: Rng + ?Sized>(
    p: ParticleState,
    s: &Scenario,
    dt: f64,
    t_end: f64,
    rng: &mut R,
) -> ParticleState {
    let mut next = p;
    if matches!(next.status, Status::Alive) {
        Stepper::new(s, dt).advance(&mut next, t_end, rng);
    }
    next
}

/// Stream for one particle of one replication.
pub fn particle_rng(seed: u64, replication: u64, particle: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replication.to_le_bytes());
    key[16..24].copy_from_slice(b"ringtube");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(particle);
    rng
}

/// Outcome of one replication; times are kept as step indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub n_molecules: usize,
    /// Step index (time = step · dt) of each absorption, in particle order.
    pub absorption_steps: Vec<u64>,
    pub exit_steps: Vec<u64>,
    /// Particles whose reflection overshot past the axis and were clamped.
    pub overshoot_clamps: u64,
}

impl ReplicationRecord {
    pub fn absorbed(&self) -> usize {
        self.absorption_steps.len()
    }

    pub fn exited(&self) -> usize {
        self.exit_steps.len()
    }

    pub fn alive(&self) -> usize {
        self.n_molecules - self.absorbed() - self.exited()
    }

    pub fn absorbed_fraction(&self) -> f64 {
        self.absorbed() as f64 / self.n_molecules as f64
    }
}

enum Fate {
    Absorbed(u64),
    Exited(u64),
    Alive,
}

fn simulate_particle(
    stepper: &Stepper,
    s: &Scenario,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
    clamps: &mut u64,
) -> Fate {
    let n_steps = cfg.n_steps();
    let mut p = ParticleState::released();
    let exit_scale = cfg.early_exit_sigma * (2.0 * s.d_coef).sqrt();
    for k in 1..=n_steps {
        let t_end = k as f64 * cfg.dt;
        if stepper.advance(&mut p, t_end, rng) {
            *clamps += 1;
        }
        if let Status::Absorbed(_) = p.status {
            return Fate::Absorbed(k);
        }
        if p.z > cfg.tube_length {
            return Fate::Exited(k);
        }
        if cfg.early_exit_sigma > 0.0 && p.z > s.d2 {
            let margin = exit_scale * (cfg.horizon - t_end).max(0.0).sqrt();
            if p.z > s.d2 + margin {
                return Fate::Exited(k);
            }
        }
    }
    Fate::Alive
}

/// Simulates `cfg.n_molecules` particles for one replication.
pub fn run_replication(s: &Scenario, cfg: &SimConfig, replication: usize) -> Result<ReplicationRecord> {
    cfg.validate()?;
    let stepper = Stepper::new(s, cfg.dt);
    let mut record = ReplicationRecord {
        replication,
        n_molecules: cfg.n_molecules,
        absorption_steps: Vec::new(),
        exit_steps: Vec::new(),
        overshoot_clamps: 0,
    };
    for i in 0..cfg.n_molecules {
        let mut rng = particle_rng(cfg.seed, replication as u64, i as u64);
        match simulate_particle(&stepper, s, cfg, &mut rng, &mut record.overshoot_clamps) {
            Fate::Absorbed(k) => record.absorption_steps.push(k),
            Fate::Exited(k) => record.exit_steps.push(k),
            Fate::Alive => {}
        }
    }
    Ok(record)
}

/// Aggregated Monte Carlo outcome over all replications.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub config: SimConfig,
    pub replications: Vec<ReplicationRecord>,
    /// Fraction absorbed by `t` on `{k · bin_width}`.
    pub empirical_cdf: ResponseCurve,
    /// `(bin start, absorbed in (start, start + bin_width] per molecule)`.
    pub rate_histogram: Vec<(f64, f64)>,
}

impl EnsembleResult {
    fn from_records(cfg: SimConfig, replications: Vec<ReplicationRecord>) -> Result<Self> {
        let total = cfg.total_molecules() as f64;
        let mut steps: Vec<u64> = replications
            .iter()
            .flat_map(|r| r.absorption_steps.iter().copied())
            .collect();
        steps.sort_unstable();
        let n_bins = ((cfg.horizon / cfg.bin_width) - 1e-9).ceil().max(1.0) as usize;
        let counts: Vec<usize> = (0..=n_bins)
            .map(|k| {
                let threshold = (k as f64 * cfg.bin_width / cfg.dt + 1e-9).floor() as u64;
                steps.partition_point(|&s| s <= threshold)
            })
            .collect();
        let times = (0..=n_bins).map(|k| k as f64 * cfg.bin_width).collect();
        let values = counts.iter().map(|&c| c as f64 / total).collect();
        let empirical_cdf = ResponseCurve::new(times, values, ResponseKind::ArrivalProbability)?;
        let rate_histogram = counts
            .windows(2)
            .enumerate()
            .map(|(k, w)| (k as f64 * cfg.bin_width, (w[1] - w[0]) as f64 / total))
            .collect();
        Ok(Self {
            config: cfg,
            replications,
            empirical_cdf,
            rate_histogram,
        })
    }

    pub fn total_molecules(&self) -> usize {
        self.config.total_molecules()
    }

    pub fn absorbed(&self) -> usize {
        self.replications.iter().map(|r| r.absorbed()).sum()
    }

    pub fn exited(&self) -> usize {
        self.replications.iter().map(|r| r.exited()).sum()
    }

    pub fn final_absorbed_fraction(&self) -> f64 {
        self.absorbed() as f64 / self.total_molecules() as f64
    }

    /// Absorption times in seconds, all replications.
    pub fn absorption_times(&self) -> Vec<f64> {
        let dt = self.config.dt;
        self.replications
            .iter()
            .flat_map(|r| r.absorption_steps.iter().map(move |&k| k as f64 * dt))
            .collect()
    }

    /// `(absorbed, exited, alive)` counts at time `t`.
    pub fn census(&self, t: f64) -> (usize, usize, usize) {
        let k = (t / self.config.dt + 1e-9).floor() as u64;
        let absorbed = self
            .replications
            .iter()
            .map(|r| r.absorption_steps.iter().filter(|&&s| s <= k).count())
            .sum::<usize>();
        let exited = self
            .replications
            .iter()
            .map(|r| r.exit_steps.iter().filter(|&&s| s <= k).count())
            .sum::<usize>();
        (absorbed, exited, self.total_molecules() - absorbed - exited)
    }

    pub fn overshoot_clamps(&self) -> u64 {
        self.replications.iter().map(|r| r.overshoot_clamps).sum()
    }
}

/// All replications, merged in replication order.
pub fn run_ensemble(s: &Scenario, cfg: &SimConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let records = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_replication(s, cfg, rep))
        .collect::<Result<Vec<_>>>()?;
    EnsembleResult::from_records(*cfg, records)
}

/// First time each of `n` free particles (no receiver) reaches the plane
/// `z = level`, or `None` if it does not within `max_time`.
pub fn first_passage_times(
    s: &Scenario,
    dt: f64,
    level: f64,
    n: usize,
    max_time: f64,
    seed: u64,
) -> Vec<Option<f64>> {
    let free = Scenario { d2: s.d1, ..*s };
    let stepper = Stepper::new(&free, dt);
    let max_steps = (max_time / dt).ceil() as u64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = particle_rng(seed, u64::MAX, i as u64);
            let mut p = ParticleState::released();
            for k in 1..=max_steps {
                let t_end = k as f64 * dt;
                stepper.advance(&mut p, t_end, &mut rng);
                if p.z >= level {
                    return Some(t_end);
                }
            }
            None
        })
        .collect()
}
