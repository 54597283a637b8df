//! Mode-sum identities, mass conservation and projection checks for the
//! Bessel-series model.

use std::f64::consts::PI;

use ringtube_core::analytic::{
    arrival_probability, axial_concentration, uniform_grid, CrossingTimes, ResponseOptions,
};
use ringtube_core::quadrature::Quadrature;
use ringtube_core::scenario::reference_case;
use ringtube_core::{SeriesModel, Truncation};

fn model(id: u32, m: usize, n: usize) -> SeriesModel {
    SeriesModel::new(reference_case(id).unwrap().scenario(), Truncation::new(m, n)).unwrap()
}

#[test]
fn mode_sums_over_j0_zeros() {
    // Σ_{m≤500} c_{m,n}, 20-digit reference values
    let reference = [
        0.999_189_84,
        0.002_011_537_7,
        -0.002_699_523_3,
        0.003_244_531_8,
        -0.003_710_321,
        0.004_123_850_2,
    ];
    let m = model(2, 2000, 5);
    for (n, want) in reference.into_iter().enumerate() {
        let partial = |upto: usize| (1..=upto).map(|k| m.c_mn(k, n).unwrap()).sum::<f64>();
        let s500 = partial(500);
        assert!((s500 - want).abs() < 1e-8, "n = {n}: {s500} vs {want}");
        // the remainder decays like 4 / (π² M J0(j_{1,n})), towards δ_{n,0}
        let limit = if n == 0 { 1.0 } else { 0.0 };
        let r500 = s500 - limit;
        let r2000 = partial(2000) - limit;
        assert!((r500 / r2000 - 4.0).abs() < 0.01, "n = {n}: {r500} / {r2000}");
    }
}

#[test]
fn survival_is_one_before_the_receiver() {
    let m = model(2, 500, 10);
    let ct = CrossingTimes::new(1.0, 1.01).unwrap();
    for t in [0.0, 0.3, 0.999, 1.0] {
        let s = m.conditional_survival(t, &ct);
        assert!((0.998..=1.002).contains(&s), "t = {t}: {s}");
    }
}

#[test]
fn period_one_disk_mass() {
    let m = model(2, 10, 10);
    let ct = CrossingTimes::nominal(m.scenario()).unwrap();
    let rho = m.scenario().rho;
    let q = Quadrature::with_tol(1e-13);
    for t in [1e-3, 0.01, 0.2, 0.9] {
        let mass = q
            .integrate(|r| 2.0 * PI * r * m.radial_concentration(r, t, &ct).unwrap(), 0.0, rho)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-10, "t = {t}: {mass}");
    }
}

#[test]
fn axial_gaussian_mass() {
    let s = reference_case(5).unwrap().scenario();
    let q = Quadrature::with_tol(1e-13);
    for t in [0.05, 0.5, 1.4] {
        let centre = s.v * t;
        let width = 40.0 * (2.0 * s.d_coef * t).sqrt();
        let mass = q
            .integrate(|z| axial_concentration(&s, z, t).unwrap(), centre - width, centre + width)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-10, "t = {t}: {mass}");
    }
}

#[test]
fn full_concentration_counts_every_molecule() {
    let m = model(1, 10, 10);
    let s = *m.scenario();
    let ct = CrossingTimes::nominal(&s).unwrap();
    let t = 0.5 * ct.t1();
    let n_emit = s.n_emit as f64;
    let q = Quadrature::with_tol(1e-10);
    let centre = s.v * t;
    let width = 40.0 * (2.0 * s.d_coef * t).sqrt();
    let total = q
        .integrate(
            |theta| {
                q.integrate(
                    |r| {
                        q.integrate(
                            |z| r * m.concentration(r, theta, z, t, &ct).unwrap(),
                            centre - width,
                            centre + width,
                        )
                        .unwrap()
                        .value
                    },
                    0.0,
                    s.rho,
                )
                .unwrap()
                .value
            },
            0.0,
            2.0 * PI,
        )
        .unwrap()
        .value;
    assert!((total - n_emit).abs() < 1e-6 * n_emit, "{total}");
}

/// Relative L² (disk-weighted) distance between two radial profiles.
fn l2_gap(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, rho: f64) -> f64 {
    let q = Quadrature::with_tol(1e-10);
    let diff = q.integrate(|r| r * (f(r) - g(r)).powi(2), 0.0, rho).unwrap().value;
    let norm = q.integrate(|r| r * g(r).powi(2), 0.0, rho).unwrap().value;
    (diff / norm).sqrt()
}

#[test]
fn beta_projection_reconstructs_profile_at_t1() {
    // absorbing modes vanish on the wall while the profile does not, so the
    // projection converges only in L², slowly
    let ct = CrossingTimes::new(0.002, 0.05).unwrap();
    let mut last = f64::INFINITY;
    for m_max in [20, 80, 320] {
        let m = model(2, m_max, 10);
        let rho = m.scenario().rho;
        let before = |r: f64| m.radial_concentration(r, ct.t1() * (1.0 - 1e-12), &ct).unwrap();
        let after = |r: f64| m.radial_concentration(r, ct.t1(), &ct).unwrap();
        let gap = l2_gap(after, before, rho);
        assert!(gap < last, "m_max = {m_max}: {gap} vs {last}");
        last = gap;
    }
    assert!(last < 0.05, "{last}");
}

#[test]
fn gamma_projection_reconstructs_profile_at_t2() {
    let ct = CrossingTimes::new(0.002, 0.01).unwrap();
    let m = SeriesModel::new(
        reference_case(2).unwrap().scenario(),
        Truncation {
            m_max: 40,
            n_max: 10,
            l_max: 200,
        },
    )
    .unwrap();
    let rho = m.scenario().rho;
    let before = |r: f64| m.radial_concentration(r, ct.t2() * (1.0 - 1e-12), &ct).unwrap();
    let after = |r: f64| m.radial_concentration(r, ct.t2(), &ct).unwrap();
    let gap = l2_gap(after, before, rho);
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn gamma_zero_carries_the_surviving_mass() {
    // γ_0 π ρ² equals the conditional survival just after t2
    let m = model(4, 30, 10);
    let ct = CrossingTimes::new(2.9, 2.95).unwrap();
    let rho = m.scenario().rho;
    let g0 = m.gamma_coeff(0, &ct).unwrap();
    let s = m.conditional_survival(ct.t2(), &ct);
    assert!((g0 * PI * rho * rho - s).abs() < 1e-12);
}

#[test]
fn arrival_probability_converges_with_truncation() {
    let grid = uniform_grid(3.5, 0.05).unwrap();
    let opts = ResponseOptions::default();
    for id in [1, 6] {
        let coarse = arrival_probability(&model(id, 10, 10), &grid, &opts).unwrap();
        let fine = arrival_probability(&model(id, 20, 20), &grid, &opts).unwrap();
        let finer = arrival_probability(&model(id, 40, 40), &grid, &opts).unwrap();
        let d1 = max_gap(&coarse.values, &fine.values);
        let d2 = max_gap(&fine.values, &finer.values);
        assert!(d2 <= d1 + 1e-12, "ex{id}: {d1} then {d2}");
        assert!(d1 < 1e-2, "ex{id}: {d1}");
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
