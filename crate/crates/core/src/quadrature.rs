//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error satisfies `err <= max(abs_tol, rel_tol * |I|)` or the subdivision cap
//! is hit, in which case an error carrying the last estimate is returned.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = WG[3] * fc;
    let mut kron = WGK[7] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<QuadratureResult> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(crate::error::domain(
                "adaptive_quadrature",
                format!("need finite a <= b, got [{a}, {b}]"),
            ));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                error: 0.0,
                subdivisions: 0,
                evaluations: 0,
            });
        }
        let first = kronrod(&mut f, a, b);
        let mut evaluations = 15;
        let mut total = first.value;
        let mut total_err = first.error;
        let mut heap = BinaryHeap::from([first]);
        let mut subdivisions = 0;
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            if subdivisions >= self.max_subdivisions {
                return Err(Error::QuadratureNonConvergence {
                    a,
                    b,
                    estimate: total,
                    error: total_err,
                    tol,
                    subdivisions,
                });
            }
            let worst = heap.pop().expect("heap never empties");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                // interval at floating-point resolution; accept what we have
                heap.push(Segment { error: 0.0, ..worst });
                total_err -= worst.error;
                continue;
            }
            let left = kronrod(&mut f, worst.a, mid);
            let right = kronrod(&mut f, mid, worst.b);
            evaluations += 30;
            subdivisions += 1;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            if subdivisions % 64 == 0 {
                // resum to shed accumulated cancellation in the running totals
                total = heap.iter().map(|s| s.value).sum();
                total_err = heap.iter().map(|s| s.error).sum();
            }
        }
        let value = heap.iter().map(|s| s.value).sum();
        Ok(QuadratureResult {
            value,
            error: total_err,
            subdivisions,
            evaluations,
        })
    }
}

/// `integral_a^b f` to absolute-or-relative tolerance `tol`, with the
/// default subdivision cap.
pub fn adaptive_quadrature<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    Quadrature::with_tol(tol).integrate(f, a, b).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn rule_weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert_abs_diff_eq!(k, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        let mut f = |x: f64| x.powi(22) + x.powi(7);
        let s = kronrod(&mut f, -1.0, 1.0);
        assert_abs_diff_eq!(s.value, 2.0 / 23.0, epsilon = 1e-15);
    }

    #[test]
    fn textbook_integrals() {
        assert_abs_diff_eq!(adaptive_quadrature(|_| 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(adaptive_quadrature(f64::sin, 0.0, PI, 1e-12).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(adaptive_quadrature(f64::sin, 1.0, 1.0, 1e-12).unwrap(), 0.0);
        // integrable endpoint singularity
        let v = adaptive_quadrature(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn cap_reports_non_convergence() {
        let q = Quadrature {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 3,
        };
        let err = q.integrate(|x| (1.0 / x).sin(), 1e-6, 1.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { subdivisions: 3, .. }));
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(adaptive_quadrature(|x| x, 1.0, 0.0, 1e-8).is_err());
    }
}
