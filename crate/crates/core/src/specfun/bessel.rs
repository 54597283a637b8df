//! Bessel functions of the first kind, orders 0 and 1, and their positive zeros.
//!
//! Evaluation uses three branches:
//!
//! * `|x| <= 12`: the ascending power series,
//! * `12 < |x| <= 25`: Miller's backward recurrence normalised with
//!   `J0 + 2 (J2 + J4 + ...) = 1`,
//! * `|x| > 25`: Hankel's asymptotic expansion, truncated at its smallest term.
//!
//! The absolute error is below 1e-12 on `|x| <= 1e3`; the series branch
//! loses a few digits to cancellation near its upper end.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};

const SERIES_LIMIT: f64 = 12.0;
const RECURRENCE_LIMIT: f64 = 25.0;

/// Number of zeros of each order kept in the process-wide table.
pub const CACHED_ROOTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    pub fn from_index(order: u32) -> Result<Self> {
        match order {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            _ => Err(domain("bessel", format!("order {order} not in {{0, 1}}"))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Self::Zero => 0,
            Self::One => 1,
        }
    }
}

/// `J0(x)`. NaN in, NaN out.
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        series(0, ax)
    } else if ax <= RECURRENCE_LIMIT {
        miller(ax).0
    } else {
        hankel(0, ax)
    }
}

/// `J1(x)`. NaN in, NaN out.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        series(1, ax)
    } else if ax <= RECURRENCE_LIMIT {
        miller(ax).1
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Checked evaluation of `J_order(x)`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("bessel_j", format!("argument {x} is not finite")));
    }
    Ok(match order {
        BesselOrder::Zero => j0(x),
        BesselOrder::One => j1(x),
    })
}

fn series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Returns `(J0(x), J1(x))` for `x > 0` by downward recurrence.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x as usize + 40) / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut even_sum = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds J_{k-1}
        if k - 1 == 1 {
            j1 = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            even_sum += cur;
        }
        if cur.abs() > 1e250 {
            next *= 1e-250;
            cur *= 1e-250;
            even_sum *= 1e-250;
            j1 *= 1e-250;
        }
    }
    let norm = cur + 2.0 * even_sum;
    (cur / norm, j1 / norm)
}

fn hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let z8 = 8.0 * x;
    // a_k = prod_{i=1..k} (mu - (2i-1)^2) / (k! (8x)^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z8);
        let mag = term.abs();
        if mag > last || mag < 1e-17 {
            break;
        }
        last = mag;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (order as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// McMahon's large-root expansion for `j_{order,k}`, `k >= 1`.
pub(crate) fn mcmahon(order: BesselOrder, k: usize) -> f64 {
    let nu = order.index() as f64;
    let mu = 4.0 * nu * nu;
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

fn eval(order: BesselOrder, x: f64) -> f64 {
    match order {
        BesselOrder::Zero => j0(x),
        BesselOrder::One => j1(x),
    }
}

fn derivative(order: BesselOrder, x: f64) -> f64 {
    match order {
        BesselOrder::Zero => -j1(x),
        BesselOrder::One => j0(x) - j1(x) / x,
    }
}

/// Newton iteration from McMahon's guess, kept inside a sign-change bracket.
fn compute_root(order: BesselOrder, k: usize) -> f64 {
    let guess = mcmahon(order, k);
    let (mut lo, mut hi) = (guess - 0.8, guess + 0.8);
    let mut f_lo = eval(order, lo);
    // widen until the bracket holds a sign change (only needed for tiny k)
    while f_lo * eval(order, hi) > 0.0 {
        lo -= 0.1;
        hi += 0.1;
        f_lo = eval(order, lo);
    }
    let mut x = guess;
    for _ in 0..100 {
        let f = eval(order, x);
        if f == 0.0 {
            return x;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = f;
        } else {
            hi = x;
        }
        let mut next = x - f / derivative(order, x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return next;
        }
        x = next;
    }
    x
}

fn tables() -> &'static [Vec<f64>; 2] {
    static TABLES: OnceLock<[Vec<f64>; 2]> = OnceLock::new();
    TABLES.get_or_init(|| {
        let zero = (1..=CACHED_ROOTS)
            .map(|k| compute_root(BesselOrder::Zero, k))
            .collect();
        let one = std::iter::once(0.0)
            .chain((1..CACHED_ROOTS).map(|k| compute_root(BesselOrder::One, k)))
            .collect();
        [zero, one]
    })
}

/// The `k`-th positive zero `j_{order,k}`, with `j_{1,0} := 0`.
pub fn bessel_root(order: BesselOrder, k: usize) -> Result<f64> {
    match order {
        BesselOrder::Zero if k == 0 => Err(domain(
            "bessel_root",
            "J0 zeros are indexed from k = 1",
        )),
        BesselOrder::Zero => Ok(tables()[0]
            .get(k - 1)
            .copied()
            .unwrap_or_else(|| compute_root(order, k))),
        BesselOrder::One if k == 0 => Ok(0.0),
        BesselOrder::One => Ok(tables()[1]
            .get(k)
            .copied()
            .unwrap_or_else(|| compute_root(order, k))),
    }
}

/// Leading zeros of one Bessel order.
///
/// Order-0 tables start at `j_{0,1}`; order-1 tables start at the defined
/// zero `j_{1,0} = 0`. Index with [`BesselRootTable::root`] to get the
/// conventional numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRootTable {
    order: BesselOrder,
    roots: Vec<f64>,
}

impl BesselRootTable {
    pub fn new(order: BesselOrder, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(domain("BesselRootTable", "count must be positive"));
        }
        let cached = match order {
            BesselOrder::Zero => &tables()[0],
            BesselOrder::One => &tables()[1],
        };
        let roots = if count <= cached.len() {
            cached[..count].to_vec()
        } else {
            let first = if order == BesselOrder::Zero { 1 } else { 0 };
            (first..first + count)
                .map(|k| bessel_root(order, k))
                .collect::<Result<_>>()?
        };
        Ok(Self { order, roots })
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }

    pub fn count(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// `j_{order,k}` in the conventional numbering (k >= 1 for order 0).
    pub fn root(&self, k: usize) -> Option<f64> {
        match self.order {
            BesselOrder::Zero => k.checked_sub(1).and_then(|i| self.roots.get(i)).copied(),
            BesselOrder::One => self.roots.get(k).copied(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // References from 50-digit mpmath evaluation, rounded to f64.
    const J0_REF: [(f64, f64); 6] = [
        (1.0, 0.765_197_686_557_966_6),
        (5.0, -0.177_596_771_314_338_3),
        (12.0, 0.047_689_310_796_833_535),
        (18.5, 0.077_164_821_422_554_7),
        (30.0, -0.086_367_983_581_040_21),
        (1000.0, 0.024_786_686_152_420_176),
    ];
    const J1_REF: [(f64, f64); 6] = [
        (1.0, 0.440_050_585_744_933_5),
        (5.0, -0.327_579_137_591_465_23),
        (12.0, -0.223_447_104_490_627_6),
        (18.5, -0.166_633_640_010_016_04),
        (30.0, -0.118_751_062_616_622_94),
        (1000.0, 0.004_728_311_907_089_523),
    ];

    #[test]
    fn values_match_reference() {
        for (x, v) in J0_REF {
            assert_abs_diff_eq!(j0(x), v, epsilon = 5e-13);
            assert_abs_diff_eq!(j0(-x), v, epsilon = 5e-13);
        }
        for (x, v) in J1_REF {
            assert_abs_diff_eq!(j1(x), v, epsilon = 5e-13);
            assert_abs_diff_eq!(j1(-x), -v, epsilon = 5e-13);
        }
    }

    #[test]
    fn origin() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
    }

    #[test]
    fn branches_agree_at_switchovers() {
        let m = miller(SERIES_LIMIT);
        assert_abs_diff_eq!(series(0, SERIES_LIMIT), m.0, epsilon = 5e-13);
        assert_abs_diff_eq!(series(1, SERIES_LIMIT), m.1, epsilon = 5e-13);
        let m = miller(RECURRENCE_LIMIT);
        assert_abs_diff_eq!(hankel(0, RECURRENCE_LIMIT), m.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hankel(1, RECURRENCE_LIMIT), m.1, epsilon = 1e-14);
    }

    #[test]
    fn non_finite_is_domain_error() {
        assert!(bessel_j(BesselOrder::Zero, f64::NAN).is_err());
        assert!(bessel_j(BesselOrder::One, f64::INFINITY).is_err());
        assert!(BesselOrder::from_index(2).is_err());
    }

    #[test]
    fn root_conventions() {
        assert_eq!(bessel_root(BesselOrder::One, 0).unwrap(), 0.0);
        assert!(bessel_root(BesselOrder::Zero, 0).is_err());
        assert_abs_diff_eq!(
            bessel_root(BesselOrder::Zero, 1).unwrap(),
            2.404_825_557_695_773,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bessel_root(BesselOrder::One, 1).unwrap(),
            3.831_705_970_207_512,
            epsilon = 1e-12
        );
        // beyond the cache
        let far = bessel_root(BesselOrder::Zero, CACHED_ROOTS + 5).unwrap();
        assert!(j0(far).abs() < 1e-12);
    }

    #[test]
    fn table_indexing() {
        let t0 = BesselRootTable::new(BesselOrder::Zero, 5).unwrap();
        let t1 = BesselRootTable::new(BesselOrder::One, 5).unwrap();
        assert_eq!(t0.root(0), None);
        assert_eq!(t0.root(1), Some(t0.roots()[0]));
        assert_eq!(t1.root(0), Some(0.0));
        assert_eq!(t1.root(4), Some(t1.roots()[4]));
        assert_eq!(t1.root(5), None);
        assert!(BesselRootTable::new(BesselOrder::Zero, 0).is_err());
    }
}
