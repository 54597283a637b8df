//! Gaussian tail probability and its logarithm.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Upper tail of the standard normal, `Q(x) = P{Z > x}`.
///
/// Evaluated through `erfc` so that large positive `x` keeps full relative
/// precision instead of cancelling against 1.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF, `Phi(x) = Q(-x)`.
pub fn phi(x: f64) -> f64 {
    q_function(-x)
}

/// `ln Q(x)`, finite for every finite `x` (no underflow for large `x`).
pub fn log_q(x: f64) -> f64 {
    if x < 25.0 {
        q_function(x).ln()
    } else {
        let y = x * FRAC_1_SQRT_2;
        // Q(x) = erfcx(y) exp(-y^2) / 2
        -y * y + (0.5 * erfcx_large(y)).ln()
    }
}

/// Scaled complementary error function `exp(y^2) erfc(y)` for `y >= 5`,
/// from the Laplace continued fraction (modified Lentz).
fn erfcx_large(y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = y;
    let mut c = y;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = y + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = y + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn known_values() {
        assert_eq!(q_function(0.0), 0.5);
        // 50-digit erfc reference
        assert_relative_eq!(q_function(1.0), 0.158_655_253_931_457_05, max_relative = 1e-12);
        assert!(q_function(40.0) <= 1e-300);
        assert!(q_function(f64::NAN).is_nan());
    }

    #[test]
    fn symmetry() {
        let mut x = -8.0;
        while x <= 8.0 {
            assert_abs_diff_eq!(q_function(x) + q_function(-x), 1.0, epsilon = 1e-12);
            x += 0.037;
        }
    }

    #[test]
    fn log_branch_is_continuous() {
        let below = q_function(24.999_999).ln();
        let above = log_q(25.0);
        assert_abs_diff_eq!(below, above, epsilon = 1e-4);
        // erfcx continued fraction against direct evaluation where both work
        for y in [5.0_f64, 8.0, 12.0, 17.0] {
            let direct = (y * y).exp() * libm::erfc(y);
            assert_relative_eq!(erfcx_large(y), direct, max_relative = 1e-13);
        }
        // far tail: ln Q(x) ~ -x^2/2 - ln(x sqrt(2 pi))
        let x = 1000.0_f64;
        assert_relative_eq!(
            log_q(x),
            -0.5 * x * x - (x * (2.0 * PI).sqrt()).ln(),
            max_relative = 1e-9
        );
    }
}
