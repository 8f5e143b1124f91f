//! Lower real branch of the Lambert W function.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITERS: usize = 200;

/// `W_{-1}(x)` for `x` in `[-1/e, 0)`; the result is `<= -1`.
///
/// Works in the variable `y = -w`, where `w e^w = x` becomes
/// `y - ln y = c` with `c = -ln(-x) >= 1`. This keeps the iteration free of
/// underflow for tiny `|x|`.
pub fn lambert_w_minus1<T: Real>(x: T) -> Result<T> {
    let branch = -T::E().recip();
    if x.is_nan() || x >= T::zero() {
        return Err(Error::Domain(format!(
            "W_-1 requires -1/e <= x < 0, got {x}"
        )));
    }
    if x <= branch {
        // Values within rounding of -1/e sit on the branch point.
        if x >= branch * (T::one() + T::lit(8.0) * T::epsilon()) {
            return Ok(-T::one());
        }
        return Err(Error::Domain(format!(
            "W_-1 requires -1/e <= x < 0, got {x}"
        )));
    }
    let c = -(-x).ln();
    Ok(-solve_y_minus_ln_y(c))
}

/// Solves `y - ln y = c` on `y >= 1`, i.e. returns `-W_{-1}(-e^{-c})`.
///
/// Newton's method safeguarded by a bracket, seeded with the branch-point
/// series near `c = 1` and the log-log asymptotic expansion otherwise.
pub(crate) fn solve_y_minus_ln_y<T: Real>(c: T) -> T {
    let one = T::one();
    if !(c > one) {
        return one;
    }
    let two = T::lit(2.0);
    let mut lo = one;
    let mut hi = two * c + one;

    let mut y = if c < two {
        // -W_{-1} = 1 + q + q^2/3 + 11 q^3 / 72 with q = sqrt(2 (1 + e x)).
        let q = (-two * (one - c).exp_m1()).sqrt();
        one + q + q * q / T::lit(3.0) + T::lit(11.0 / 72.0) * q * q * q
    } else {
        let lc = c.ln();
        c + lc + lc / c
    };
    if !(y > lo && y < hi) {
        y = (lo + hi) / two;
    }

    for _ in 0..MAX_ITERS {
        let g = y - y.ln() - c;
        if g == T::zero() {
            return y;
        }
        if g > T::zero() {
            hi = y;
        } else {
            lo = y;
        }
        let slope = one - y.recip();
        let mut next = y - g / slope;
        if !(next > lo && next < hi) {
            next = (lo + hi) / two;
        }
        let done =
            (next - y).abs() <= T::lit(2.0) * T::epsilon() * y || hi - lo <= T::epsilon() * hi;
        y = next;
        if done {
            break;
        }
    }
    y
}

/// Ratio `t*/l*` of the computation-dominant optimum for a shifted
/// exponential node with rate `u` and shift `a`:
/// `phi = (-W_{-1}(-e^{-u a - 1}) - 1) / u`.
///
/// It satisfies `(1 + u phi) e^{u (a - phi)} = 1` and `phi > a`.
pub fn phi<T: Real>(u: T, a: T) -> Result<T> {
    if !(u > T::zero() && u.is_finite()) {
        return Err(Error::Domain(format!("phi requires u > 0, got {u}")));
    }
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::Domain(format!(
            "phi requires a > 0 (a = 0 is the W_-1 branch point), got {a}"
        )));
    }
    let y = solve_y_minus_ln_y(u * a + T::one());
    Ok((y - T::one()) / u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_point() {
        let x = -(-1f64).exp();
        assert_eq!(lambert_w_minus1(x).unwrap(), -1.0);
    }

    #[test]
    fn reference_values() {
        // Frozen from a bisection of w e^w on [-50, -1].
        let w = lambert_w_minus1(-(-2f64).exp()).unwrap();
        assert!((w + 3.146_193_220_620_583).abs() < 1e-12, "{w}");
        let w = lambert_w_minus1(-0.1f64).unwrap();
        assert!((w + 3.577_152_063_957_297).abs() < 1e-12, "{w}");
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w_minus1(0.0f64).is_err());
        assert!(lambert_w_minus1(0.5f64).is_err());
        assert!(lambert_w_minus1(-0.5f64).is_err());
        assert!(lambert_w_minus1(f64::NAN).is_err());
    }

    #[test]
    fn phi_values() {
        let p = phi(1.0f64, 1.0).unwrap();
        assert!((p - 2.146_193_220_620_583).abs() < 1e-12);
        let p = phi(2.0f64, 0.5).unwrap();
        assert!((p - 1.073_096_610_310_291_5).abs() < 1e-12);
        assert!(phi(1.0f64, 0.0).is_err());
        assert!(phi(0.0f64, 1.0).is_err());
    }

    #[test]
    fn phi_handles_large_products() {
        // -e^{-1001} underflows in f64; the log-space solve does not.
        let p = phi(1000.0f64, 1.0).unwrap();
        assert!(p > 1.0);
        let lhs = (1.0 + 1000.0 * p).ln() + 1000.0 * (1.0 - p);
        assert!(lhs.abs() < 1e-9, "{lhs}");
    }

    #[test]
    fn f32_branch() {
        let w = lambert_w_minus1(-0.1f32).unwrap();
        assert!((w + 3.577_152).abs() < 1e-5);
    }
}
