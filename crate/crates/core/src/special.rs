//! Overflow-safe hyperbolic helpers shared by the hexagon and psi kernels.

use std::f64::consts::LN_2;

/// `ln(cosh x)`, finite for every finite `x`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln(sinh x)` for `x > 0`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x - LN_2 + (-(-2.0 * x).exp_m1()).ln()
    }
}

/// `ln(e^a + e^b)`.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `arccosh(1 + w)` for `w >= 0`, given `ln w`.
///
/// Accurate both for tiny excess (where `cosh θ` rounds to 1) and for
/// excess far beyond the range of `f64`.
pub fn arccosh_one_plus(ln_w: f64) -> f64 {
    if ln_w == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_w < -40.0 {
        // arccosh(1 + w) = sqrt(2w) (1 - w/12 + ...); w itself may underflow
        return (0.5 * (LN_2 + ln_w)).exp();
    }
    if ln_w < 18.0 {
        let w = ln_w.exp();
        (w + (w * (w + 2.0)).sqrt()).ln_1p()
    } else {
        // y = 1 + w > 6e7: arccosh y = ln(2y) - 1/(4y^2) - ...
        let ln_y = ln_w + (-ln_w).exp().ln_1p();
        let inv_y2 = (-2.0 * ln_y).exp();
        LN_2 + ln_y - 0.25 * inv_y2
    }
}
