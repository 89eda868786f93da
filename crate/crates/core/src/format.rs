//! Text formatting shared by the exporters.

/// Decimal with 12 significant digits, e.g. `2.00000000000`.
/// Values outside `[1e-4, 1e12)` in magnitude use exponent notation.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&exp) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..).
    let carried = s
        .trim_start_matches('-')
        .split('.')
        .next()
        .map_or(0, |i| i.len() as i32);
    if exp >= 0 && carried > exp + 1 && decimals > 0 {
        return format!("{:.*}", decimals - 1, x);
    }
    s
}
