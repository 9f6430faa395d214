//! Mills ratio `R(x) = (1 - Φ(x)) / φ(x)` of the standard normal and its
//! asymptotic expansion.

use libm::erfc;

/// Number of leading terms kept in the truncated expansions of `h(b)/b` and
/// `h'(b)` for the half-normal parent.
pub const MILLS_EXPANSION_TERMS: usize = 4;

const CONTINUED_FRACTION_SWITCH: f64 = 6.0;

/// Mills ratio, which is also the reciprocal hazard of the half-normal law.
pub fn mills_ratio(x: f64) -> f64 {
    if x < CONTINUED_FRACTION_SWITCH {
        (std::f64::consts::PI / 2.0).sqrt() * erfc(x / std::f64::consts::SQRT_2) * (0.5 * x * x).exp()
    } else {
        // R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated backwards
        let mut tail = x;
        for k in (1..=80).rev() {
            tail = x + k as f64 / tail;
        }
        1.0 / tail
    }
}

/// `(2k - 1)!!` with the convention `(-1)!! = 1`.
fn double_factorial_odd(k: usize) -> f64 {
    (1..=k).map(|j| (2 * j - 1) as f64).product()
}

/// Leading `terms` terms of the asymptotic series of `R(b)/b` in `u = 1/b²`:
/// `u - u² + 3u³ - 15u⁴ + ...`.
pub fn mills_over_x_expansion(b: f64, terms: usize) -> f64 {
    let u = 1.0 / (b * b);
    (0..terms)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * double_factorial_odd(k) * u.powi(k as i32 + 1)
        })
        .sum()
}

/// Leading `terms` terms of the series of `h'(b) = b R(b) - 1`:
/// `-u + 3u² - 15u³ + 105u⁴ - ...`.
pub fn mills_deriv_expansion(b: f64, terms: usize) -> f64 {
    let u = 1.0 / (b * b);
    (1..=terms)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * double_factorial_odd(k) * u.powi(k as i32)
        })
        .sum()
}
