//! The Box-Cox power transformation and its inverse.

use crate::error::{Error, Result};

/// Below this magnitude of λ the transformation is evaluated as `ln x`
/// (and the inverse as `exp y`). The neglected term is `λ (ln x)² / 2`.
pub const LAMBDA_LOG_SWITCH: f64 = 1e-8;

/// `(x^λ - 1) / λ`, or `ln x` at λ = 0.
pub fn boxcox(x: f64, lambda: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "Box-Cox transform requires a positive finite value, got {x}"
        )));
    }
    Ok(boxcox_unchecked(x, lambda))
}

/// Box-Cox transform for a value already known to be positive.
#[inline]
pub(crate) fn boxcox_unchecked(x: f64, lambda: f64) -> f64 {
    let log_x = x.ln();
    if lambda.abs() < LAMBDA_LOG_SWITCH {
        return log_x;
    }
    let t = lambda * log_x;
    if t.abs() < 0.5 {
        t.exp_m1() / lambda
    } else {
        (x.powf(lambda) - 1.0) / lambda
    }
}

/// `(λy + 1)^(1/λ)`, or `exp y` at λ = 0.
pub fn inverse_boxcox(y: f64, lambda: f64) -> Result<f64> {
    if lambda.abs() < LAMBDA_LOG_SWITCH {
        return Ok(y.exp());
    }
    let t = lambda * y;
    if !(t > -1.0) {
        return Err(Error::domain(format!(
            "y = {y} lies outside the range of the Box-Cox transform with lambda = {lambda} (lambda*y + 1 = {})",
            t + 1.0
        )));
    }
    if t.abs() < 0.5 {
        Ok((t.ln_1p() / lambda).exp())
    } else {
        Ok((t + 1.0).powf(1.0 / lambda))
    }
}

/// `d/dx` of the transform, `x^(λ-1)`, in log form.
#[inline]
pub(crate) fn log_jacobian(x: f64, lambda: f64) -> f64 {
    (lambda - 1.0) * x.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(boxcox(5.0, 1.0).unwrap(), 4.0);
        assert!((boxcox(std::f64::consts::E, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(boxcox(4.0, 0.5).unwrap(), 2.0);
        assert_eq!(inverse_boxcox(2.0, 0.5).unwrap(), 4.0);
        assert_eq!(inverse_boxcox(0.0, -1.7).unwrap(), 1.0);
        assert_eq!(inverse_boxcox(0.0, 3.0).unwrap(), 1.0);
        assert!((inverse_boxcox(1.0, 0.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_input() {
        assert!(matches!(boxcox(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(boxcox(-2.5, 0.3), Err(Error::Domain(m)) if m.contains("-2.5")));
        assert!(matches!(inverse_boxcox(-3.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(inverse_boxcox(1.0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn continuous_at_zero() {
        for &x in &[0.1, 0.9, 2.0, 17.0, 250.0] {
            for &lam in &[1e-6, -1e-6] {
                let v = boxcox(x, lam).unwrap();
                let l = f64::ln(x);
                assert!((v - l).abs() <= 1e-5 * l.abs().max(1e-300), "x={x} lam={lam}");
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(x in 0.05f64..20.0, lam in -3.0f64..3.0) {
            let y = boxcox(x, lam).unwrap();
            let back = inverse_boxcox(y, lam).unwrap();
            prop_assert!((back - x).abs() <= 1e-12 * x);
        }

        #[test]
        fn increasing(x in 1e-3f64..1e3, dx in 1e-6f64..10.0, lam in -3.0f64..3.0) {
            prop_assert!(boxcox(x + dx, lam).unwrap() > boxcox(x, lam).unwrap());
        }
    }
}
