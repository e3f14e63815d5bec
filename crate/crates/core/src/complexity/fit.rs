//! Least-squares slope of `ln steps` against `ln size`.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::FitError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit<F> {
    pub exponent: F,
    pub intercept: F,
    /// Root-mean-square residual in log space.
    pub residual: F,
}

/// Fits `steps ≈ e^intercept * size^exponent` to `(size, steps)` points.
pub fn fit_exponent<F: Float>(points: &[(F, F)]) -> Result<Fit<F>, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFew(points.len()));
    }
    if points.iter().any(|&(s, t)| s <= F::zero() || t <= F::zero()) {
        return Err(FitError::NonPositive);
    }
    let logs: Vec<(F, F)> = points.iter().map(|&(s, t)| (s.ln(), t.ln())).collect();
    let n = F::from(logs.len()).expect("count fits in a float");
    let mean_x = logs.iter().fold(F::zero(), |a, &(x, _)| a + x) / n;
    let mean_y = logs.iter().fold(F::zero(), |a, &(_, y)| a + y) / n;
    let sxx = logs.iter().fold(F::zero(), |a, &(x, _)| a + (x - mean_x) * (x - mean_x));
    if sxx <= F::epsilon() {
        return Err(FitError::Degenerate);
    }
    let sxy = logs.iter().fold(F::zero(), |a, &(x, y)| a + (x - mean_x) * (y - mean_y));
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let sse = logs.iter().fold(F::zero(), |a, &(x, y)| {
        let r = y - (intercept + exponent * x);
        a + r * r
    });
    Ok(Fit {
        exponent,
        intercept,
        residual: (sse / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_laws() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|s| (s as f64, 3.0 * (s as f64).powi(2))).collect();
        let fit = fit_exponent(&pts).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_cost_has_zero_slope() {
        let pts: Vec<(f32, f32)> = (1..=8).map(|s| (s as f32, 5.0)).collect();
        assert!(fit_exponent(&pts).unwrap().exponent.abs() < 1e-5);
    }

    #[test]
    fn error_cases() {
        assert_eq!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]), Err(FitError::TooFew(2)));
        assert_eq!(fit_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]), Err(FitError::Degenerate));
        assert_eq!(fit_exponent(&[(0.0, 1.0), (2.0, 2.0), (3.0, 3.0)]), Err(FitError::NonPositive));
    }
}
