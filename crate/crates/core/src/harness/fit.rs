//! Log-log rate fits against `|ln ε|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residuals above this (in natural-log units) mark the data as not yet in
/// the asymptotic regime.
pub const RESIDUAL_FLAG: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub predicted_slope: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pre_asymptotic: bool,
}

/// Ordinary least squares of `ln value` on `ln |ln ε|`.
pub fn fit_rate(abs_log_eps: &[f64], values: &[f64], predicted_slope: f64) -> Result<RateFit> {
    if abs_log_eps.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} abscissae for {} values",
            abs_log_eps.len(),
            values.len()
        )));
    }
    if values.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Fit(format!("cannot take the log of {v}")));
    }
    if let Some(l) = abs_log_eps.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::Fit(format!("|ln eps| = {l} is not positive")));
    }
    let x: Vec<f64> = abs_log_eps.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all eps values coincide".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| yi - (intercept + slope * xi))
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(RateFit {
        slope,
        intercept,
        predicted_slope,
        residuals,
        max_residual,
        pre_asymptotic: max_residual > RESIDUAL_FLAG,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let l = [4.6, 6.9, 9.2, 13.8];
        let v: Vec<f64> = l.iter().map(|x: &f64| 3.0 * x.powf(-2.0)).collect();
        let f = fit_rate(&l, &v, -2.0).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
        assert!(!f.pre_asymptotic);
    }

    #[test]
    fn scattered_data_flagged() {
        let f = fit_rate(&[2.0, 4.0, 8.0], &[1.0, 2.0, 0.5], -1.0).unwrap();
        assert!(f.pre_asymptotic);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_rate(&[2.0, 3.0], &[1.0, 1.0], -1.0), Err(Error::Fit(_))));
        assert!(fit_rate(&[2.0, 3.0, 4.0], &[1.0, 0.0, 1.0], -1.0).is_err());
    }
}
