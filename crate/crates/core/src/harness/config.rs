//! Experiment configuration: a flat TOML file whose keys are the fields of
//! [`ExperimentConfig`]. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring_sim::{r0_for, SimParams};
use crate::vec2::PlanarVec;

/// Overrides `output_dir` when set.
pub const OUT_DIR_ENV: &str = "RINGVORTEX_OUT_DIR";

/// Blob smoothing length: `"half-spacing"` (default), `"none"`, or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaPolicy {
    Fixed(f64),
    Named(String),
}

impl Default for DeltaPolicy {
    fn default() -> Self {
        DeltaPolicy::Named("half-spacing".into())
    }
}

impl DeltaPolicy {
    fn resolve(&self) -> Result<Option<f64>> {
        match self {
            DeltaPolicy::Fixed(d) if *d >= 0.0 && d.is_finite() => Ok(Some(*d)),
            DeltaPolicy::Fixed(d) => Err(Error::Configuration(format!(
                "delta_policy must be nonnegative, got {d}"
            ))),
            DeltaPolicy::Named(s) if s == "half-spacing" => Ok(None),
            DeltaPolicy::Named(s) if s == "none" => Ok(Some(0.0)),
            DeltaPolicy::Named(s) => Err(Error::Configuration(format!(
                "delta_policy must be \"half-spacing\", \"none\" or a number, got \"{s}\""
            ))),
        }
    }
}

fn default_horizon() -> f64 {
    1.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_ppb() -> usize {
    1000
}
fn default_out() -> String {
    "out".into()
}
fn default_stepper() -> String {
    "rigid-core".into()
}
fn default_gamma() -> f64 {
    2.0
}
fn default_quad_tol() -> f64 {
    1e-10
}
fn default_c_fit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub centers: Vec<[f64; 2]>,
    pub intensities: Vec<f64>,
    pub eps_list: Vec<f64>,
    pub alpha: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_ppb")]
    pub particles_per_blob: usize,
    #[serde(default)]
    pub delta_policy: DeltaPolicy,
    #[serde(default = "default_out")]
    pub output_dir: String,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_stepper")]
    pub stepper: String,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub m_bound: Option<f64>,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    /// Allows `alpha <= 2`; such runs are flagged in every report.
    #[serde(default)]
    pub exploratory: bool,
    #[serde(default)]
    pub stop_outside_half_radius: bool,
    /// Constant multiplying the bound columns of the diagnostics CSV.
    #[serde(default = "default_c_fit")]
    pub c_fit: f64,
    /// Point-vortex runs only: add the `e1 a_i` drift.
    #[serde(default)]
    pub drift: bool,
    #[serde(default)]
    pub collapse_threshold: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Configuration(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn centers(&self) -> Vec<PlanarVec> {
        self.centers.iter().map(|c| PlanarVec::new(c[0], c[1])).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Configuration(m));
        if self.centers.is_empty() {
            return cfg("at least one center is required".into());
        }
        if self.centers.len() != self.intensities.len() {
            return cfg(format!(
                "{} centers but {} intensities",
                self.centers.len(),
                self.intensities.len()
            ));
        }
        if self.intensities.iter().any(|a| *a == 0.0 || !a.is_finite()) {
            return cfg("intensities must be finite and nonzero".into());
        }
        if self.eps_list.is_empty() {
            return cfg("eps_list is empty".into());
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return cfg(format!("eps values must lie in (0, 1), got {e}"));
        }
        let z = self.centers();
        let rho_m = self.rho_m();
        if !(rho_m > 0.0) {
            return cfg("centers must be pairwise distinct".into());
        }
        if z.iter().any(|c| !c.is_finite()) {
            return cfg("centers must be finite".into());
        }
        if !self.exploratory && !(self.alpha > 2.0) {
            return cfg(format!(
                "alpha = {} requires exploratory = true",
                self.alpha
            ));
        }
        if self.particles_per_blob == 0 {
            return cfg("particles_per_blob must be positive".into());
        }
        if let Some(t) = self.collapse_threshold {
            if !(t > 0.0) {
                return cfg(format!("collapse_threshold must be positive, got {t}"));
            }
        }
        if !(self.c_fit > 0.0) {
            return cfg(format!("c_fit must be positive, got {}", self.c_fit));
        }
        self.delta_policy.resolve()?;
        crate::registry::steppers().create(&self.stepper).map_err(|e| {
            Error::Configuration(e.to_string())
        })?;
        for &eps in &self.eps_list {
            self.sim_params(eps)?;
        }
        Ok(())
    }

    /// Smallest pairwise distance between centers (infinite for one blob).
    pub fn rho_m(&self) -> f64 {
        let z = self.centers();
        let mut m = f64::INFINITY;
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                m = m.min((z[i] - z[j]).norm());
            }
        }
        m
    }

    pub fn sim_params(&self, eps: f64) -> Result<SimParams> {
        let p = SimParams {
            eps,
            alpha: self.alpha,
            gamma: self.gamma,
            m_bound: self.m_bound,
            r0: r0_for(eps, self.alpha),
            dt: self.dt,
            horizon: self.horizon,
            delta: self.delta_policy.resolve()?,
            particles_per_blob: self.particles_per_blob,
            quad_tol: self.quad_tol,
            stepper: self.stepper.clone(),
            stop_outside_half_radius: self.stop_outside_half_radius,
            exploratory: self.exploratory,
        };
        p.validate()?;
        Ok(p)
    }

    /// `output_dir`, or the value of [`OUT_DIR_ENV`] when that is set.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(&self.output_dir),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
scenario = "pair"
centers = [[-0.5, 0.0], [0.5, 0.0]]
intensities = [1.0, 1.0]
eps_list = [1e-2, 1e-3, 1e-4]
alpha = 3.0
"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(c.horizon, 1.0);
        assert_eq!(c.stepper, "rigid-core");
        assert_eq!(c.delta_policy, DeltaPolicy::default());
        assert_eq!(c.rho_m(), 1.0);
        let p = c.sim_params(1e-3).unwrap();
        assert_eq!(p.delta, None);
        assert_eq!(p.r0, 1000f64.ln().powi(3));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{BASE}\nwidth = 3\n");
        assert!(matches!(
            ExperimentConfig::from_toml(&text),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn delta_policies() {
        let c = ExperimentConfig::from_toml(&format!("{BASE}\ndelta_policy = 0.001\n")).unwrap();
        assert_eq!(c.sim_params(0.01).unwrap().delta, Some(0.001));
        let c = ExperimentConfig::from_toml(&format!("{BASE}\ndelta_policy = \"none\"\n")).unwrap();
        assert_eq!(c.sim_params(0.01).unwrap().delta, Some(0.0));
        assert!(ExperimentConfig::from_toml(&format!("{BASE}\ndelta_policy = \"wide\"\n")).is_err());
    }

    #[test]
    fn invalid_values() {
        let bad_alpha = BASE.replace("alpha = 3.0", "alpha = 2.0");
        assert!(ExperimentConfig::from_toml(&bad_alpha).is_err());
        let explo = format!("{bad_alpha}\nexploratory = true\n");
        assert!(ExperimentConfig::from_toml(&explo).is_ok());
        let bad_eps = BASE.replace("1e-4]", "1.5]");
        assert!(ExperimentConfig::from_toml(&bad_eps).is_err());
        let same = BASE.replace("[0.5, 0.0]]", "[-0.5, 0.0]]");
        assert!(ExperimentConfig::from_toml(&same).is_err());
        let stepper = format!("{BASE}\nstepper = \"leapfrog\"\n");
        assert!(ExperimentConfig::from_toml(&stepper).is_err());
    }
}
