//! Experiment orchestration: single runs against the point-vortex reference,
//! ε sweeps with rate fits, and the file outputs behind the CLI.

pub mod config;
pub mod fit;
pub mod output;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{bound_report, records_at, BoundReport, DiagnosticsRecord, FittedConstants};
use crate::error::{Error, Result};
use crate::point_vortex::{pv_integrate, PointVortexState, PvIntegration};
use crate::registry;
use crate::ring_sim::{init_blobs, integrate, ParticleBlob};

pub use config::{DeltaPolicy, ExperimentConfig, OUT_DIR_ENV};
pub use fit::{fit_rate, RateFit};

/// `exp(-(4 c / r_m)^(1/k))`, the ε0 at which `c |ln ε0|^-k = r_m / 4`.
pub fn solve_epsilon0(c_fit: f64, r_m: f64, k: f64) -> Result<f64> {
    for (name, v) in [("c_fit", c_fit), ("r_m", r_m), ("k", k)] {
        if !(v > 0.0) || v.is_nan() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if 4.0 * c_fit <= r_m {
        log::warn!(
            "4 c_fit = {} <= r_m = {r_m}: the containment margin holds for every eps below e^-1",
            4.0 * c_fit
        );
    }
    Ok((-(4.0 * c_fit / r_m).powf(1.0 / k)).exp())
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub eps: f64,
    pub records: Vec<DiagnosticsRecord>,
    pub final_blobs: Vec<ParticleBlob>,
    pub reference: Vec<PointVortexState>,
    /// Minimum pairwise distance along the reference trajectory.
    pub r_m: f64,
    pub bounds: Option<BoundReport>,
    pub delta_final: f64,
    pub max_support_radius: f64,
    /// Every support radius stayed within `r_m / 4`.
    pub containment: bool,
    pub first_breach: Option<f64>,
    pub sandwich_checks: usize,
    pub sandwich_violations: usize,
}

impl CaseResult {
    pub fn summary(&self) -> CaseSummary {
        CaseSummary {
            eps: self.eps,
            delta_final: self.delta_final,
            max_support_radius: self.max_support_radius,
            containment: self.containment,
            first_breach: self.first_breach,
            r_m: self.r_m,
            sandwich_checks: self.sandwich_checks,
            sandwich_violations: self.sandwich_violations,
        }
    }
}

fn reference_min_separation(traj: &[PointVortexState]) -> f64 {
    traj.iter()
        .filter_map(|s| s.min_separation().map(|m| m.0))
        .fold(f64::INFINITY, f64::min)
}

/// Ring simulation and point-vortex reference side by side from the same
/// centers and intensities.
pub fn run_case(config: &ExperimentConfig, eps: f64) -> Result<CaseResult> {
    if !config.eps_list.contains(&eps) {
        return Err(Error::Configuration(format!(
            "eps = {eps} is not in eps_list {:?}",
            config.eps_list
        )));
    }
    let params = config.sim_params(eps)?;
    let stepper = registry::steppers().create(&params.stepper)?;
    let blobs = init_blobs(&params, &config.centers(), &config.intensities)?;
    let pv = PointVortexState::new(config.centers(), config.intensities.clone())?;
    let reference = pv_integrate(
        &pv,
        PvIntegration {
            horizon: params.horizon,
            dt: params.dt,
            collapse_threshold: config.collapse_threshold,
            drift: false,
        },
    )?;
    let r_m = reference_min_separation(&reference);
    let bounds = if params.alpha > 2.0 {
        Some(bound_report(&params, FittedConstants::uniform(config.c_fit), r_m)?)
    } else {
        None
    };
    let nan_bounds = BoundReport {
        k: f64::NAN,
        support_bound: f64::NAN,
        delta_bound: f64::NAN,
        inertia_bound: f64::NAN,
        constants: FittedConstants::uniform(config.c_fit),
        eps0: None,
    };

    let mut records = Vec::new();
    let mut step = 0usize;
    let mut delta_final = 0.0;
    let mut max_rt = 0.0f64;
    let mut first_breach = None;
    let (mut checks, mut violations) = (0usize, 0usize);
    log::info!("eps = {eps:e}: r0 = {:.4}, {} steps", params.r0, reference.len() - 1);
    let final_blobs = integrate(&blobs, &params, stepper.as_ref(), |t, cur| {
        let z = &reference[step];
        debug_assert_eq!(z.time, t);
        let (rows, sws) = records_at(t, cur, z, bounds.as_ref().unwrap_or(&nan_bounds))?;
        for sw in sws.into_iter().flatten() {
            checks += 1;
            if !sw.holds() {
                violations += 1;
            }
        }
        let rt = rows.iter().map(|r| r.rt).fold(0.0, f64::max);
        max_rt = max_rt.max(rt);
        if first_breach.is_none() && rt > 0.25 * r_m {
            first_breach = Some(t);
        }
        delta_final = rows.iter().map(|r| r.delta).fold(0.0, f64::max);
        records.extend(rows);
        step += 1;
        Ok(())
    })
    .map_err(|e| {
        log::error!("eps = {eps:e}: {e}");
        e
    })?;

    Ok(CaseResult {
        eps,
        records,
        final_blobs,
        reference,
        r_m,
        bounds,
        delta_final,
        max_support_radius: max_rt,
        containment: first_breach.is_none(),
        first_breach,
        sandwich_checks: checks,
        sandwich_violations: violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub eps: f64,
    /// `Δ(T)`.
    pub delta_final: f64,
    /// `max R_t` over `[0, T]`.
    pub max_support_radius: f64,
    pub containment: bool,
    pub first_breach: Option<f64>,
    pub r_m: f64,
    pub sandwich_checks: usize,
    pub sandwich_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario: String,
    pub alpha: f64,
    pub k: f64,
    pub exploratory: bool,
    pub stepper: String,
    /// Sorted descending; `cases` follows the same order.
    pub eps_list: Vec<f64>,
    pub cases: Vec<CaseSummary>,
    /// `ln Δ(T)` against `ln |ln ε|`; predicted slope `-(α - 1)`.
    pub delta_fit: RateFit,
    /// `ln max R_t` against `ln |ln ε|`; predicted slope `-k`.
    pub support_fit: RateFit,
    pub delta_monotone: bool,
    pub support_monotone: bool,
    pub containment_all: bool,
    /// `max Δ(T) |ln ε|^(α-1)` over the sweep.
    pub c_delta: f64,
    /// `max R_t |ln ε|^k` over the sweep.
    pub c_support: f64,
    /// From `c_support` and the smallest `r_m` of the sweep.
    pub eps0: Option<f64>,
}

impl ConvergenceReport {
    /// Trend and containment properties a sweep is expected to show.
    pub fn properties_hold(&self) -> bool {
        self.delta_monotone
            && self.support_monotone
            && self.containment_all
            && self.cases.iter().all(|c| c.sandwich_violations == 0)
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Runs every ε of the config (concurrently), writes each case's files as it
/// finishes, and fits the rates.
pub fn sweep_and_fit(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    let mut eps_list = config.eps_list.clone();
    eps_list.sort_by(|a, b| b.total_cmp(a));
    eps_list.dedup();
    if eps_list.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 distinct eps values, got {}",
            eps_list.len()
        )));
    }
    if eps_list[0] / eps_list[eps_list.len() - 1] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Fit("eps values must span at least two decades".into()));
    }
    let dir = config.resolved_output_dir();
    let results: Vec<Result<CaseResult>> = eps_list
        .par_iter()
        .map(|&eps| {
            let r = run_case(config, eps)?;
            output::write_case(&dir, &r)?;
            Ok(r)
        })
        .collect();
    let mut cases = Vec::with_capacity(results.len());
    for r in results {
        cases.push(r?.summary());
    }
    build_report(config, &eps_list, cases)
}

pub(crate) fn build_report(
    config: &ExperimentConfig,
    eps_list: &[f64],
    cases: Vec<CaseSummary>,
) -> Result<ConvergenceReport> {
    let alpha = config.alpha;
    let k = 0.5 * (alpha - 2.0);
    let logs: Vec<f64> = eps_list.iter().map(|e| e.ln().abs()).collect();
    let deltas: Vec<f64> = cases.iter().map(|c| c.delta_final).collect();
    let supports: Vec<f64> = cases.iter().map(|c| c.max_support_radius).collect();
    let delta_fit = fit_rate(&logs, &deltas, -(alpha - 1.0))?;
    let support_fit = fit_rate(&logs, &supports, -k)?;
    let c_delta = deltas
        .iter()
        .zip(&logs)
        .map(|(d, l)| d * l.powf(alpha - 1.0))
        .fold(0.0, f64::max);
    let c_support = supports
        .iter()
        .zip(&logs)
        .map(|(r, l)| r * l.powf(k))
        .fold(0.0, f64::max);
    let r_m = cases.iter().map(|c| c.r_m).fold(f64::INFINITY, f64::min);
    let eps0 = if k > 0.0 && r_m.is_finite() && c_support > 0.0 {
        Some(solve_epsilon0(c_support, r_m, k)?)
    } else {
        None
    };
    for (name, f) in [("delta", &delta_fit), ("support", &support_fit)] {
        if f.pre_asymptotic {
            log::warn!(
                "{name} fit: max residual {:.3} > {} (pre-asymptotic regime)",
                f.max_residual,
                fit::RESIDUAL_FLAG
            );
        }
    }
    Ok(ConvergenceReport {
        scenario: config.scenario.clone(),
        alpha,
        k,
        exploratory: config.exploratory,
        stepper: config.stepper.clone(),
        eps_list: eps_list.to_vec(),
        delta_monotone: strictly_decreasing(&deltas),
        support_monotone: strictly_decreasing(&supports),
        containment_all: cases.iter().all(|c| c.containment),
        cases,
        delta_fit,
        support_fit,
        c_delta,
        c_support,
        eps0,
    })
}

/// Point-vortex trajectory for the config's centers and intensities.
pub fn pv_run(config: &ExperimentConfig) -> Result<Vec<PointVortexState>> {
    let pv = PointVortexState::new(config.centers(), config.intensities.clone())?;
    pv_integrate(
        &pv,
        PvIntegration {
            horizon: config.horizon,
            dt: config.dt,
            collapse_threshold: config.collapse_threshold,
            drift: config.drift,
        },
    )
}

/// `I1`, `I2` and remainders at `points` log-spaced arguments.
pub fn kernel_table(
    a_min: f64,
    a_max: f64,
    points: usize,
    evaluator: &str,
) -> Result<Vec<crate::kernel::SpecialPair>> {
    if !(a_min > 0.0) || !(a_max >= a_min) || !a_max.is_finite() {
        return Err(Error::Configuration(format!(
            "need 0 < a_min <= a_max, got [{a_min}, {a_max}]"
        )));
    }
    if points == 0 || (points == 1 && a_max != a_min) {
        return Err(Error::Configuration(format!(
            "points = {points} cannot cover [{a_min}, {a_max}]"
        )));
    }
    let ev = registry::special_evaluators().create(evaluator)?;
    let (l0, l1) = (a_min.ln(), a_max.ln());
    (0..points)
        .map(|i| {
            let a = if i == 0 {
                a_min
            } else if i == points - 1 {
                a_max
            } else {
                (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()
            };
            ev.eval(a)
        })
        .collect()
}
