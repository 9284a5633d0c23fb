//! Planar point-vortex system `ż_i = Σ_{j≠i} a_j K(z_i - z_j)` and its drift
//! variant `+ e1 a_i`, integrated with fixed-step RK4.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::green::eval_k_regularized;
use crate::vec2::PlanarVec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVortexState {
    pub positions: Vec<PlanarVec>,
    pub intensities: Vec<f64>,
    pub time: f64,
}

impl PointVortexState {
    pub fn new(positions: Vec<PlanarVec>, intensities: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Domain("need at least one vortex".into()));
        }
        if positions.len() != intensities.len() {
            return Err(Error::Domain(format!(
                "{} positions but {} intensities",
                positions.len(),
                intensities.len()
            )));
        }
        Ok(Self {
            positions,
            intensities,
            time: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Smallest pairwise distance with the pair achieving it; `None` for N = 1.
    pub fn min_separation(&self) -> Option<(f64, usize, usize)> {
        min_pair(&self.positions)
    }
}

fn min_pair(z: &[PlanarVec]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, i, j));
            }
        }
    }
    best
}

/// First integrals of the (drift-free) system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvInvariants {
    pub hamiltonian: f64,
    /// `Σ a_i z_i`, not normalized by `Σ a_i` (which may vanish).
    pub linear_impulse: PlanarVec,
    pub angular_impulse: f64,
}

fn velocities(z: &[PlanarVec], a: &[f64], drift: bool, time: f64) -> Result<Vec<PlanarVec>> {
    let n = z.len();
    let mut out = vec![PlanarVec::ZERO; n];
    for i in 0..n {
        let mut v = PlanarVec::ZERO;
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = z[i] - z[j];
            if d.norm_sq() == 0.0 {
                return Err(Error::Collapse {
                    time,
                    i: i.min(j),
                    j: i.max(j),
                    separation: 0.0,
                });
            }
            v += a[j] * eval_k_regularized(d, 0.0);
        }
        if drift {
            v.x1 += a[i];
        }
        out[i] = v;
    }
    Ok(out)
}

/// Vortex velocities at the current state.
pub fn pv_rhs(state: &PointVortexState, drift: bool) -> Result<Vec<PlanarVec>> {
    velocities(&state.positions, &state.intensities, drift, state.time)
}

pub fn pv_invariants(state: &PointVortexState) -> Result<PvInvariants> {
    let z = &state.positions;
    let a = &state.intensities;
    let mut h = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if d == 0.0 {
                return Err(Error::Collapse {
                    time: state.time,
                    i,
                    j,
                    separation: 0.0,
                });
            }
            h -= a[i] * a[j] * d.ln();
        }
    }
    let mut p = PlanarVec::ZERO;
    let mut am = 0.0;
    for (zi, &ai) in z.iter().zip(a) {
        p += ai * *zi;
        am += ai * zi.norm_sq();
    }
    Ok(PvInvariants {
        hamiltonian: h / (2.0 * std::f64::consts::PI),
        linear_impulse: p,
        angular_impulse: am,
    })
}

/// Step times `t0, t0 + dt, ..., t0 + horizon`, the last interval shortened
/// to land exactly on the horizon. Slivers shorter than `1e-12 dt` left by
/// round-off are merged into the previous step.
pub fn time_grid(t0: f64, horizon: f64, dt: f64) -> Vec<f64> {
    let t_end = t0 + horizon;
    let mut out = vec![t0];
    let mut step = 0usize;
    while *out.last().unwrap() < t_end {
        step += 1;
        let nominal = t0 + step as f64 * dt;
        out.push(if nominal >= t_end - 1e-12 * dt.max(t_end.abs()) {
            t_end
        } else {
            nominal
        });
    }
    out
}

/// Options for [`pv_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct PvIntegration {
    pub horizon: f64,
    pub dt: f64,
    /// Halt when the minimum separation drops below this. `None` picks
    /// `1e-6 ×` the initial minimum separation.
    pub collapse_threshold: Option<f64>,
    pub drift: bool,
}

/// Fixed-step RK4 from `state.time` to `state.time + horizon`; the last step
/// is shortened to land exactly on the horizon. The returned trajectory holds
/// the initial state and every accepted step.
pub fn pv_integrate(state: &PointVortexState, opts: PvIntegration) -> Result<Vec<PointVortexState>> {
    if !(opts.dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {}", opts.dt)));
    }
    if !(opts.horizon >= 0.0) {
        return Err(Error::Domain(format!(
            "horizon must be nonnegative, got {}",
            opts.horizon
        )));
    }
    let initial_sep = state.min_separation();
    let threshold = match (opts.collapse_threshold, initial_sep) {
        (Some(t), _) if !(t > 0.0) => {
            return Err(Error::Domain(format!(
                "collapse threshold must be positive, got {t}"
            )))
        }
        (Some(t), _) => t,
        (None, Some((d, _, _))) => 1e-6 * d,
        (None, None) => 0.0,
    };
    if let Some((d, i, j)) = initial_sep {
        if d < threshold || d == 0.0 {
            return Err(Error::Collapse {
                time: state.time,
                i,
                j,
                separation: d,
            });
        }
    }

    let a = &state.intensities;
    let mut traj = vec![state.clone()];
    let mut cur = state.clone();
    let shift = |z: &[PlanarVec], k: &[PlanarVec], h: f64| -> Vec<PlanarVec> {
        z.iter().zip(k).map(|(zi, ki)| *zi + h * *ki).collect()
    };
    for &t_next in &time_grid(state.time, opts.horizon, opts.dt)[1..] {
        let h = t_next - cur.time;
        let z = &cur.positions;
        let k1 = velocities(z, a, opts.drift, cur.time)?;
        let k2 = velocities(&shift(z, &k1, 0.5 * h), a, opts.drift, cur.time)?;
        let k3 = velocities(&shift(z, &k2, 0.5 * h), a, opts.drift, cur.time)?;
        let k4 = velocities(&shift(z, &k3, h), a, opts.drift, cur.time)?;
        let next: Vec<PlanarVec> = (0..z.len())
            .map(|i| z[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        cur = PointVortexState {
            positions: next,
            intensities: a.clone(),
            time: t_next,
        };
        if let Some((d, i, j)) = cur.min_separation() {
            if d < threshold {
                return Err(Error::Collapse {
                    time: cur.time,
                    i,
                    j,
                    separation: d,
                });
            }
        }
        traj.push(cur.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn state(z: &[(f64, f64)], a: &[f64]) -> PointVortexState {
        PointVortexState::new(
            z.iter().map(|&(x, y)| PlanarVec::new(x, y)).collect(),
            a.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn single_vortex_velocity() {
        let s = state(&[(0.3, 0.1)], &[0.7]);
        assert_eq!(pv_rhs(&s, false).unwrap()[0], PlanarVec::ZERO);
        assert_eq!(pv_rhs(&s, true).unwrap()[0], PlanarVec::new(0.7, 0.0));
    }

    #[test]
    fn symmetric_pair_velocity() {
        let s = state(&[(0.5, 0.0), (-0.5, 0.0)], &[1.0, 1.0]);
        let v = pv_rhs(&s, false).unwrap();
        let w = 1.0 / (2.0 * PI);
        assert!((v[0] - PlanarVec::new(0.0, w)).norm() < 1e-16);
        assert!((v[1] - PlanarVec::new(0.0, -w)).norm() < 1e-16);
    }

    #[test]
    fn coincident_vortices_collapse() {
        let s = state(&[(0.0, 0.0), (0.0, 0.0)], &[1.0, -1.0]);
        assert!(matches!(pv_rhs(&s, false), Err(Error::Collapse { .. })));
        assert!(matches!(pv_invariants(&s), Err(Error::Collapse { .. })));
    }

    #[test]
    fn single_vortex_invariants() {
        let s = state(&[(0.3, -2.0)], &[1.5]);
        let inv = pv_invariants(&s).unwrap();
        assert_eq!(inv.hamiltonian, 0.0);
        assert_eq!(inv.linear_impulse, PlanarVec::new(1.5 * 0.3, -3.0));
    }

    #[test]
    fn below_threshold_is_immediate_collapse() {
        let s = state(&[(0.0, 0.0), (1e-3, 0.0)], &[1.0, 1.0]);
        let r = pv_integrate(
            &s,
            PvIntegration {
                horizon: 1.0,
                dt: 1e-3,
                collapse_threshold: Some(1e-2),
                drift: false,
            },
        );
        match r {
            Err(Error::Collapse { time, i, j, .. }) => {
                assert_eq!(time, 0.0);
                assert_eq!((i, j), (0, 1));
            }
            other => panic!("expected collapse, got {other:?}"),
        }
    }

    #[test]
    fn partial_final_step_lands_on_horizon() {
        let s = state(&[(0.5, 0.0), (-0.5, 0.0)], &[1.0, 1.0]);
        let traj = pv_integrate(
            &s,
            PvIntegration {
                horizon: 0.25,
                dt: 0.1,
                collapse_threshold: None,
                drift: false,
            },
        )
        .unwrap();
        let times: Vec<f64> = traj.iter().map(|s| s.time).collect();
        assert_eq!(times.len(), 4);
        assert_eq!(*times.last().unwrap(), 0.25);
    }

    #[test]
    fn rk4_order_on_corotating_pair() {
        let s = state(&[(0.5, 0.0), (-0.5, 0.0)], &[1.0, 1.0]);
        let run = |dt: f64| {
            pv_integrate(
                &s,
                PvIntegration {
                    horizon: 2.0,
                    dt,
                    collapse_threshold: None,
                    drift: false,
                },
            )
            .unwrap()
            .last()
            .unwrap()
            .positions[0]
        };
        let dt = 0.5;
        let reference = run(dt / 8.0);
        let e1 = (run(dt) - reference).norm();
        let e2 = (run(dt / 2.0) - reference).norm();
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }
}
