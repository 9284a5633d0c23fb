//! Lagrangian particle discretization of N thin vortex rings in the shifted
//! meridian half-plane `x = (z, r - r0)`.

pub mod checkpoint;
pub mod stepper;
pub mod velocity;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec2::PlanarVec;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use stepper::{advance, integrate, RigidCoreStepper, Rk4Stepper, Stepper};
pub use velocity::{external_field_split, induced_velocity, FieldSplit};

/// Parameters of one ring simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub eps: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Constant `M` of the bound `|ω| <= M ε^-γ`; `None` means
    /// `1.01 × max|a_i| / π`.
    pub m_bound: Option<f64>,
    /// `|ln ε|^α`, kept in step with `eps` and `alpha` by [`SimParams::new`].
    pub r0: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Blob smoothing length; `None` means half the particle spacing.
    pub delta: Option<f64>,
    pub particles_per_blob: usize,
    /// Largest acceptable kernel error (checked against the special-function
    /// table).
    pub quad_tol: f64,
    pub stepper: String,
    /// Fail with [`Error::RegimeExit`] once a particle leaves `|x2| <= r0/2`.
    pub stop_outside_half_radius: bool,
    /// Allow `alpha <= 2`.
    pub exploratory: bool,
}

pub fn r0_for(eps: f64, alpha: f64) -> f64 {
    eps.ln().abs().powf(alpha)
}

impl SimParams {
    pub fn new(eps: f64, alpha: f64) -> Result<Self> {
        let p = Self {
            eps,
            alpha,
            gamma: 2.0,
            m_bound: None,
            r0: r0_for(eps, alpha),
            dt: 0.01,
            horizon: 1.0,
            delta: None,
            particles_per_blob: 1000,
            quad_tol: 1e-10,
            stepper: "rigid-core".into(),
            stop_outside_half_radius: false,
            exploratory: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Configuration(m));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return cfg(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.exploratory {
            if !(self.alpha > 0.0) {
                return cfg(format!("alpha must be positive, got {}", self.alpha));
            }
        } else if !(self.alpha > 2.0) {
            return cfg(format!(
                "alpha must exceed 2 outside exploratory mode, got {}",
                self.alpha
            ));
        }
        if self.r0 != r0_for(self.eps, self.alpha) {
            return cfg(format!(
                "r0 = {} does not equal |ln eps|^alpha = {}",
                self.r0,
                r0_for(self.eps, self.alpha)
            ));
        }
        if !(self.gamma > 0.0) {
            return cfg(format!("gamma must be positive, got {}", self.gamma));
        }
        if let Some(m) = self.m_bound {
            if !(m > 0.0) {
                return cfg(format!("m_bound must be positive, got {m}"));
            }
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return cfg(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return cfg(format!("horizon must be nonnegative, got {}", self.horizon));
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0) || !d.is_finite() {
                return cfg(format!("delta must be nonnegative, got {d}"));
            }
        }
        if self.particles_per_blob == 0 {
            return cfg("particles_per_blob must be at least 1".into());
        }
        if !(self.quad_tol > 0.0) {
            return cfg(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        Ok(())
    }

    /// Radial width of the polar-grid rings.
    pub fn spacing(&self) -> f64 {
        self.eps / polar_layout(self.particles_per_blob).len() as f64
    }

    pub fn resolved_delta(&self) -> f64 {
        self.delta.unwrap_or(0.5 * self.spacing())
    }
}

/// One blob: particles with fixed circulation weights of a common sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleBlob {
    pub blob_index: usize,
    pub positions: Vec<PlanarVec>,
    pub weights: Vec<f64>,
    pub intensity: f64,
    pub sign: i8,
}

impl ParticleBlob {
    /// Builds a blob from positions and weights; the intensity is the
    /// sequential sum of the weights.
    pub fn new(blob_index: usize, positions: Vec<PlanarVec>, weights: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != weights.len() {
            return Err(Error::Configuration(format!(
                "blob {blob_index}: {} positions, {} weights",
                positions.len(),
                weights.len()
            )));
        }
        let intensity: f64 = weights.iter().sum();
        if intensity == 0.0 {
            return Err(Error::DegenerateBlob(blob_index));
        }
        let sign: i8 = if intensity > 0.0 { 1 } else { -1 };
        if let Some(p) = weights
            .iter()
            .position(|&w| !w.is_finite() || w == 0.0 || (w > 0.0) != (sign > 0))
        {
            return Err(Error::Configuration(format!(
                "blob {blob_index} particle {p}: weight {} does not share the blob sign",
                weights[p]
            )));
        }
        Ok(Self {
            blob_index,
            positions,
            weights,
            intensity,
            sign,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `a^-1 Σ w_p x_p`.
    pub fn center(&self) -> PlanarVec {
        let mut c = PlanarVec::ZERO;
        for (x, &w) in self.positions.iter().zip(&self.weights) {
            c += w * *x;
        }
        c * (1.0 / self.intensity)
    }
}

/// Ring layout of the unit disk: `(inner, outer, cells)` per ring, equal
/// radial widths, cells of near-equal area.
pub(crate) fn polar_layout(n: usize) -> Vec<(f64, f64, usize)> {
    let mut rings = ((n as f64 / PI).sqrt().round() as usize).max(1);
    // At least three cells per ring keeps every ring balanced about the
    // centre, including its second moments.
    while rings > 1 && n < 3 * rings {
        rings -= 1;
    }
    if rings == 1 {
        return vec![(0.0, 1.0, n)];
    }
    let total = (rings * rings) as f64;
    let mut counts: Vec<usize> = Vec::with_capacity(rings);
    let mut fracs: Vec<(f64, usize)> = Vec::new();
    for k in 0..rings {
        let share = n as f64 * (2 * k + 1) as f64 / total;
        counts.push((share.floor() as usize).max(3));
        fracs.push((share - share.floor(), k));
    }
    let mut assigned: usize = counts.iter().sum();
    // Largest-remainder apportionment, then trim the fullest rings if the
    // minimum of three overshot.
    fracs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut idx = 0;
    while assigned < n {
        counts[fracs[idx % fracs.len()].1] += 1;
        assigned += 1;
        idx += 1;
    }
    while assigned > n {
        let k = (0..rings).max_by_key(|&k| (counts[k], k)).unwrap();
        counts[k] -= 1;
        assigned -= 1;
    }
    let h = 1.0 / rings as f64;
    (0..rings)
        .map(|k| (k as f64 * h, (k + 1) as f64 * h, counts[k]))
        .collect()
}

/// Uniform-vorticity disks of radius `ε` about `centers`, sampled on a polar
/// grid.
pub fn init_blobs(
    params: &SimParams,
    centers: &[PlanarVec],
    intensities: &[f64],
) -> Result<Vec<ParticleBlob>> {
    params.validate()?;
    if centers.is_empty() || centers.len() != intensities.len() {
        return Err(Error::Configuration(format!(
            "{} centers but {} intensities",
            centers.len(),
            intensities.len()
        )));
    }
    let eps = params.eps;
    for (i, (&c, &a)) in centers.iter().zip(intensities).enumerate() {
        if !c.is_finite() {
            return Err(Error::Configuration(format!("blob {i}: non-finite center")));
        }
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Configuration(format!("blob {i}: intensity {a}")));
        }
        if params.r0 + c.x2 - eps <= 0.0 {
            return Err(Error::Configuration(format!(
                "blob {i} reaches the symmetry axis (r0 + x2 - eps = {})",
                params.r0 + c.x2 - eps
            )));
        }
        for (j, &d) in centers.iter().enumerate().skip(i + 1) {
            let sep = (c - d).norm();
            if sep <= 2.0 * eps {
                return Err(Error::Configuration(format!(
                    "blobs {i} and {j} overlap: separation {sep} <= 2 eps = {}",
                    2.0 * eps
                )));
            }
        }
    }
    let a_max = intensities.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let m_bound = params.m_bound.unwrap_or(1.01 * a_max / PI);
    let cap = m_bound * eps.powf(-params.gamma);
    let peak = a_max / (PI * eps * eps);
    if peak > cap {
        return Err(Error::Configuration(format!(
            "peak vorticity {peak:e} exceeds M eps^-gamma = {cap:e}"
        )));
    }

    let layout = polar_layout(params.particles_per_blob);
    let mut blobs = Vec::with_capacity(centers.len());
    for (i, (&c, &a)) in centers.iter().zip(intensities).enumerate() {
        let mut pos = Vec::with_capacity(params.particles_per_blob);
        let mut w = Vec::with_capacity(params.particles_per_blob);
        for (k, &(r_in, r_out, m)) in layout.iter().enumerate() {
            let area_frac = (r_out * r_out - r_in * r_in) / m as f64;
            let rho = if m == 1 {
                0.0
            } else {
                eps * (0.5 * (r_in * r_in + r_out * r_out)).sqrt()
            };
            let offset = if k % 2 == 1 { 0.5 } else { 0.0 };
            for j in 0..m {
                let th = 2.0 * PI * (j as f64 + offset) / m as f64;
                let (s, co) = th.sin_cos();
                pos.push(c + PlanarVec::new(rho * co, rho * s));
                w.push(a * area_frac);
            }
        }
        // Make the sequential sum of weights equal a_i exactly.
        let last = w.len() - 1;
        for _ in 0..4 {
            let s: f64 = w.iter().sum();
            if s == a {
                break;
            }
            w[last] += a - s;
        }
        let blob = ParticleBlob::new(i, pos, w)?;
        if blob.intensity != a {
            return Err(Error::Configuration(format!(
                "blob {i}: weights sum to {} instead of {a}",
                blob.intensity
            )));
        }
        blobs.push(blob);
    }
    Ok(blobs)
}

/// Axis and regime checks on current particle positions.
pub(crate) fn check_positions(blobs: &[ParticleBlob], params: &SimParams) -> Result<()> {
    for b in blobs {
        for (p, x) in b.positions.iter().enumerate() {
            let r = params.r0 + x.x2;
            if !(r > 0.0) || !x.is_finite() {
                return Err(Error::AxisCollision {
                    blob: b.blob_index,
                    particle: p,
                    radius: r,
                });
            }
            if params.stop_outside_half_radius && x.x2.abs() > 0.5 * params.r0 {
                return Err(Error::RegimeExit {
                    blob: b.blob_index,
                    particle: p,
                    x2: x.x2,
                    limit: 0.5 * params.r0,
                });
            }
        }
    }
    Ok(())
}
