//! Blob moments, mass tails, mollified masses and the theoretical bound
//! expressions tracked along a run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_vortex::PointVortexState;
use crate::ring_sim::{ParticleBlob, SimParams};
use crate::vec2::PlanarVec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobMoments {
    pub center: PlanarVec,
    /// `Σ |w_p| |x_p - center|²`.
    pub inertia: f64,
    /// `max |x_p - center|`.
    pub support_radius: f64,
}

fn check_blob(blob: &ParticleBlob) -> Result<()> {
    if blob.is_empty() {
        return Err(Error::Domain(format!("blob {} has no particles", blob.blob_index)));
    }
    if blob.intensity == 0.0 {
        return Err(Error::DegenerateBlob(blob.blob_index));
    }
    Ok(())
}

pub fn blob_moments(blob: &ParticleBlob) -> Result<BlobMoments> {
    check_blob(blob)?;
    let center = blob.center();
    let mut inertia = 0.0;
    let mut support_radius = 0.0f64;
    for (x, &w) in blob.positions.iter().zip(&blob.weights) {
        let d2 = (*x - center).norm_sq();
        inertia += w.abs() * d2;
        support_radius = support_radius.max(d2.sqrt());
    }
    Ok(BlobMoments {
        center,
        inertia,
        support_radius,
    })
}

/// Distances from the center with mass fractions `|w_p| / |a|`.
fn radial_masses(blob: &ParticleBlob) -> Result<Vec<(f64, f64)>> {
    check_blob(blob)?;
    let c = blob.center();
    let a = blob.intensity.abs();
    Ok(blob
        .positions
        .iter()
        .zip(&blob.weights)
        .map(|(x, &w)| ((*x - c).norm(), w.abs() / a))
        .collect())
}

/// Fraction of `|ω|` strictly farther than `r` from the center.
pub fn mass_tail(blob: &ParticleBlob, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    Ok(tail_of(&radial_masses(blob)?, r))
}

fn tail_of(masses: &[(f64, f64)], r: f64) -> f64 {
    let mut m = 0.0;
    for &(d, f) in masses {
        if d > r {
            m += f;
        }
    }
    m
}

/// Radius and width of the bump `W_{R,h}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierParams {
    pub radius: f64,
    pub width: f64,
}

impl MollifierParams {
    pub fn new(radius: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain(format!("width must be positive, got {width}")));
        }
        if !(radius >= 2.0 * width) || !radius.is_finite() {
            return Err(Error::Domain(format!(
                "radius {radius} must be at least twice the width {width}"
            )));
        }
        Ok(Self { radius, width })
    }
}

/// Quintic smoothstep falling from 1 at `s <= 0` to 0 at `s >= 1`.
pub fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `W_{R,h}` as a function of `|x|`: exactly 1 for `|x| <= R` and exactly 0
/// for `|x| >= R + h`.
pub fn bump(m: MollifierParams, dist: f64) -> f64 {
    if dist <= m.radius {
        1.0
    } else if dist >= m.radius + m.width {
        0.0
    } else {
        psi((dist - m.radius) / m.width)
    }
}

/// `Σ (|w_p| / |a|) (1 - W_{R,h}(x_p - center))`.
pub fn mollified_mass(blob: &ParticleBlob, m: MollifierParams) -> Result<f64> {
    let m = MollifierParams::new(m.radius, m.width)?;
    Ok(mollified_of(&radial_masses(blob)?, m))
}

fn mollified_of(masses: &[(f64, f64)], m: MollifierParams) -> f64 {
    let mut mu = 0.0;
    for &(d, f) in masses {
        mu += f * (1.0 - bump(m, d));
    }
    mu
}

/// The three sides of `μ(R, h) <= m(R) <= μ(R - h, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub mass: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        self.lower <= self.mass && self.mass <= self.upper
    }
}

/// Evaluates both mollified masses and the tail at `R`. The inner radius is
/// the largest float `R'` with `R' + h <= R` in floating point, so rounding
/// in `R - h` cannot move the outer edge of the inner bump past `R`.
pub fn sandwich(blob: &ParticleBlob, radius: f64, width: f64) -> Result<Sandwich> {
    let outer = MollifierParams::new(radius, width)?;
    let mut r_in = radius - width;
    while r_in + width > radius {
        r_in = r_in.next_down();
    }
    // R - h may sit below 2h; only the outer radius carries that hypothesis.
    let inner = MollifierParams {
        radius: r_in,
        width,
    };
    let masses = radial_masses(blob)?;
    Ok(Sandwich {
        lower: mollified_of(&masses, outer),
        mass: tail_of(&masses, radius),
        upper: mollified_of(&masses, inner),
    })
}

/// Bound constants, one per tracked quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedConstants {
    pub support: f64,
    pub delta: f64,
    pub inertia: f64,
}

impl FittedConstants {
    pub fn uniform(c: f64) -> Self {
        Self {
            support: c,
            delta: c,
            inertia: c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `(α - 2) / 2`.
    pub k: f64,
    /// `C_T |ln ε|^-k`.
    pub support_bound: f64,
    /// `C |ln ε|^-(α-1)`.
    pub delta_bound: f64,
    /// `C |ln ε|^-2(α-1)`.
    pub inertia_bound: f64,
    pub constants: FittedConstants,
    /// Solution of `C_T |ln ε0|^-k = R_m / 4`; `None` when `R_m` is infinite
    /// (a single blob).
    pub eps0: Option<f64>,
}

pub fn bound_report(params: &SimParams, c: FittedConstants, r_m: f64) -> Result<BoundReport> {
    let (eps, alpha) = (params.eps, params.alpha);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(alpha > 2.0) {
        return Err(Error::Domain(format!(
            "alpha = {alpha} gives k <= 0; the bounds need alpha > 2"
        )));
    }
    let k = 0.5 * (alpha - 2.0);
    let l = eps.ln().abs();
    Ok(BoundReport {
        k,
        support_bound: c.support * l.powf(-k),
        delta_bound: c.delta * l.powf(-(alpha - 1.0)),
        inertia_bound: c.inertia * l.powf(-2.0 * (alpha - 1.0)),
        constants: c,
        eps0: if r_m.is_finite() {
            Some(crate::harness::solve_epsilon0(c.support, r_m, k)?)
        } else {
            None
        },
    })
}

/// `|B_i - z_i|` per blob.
pub fn center_deviations(blobs: &[ParticleBlob], reference: &PointVortexState) -> Result<Vec<f64>> {
    if blobs.len() != reference.len() {
        return Err(Error::Domain(format!(
            "{} blobs against {} reference vortices",
            blobs.len(),
            reference.len()
        )));
    }
    blobs
        .iter()
        .zip(&reference.positions)
        .map(|(b, z)| {
            check_blob(b)?;
            Ok((b.center() - *z).norm())
        })
        .collect()
}

/// `Δ = max_i |B_i - z_i|`.
pub fn pv_deviation(blobs: &[ParticleBlob], reference: &PointVortexState) -> Result<f64> {
    Ok(center_deviations(blobs, reference)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// One row of the diagnostics CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub i: usize,
    #[serde(rename = "B1")]
    pub b1: f64,
    #[serde(rename = "B2")]
    pub b2: f64,
    #[serde(rename = "I")]
    pub inertia: f64,
    #[serde(rename = "Rt")]
    pub rt: f64,
    /// `m(R_t / 2)`.
    #[serde(rename = "m_half_Rt")]
    pub m_half_rt: f64,
    /// `μ(R_t / 2, R_t / 8)`; zero for a blob of zero extent.
    pub mu: f64,
    /// `|B_i - z_i|`.
    pub delta: f64,
    pub support_bound: f64,
    pub delta_bound: f64,
    pub inertia_bound: f64,
}

/// Diagnostics rows for every blob at time `t`, together with the sandwich
/// at `(R_t / 2, R_t / 8)` per blob (`None` when `R_t = 0`).
pub fn records_at(
    t: f64,
    blobs: &[ParticleBlob],
    reference: &PointVortexState,
    bounds: &BoundReport,
) -> Result<(Vec<DiagnosticsRecord>, Vec<Option<Sandwich>>)> {
    let dev = center_deviations(blobs, reference)?;
    let mut rows = Vec::with_capacity(blobs.len());
    let mut sandwiches = Vec::with_capacity(blobs.len());
    for (b, d) in blobs.iter().zip(dev) {
        let mo = blob_moments(b)?;
        let half = 0.5 * mo.support_radius;
        let sw = if mo.support_radius > 0.0 {
            Some(sandwich(b, half, mo.support_radius / 8.0)?)
        } else {
            None
        };
        rows.push(DiagnosticsRecord {
            t,
            i: b.blob_index,
            b1: mo.center.x1,
            b2: mo.center.x2,
            inertia: mo.inertia,
            rt: mo.support_radius,
            m_half_rt: mass_tail(b, half)?,
            mu: sw.map_or(0.0, |s| s.lower),
            delta: d,
            support_bound: bounds.support_bound,
            delta_bound: bounds.delta_bound,
            inertia_bound: bounds.inertia_bound,
        });
        sandwiches.push(sw);
    }
    Ok((rows, sandwiches))
}
