//! Particle sums of the axisymmetric kernel.

use rayon::prelude::*;

use super::{ParticleBlob, SimParams};
use crate::error::{Error, Result};
use crate::kernel::green::RingKernel;
use crate::vec2::PlanarVec;

/// External field on blob `i` split into its planar part `f1` and the
/// curvature correction `f2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSplit {
    pub f1: PlanarVec,
    pub f2: PlanarVec,
}

impl FieldSplit {
    pub fn total(&self) -> PlanarVec {
        self.f1 + self.f2
    }
}

pub(crate) fn kernel_for(params: &SimParams, delta: f64) -> Result<RingKernel> {
    let k = RingKernel::new(params.r0, delta);
    let err = k.table_error();
    if err > params.quad_tol {
        return Err(Error::Accuracy {
            requested: params.quad_tol,
            achieved: err,
        });
    }
    Ok(k)
}

fn check_point(point: PlanarVec, params: &SimParams) -> Result<()> {
    if !(params.r0 + point.x2 > 0.0) || !point.is_finite() {
        return Err(Error::Domain(format!(
            "nonpositive radius r0 + x2 = {} at the evaluation point",
            params.r0 + point.x2
        )));
    }
    Ok(())
}

/// `Σ_q w_q G_δ(point, x_q)` over every particle, with the blob smoothing
/// length from `params`. With `δ = 0` a particle sitting at `point` is skipped.
pub fn induced_velocity(
    blobs: &[ParticleBlob],
    point: PlanarVec,
    params: &SimParams,
) -> Result<PlanarVec> {
    check_point(point, params)?;
    let k = kernel_for(params, params.resolved_delta())?;
    let mut v = PlanarVec::ZERO;
    for b in blobs {
        for (x, &w) in b.positions.iter().zip(&b.weights) {
            if let Some(g) = k.g(point, *x) {
                v += w * g;
            }
        }
    }
    Ok(v)
}

/// Field of the blobs `j != i` at `point`: `f1` from `K`, `f2` from `G - K`,
/// both unregularized.
pub fn external_field_split(
    blobs: &[ParticleBlob],
    i: usize,
    point: PlanarVec,
    params: &SimParams,
) -> Result<FieldSplit> {
    if i >= blobs.len() {
        return Err(Error::Domain(format!(
            "blob index {i} out of range for {} blobs",
            blobs.len()
        )));
    }
    check_point(point, params)?;
    let k = kernel_for(params, 0.0)?;
    let mut f1 = PlanarVec::ZERO;
    let mut f2 = PlanarVec::ZERO;
    for b in blobs.iter().filter(|b| b.blob_index != i) {
        for (x, &w) in b.positions.iter().zip(&b.weights) {
            if let Some(gk) = k.g_minus_k(point, *x) {
                f1 += w * k.k(point, *x);
                f2 += w * gk;
            }
        }
    }
    Ok(FieldSplit { f1, f2 })
}

/// Which part of the field a particle feels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FieldPart {
    /// `G_δ` from every particle.
    Full,
    /// `G_δ` from other blobs plus `(G - K)_δ` from the particle's own blob.
    Slow,
}

/// Flat particle arrays with blob ranges.
#[derive(Debug, Clone)]
pub(crate) struct Flat {
    pub positions: Vec<PlanarVec>,
    pub weights: Vec<f64>,
    /// Blob `b` spans `offsets[b]..offsets[b + 1]`.
    pub offsets: Vec<usize>,
}

impl Flat {
    pub fn from_blobs(blobs: &[ParticleBlob]) -> Self {
        let mut offsets = vec![0];
        let mut positions = Vec::new();
        let mut weights = Vec::new();
        for b in blobs {
            positions.extend_from_slice(&b.positions);
            weights.extend_from_slice(&b.weights);
            offsets.push(positions.len());
        }
        Self {
            positions,
            weights,
            offsets,
        }
    }

    pub fn blob_of(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.positions.len());
        for b in 0..self.offsets.len() - 1 {
            out.extend(std::iter::repeat_n(b, self.offsets[b + 1] - self.offsets[b]));
        }
        out
    }

    /// Writes positions back into blobs of the same shape.
    pub fn scatter(&self, positions: &[PlanarVec], blobs: &[ParticleBlob]) -> Vec<ParticleBlob> {
        blobs
            .iter()
            .enumerate()
            .map(|(b, blob)| ParticleBlob {
                positions: positions[self.offsets[b]..self.offsets[b + 1]].to_vec(),
                ..blob.clone()
            })
            .collect()
    }
}

/// Velocity of every particle at `positions` (same layout as `flat`).
/// Parallel over targets; each target sums its sources in index order, so
/// the result does not depend on the number of workers.
pub(crate) fn particle_velocities(
    k: &RingKernel,
    flat: &Flat,
    blob_of: &[usize],
    positions: &[PlanarVec],
    part: FieldPart,
) -> Vec<PlanarVec> {
    let w = &flat.weights;
    (0..positions.len())
        .into_par_iter()
        .map(|p| {
            let x = positions[p];
            let own = blob_of[p];
            let mut v = PlanarVec::ZERO;
            for b in 0..flat.offsets.len() - 1 {
                let range = flat.offsets[b]..flat.offsets[b + 1];
                if part == FieldPart::Slow && b == own {
                    for q in range {
                        if let Some(g) = k.g_minus_k(x, positions[q]) {
                            v += w[q] * g;
                        }
                    }
                } else {
                    for q in range {
                        if let Some(g) = k.g(x, positions[q]) {
                            v += w[q] * g;
                        }
                    }
                }
            }
            v
        })
        .collect()
}
