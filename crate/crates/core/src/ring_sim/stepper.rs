//! Time steppers for the particle system.

use std::f64::consts::PI;

use super::velocity::{kernel_for, particle_velocities, FieldPart, Flat};
use super::{check_positions, ParticleBlob, SimParams};
use crate::error::Result;
use crate::point_vortex::time_grid;
use crate::vec2::PlanarVec;

/// A scheme advancing all particles by one step of length `dt`.
pub trait Stepper: Send + Sync {
    fn name(&self) -> &'static str;
    fn step(&self, blobs: &[ParticleBlob], params: &SimParams, dt: f64)
        -> Result<Vec<ParticleBlob>>;
}

/// Classical RK4 with every particle moved by the full regularized field.
/// The step must resolve the core rotation rate `|a| / (2π ε²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4Stepper;

/// Splits the own-blob planar interaction from the rest. A uniform disk
/// rotates rigidly under its own `K` field at `Ω = a / (2π ε²)`, so that part
/// is applied as an exact rotation about the blob center (half a step before
/// and after); every particle moves under the slow field (other blobs'
/// `G_δ` plus own blob `(G - K)_δ`) by one RK4 step in between. The step only
/// has to resolve the slow field.
#[derive(Debug, Clone, Copy, Default)]
pub struct RigidCoreStepper;

fn rk4(
    blobs: &[ParticleBlob],
    params: &SimParams,
    dt: f64,
    part: FieldPart,
) -> Result<Vec<ParticleBlob>> {
    check_positions(blobs, params)?;
    let k = kernel_for(params, params.resolved_delta())?;
    let flat = Flat::from_blobs(blobs);
    let blob_of = flat.blob_of();
    let x0 = &flat.positions;
    let shift = |k: &[PlanarVec], h: f64| -> Vec<PlanarVec> {
        x0.iter().zip(k).map(|(x, v)| *x + h * *v).collect()
    };
    let checked = |x: Vec<PlanarVec>| -> Result<Vec<PlanarVec>> {
        check_positions(&flat.scatter(&x, blobs), params)?;
        Ok(x)
    };
    let k1 = particle_velocities(&k, &flat, &blob_of, x0, part);
    let x1 = checked(shift(&k1, 0.5 * dt))?;
    let k2 = particle_velocities(&k, &flat, &blob_of, &x1, part);
    let x2 = checked(shift(&k2, 0.5 * dt))?;
    let k3 = particle_velocities(&k, &flat, &blob_of, &x2, part);
    let x3 = checked(shift(&k3, dt))?;
    let k4 = particle_velocities(&k, &flat, &blob_of, &x3, part);
    let next: Vec<PlanarVec> = (0..x0.len())
        .map(|p| x0[p] + (dt / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]))
        .collect();
    let out = flat.scatter(&next, blobs);
    check_positions(&out, params)?;
    Ok(out)
}

impl Stepper for Rk4Stepper {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn step(&self, blobs: &[ParticleBlob], params: &SimParams, dt: f64) -> Result<Vec<ParticleBlob>> {
        rk4(blobs, params, dt, FieldPart::Full)
    }
}

/// Core rotation rate of blob `b`.
pub fn core_rate(b: &ParticleBlob, eps: f64) -> f64 {
    b.intensity / (2.0 * PI * eps * eps)
}

fn rotate_cores(blobs: &[ParticleBlob], eps: f64, dt: f64) -> Vec<ParticleBlob> {
    blobs
        .iter()
        .map(|b| {
            let c = b.center();
            let angle = core_rate(b, eps) * dt;
            ParticleBlob {
                positions: b
                    .positions
                    .iter()
                    .map(|x| c + (*x - c).rotated(angle))
                    .collect(),
                ..b.clone()
            }
        })
        .collect()
}

impl Stepper for RigidCoreStepper {
    fn name(&self) -> &'static str {
        "rigid-core"
    }

    fn step(&self, blobs: &[ParticleBlob], params: &SimParams, dt: f64) -> Result<Vec<ParticleBlob>> {
        check_positions(blobs, params)?;
        let half = rotate_cores(blobs, params.eps, 0.5 * dt);
        let moved = rk4(&half, params, dt, FieldPart::Slow)?;
        let out = rotate_cores(&moved, params.eps, 0.5 * dt);
        check_positions(&out, params)?;
        Ok(out)
    }
}

/// One RK4 step of `params.dt` under the full field.
pub fn advance(blobs: &[ParticleBlob], params: &SimParams) -> Result<Vec<ParticleBlob>> {
    Rk4Stepper.step(blobs, params, params.dt)
}

/// Runs `stepper` over `[0, params.horizon]` on the shared step grid, calling
/// `observe(t, blobs)` at the start and after every step.
pub fn integrate<F>(
    blobs: &[ParticleBlob],
    params: &SimParams,
    stepper: &dyn Stepper,
    mut observe: F,
) -> Result<Vec<ParticleBlob>>
where
    F: FnMut(f64, &[ParticleBlob]) -> Result<()>,
{
    params.validate()?;
    check_positions(blobs, params)?;
    let grid = time_grid(0.0, params.horizon, params.dt);
    let mut cur = blobs.to_vec();
    observe(grid[0], &cur)?;
    for w in grid.windows(2) {
        cur = stepper.step(&cur, params, w[1] - w[0])?;
        observe(w[1], &cur)?;
    }
    Ok(cur)
}
