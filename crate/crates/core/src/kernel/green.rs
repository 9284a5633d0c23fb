//! Planar kernel `K`, axisymmetric kernel `G` in shifted coordinates, and the
//! measured `G - K` ratio.

use std::f64::consts::PI;
use std::sync::Arc;

use super::quadrature::Tolerance;
use super::special::{log_part, theta_integral, ChebyshevTable, SpecialEvaluator, SplitEvaluator};
use crate::error::{Error, Result};
use crate::vec2::PlanarVec;

const INV_2PI: f64 = 0.5 / PI;

/// `K(x) = -(1/2π) ∇⊥ log|x| = (1/2π)(-x2, x1)/|x|²`.
pub fn eval_k(x: PlanarVec) -> Result<PlanarVec> {
    let n2 = x.norm_sq();
    if n2 == 0.0 {
        return Err(Error::Singularity("K evaluated at the origin".into()));
    }
    Ok(x.perp() * (INV_2PI / n2))
}

/// `K` with `|x|²` replaced by `|x|² + δ²`.
#[inline]
pub fn eval_k_regularized(x: PlanarVec, delta2: f64) -> PlanarVec {
    let n2 = x.norm_sq() + delta2;
    if n2 == 0.0 {
        return PlanarVec::ZERO;
    }
    x.perp() * (INV_2PI / n2)
}

/// Shifted radii `(r0 + x2, r0 + y2)`, checked positive.
fn radii(x: PlanarVec, y: PlanarVec, r0: f64) -> Result<(f64, f64)> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::Domain(format!("r0 must be positive, got {r0}")));
    }
    let rx = r0 + x.x2;
    let ry = r0 + y.x2;
    if !(rx > 0.0) || !(ry > 0.0) {
        return Err(Error::Domain(format!(
            "nonpositive radius: r0 + x2 = {rx}, r0 + y2 = {ry}"
        )));
    }
    Ok((rx, ry))
}

fn separation_sq(x: PlanarVec, y: PlanarVec, delta: f64) -> Result<f64> {
    let d2 = (x - y).norm_sq() + delta * delta;
    if d2 == 0.0 {
        return Err(Error::Singularity("G evaluated at x = y".into()));
    }
    Ok(d2)
}

/// Closed-form `G(x, y)` through `I1`, `I2` with the given evaluator;
/// `delta` regularizes `|x - y|²` inside the θ-integral.
pub fn eval_g_with(
    ev: &dyn SpecialEvaluator,
    x: PlanarVec,
    y: PlanarVec,
    r0: f64,
    delta: f64,
) -> Result<PlanarVec> {
    let (rx, ry) = radii(x, y, r0)?;
    let d2 = separation_sq(x, y, delta)?;
    let a = (d2 / (rx * ry)).sqrt();
    let sp = ev.eval(a)?;
    let pre = INV_2PI / (rx * (rx * ry).sqrt());
    Ok(PlanarVec::new(
        pre * ((y.x2 - x.x2) * sp.i1 + ry * sp.i2),
        pre * (x.x1 - y.x1) * sp.i1,
    ))
}

/// `G(x, y)` with no regularization, using the shared Chebyshev table.
pub fn eval_g(x: PlanarVec, y: PlanarVec, r0: f64) -> Result<PlanarVec> {
    eval_g_with(ChebyshevTable::shared().as_ref(), x, y, r0, 0.0)
}

/// `G(x, y) - K_δ(x - y)` through the remainders `R1`, `R2`, without forming
/// the two large terms separately.
pub fn eval_g_minus_k_with(
    ev: &dyn SpecialEvaluator,
    x: PlanarVec,
    y: PlanarVec,
    r0: f64,
    delta: f64,
) -> Result<PlanarVec> {
    let (rx, ry) = radii(x, y, r0)?;
    let d2 = separation_sq(x, y, delta)?;
    let a = (d2 / (rx * ry)).sqrt();
    let sp = ev.eval(a)?;
    Ok(g_minus_k_from(x, y, rx, ry, d2, sp.r1, sp.i2))
}

#[inline]
fn g_minus_k_from(x: PlanarVec, y: PlanarVec, rx: f64, ry: f64, d2: f64, r1: f64, i2: f64) -> PlanarVec {
    let ratio = (ry / rx).sqrt();
    let a_minus_1 = (y.x2 - x.x2) / (rx * (1.0 + ratio));
    let pre = 1.0 / (rx * (rx * ry).sqrt());
    let dy = y.x2 - x.x2;
    let dx = x.x1 - y.x1;
    PlanarVec::new(
        INV_2PI * (dy * a_minus_1 / d2 + dy * r1 * pre + ratio / rx * i2),
        INV_2PI * (dx * a_minus_1 / d2 + dx * r1 * pre),
    )
}

/// `G(x, y) - K(x - y)` with the shared table and no regularization.
pub fn eval_g_minus_k(x: PlanarVec, y: PlanarVec, r0: f64) -> Result<PlanarVec> {
    eval_g_minus_k_with(ChebyshevTable::shared().as_ref(), x, y, r0, 0.0)
}

/// Oracle value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: PlanarVec,
    pub err_est: f64,
}

/// `G(x, y)` by direct adaptive quadrature of the defining θ-integrals.
pub fn eval_g_oracle(x: PlanarVec, y: PlanarVec, r0: f64, tol: f64) -> Result<OracleValue> {
    eval_g_oracle_regularized(x, y, r0, 0.0, tol)
}

/// Regularized variant of [`eval_g_oracle`].
pub fn eval_g_oracle_regularized(
    x: PlanarVec,
    y: PlanarVec,
    r0: f64,
    delta: f64,
    tol: f64,
) -> Result<OracleValue> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (rx, ry) = radii(x, y, r0)?;
    let d2 = separation_sq(x, y, delta)?;
    let rr = rx * ry;
    let a2 = d2 / rr;
    let a = a2.sqrt();
    let dy = y.x2 - x.x2;
    let dx = x.x1 - y.x1;
    let scale = INV_2PI * ry / (rr * rr.sqrt());

    // Numerators n(c, 1 - c) = alpha + beta c.
    let n1 = move |_c: f64, omc: f64| scale * (dy + rx * omc);
    let n2 = move |c: f64, _omc: f64| scale * dx * c;
    let run = |which: u8, tol: Tolerance| -> Result<(f64, f64)> {
        let q = if which == 1 {
            theta_integral(a, scale * ry, -scale * rx, &n1, tol)?
        } else {
            theta_integral(a, 0.0, scale * dx, &n2, tol)?
        };
        Ok((q.value, q.err))
    };

    // Coarse pass fixes an absolute scale so that a component that is small
    // compared with the other does not demand an impossible relative accuracy.
    let coarse = Tolerance::relative(1e-6);
    let (g1c, _) = run(1, coarse)?;
    let (g2c, _) = run(2, coarse)?;
    let mag = g1c.hypot(g2c);
    let fine = Tolerance {
        abs: 0.5 * tol * mag,
        rel: tol,
        max_segments: 4000,
    };
    let (g1, e1) = run(1, fine)?;
    let (g2, e2) = run(2, fine)?;
    Ok(OracleValue {
        value: PlanarVec::new(g1, g2),
        err_est: e1.hypot(e2),
    })
}

/// `|G(x,y) - K(x-y)|` divided by
/// `|log ε|^{-α} (1 + log|log ε| + |log|x-y|| χ(0,1)(|x-y|))`.
pub fn difference_ratio(x: PlanarVec, y: PlanarVec, eps: f64, alpha: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let l = eps.ln().abs();
    let r0 = l.powf(alpha);
    if x.x2.abs() > 0.5 * r0 || y.x2.abs() > 0.5 * r0 {
        return Err(Error::Domain(format!(
            "points must satisfy |x2|, |y2| <= r0/2 = {}",
            0.5 * r0
        )));
    }
    let sep = (x - y).norm();
    if sep == 0.0 {
        return Err(Error::Singularity("difference ratio at x = y".into()));
    }
    let diff = eval_g_minus_k(x, y, r0)?.norm();
    let near = if sep < 1.0 { sep.ln().abs() } else { 0.0 };
    let bracket = l.powf(-alpha) * (1.0 + l.ln() + near);
    Ok(diff / bracket)
}

/// Hot-path kernel for particle sums: fixed `r0` and `δ`, shared table,
/// no per-call validation (callers check the radii once per step).
#[derive(Clone)]
pub struct RingKernel {
    pub r0: f64,
    pub delta2: f64,
    table: Arc<ChebyshevTable>,
}

impl RingKernel {
    pub fn new(r0: f64, delta: f64) -> Self {
        Self {
            r0,
            delta2: delta * delta,
            table: ChebyshevTable::shared(),
        }
    }

    /// Largest fit error of the special-function table behind this kernel.
    pub fn table_error(&self) -> f64 {
        self.table.max_build_error()
    }

    #[inline]
    fn remainders(&self, a: f64) -> (f64, f64) {
        match self.table.remainders(a) {
            Some(r) => r,
            None => {
                let sp = SplitEvaluator
                    .eval(a)
                    .expect("kernel argument validated by caller");
                (sp.r1, sp.r2)
            }
        }
    }

    /// `G_δ(x, y)`; `None` when `x = y` and `δ = 0`.
    #[inline]
    pub fn g(&self, x: PlanarVec, y: PlanarVec) -> Option<PlanarVec> {
        let rx = self.r0 + x.x2;
        let ry = self.r0 + y.x2;
        let d2 = (x - y).norm_sq() + self.delta2;
        if d2 == 0.0 {
            return None;
        }
        let rr = rx * ry;
        let a2 = d2 / rr;
        let a = a2.sqrt();
        let (r1, r2) = self.remainders(a);
        let i1 = 1.0 / a2 + r1;
        let i2 = log_part(a) + r2;
        let pre = INV_2PI / (rx * rr.sqrt());
        Some(PlanarVec::new(
            pre * ((y.x2 - x.x2) * i1 + ry * i2),
            pre * (x.x1 - y.x1) * i1,
        ))
    }

    /// `G_δ(x, y) - K_δ(x - y)`; `None` when `x = y` and `δ = 0`.
    #[inline]
    pub fn g_minus_k(&self, x: PlanarVec, y: PlanarVec) -> Option<PlanarVec> {
        let rx = self.r0 + x.x2;
        let ry = self.r0 + y.x2;
        let d2 = (x - y).norm_sq() + self.delta2;
        if d2 == 0.0 {
            return None;
        }
        let a = (d2 / (rx * ry)).sqrt();
        let (r1, r2) = self.remainders(a);
        Some(g_minus_k_from(x, y, rx, ry, d2, r1, log_part(a) + r2))
    }

    /// `K_δ(x - y)`; zero when `x = y` and `δ = 0`.
    #[inline]
    pub fn k(&self, x: PlanarVec, y: PlanarVec) -> PlanarVec {
        eval_k_regularized(x - y, self.delta2)
    }
}
