//! The θ-integrals
//!
//! ```text
//! I1(a) = ∫_0^π cos θ / [a² + 2(1 - cos θ)]^{3/2} dθ
//! I2(a) = ∫_0^π (1 - cos θ) / [a² + 2(1 - cos θ)]^{3/2} dθ
//! ```
//!
//! and their remainders `R1 = I1 - a⁻²`, `R2 = I2 + ½ log(a) χ(0,1)(a)`.
//!
//! Three interchangeable evaluators are provided, all behind
//! [`SpecialEvaluator`]:
//!
//! * [`AdaptiveQuadrature`]: direct adaptive integration of the definitions
//!   (slow, independent; used as an oracle).
//! * [`SplitEvaluator`]: exact antiderivatives for the pieces that carry the
//!   `a⁻²` and `log a` singular behaviour, plus fixed Gauss–Kronrod panels for
//!   the bounded remainders.
//! * [`ChebyshevTable`]: piecewise Chebyshev interpolation of `R1`, `R2` in
//!   `log a`, sampled from the split evaluator. This is the one used inside
//!   particle sums.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use std::sync::{Arc, OnceLock};

use super::quadrature::{gk21, integrate, Quad, Tolerance};
use crate::error::{Error, Result};

/// `I1`, `I2` and their remainders at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPair {
    pub a: f64,
    pub i1: f64,
    pub i2: f64,
    pub r1: f64,
    pub r2: f64,
    /// Estimated absolute error on `i1`/`i2` (largest of the two).
    pub err_est: f64,
}

impl SpecialPair {
    /// Assemble from the remainders. `i1 - r1 = a⁻²` and
    /// `i2 - r2 = -½ log(a) χ(0,1)(a)` hold by construction.
    pub fn from_remainders(a: f64, r1: f64, r2: f64, err_est: f64) -> Self {
        Self {
            a,
            i1: a.powi(-2) + r1,
            i2: log_part(a) + r2,
            r1,
            r2,
            err_est,
        }
    }

    /// Assemble from the integrals themselves.
    pub fn from_integrals(a: f64, i1: f64, i2: f64, err_est: f64) -> Self {
        Self {
            a,
            i1,
            i2,
            r1: i1 - a.powi(-2),
            r2: i2 - log_part(a),
            err_est,
        }
    }
}

/// `-½ log(a) χ(0,1)(a)`; the branch boundary sits exactly at `a = 1`.
#[inline]
pub fn log_part(a: f64) -> f64 {
    if a < 1.0 {
        -0.5 * a.ln()
    } else {
        0.0
    }
}

/// A strategy for evaluating [`SpecialPair`].
pub trait SpecialEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn eval(&self, a: f64) -> Result<SpecialPair>;
}

impl<T: SpecialEvaluator + ?Sized> SpecialEvaluator for Arc<T> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn eval(&self, a: f64) -> Result<SpecialPair> {
        (**self).eval(a)
    }
}

pub(crate) fn check_arg(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "special-function argument must be positive and finite, got {a}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Adaptive quadrature of the definitions
// ---------------------------------------------------------------------------

/// Direct adaptive integration of the defining θ-integrals.
///
/// For `a < 1` the stretch `θ ∈ [0, π/2]` is integrated in `z = 2 sin(θ/2)`
/// with breakpoints at geometric multiples of `a`, where the integrand peaks.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveQuadrature {
    pub tol: f64,
}

impl Default for AdaptiveQuadrature {
    fn default() -> Self {
        Self { tol: 1e-12 }
    }
}

/// `∫_0^π n(cos θ, 1 - cos θ) / [a² + 2(1 - cos θ)]^{3/2} dθ` for a
/// numerator `n(c, ·) = alpha + beta c` (the closure evaluates it without
/// cancellation).
///
/// For `a ≥ 1` the `beta c` part is integrated as
/// `beta c [D^{-3/2} - (a²+2)^{-3/2}]`, which has the same integral since
/// `∫_0^π cos θ dθ = 0` but no large cancelling lobes. For `a < 1` the stretch
/// `θ ∈ [0, π/2]` is integrated in `z = 2 sin(θ/2)` with breakpoints at
/// geometric multiples of `a`, where the integrand peaks.
pub(crate) fn theta_integral(
    a: f64,
    alpha: f64,
    beta: f64,
    numer: &dyn Fn(f64, f64) -> f64,
    tol: Tolerance,
) -> Result<Quad> {
    let a2 = a * a;
    let half = Tolerance {
        abs: 0.5 * tol.abs,
        ..tol
    };
    if a >= 1.0 {
        let big_a = a2 + 2.0;
        let f = |th: f64| {
            let c = th.cos();
            let omc = 2.0 * (0.5 * th).sin().powi(2);
            let d = a2 + 2.0 * omc;
            let d32 = d * d.sqrt();
            alpha / d32 + beta * c * inv_pow32_difference(big_a, d, 2.0 * c)
        };
        return integrate(f, &[0.0, FRAC_PI_2, PI], tol);
    }
    let zmax = 2.0 * (PI / 4.0).sin();
    let near = |z: f64| {
        let z2 = z * z;
        let omc = 0.5 * z2;
        let d = a2 + z2;
        numer(1.0 - omc, omc) / (d * d.sqrt() * (1.0 - 0.25 * z2).sqrt())
    };
    let mut bps = vec![0.0];
    let mut b = 0.125 * a;
    while b < zmax {
        bps.push(b);
        b *= 4.0;
    }
    bps.push(zmax);
    let far = |th: f64| {
        let c = th.cos();
        let omc = 2.0 * (0.5 * th).sin().powi(2);
        let d = a2 + 2.0 * omc;
        numer(c, omc) / (d * d.sqrt())
    };
    Ok(integrate(near, &bps, half)? + integrate(far, &[FRAC_PI_2, PI], half)?)
}

/// `D^{-3/2} - A^{-3/2}` given `A - D = 2 cos θ` directly, via
/// `(A³ - D³) / ((A^{3/2} + D^{3/2}) A^{3/2} D^{3/2})`.
#[inline]
fn inv_pow32_difference(big_a: f64, d: f64, diff: f64) -> f64 {
    let a32 = big_a * big_a.sqrt();
    let d32 = d * d.sqrt();
    diff * (big_a * big_a + big_a * d + d * d) / ((a32 + d32) * a32 * d32)
}

impl SpecialEvaluator for AdaptiveQuadrature {
    fn name(&self) -> &'static str {
        "adaptive"
    }

    fn eval(&self, a: f64) -> Result<SpecialPair> {
        check_arg(a)?;
        let tol = Tolerance::relative(self.tol);
        let q1 = theta_integral(a, 0.0, 1.0, &|c, _| c, tol)?;
        let q2 = theta_integral(a, 1.0, -1.0, &|_, omc| omc, tol)?;
        Ok(SpecialPair::from_integrals(
            a,
            q1.value,
            q2.value,
            q1.err.max(q2.err),
        ))
    }
}

// ---------------------------------------------------------------------------
// Antiderivatives + smooth remainders
// ---------------------------------------------------------------------------

/// Closed-form pieces plus quadrature of bounded remainders.
///
/// For `a < 1`, with `c = cos(θ/2)`:
///
/// ```text
/// I2 = ∫ 2 sin²(θ/2) c / D^{3/2}  +  P2,      P2 = ∫ 2 sin²(θ/2)(1 - c) / D^{3/2}
/// I1 = ∫ c / D^{3/2}              +  P1,      P1 = ∫ (cos θ - c) / D^{3/2}
/// ```
///
/// The first terms integrate exactly under `z = 2 sin(θ/2)`. `P1`, `P2` are
/// integrated on `θ ∈ [0, π/4]` in the variable `2 sin(θ/2) = a sinh t`, where
/// their integrands become `tanh² t · g(cos(θ/2))`; the constant `g(1)` part
/// integrates exactly and what is left is smooth and decays away from the
/// panel end. The rest of the θ range is a single smooth panel.
///
/// For `a ≥ 1` the integrands are analytic and 2π-periodic in θ, so the
/// trapezoidal rule converges geometrically; the estimate compares `N` and
/// `N/2` points.
#[derive(Debug, Clone, Copy, Default)]
pub struct SplitEvaluator;

const TRAPEZOID_POINTS: usize = 48;
const SPLIT_PHI: f64 = FRAC_PI_8;

impl SplitEvaluator {
    /// `(P1, P2, err)` for `0 < a < 1`.
    fn remainders_small(a: f64) -> (f64, f64, f64) {
        let a2 = a * a;
        let t_end = (2.0 * SPLIT_PHI.sin() / a).asinh();

        // u = 1 - c, computed without cancellation.
        let uc = move |t: f64| {
            let sh = t.sinh();
            let q = 0.25 * a2 * sh * sh;
            let c = (1.0 - q).sqrt();
            (q / (1.0 + c), c, t.tanh())
        };
        let h1 = move |t: f64| {
            let (u, c, th) = uc(t);
            th * th * u * (1.0 / (1.0 + c) - 3.0) / (8.0 * c)
        };
        let h2 = move |t: f64| {
            let (u, c, th) = uc(t);
            th * th * u / (2.0 * c)
        };

        let mut near1 = -0.375 * (t_end - t_end.tanh());
        let mut near2 = 0.0;
        let mut err = 0.0;
        // Unit panels from the upper end; the corrections decay like e^{2(t - t_end)}.
        let mut hi = t_end;
        let floor = (t_end - 20.0).max(0.0);
        while hi > floor {
            let lo = (hi - 1.0).max(floor);
            let q1 = gk21(&h1, lo, hi);
            let q2 = gk21(&h2, lo, hi);
            near1 += q1.value;
            near2 += q2.value;
            err += q1.err.max(q2.err);
            hi = lo;
        }
        if floor > 0.0 {
            let q1 = gk21(&h1, 0.0, floor);
            let q2 = gk21(&h2, 0.0, floor);
            near1 += q1.value;
            near2 += q2.value;
            err += q1.err.max(q2.err);
        }

        // θ/2 = φ ∈ [SPLIT_PHI, π/2]; dθ = 2 dφ.
        let f1 = move |phi: f64| {
            let (s, c) = phi.sin_cos();
            let d = a2 + 4.0 * s * s;
            2.0 * ((2.0 * phi).cos() - c) / (d * d.sqrt())
        };
        let f2 = move |phi: f64| {
            let s = phi.sin();
            let one_minus_c = 2.0 * (0.5 * phi).sin().powi(2);
            let d = a2 + 4.0 * s * s;
            4.0 * s * s * one_minus_c / (d * d.sqrt())
        };
        let mid = 0.5 * (SPLIT_PHI + FRAC_PI_2);
        let far1 = gk21(&f1, SPLIT_PHI, mid) + gk21(&f1, mid, FRAC_PI_2);
        let far2 = gk21(&f2, SPLIT_PHI, mid) + gk21(&f2, mid, FRAC_PI_2);
        err += far1.err.max(far2.err);

        (near1 + far1.value, near2 + far2.value, err)
    }

    /// `(I1, I2, err)` for `a ≥ 1`.
    fn integrals_large(a: f64) -> (f64, f64, f64) {
        let big_a = a * a + 2.0;
        // cos θ [D^{-3/2} - A^{-3/2}]: the constant part integrates to zero
        // against cos θ and is removed algebraically.
        let f = |th: f64| {
            let c = th.cos();
            let d = big_a - 2.0 * c;
            let d32 = d * d.sqrt();
            (c * inv_pow32_difference(big_a, d, 2.0 * c), (1.0 - c) / d32)
        };
        let n = TRAPEZOID_POINTS;
        let h = PI / n as f64;
        let (mut s1_even, mut s2_even, mut s1_odd, mut s2_odd) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..=n {
            let (v1, v2) = f(k as f64 * h);
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            if k % 2 == 0 {
                s1_even += w * v1;
                s2_even += w * v2;
            } else {
                s1_odd += v1;
                s2_odd += v2;
            }
        }
        let i1 = h * (s1_even + s1_odd);
        let i2 = h * (s2_even + s2_odd);
        let i1_half = 2.0 * h * s1_even;
        let i2_half = 2.0 * h * s2_even;
        let err = (i1 - i1_half).abs().max((i2 - i2_half).abs());
        (i1, i2, err)
    }
}

impl SpecialEvaluator for SplitEvaluator {
    fn name(&self) -> &'static str {
        "split"
    }

    fn eval(&self, a: f64) -> Result<SpecialPair> {
        check_arg(a)?;
        if a < 1.0 {
            let (p1, p2, err) = Self::remainders_small(a);
            let root = (a * a + 4.0).sqrt();
            // a⁻²(2/√(a²+4) - 1) and ½ asinh(2/a) + ½ log a - 1/√(a²+4),
            // both rewritten free of cancellation.
            let r1 = -1.0 / (root * (2.0 + root)) + p1;
            let r2 = 0.5 * (2.0 + root).ln() - 1.0 / root + p2;
            Ok(SpecialPair::from_remainders(a, r1, r2, err))
        } else {
            let (i1, i2, err) = Self::integrals_large(a);
            Ok(SpecialPair::from_integrals(a, i1, i2, err))
        }
    }
}

// ---------------------------------------------------------------------------
// Chebyshev table in log a
// ---------------------------------------------------------------------------

const TABLE_LOG_MIN: f64 = -28.0;
const TABLE_PIECE_WIDTH: f64 = 0.5;
const TABLE_DEGREE: usize = 15;

/// Piecewise Chebyshev interpolant of `R1`, `R2` on `a ∈ [e^-28, 1)`.
/// Outside that range it defers to [`SplitEvaluator`].
#[derive(Debug, Clone)]
pub struct ChebyshevTable {
    coeffs_r1: Vec<[f64; TABLE_DEGREE + 1]>,
    coeffs_r2: Vec<[f64; TABLE_DEGREE + 1]>,
    /// Largest discrepancy against the split evaluator at the piece
    /// mid-points between interpolation nodes, measured at build time.
    max_build_error: f64,
}

impl ChebyshevTable {
    pub fn build() -> Self {
        let pieces = ((0.0 - TABLE_LOG_MIN) / TABLE_PIECE_WIDTH).round() as usize;
        let n = TABLE_DEGREE + 1;
        let nodes: Vec<f64> = (0..n)
            .map(|k| (PI * (k as f64 + 0.5) / n as f64).cos())
            .collect();
        let mut coeffs_r1 = Vec::with_capacity(pieces);
        let mut coeffs_r2 = Vec::with_capacity(pieces);
        let mut max_err: f64 = 0.0;
        for p in 0..pieces {
            let lo = TABLE_LOG_MIN + p as f64 * TABLE_PIECE_WIDTH;
            let hi = lo + TABLE_PIECE_WIDTH;
            let vals: Vec<(f64, f64, f64)> = nodes
                .iter()
                .map(|&x| {
                    let u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                    let sp = SplitEvaluator::remainders_small_pair(u.exp());
                    (sp.r1, sp.r2, sp.err_est)
                })
                .collect();
            let mut c1 = [0.0; TABLE_DEGREE + 1];
            let mut c2 = [0.0; TABLE_DEGREE + 1];
            for j in 0..n {
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for (k, v) in vals.iter().enumerate() {
                    let w = (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos();
                    s1 += v.0 * w;
                    s2 += v.1 * w;
                }
                let scale = if j == 0 { 1.0 } else { 2.0 } / n as f64;
                c1[j] = s1 * scale;
                c2[j] = s2 * scale;
            }
            // Spot-check between nodes.
            for &x in &[-0.97, -0.5, 0.013, 0.61, 0.99] {
                let u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                let sp = SplitEvaluator::remainders_small_pair(u.exp());
                let e1 = (clenshaw(&c1, x) - sp.r1).abs() / sp.r1.abs().max(1.0);
                let e2 = (clenshaw(&c2, x) - sp.r2).abs() / sp.r2.abs().max(1.0);
                max_err = max_err.max(e1).max(e2).max(sp.err_est);
            }
            coeffs_r1.push(c1);
            coeffs_r2.push(c2);
        }
        Self {
            coeffs_r1,
            coeffs_r2,
            max_build_error: max_err,
        }
    }

    /// Process-wide shared instance, built on first use.
    pub fn shared() -> Arc<ChebyshevTable> {
        static TABLE: OnceLock<Arc<ChebyshevTable>> = OnceLock::new();
        TABLE.get_or_init(|| Arc::new(ChebyshevTable::build())).clone()
    }

    pub fn max_build_error(&self) -> f64 {
        self.max_build_error
    }

    /// `(R1, R2)` for `a` inside the table range, `None` otherwise.
    #[inline]
    pub fn remainders(&self, a: f64) -> Option<(f64, f64)> {
        if !(a < 1.0) {
            return None;
        }
        let u = a.ln();
        if u < TABLE_LOG_MIN {
            return None;
        }
        let pos = (u - TABLE_LOG_MIN) / TABLE_PIECE_WIDTH;
        let idx = (pos as usize).min(self.coeffs_r1.len() - 1);
        let x = 2.0 * (pos - idx as f64) - 1.0;
        Some((
            clenshaw(&self.coeffs_r1[idx], x),
            clenshaw(&self.coeffs_r2[idx], x),
        ))
    }
}

impl SplitEvaluator {
    fn remainders_small_pair(a: f64) -> SpecialPair {
        // Only called with 0 < a < 1 from the table builder.
        SplitEvaluator.eval(a).expect("positive argument")
    }
}

#[inline]
fn clenshaw(c: &[f64; TABLE_DEGREE + 1], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let x2 = 2.0 * x;
    for &ck in c[1..].iter().rev() {
        let b0 = ck + x2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

impl SpecialEvaluator for ChebyshevTable {
    fn name(&self) -> &'static str {
        "table"
    }

    #[inline]
    fn eval(&self, a: f64) -> Result<SpecialPair> {
        check_arg(a)?;
        match self.remainders(a) {
            Some((r1, r2)) => {
                let scale = r1.abs().max(r2.abs()).max(1.0);
                Ok(SpecialPair::from_remainders(
                    a,
                    r1,
                    r2,
                    self.max_build_error * scale,
                ))
            }
            None => SplitEvaluator.eval(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn nonpositive_argument_is_domain_error() {
        for ev in [
            &SplitEvaluator as &dyn SpecialEvaluator,
            &AdaptiveQuadrature::default(),
        ] {
            assert!(matches!(ev.eval(0.0), Err(Error::Domain(_))));
            assert!(matches!(ev.eval(-1.0), Err(Error::Domain(_))));
            assert!(matches!(ev.eval(f64::NAN), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn split_matches_adaptive() {
        let oracle = AdaptiveQuadrature::default();
        for &a in &[1e-8, 3e-6, 1e-3, 0.02, 0.3, 0.999, 1.0, 1.7, 10.0, 100.0, 1e3] {
            let s = SplitEvaluator.eval(a).unwrap();
            let o = oracle.eval(a).unwrap();
            assert!(close(s.i1, o.i1, 1e-11), "i1 at a={a}: {} vs {}", s.i1, o.i1);
            assert!(close(s.i2, o.i2, 1e-11), "i2 at a={a}: {} vs {}", s.i2, o.i2);
        }
    }

    #[test]
    fn remainder_identities_hold() {
        for &a in &[1e-7, 0.5, 1.0, 4.0] {
            let s = SplitEvaluator.eval(a).unwrap();
            assert!(close(s.i1 - s.r1, a.powi(-2), 1e-15));
            let lp = s.i2 - s.r2;
            assert!((lp - log_part(a)).abs() <= 1e-15 * s.i2.abs().max(1.0));
        }
    }

    #[test]
    fn large_argument_bound() {
        // |I1(100)| <= 2/100³.
        let s = SplitEvaluator.eval(100.0).unwrap();
        assert!(s.i1.abs() <= 2e-6);
        assert!(s.i1 > 0.0);
    }

    #[test]
    fn table_agrees_with_split() {
        let t = ChebyshevTable::shared();
        assert!(t.max_build_error() < 1e-13, "{}", t.max_build_error());
        let mut a = 1e-13;
        while a < 10.0 {
            let x = t.eval(a).unwrap();
            let y = SplitEvaluator.eval(a).unwrap();
            assert!(close(x.i1, y.i1, 1e-13), "a={a}");
            assert!(close(x.i2, y.i2, 1e-13), "a={a}");
            a *= 1.37;
        }
    }
}
