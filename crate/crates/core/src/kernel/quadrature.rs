//! Adaptive Gauss–Kronrod (G10/K21) integration.
//!
//! Used as the independent oracle for the closed-form kernel path and as the
//! panel rule for the smooth remainders of the split special-function
//! evaluator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Result of a quadrature: value and error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub err: f64,
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        Quad {
            value: self.value + rhs.value,
            err: self.err + rhs.err,
        }
    }
}

/// One K21 panel on `[a, b]`. The error estimate is the QUADPACK rescaling of
/// `|K21 - G10|`.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Quad {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    #[allow(clippy::needless_range_loop)]
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Quad { value: result, err }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    q: Quad,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.q.err == other.q.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.err.total_cmp(&other.q.err)
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_segments: 4000,
        }
    }
}

/// Globally adaptive bisection over the partition given by `breakpoints`
/// (sorted, first and last are the integration limits).
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: Tolerance) -> Result<Quad> {
    if breakpoints.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = Quad { value: 0.0, err: 0.0 };
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let q = gk21(&f, w[0], w[1]);
        total = total + q;
        heap.push(Segment { a: w[0], b: w[1], q });
    }
    loop {
        let target = tol.abs.max(tol.rel * total.value.abs());
        if total.err <= target {
            return Ok(total);
        }
        if heap.len() >= tol.max_segments {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution.
            heap.push(worst);
            break;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        total.value += left.value + right.value - worst.q.value;
        total.err += left.err + right.err - worst.q.err;
        heap.push(Segment { a: worst.a, b: mid, q: left });
        heap.push(Segment { a: mid, b: worst.b, q: right });
    }
    // Re-sum to shed the drift of the running totals before judging.
    let value: f64 = heap.iter().map(|s| s.q.value).sum();
    let err: f64 = heap.iter().map(|s| s.q.err).sum();
    let target = tol.abs.max(tol.rel * value.abs());
    if err <= target {
        Ok(Quad { value, err })
    } else {
        Err(Error::Accuracy {
            requested: target,
            achieved: err,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = gk21(&|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0);
        assert!((q.value - (256.0 / 8.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn log_singularity_converges() {
        let q = integrate(|x: f64| x.ln(), &[0.0, 1.0], Tolerance::relative(1e-12)).unwrap();
        assert!((q.value + 1.0).abs() < 1e-11, "{q:?}");
    }

    #[test]
    fn peaked_integrand_with_breakpoints() {
        // int_0^1 e/(e^2 + x^2) dx = atan(1/e)
        let e = 1e-6;
        let q = integrate(
            |x: f64| e / (e * e + x * x),
            &[0.0, 1e-6, 1e-3, 1.0],
            Tolerance::relative(1e-12),
        )
        .unwrap();
        assert!((q.value - (1.0 / e).atan()).abs() < 1e-11);
    }

    #[test]
    fn impossible_tolerance_reports_accuracy_error() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
            max_segments: 3,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), &[1e-4, 1.0], tol);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }
}
