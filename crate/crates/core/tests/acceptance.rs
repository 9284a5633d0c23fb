//! Acceptance suite: one line per criterion.
//!
//! Failures are reported but only turn into a nonzero exit with `--strict`
//! (`cargo test --test acceptance -- --strict`).

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringvortex::diagnostics::{blob_moments, mass_tail};
use ringvortex::harness::{sweep_and_fit, ConvergenceReport, ExperimentConfig};
use ringvortex::kernel::{
    difference_ratio, eval_g, eval_g_oracle, SpecialEvaluator, SplitEvaluator,
};
use ringvortex::point_vortex::{pv_integrate, pv_invariants, PointVortexState, PvIntegration};
use ringvortex::ring_sim::{
    external_field_split, init_blobs, integrate, ParticleBlob, Rk4Stepper, SimParams,
};
use ringvortex::PlanarVec;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Random `(x, y, r0)` with `a = |x - y| / sqrt((r0 + x2)(r0 + y2))` equal to
/// the drawn value.
fn admissible_triple(rng: &mut ChaCha8Rng) -> (PlanarVec, PlanarVec, f64, f64) {
    loop {
        let r0 = rng.gen_range(1.5f64.ln()..1e3f64.ln()).exp();
        let a = rng.gen_range(1e-8f64.ln()..1e3f64.ln()).exp();
        let x = PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5) * r0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let (sn, cs) = phi.sin_cos();
        let rx = r0 + x.x2;
        // s² = a² rx (rx + s sin φ)
        let b = a * a * rx * sn;
        let s = 0.5 * (b + (b * b + 4.0 * a * a * rx * rx).sqrt());
        let y = x + PlanarVec::new(s * cs, s * sn);
        if r0 + y.x2 > 0.0 && s.is_finite() {
            return (x, y, r0, a);
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut worst_a = 0.0;
    for _ in 0..1000 {
        let (x, y, r0, a) = admissible_triple(&mut rng);
        let g = eval_g(x, y, r0).unwrap();
        let o = eval_g_oracle(x, y, r0, 1e-12).unwrap().value;
        let rel = (g - o).norm() / o.norm();
        if rel > worst {
            worst = rel;
            worst_a = a;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-10 && secs < 60.0,
        format!("max relative error {worst:.2e} (at a = {worst_a:.3e}) over 1000 triples in {secs:.1} s"),
    )
}

fn remainder_sups(n: usize) -> (f64, f64, f64) {
    let ev = SplitEvaluator;
    let (l0, l1) = (1e-8f64.ln(), 1e8f64.ln());
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    let mut i1_excess = f64::NEG_INFINITY;
    for i in 0..n {
        let a = (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp();
        let p = ev.eval(a).unwrap();
        s1 = s1.max((a * p.r1).abs());
        s2 = s2.max(p.r2.abs() * a.max(1.0));
        if a >= 1.0 {
            i1_excess = i1_excess.max(p.i1.abs() - 2.0 / (a * a * a) - p.err_est);
        }
    }
    (s1, s2, i1_excess)
}

fn criterion_2() -> Outcome {
    let (a1, a2, e1) = remainder_sups(100_000);
    let (b1, b2, e2) = remainder_sups(200_000);
    let stable = |u: f64, v: f64| u.is_finite() && v.is_finite() && ((u - v) / v).abs() <= 0.01;
    outcome(
        stable(a1, b1) && stable(a2, b2) && e1 <= 0.0 && e2 <= 0.0,
        format!(
            "sup|a R1| = {a1:.6} / {b1:.6}, sup|R2| max(1,a) = {a2:.6} / {b2:.6} (1e5 / 2e5 points); \
             max(|I1| - 2/a^3) = {:.2e}",
            e1.max(e2)
        ),
    )
}

fn ratio_sup(eps: f64, rng: &mut ChaCha8Rng) -> f64 {
    let alpha = 3.0;
    let r0 = eps.ln().abs().powf(alpha);
    let half = 0.5 * r0;
    let mut sup = 0.0f64;
    let mut n = 0;
    while n < 10_000 {
        let x = PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-half..half));
        let s = rng.gen_range(1e-8f64.ln()..r0.ln()).exp();
        let phi = rng.gen_range(0.0..2.0 * PI);
        let y = x + PlanarVec::new(s * phi.cos(), s * phi.sin());
        if y.x2.abs() > half {
            continue;
        }
        sup = sup.max(difference_ratio(x, y, eps, alpha).unwrap());
        n += 1;
    }
    sup
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = [1e-2, 1e-3, 1e-6];
    let sups: Vec<f64> = eps.iter().map(|&e| ratio_sup(e, &mut rng)).collect();
    let mean = sups.iter().sum::<f64>() / 3.0;
    let sd = (sups.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / 2.0).sqrt();
    let ok = sups.iter().all(|s| s.is_finite())
        && sups.windows(2).all(|w| w[1] <= w[0] + 5.0 * sd);
    outcome(
        ok,
        format!(
            "sup ratio at eps = 1e-2, 1e-3, 1e-6: {:.4}, {:.4}, {:.4} (sd {sd:.4}); no rise beyond 5 sd",
            sups[0], sups[1], sups[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let pair = PointVortexState::new(
        vec![PlanarVec::new(0.5, 0.0), PlanarVec::new(-0.5, 0.0)],
        vec![1.0, 1.0],
    )
    .unwrap();
    let opts = |horizon| PvIntegration {
        horizon,
        dt: 1e-3,
        collapse_threshold: None,
        drift: false,
    };
    let t = 2.0 * PI * PI;
    let traj = pv_integrate(&pair, opts(t)).unwrap();
    let end = traj.last().unwrap();
    let ret = end
        .positions
        .iter()
        .zip(&pair.positions)
        .map(|(a, b)| (*a - *b).norm())
        .fold(0.0, f64::max);

    let dipole = PointVortexState::new(
        vec![PlanarVec::new(0.5, 0.0), PlanarVec::new(-0.5, 0.0)],
        vec![1.0, -1.0],
    )
    .unwrap();
    let traj = pv_integrate(&dipole, opts(1.0)).unwrap();
    let end = traj.last().unwrap();
    let disp = (end.positions[0] - dipole.positions[0]).norm();
    let derr = (disp - 1.0 / (2.0 * PI)).abs();
    outcome(
        ret <= 1e-6 && derr <= 1e-6 && end.time == 1.0,
        format!("corotating return error {ret:.2e}; dipole displacement error {derr:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let state = loop {
        let z: Vec<PlanarVec> = (0..4)
            .map(|_| PlanarVec::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a: Vec<f64> = (0..4).map(|_| rng.gen_range(0.5..1.5)).collect();
        let s = PointVortexState::new(z, a).unwrap();
        if s.min_separation().unwrap().0 > 0.5 {
            break s;
        }
    };
    let traj = pv_integrate(
        &state,
        PvIntegration {
            horizon: 10.0,
            dt: 1e-3,
            collapse_threshold: None,
            drift: false,
        },
    )
    .unwrap();
    let q0 = pv_invariants(&state).unwrap();
    let rel = |d: f64, v: f64| if v == 0.0 { d } else { d / v.abs() };
    let (mut dh, mut dp, mut da) = (0.0f64, 0.0f64, 0.0f64);
    for s in &traj {
        let q = pv_invariants(s).unwrap();
        dh = dh.max(rel((q.hamiltonian - q0.hamiltonian).abs(), q0.hamiltonian));
        dp = dp.max(rel(
            (q.linear_impulse - q0.linear_impulse).norm(),
            q0.linear_impulse.norm(),
        ));
        da = da.max(rel((q.angular_impulse - q0.angular_impulse).abs(), q0.angular_impulse));
    }
    outcome(
        dh <= 1e-8 && dp <= 1e-8 && da <= 1e-8,
        format!("drift H {dh:.2e}, P {dp:.2e}, A {da:.2e} over t = 10 ({} steps)", traj.len() - 1),
    )
}

fn impulse(blobs: &[ParticleBlob], r0: f64) -> f64 {
    let mut s = 0.0;
    for b in blobs {
        for (x, &w) in b.positions.iter().zip(&b.weights) {
            s += w * (r0 + x.x2).powi(2);
        }
    }
    s
}

fn impulse_drift(p: &SimParams, blobs: &[ParticleBlob]) -> (f64, bool) {
    let i0 = impulse(blobs, p.r0);
    let mut worst = 0.0f64;
    let mut circulation_exact = true;
    let a0: Vec<f64> = blobs.iter().map(|b| b.weights.iter().sum()).collect();
    integrate(blobs, p, &Rk4Stepper, |_, cur| {
        worst = worst.max(((impulse(cur, p.r0) - i0) / i0).abs());
        for (b, a) in cur.iter().zip(&a0) {
            circulation_exact &= b.weights.iter().sum::<f64>() == *a && b.intensity == *a;
        }
        Ok(())
    })
    .unwrap();
    (worst, circulation_exact)
}

fn criterion_6() -> Outcome {
    let mut p = SimParams::new(0.1, 3.0).unwrap();
    p.particles_per_blob = 100;
    p.horizon = 1.0;
    let z = [PlanarVec::new(-0.5, 0.0), PlanarVec::new(0.5, 0.0)];
    let blobs = init_blobs(&p, &z, &[1.0, 1.0]).unwrap();
    let (coarse, c1) = impulse_drift(&p, &blobs);
    let mut fine = p.clone();
    fine.dt = p.dt / 4.0;
    let (finer, c2) = impulse_drift(&fine, &blobs);
    let gain = coarse / finer;
    outcome(
        c1 && c2 && coarse <= 1e-3 && gain >= 8.0,
        format!(
            "circulation exact: {}; impulse drift {coarse:.2e} at dt = {}, {finer:.2e} at dt/4 (gain {gain:.1})",
            c1 && c2,
            p.dt
        ),
    )
}

fn sup_f2(eps: f64) -> f64 {
    let p = SimParams::new(eps, 3.0).unwrap();
    let z = [PlanarVec::new(-0.5, 0.0), PlanarVec::new(0.5, 0.0)];
    let blobs = init_blobs(&p, &z, &[1.0, 1.0]).unwrap();
    blobs[0]
        .positions
        .iter()
        .map(|x| external_field_split(&blobs, 0, *x, &p).unwrap().f2.norm())
        .fold(0.0, f64::max)
}

fn criterion_7() -> Outcome {
    let f3 = sup_f2(1e-3);
    let f6 = sup_f2(1e-6);
    let bound = 10.0 / 1e-3f64.ln().powi(2);
    outcome(
        f3 <= bound && f6 < f3,
        format!("sup|F2| = {f3:.3e} at eps = 1e-3 (bound {bound:.3e}), {f6:.3e} at eps = 1e-6"),
    )
}

fn sweep() -> (ConvergenceReport, f64) {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
scenario = "pair"
centers = [[-0.5, 0.0], [0.5, 0.0]]
intensities = [1.0, 1.0]
eps_list = [1e-2, 1e-3, 1e-4]
alpha = 3.0
horizon = 0.5
dt = 0.025
particles_per_blob = 1000
output_dir = "{}"
"#,
        dir.path().display()
    );
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    let start = Instant::now();
    let report = sweep_and_fit(&cfg).unwrap();
    (report, start.elapsed().as_secs_f64())
}

fn criterion_8(report: &ConvergenceReport, secs: f64) -> Outcome {
    let cases: Vec<String> = report
        .cases
        .iter()
        .map(|c| {
            format!(
                "eps {:e}: Delta {:.3e}, max Rt {:.3e}, contained {}",
                c.eps, c.delta_final, c.max_support_radius, c.containment
            )
        })
        .collect();
    outcome(
        report.delta_monotone && report.support_monotone && report.containment_all,
        format!("{} [{secs:.0} s, stepper {}]", cases.join("; "), report.stepper),
    )
}

fn criterion_9(report: &ConvergenceReport) -> Outcome {
    let checks: usize = report.cases.iter().map(|c| c.sandwich_checks).sum();
    let bad: usize = report.cases.iter().map(|c| c.sandwich_violations).sum();
    outcome(
        checks > 0 && bad == 0,
        format!("{bad} violations in {checks} blob-step checks"),
    )
}

fn criterion_10() -> Outcome {
    let eps = 1e-2;
    let mut p = SimParams::new(eps, 3.0).unwrap();
    p.particles_per_blob = 2000;
    let a = 1.0;
    let b = init_blobs(&p, &[PlanarVec::ZERO], &[a]).unwrap().remove(0);
    let inertia = blob_moments(&b).unwrap().inertia;
    let exact = a * eps * eps / 2.0;
    let ierr = ((inertia - exact) / exact).abs();
    let tail = mass_tail(&b, eps / 2f64.sqrt()).unwrap();
    let terr = ((tail - 0.5) / 0.5).abs();
    outcome(
        ierr <= 0.01 && terr <= 0.02,
        format!(
            "inertia error {:.3}%, mass_tail(eps/sqrt 2) = {tail:.4} ({:.2}% from 1/2)",
            100.0 * ierr,
            100.0 * terr
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {n:>2} {name}: {}", o.detail);
    };
    report(1, "kernel oracle equivalence", criterion_1());
    report(2, "remainder bounds", criterion_2());
    report(3, "G - K ratio", criterion_3());
    report(4, "point-vortex analytic solutions", criterion_4());
    report(5, "point-vortex conservation", criterion_5());
    report(6, "ring invariants", criterion_6());
    report(7, "field split smallness", criterion_7());
    let (sw, secs) = sweep();
    report(8, "convergence sweep", criterion_8(&sw, secs));
    report(9, "mollifier sandwich", criterion_9(&sw));
    report(10, "diagnostics oracles", criterion_10());
    if failed > 0 {
        println!("{failed} criteria failed");
        if std::env::args().any(|a| a == "--strict") {
            std::process::exit(1);
        }
    }
}
