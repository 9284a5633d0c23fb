use ringvortex::diagnostics::mass_tail;
use ringvortex::harness::{run_case, sweep_and_fit, CaseResult, ExperimentConfig};
use ringvortex::ring_sim::{read_checkpoint, write_checkpoint};

fn config(stepper: &str, ppb: usize) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!(
        r#"
scenario = "pipeline"
centers = [[-0.5, 0.0], [0.5, 0.0]]
intensities = [1.0, 1.0]
eps_list = [0.05, 0.005, 0.0005]
alpha = 3.0
horizon = 0.1
dt = 0.02
particles_per_blob = {ppb}
stepper = "{stepper}"
"#
    ))
    .unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn same(a: &CaseResult, b: &CaseResult) {
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_blobs, b.final_blobs);
    assert_eq!(a.sandwich_checks, b.sandwich_checks);
}

#[test]
fn bitwise_deterministic_across_thread_counts() {
    for stepper in ["rk4", "rigid-core"] {
        let c = config(stepper, 80);
        let one = in_pool(1, || run_case(&c, 0.05).unwrap());
        let four = in_pool(4, || run_case(&c, 0.05).unwrap());
        same(&one, &four);
    }
}

#[test]
fn sweep_cases_match_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config("rigid-core", 40);
    c.output_dir = dir.path().to_str().unwrap().to_string();
    let report = sweep_and_fit(&c).unwrap();
    for (case, &eps) in report.cases.iter().zip(&c.eps_list) {
        let alone = run_case(&c, eps).unwrap();
        assert_eq!(case, &alone.summary());
    }
    assert_eq!(report.cases.len(), 3);
    assert!(report.delta_fit.residuals.iter().all(|r| r.is_finite()));
    assert!(dir.path().join("diag_5e-3.csv").exists());
}

#[test]
fn checkpoint_round_trip_of_a_run() {
    let c = config("rigid-core", 50);
    let case = run_case(&c, 0.005).unwrap();
    let mut buf = Vec::new();
    write_checkpoint(&mut buf, &case.final_blobs).unwrap();
    assert_eq!(read_checkpoint(buf.as_slice()).unwrap(), case.final_blobs);
}

#[test]
fn containment_means_empty_tail() {
    let c = config("rigid-core", 60);
    for &eps in &c.eps_list {
        let case = run_case(&c, eps).unwrap();
        let quarter = case.r_m / 4.0;
        let breach = case.records.iter().any(|r| r.rt > quarter);
        assert_eq!(case.containment, !breach);
        if case.containment {
            for b in &case.final_blobs {
                assert_eq!(mass_tail(b, quarter).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn diagnostics_rows_cover_every_step() {
    let c = config("rigid-core", 30);
    let case = run_case(&c, 0.05).unwrap();
    // t = 0 plus five steps, two blobs each.
    assert_eq!(case.records.len(), 6 * 2);
    assert_eq!(case.records[0].t, 0.0);
    assert!((case.records.last().unwrap().t - 0.1).abs() < 1e-15);
    assert_eq!(case.sandwich_violations, 0);
}
