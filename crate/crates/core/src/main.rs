use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ringvortex::harness::{self, output, ExperimentConfig};
use ringvortex::Error;

/// Thin vortex rings at large radius against the planar point-vortex model.
///
/// Output files go to the config's `output_dir`, or to $RINGVORTEX_OUT_DIR
/// when that is set.
#[derive(Parser)]
#[command(name = "ringvortex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One ring simulation with its point-vortex reference.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Exit with status 4 if containment or the mass sandwich fails.
        #[arg(long)]
        self_check: bool,
    },
    /// Every eps of the config plus rate fits in report.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Exit with status 4 if a trend, containment or sandwich check fails.
        #[arg(long)]
        self_check: bool,
    },
    /// Point-vortex trajectory and first integrals only.
    PvRun {
        #[arg(long)]
        config: PathBuf,
    },
    /// Special-function table `a,i1,i2,r1,r2,err_est` on stdout.
    KernelTest {
        #[arg(long)]
        a_min: f64,
        #[arg(long)]
        a_max: f64,
        #[arg(long)]
        points: usize,
        /// adaptive, split or table.
        #[arg(long, default_value = "split")]
        evaluator: String,
    },
}

enum Failure {
    Run(Error),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn with_pool<T>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, Error>
where
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Configuration(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            eps,
            self_check,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let case = with_pool(cfg.workers, || harness::run_case(&cfg, eps))??;
            let (d, c) = output::write_case(&cfg.resolved_output_dir(), &case)?;
            println!("{}\n{}", d.display(), c.display());
            println!(
                "eps = {eps:e}: Delta(T) = {:.6e}, max Rt = {:.6e}, containment = {}",
                case.delta_final, case.max_support_radius, case.containment
            );
            if self_check && (!case.containment || case.sandwich_violations > 0) {
                return Err(Failure::Property(format!(
                    "containment = {}, sandwich violations = {}",
                    case.containment, case.sandwich_violations
                )));
            }
        }
        Command::Sweep { config, self_check } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = with_pool(cfg.workers, || harness::sweep_and_fit(&cfg))??;
            let path = output::write_report(&cfg.resolved_output_dir(), &report)?;
            println!("{}", path.display());
            for c in &report.cases {
                println!(
                    "eps = {:e}: Delta(T) = {:.6e}, max Rt = {:.6e}, containment = {}",
                    c.eps, c.delta_final, c.max_support_radius, c.containment
                );
            }
            println!(
                "slopes: Delta {:.3} (predicted {:.3}), Rt {:.3} (predicted {:.3})",
                report.delta_fit.slope,
                report.delta_fit.predicted_slope,
                report.support_fit.slope,
                report.support_fit.predicted_slope
            );
            if self_check && !report.properties_hold() {
                return Err(Failure::Property(format!(
                    "delta monotone = {}, support monotone = {}, containment = {}",
                    report.delta_monotone, report.support_monotone, report.containment_all
                )));
            }
        }
        Command::PvRun { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let traj = harness::pv_run(&cfg)?;
            let (t, i) = output::write_pv(&cfg.resolved_output_dir(), &traj)?;
            println!("{}\n{}", t.display(), i.display());
        }
        Command::KernelTest {
            a_min,
            a_max,
            points,
            evaluator,
        } => {
            let table = harness::kernel_table(a_min, a_max, points, &evaluator)?;
            output::write_kernel_table(std::io::stdout().lock(), &table)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(msg)) => {
            eprintln!("self-check failed: {msg}");
            ExitCode::from(4)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Configuration(_)
                | Error::UnknownStrategy { .. }
                | Error::Domain(_)
                | Error::Fit(_) => 2,
                e if e.is_numerical() => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
