//! CSV and JSON files written by the CLI.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{CaseResult, ConvergenceReport};
use crate::error::Result;
use crate::kernel::SpecialPair;
use crate::point_vortex::{pv_invariants, PointVortexState};
use crate::ring_sim::write_checkpoint;

/// `1e-3` style label used in file names.
pub fn eps_label(eps: f64) -> String {
    format!("{eps:e}")
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn write_csv<T: Serialize, W: Write>(out: W, rows: &[T]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes `diag_<eps>.csv` and `checkpoint_<eps>.csv`; returns both paths.
pub fn write_case(dir: &Path, case: &CaseResult) -> Result<(PathBuf, PathBuf)> {
    let label = eps_label(case.eps);
    let diag = format!("diag_{label}.csv");
    let ckpt = format!("checkpoint_{label}.csv");
    write_csv(create(dir, &diag)?, &case.records)?;
    write_checkpoint(create(dir, &ckpt)?, &case.final_blobs)?;
    Ok((dir.join(diag), dir.join(ckpt)))
}

pub fn write_report(dir: &Path, report: &ConvergenceReport) -> Result<PathBuf> {
    let mut f = create(dir, "report.json")?;
    serde_json::to_writer_pretty(&mut f, report)
        .map_err(|e| crate::error::Error::Io(e.to_string()))?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(dir.join("report.json"))
}

#[derive(Serialize)]
struct TrajRow {
    t: f64,
    i: usize,
    z1: f64,
    z2: f64,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct InvRow {
    t: f64,
    H: f64,
    P1: f64,
    P2: f64,
    A: f64,
}

/// Writes `pv_trajectory.csv` (`t,i,z1,z2`) and `pv_invariants.csv`
/// (`t,H,P1,P2,A`).
pub fn write_pv(dir: &Path, traj: &[PointVortexState]) -> Result<(PathBuf, PathBuf)> {
    let mut rows = Vec::new();
    let mut inv = Vec::new();
    for s in traj {
        for (i, z) in s.positions.iter().enumerate() {
            rows.push(TrajRow {
                t: s.time,
                i,
                z1: z.x1,
                z2: z.x2,
            });
        }
        let q = pv_invariants(s)?;
        inv.push(InvRow {
            t: s.time,
            H: q.hamiltonian,
            P1: q.linear_impulse.x1,
            P2: q.linear_impulse.x2,
            A: q.angular_impulse,
        });
    }
    write_csv(create(dir, "pv_trajectory.csv")?, &rows)?;
    write_csv(create(dir, "pv_invariants.csv")?, &inv)?;
    Ok((dir.join("pv_trajectory.csv"), dir.join("pv_invariants.csv")))
}

#[derive(Serialize)]
struct KernelRow {
    a: f64,
    i1: f64,
    i2: f64,
    r1: f64,
    r2: f64,
    err_est: f64,
}

/// `a,i1,i2,r1,r2,err_est`.
pub fn write_kernel_table<W: Write>(out: W, table: &[SpecialPair]) -> Result<()> {
    let rows: Vec<KernelRow> = table
        .iter()
        .map(|p| KernelRow {
            a: p.a,
            i1: p.i1,
            i2: p.i2,
            r1: p.r1,
            r2: p.r2,
            err_est: p.err_est,
        })
        .collect();
    write_csv(out, &rows)
}
