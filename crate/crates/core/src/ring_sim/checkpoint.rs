//! Checkpoint CSV `blob,particle,x1,x2,w`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ParticleBlob;
use crate::error::{Error, Result};
use crate::vec2::PlanarVec;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    blob: usize,
    particle: usize,
    x1: f64,
    x2: f64,
    w: f64,
}

pub fn write_checkpoint<W: Write>(out: W, blobs: &[ParticleBlob]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    for b in blobs {
        for (p, (x, &w)) in b.positions.iter().zip(&b.weights).enumerate() {
            wr.serialize(Row {
                blob: b.blob_index,
                particle: p,
                x1: x.x1,
                x2: x.x2,
                w,
            })?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads blobs back; rows must be grouped by blob and numbered consecutively.
pub fn read_checkpoint<R: Read>(input: R) -> Result<Vec<ParticleBlob>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut blobs: Vec<(Vec<PlanarVec>, Vec<f64>)> = Vec::new();
    for row in rd.deserialize() {
        let r: Row = row?;
        if r.blob == blobs.len() && r.particle == 0 {
            blobs.push((Vec::new(), Vec::new()));
        }
        let ok = r.blob + 1 == blobs.len() && r.particle == blobs[r.blob].0.len();
        if !ok {
            return Err(Error::Configuration(format!(
                "checkpoint row out of order: blob {}, particle {}",
                r.blob, r.particle
            )));
        }
        blobs[r.blob].0.push(PlanarVec::new(r.x1, r.x2));
        blobs[r.blob].1.push(r.w);
    }
    blobs
        .into_iter()
        .enumerate()
        .map(|(i, (x, w))| ParticleBlob::new(i, x, w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_sim::{init_blobs, SimParams};

    #[test]
    fn round_trip_is_exact() {
        let mut p = SimParams::new(0.03, 3.0).unwrap();
        p.particles_per_blob = 40;
        let z = [PlanarVec::new(-0.5, 0.0), PlanarVec::new(0.5, 0.25)];
        let blobs = init_blobs(&p, &z, &[1.0, -2.0]).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &blobs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("blob,particle,x1,x2,w\n"));
        let back = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back, blobs);
    }

    #[test]
    fn out_of_order_rejected() {
        let text = "blob,particle,x1,x2,w\n0,0,0,0,1\n0,2,0,0,1\n";
        assert!(read_checkpoint(text.as_bytes()).is_err());
    }
}
