//! Wall-clock scalability runs over a grid of synthetic (n, d) cells.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::dataset::generate_scaling;
use crate::ecdf::EcdfModel;
use crate::error::{Error, Result};
use crate::parallel::check_workers;
use crate::scoring::{score_with_workers, Variant};

pub use crate::parallel::worker_partition;

/// Rows of the published runtime grid.
pub const DEFAULT_NS: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
/// Columns of the published runtime grid.
pub const DEFAULT_DS: [usize; 4] = [10, 100, 1_000, 10_000];
pub const DEFAULT_MEMORY_FRACTION: f64 = 0.75;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub d: usize,
    pub workers: usize,
    pub fit_seconds: f64,
    pub score_seconds: f64,
    pub total_seconds: f64,
    /// FNV-1a over the bit patterns of the final scores.
    pub checksum: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BenchOutcome {
    Measured(BenchRecord),
    Skipped {
        n: usize,
        d: usize,
        needed_bytes: u64,
        limit_bytes: u64,
    },
}

#[derive(Clone, Debug)]
pub struct GridOptions {
    pub workers: usize,
    pub seed: u64,
    /// Cells whose estimated footprint exceeds this are skipped.
    pub memory_limit_bytes: u64,
    pub warmup: bool,
}

impl GridOptions {
    pub fn new(workers: usize, seed: u64) -> Self {
        Self {
            workers,
            seed,
            memory_limit_bytes: default_memory_limit(),
            warmup: true,
        }
    }
}

/// Peak bytes for one cell: the data, the model's sorted copy and the two
/// n×d tail-term buffers used while scoring.
pub fn estimate_memory(n: usize, d: usize) -> u64 {
    (n as u64).saturating_mul(d as u64).saturating_mul(8 * 4)
}

/// 75% of physical memory as reported by `/proc/meminfo`; unlimited when
/// that cannot be read.
pub fn default_memory_limit() -> u64 {
    total_memory_bytes()
        .map(|b| (b as f64 * DEFAULT_MEMORY_FRACTION) as u64)
        .unwrap_or(u64::MAX)
}

fn total_memory_bytes() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = text.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

pub fn checksum<T: crate::Scalar>(scores: &[T]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for s in scores {
        for b in s.to_f64_lossy().to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Times fit and score of one synthetic cell.
pub fn run_cell(n: usize, d: usize, workers: usize, seed: u64, warmup: bool) -> Result<BenchRecord> {
    check_workers(workers)?;
    let data = generate_scaling(n, d, seed)?;
    if warmup {
        let model = EcdfModel::fit_with_workers(&data, workers)?;
        score_with_workers(&model, &data, Variant::Ecod, workers)?;
    }
    let t0 = Instant::now();
    let model = EcdfModel::fit_with_workers(&data, workers)?;
    let fit_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let report = score_with_workers(&model, &data, Variant::Ecod, workers)?;
    let score_seconds = t1.elapsed().as_secs_f64();
    Ok(BenchRecord {
        n,
        d,
        workers,
        fit_seconds,
        score_seconds,
        total_seconds: fit_seconds + score_seconds,
        checksum: checksum(report.final_scores()),
    })
}

/// Runs every (n, d) cell of `ns × ds` in row-major order. Cells over the
/// memory limit are reported as skipped.
pub fn run_grid(ns: &[usize], ds: &[usize], opts: &GridOptions) -> Result<Vec<BenchOutcome>> {
    check_workers(opts.workers)?;
    let mut out = Vec::with_capacity(ns.len() * ds.len());
    for &n in ns {
        for &d in ds {
            let needed = estimate_memory(n, d);
            if needed > opts.memory_limit_bytes {
                out.push(BenchOutcome::Skipped {
                    n,
                    d,
                    needed_bytes: needed,
                    limit_bytes: opts.memory_limit_bytes,
                });
                continue;
            }
            match run_cell(n, d, opts.workers, opts.seed, opts.warmup) {
                Ok(r) => out.push(BenchOutcome::Measured(r)),
                Err(Error::Resource { needed, limit }) => out.push(BenchOutcome::Skipped {
                    n,
                    d,
                    needed_bytes: needed,
                    limit_bytes: limit,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// `n,d,workers,fit_s,score_s,total_s,checksum,status`; skipped cells carry
/// empty timings and a `skipped` status.
pub fn write_grid_csv<W: Write>(mut w: W, outcomes: &[BenchOutcome]) -> std::io::Result<()> {
    writeln!(w, "n,d,workers,fit_s,score_s,total_s,checksum,status")?;
    for o in outcomes {
        match o {
            BenchOutcome::Measured(r) => writeln!(
                w,
                "{},{},{},{:.6},{:.6},{:.6},{:016x},ok",
                r.n, r.d, r.workers, r.fit_seconds, r.score_seconds, r.total_seconds, r.checksum
            )?,
            BenchOutcome::Skipped {
                n,
                d,
                needed_bytes,
                limit_bytes,
            } => writeln!(
                w,
                "{n},{d},,,,,,skipped: needs ~{needed_bytes} bytes over limit {limit_bytes}"
            )?,
        }
    }
    w.flush()
}

/// Long format for plotting runtime curves: `n,d,workers,phase,seconds`.
pub fn write_long_csv<W: Write>(mut w: W, outcomes: &[BenchOutcome]) -> std::io::Result<()> {
    writeln!(w, "n,d,workers,phase,seconds")?;
    for o in outcomes {
        if let BenchOutcome::Measured(r) = o {
            for (phase, s) in [
                ("fit", r.fit_seconds),
                ("score", r.score_seconds),
                ("total", r.total_seconds),
            ] {
                writeln!(w, "{},{},{},{},{:.6}", r.n, r.d, r.workers, phase, s)?;
            }
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let out = run_grid(&[1000], &[10], &GridOptions::new(1, 3)).unwrap();
        assert_eq!(out.len(), 1);
        match &out[0] {
            BenchOutcome::Measured(r) => {
                assert!(r.fit_seconds > 0.0 && r.score_seconds > 0.0);
                assert_eq!(r.total_seconds, r.fit_seconds + r.score_seconds);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn workers_preserve_checksum() {
        let a = run_cell(500, 9, 1, 5, false).unwrap();
        let b = run_cell(500, 9, 4, 5, false).unwrap();
        assert_eq!(a.checksum, b.checksum);
    }

    #[test]
    fn oversize_cells_are_skipped() {
        let mut opts = GridOptions::new(1, 1);
        opts.memory_limit_bytes = estimate_memory(100, 10);
        let out = run_grid(&[100, 1000], &[10], &opts).unwrap();
        assert!(matches!(out[0], BenchOutcome::Measured(_)));
        assert!(matches!(out[1], BenchOutcome::Skipped { n: 1000, d: 10, .. }));
        let mut csv = Vec::new();
        write_grid_csv(&mut csv, &out).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().contains("skipped"));
        let mut long = Vec::new();
        write_long_csv(&mut long, &out).unwrap();
        assert_eq!(String::from_utf8(long).unwrap().lines().count(), 4);
    }
}
