//! Std companion to the `kcore` crate: SNAP edge-list ingestion, core output,
//! a thread-pool executor, report serialisation and the `kcore` command line.

pub mod cli;
pub mod exec;
pub mod io;
pub mod report;

use std::time::Instant;

use kcore::bsp::{EngineConfig, Serial};
use kcore::kcore::{decompose_with, DecomposeError, KCore};
use kcore::{CoreResult, Graph, RunReport};

pub use exec::Threaded;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("failed to start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs `program` with `cfg.workers` lanes and records the wall time and
/// dataset name in the report.
pub fn decompose_timed(
    program: &KCore,
    dataset: &str,
    g: &Graph,
    cfg: &EngineConfig,
) -> Result<(CoreResult, RunReport), RunError> {
    let (elapsed, result) = if cfg.workers <= 1 {
        let start = Instant::now();
        let result = decompose_with(program, g, cfg, &Serial);
        (start.elapsed(), result)
    } else {
        let pool = Threaded::new(cfg.workers)?;
        let start = Instant::now();
        let result = decompose_with(program, g, cfg, &pool);
        (start.elapsed(), result)
    };
    let (cores, mut report) = result?;
    report.dataset = dataset.to_owned();
    report.wall_ms = report::round_sig6(elapsed.as_secs_f64() * 1e3);
    Ok((cores, report))
}
