//! Run reports: per-superstep statistics plus whole-run summary.
//!
//! Field meanings:
//!
//! * `supersteps` counts every superstep including superstep 0 and the final
//!   termination-detection superstep, and equals `per_superstep.len()`.
//! * `total_messages` is the number of messages sent over the whole run.
//! * `avg_updates_per_vertex` is the number of value-lowering events in
//!   supersteps `>= 1`, divided by `n`. Initialisation is not an update.
//! * `pct_updated` is `vertices_updated / n` for that superstep (a fraction in
//!   `[0, 1]`, not divided by the number of active vertices).
//! * `k_max` and `k_avg` summarise the final core numbers; `k_avg` is rounded
//!   to three decimals.
//! * `wall_ms` covers the engine run only, not parsing.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bsp::{AggregatorSet, EngineConfig, EngineCounters};
use crate::graph::Graph;
use crate::kcore::{CoreResult, CORE_SUM, K_MAX, UPDATES};
use crate::oracle::{mean_milli, summarize};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuperstepStats {
    pub superstep: u32,
    pub active_vertices: u64,
    pub messages_sent: u64,
    pub vertices_updated: u64,
    pub pct_updated: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunReport {
    pub dataset: String,
    pub n: u64,
    pub m: u64,
    pub supersteps: u64,
    pub total_messages: u64,
    pub avg_updates_per_vertex: f64,
    pub k_max: u32,
    pub k_avg: f64,
    pub wall_ms: f64,
    pub workers: u64,
    pub partitions: u64,
    pub per_superstep: Vec<SuperstepStats>,
}

impl RunReport {
    /// Copy with `wall_ms` zeroed, for comparing runs that differ only in
    /// timing.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Run facts that do not come out of the engine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMeta {
    pub dataset: String,
    pub n: u64,
    pub m: u64,
    pub workers: u64,
    pub partitions: u64,
    pub wall_ms: f64,
}

impl RunMeta {
    pub fn for_graph(g: &Graph, cfg: &EngineConfig) -> Self {
        Self {
            dataset: String::new(),
            n: g.n() as u64,
            m: g.edge_count() as u64,
            workers: cfg.workers as u64,
            partitions: cfg.partitions as u64,
            wall_ms: 0.0,
        }
    }
}

/// Counters that failed to reconcile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegrityError {
    MessageConservation {
        superstep: u32,
        sent: u64,
        delivered: u64,
    },
    UpdateCount {
        superstep: u32,
        engine: u64,
        aggregated: u64,
    },
    CoreCount {
        expected: u64,
        got: u64,
    },
    KMax {
        aggregated: u64,
        computed: u64,
    },
    CoreSum {
        aggregated: u64,
        computed: u64,
    },
}

impl fmt::Display for IntegrityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrityError::MessageConservation {
                superstep,
                sent,
                delivered,
            } => write!(f, "superstep {superstep}: {sent} messages sent but {delivered} delivered"),
            IntegrityError::UpdateCount {
                superstep,
                engine,
                aggregated,
            } => write!(
                f,
                "superstep {superstep}: engine saw {engine} updates, aggregator counted {aggregated}"
            ),
            IntegrityError::CoreCount { expected, got } => {
                write!(f, "expected {expected} core values, got {got}")
            }
            IntegrityError::KMax {
                aggregated,
                computed,
            } => write!(f, "k_max aggregator {aggregated} != computed {computed}"),
            IntegrityError::CoreSum {
                aggregated,
                computed,
            } => write!(f, "core_sum aggregator {aggregated} != computed {computed}"),
        }
    }
}

impl core::error::Error for IntegrityError {}

/// `num / den` rounded to six significant digits.
pub fn ratio_sig6(num: u64, den: u64) -> f64 {
    if num == 0 || den == 0 {
        return 0.0;
    }
    let (num, den) = (u128::from(num), u128::from(den));
    let mut decimals = 0u32;
    // Grow the scale until the rounded integer carries six digits.
    while num * 10u128.pow(decimals) / den < 100_000 && decimals < 18 {
        decimals += 1;
    }
    let scale = 10u128.pow(decimals);
    let scaled = (num * scale * 2 + den) / (2 * den);
    scaled as f64 / scale as f64
}

/// Assembles and cross-checks the report of a finished k-core run.
///
/// Engine counters are the source of truth. Aggregators that the program
/// maintained alongside them must agree, as must the message totals.
pub fn collect(
    counters: &EngineCounters,
    aggregates: &AggregatorSet,
    cores: &CoreResult,
    meta: RunMeta,
) -> Result<RunReport, IntegrityError> {
    if cores.len() as u64 != meta.n {
        return Err(IntegrityError::CoreCount {
            expected: meta.n,
            got: cores.len() as u64,
        });
    }

    for s in &counters.supersteps {
        if s.messages_sent != s.messages_delivered {
            return Err(IntegrityError::MessageConservation {
                superstep: s.superstep,
                sent: s.messages_sent,
                delivered: s.messages_delivered,
            });
        }
        if let Some(aggregated) = s.aggregates.get(UPDATES) {
            if aggregated != s.vertices_updated {
                return Err(IntegrityError::UpdateCount {
                    superstep: s.superstep,
                    engine: s.vertices_updated,
                    aggregated,
                });
            }
        }
    }

    let (k_max, k_avg) = summarize(cores).unwrap_or((0, 0.0));
    if let Some(aggregated) = aggregates.get(K_MAX) {
        if aggregated != u64::from(k_max) {
            return Err(IntegrityError::KMax {
                aggregated,
                computed: u64::from(k_max),
            });
        }
    }
    let core_sum: u64 = cores.core.iter().map(|&c| u64::from(c)).sum();
    if let Some(aggregated) = aggregates.get(CORE_SUM) {
        if aggregated != core_sum {
            return Err(IntegrityError::CoreSum {
                aggregated,
                computed: core_sum,
            });
        }
    }
    debug_assert_eq!(k_avg, mean_milli(core_sum, meta.n));

    let per_superstep: Vec<SuperstepStats> = counters
        .supersteps
        .iter()
        .map(|s| SuperstepStats {
            superstep: s.superstep,
            active_vertices: s.active_vertices,
            messages_sent: s.messages_sent,
            vertices_updated: s.vertices_updated,
            pct_updated: ratio_sig6(s.vertices_updated, meta.n),
        })
        .collect();
    let updates: u64 = counters
        .supersteps
        .iter()
        .filter(|s| s.superstep >= 1)
        .map(|s| s.vertices_updated)
        .sum();

    Ok(RunReport {
        dataset: meta.dataset,
        n: meta.n,
        m: meta.m,
        supersteps: per_superstep.len() as u64,
        total_messages: counters.total_sent(),
        avg_updates_per_vertex: ratio_sig6(updates, meta.n),
        k_max,
        k_avg,
        wall_ms: meta.wall_ms,
        workers: meta.workers,
        partitions: meta.partitions,
        per_superstep,
    })
}
