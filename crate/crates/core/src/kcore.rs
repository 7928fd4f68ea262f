//! Distributed k-core decomposition as a vertex program.
//!
//! Every vertex starts with its degree as coreness estimate and tells its
//! neighbours. Whenever estimates arrive, a vertex recomputes the largest `k`
//! such that at least `k` neighbours claim an estimate of at least `k`, and
//! if that is below its own value it lowers the value and broadcasts again.
//! Estimates only go down and never drop below the true coreness, so the
//! process settles exactly on the core numbers.
//!
//! Each vertex caches the last estimate heard from every neighbour. After the
//! first round only neighbours that changed send anything, so the bound has to
//! be computed over the cache rather than over the current inbox.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bsp::{
    self, Context, EngineConfig, EngineError, Executor, FinishContext, Reducer, VertexProgram,
};
use crate::graph::{Graph, VertexId};
use crate::metrics::{self, IntegrityError, RunMeta, RunReport};

/// Estimate of a neighbour that has not been heard from yet.
pub const UNKNOWN: u32 = u32::MAX;

/// Aggregator counting value-lowering events.
pub const UPDATES: &str = "updates";
/// Aggregator holding the largest final core number.
pub const K_MAX: &str = "k_max";
/// Aggregator holding the sum of final core numbers.
pub const CORE_SUM: &str = "core_sum";

/// A coreness estimate sent from `source` to each of its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Message {
    pub source: VertexId,
    pub estimate: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexState {
    /// Last estimate received from each neighbour, aligned with the sorted
    /// neighbour list. Starts at [`UNKNOWN`].
    pub neighbor_est: Vec<u32>,
    pub changed_this_superstep: bool,
}

/// Largest `i` in `[1, value]` such that at least `i` of `ests` are `>= i`.
///
/// Estimates are bucketed at `min(est, value)` and scanned from `value`
/// downwards. Returns 1 when nothing above 1 qualifies and 0 when `value` is
/// 0 (an isolated vertex).
pub fn compute_upper_bound(value: u32, ests: &[u32]) -> u32 {
    if value == 0 {
        return 0;
    }
    let top = value as usize;
    let mut count = vec![0u32; top + 1];
    for &e in ests {
        count[(e as usize).min(top)] += 1;
    }
    let mut cumul = 0;
    for i in (2..=top).rev() {
        cumul += count[i];
        if cumul as usize >= i {
            return i as u32;
        }
    }
    1
}

/// Per-vertex coreness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoreResult {
    pub core: Vec<u32>,
}

impl CoreResult {
    pub fn len(&self) -> usize {
        self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }
}

impl From<Vec<u32>> for CoreResult {
    fn from(core: Vec<u32>) -> Self {
        Self { core }
    }
}

/// The k-core vertex program.
#[derive(Clone, Copy)]
pub struct KCore {
    upper_bound: fn(u32, &[u32]) -> u32,
}

impl KCore {
    pub fn new() -> Self {
        Self {
            upper_bound: compute_upper_bound,
        }
    }

    /// Same program with a different bound function. Used to check that the
    /// verification tooling notices a broken bound.
    pub fn with_upper_bound(upper_bound: fn(u32, &[u32]) -> u32) -> Self {
        Self { upper_bound }
    }
}

impl Default for KCore {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for KCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KCore").finish_non_exhaustive()
    }
}

impl VertexProgram for KCore {
    type Value = u32;
    type State = VertexState;
    type Message = Message;

    fn aggregators(&self) -> Vec<(&'static str, Reducer)> {
        vec![
            (UPDATES, Reducer::Sum),
            (K_MAX, Reducer::Max),
            (CORE_SUM, Reducer::Sum),
        ]
    }

    fn init(&self, ctx: &mut Context<'_, Self>) {
        let degree = ctx.degree();
        let value = degree as u32;
        ctx.set_value(value);
        *ctx.state_mut() = VertexState {
            neighbor_est: vec![UNKNOWN; degree],
            changed_this_superstep: false,
        };
        let source = ctx.id();
        ctx.send_to_all_neighbors(Message {
            source,
            estimate: value,
        });
    }

    fn step(&self, ctx: &mut Context<'_, Self>, inbox: &[Message]) {
        let neighbors = ctx.neighbors();
        let source = ctx.id();
        let (value, state) = ctx.value_and_state();
        for m in inbox {
            // The engine only delivers messages sent along edges.
            let slot = neighbors
                .binary_search(&m.source)
                .expect("message from a neighbour");
            let cached = &mut state.neighbor_est[slot];
            *cached = (*cached).min(m.estimate);
        }

        let current = *value;
        let local = if current == 0 {
            0
        } else {
            (self.upper_bound)(current, &state.neighbor_est)
        };
        state.changed_this_superstep = local < current;
        if local < current {
            *value = local;
            ctx.send_to_all_neighbors(Message {
                source,
                estimate: local,
            });
            ctx.aggregate(UPDATES, 1);
        }

        // Stay awake while some neighbour just reported a smaller estimate.
        let value = *ctx.value();
        if !inbox.iter().any(|m| value > m.estimate) {
            ctx.vote_to_halt();
        }
    }

    fn finish(&self, ctx: &mut FinishContext<'_, Self>) {
        let core = u64::from(*ctx.value());
        ctx.aggregate(K_MAX, core);
        ctx.aggregate(CORE_SUM, core);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    Engine(EngineError),
    Integrity(IntegrityError),
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::Engine(e) => e.fmt(f),
            DecomposeError::Integrity(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for DecomposeError {}

impl From<EngineError> for DecomposeError {
    fn from(e: EngineError) -> Self {
        DecomposeError::Engine(e)
    }
}

impl From<IntegrityError> for DecomposeError {
    fn from(e: IntegrityError) -> Self {
        DecomposeError::Integrity(e)
    }
}

/// Computes the coreness of every vertex with the default [`KCore`] program.
///
/// The returned report has an empty dataset name and `wall_ms = 0`; callers
/// that time the run fill those in.
pub fn decompose<E: Executor>(
    g: &Graph,
    cfg: &EngineConfig,
    exec: &E,
) -> Result<(CoreResult, RunReport), DecomposeError> {
    decompose_with(&KCore::new(), g, cfg, exec)
}

pub fn decompose_with<E: Executor>(
    program: &KCore,
    g: &Graph,
    cfg: &EngineConfig,
    exec: &E,
) -> Result<(CoreResult, RunReport), DecomposeError> {
    let outcome = bsp::run(g, program, cfg, exec)?;
    let cores = CoreResult::from(outcome.values);
    let report = metrics::collect(
        &outcome.counters,
        &outcome.aggregates,
        &cores,
        RunMeta::for_graph(g, cfg),
    )?;
    Ok((cores, report))
}
