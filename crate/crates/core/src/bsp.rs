//! Bulk synchronous parallel execution of vertex programs.
//!
//! A run is a sequence of supersteps separated by global barriers. Superstep 0
//! calls [`VertexProgram::init`] on every vertex; later supersteps call
//! [`VertexProgram::step`] on every vertex that is still active or has
//! messages waiting. Messages sent during superstep `s` are delivered at the
//! barrier and become visible in superstep `s + 1`. A vertex that votes to
//! halt is skipped until a message wakes it up again.
//!
//! Vertices are hash partitioned (`v mod partitions`). Each partition owns the
//! values, program state, inboxes and outboxes of its vertices, so partitions
//! can be computed concurrently by an [`Executor`] without shared mutable
//! state. Outboxes are grouped by destination partition and merged at the
//! barrier in partition order, which makes every counter independent of the
//! number of partitions and lanes.
//!
//! The run ends with the first superstep in which no vertex had to be invoked:
//! at that barrier all vertices have voted to halt and nothing is in flight.
//! That detection superstep is counted, so a graph whose vertices all halt in
//! superstep 1 reports three supersteps, and an empty graph reports one.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, VertexId};

/// A user-defined computation run once per vertex per superstep.
///
/// `step` must be a function of the vertex's own value and state, its
/// neighbourhood and the multiset of received messages. Inbox order is not
/// specified.
pub trait VertexProgram: Sync {
    /// Per-vertex output value, readable by the engine.
    type Value: Clone + PartialEq + Default + Send + Sync;
    /// Per-vertex private working state.
    type State: Default + Send;
    type Message: Clone + Send;

    /// Aggregators this program contributes to.
    fn aggregators(&self) -> Vec<(&'static str, Reducer)> {
        Vec::new()
    }

    /// Superstep 0. Called for every vertex.
    fn init(&self, ctx: &mut Context<'_, Self>);

    /// Supersteps 1, 2, ... Called for every active vertex and every vertex with
    /// a non-empty inbox.
    fn step(&self, ctx: &mut Context<'_, Self>, inbox: &[Self::Message]);

    /// Called once per vertex after the last superstep.
    fn finish(&self, _ctx: &mut FinishContext<'_, Self>) {}
}

/// Stable assignment of a vertex to a partition.
pub fn partition_of(v: VertexId, partitions: usize) -> usize {
    v as usize % partitions
}

fn partition_len(n: usize, partition: usize, partitions: usize) -> usize {
    if n > partition {
        (n - partition).div_ceil(partitions)
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub partitions: usize,
    /// Concurrent execution lanes. Only consulted by executors that spawn
    /// threads; the engine itself never looks at it.
    pub workers: usize,
    /// Hard cap on supersteps, including superstep 0 and the final detection
    /// superstep. `None` means `10 * n + 10`.
    pub max_supersteps: Option<usize>,
}

impl EngineConfig {
    pub fn new(partitions: usize, workers: usize) -> Self {
        Self {
            partitions,
            workers,
            max_supersteps: None,
        }
    }

    pub fn with_max_supersteps(mut self, cap: usize) -> Self {
        self.max_supersteps = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.partitions == 0 {
            return Err(EngineError::InvalidConfig("partitions must be at least 1"));
        }
        if self.workers == 0 {
            return Err(EngineError::InvalidConfig("workers must be at least 1"));
        }
        Ok(())
    }

    pub fn superstep_cap(&self, n: usize) -> usize {
        self.max_supersteps.unwrap_or(10 * n + 10)
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self::new(1, 1)
    }
}

/// Runs a closure over disjoint mutable items, possibly in parallel.
pub trait Executor {
    fn for_each_mut<T, F>(&self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(&mut T) + Sync + Send;
}

/// Processes partitions one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn for_each_mut<T, F>(&self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(&mut T) + Sync + Send,
    {
        items.iter_mut().for_each(f);
    }
}

// ── Aggregators ─────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reducer {
    Sum,
    Max,
}

impl Reducer {
    pub fn identity(self) -> u64 {
        0
    }

    pub fn combine(self, a: u64, b: u64) -> u64 {
        match self {
            Reducer::Sum => a + b,
            Reducer::Max => a.max(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregator {
    pub name: &'static str,
    pub reducer: Reducer,
    pub value: u64,
}

/// Named reducers with their current values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AggregatorSet {
    entries: Vec<Aggregator>,
}

impl AggregatorSet {
    pub fn new(schema: &[(&'static str, Reducer)]) -> Self {
        Self {
            entries: schema
                .iter()
                .map(|&(name, reducer)| Aggregator {
                    name,
                    reducer,
                    value: reducer.identity(),
                })
                .collect(),
        }
    }

    /// A set with the same schema and every value reset to its identity.
    pub fn empty_like(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|a| Aggregator {
                    value: a.reducer.identity(),
                    ..a.clone()
                })
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.entries
            .iter()
            .find(|a| a.name == name)
            .map(|a| a.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Aggregator> {
        self.entries.iter()
    }

    pub fn aggregate(&mut self, name: &str, contribution: u64) -> Result<(), EngineError> {
        let entry = self
            .entries
            .iter_mut()
            .find(|a| a.name == name)
            .ok_or_else(|| EngineError::UnknownAggregator(String::from(name)))?;
        entry.value = entry.reducer.combine(entry.value, contribution);
        Ok(())
    }

    fn same_schema(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.name == b.name && a.reducer == b.reducer)
    }

    /// Folds `other` into `self`.
    pub fn merge(&mut self, other: &Self) -> Result<(), EngineError> {
        if !self.same_schema(other) {
            return Err(EngineError::AggregatorSchemaMismatch);
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.value = a.reducer.combine(a.value, b.value);
        }
        Ok(())
    }
}

/// Reduces partition-local aggregator partials into the global value.
///
/// Returns `Ok(None)` when there are no partials at all.
pub fn aggregate_superstep(
    partials: &[AggregatorSet],
) -> Result<Option<AggregatorSet>, EngineError> {
    let Some(first) = partials.first() else {
        return Ok(None);
    };
    let mut global = first.empty_like();
    for p in partials {
        global.merge(p)?;
    }
    Ok(Some(global))
}

// ── Messaging ───────────────────────────────────────────────────────────

/// Messages produced by one partition in one superstep, grouped by the
/// partition that owns the destination vertex.
#[derive(Debug, Clone)]
pub struct Outbox<M> {
    by_partition: Vec<Vec<(VertexId, M)>>,
}

impl<M> Outbox<M> {
    pub fn new(partitions: usize) -> Self {
        Self {
            by_partition: (0..partitions).map(|_| Vec::new()).collect(),
        }
    }

    pub fn push(&mut self, target: VertexId, message: M) {
        let p = self.by_partition.len();
        self.by_partition[partition_of(target, p)].push((target, message));
    }

    pub fn len(&self) -> usize {
        self.by_partition.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_partition.iter().all(Vec::is_empty)
    }
}

/// Messages waiting for the vertices of one partition, indexed by local slot
/// (`v / partitions`).
#[derive(Debug, Clone)]
pub struct Inbox<M> {
    offsets: Vec<usize>,
    messages: Vec<M>,
}

impl<M> Inbox<M> {
    fn empty(local_len: usize) -> Self {
        Self {
            offsets: alloc::vec![0; local_len + 1],
            messages: Vec::new(),
        }
    }

    /// Messages for the vertex in local slot `slot`.
    pub fn slot(&self, slot: usize) -> &[M] {
        &self.messages[self.offsets[slot]..self.offsets[slot + 1]]
    }

    /// Messages for global vertex `v`.
    pub fn for_vertex(&self, v: VertexId, partitions: usize) -> &[M] {
        self.slot(v as usize / partitions)
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    fn build(local_len: usize, partitions: usize, batches: Batches<M>) -> Self {
        let mut offsets = alloc::vec![0usize; local_len + 1];
        for batch in &batches {
            for (v, _) in batch {
                offsets[*v as usize / partitions + 1] += 1;
            }
        }
        for i in 0..local_len {
            offsets[i + 1] += offsets[i];
        }
        let total = offsets[local_len];
        let mut cursor = offsets[..local_len].to_vec();
        let mut slots: Vec<Option<M>> = (0..total).map(|_| None).collect();
        for batch in batches {
            for (v, m) in batch {
                let slot = v as usize / partitions;
                slots[cursor[slot]] = Some(m);
                cursor[slot] += 1;
            }
        }
        Self {
            offsets,
            messages: slots
                .into_iter()
                .map(|m| m.expect("every slot filled"))
                .collect(),
        }
    }
}

/// Messages bound for one destination partition, one batch per source.
type Batches<M> = Vec<Vec<(VertexId, M)>>;

/// Destination partition, its incoming batches, and the inbox built from them.
type Delivery<M> = (usize, Batches<M>, Option<Inbox<M>>);

/// Turns source-partition outboxes into destination-partition batches,
/// ordered by source partition.
fn transpose<M>(outboxes: Vec<Outbox<M>>, partitions: usize) -> Vec<Batches<M>> {
    let mut by_dest: Vec<Batches<M>> = (0..partitions).map(|_| Vec::new()).collect();
    for outbox in outboxes {
        for (dest, batch) in outbox.by_partition.into_iter().enumerate() {
            if !batch.is_empty() {
                by_dest[dest].push(batch);
            }
        }
    }
    by_dest
}

/// Delivers one superstep's outboxes to per-partition inboxes for `n` vertices.
///
/// Every message lands in exactly one inbox slot, the one of its target.
pub fn deliver<M>(outboxes: Vec<Outbox<M>>, n: usize) -> Vec<Inbox<M>> {
    let partitions = outboxes.len().max(1);
    transpose(outboxes, partitions)
        .into_iter()
        .enumerate()
        .map(|(d, batches)| Inbox::build(partition_len(n, d, partitions), partitions, batches))
        .collect()
}

// ── Vertex contexts ─────────────────────────────────────────────────────

/// The view a vertex has of the world while it computes.
pub struct Context<'a, P: VertexProgram + ?Sized> {
    graph: &'a Graph,
    id: VertexId,
    superstep: u32,
    value: &'a mut P::Value,
    state: &'a mut P::State,
    outbox: &'a mut Outbox<P::Message>,
    aggregates: &'a mut AggregatorSet,
    sent: &'a mut u64,
    error: &'a mut Option<EngineError>,
    halted: bool,
}

impl<'a, P: VertexProgram + ?Sized> Context<'a, P> {
    pub fn id(&self) -> VertexId {
        self.id
    }

    pub fn superstep(&self) -> u32 {
        self.superstep
    }

    pub fn degree(&self) -> usize {
        self.graph.degree(self.id)
    }

    pub fn neighbors(&self) -> &'a [VertexId] {
        self.graph.neighbors(self.id)
    }

    pub fn value(&self) -> &P::Value {
        self.value
    }

    pub fn set_value(&mut self, value: P::Value) {
        *self.value = value;
    }

    pub fn state(&self) -> &P::State {
        self.state
    }

    pub fn state_mut(&mut self) -> &mut P::State {
        self.state
    }

    /// Value and state borrowed together.
    pub fn value_and_state(&mut self) -> (&mut P::Value, &mut P::State) {
        (self.value, self.state)
    }

    pub fn send_to_all_neighbors(&mut self, message: P::Message) {
        let neighbors = self.graph.neighbors(self.id);
        for &w in neighbors {
            self.outbox.push(w, message.clone());
        }
        *self.sent += neighbors.len() as u64;
    }

    /// Sends to a single vertex, which must be a neighbour. A violation is
    /// recorded and fails the whole run at the next barrier.
    pub fn send_to(&mut self, target: VertexId, message: P::Message) -> Result<(), EngineError> {
        if self.graph.neighbor_index(self.id, target).is_none() {
            let err = EngineError::NotANeighbor {
                superstep: self.superstep,
                source: self.id,
                target,
            };
            self.error.get_or_insert_with(|| err.clone());
            return Err(err);
        }
        self.outbox.push(target, message);
        *self.sent += 1;
        Ok(())
    }

    pub fn vote_to_halt(&mut self) {
        self.halted = true;
    }

    pub fn aggregate(&mut self, name: &str, contribution: u64) {
        if let Err(err) = self.aggregates.aggregate(name, contribution) {
            self.error.get_or_insert(err);
        }
    }
}

/// Read-mostly view used by [`VertexProgram::finish`].
pub struct FinishContext<'a, P: VertexProgram + ?Sized> {
    graph: &'a Graph,
    id: VertexId,
    value: &'a P::Value,
    state: &'a P::State,
    aggregates: &'a mut AggregatorSet,
    error: &'a mut Option<EngineError>,
}

impl<'a, P: VertexProgram + ?Sized> FinishContext<'a, P> {
    pub fn id(&self) -> VertexId {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.graph.degree(self.id)
    }

    pub fn value(&self) -> &P::Value {
        self.value
    }

    pub fn state(&self) -> &P::State {
        self.state
    }

    pub fn aggregate(&mut self, name: &str, contribution: u64) {
        if let Err(err) = self.aggregates.aggregate(name, contribution) {
            self.error.get_or_insert(err);
        }
    }
}

// ── Counters and errors ─────────────────────────────────────────────────

/// Engine-level truth about one superstep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperstepCounters {
    pub superstep: u32,
    /// Vertices whose program was invoked.
    pub active_vertices: u64,
    pub messages_sent: u64,
    /// Messages placed into inboxes at the barrier closing this superstep.
    pub messages_delivered: u64,
    /// Vertices whose value changed (always 0 in superstep 0).
    pub vertices_updated: u64,
    /// Global aggregator values reduced at this barrier.
    pub aggregates: AggregatorSet,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineCounters {
    pub supersteps: Vec<SuperstepCounters>,
}

impl EngineCounters {
    pub fn total_sent(&self) -> u64 {
        self.supersteps.iter().map(|s| s.messages_sent).sum()
    }

    pub fn total_delivered(&self) -> u64 {
        self.supersteps.iter().map(|s| s.messages_delivered).sum()
    }

    pub fn total_updates(&self) -> u64 {
        self.supersteps.iter().map(|s| s.vertices_updated).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    InvalidConfig(&'static str),
    /// The superstep cap was reached before every vertex halted.
    NonTermination {
        max_supersteps: usize,
        partial: Box<EngineCounters>,
    },
    NotANeighbor {
        superstep: u32,
        source: VertexId,
        target: VertexId,
    },
    UnknownAggregator(String),
    AggregatorSchemaMismatch,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::InvalidConfig(why) => write!(f, "invalid engine configuration: {why}"),
            EngineError::NonTermination {
                max_supersteps,
                partial,
            } => write!(
                f,
                "no termination within {max_supersteps} supersteps ({} messages sent so far)",
                partial.total_sent()
            ),
            EngineError::NotANeighbor {
                superstep,
                source,
                target,
            } => write!(
                f,
                "vertex {source} sent a message to non-neighbour {target} in superstep {superstep}"
            ),
            EngineError::UnknownAggregator(name) => write!(f, "unknown aggregator `{name}`"),
            EngineError::AggregatorSchemaMismatch => {
                f.write_str("aggregator partials use different schemas")
            }
        }
    }
}

impl core::error::Error for EngineError {}

// ── The run loop ────────────────────────────────────────────────────────

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome<V> {
    /// Final value per vertex, indexed by internal id.
    pub values: Vec<V>,
    pub counters: EngineCounters,
    /// Aggregates reduced over every superstep and the finish pass.
    pub aggregates: AggregatorSet,
}

struct Partition<P: VertexProgram> {
    index: usize,
    values: Vec<P::Value>,
    states: Vec<P::State>,
    halted: Vec<bool>,
    inbox: Inbox<P::Message>,
    outbox: Outbox<P::Message>,
    aggregates: AggregatorSet,
    invoked: u64,
    sent: u64,
    updated: u64,
    error: Option<EngineError>,
}

impl<P: VertexProgram> Partition<P> {
    fn new(index: usize, n: usize, partitions: usize, schema: &AggregatorSet) -> Self {
        let len = partition_len(n, index, partitions);
        Self {
            index,
            values: (0..len).map(|_| P::Value::default()).collect(),
            states: (0..len).map(|_| P::State::default()).collect(),
            halted: alloc::vec![false; len],
            inbox: Inbox::empty(len),
            outbox: Outbox::new(partitions),
            aggregates: schema.empty_like(),
            invoked: 0,
            sent: 0,
            updated: 0,
            error: None,
        }
    }

    fn compute(&mut self, graph: &Graph, program: &P, superstep: u32, partitions: usize) {
        self.outbox = Outbox::new(partitions);
        self.aggregates = self.aggregates.empty_like();
        self.invoked = 0;
        self.sent = 0;
        self.updated = 0;
        let inbox = core::mem::replace(&mut self.inbox, Inbox::empty(self.values.len()));

        for slot in 0..self.values.len() {
            let messages = inbox.slot(slot);
            if superstep > 0 && self.halted[slot] && messages.is_empty() {
                continue;
            }
            let id = (slot * partitions + self.index) as VertexId;
            let before = (superstep > 0).then(|| self.values[slot].clone());
            let mut ctx = Context::<P> {
                graph,
                id,
                superstep,
                value: &mut self.values[slot],
                state: &mut self.states[slot],
                outbox: &mut self.outbox,
                aggregates: &mut self.aggregates,
                sent: &mut self.sent,
                error: &mut self.error,
                halted: false,
            };
            if superstep == 0 {
                program.init(&mut ctx);
            } else {
                program.step(&mut ctx, messages);
            }
            self.halted[slot] = ctx.halted;
            self.invoked += 1;
            if before.is_some_and(|b| b != self.values[slot]) {
                self.updated += 1;
            }
        }
    }

    fn finish(&mut self, graph: &Graph, program: &P, partitions: usize) {
        self.aggregates = self.aggregates.empty_like();
        for slot in 0..self.values.len() {
            let mut ctx = FinishContext::<P> {
                graph,
                id: (slot * partitions + self.index) as VertexId,
                value: &self.values[slot],
                state: &self.states[slot],
                aggregates: &mut self.aggregates,
                error: &mut self.error,
            };
            program.finish(&mut ctx);
        }
    }
}

/// Runs `program` on `graph` to termination.
pub fn run<P, E>(
    graph: &Graph,
    program: &P,
    cfg: &EngineConfig,
    exec: &E,
) -> Result<RunOutcome<P::Value>, EngineError>
where
    P: VertexProgram,
    E: Executor,
{
    run_observed(graph, program, cfg, exec, |_, _| {})
}

/// Like [`run`], but hands every vertex value to `observer` after each
/// superstep (values indexed by internal id).
pub fn run_observed<P, E, O>(
    graph: &Graph,
    program: &P,
    cfg: &EngineConfig,
    exec: &E,
    mut observer: O,
) -> Result<RunOutcome<P::Value>, EngineError>
where
    P: VertexProgram,
    E: Executor,
    O: FnMut(u32, &[P::Value]),
{
    cfg.validate()?;
    let n = graph.n();
    let p = cfg.partitions;
    let cap = cfg.superstep_cap(n);
    let schema = AggregatorSet::new(&program.aggregators());
    let mut parts: Vec<Partition<P>> = (0..p).map(|i| Partition::new(i, n, p, &schema)).collect();
    let mut counters = EngineCounters::default();
    let mut totals = schema.empty_like();
    let mut snapshot: Vec<P::Value> = Vec::new();

    let mut superstep: u32 = 0;
    loop {
        if counters.supersteps.len() >= cap {
            return Err(EngineError::NonTermination {
                max_supersteps: cap,
                partial: Box::new(counters),
            });
        }

        exec.for_each_mut(&mut parts, |part| {
            part.compute(graph, program, superstep, p)
        });

        if let Some(err) = parts.iter_mut().find_map(|part| part.error.take()) {
            return Err(err);
        }
        let partials: Vec<AggregatorSet> =
            parts.iter().map(|part| part.aggregates.clone()).collect();
        let global = aggregate_superstep(&partials)?.unwrap_or_else(|| schema.empty_like());
        totals.merge(&global)?;

        let active_vertices = parts.iter().map(|part| part.invoked).sum();
        let messages_sent = parts.iter().map(|part| part.sent).sum();
        let vertices_updated = parts.iter().map(|part| part.updated).sum();

        let outboxes: Vec<Outbox<P::Message>> = parts
            .iter_mut()
            .map(|part| core::mem::replace(&mut part.outbox, Outbox::new(0)))
            .collect();
        let mut work: Vec<Delivery<P::Message>> = transpose(outboxes, p)
            .into_iter()
            .enumerate()
            .map(|(d, batches)| (d, batches, None))
            .collect();
        exec.for_each_mut(&mut work, |(d, batches, inbox)| {
            *inbox = Some(Inbox::build(
                partition_len(n, *d, p),
                p,
                core::mem::take(batches),
            ));
        });
        let mut messages_delivered = 0;
        for (part, (_, _, inbox)) in parts.iter_mut().zip(work) {
            let inbox = inbox.expect("inbox built");
            messages_delivered += inbox.len() as u64;
            part.inbox = inbox;
        }

        counters.supersteps.push(SuperstepCounters {
            superstep,
            active_vertices,
            messages_sent,
            messages_delivered,
            vertices_updated,
            aggregates: global,
        });

        gather(&parts, n, p, &mut snapshot);
        observer(superstep, &snapshot);

        if active_vertices == 0 {
            break;
        }
        superstep += 1;
    }

    exec.for_each_mut(&mut parts, |part| part.finish(graph, program, p));
    if let Some(err) = parts.iter_mut().find_map(|part| part.error.take()) {
        return Err(err);
    }
    for part in &parts {
        totals.merge(&part.aggregates)?;
    }

    gather(&parts, n, p, &mut snapshot);
    Ok(RunOutcome {
        values: snapshot,
        counters,
        aggregates: totals,
    })
}

fn gather<P: VertexProgram>(
    parts: &[Partition<P>],
    n: usize,
    partitions: usize,
    out: &mut Vec<P::Value>,
) {
    out.clear();
    out.extend((0..n).map(|v| parts[v % partitions].values[v / partitions].clone()));
}
