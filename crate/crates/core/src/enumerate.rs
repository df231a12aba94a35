//! Bottom-up enumeration over characteristic matrices.
//!
//! Costs are processed in increasing order. Every candidate of cost `c` is built from stored
//! candidates whose costs sum to `c` minus the operator's weight, and only the first formula
//! with a given matrix is kept. The first new matrix that separates the specification is
//! therefore a minimum-cost separator.
//!
//! Within a level the candidate space is cut into batches. Batches are produced (possibly in
//! parallel) into private buffers and then merged into the store strictly in enumeration
//! order, so the store, the witness and every counter are independent of the thread count.

use std::ops::Range;
use std::time::{Duration, Instant};

use hashbrown::HashTable;
use rayon::prelude::*;

use crate::bits::{self, kernel, Semantics};
use crate::formula::{Formula, Op, OpSet};
use crate::layout::{Packing, WordMasks};
use crate::oracle;
use crate::trace::Specification;

/// Child slot of atoms and the right slot of unary entries.
pub const NO_CHILD: u32 = u32::MAX;

/// Cost of each connective. Atoms always cost 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpWeights([usize; 7]);

impl OpWeights {
    pub fn uniform() -> Self {
        Self([1; 7])
    }

    pub fn get(&self, op: Op) -> usize {
        self.0[op as usize]
    }

    pub fn set(mut self, op: Op, weight: usize) -> Self {
        assert!(weight >= 1, "operator weights must be positive");
        if op != Op::Atom {
            self.0[op as usize] = weight;
        }
        self
    }

    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|&w| w == 1)
    }

    /// Weighted cost of a formula.
    pub fn cost(&self, f: &Formula) -> usize {
        match f {
            Formula::Atom(_) => 1,
            Formula::Not(g) | Formula::Next(g) | Formula::Future(g) => {
                self.get(f.op()) + self.cost(g)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                self.get(f.op()) + self.cost(a) + self.cost(b)
            }
        }
    }
}

impl Default for OpWeights {
    fn default() -> Self {
        Self::uniform()
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub ops: OpSet,
    pub weights: OpWeights,
    pub max_cost: usize,
    pub time_budget: Option<Duration>,
    /// Bytes.
    pub memory_budget: usize,
    /// Candidates per batch.
    pub batch_size: usize,
    /// Worker threads; 0 means the available parallelism.
    pub threads: usize,
    pub packing: Packing,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            ops: OpSet::standard(),
            weights: OpWeights::uniform(),
            max_cost: 20,
            time_budget: Some(Duration::from_secs(300)),
            memory_budget: 8 << 30,
            batch_size: 1 << 16,
            threads: 0,
            packing: Packing::Dense,
        }
    }
}

impl SynthConfig {
    pub fn effective_threads(&self) -> usize {
        if self.threads == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            self.threads
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Found,
    CostExhausted,
    TimeExhausted,
    MemoryExhausted,
}

impl Outcome {
    pub fn is_found(self) -> bool {
        self == Outcome::Found
    }

    pub fn describe(self) -> &'static str {
        match self {
            Outcome::Found => "found",
            Outcome::CostExhausted => "max cost",
            Outcome::TimeExhausted => "time",
            Outcome::MemoryExhausted => "memory",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthStats {
    /// Candidate matrices built, before deduplication.
    pub constructed: u64,
    /// Distinct matrices in the store.
    pub unique: usize,
    pub elapsed: Duration,
    /// Highest cost level that was started.
    pub max_cost_reached: usize,
    pub outcome: Outcome,
    /// The formula is of minimum cost over the configured operators.
    pub minimal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub formula: Option<Formula>,
    pub cost: Option<usize>,
    pub stats: SynthStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub op: Op,
    /// Child id, or the proposition index for atoms.
    pub left: u32,
    pub right: u32,
}

#[inline]
fn hash_words(words: &[u64]) -> u64 {
    let mut h: u64 = 0x243f_6a88_85a3_08d3;
    for &w in words {
        h = (h ^ w).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        h ^= h >> 29;
    }
    h.wrapping_mul(0xbf58_476d_1ce4_e5b9) ^ (h >> 32)
}

/// Distinct characteristic matrices with the provenance needed to rebuild a formula.
///
/// Ids are dense, assigned in insertion order and never change. Ids of cost `c` form the
/// contiguous range [`CandidateStore::cost_range`].
#[derive(Debug)]
pub struct CandidateStore {
    stride: usize,
    words: Vec<u64>,
    entries: Vec<Entry>,
    levels: Vec<Range<u32>>,
    seen: HashTable<u32>,
}

impl CandidateStore {
    pub fn new(stride: usize) -> Self {
        assert!(stride >= 1);
        Self {
            stride,
            words: Vec::new(),
            entries: Vec::new(),
            // cost 0 is an empty placeholder level
            #[allow(clippy::single_range_in_vec_init)]
            levels: vec![0..0],
            seen: HashTable::new(),
        }
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn cm(&self, id: u32) -> &[u64] {
        let start = id as usize * self.stride;
        &self.words[start..start + self.stride]
    }

    pub fn entry(&self, id: u32) -> Entry {
        self.entries[id as usize]
    }

    /// Ids stored at exactly this cost; empty for costs not reached.
    pub fn cost_range(&self, cost: usize) -> Range<u32> {
        self.levels.get(cost).cloned().unwrap_or(0..0)
    }

    /// Highest cost with a level opened, 0 if none.
    pub fn top_cost(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn cost_of(&self, id: u32) -> usize {
        self.levels.iter().position(|r| r.contains(&id)).expect("id not in store")
    }

    pub fn find(&self, words: &[u64]) -> Option<u32> {
        let h = hash_words(words);
        let stride = self.stride;
        let store = &self.words;
        self.seen
            .find(h, |&id| &store[id as usize * stride..][..stride] == words)
            .copied()
    }

    pub fn contains(&self, words: &[u64]) -> bool {
        self.find(words).is_some()
    }

    fn open_level(&mut self, cost: usize) {
        assert_eq!(cost, self.levels.len(), "levels must be opened in order");
        let n = self.entries.len() as u32;
        self.levels.push(n..n);
    }

    /// Inserts a matrix at the current top cost. Returns the new id, or `Err` with the id of
    /// the existing equal matrix.
    fn insert(&mut self, words: &[u64], entry: Entry) -> Result<u32, u32> {
        debug_assert_eq!(words.len(), self.stride);
        let h = hash_words(words);
        let stride = self.stride;
        let store = &self.words;
        let id = self.entries.len() as u32;
        match self.seen.entry(
            h,
            |&k| &store[k as usize * stride..][..stride] == words,
            |&k| hash_words(&store[k as usize * stride..][..stride]),
        ) {
            hashbrown::hash_table::Entry::Occupied(o) => Err(*o.get()),
            hashbrown::hash_table::Entry::Vacant(v) => {
                v.insert(id);
                self.words.extend_from_slice(words);
                self.entries.push(entry);
                self.levels.last_mut().expect("no open level").end = id + 1;
                Ok(id)
            }
        }
    }

    /// Bytes held by the store's buffers.
    pub fn memory_bytes(&self) -> usize {
        self.words.capacity() * 8
            + self.entries.capacity() * std::mem::size_of::<Entry>()
            + self.seen.capacity() * (std::mem::size_of::<u32>() + 1)
    }

    /// Bytes the store would hold after growing to fit `extra` more entries, counting the
    /// transient copy made while reallocating.
    fn projected_bytes(&self, extra: usize) -> usize {
        let n = self.entries.len() + extra;
        let mut bytes = self.memory_bytes();
        if n > self.entries.capacity() {
            let grow = growth(self.entries.capacity(), n);
            bytes += grow * (self.stride * 8 + std::mem::size_of::<Entry>());
            bytes += self.entries.len() * (self.stride * 8 + std::mem::size_of::<Entry>());
        }
        // hashbrown keeps the load factor at 7/8 and doubles when full.
        if n > self.seen.capacity() {
            let buckets = (self.seen.capacity() * 8 / 7).next_power_of_two().max(16);
            bytes += buckets * 2 * (std::mem::size_of::<u32>() + 1);
        }
        bytes
    }

    fn reserve(&mut self, extra: usize) {
        let n = self.entries.len() + extra;
        if n > self.entries.capacity() {
            let grow = growth(self.entries.capacity(), n);
            self.entries.reserve_exact(grow);
            self.words.reserve_exact(grow * self.stride);
        }
        if self.seen.capacity() - self.seen.len() < extra {
            let (stride, store) = (self.stride, &self.words);
            self.seen.reserve(extra, |&k| {
                hash_words(&store[k as usize * stride..][..stride])
            });
        }
    }

    /// Rebuilds the formula recorded for `id`.
    pub fn reconstruct(&self, id: u32) -> Formula {
        let e = self.entry(id);
        let child = |c: u32| Box::new(self.reconstruct(c));
        match e.op {
            Op::Atom => Formula::Atom(e.left as usize),
            Op::Not => Formula::Not(child(e.left)),
            Op::Next => Formula::Next(child(e.left)),
            Op::Future => Formula::Future(child(e.left)),
            Op::And => Formula::And(child(e.left), child(e.right)),
            Op::Or => Formula::Or(child(e.left), child(e.right)),
            Op::Until => Formula::Until(child(e.left), child(e.right)),
        }
    }
}

/// Additional capacity to reserve when `needed` entries no longer fit: grow by half
/// instead of doubling so a single step stays well inside the memory budget.
fn growth(capacity: usize, needed: usize) -> usize {
    let target = needed.max(capacity + capacity / 2).max(1 << 12);
    target - capacity
}

/// A contiguous part of one level's candidate space.
#[derive(Debug, Clone)]
enum Block {
    Unary { op: Op, child: Range<u32> },
    /// Every `(l, r)` with `l` in `left` and `r` in `right`.
    Pairs { op: Op, left: Range<u32>, right: Range<u32> },
    /// Every `(l, r)` with `l <= r`, both in `ids`.
    Triangle { op: Op, ids: Range<u32> },
}

impl Block {
    fn size(&self) -> u64 {
        match self {
            Block::Unary { child, .. } => child.len() as u64,
            Block::Pairs { left, right, .. } => left.len() as u64 * right.len() as u64,
            Block::Triangle { ids, .. } => {
                let n = ids.len() as u64;
                n * (n + 1) / 2
            }
        }
    }

    fn op(&self) -> Op {
        match self {
            Block::Unary { op, .. } | Block::Pairs { op, .. } | Block::Triangle { op, .. } => *op,
        }
    }
}

/// Row index and column index of flat position `k` in the upper triangle of an `n x n`
/// matrix, rows stored left to right starting at the diagonal.
fn triangle_position(n: u64, k: u64) -> (u64, u64) {
    // Row i starts at i*n - i*(i-1)/2.
    let row_start = |i: u64| i * n - i * i.saturating_sub(1) / 2;
    let (mut lo, mut hi) = (0u64, n);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if row_start(mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, lo + (k - row_start(lo)))
}

#[derive(Debug, Clone)]
struct Batch {
    block: usize,
    start: u64,
    len: u64,
}

/// Candidates of one batch that still need merging, in enumeration order.
#[derive(Debug, Default)]
struct BatchOutput {
    op: Option<Op>,
    words: Vec<u64>,
    children: Vec<(u32, u32)>,
    /// Candidates built, up to and including a separator if one was hit.
    produced: u64,
    /// Index into `children` of the separating candidate.
    separator: Option<usize>,
}

/// How the matrix of a candidate is computed from its children.
trait Combine: Copy + Send + Sync {
    fn apply(self, out: &mut [u64], left: &[u64], right: &[u64], masks: &[WordMasks]);
}

macro_rules! combine {
    ($name:ident, |$o:ident, $l:ident, $r:ident, $m:ident| $body:expr) => {
        #[derive(Clone, Copy)]
        struct $name;
        impl Combine for $name {
            #[inline(always)]
            fn apply(self, out: &mut [u64], left: &[u64], right: &[u64], masks: &[WordMasks]) {
                for (((o, &$l), &$r), $m) in out.iter_mut().zip(left).zip(right).zip(masks) {
                    let $o = o;
                    *$o = $body;
                }
            }
        }
    };
}

combine!(NotOp, |o, l, _r, m| kernel::not(l, m));
combine!(NextOp, |o, l, _r, m| kernel::next(l, m));
combine!(FutureOp, |o, l, _r, m| kernel::future(l, m));
combine!(AndOp, |o, l, r, _m| kernel::and(l, r));
combine!(OrOp, |o, l, r, _m| kernel::or(l, r));
combine!(UntilOp, |o, l, r, m| kernel::until(l, r, m));

/// Level-by-level driver owning the store for one specification.
pub struct Enumerator {
    semantics: Semantics,
    config: SynthConfig,
    store: CandidateStore,
    constructed: u64,
    pool: Option<rayon::ThreadPool>,
}

/// Result of expanding one cost level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelReport {
    pub cost: usize,
    pub constructed: u64,
    pub new_entries: usize,
    pub separator: Option<u32>,
    /// Set when a budget stopped the level early.
    pub aborted: Option<Outcome>,
}

impl Enumerator {
    pub fn new(spec: &Specification, config: SynthConfig) -> Self {
        let semantics = Semantics::with_packing(spec, config.packing);
        let store = CandidateStore::new(semantics.layout().word_count());
        let threads = config.effective_threads();
        let pool = (threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("failed to build thread pool")
        });
        Self { semantics, config, store, constructed: 0, pool }
    }

    pub fn store(&self) -> &CandidateStore {
        &self.store
    }

    pub fn semantics(&self) -> &Semantics {
        &self.semantics
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    /// Candidates built so far over all levels.
    pub fn constructed(&self) -> u64 {
        self.constructed
    }

    /// Rebuilds the formula for `id`; in debug builds also re-evaluates it.
    pub fn reconstruct(&self, id: u32) -> Formula {
        let f = self.store.reconstruct(id);
        debug_assert_eq!(
            self.semantics.evaluate(&f).words(),
            self.store.cm(id),
            "reconstructed formula disagrees with its stored matrix"
        );
        f
    }

    fn blocks(&self, cost: usize) -> Vec<Block> {
        let w = &self.config.weights;
        let mut blocks = Vec::new();
        for op in self.config.ops.iter() {
            let weight = w.get(op);
            if cost <= weight {
                continue;
            }
            let rest = cost - weight;
            match op.arity() {
                1 => blocks.push(Block::Unary { op, child: self.store.cost_range(rest) }),
                _ => {
                    for lc in 1..rest {
                        let rc = rest - lc;
                        let left = self.store.cost_range(lc);
                        let right = self.store.cost_range(rc);
                        if op.is_commutative() {
                            if lc < rc {
                                blocks.push(Block::Pairs { op, left, right });
                            } else if lc == rc {
                                blocks.push(Block::Triangle { op, ids: left });
                            }
                        } else {
                            blocks.push(Block::Pairs { op, left, right });
                        }
                    }
                }
            }
        }
        blocks.retain(|b| b.size() > 0);
        blocks
    }

    fn past_deadline(&self, started: Instant) -> bool {
        self.config.time_budget.is_some_and(|t| started.elapsed() >= t)
    }

    /// Builds every candidate of `cost`. Lower levels must be complete. With
    /// `stop_at_separator` the level ends at the first new separating matrix.
    pub fn expand_level(&mut self, cost: usize, stop_at_separator: bool) -> LevelReport {
        self.expand_level_until(cost, stop_at_separator, Instant::now())
    }

    fn expand_level_until(
        &mut self,
        cost: usize,
        stop_at_separator: bool,
        started: Instant,
    ) -> LevelReport {
        assert!(cost >= 1);
        self.store.open_level(cost);
        let before = self.store.len();
        let mut report = LevelReport {
            cost,
            constructed: 0,
            new_entries: 0,
            separator: None,
            aborted: None,
        };

        if cost == 1 {
            for (p, atom) in self.semantics.atoms().iter().enumerate() {
                let words = atom.words().to_vec();
                report.constructed += 1;
                if self.store.projected_bytes(1) > self.config.memory_budget {
                    report.aborted = Some(Outcome::MemoryExhausted);
                    break;
                }
                let sep = bits::separates_words(&words, self.semantics.layout().words());
                let entry = Entry { op: Op::Atom, left: p as u32, right: NO_CHILD };
                let id = match self.store.insert(&words, entry) {
                    Ok(id) | Err(id) => id,
                };
                if sep && report.separator.is_none() {
                    report.separator = Some(id);
                    if stop_at_separator {
                        break;
                    }
                }
            }
        } else {
            self.expand_compound(cost, stop_at_separator, started, &mut report);
        }

        report.new_entries = self.store.len() - before;
        self.constructed += report.constructed;
        report
    }

    fn expand_compound(
        &mut self,
        cost: usize,
        stop_at_separator: bool,
        started: Instant,
        report: &mut LevelReport,
    ) {
        let blocks = self.blocks(cost);
        let batch_size = self.config.batch_size.max(1) as u64;
        let batches: Vec<Batch> = blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| {
                let n = b.size();
                (0..n.div_ceil(batch_size)).map(move |k| Batch {
                    block: i,
                    start: k * batch_size,
                    len: batch_size.min(n - k * batch_size),
                })
            })
            .collect();

        let threads = self.pool.as_ref().map_or(1, |p| p.current_num_threads());
        let group = if threads > 1 { threads * 4 } else { 1 };
        let prefilter = threads > 1;

        for chunk in batches.chunks(group) {
            if self.past_deadline(started) {
                report.aborted = Some(Outcome::TimeExhausted);
                return;
            }
            let outputs: Vec<BatchOutput> = {
                let this = &*self;
                let run = |b: &Batch| this.produce(&blocks[b.block], b, stop_at_separator, prefilter);
                match &self.pool {
                    Some(pool) => pool.install(|| chunk.par_iter().map(run).collect()),
                    None => chunk.iter().map(run).collect(),
                }
            };
            for out in outputs {
                if self.merge(out, stop_at_separator, report) {
                    return;
                }
            }
        }
    }

    /// Builds the candidates of one batch into a private buffer.
    fn produce(&self, block: &Block, batch: &Batch, stop: bool, prefilter: bool) -> BatchOutput {
        match block.op() {
            Op::Not => self.produce_with(NotOp, block, batch, stop, prefilter),
            Op::Next => self.produce_with(NextOp, block, batch, stop, prefilter),
            Op::Future => self.produce_with(FutureOp, block, batch, stop, prefilter),
            Op::And => self.produce_with(AndOp, block, batch, stop, prefilter),
            Op::Or => self.produce_with(OrOp, block, batch, stop, prefilter),
            Op::Until => self.produce_with(UntilOp, block, batch, stop, prefilter),
            Op::Atom => unreachable!("atoms are not enumerated in blocks"),
        }
    }

    fn produce_with<C: Combine>(
        &self,
        combine: C,
        block: &Block,
        batch: &Batch,
        stop: bool,
        prefilter: bool,
    ) -> BatchOutput {
        let stride = self.store.stride;
        let masks = self.semantics.layout().words();
        let mut out = BatchOutput {
            op: Some(block.op()),
            words: Vec::with_capacity(batch.len as usize * stride),
            children: Vec::with_capacity(batch.len as usize),
            ..Default::default()
        };
        let mut scratch = vec![0u64; stride];

        // Returns true when production should stop.
        let mut emit = |l: u32, r: u32, out: &mut BatchOutput| -> bool {
            let left = self.store.cm(l);
            let right = if r == NO_CHILD { left } else { self.store.cm(r) };
            combine.apply(&mut scratch, left, right, masks);
            out.produced += 1;
            let sep = bits::separates_words(&scratch, masks);
            if sep {
                if out.separator.is_none() {
                    out.separator = Some(out.children.len());
                }
            } else if prefilter && self.store.contains(&scratch) {
                return false;
            }
            out.words.extend_from_slice(&scratch);
            out.children.push((l, r));
            sep && stop
        };

        match block {
            Block::Unary { child, .. } => {
                for k in batch.start..batch.start + batch.len {
                    if emit(child.start + k as u32, NO_CHILD, &mut out) {
                        break;
                    }
                }
            }
            Block::Pairs { left, right, .. } => {
                let n = right.len() as u64;
                let (mut i, mut j) = (batch.start / n, batch.start % n);
                for _ in 0..batch.len {
                    if emit(left.start + i as u32, right.start + j as u32, &mut out) {
                        break;
                    }
                    j += 1;
                    if j == n {
                        j = 0;
                        i += 1;
                    }
                }
            }
            Block::Triangle { ids, .. } => {
                let n = ids.len() as u64;
                let (mut i, mut j) = triangle_position(n, batch.start);
                for _ in 0..batch.len {
                    if emit(ids.start + i as u32, ids.start + j as u32, &mut out) {
                        break;
                    }
                    j += 1;
                    if j == n {
                        i += 1;
                        j = i;
                    }
                }
            }
        }
        out
    }

    /// Inserts a batch's candidates in order. Returns true when the level must end.
    fn merge(&mut self, out: BatchOutput, stop: bool, report: &mut LevelReport) -> bool {
        let stride = self.store.stride;
        let op = out.op.expect("batch without operator");
        report.constructed += out.produced;
        if self.store.projected_bytes(out.children.len()) > self.config.memory_budget {
            report.aborted = Some(Outcome::MemoryExhausted);
            return true;
        }
        self.store.reserve(out.children.len());
        for (k, &(left, right)) in out.children.iter().enumerate() {
            let words = &out.words[k * stride..(k + 1) * stride];
            let right = if op.arity() == 1 { NO_CHILD } else { right };
            let inserted = self.store.insert(words, Entry { op, left, right });
            if out.separator == Some(k) {
                let id = match inserted {
                    Ok(id) | Err(id) => id,
                };
                if report.separator.is_none() {
                    report.separator = Some(id);
                }
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

/// Finds a minimum-cost separating formula for `spec`.
pub fn synthesize(spec: &Specification, config: &SynthConfig) -> SynthesisResult {
    let started = Instant::now();
    let mut engine = Enumerator::new(spec, config.clone());
    let mut outcome = Outcome::CostExhausted;
    let mut found = None;
    for cost in 1..=config.max_cost {
        if engine.past_deadline(started) {
            outcome = Outcome::TimeExhausted;
            break;
        }
        let report = engine.expand_level_until(cost, true, started);
        if let Some(id) = report.separator {
            found = Some((id, cost));
            outcome = Outcome::Found;
            break;
        }
        if let Some(why) = report.aborted {
            outcome = why;
            break;
        }
    }

    let formula = found.map(|(id, _)| engine.reconstruct(id));
    if let Some(f) = &formula {
        assert!(
            oracle::separates(spec, f),
            "synthesised formula fails the reference separation check"
        );
    }
    SynthesisResult {
        formula,
        cost: found.map(|(_, c)| c),
        stats: SynthStats {
            constructed: engine.constructed,
            unique: engine.store.len(),
            elapsed: started.elapsed(),
            max_cost_reached: engine.store.top_cost(),
            outcome,
            minimal: outcome.is_found(),
        },
    }
}
