//! Backtracking search for finite prefixes whose representation function is
//! constant on the determined horizon.
//!
//! Membership of `0, 1, …, N` is decided in order, trying inclusion first.
//! After deciding `x` the prefix determines `r(n)` for `n < (x+1)·k_min`; a
//! branch is cut when a newly determined count differs from `c`, or when any
//! count at or past `n0` already exceeds `c` (counts only grow).
//!
//! The tree is cut at a fixed depth into independent subtrees that are
//! explored sequentially or on the rayon pool. Unexplored subtrees left when
//! the node budget runs out are returned as decided stacks, from which the
//! search can be resumed.
//!
//! Any coefficient tuple is accepted, including ones outside theorem form
//! such as `(1, 2, 6)`, `(1, 2, 8)` or `(1, 1, 2)`, for which no
//! non-constancy proof is available. A "generalised bases" argument has been
//! suggested for some of these; it is not implemented, and a finite prefix
//! surviving the search is only evidence, not a counterexample.

mod counter;

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::repfn::{CoefficientTuple, SetPrefix};
use counter::Counter;

/// Depth at which the tree is split into independently explored subtrees.
pub const SPLIT_DEPTH: usize = 12;

/// Largest supported decided bound.
pub const MAX_UPTO: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SearchConfig {
    ks: CoefficientTuple,
    c: u64,
    n0: u64,
    upto: u64,
    node_budget: u64,
    report_all: bool,
}

#[derive(Deserialize)]
struct RawConfig {
    ks: CoefficientTuple,
    c: u64,
    n0: u64,
    upto: u64,
    node_budget: u64,
    report_all: bool,
}

impl TryFrom<RawConfig> for SearchConfig {
    type Error = Error;

    fn try_from(r: RawConfig) -> Result<Self> {
        Self::new(r.ks, r.c, r.n0, r.upto, r.node_budget, r.report_all)
    }
}

impl SearchConfig {
    pub fn new(
        ks: CoefficientTuple,
        c: u64,
        n0: u64,
        upto: u64,
        node_budget: u64,
        report_all: bool,
    ) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidConfig("c must be positive".into()));
        }
        if upto < n0 {
            return Err(Error::InvalidConfig(format!("upto {upto} is below n0 {n0}")));
        }
        if upto > MAX_UPTO {
            return Err(Error::InvalidConfig(format!("upto {upto} exceeds {MAX_UPTO}")));
        }
        if node_budget == 0 {
            return Err(Error::InvalidConfig("node budget must be positive".into()));
        }
        if ks.d() > 8 {
            return Err(Error::InvalidConfig("at most 8 coefficients are supported".into()));
        }
        Ok(Self {
            ks,
            c,
            n0,
            upto,
            node_budget,
            report_all,
        })
    }

    pub fn ks(&self) -> &CoefficientTuple {
        &self.ks
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn n0(&self) -> u64 {
        self.n0
    }

    pub fn upto(&self) -> u64 {
        self.upto
    }

    pub fn node_budget(&self) -> u64 {
        self.node_budget
    }

    pub fn report_all(&self) -> bool {
        self.report_all
    }

    /// Largest `n` whose count is fixed once `[0, upto]` is decided.
    pub fn hmax(&self) -> u64 {
        (self.upto + 1) * self.ks.k_min() - 1
    }

    fn depth(&self) -> usize {
        self.upto as usize + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    ExhaustedNoSurvivor,
    SurvivorsFound,
    BudgetExceeded,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierStats {
    /// Explored nodes by number of decided integers.
    pub nodes_per_depth: Vec<u64>,
    /// Branches cut because some count exceeded `c`.
    pub pruned_excess: u64,
    /// Branches cut because a newly determined count differed from `c`.
    pub pruned_mismatch: u64,
}

impl FrontierStats {
    fn sized(depth: usize) -> Self {
        Self {
            nodes_per_depth: vec![0; depth + 1],
            ..Self::default()
        }
    }

    fn merge(&mut self, other: &Self) {
        if self.nodes_per_depth.len() < other.nodes_per_depth.len() {
            self.nodes_per_depth.resize(other.nodes_per_depth.len(), 0);
        }
        for (a, b) in self.nodes_per_depth.iter_mut().zip(&other.nodes_per_depth) {
            *a += b;
        }
        self.pruned_excess += other.pruned_excess;
        self.pruned_mismatch += other.pruned_mismatch;
    }
}

/// Membership decisions for `0, 1, …`, as 0/1 entries.
pub type DecidedStack = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub survivors: Vec<SetPrefix>,
    pub nodes_explored: u64,
    /// Largest decided bound of any explored prefix.
    pub deepest_bound_reached: Option<u64>,
    pub stats: FrontierStats,
    /// Unexplored subtrees, in depth-first order.
    pub pending: Vec<DecidedStack>,
}

impl SearchOutcome {
    pub fn checkpoint(&self, config: &SearchConfig) -> Checkpoint {
        Checkpoint {
            config: config.clone(),
            progress: self.clone(),
        }
    }
}

/// Enough state to continue a budget-limited search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: SearchConfig,
    pub progress: SearchOutcome,
}

impl Checkpoint {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let ck: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let depth = ck.config.depth();
        if ck
            .progress
            .pending
            .iter()
            .any(|p| p.len() > depth || p.iter().any(|&b| b > 1))
        {
            return Err(Error::Parse("pending stack is not a valid decision prefix".into()));
        }
        Ok(ck)
    }
}

/// Runs the search from the empty prefix.
pub fn search_constant_rep(cfg: &SearchConfig, exec: Exec) -> SearchOutcome {
    let start = SearchOutcome {
        status: SearchStatus::BudgetExceeded,
        survivors: Vec::new(),
        nodes_explored: 0,
        deepest_bound_reached: None,
        stats: FrontierStats::sized(cfg.depth()),
        pending: vec![Vec::new()],
    };
    run(cfg, start, cfg.node_budget, exec)
}

/// Continues a checkpoint with a fresh budget of `node_budget` nodes.
pub fn resume(ck: &Checkpoint, node_budget: u64, exec: Exec) -> SearchOutcome {
    run(&ck.config, ck.progress.clone(), node_budget, exec)
}

enum Flow {
    Continue,
    Budget,
    Found,
}

enum Prune {
    Excess,
    Mismatch,
}

struct Shared<'a> {
    cfg: &'a SearchConfig,
    budget: u64,
    nodes: AtomicU64,
    /// Smallest subtree index that has produced a survivor.
    found_min: AtomicUsize,
}

impl Shared<'_> {
    fn take_node(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) < self.budget {
            true
        } else {
            self.nodes.fetch_sub(1, Ordering::Relaxed);
            false
        }
    }
}

struct Worker<'a> {
    shared: &'a Shared<'a>,
    index: usize,
    /// Prefixes reaching this length are handed back as subtree roots.
    limit: usize,
    counter: Counter,
    prefix: DecidedStack,
    stats: FrontierStats,
    deepest: Option<u64>,
    survivors: Vec<SetPrefix>,
    pending: Vec<DecidedStack>,
    roots: Vec<DecidedStack>,
}

impl<'a> Worker<'a> {
    fn new(shared: &'a Shared<'a>, index: usize, limit: usize) -> Self {
        let cfg = shared.cfg;
        Self {
            shared,
            index,
            limit,
            counter: Counter::new(cfg.ks.ks(), cfg.hmax() as usize),
            prefix: Vec::new(),
            stats: FrontierStats::sized(cfg.depth()),
            deepest: None,
            survivors: Vec::new(),
            pending: Vec::new(),
            roots: Vec::new(),
        }
    }

    fn decide(&mut self, x: u64, include: bool) -> std::result::Result<(), Prune> {
        let cfg = self.shared.cfg;
        let kmin = cfg.ks.k_min();
        let hmax = cfg.hmax();
        let r = |w: &Self, n: u64| w.counter.full()[n as usize];
        if include {
            self.counter.add(x);
        }
        let mut verdict = Ok(());
        if include {
            let from = cfg.n0.max(x * kmin);
            if (from..=hmax).any(|n| r(self, n) > cfg.c) {
                verdict = Err(Prune::Excess);
            }
        }
        if verdict.is_ok() {
            let lo = cfg.n0.max(x * kmin);
            let hi = ((x + 1) * kmin - 1).min(hmax);
            if (lo..=hi).any(|n| r(self, n) != cfg.c) {
                verdict = Err(Prune::Mismatch);
            }
        }
        if verdict.is_err() && include {
            self.counter.remove(x);
        }
        verdict
    }

    fn undo(&mut self, x: u64, include: bool) {
        if include {
            self.counter.remove(x);
        }
    }

    fn record(&mut self, p: Prune) {
        match p {
            Prune::Excess => self.stats.pruned_excess += 1,
            Prune::Mismatch => self.stats.pruned_mismatch += 1,
        }
    }

    /// Rebuilds the counts for `stack`; `false` if some decision is cut.
    fn load(&mut self, stack: &[u8]) -> bool {
        self.clear();
        for (x, &bit) in stack.iter().enumerate() {
            if let Err(p) = self.decide(x as u64, bit == 1) {
                self.record(p);
                self.clear();
                return false;
            }
            self.prefix.push(bit);
        }
        true
    }

    fn clear(&mut self) {
        while let Some(bit) = self.prefix.pop() {
            self.undo(self.prefix.len() as u64, bit == 1);
        }
    }

    fn survivor(&self) -> SetPrefix {
        let members = (0..self.prefix.len() as u64)
            .filter(|&x| self.prefix[x as usize] == 1)
            .collect();
        SetPrefix::new(members, self.shared.cfg.upto).expect("prefix is increasing")
    }

    fn explore(&mut self) -> Flow {
        let depth = self.prefix.len();
        let total = self.shared.cfg.depth();
        if depth >= self.limit {
            self.roots.push(self.prefix.clone());
            return Flow::Continue;
        }
        if self.shared.found_min.load(Ordering::Relaxed) < self.index {
            return Flow::Found;
        }
        if !self.shared.take_node() {
            self.pending.push(self.prefix.clone());
            return Flow::Budget;
        }
        self.stats.nodes_per_depth[depth] += 1;
        if depth > 0 {
            self.deepest = self.deepest.max(Some(depth as u64 - 1));
        }
        if depth == total {
            self.survivors.push(self.survivor());
            if !self.shared.cfg.report_all {
                self.shared.found_min.fetch_min(self.index, Ordering::Relaxed);
                return Flow::Found;
            }
            return Flow::Continue;
        }
        let x = depth as u64;
        for include in [true, false] {
            match self.decide(x, include) {
                Err(p) => self.record(p),
                Ok(()) => {
                    self.prefix.push(u8::from(include));
                    let flow = self.explore();
                    self.prefix.pop();
                    self.undo(x, include);
                    match flow {
                        Flow::Continue => {}
                        Flow::Budget => {
                            if include {
                                let mut sibling = self.prefix.clone();
                                sibling.push(0);
                                self.pending.push(sibling);
                            }
                            return Flow::Budget;
                        }
                        Flow::Found => return Flow::Found,
                    }
                }
            }
        }
        Flow::Continue
    }
}

struct Partial {
    survivors: Vec<SetPrefix>,
    pending: Vec<DecidedStack>,
    stats: FrontierStats,
    deepest: Option<u64>,
}

fn explore_root(shared: &Shared<'_>, index: usize, root: &DecidedStack) -> Partial {
    let mut w = Worker::new(shared, index, usize::MAX);
    if w.load(root) {
        w.explore();
    }
    Partial {
        survivors: w.survivors,
        pending: w.pending,
        stats: w.stats,
        deepest: w.deepest,
    }
}

fn run(cfg: &SearchConfig, mut acc: SearchOutcome, budget: u64, exec: Exec) -> SearchOutcome {
    let shared = Shared {
        cfg,
        budget,
        nodes: AtomicU64::new(0),
        found_min: AtomicUsize::new(usize::MAX),
    };
    let starts = std::mem::take(&mut acc.pending);
    let split = SPLIT_DEPTH.min(cfg.depth());

    // Expand shallow starts sequentially into subtree roots.
    let mut head = Worker::new(&shared, 0, split);
    let mut ran_out = false;
    for (i, start) in starts.iter().enumerate() {
        if ran_out {
            head.pending.push(start.clone());
            continue;
        }
        if start.len() >= split {
            head.roots.push(start.clone());
        } else if head.load(start) && matches!(head.explore(), Flow::Budget) {
            ran_out = true;
            head.pending.extend(starts[i + 1..].iter().cloned());
            break;
        }
    }
    acc.stats.merge(&head.stats);
    acc.deepest_bound_reached = acc.deepest_bound_reached.max(head.deepest);

    if ran_out {
        let mut pending = head.roots;
        pending.extend(head.pending);
        acc.pending = pending;
    } else {
        let roots: Vec<(usize, DecidedStack)> = head.roots.into_iter().enumerate().collect();
        let parts = exec.map(&roots, |(i, root)| explore_root(&shared, *i, root));
        let first = shared.found_min.load(Ordering::Relaxed);
        for (i, part) in parts.into_iter().enumerate() {
            acc.stats.merge(&part.stats);
            acc.deepest_bound_reached = acc.deepest_bound_reached.max(part.deepest);
            if cfg.report_all || i == first {
                acc.survivors.extend(part.survivors);
            }
            acc.pending.extend(part.pending);
        }
    }
    acc.nodes_explored += shared.nodes.load(Ordering::Relaxed);

    if !cfg.report_all && !acc.survivors.is_empty() {
        acc.survivors.truncate(1);
        acc.pending.clear();
        acc.status = SearchStatus::SurvivorsFound;
    } else {
        acc.survivors.sort();
        acc.survivors.dedup();
        acc.status = if !acc.pending.is_empty() {
            SearchStatus::BudgetExceeded
        } else if acc.survivors.is_empty() {
            SearchStatus::ExhaustedNoSurvivor
        } else {
            SearchStatus::SurvivorsFound
        };
    }
    acc
}
