//! Depth-first reachability over unapproximated zones.
//!
//! Every node stores its zone exactly as computed. A node is pruned when
//! its zone lies in the region closure of an expanded node with the same
//! discrete state, under that node's current bounds; it then becomes
//! *tentative* and mirrors the subsumer's bounds. Bounds are computed
//! bottom-up over the explored tree and only ever cover guards that were
//! actually met. When a subsumer's bounds grow, its tentative nodes are
//! rechecked and reopened if the pruning no longer holds.
//!
//! The two static configurations are the classic baseline: bounds from
//! [`static_bounds`], zones stored after `Extra+` and compared by plain
//! inclusion.
//!
//! Invariants at quiescence:
//! 1. an expanded node's bounds are the maximum over its children of
//!    [`maxedge`] applied to the child's bounds;
//! 2. a tentative node's bounds equal its subsumer's, and the subsumer is
//!    expanded.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::approx::{extra_lu_plus, included_closure, included_closure_lu_bounds};
use crate::bounds::LuBounds;
use crate::dbm::{ClockAtom, Dbm};
use crate::model::{
    maxedge, product_successors, static_bounds, transitions, DiscreteState, Label, Network,
    StaticBounds,
};
use crate::regions::{self, OracleCache, RegionError, MAX_BOUND, MAX_CLOCKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Closure subsumption with on-the-fly `L`/`U` bounds.
    ClosureLu,
    /// Closure subsumption with on-the-fly `M = max(L, U)` bounds.
    ClosureM,
    /// `Extra+_LU` with static bounds and convex inclusion.
    ExtraLuStatic,
    /// `Extra+_M` with static bounds and convex inclusion.
    ExtraMStatic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::ClosureLu,
        Algorithm::ClosureM,
        Algorithm::ExtraLuStatic,
        Algorithm::ExtraMStatic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ClosureLu => "closure-lu",
            Algorithm::ClosureM => "closure-m",
            Algorithm::ExtraLuStatic => "extra-lu-static",
            Algorithm::ExtraMStatic => "extra-m-static",
        }
    }

    pub fn on_the_fly(self) -> bool {
        matches!(self, Algorithm::ClosureLu | Algorithm::ClosureM)
    }

    fn symmetric(self) -> bool {
        matches!(self, Algorithm::ClosureM | Algorithm::ExtraMStatic)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Algorithm, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub algorithm: Algorithm,
    /// Cross-check every closure subsumption decision against region
    /// enumeration when the bounds are small enough.
    pub oracle: bool,
    /// Abort once this many nodes are stored.
    pub node_limit: usize,
    /// Scan subsumption candidates newest first (the default) or oldest
    /// first. Verdicts do not depend on it; node counts do.
    pub newest_first: bool,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            algorithm: Algorithm::ClosureLu,
            oracle: false,
            node_limit: 5_000_000,
            newest_first: true,
        }
    }
}

impl SearchOptions {
    pub fn with(algorithm: Algorithm) -> SearchOptions {
        SearchOptions {
            algorithm,
            ..SearchOptions::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("node limit of {0} exceeded")]
    NodeLimit(usize),
    #[error("subsumption of node {node} by node {subsumer}: quadratic test says {fast}, region enumeration says {oracle}")]
    OracleMismatch {
        node: usize,
        subsumer: usize,
        fast: bool,
        oracle: bool,
    },
    #[error("oracle failure: {0}")]
    Oracle(#[from] RegionError),
    #[error("trace replay failed: {0}")]
    Replay(String),
    #[error("audit failed: {0}")]
    Audit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Created, not yet explored (or reopened).
    Pending,
    Expanded,
    /// Pruned by the given expanded node.
    Tentative(usize),
}

/// One node of the search tree.
#[derive(Debug, Clone)]
pub struct Node {
    pub state: DiscreteState,
    /// Raw for closure algorithms; extrapolated for the static ones.
    pub zone: Dbm,
    pub bounds: LuBounds,
    pub status: Status,
    pub parent: Option<usize>,
    /// Label, effective guard and resets of the edge from the parent.
    pub incoming: Option<(Label, Vec<ClockAtom>, Vec<usize>)>,
    pub children: Vec<usize>,
    /// Tentative nodes pruned by this one.
    pub dependents: Vec<usize>,
}

impl Node {
    pub fn is_empty(&self) -> bool {
        self.zone.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    /// Nodes taken off a stack and explored.
    pub visited: usize,
    /// Nodes created, empty ones included.
    pub stored: usize,
    pub subsumption_tests: usize,
    pub reopenings: usize,
    /// Subsumption decisions confirmed by region enumeration.
    pub oracle_checks: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub label: Label,
    pub state: DiscreteState,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub reachable: bool,
    /// Present iff `reachable`; root to target.
    pub trace: Option<Vec<TraceStep>>,
    pub stats: Stats,
}

/// Runs one configuration to completion.
pub fn run(net: &Network, opts: &SearchOptions) -> Result<Verdict, SearchError> {
    Search::new(net, opts.clone()).run()
}

/// Search state, kept after [`Search::run`] so callers can inspect and
/// audit the final tree.
pub struct Search<'a> {
    net: &'a Network,
    opts: SearchOptions,
    statics: StaticBounds,
    nodes: Vec<Node>,
    /// Expanded nonempty nodes by discrete state, oldest first.
    index: HashMap<DiscreteState, Vec<usize>>,
    /// Nodes whose bounds changed since the last resolve pass.
    dirty: BTreeSet<usize>,
    main: Vec<usize>,
    oracles: OracleCache,
    stats: Stats,
}

impl<'a> Search<'a> {
    pub fn new(net: &'a Network, opts: SearchOptions) -> Search<'a> {
        Search {
            net,
            opts,
            statics: static_bounds(net),
            nodes: Vec::new(),
            index: HashMap::new(),
            dirty: BTreeSet::new(),
            main: Vec::new(),
            oracles: OracleCache::new(),
            stats: Stats::default(),
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn static_bounds(&self) -> &StaticBounds {
        &self.statics
    }

    /// `(tentative node, subsumer)` pairs.
    pub fn tentative_pairs(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n.status {
                Status::Tentative(s) => Some((i, s)),
                _ => None,
            })
            .collect()
    }

    fn normalize(&self, mut lu: LuBounds) -> LuBounds {
        if self.opts.algorithm.symmetric() {
            lu = LuBounds::symmetric(&lu.alpha());
        }
        lu
    }

    fn static_at(&self, s: &DiscreteState) -> LuBounds {
        self.normalize(self.statics.at(s))
    }

    fn add_node(
        &mut self,
        state: DiscreteState,
        zone: Dbm,
        parent: Option<usize>,
        incoming: Option<(Label, Vec<ClockAtom>, Vec<usize>)>,
    ) -> Result<usize, SearchError> {
        if self.nodes.len() >= self.opts.node_limit {
            return Err(SearchError::NodeLimit(self.opts.node_limit));
        }
        let (zone, bounds) = if self.opts.algorithm.on_the_fly() {
            (zone, LuBounds::new(self.net.dim()))
        } else {
            let b = self.static_at(&state);
            (extra_lu_plus(&zone, &b).canonicalize(), b)
        };
        self.nodes.push(Node {
            state,
            zone,
            bounds,
            status: Status::Pending,
            parent,
            incoming,
            children: Vec::new(),
            dependents: Vec::new(),
        });
        self.stats.stored += 1;
        Ok(self.nodes.len() - 1)
    }

    /// Explores from the initial state until a target is found or nothing
    /// is left.
    pub fn run(&mut self) -> Result<Verdict, SearchError> {
        let start = Instant::now();
        let root = self.add_node(
            self.net.initial_state(),
            self.net.initial_zone(),
            None,
            None,
        )?;
        let mut found = None;
        if !self.nodes[root].is_empty() {
            self.main.push(root);
        }
        while let Some(id) = self.main.pop() {
            if let Some(t) = self.explore(id)? {
                found = Some(t);
                break;
            }
            while self.resolve()? {}
        }
        self.stats.elapsed = start.elapsed();
        let trace = match found {
            Some(t) => Some(self.trace(t)?),
            None => None,
        };
        Ok(Verdict {
            reachable: trace.is_some(),
            trace,
            stats: self.stats.clone(),
        })
    }

    /// Whether `node` is covered by `by`, under `by`'s current bounds.
    fn covers(&self, node: usize, by: usize) -> bool {
        let (z, z2, lu) = (
            &self.nodes[node].zone,
            &self.nodes[by].zone,
            &self.nodes[by].bounds,
        );
        match self.opts.algorithm {
            Algorithm::ClosureLu => included_closure_lu_bounds(z, z2, lu),
            Algorithm::ClosureM => included_closure(z, z2, &lu.alpha()),
            Algorithm::ExtraLuStatic | Algorithm::ExtraMStatic => z.is_included_in(z2),
        }
        .expect("zones and bounds share the network's dimension")
    }

    /// [`Self::covers`], counted and optionally cross-checked.
    fn subsumed(&mut self, node: usize, by: usize) -> Result<bool, SearchError> {
        self.stats.subsumption_tests += 1;
        let fast = self.covers(node, by);
        let (z, z2, lu) = (
            &self.nodes[node].zone,
            &self.nodes[by].zone,
            &self.nodes[by].bounds,
        );
        if self.opts.oracle && self.opts.algorithm.on_the_fly() && oracle_scale(lu) {
            let alpha = lu.alpha();
            let z2 = match self.opts.algorithm {
                Algorithm::ClosureLu => extra_lu_plus(z2, lu).canonicalize(),
                _ => z2.clone(),
            };
            let z = z.clone();
            let oracle = self.oracles.get(&alpha)?.closure_inclusion(&z, &z2)?;
            if oracle != fast {
                return Err(SearchError::OracleMismatch {
                    node,
                    subsumer: by,
                    fast,
                    oracle,
                });
            }
            self.stats.oracle_checks += 1;
        }
        Ok(fast)
    }

    /// Depth-first exploration below `root`; returns a target node if found.
    fn explore(&mut self, root: usize) -> Result<Option<usize>, SearchError> {
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            self.stats.visited += 1;
            if self.net.is_target(&self.nodes[id].state) {
                return Ok(Some(id));
            }
            let candidates = self
                .index
                .get(&self.nodes[id].state)
                .cloned()
                .unwrap_or_default();
            let mut subsumer = None;
            let order: Box<dyn Iterator<Item = &usize>> = if self.opts.newest_first {
                Box::new(candidates.iter().rev())
            } else {
                Box::new(candidates.iter())
            };
            for &c in order {
                if self.subsumed(id, c)? {
                    subsumer = Some(c);
                    break;
                }
            }
            if let Some(s) = subsumer {
                self.nodes[id].status = Status::Tentative(s);
                self.nodes[id].bounds = self.nodes[s].bounds.clone();
                self.nodes[s].dependents.push(id);
                if let Some(p) = self.nodes[id].parent {
                    self.propagate(p);
                }
                continue;
            }
            let moves = transitions(self.net, &self.nodes[id].state);
            let mut fresh = Vec::with_capacity(moves.len());
            for t in moves {
                let zone = self.nodes[id].zone.zone_successor(&t.guard, &t.resets);
                let child =
                    self.add_node(t.target, zone, Some(id), Some((t.label, t.guard, t.resets)))?;
                if self.nodes[child].is_empty() {
                    self.nodes[child].status = Status::Expanded;
                } else {
                    fresh.push(child);
                }
                self.nodes[id].children.push(child);
            }
            self.nodes[id].status = Status::Expanded;
            let state = self.nodes[id].state.clone();
            self.index.entry(state).or_default().push(id);
            self.propagate(id);
            stack.extend(fresh.into_iter().rev());
        }
        Ok(None)
    }

    /// Bounds `node` needs given its children's current bounds.
    fn required(&self, node: usize) -> LuBounds {
        let mut out = LuBounds::new(self.net.dim());
        for &c in &self.nodes[node].children {
            let (_, guard, resets) = self.nodes[c]
                .incoming
                .as_ref()
                .expect("children have an incoming edge");
            out.join(&maxedge(guard, resets, &self.nodes[c].bounds));
        }
        self.normalize(out)
    }

    /// Recomputes bounds from `start` upward, through tentative nodes to
    /// their parents, until nothing changes. Decreases propagate as well.
    fn propagate(&mut self, start: usize) {
        if !self.opts.algorithm.on_the_fly() {
            return;
        }
        let mut work = vec![start];
        while let Some(n) = work.pop() {
            if self.nodes[n].status != Status::Expanded {
                continue;
            }
            let new = self.required(n);
            if new == self.nodes[n].bounds {
                continue;
            }
            for d in self.nodes[n].dependents.clone() {
                self.nodes[d].bounds = new.clone();
                work.extend(self.nodes[d].parent);
            }
            self.nodes[n].bounds = new;
            if !self.nodes[n].dependents.is_empty() {
                self.dirty.insert(n);
            }
            work.extend(self.nodes[n].parent);
        }
    }

    /// One pass over tentative nodes whose subsumer's bounds changed.
    /// Returns whether some node was reopened.
    fn resolve(&mut self) -> Result<bool, SearchError> {
        let dirty = std::mem::take(&mut self.dirty);
        let mut reopened = false;
        for s in dirty {
            for d in self.nodes[s].dependents.clone() {
                if !self.subsumed(d, s)? {
                    self.reopen(d, s);
                    reopened = true;
                }
            }
        }
        Ok(reopened)
    }

    fn reopen(&mut self, d: usize, s: usize) {
        self.stats.reopenings += 1;
        self.nodes[s].dependents.retain(|&x| x != d);
        self.nodes[d].status = Status::Pending;
        self.nodes[d].bounds = LuBounds::new(self.net.dim());
        if let Some(p) = self.nodes[d].parent {
            self.propagate(p);
        }
        self.main.push(d);
    }

    /// Labels from the root to `node`, validated by replaying them.
    fn trace(&self, node: usize) -> Result<Vec<TraceStep>, SearchError> {
        let mut steps = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            let (label, _, _) = self.nodes[cur]
                .incoming
                .clone()
                .expect("non-root nodes have an incoming edge");
            steps.push(TraceStep {
                label,
                state: self.nodes[cur].state.clone(),
            });
            cur = p;
        }
        steps.reverse();
        replay(self.net, &steps)?;
        Ok(steps)
    }

    /// Checks both search invariants, and that on-the-fly bounds never
    /// exceed the static ones. Meant for a finished, unreachable search.
    pub fn audit(&self) -> Result<(), SearchError> {
        let fail = |msg: String| Err(SearchError::Audit(msg));
        for (i, n) in self.nodes.iter().enumerate() {
            match n.status {
                Status::Pending => return fail(format!("node {i} was never explored")),
                Status::Tentative(s) => {
                    if self.nodes[s].status != Status::Expanded {
                        return fail(format!(
                            "node {i} is tentative with respect to non-expanded node {s}"
                        ));
                    }
                    if !n.children.is_empty() {
                        return fail(format!("tentative node {i} has children"));
                    }
                    if !self.nodes[s].dependents.contains(&i) {
                        return fail(format!("node {i} is missing from the dependents of {s}"));
                    }
                    if !self.covers(i, s) {
                        return fail(format!("tentative node {i} is no longer covered by {s}"));
                    }
                    if self.opts.algorithm.on_the_fly() && n.bounds != self.nodes[s].bounds {
                        return fail(format!(
                            "tentative node {i} has {:?}, its subsumer {s} has {:?}",
                            n.bounds, self.nodes[s].bounds
                        ));
                    }
                }
                Status::Expanded => {
                    if self.opts.algorithm.on_the_fly() && n.bounds != self.required(i) {
                        return fail(format!(
                            "node {i} has {:?}, its children require {:?}",
                            n.bounds,
                            self.required(i)
                        ));
                    }
                }
            }
            let stat = self.static_at(&n.state);
            if !n.bounds.le(&stat) {
                return fail(format!(
                    "node {i} has {:?}, above the static {:?}",
                    n.bounds, stat
                ));
            }
        }
        Ok(())
    }
}

/// Replays a trace from the initial state: every step must exist and
/// reach a nonempty zone, and the last state must be a target.
pub fn replay(net: &Network, steps: &[TraceStep]) -> Result<(), SearchError> {
    let mut state = net.initial_state();
    let mut zone = net.initial_zone();
    if zone.is_empty() {
        return Err(SearchError::Replay("the initial zone is empty".into()));
    }
    for (i, step) in steps.iter().enumerate() {
        let succ = product_successors(&state, &zone, net)
            .into_iter()
            .find(|s| s.label == step.label)
            .ok_or_else(|| {
                SearchError::Replay(format!(
                    "step {i}: {} is not enabled",
                    step.label.describe(net)
                ))
            })?;
        if succ.zone.is_empty() {
            return Err(SearchError::Replay(format!(
                "step {i}: {} leads to an empty zone",
                step.label.describe(net)
            )));
        }
        if succ.state != step.state {
            return Err(SearchError::Replay(format!(
                "step {i}: reached {}, trace says {}",
                net.describe(&succ.state),
                net.describe(&step.state)
            )));
        }
        state = succ.state;
        zone = succ.zone;
    }
    if !net.is_target(&state) {
        return Err(SearchError::Replay(format!(
            "final state {} is not a target",
            net.describe(&state)
        )));
    }
    Ok(())
}

/// Whether the oracle can decide closure inclusion for these bounds.
pub fn oracle_scale(lu: &LuBounds) -> bool {
    let alpha = lu.alpha();
    alpha.dim() - 1 <= MAX_CLOCKS && alpha.max_finite().is_none_or(|m| m <= MAX_BOUND)
}

/// Region-enumeration verdict for a recorded tentative pair, under the
/// subsumer's bounds and the given algorithm's inclusion test.
pub fn oracle_confirms(
    search: &Search<'_>,
    node: usize,
    subsumer: usize,
) -> Result<bool, RegionError> {
    let nodes = search.nodes();
    let (z, z2, lu) = (
        &nodes[node].zone,
        &nodes[subsumer].zone,
        &nodes[subsumer].bounds,
    );
    let alpha = lu.alpha();
    match search.opts.algorithm {
        Algorithm::ClosureLu => regions::closure_inclusion_lu(z, &extra_lu_plus(z2, lu), &alpha),
        _ => regions::closure_inclusion(z, z2, &alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundMap;
    use crate::model::{gen, parse_model};

    #[test]
    fn fig1_reaches_q3_quickly() {
        let net = gen::fig1();
        let v = run(&net, &SearchOptions::default()).unwrap();
        assert!(v.reachable);
        assert!(v.stats.visited <= 5, "{:?}", v.stats);
        let trace = v.trace.unwrap();
        assert!(trace.len() == 3 || trace.len() == 1);
    }

    #[test]
    fn fig1_bounds_at_q2() {
        let net = gen::fig1_unmarked();
        let mut s = Search::new(&net, SearchOptions::default());
        assert!(!s.run().unwrap().reachable);
        s.audit().unwrap();
        let q2 = net.processes[0].location_index("q2").unwrap();
        let at_q2: Vec<_> = s
            .nodes()
            .iter()
            .filter(|n| n.state.locations[0] == q2)
            .collect();
        assert!(!at_q2.is_empty());
        for n in at_q2 {
            assert_eq!(n.bounds.alpha(), BoundMap::from_clocks([Some(14), Some(5)]));
        }
    }

    #[test]
    fn accepting_initial_state_has_empty_trace() {
        let net =
            parse_model("system s\nclock x\nprocess P\nlocation a initial accepting\n").unwrap();
        for a in Algorithm::ALL {
            let v = run(&net, &SearchOptions::with(a)).unwrap();
            assert!(v.reachable);
            assert_eq!(v.trace, Some(Vec::new()));
        }
    }

    #[test]
    fn identical_siblings_are_subsumed() {
        let net = parse_model(
            "system s\nclock x\nprocess P\nlocation a initial\nlocation b\nlocation c\n\
             edge a -> b guard: x <= 2\nedge a -> b guard: x <= 2\nedge b -> c guard: x >= 1\n",
        )
        .unwrap();
        let mut s = Search::new(&net, SearchOptions::default());
        assert!(!s.run().unwrap().reachable);
        assert_eq!(s.tentative_pairs().len(), 1);
        s.audit().unwrap();
    }

    #[test]
    fn fischer_agrees_across_algorithms() {
        let good = gen::fischer(2).unwrap();
        let bad = gen::fischer_buggy(2).unwrap();
        for a in Algorithm::ALL {
            let opts = SearchOptions {
                oracle: true,
                ..SearchOptions::with(a)
            };
            assert!(!run(&good, &opts).unwrap().reachable, "{a}");
            let v = run(&bad, &opts).unwrap();
            assert!(v.reachable, "{a}");
            replay(&bad, &v.trace.unwrap()).unwrap();
        }
    }

    #[test]
    fn growing_subsumer_bounds_reopen_once() {
        // Found by random search: a subsumer's bounds grow after it pruned a
        // node, and the pruning no longer holds.
        let net = parse_model(
            "system s\nclock x\nclock y\nprocess P\nlocation l0 initial\nlocation l1\nlocation l2\nlocation l3\n\
             edge l2 -> l0 guard: y <= 4\nedge l1 -> l3 guard: x < 3 && x <= 4\nedge l0 -> l0 do: y := 0\n\
             edge l0 -> l2 do: y := 0\nedge l2 -> l3 guard: x > 3 do: y := 0\nedge l2 -> l3 do: x := 0\n\
             query reachable: P.l1\n",
        )
        .unwrap();
        let mut s = Search::new(
            &net,
            SearchOptions {
                oracle: true,
                ..SearchOptions::default()
            },
        );
        let v = s.run().unwrap();
        assert!(!v.reachable);
        assert_eq!(v.stats.reopenings, 1);
        s.audit().unwrap();
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("closure".parse::<Algorithm>().is_err());
    }

    #[test]
    fn node_limit_is_reported() {
        let net = gen::fischer(3).unwrap();
        let opts = SearchOptions {
            node_limit: 10,
            ..SearchOptions::default()
        };
        assert!(matches!(run(&net, &opts), Err(SearchError::NodeLimit(10))));
    }
}
