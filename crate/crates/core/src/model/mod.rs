//! Networks of timed automata with bounded integers and channels.
//!
//! Clocks are numbered like DBM indices: the `i`-th declared clock is
//! index `i + 1`. Locations, edges, processes, integer variables and
//! channels are referred to by their position in declaration order, which
//! is also the enumeration order of product successors.

mod analysis;
pub mod gen;
mod parse;
mod print;
mod product;

use std::fmt;

use crate::dbm::{ClockAtom, Dbm, Relation};

pub use analysis::{maxedge, raise_by_atoms, static_bounds, StaticBounds};
pub use parse::{parse_model, ParseError, ParseErrorKind};
pub use product::{product_successors, transitions, Label, Successor, Transition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub name: String,
    pub clocks: Vec<String>,
    pub ints: Vec<IntVar>,
    pub channels: Vec<Channel>,
    pub processes: Vec<Process>,
    pub query: Option<Query>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVar {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub init: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub broadcast: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub name: String,
    pub locations: Vec<Location>,
    pub initial: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub accepting: bool,
    /// Upper-bound atoms only.
    pub invariant: Vec<ClockAtom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sync {
    Send(usize),
    Receive(usize),
}

/// `v # c` over an integer variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntAtom {
    pub var: usize,
    pub relation: Relation,
    pub constant: i64,
}

impl IntAtom {
    pub fn holds(&self, ints: &[i64]) -> bool {
        self.relation.holds(ints[self.var], self.constant)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntUpdate {
    /// `v := c`
    Set { var: usize, value: i64 },
    /// `v := v + delta`
    Add { var: usize, delta: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub clock_guard: Vec<ClockAtom>,
    pub int_guard: Vec<IntAtom>,
    pub sync: Option<Sync>,
    /// Clock indices set to 0.
    pub resets: Vec<usize>,
    pub updates: Vec<IntUpdate>,
}

impl Edge {
    pub fn int_enabled(&self, ints: &[i64]) -> bool {
        self.int_guard.iter().all(|a| a.holds(ints))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateAtom {
    At { process: usize, location: usize },
    Int(IntAtom),
}

/// A disjunction of conjunctions of [`StateAtom`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub disjuncts: Vec<Vec<StateAtom>>,
}

impl Query {
    pub fn holds(&self, s: &DiscreteState) -> bool {
        self.disjuncts.iter().any(|conj| {
            conj.iter().all(|a| match *a {
                StateAtom::At { process, location } => s.locations[process] == location,
                StateAtom::Int(atom) => atom.holds(&s.ints),
            })
        })
    }
}

/// One location per process and one value per integer variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscreteState {
    pub locations: Vec<usize>,
    pub ints: Vec<i64>,
}

impl Network {
    /// DBM dimension: clocks plus the reference clock.
    pub fn dim(&self) -> usize {
        self.clocks.len() + 1
    }

    pub fn initial_state(&self) -> DiscreteState {
        DiscreteState {
            locations: self.processes.iter().map(|p| p.initial).collect(),
            ints: self.ints.iter().map(|v| v.init).collect(),
        }
    }

    /// The zero valuation restricted to the initial invariants.
    pub fn initial_zone(&self) -> Dbm {
        let s = self.initial_state();
        Dbm::zero(self.dim()).intersect_guard(&self.invariant_of(&s))
    }

    /// Conjunction of every process's current invariant.
    pub fn invariant_of(&self, s: &DiscreteState) -> Vec<ClockAtom> {
        self.processes
            .iter()
            .zip(&s.locations)
            .flat_map(|(p, &l)| p.locations[l].invariant.iter().copied())
            .collect()
    }

    /// With a query, its truth; otherwise whether some process sits in an
    /// accepting location.
    pub fn is_target(&self, s: &DiscreteState) -> bool {
        match &self.query {
            Some(q) => q.holds(s),
            None => self
                .processes
                .iter()
                .zip(&s.locations)
                .any(|(p, &l)| p.locations[l].accepting),
        }
    }

    pub fn process_index(&self, name: &str) -> Option<usize> {
        self.processes.iter().position(|p| p.name == name)
    }

    pub fn clock_index(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name).map(|i| i + 1)
    }

    pub fn clock_name(&self, index: usize) -> &str {
        &self.clocks[index - 1]
    }

    /// `P.loc` names of a discrete state, plus integer values.
    pub fn describe(&self, s: &DiscreteState) -> String {
        let mut parts: Vec<String> = self
            .processes
            .iter()
            .zip(&s.locations)
            .map(|(p, &l)| format!("{}.{}", p.name, p.locations[l].name))
            .collect();
        for (v, val) in self.ints.iter().zip(&s.ints) {
            parts.push(format!("{}={}", v.name, val));
        }
        parts.join(" ")
    }
}

impl Process {
    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l.name == name)
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_network(self, f)
    }
}
