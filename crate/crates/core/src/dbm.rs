//! Difference bound matrices.
//!
//! Entry `(x, y)` is the weight of the distance-graph edge `x → y`, i.e. the
//! constraint `y - x ≼ c`. Index 0 is the reference clock `x₀ = 0`, so
//! `(0, x)` is an upper bound on `x` and `(x, 0)` a lower bound.

use std::fmt;

use thiserror::Error;

use crate::weight::{Weight, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbmError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("clock index {clock} out of range for dimension {dim}")]
    ClockOutOfRange { clock: usize, dim: usize },
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    /// Whether `lhs rel rhs` holds.
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    /// Contributes to `U` (an upper-bound comparison).
    pub fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le | Relation::Eq)
    }

    /// Contributes to `L` (a lower-bound comparison).
    pub fn is_lower(self) -> bool {
        matches!(self, Relation::Gt | Relation::Ge | Relation::Eq)
    }
}

/// A diagonal-free atom `x # c`; `clock` is a DBM index (≥ 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClockAtom {
    pub clock: usize,
    pub relation: Relation,
    pub constant: i64,
}

impl ClockAtom {
    pub fn new(clock: usize, relation: Relation, constant: i64) -> ClockAtom {
        ClockAtom {
            clock,
            relation,
            constant,
        }
    }
}

/// A zone as a square matrix of [`Weight`]s over the clocks plus `x₀`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    entries: Vec<Weight>,
    canonical: bool,
}

impl Dbm {
    /// All nonnegative valuations.
    pub fn universe(dim: usize) -> Dbm {
        assert!(dim >= 1);
        let mut entries = vec![Weight::INFINITY; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Weight::ZERO;
            entries[i * dim] = Weight::ZERO;
        }
        Dbm {
            dim,
            entries,
            canonical: true,
        }
    }

    /// The singleton zone holding the all-zero valuation.
    pub fn zero(dim: usize) -> Dbm {
        assert!(dim >= 1);
        Dbm {
            dim,
            entries: vec![Weight::ZERO; dim * dim],
            canonical: true,
        }
    }

    /// Raw graph from an entry function. Edges into `x₀` are capped at
    /// `(≤, 0)` since clocks are nonnegative. The result is not canonical.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Weight) -> Dbm {
        assert!(dim >= 1);
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let w = f(i, j);
                entries.push(if j == 0 && i != 0 {
                    w.min(Weight::ZERO)
                } else {
                    w
                });
            }
        }
        Dbm {
            dim,
            entries,
            canonical: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of clocks, excluding `x₀`.
    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Weight {
        self.entries[i * self.dim + j]
    }

    /// Overwrites one edge; clears the canonical flag.
    pub fn set(&mut self, i: usize, j: usize, w: Weight) {
        let w = if j == 0 && i != 0 {
            w.min(Weight::ZERO)
        } else {
            w
        };
        self.entries[i * self.dim + j] = w;
        self.canonical = false;
    }

    fn check_dim(&self, other: &Dbm) -> Result<(), DbmError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(DbmError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    fn mark_empty(&mut self) {
        self.entries[0] = Weight::LT_ZERO;
        self.canonical = true;
    }

    /// All-pairs shortest paths (Floyd–Warshall). Stops at the first
    /// negative diagonal, in which case the result is an empty zone.
    pub fn canonicalize(&self) -> Dbm {
        let mut d = self.clone();
        d.canonicalize_in_place();
        d
    }

    pub fn canonicalize_in_place(&mut self) {
        if self.canonical {
            return;
        }
        let n = self.dim;
        if (0..n).any(|i| self.entries[i * n + i] < Weight::ZERO) {
            self.mark_empty();
            return;
        }
        for k in 0..n {
            for i in 0..n {
                let dik = self.entries[i * n + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let s = dik + self.entries[k * n + j];
                    let e = &mut self.entries[i * n + j];
                    if s < *e {
                        *e = s;
                    }
                }
            }
            if (0..n).any(|i| self.entries[i * n + i] < Weight::ZERO) {
                self.mark_empty();
                return;
            }
        }
        self.canonical = true;
    }

    /// True iff the graph has a negative cycle, i.e. denotes no valuation.
    pub fn is_empty(&self) -> bool {
        if self.canonical {
            (0..self.dim).any(|i| self.get(i, i) < Weight::ZERO)
        } else {
            self.canonicalize().is_empty()
        }
    }

    /// Tightens edge `i → j` to `w` and restores canonical form in
    /// `O(dim²)`. Requires `self` canonical.
    pub fn constrain(&mut self, i: usize, j: usize, w: Weight) {
        debug_assert!(self.canonical);
        if self.is_empty() || w >= self.get(i, j) {
            return;
        }
        if self.get(j, i) + w < Weight::ZERO {
            self.mark_empty();
            return;
        }
        let n = self.dim;
        self.entries[i * n + j] = w;
        for a in 0..n {
            let ai = self.entries[a * n + i];
            if ai.is_infinite() {
                continue;
            }
            let aij = ai + w;
            for b in 0..n {
                let s = aij + self.entries[j * n + b];
                let e = &mut self.entries[a * n + b];
                if s < *e {
                    *e = s;
                }
            }
        }
    }

    /// Applies a conjunction of diagonal-free atoms.
    pub fn intersect_guard(&self, guard: &[ClockAtom]) -> Dbm {
        let mut d = self.canonicalize();
        for atom in guard {
            d.apply_atom(atom);
        }
        d
    }

    fn apply_atom(&mut self, atom: &ClockAtom) {
        let x = atom.clock;
        let c = atom.constant;
        match atom.relation {
            Relation::Lt => self.constrain(0, x, Weight::strict(c)),
            Relation::Le => self.constrain(0, x, Weight::weak(c)),
            Relation::Gt => self.constrain(x, 0, Weight::strict(-c)),
            Relation::Ge => self.constrain(x, 0, Weight::weak(-c)),
            Relation::Eq => {
                self.constrain(0, x, Weight::weak(c));
                self.constrain(x, 0, Weight::weak(-c));
            }
        }
    }

    /// Sets every clock in `clocks` to 0.
    pub fn reset(&self, clocks: &[usize]) -> Dbm {
        let mut d = self.canonicalize();
        if d.is_empty() {
            return d;
        }
        let n = d.dim;
        for &x in clocks {
            for y in 0..n {
                d.entries[x * n + y] = d.entries[y];
                d.entries[y * n + x] = d.entries[y * n];
            }
            d.entries[x * n + x] = Weight::ZERO;
        }
        d
    }

    /// Time successors: drops every upper bound `x₀ → x`.
    pub fn elapse(&self) -> Dbm {
        let mut d = self.canonicalize();
        if d.is_empty() {
            return d;
        }
        for x in 1..d.dim {
            d.entries[x] = Weight::INFINITY;
        }
        d
    }

    /// Delay, then guard, then reset. Empty results are returned as such.
    pub fn zone_successor(&self, guard: &[ClockAtom], resets: &[usize]) -> Dbm {
        self.elapse().intersect_guard(guard).reset(resets)
    }

    /// Entrywise minimum; denotes the intersection. Not canonicalized.
    pub fn min_graph(&self, other: &Dbm) -> Result<Dbm, DbmError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| *a.min(b))
            .collect();
        Ok(Dbm {
            dim: self.dim,
            entries,
            canonical: false,
        })
    }

    /// Edgewise `Z ⊆ Z'` for canonical operands.
    pub fn is_included_in(&self, other: &Dbm) -> Result<bool, DbmError> {
        self.check_dim(other)?;
        if self.is_empty() {
            return Ok(true);
        }
        if other.is_empty() {
            return Ok(false);
        }
        Ok(self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b))
    }

    /// Multiplies every finite constant by `k > 0`. Used to decide
    /// membership of rational points with denominator `k`.
    pub fn scaled(&self, k: i64) -> Dbm {
        assert!(k > 0);
        let entries = self
            .entries
            .iter()
            .map(|w| match w.value() {
                None => *w,
                Some(c) if w.is_strict() => Weight::strict(c * k),
                Some(c) => Weight::weak(c * k),
            })
            .collect();
        Dbm {
            dim: self.dim,
            entries,
            canonical: self.canonical,
        }
    }

    /// Membership of the rational valuation `point[x] / den` (with
    /// `point[0] == 0`), by direct evaluation of every constraint.
    pub fn contains_point(&self, point: &[i64], den: i64) -> bool {
        assert_eq!(point.len(), self.dim);
        assert!(den > 0);
        if point[0] != 0 || point.iter().any(|&v| v < 0) {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let w = self.get(i, j);
                let Some(c) = w.value() else { continue };
                let diff = point[j] - point[i];
                let bound = c * den;
                let ok = if w.is_strict() {
                    diff < bound
                } else {
                    diff <= bound
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    pub fn entries(&self) -> &[Weight] {
        &self.entries
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Dbm(dim={}, canonical={})", self.dim, self.canonical)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}
