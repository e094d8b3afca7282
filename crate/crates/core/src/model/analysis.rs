//! Location-indexed static clock bounds and the per-edge bound transfer
//! shared with the on-the-fly search.

use super::{DiscreteState, Network};
use crate::bounds::{Bound, LuBounds};
use crate::dbm::ClockAtom;

/// Raises `lu` by the constants of `atoms`: `>`, `≥`, `=` feed `L`;
/// `<`, `≤`, `=` feed `U`.
pub fn raise_by_atoms(lu: &mut LuBounds, atoms: &[ClockAtom]) -> bool {
    let mut changed = false;
    for a in atoms {
        let b = Bound::finite(a.constant);
        if a.relation.is_lower() {
            changed |= lu.lower.raise(a.clock, b);
        }
        if a.relation.is_upper() {
            changed |= lu.upper.raise(a.clock, b);
        }
    }
    changed
}

/// Bounds a source needs for one edge: the guard's constants joined with
/// the target's bounds on clocks the edge does not reset.
pub fn maxedge(guard: &[ClockAtom], resets: &[usize], child: &LuBounds) -> LuBounds {
    let mut out = child.clone();
    for &x in resets {
        out.lower.set(x, Bound::NEG_INFINITY);
        out.upper.set(x, Bound::NEG_INFINITY);
    }
    raise_by_atoms(&mut out, guard);
    out
}

/// Static bounds per process location, and their maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticBounds {
    /// `per_process[p][l]`.
    pub per_process: Vec<Vec<LuBounds>>,
    pub global: LuBounds,
}

impl StaticBounds {
    /// Pointwise maximum over the processes' current locations.
    pub fn at(&self, s: &DiscreteState) -> LuBounds {
        let mut out = LuBounds::new(self.global.dim());
        for (p, &l) in s.locations.iter().enumerate() {
            out.join(&self.per_process[p][l]);
        }
        out
    }
}

/// Backward fixpoint per process: a location needs its invariant's
/// constants, and for each outgoing edge the guard, the target invariant
/// and the target's bounds on clocks the edge keeps.
///
/// Guards of other processes are ignored; their resets only make fewer
/// constants relevant, so the product bound (pointwise max) stays sound.
pub fn static_bounds(net: &Network) -> StaticBounds {
    let dim = net.dim();
    let mut per_process = Vec::with_capacity(net.processes.len());
    let mut global = LuBounds::new(dim);
    for p in &net.processes {
        let mut b: Vec<LuBounds> = p
            .locations
            .iter()
            .map(|l| {
                let mut lu = LuBounds::new(dim);
                raise_by_atoms(&mut lu, &l.invariant);
                lu
            })
            .collect();
        loop {
            let mut changed = false;
            for e in &p.edges {
                // Target invariant atoms failing at 0 stay even on reset clocks,
                // matching the product's guard folding.
                let target_inv: Vec<ClockAtom> = p.locations[e.target]
                    .invariant
                    .iter()
                    .copied()
                    .filter(|a| !e.resets.contains(&a.clock) || !a.relation.holds(0, a.constant))
                    .collect();
                let mut need = maxedge(&e.clock_guard, &e.resets, &b[e.target]);
                raise_by_atoms(&mut need, &target_inv);
                changed |= b[e.source].join(&need);
            }
            if !changed {
                break;
            }
        }
        for lu in &b {
            global.join(lu);
        }
        per_process.push(b);
    }
    StaticBounds {
        per_process,
        global,
    }
}
