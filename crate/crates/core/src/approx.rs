//! `Extra+_LU` extrapolation and the quadratic tests for inclusion in the
//! region closure of a zone.
//!
//! Neither test builds the closure. Both read `O(dim²)` edges of the two
//! graphs and stop at the first witness.

use std::fmt;

use crate::bounds::{Bound, BoundMap, LuBounds};
use crate::dbm::{Dbm, DbmError};
use crate::weight::Weight;

/// `(≤, b)` for a finite bound; `None` at `-∞`.
fn weak_bound(b: Bound) -> Option<Weight> {
    b.value().map(Weight::weak)
}

/// `Extra+_LU(Z)`. The result is left raw (flagged non-canonical); callers
/// test it with [`not_included_closure_lu`] without closing it.
///
/// Cases are tried in order for every off-diagonal edge `x → y`, with
/// `L₀ = U₀ = 0`:
/// `Z_xy > (≤,L_y)`, `-Z_y0 > (≤,L_y)`, `-Z_x0 > (≤,U_x)` for `y ≠ 0` all
/// drop the edge; `-Z_x0 > (≤,U_x)` with `y = 0` relaxes it to `(<,-U_x)`.
/// When `U_x = -∞` that last case yields `(≤, 0)`, the weakest lower bound.
pub fn extra_lu_plus(z: &Dbm, lu: &LuBounds) -> Dbm {
    assert_eq!(z.dim(), lu.dim(), "bounds and zone differ in dimension");
    if z.is_empty() {
        return z.canonicalize();
    }
    let z = z.canonicalize();
    let n = z.dim();
    // `-Z_x0 > (≤, b)` iff `Z_x0 < (≤, -b)`; at `b = -∞` it always holds.
    let exceeds = |zx0: Weight, b: Bound| match b.value() {
        Some(b) => zx0 < Weight::weak(-b),
        None => true,
    };
    let mut out = z.clone();
    for x in 0..n {
        let zx0 = z.get(x, 0);
        let over_u = x != 0 && exceeds(zx0, lu.upper.get(x));
        for y in 0..n {
            if x == y {
                continue;
            }
            let zxy = z.get(x, y);
            let ly = lu.lower.get(y);
            let drop = y != 0
                && (weak_bound(ly).is_none_or(|l| zxy > l) || exceeds(z.get(y, 0), ly) || over_u);
            let w = if drop {
                Weight::INFINITY
            } else if over_u {
                match lu.upper.get(x).value() {
                    Some(u) => Weight::strict(-u),
                    None => Weight::ZERO,
                }
            } else {
                zxy
            };
            out.set(x, y, w);
        }
    }
    out
}

/// Which of the three conditions fired, and on which clocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    /// 1, 2 or 3.
    pub condition: u8,
    pub x: usize,
    /// Equals `x` for conditions 1 and 2.
    pub y: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.condition == 3 {
            write!(f, "condition 3 on clocks ({}, {})", self.x, self.y)
        } else {
            write!(f, "condition {} on clock {}", self.condition, self.x)
        }
    }
}

fn check(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Result<(), DbmError> {
    if z.dim() != z2.dim() {
        return Err(DbmError::DimensionMismatch {
            left: z.dim(),
            right: z2.dim(),
        });
    }
    if z.dim() != alpha.dim() {
        return Err(DbmError::DimensionMismatch {
            left: z.dim(),
            right: alpha.dim(),
        });
    }
    Ok(())
}

/// A negative diagonal marks an empty graph.
fn marked_empty(d: &Dbm) -> bool {
    (0..d.dim()).any(|i| d.get(i, i) < Weight::ZERO)
}

/// The edge scan shared by both tests. `z` must be canonical; `z2` may be
/// raw when it comes from [`extra_lu_plus`].
fn scan(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Option<Witness> {
    if marked_empty(z) {
        return None;
    }
    if marked_empty(z2) {
        return Some(Witness {
            condition: 0,
            x: 0,
            y: 0,
        });
    }
    let n = z.dim();
    for x in 1..n {
        let ax = weak_bound(alpha.get(x));
        let z0x = z.get(0, x);
        let zx0 = z.get(x, 0);
        let z20x = z2.get(0, x);
        if let Some(ax) = ax {
            if z20x < z0x && z20x <= ax {
                return Some(Witness {
                    condition: 1,
                    x,
                    y: x,
                });
            }
        }
        // `Z_x0 ≥ (≤, -α_x)`; false at `α_x = -∞`.
        let low_in_range = alpha
            .get(x)
            .value()
            .is_some_and(|a| zx0 >= Weight::weak(-a));
        if !low_in_range {
            continue;
        }
        if z2.get(x, 0) < zx0 {
            return Some(Witness {
                condition: 2,
                x,
                y: x,
            });
        }
        let floor = zx0.floor().expect("edges into x0 are finite");
        for y in 1..n {
            if y == x {
                continue;
            }
            let Some(ay) = weak_bound(alpha.get(y)) else {
                continue;
            };
            let z2xy = z2.get(x, y);
            if z2xy < z.get(x, y) && z2xy <= ay + floor {
                return Some(Witness { condition: 3, x, y });
            }
        }
    }
    None
}

/// A witness for `Z ⊄ Closure_α(Z')`, if any. Both zones must be canonical.
/// An empty `z2` against a nonempty `z` yields a witness with condition 0.
pub fn closure_witness(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Result<Option<Witness>, DbmError> {
    check(z, z2, alpha)?;
    debug_assert!(z.is_canonical() && z2.is_canonical());
    Ok(scan(z, z2, alpha))
}

/// `Z ⊄ Closure_α(Z')` for canonical `z` and `z2`.
pub fn not_included_closure(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Result<bool, DbmError> {
    closure_witness(z, z2, alpha).map(|w| w.is_some())
}

/// `Z ⊄ Closure_α(Z'⁺)` where `z2plus = extra_lu_plus(Z', lu)` is used raw and
/// `α = max(L, U)` of the same `lu`.
pub fn not_included_closure_lu(z: &Dbm, z2plus: &Dbm, alpha: &BoundMap) -> Result<bool, DbmError> {
    check(z, z2plus, alpha)?;
    debug_assert!(z.is_canonical());
    Ok(scan(z, z2plus, alpha).is_some())
}

/// `Z ⊆ Closure_α(Z')`.
pub fn included_closure(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Result<bool, DbmError> {
    not_included_closure(z, z2, alpha).map(|b| !b)
}

/// `Z ⊆ Closure_α(Z'⁺)`.
pub fn included_closure_lu(z: &Dbm, z2plus: &Dbm, alpha: &BoundMap) -> Result<bool, DbmError> {
    not_included_closure_lu(z, z2plus, alpha).map(|b| !b)
}

/// LU test against a stored canonical zone: extrapolates, then scans.
pub fn included_closure_lu_bounds(z: &Dbm, z2: &Dbm, lu: &LuBounds) -> Result<bool, DbmError> {
    let plus = extra_lu_plus(z2, lu);
    included_closure_lu(z, &plus, &lu.alpha())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbm::{ClockAtom, Relation};

    fn zone(dim: usize, atoms: &[(usize, Relation, i64)]) -> Dbm {
        let guard: Vec<ClockAtom> = atoms
            .iter()
            .map(|&(x, r, c)| ClockAtom::new(x, r, c))
            .collect();
        Dbm::universe(dim).intersect_guard(&guard)
    }

    fn alpha(v: &[i64]) -> BoundMap {
        BoundMap::from_clocks(v.iter().map(|&c| Some(c)))
    }

    #[test]
    fn extra_drops_upper_bound_above_l() {
        let z = zone(2, &[(1, Relation::Le, 10)]);
        let lu = LuBounds {
            lower: alpha(&[5]),
            upper: alpha(&[5]),
        };
        let plus = extra_lu_plus(&z, &lu);
        assert_eq!(plus.get(0, 1), Weight::INFINITY);
        assert!(!plus.is_canonical());
    }

    #[test]
    fn extra_relaxes_lower_bound_above_u() {
        let z = zone(2, &[(1, Relation::Ge, 7)]);
        let lu = LuBounds {
            lower: alpha(&[5]),
            upper: alpha(&[5]),
        };
        assert_eq!(extra_lu_plus(&z, &lu).get(1, 0), Weight::strict(-5));
    }

    #[test]
    fn extra_with_large_bounds_is_identity() {
        let z = zone(3, &[(1, Relation::Ge, 2), (2, Relation::Le, 4)]).elapse();
        let lu = LuBounds {
            lower: alpha(&[100, 100]),
            upper: alpha(&[100, 100]),
        };
        let plus = extra_lu_plus(&z, &lu);
        assert_eq!(plus.entries(), z.entries());
    }

    #[test]
    fn extra_with_unbounded_clock_forgets_it() {
        let z = zone(2, &[(1, Relation::Eq, 3)]);
        let lu = LuBounds::new(2);
        let plus = extra_lu_plus(&z, &lu).canonicalize();
        assert_eq!(plus.entries(), Dbm::universe(2).entries());
    }

    #[test]
    fn upper_bound_condition() {
        let z2 = zone(2, &[(1, Relation::Le, 2)]);
        let z = zone(2, &[(1, Relation::Le, 3)]);
        let w = closure_witness(&z, &z2, &alpha(&[5])).unwrap();
        assert_eq!(
            w,
            Some(Witness {
                condition: 1,
                x: 1,
                y: 1
            })
        );
    }

    #[test]
    fn reflexive() {
        let z = zone(3, &[(1, Relation::Gt, 1), (2, Relation::Lt, 4)]).elapse();
        assert!(included_closure(&z, &z, &alpha(&[2, 2])).unwrap());
    }

    #[test]
    fn diagonal_zone_covers_shifted_zone() {
        // Z' = {x > 3} and Z = {x - y ≥ 1} with α = (3, 2).
        let z_prime = zone(3, &[(1, Relation::Gt, 3)]);
        let mut z = Dbm::universe(3);
        z.constrain(1, 2, Weight::weak(-1));
        let a = alpha(&[3, 2]);
        assert!(!not_included_closure(&z_prime, &z, &a).unwrap());
        assert!(!z_prime.is_included_in(&z).unwrap());
    }

    #[test]
    fn coarse_bound_merges_upper_bands() {
        let z = zone(2, &[(1, Relation::Le, 3)]);
        let z2 = zone(2, &[(1, Relation::Le, 2)]);
        assert!(included_closure(&z, &z2, &alpha(&[1])).unwrap());
    }

    #[test]
    fn empty_operands() {
        let empty = zone(2, &[(1, Relation::Lt, 0)]);
        let z = zone(2, &[(1, Relation::Le, 3)]);
        assert!(included_closure(&empty, &z, &alpha(&[3])).unwrap());
        assert!(!included_closure(&z, &empty, &alpha(&[3])).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let err = not_included_closure(&Dbm::universe(2), &Dbm::universe(3), &alpha(&[1]));
        assert!(matches!(err, Err(DbmError::DimensionMismatch { .. })));
    }
}
