//! Per-clock bound functions.
//!
//! Maps are indexed like DBMs: index 0 is the reference clock and always
//! holds bound 0; clocks live at indices `1..dim`.

use std::fmt;

/// A clock bound in `ℕ ∪ {-∞}`. `-∞` marks a clock that is never compared.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bound(Option<i64>);

impl Bound {
    pub const NEG_INFINITY: Bound = Bound(None);

    pub const fn finite(c: i64) -> Bound {
        Bound(Some(c))
    }

    pub const fn value(self) -> Option<i64> {
        self.0
    }

    pub const fn is_finite(self) -> bool {
        self.0.is_some()
    }
}

impl From<Option<i64>> for Bound {
    fn from(v: Option<i64>) -> Bound {
        Bound(v)
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "-inf"),
        }
    }
}

/// The bound function `α`: one [`Bound`] per clock.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoundMap {
    bounds: Vec<Bound>,
}

impl BoundMap {
    /// All clocks at `-∞`.
    pub fn new(dim: usize) -> BoundMap {
        assert!(dim >= 1, "a bound map covers at least the reference clock");
        let mut bounds = vec![Bound::NEG_INFINITY; dim];
        bounds[0] = Bound::finite(0);
        BoundMap { bounds }
    }

    /// Builds a map from per-clock values (clock `i + 1` gets `values[i]`).
    pub fn from_clocks<I, B>(values: I) -> BoundMap
    where
        I: IntoIterator<Item = B>,
        B: Into<Bound>,
    {
        let mut bounds = vec![Bound::finite(0)];
        bounds.extend(values.into_iter().map(Into::into));
        BoundMap { bounds }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn get(&self, clock: usize) -> Bound {
        self.bounds[clock]
    }

    pub fn set(&mut self, clock: usize, bound: Bound) {
        assert!(clock != 0, "the reference clock bound is fixed");
        self.bounds[clock] = bound;
    }

    /// Raises `clock` to at least `bound`; returns whether it changed.
    pub fn raise(&mut self, clock: usize, bound: Bound) -> bool {
        if bound > self.bounds[clock] {
            self.bounds[clock] = bound;
            true
        } else {
            false
        }
    }

    pub fn join(&mut self, other: &BoundMap) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        let mut changed = false;
        for x in 1..self.dim() {
            changed |= self.raise(x, other.bounds[x]);
        }
        changed
    }

    /// Pointwise `≤`.
    pub fn le(&self, other: &BoundMap) -> bool {
        self.dim() == other.dim() && (1..self.dim()).all(|x| self.bounds[x] <= other.bounds[x])
    }

    /// The largest finite bound, if any.
    pub fn max_finite(&self) -> Option<i64> {
        self.bounds[1..].iter().filter_map(|b| b.value()).max()
    }

    /// Clock bounds without the reference entry.
    pub fn clocks(&self) -> &[Bound] {
        &self.bounds[1..]
    }
}

impl fmt::Debug for BoundMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.clocks()).finish()
    }
}

/// Separate bounds for lower-bound guards (`L`, from `>`/`≥`) and
/// upper-bound guards (`U`, from `<`/`≤`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LuBounds {
    pub lower: BoundMap,
    pub upper: BoundMap,
}

impl LuBounds {
    pub fn new(dim: usize) -> LuBounds {
        LuBounds {
            lower: BoundMap::new(dim),
            upper: BoundMap::new(dim),
        }
    }

    /// `L = U = m`, the bounds used by `Extra+_M`.
    pub fn symmetric(m: &BoundMap) -> LuBounds {
        LuBounds {
            lower: m.clone(),
            upper: m.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    /// `α_x = max(L_x, U_x)`.
    pub fn alpha(&self) -> BoundMap {
        let mut a = self.lower.clone();
        a.join(&self.upper);
        a
    }

    pub fn join(&mut self, other: &LuBounds) -> bool {
        let l = self.lower.join(&other.lower);
        let u = self.upper.join(&other.upper);
        l || u
    }

    pub fn le(&self, other: &LuBounds) -> bool {
        self.lower.le(&other.lower) && self.upper.le(&other.upper)
    }
}

impl fmt::Debug for LuBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={:?} U={:?}", self.lower, self.upper)
    }
}
