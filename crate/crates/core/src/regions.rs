//! Exact region-based reference implementations.
//!
//! Everything here enumerates regions explicitly and is exponential in the
//! number of clocks. It is used to validate the quadratic tests of
//! [`crate::approx`] and never runs on the search path unless the caller
//! asks for oracle cross-checking.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bounds::{BoundMap, LuBounds};
use crate::dbm::{Dbm, DbmError};
use crate::weight::Weight;

/// Largest clock count the oracle accepts.
pub const MAX_CLOCKS: usize = 4;
/// Largest finite bound the oracle accepts.
pub const MAX_BOUND: i64 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("{clocks} clocks exceed the oracle limit of {MAX_CLOCKS}")]
    TooManyClocks { clocks: usize },
    #[error("bound {bound} on clock {clock} is outside the oracle range 0..={MAX_BOUND}")]
    BoundOutOfRange { clock: usize, bound: i64 },
    #[error("clock {clock} has bound -inf, which this operation does not support")]
    InfiniteBound { clock: usize },
    #[error("edge ({x}, {y}) is not one of the shapes (0,x), (x,0), (x,y)")]
    BadEdge { x: usize, y: usize },
    #[error("oracle disagreement: {0}")]
    Disagreement(String),
    #[error(transparent)]
    Dbm(#[from] DbmError),
}

/// Integer band of one clock inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    /// `x = c`
    Point(i64),
    /// `c - 1 < x < c`
    Open(i64),
    /// `x > α_x`, or any value when `α_x = -∞`.
    Above,
}

/// An `α`-region. `bands[i]` describes clock `i + 1`; `order` lists the
/// clocks in open bands grouped by equal fractional part, smallest first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Region {
    bands: Vec<Band>,
    order: Vec<Vec<usize>>,
}

impl Region {
    pub fn band(&self, clock: usize) -> Band {
        self.bands[clock - 1]
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn order(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn clocks(&self) -> usize {
        self.bands.len()
    }

    /// The region holding `v`.
    pub fn of(v: &Valuation, alpha: &BoundMap) -> Region {
        assert_eq!(v.dim(), alpha.dim());
        let den = v.den;
        let mut bands = Vec::with_capacity(v.dim() - 1);
        let mut open: Vec<(i64, usize)> = Vec::new();
        for x in 1..v.dim() {
            let num = v.num[x];
            let band = match alpha.get(x).value() {
                Some(a) if num <= a * den => {
                    if num % den == 0 {
                        Band::Point(num / den)
                    } else {
                        open.push((num % den, x));
                        Band::Open(num / den + 1)
                    }
                }
                _ => Band::Above,
            };
            bands.push(band);
        }
        open.sort();
        let mut order: Vec<Vec<usize>> = Vec::new();
        let mut last = None;
        for (frac, x) in open {
            if last == Some(frac) {
                order.last_mut().expect("group exists").push(x);
            } else {
                order.push(vec![x]);
                last = Some(frac);
            }
        }
        Region { bands, order }
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .bands
            .iter()
            .enumerate()
            .map(|(i, b)| match b {
                Band::Point(c) => format!("x{}={c}", i + 1),
                Band::Open(c) => format!("{}<x{}<{c}", c - 1, i + 1),
                Band::Above => format!("x{}>a", i + 1),
            })
            .collect();
        write!(f, "[{}; frac {:?}]", parts.join(", "), self.order)
    }
}

/// A rational valuation `num[x] / den`; `num[0]` is the reference clock.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    pub num: Vec<i64>,
    pub den: i64,
}

impl Valuation {
    pub fn new(num: Vec<i64>, den: i64) -> Valuation {
        assert!(den > 0 && !num.is_empty() && num[0] == 0);
        assert!(num.iter().all(|&v| v >= 0), "valuations are nonnegative");
        Valuation { num, den }
    }

    /// From clock values only (the reference entry is prepended).
    pub fn from_clocks(values: &[i64], den: i64) -> Valuation {
        let mut num = vec![0];
        num.extend_from_slice(values);
        Valuation::new(num, den)
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    pub fn in_zone(&self, z: &Dbm) -> bool {
        z.contains_point(&self.num, self.den)
    }

    fn over(&self, den: i64) -> Vec<i64> {
        assert_eq!(den % self.den, 0);
        self.num.iter().map(|v| v * (den / self.den)).collect()
    }
}

fn guard_scale(alpha: &BoundMap) -> Result<(), RegionError> {
    let clocks = alpha.dim() - 1;
    if clocks > MAX_CLOCKS {
        return Err(RegionError::TooManyClocks { clocks });
    }
    for x in 1..alpha.dim() {
        if let Some(b) = alpha.get(x).value() {
            if !(0..=MAX_BOUND).contains(&b) {
                return Err(RegionError::BoundOutOfRange { clock: x, bound: b });
            }
        }
    }
    Ok(())
}

fn bands_of(alpha: &BoundMap, x: usize) -> Vec<Band> {
    match alpha.get(x).value() {
        None => vec![Band::Above],
        Some(a) => {
            let mut v = vec![Band::Point(0)];
            for c in 1..=a {
                v.push(Band::Open(c));
                v.push(Band::Point(c));
            }
            v.push(Band::Above);
            v
        }
    }
}

/// Every ordered partition of `items` into nonempty blocks.
fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let first: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| items[i])
            .collect();
        let rest: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| items[i])
            .collect();
        for mut tail in ordered_partitions(&rest) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

/// All `α`-regions over `alpha.dim() - 1` clocks, each exactly once.
pub fn enumerate_regions(alpha: &BoundMap) -> Result<Vec<Region>, RegionError> {
    guard_scale(alpha)?;
    let clocks = alpha.dim() - 1;
    let per_clock: Vec<Vec<Band>> = (1..=clocks).map(|x| bands_of(alpha, x)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; clocks];
    loop {
        let bands: Vec<Band> = (0..clocks).map(|i| per_clock[i][choice[i]]).collect();
        let open: Vec<usize> = (0..clocks)
            .filter(|&i| matches!(bands[i], Band::Open(_)))
            .map(|i| i + 1)
            .collect();
        for order in ordered_partitions(&open) {
            out.push(Region {
                bands: bands.clone(),
                order,
            });
        }
        // Odometer over band choices.
        let mut i = 0;
        loop {
            if i == clocks {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < per_clock[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Canonical distance graph `G_R`.
pub fn region_graph(r: &Region, alpha: &BoundMap) -> Dbm {
    let dim = r.clocks() + 1;
    assert_eq!(dim, alpha.dim());
    let mut g = Dbm::universe(dim);
    let mut int_part = vec![0i64; dim];
    for x in 1..dim {
        match r.band(x) {
            Band::Point(c) => {
                g.set(0, x, Weight::weak(c));
                g.set(x, 0, Weight::weak(-c));
            }
            Band::Open(c) => {
                g.set(0, x, Weight::strict(c));
                g.set(x, 0, Weight::strict(-(c - 1)));
                int_part[x] = c - 1;
            }
            Band::Above => {
                if let Some(a) = alpha.get(x).value() {
                    g.set(x, 0, Weight::strict(-a));
                }
            }
        }
    }
    for (i, block) in r.order.iter().enumerate() {
        for &x in block {
            for &y in block {
                if x != y {
                    g.set(x, y, Weight::weak(int_part[y] - int_part[x]));
                }
            }
            // Every clock of a later block has a larger fractional part:
            // `y - x > ⌊y⌋ - ⌊x⌋`, i.e. edge `y → x` below `⌊x⌋ - ⌊y⌋`.
            for later in &r.order[i + 1..] {
                for &y in later {
                    g.set(y, x, Weight::strict(int_part[x] - int_part[y]));
                }
            }
        }
    }
    g.canonicalize()
}

/// Pairwise criterion: `R ∩ Z = ∅` iff some `Z_yx + R_xy ≤ (<, 0)`.
fn pairwise_disjoint(g_r: &Dbm, z: &Dbm) -> bool {
    let n = z.dim();
    (0..n).any(|x| (0..n).any(|y| z.get(y, x) + g_r.get(x, y) <= Weight::LT_ZERO))
}

/// Direct criterion: the combined graph has a negative cycle.
fn graph_disjoint(g_r: &Dbm, z: &Dbm) -> Result<bool, DbmError> {
    Ok(g_r.min_graph(z)?.is_empty())
}

/// Whether `R ∩ Z ≠ ∅`, decided by both criteria; disagreement is an error.
pub fn region_intersects_zone(r: &Region, z: &Dbm, alpha: &BoundMap) -> Result<bool, RegionError> {
    intersects_graph(&region_graph(r, alpha), z)
}

fn intersects_graph(g_r: &Dbm, z: &Dbm) -> Result<bool, RegionError> {
    let z = z.canonicalize();
    if z.is_empty() {
        return Ok(false);
    }
    let direct = graph_disjoint(g_r, &z)?;
    let pairwise = pairwise_disjoint(g_r, &z);
    if direct != pairwise {
        return Err(RegionError::Disagreement(format!(
            "region {g_r:?} vs zone {z:?}: cycle search says disjoint={direct}, pairwise says {pairwise}"
        )));
    }
    Ok(!direct)
}

/// Regions and their graphs for one bound map, enumerated once.
pub struct RegionOracle {
    alpha: BoundMap,
    regions: Vec<Region>,
    graphs: Vec<Dbm>,
}

impl RegionOracle {
    pub fn new(alpha: &BoundMap) -> Result<RegionOracle, RegionError> {
        let regions = enumerate_regions(alpha)?;
        let graphs = regions.iter().map(|r| region_graph(r, alpha)).collect();
        Ok(RegionOracle {
            alpha: alpha.clone(),
            regions,
            graphs,
        })
    }

    pub fn alpha(&self) -> &BoundMap {
        &self.alpha
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn graph(&self, i: usize) -> &Dbm {
        &self.graphs[i]
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Index of the region holding `v`.
    pub fn locate(&self, v: &Valuation) -> Option<usize> {
        let r = Region::of(v, &self.alpha);
        self.regions.iter().position(|q| *q == r)
    }

    /// Membership mask of the regions meeting `z`, by cycle search only.
    pub fn meeting(&self, z: &Dbm) -> Result<Vec<bool>, RegionError> {
        let z = z.canonicalize();
        if z.is_empty() {
            return Ok(vec![false; self.len()]);
        }
        self.graphs
            .iter()
            .map(|g| Ok(!graph_disjoint(g, &z)?))
            .collect()
    }

    /// Like [`RegionOracle::meeting`] but every verdict is decided by both
    /// criteria.
    pub fn meeting_checked(&self, z: &Dbm) -> Result<Vec<bool>, RegionError> {
        self.graphs.iter().map(|g| intersects_graph(g, z)).collect()
    }

    /// `Z ⊆ Closure_α(Z')`: every region meeting `z` meets `z2`.
    pub fn closure_inclusion(&self, z: &Dbm, z2: &Dbm) -> Result<bool, RegionError> {
        let z = z.canonicalize();
        let z2 = z2.canonicalize();
        if z.is_empty() {
            return Ok(true);
        }
        for g in &self.graphs {
            if !graph_disjoint(g, &z)? && graph_disjoint(g, &z2)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least `R_xy` over the regions meeting `z`, by enumeration.
    pub fn min_region_edge_enumerated(
        &self,
        z: &Dbm,
        x: usize,
        y: usize,
    ) -> Result<Weight, RegionError> {
        let z = z.canonicalize();
        let mut best = None::<Weight>;
        for g in &self.graphs {
            if !graph_disjoint(g, &z)? {
                let w = g.get(x, y);
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        best.ok_or_else(|| RegionError::Disagreement("no region meets a nonempty zone".into()))
    }

    /// [`min_region_edge_closed`], checked against enumeration.
    pub fn min_region_edge(&self, z: &Dbm, x: usize, y: usize) -> Result<Weight, RegionError> {
        let closed = min_region_edge_closed(z, x, y, &self.alpha)?;
        let enumerated = self.min_region_edge_enumerated(z, x, y)?;
        if closed != enumerated {
            return Err(RegionError::Disagreement(format!(
                "least R_{x}{y}: closed form {closed}, enumeration {enumerated}, zone {z:?}"
            )));
        }
        Ok(closed)
    }
}

/// `Z ⊆ Closure_α(Z')` by region enumeration.
pub fn closure_inclusion(z: &Dbm, z2: &Dbm, alpha: &BoundMap) -> Result<bool, RegionError> {
    RegionOracle::new(alpha)?.closure_inclusion(z, z2)
}

/// `Z ⊆ Closure_α(Z'⁺)` for a raw `Extra+_LU` graph: closes it, then
/// enumerates.
pub fn closure_inclusion_lu(z: &Dbm, z2plus: &Dbm, alpha: &BoundMap) -> Result<bool, RegionError> {
    closure_inclusion(z, &z2plus.canonicalize(), alpha)
}

/// `⌈-w⌉`, with `-(<,∞)` read as `-∞` (returned as `None`).
fn ceil_neg(w: Weight) -> Option<Weight> {
    w.neg().ok().map(|n| n.ceil().expect("finite"))
}

/// Closed-form least value of `R_xy` over the regions meeting `z`.
///
/// `(0,x)`: `(<,∞)` if `Z_x0 < (≤,-α_x)`, else `⌈-Z_x0⌉`.
/// `(x,0)`: `max{⌈-Z_0x⌉, (<,-α_x)}`.
/// `(x,y)`: `(<,∞)` if `Z_y0 < (≤,-α_y)`, else
/// `max{⌈-Z_yx⌉, ⌈-Z_y0⌉ + (<,-α_x)}`.
pub fn min_region_edge_closed(
    z: &Dbm,
    x: usize,
    y: usize,
    alpha: &BoundMap,
) -> Result<Weight, RegionError> {
    let n = z.dim();
    if x >= n || y >= n || x == y {
        return Err(RegionError::BadEdge { x, y });
    }
    let z = z.canonicalize();
    let finite = |c: usize| {
        alpha
            .get(c)
            .value()
            .ok_or(RegionError::InfiniteBound { clock: c })
    };
    if x == 0 {
        let a = finite(y)?;
        let zy0 = z.get(y, 0);
        return Ok(if zy0 < Weight::weak(-a) {
            Weight::INFINITY
        } else {
            ceil_neg(zy0).expect("finite")
        });
    }
    if y == 0 {
        let a = finite(x)?;
        let floor = Weight::strict(-a);
        return Ok(ceil_neg(z.get(0, x)).map_or(floor, |w| w.max(floor)));
    }
    let (ax, ay) = (finite(x)?, finite(y)?);
    let zy0 = z.get(y, 0);
    if zy0 < Weight::weak(-ay) {
        return Ok(Weight::INFINITY);
    }
    let shifted = ceil_neg(zy0).expect("finite") + Weight::strict(-ax);
    Ok(ceil_neg(z.get(y, x)).map_or(shifted, |w| w.max(shifted)))
}

/// Least `R_xy` over regions meeting `z`, checked by enumeration.
pub fn min_region_edge(
    z: &Dbm,
    x: usize,
    y: usize,
    alpha: &BoundMap,
) -> Result<Weight, RegionError> {
    RegionOracle::new(alpha)?.min_region_edge(z, x, y)
}

/// `v1 ≼_LU v2`: per clock, equal values, or `L < v1 < v2`, or
/// `U < v2 < v1`.
pub fn lu_preorder_le(v1: &Valuation, v2: &Valuation, lu: &LuBounds) -> bool {
    assert_eq!(v1.dim(), v2.dim());
    let den = v1.den * v2.den;
    let (a, b) = (v1.over(den), v2.over(den));
    (1..v1.dim()).all(|x| {
        let above = |bound: crate::bounds::Bound, v: i64| bound.value().is_none_or(|c| c * den < v);
        a[x] == b[x]
            || (above(lu.lower.get(x), a[x]) && a[x] < b[x])
            || (above(lu.upper.get(x), b[x]) && b[x] < a[x])
    })
}

/// Whether `v ∈ a_≼LU(z)`, i.e. some `v' ∈ z` has `v' ≼_LU v`.
///
/// The admissible `v'(x)` form one interval per clock, so the question is
/// the emptiness of `z` intersected with a box; it is decided exactly on
/// the graph scaled to `v`'s denominator.
pub fn alu_membership(z: &Dbm, v: &Valuation, lu: &LuBounds) -> bool {
    assert_eq!(z.dim(), v.dim());
    let den = v.den;
    let mut g = z.scaled(den).canonicalize();
    if g.is_empty() {
        return false;
    }
    for x in 1..v.dim() {
        let vx = v.num[x];
        // Lower end: `(L, …` when `L < v(x)`, else `[v(x), …`.
        match lu.lower.get(x).value() {
            None => {}
            Some(l) if l * den < vx => g.constrain(x, 0, Weight::strict(-l * den)),
            Some(_) => g.constrain(x, 0, Weight::weak(-vx)),
        }
        // Upper end: `…, ∞)` when `U < v(x)`, else `…, v(x)]`.
        if !lu.upper.get(x).value().is_none_or(|u| u * den < vx) {
            g.constrain(0, x, Weight::weak(vx));
        }
    }
    !g.is_empty()
}

/// Half-integer grid over `[0, hi]` per clock, reference clock first.
pub fn half_grid(clocks: usize, hi: i64) -> Vec<Valuation> {
    let steps = 2 * hi + 1;
    let mut out = Vec::new();
    let total = (steps as usize).pow(clocks as u32);
    for mut k in 0..total {
        let mut num = vec![0i64];
        for _ in 0..clocks {
            num.push((k % steps as usize) as i64);
            k /= steps as usize;
        }
        out.push(Valuation::new(num, 2));
    }
    out
}

/// Caches one [`RegionOracle`] per bound map.
#[derive(Default)]
pub struct OracleCache {
    oracles: HashMap<BoundMap, RegionOracle>,
}

impl OracleCache {
    pub fn new() -> OracleCache {
        OracleCache::default()
    }

    pub fn get(&mut self, alpha: &BoundMap) -> Result<&RegionOracle, RegionError> {
        if !self.oracles.contains_key(alpha) {
            let o = RegionOracle::new(alpha)?;
            self.oracles.insert(alpha.clone(), o);
        }
        Ok(&self.oracles[alpha])
    }
}
