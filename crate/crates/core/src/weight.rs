//! Weights of distance-graph edges.
//!
//! A weight `(≼, c)` bounds a clock difference: an edge `x → y` carrying
//! `(≼, c)` stands for `y - x ≼ c`. Weights are packed into a single `i64`
//! as `2c + 1` for `≤` and `2c` for `<`, so the natural integer order is the
//! weight order and `(<, c) < (≤, c) < (<, c + 1)`.

use std::fmt;
use std::ops::Add;

use thiserror::Error;

const RAW_INFINITY: i64 = i64::MAX;

/// Largest magnitude accepted for a finite constant.
pub const MAX_CONSTANT: i64 = 1 << 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strictness {
    /// `≤`
    Weak,
    /// `<`
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("operation is undefined on the infinite weight")]
    Infinite,
    #[error("(<=, inf) is not a weight; infinity is always strict")]
    WeakInfinity,
    #[error("constant {0} is out of range")]
    OutOfRange(i64),
}

/// A bound `(≼, c)` with `c ∈ ℤ ∪ {+∞}`. `(<, +∞)` is the only infinite weight.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(i64);

impl Weight {
    pub const INFINITY: Weight = Weight(RAW_INFINITY);
    /// `(≤, 0)`
    pub const ZERO: Weight = Weight(1);
    /// `(<, 0)`
    pub const LT_ZERO: Weight = Weight(0);

    pub const fn weak(c: i64) -> Weight {
        Weight((c << 1) | 1)
    }

    pub const fn strict(c: i64) -> Weight {
        Weight(c << 1)
    }

    pub fn new(strictness: Strictness, value: Option<i64>) -> Result<Weight, WeightError> {
        match (strictness, value) {
            (Strictness::Strict, None) => Ok(Weight::INFINITY),
            (Strictness::Weak, None) => Err(WeightError::WeakInfinity),
            (_, Some(c)) if c.abs() > MAX_CONSTANT => Err(WeightError::OutOfRange(c)),
            (Strictness::Weak, Some(c)) => Ok(Weight::weak(c)),
            (Strictness::Strict, Some(c)) => Ok(Weight::strict(c)),
        }
    }

    pub const fn is_infinite(self) -> bool {
        self.0 == RAW_INFINITY
    }

    /// The constant, or `None` for `+∞`.
    pub const fn value(self) -> Option<i64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0 >> 1)
        }
    }

    pub const fn strictness(self) -> Strictness {
        if self.0 & 1 == 1 && !self.is_infinite() {
            Strictness::Weak
        } else {
            Strictness::Strict
        }
    }

    pub const fn is_strict(self) -> bool {
        matches!(self.strictness(), Strictness::Strict)
    }

    /// `-(≼, c) = (≼, -c)`.
    pub fn neg(self) -> Result<Weight, WeightError> {
        let c = self.value().ok_or(WeightError::Infinite)?;
        Ok(match self.strictness() {
            Strictness::Weak => Weight::weak(-c),
            Strictness::Strict => Weight::strict(-c),
        })
    }

    /// `⌊(<, c)⌋ = (≤, c - 1)`, `⌊(≤, c)⌋ = (≤, c)`.
    pub fn floor(self) -> Result<Weight, WeightError> {
        let c = self.value().ok_or(WeightError::Infinite)?;
        Ok(match self.strictness() {
            Strictness::Weak => self,
            Strictness::Strict => Weight::weak(c - 1),
        })
    }

    /// `⌈(≤, c)⌉ = (≤, c)`, `⌈(<, c)⌉ = (<, c + 1)` for integral `c`.
    pub fn ceil(self) -> Result<Weight, WeightError> {
        let c = self.value().ok_or(WeightError::Infinite)?;
        Ok(match self.strictness() {
            Strictness::Weak => self,
            Strictness::Strict => Weight::strict(c + 1),
        })
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        if self.is_infinite() || rhs.is_infinite() {
            return Weight::INFINITY;
        }
        let sum = self.0.saturating_add(rhs.0) - ((self.0 | rhs.0) & 1);
        Weight(sum.min(RAW_INFINITY - 1))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.value(), self.strictness()) {
            (None, _) => write!(f, "(<,inf)"),
            (Some(c), Strictness::Weak) => write!(f, "(<=,{c})"),
            (Some(c), Strictness::Strict) => write!(f, "(<,{c})"),
        }
    }
}
