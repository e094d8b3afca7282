//! Reachability checking for networks of timed automata.
//!
//! The search keeps every zone exactly as computed (no extrapolation is ever
//! stored) and prunes with an inclusion test against the region closure of
//! previously explored zones. Clock bounds that drive the closure are
//! computed on the fly over the explored tree.
//!
//! Module map:
//! - [`weight`] and [`dbm`]: difference-bound arithmetic and zone operations.
//! - [`approx`]: `Extra+_LU` and the quadratic closure-inclusion tests.
//! - [`regions`]: slow, exact region enumeration used as a test oracle.
//! - [`model`]: networks of automata, the text format, product successors,
//!   static bound analysis and benchmark generators.
//! - [`search`]: the reachability algorithms and their statistics.

pub mod approx;
pub mod bounds;
pub mod dbm;
pub mod model;
pub mod regions;
pub mod search;
pub mod weight;

pub use approx::{
    extra_lu_plus, included_closure, included_closure_lu, not_included_closure,
    not_included_closure_lu, Witness,
};
pub use bounds::{Bound, BoundMap, LuBounds};
pub use dbm::{Dbm, DbmError};
pub use weight::{Weight, WeightError};
