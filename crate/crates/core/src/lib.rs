//! Equilibrium computation for security games whose defender strategies are
//! reachable only through a best-response oracle.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Dense tableau code walks parallel arrays by index.
#![allow(clippy::needless_range_loop)]

pub mod colgen;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod instance;
pub mod lp;
pub mod reductions;
pub mod reference;
pub mod report;
pub mod setsystems;
pub mod verify;

pub use error::{Error, Result};
pub use game::{marginal_of, AttackerMixed, Marginal, MixedStrategy, Payoffs, PureStrategy, SecurityGame};
