//! Rees algebras over affine charts with exact rational arithmetic:
//! polynomial and ideal operations, differential closure, order
//! invariants, monoidal transforms and a constructive resolution driver.

pub mod basicobj;
pub mod blowup;
pub mod error;
pub mod groebner;
pub mod ideal;
pub mod parse;
pub mod poly;
pub mod problem;
pub mod rees;
pub mod resolution;
pub mod singular;

pub use basicobj::{MarkedObject, TValue};
pub use blowup::{CenterSpec, Chart, DivisorRecord};
pub use error::{Error, Result};
pub use groebner::{Limits, Membership};
pub use ideal::Ideal;
pub use poly::{fmt_rat, rat, PointQ, Poly, Rat};
pub use problem::{Problem, ProblemBody};
pub use rees::{Pair, ReesAlgebra};
pub use resolution::{resolve, traces_equal, Outcome, ResolutionTrace, ResolveOptions};
