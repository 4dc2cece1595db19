//! Constructive Church-Rosser machinery for the untyped λ-calculus.
//!
//! Every join is produced by iterating the Takahashi translation `M*` (one
//! Gross-Knuth step: contract all redexes of `M` at once). Paths are built
//! from single β-steps with explicit redex positions, so every result can be
//! replayed and checked. The [`bounds`] module evaluates the accompanying
//! upper bounds on reduction lengths and term sizes in exact arithmetic.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod bounds;
pub mod chain;
pub mod error;
pub mod join;
pub mod patterns;
pub mod position;
pub mod reduction;
pub mod syntax;
pub mod term;

pub use chain::{Direction, EqualityChain, Link};
pub use error::{Error, ParseError, Result};
pub use join::JoinCertificate;
pub use position::{Dir, Position, SubtermRelation};
pub use reduction::{Limits, ReductionPath, Step};
pub use syntax::{parse_term, print_term};
pub use term::{Name, RedexSet, Term, TermKind};
