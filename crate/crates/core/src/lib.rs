//! Solution-free subsets of the integers: exact oracles, graph-to-set gadget
//! constructions and the reductions built on top of them.
//!
//! A set `A` is *L-free* for a linear equation `L` when it contains no
//! non-trivial solution of `L`. The [`gadgets`] module encodes graphs as
//! integer sets whose non-trivial solutions are exactly the edges, and
//! [`reductions`] uses those encodings to move independent-set questions
//! (existence, approximation, counting) over to L-free subsets.

pub mod eqmodel;
pub mod error;
pub mod gadgets;
pub mod graphs;
pub mod json;
pub mod labeler;
pub mod oracle;
pub mod par;
pub mod reductions;

pub use eqmodel::{classify, parse_equation, standardize, EquationProfile, LinearEquation, StandardForm};
pub use error::{Error, Result};
pub use graphs::Graph;
pub use oracle::SearchConfig;
