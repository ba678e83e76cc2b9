//! Enumeration of minimum-weight NAE solutions of 3-CNFs.
//!
//! A formula's NAE solutions are exactly the satisfying assignments of its
//! negation closure, so the search works on closed formulas and looks for
//! weight-`t` satisfying assignments (transversals) when none of smaller
//! weight exist. It walks a transversal tree whose clause choices follow
//! a staged rule (disjoint, controlled, arbitrary), and prunes edges that
//! would rediscover a transversal already covered to their left.
//!
//! Alongside the search:
//! - [`oracle`] brute-forces the same quantities for `n ≤ 24`;
//! - [`analysis`] evaluates the closed-form bounds and their DPs exactly;
//! - [`generators`] builds the extremal block instances and random corpora.

pub mod analysis;
pub mod cnf;
mod engine;
pub mod error;
pub mod generators;
pub mod matching;
pub mod oracle;
mod packed;
pub mod search;
pub mod selection;
pub mod tree;
pub mod varset;

pub use cnf::{Assignment, Clause, Formula, Literal, Var};
pub use error::{AnalysisError, CnfError, GenError, MatchingError, OracleError, SearchError};
pub use search::{
    count, count_with, enumerate, enumerate_all_orderings, enumerate_with, materialize,
    OrderingSource, SearchConfig, SearchStats,
};
pub use tree::Tree;
pub use varset::VarSet;
