use thiserror::Error;

use crate::cnf::Var;

/// Errors raised while building or parsing formulas.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("no `p cnf` header found")]
    MissingHeader,
    #[error("line {line}: malformed header, expected `p cnf <n> <m>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range for {n} variables")]
    LiteralOutOfRange { line: usize, literal: i64, n: u32 },
    #[error("line {line}: clause is not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("line {line}: tautological clause on variable {var}")]
    Tautology { line: usize, var: Var },
    #[error("variable {var} outside 1..={n}")]
    VariableOutOfRange { var: Var, n: u32 },
}

/// Errors raised by the transversal-tree search.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    /// A node above the target depth has no positive clause left, so the
    /// variables set along its path already form a smaller transversal.
    #[error("precondition violated at depth {depth}: {reason} (ones so far: {ones:?})")]
    PreconditionViolated {
        depth: usize,
        ones: Vec<Var>,
        reason: String,
    },
    #[error("input formula is not negation-closed")]
    InputNotClosed,
    #[error("clause of width {width} exceeds the 3-CNF limit")]
    WidthError { width: usize },
    #[error("{n} variables exceed the engine limit of {max}")]
    TooManyVariables { n: u32, max: u32 },
    #[error("target weight {t} exceeds variable count {n}")]
    TargetTooLarge { t: usize, n: u32 },
    #[error("exhaustive ordering space of {required} exceeds budget {budget}")]
    BudgetExceeded { required: String, budget: u64 },
    #[error("{stage} collection reset more than {limit} times")]
    ResetLimit { stage: String, limit: u32 },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Errors raised when a disjoint collection is asked to do something its
/// invariants forbid.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("replacement clauses are not pairwise disjoint from the kept members")]
    NotDisjoint,
    #[error("clause scheduled for removal is not a member")]
    NotAMember,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force refused: {n} variables exceeds the limit of {max}")]
    TooLarge { n: u32, max: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("parameters refused: {0}")]
    Refused(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("block size {block} does not divide n = {n}")]
    Divisibility { n: u32, block: u32 },
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
}
