//! Formulas, literals and assignments, plus DIMACS I/O.
//!
//! Clauses are kept as sorted literal lists and a [`Formula`] stores its
//! clauses sorted and deduplicated, so two formulas with the same clause set
//! compare (and serialize) identically.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::CnfError;
use crate::varset::{VarSet, MAX_ENGINE_VARS};

/// 1-based variable index.
pub type Var = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: Var,
    negated: bool,
}

impl Literal {
    pub fn positive(var: Var) -> Self {
        Literal {
            var,
            negated: false,
        }
    }

    pub fn negative(var: Var) -> Self {
        Literal { var, negated: true }
    }

    /// Builds a literal from its signed DIMACS form. Returns `None` for 0.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        let var = lit.unsigned_abs() as Var;
        Some(if lit > 0 {
            Literal::positive(var)
        } else {
            Literal::negative(var)
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Truth value under the assignment that sets exactly `ones` to 1.
    pub fn eval(self, ones: &Assignment) -> bool {
        ones.contains(self.var) != self.negated
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A disjunction of literals over distinct variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Canonicalizes `lits`: sorted by variable, repeated literals merged.
    /// A clause containing both `x` and `¬x` is rejected.
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Result<Self, CnfError> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(CnfError::Tautology {
                line: 0,
                var: w[0].var,
            });
        }
        Ok(Clause { lits })
    }

    /// Convenience constructor from signed DIMACS integers.
    ///
    /// # Panics
    /// If a literal is 0 or the clause is tautological.
    pub fn from_dimacs(lits: &[i64]) -> Self {
        Clause::new(
            lits.iter()
                .map(|&l| Literal::from_dimacs(l).expect("0 is not a literal")),
        )
        .expect("tautological clause")
    }

    pub fn monotone<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        Clause::new(vars.into_iter().map(Literal::positive)).expect("positive clause")
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// All literals positive.
    pub fn is_monotone(&self) -> bool {
        self.lits.iter().all(|l| l.is_positive())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var)
    }

    pub fn max_var(&self) -> Var {
        self.lits.last().map_or(0, |l| l.var)
    }

    /// The clause with every literal negated.
    pub fn negation(&self) -> Clause {
        Clause {
            lits: self.lits.iter().map(|l| l.negate()).collect(),
        }
    }

    pub fn shares_var(&self, other: &Clause) -> bool {
        self.vars().any(|v| other.vars().any(|w| w == v))
    }

    /// Whether some positive literal's variable is in `ones`.
    pub fn is_satisfied_by_ones(&self, ones: &Assignment) -> bool {
        self.lits
            .iter()
            .any(|l| l.is_positive() && ones.contains(l.var))
    }

    /// `C/Y`: drops negative literals over `ones`. `None` when `ones`
    /// satisfies the clause.
    pub fn simplify(&self, ones: &Assignment) -> Option<Clause> {
        if self.is_satisfied_by_ones(ones) {
            return None;
        }
        Some(Clause {
            lits: self
                .lits
                .iter()
                .copied()
                .filter(|l| l.is_positive() || !ones.contains(l.var))
                .collect(),
        })
    }

    /// Satisfied under the total assignment with exactly `ones` true.
    pub fn eval(&self, ones: &Assignment) -> bool {
        self.lits.iter().any(|l| l.eval(ones))
    }

    /// Positive and negative variable masks; requires every variable to fit
    /// in a [`VarSet`].
    pub fn masks(&self) -> (VarSet, VarSet) {
        let mut pos = VarSet::EMPTY;
        let mut neg = VarSet::EMPTY;
        for l in &self.lits {
            if l.is_positive() {
                pos = pos.with(l.var);
            } else {
                neg = neg.with(l.var);
            }
        }
        (pos, neg)
    }

    pub fn var_set(&self) -> VarSet {
        VarSet::from_vars(self.vars())
    }

    pub fn to_dimacs_line(&self) -> String {
        let mut s = String::new();
        for l in &self.lits {
            s.push_str(&l.to_dimacs().to_string());
            s.push(' ');
        }
        s.push('0');
        s
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, "∨")?;
            }
            write!(f, "{l:?}")?;
        }
        write!(f, ")")
    }
}

/// A set of variables set to 1; every other variable is 0.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Assignment {
    ones: BTreeSet<Var>,
}

impl Assignment {
    pub fn new<I: IntoIterator<Item = Var>>(ones: I) -> Self {
        Assignment {
            ones: ones.into_iter().collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.ones.len()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.ones.contains(&v)
    }

    pub fn ones(&self) -> impl Iterator<Item = Var> + '_ {
        self.ones.iter().copied()
    }

    pub fn insert(&mut self, v: Var) -> bool {
        self.ones.insert(v)
    }

    pub fn from_varset(s: VarSet) -> Self {
        Assignment::new(s.iter())
    }

    pub fn to_varset(&self) -> VarSet {
        VarSet::from_vars(self.ones())
    }

    /// Space separated ascending indices (empty line for the empty set).
    pub fn to_line(&self) -> String {
        self.ones
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// `n` characters, position `i` is `1` iff variable `i+1` is set.
    pub fn to_bitstring(&self, n: u32) -> String {
        (1..=n)
            .map(|v| if self.contains(v) { '1' } else { '0' })
            .collect()
    }

    /// Parses either form produced by [`to_line`](Self::to_line) or
    /// [`to_bitstring`](Self::to_bitstring).
    pub fn parse_line(line: &str, n: u32) -> Result<Self, CnfError> {
        let trimmed = line.trim();
        let is_bits =
            trimmed.len() == n as usize && n > 1 && trimmed.chars().all(|c| c == '0' || c == '1');
        if is_bits {
            return Ok(Assignment::new(
                trimmed
                    .chars()
                    .enumerate()
                    .filter(|(_, c)| *c == '1')
                    .map(|(i, _)| i as Var + 1),
            ));
        }
        let mut a = Assignment::default();
        for tok in trimmed.split_whitespace() {
            let v: Var = tok.parse().map_err(|_| CnfError::InvalidToken {
                line: 0,
                token: tok.to_string(),
            })?;
            if v == 0 || v > n {
                return Err(CnfError::VariableOutOfRange { var: v, n });
            }
            a.insert(v);
        }
        Ok(a)
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones.iter()).finish()
    }
}

/// A clause set over variables `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: u32,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new<I: IntoIterator<Item = Clause>>(n: u32, clauses: I) -> Result<Self, CnfError> {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        if let Some(c) = clauses.iter().find(|c| c.max_var() > n) {
            return Err(CnfError::VariableOutOfRange {
                var: c.max_var(),
                n,
            });
        }
        clauses.sort();
        clauses.dedup();
        Ok(Formula { n, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn fits_engine(&self) -> bool {
        self.n <= MAX_ENGINE_VARS
    }

    /// Adds the negation-clause of every clause.
    pub fn negation_closure(&self) -> Formula {
        let mut clauses = self.clauses.clone();
        clauses.extend(self.clauses.iter().map(Clause::negation));
        Formula::new(self.n, clauses).expect("closure keeps variables in range")
    }

    pub fn is_negation_closed(&self) -> bool {
        self.clauses
            .iter()
            .all(|c| self.clauses.binary_search(&c.negation()).is_ok())
    }

    /// `F/Y`: drops clauses satisfied by `ones`, strips negated `ones`
    /// from the rest. The variable universe is unchanged.
    pub fn simplify(&self, ones: &Assignment) -> Formula {
        Formula::new(self.n, self.clauses.iter().filter_map(|c| c.simplify(ones)))
            .expect("simplification keeps variables in range")
    }

    /// Contains the empty clause.
    pub fn is_falsified(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Clauses with no positive literal over `q`; negations of `q` are
    /// allowed.
    pub fn live_clauses(&self, q: &Assignment) -> Vec<Clause> {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied_by_ones(q))
            .cloned()
            .collect()
    }

    /// Whether the assignment with exactly `a` true satisfies every clause.
    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.eval(a))
    }

    /// Every clause has at least one true and one false literal under `a`.
    pub fn nae_check(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| {
            let t = c.literals().iter().filter(|l| l.eval(a)).count();
            t >= 1 && t < c.width()
        })
    }

    /// Parses DIMACS CNF. Comment lines start with `c`; a `%` line ends the
    /// input. Clauses may span lines.
    pub fn parse_dimacs(text: &str) -> Result<Self, CnfError> {
        let mut n: Option<u32> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        let mut clause_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if line.starts_with('p') {
                if n.is_some() {
                    return Err(CnfError::MalformedHeader { line: line_no });
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                let parsed = match parts.as_slice() {
                    ["p", "cnf", nv, m] => nv.parse::<u32>().ok().zip(m.parse::<u64>().ok()),
                    _ => None,
                };
                let (nv, _) = parsed.ok_or(CnfError::MalformedHeader { line: line_no })?;
                n = Some(nv);
                continue;
            }
            let nv = n.ok_or(CnfError::MissingHeader)?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| CnfError::InvalidToken {
                    line: line_no,
                    token: tok.to_string(),
                })?;
                if lit == 0 {
                    let clause = Clause::new(current.drain(..)).map_err(|e| match e {
                        CnfError::Tautology { var, .. } => CnfError::Tautology {
                            line: clause_line,
                            var,
                        },
                        other => other,
                    })?;
                    clauses.push(clause);
                    continue;
                }
                if lit.unsigned_abs() > nv as u64 {
                    return Err(CnfError::LiteralOutOfRange {
                        line: line_no,
                        literal: lit,
                        n: nv,
                    });
                }
                if current.is_empty() {
                    clause_line = line_no;
                }
                current.push(Literal::from_dimacs(lit).expect("nonzero"));
            }
        }
        let n = n.ok_or(CnfError::MissingHeader)?;
        if !current.is_empty() {
            return Err(CnfError::UnterminatedClause { line: clause_line });
        }
        Formula::new(n, clauses)
    }

    /// Canonical DIMACS text: optional comment lines, header, one sorted
    /// clause per line.
    pub fn to_dimacs(&self, comments: &[&str]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("c ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&format!("p cnf {} {}\n", self.n, self.clauses.len()));
        for c in &self.clauses {
            out.push_str(&c.to_dimacs_line());
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula(n={}, {:?})", self.n, self.clauses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: u32, cls: &[&[i64]]) -> Formula {
        Formula::new(n, cls.iter().map(|c| Clause::from_dimacs(c))).unwrap()
    }

    fn a(v: &[Var]) -> Assignment {
        Assignment::new(v.iter().copied())
    }

    #[test]
    fn parse_examples() {
        let g = Formula::parse_dimacs("p cnf 3 1\n1 2 3 0").unwrap();
        assert_eq!(g, f(3, &[&[1, 2, 3]]));
        let g = Formula::parse_dimacs("p cnf 2 1\n1 -2 0").unwrap();
        assert_eq!(g, f(2, &[&[1, -2]]));
        assert_eq!(
            Formula::parse_dimacs("p cnf 2 1\n3 0"),
            Err(CnfError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                n: 2
            })
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            Formula::parse_dimacs("c hi\np cnf x 1\n"),
            Err(CnfError::MalformedHeader { line: 2 })
        );
        assert_eq!(
            Formula::parse_dimacs("p cnf 3 2\n1 2 0\n\n-1 3"),
            Err(CnfError::UnterminatedClause { line: 4 })
        );
        assert_eq!(
            Formula::parse_dimacs("p cnf 3 1\n1 -1 2 0"),
            Err(CnfError::Tautology { line: 2, var: 1 })
        );
        assert_eq!(Formula::parse_dimacs("1 2 0"), Err(CnfError::MissingHeader));
        assert!(matches!(
            Formula::parse_dimacs("p cnf 3 1\n1 z 0"),
            Err(CnfError::InvalidToken { line: 2, .. })
        ));
    }

    #[test]
    fn parse_accepts_wide_clauses_and_multiline() {
        let g = Formula::parse_dimacs("p cnf 5 1\n1 2\n3 4 5 0\n").unwrap();
        assert_eq!(g.max_width(), 5);
    }

    #[test]
    fn dimacs_output_is_canonical() {
        let g = Formula::parse_dimacs("p cnf 3 3\n3 -1 0\n2 1 0\n-1 3 0\n").unwrap();
        assert_eq!(g.to_dimacs(&[]), "p cnf 3 2\n1 2 0\n-1 3 0\n");
        assert_eq!(Formula::parse_dimacs(&g.to_dimacs(&["x"])).unwrap(), g);
    }

    #[test]
    fn closure_examples() {
        assert_eq!(
            f(3, &[&[1, 2, 3]]).negation_closure(),
            f(3, &[&[1, 2, 3], &[-1, -2, -3]])
        );
        assert_eq!(
            f(2, &[&[1, -2]]).negation_closure(),
            f(2, &[&[1, -2], &[-1, 2]])
        );
        let closed = f(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        assert!(closed.is_negation_closed());
        assert_eq!(closed.negation_closure(), closed);
        assert!(!f(3, &[&[1, 2, 3]]).is_negation_closed());
    }

    #[test]
    fn simplify_examples() {
        assert!(f(3, &[&[1, 2, 3]]).simplify(&a(&[1])).is_empty());
        assert_eq!(f(2, &[&[-1, 2]]).simplify(&a(&[1])), f(2, &[&[2]]));
        let g = f(1, &[&[-1]]).simplify(&a(&[1]));
        assert!(g.is_falsified());
        assert_eq!(g.num_vars(), 1);
    }

    #[test]
    fn falsified_examples() {
        assert!(!f(1, &[]).is_falsified());
        assert!(Formula::new(1, [Clause::empty()]).unwrap().is_falsified());
        assert!(!f(1, &[&[1]]).is_falsified());
    }

    #[test]
    fn live_clause_examples() {
        assert!(f(3, &[&[1, 2, 3]]).live_clauses(&a(&[1])).is_empty());
        assert_eq!(
            f(3, &[&[-1, 2, 3]]).live_clauses(&a(&[1])),
            vec![Clause::from_dimacs(&[-1, 2, 3])]
        );
        let g = f(3, &[&[1, 2, 3], &[-1, 2]]);
        assert_eq!(g.live_clauses(&a(&[])), g.clauses().to_vec());
    }

    #[test]
    fn nae_examples() {
        let g = f(3, &[&[1, 2, 3]]);
        assert!(g.nae_check(&a(&[1])));
        assert!(!g.nae_check(&a(&[1, 2, 3])));
        assert!(!g.nae_check(&a(&[])));
        assert!(f(3, &[]).nae_check(&a(&[2])));
    }

    #[test]
    fn assignment_line_forms() {
        let s = a(&[2, 5]);
        assert_eq!(s.to_line(), "2 5");
        assert_eq!(s.to_bitstring(5), "01001");
        assert_eq!(Assignment::parse_line("2 5", 5).unwrap(), s);
        assert_eq!(Assignment::parse_line("01001", 5).unwrap(), s);
        assert_eq!(Assignment::parse_line("", 5).unwrap(), a(&[]));
        assert!(Assignment::parse_line("6", 5).is_err());
    }
}
