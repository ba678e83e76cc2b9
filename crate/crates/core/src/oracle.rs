//! Brute-force ground truth by scanning all `2ⁿ` assignments.
//!
//! Deliberately shares nothing with the search beyond the formula types:
//! clauses are re-encoded as `u32` masks here.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cnf::{Assignment, Formula, Var};
use crate::error::OracleError;

pub const ORACLE_MAX_VARS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub n: u32,
    /// Minimum transversal size; `None` when the formula is unsatisfiable.
    pub tau: Option<usize>,
    /// All minimum-size transversals, ascending.
    pub gamma: Vec<Assignment>,
    pub gamma_count: usize,
    pub t: Option<usize>,
    /// Satisfying assignments of weight exactly `t`, ascending.
    pub weight_t_solutions: Vec<Assignment>,
    pub min_sat_weight: Option<usize>,
}

struct Masks {
    pos: Vec<u32>,
    neg: Vec<u32>,
}

impl Masks {
    fn new(f: &Formula) -> Self {
        let mut pos = Vec::with_capacity(f.len());
        let mut neg = Vec::with_capacity(f.len());
        for c in f.clauses() {
            let (mut p, mut q) = (0u32, 0u32);
            for l in c.literals() {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    p |= bit;
                } else {
                    q |= bit;
                }
            }
            pos.push(p);
            neg.push(q);
        }
        Masks { pos, neg }
    }

    fn satisfies(&self, x: u32) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .all(|(&p, &q)| x & p != 0 || !x & q != 0)
    }

    /// Every clause has a true literal and a false literal.
    fn nae(&self, x: u32) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .all(|(&p, &q)| (x & p != 0 || !x & q != 0) && (!x & p != 0 || x & q != 0))
    }
}

fn to_assignment(x: u32) -> Assignment {
    Assignment::new((0..32).filter(|i| x >> i & 1 == 1).map(|i| i as Var + 1))
}

fn check_size(f: &Formula) -> Result<(), OracleError> {
    if f.num_vars() > ORACLE_MAX_VARS {
        return Err(OracleError::TooLarge {
            n: f.num_vars(),
            max: ORACLE_MAX_VARS,
        });
    }
    Ok(())
}

const CHUNK: u64 = 1 << 14;

fn chunks(n: u32) -> impl ParallelIterator<Item = std::ops::Range<u64>> {
    let total = 1u64 << n;
    (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(move |c| c * CHUNK..((c + 1) * CHUNK).min(total))
}

/// Ascending masks of weight `w` over `n` bits.
fn masks_of_weight(n: u32, w: u32) -> Vec<u32> {
    if w > n {
        return Vec::new();
    }
    if w == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut x: u64 = (1u64 << w) - 1;
    while x < limit {
        out.push(x as u32);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Exact `τ`, `Γ` and, if `t` is given, the weight-`t` satisfying set.
pub fn brute_force(f: &Formula, t: Option<usize>) -> Result<OracleReport, OracleError> {
    check_size(f)?;
    let n = f.num_vars();
    let m = Masks::new(f);
    let min = chunks(n)
        .filter_map(|r| {
            r.filter(|&x| m.satisfies(x as u32))
                .map(|x| x.count_ones())
                .min()
        })
        .min();
    let collect = |w: u32| -> Vec<Assignment> {
        masks_of_weight(n, w)
            .into_par_iter()
            .filter(|&x| m.satisfies(x))
            .map(to_assignment)
            .collect()
    };
    let gamma = min.map(collect).unwrap_or_default();
    let weight_t_solutions = match t {
        Some(t) if Some(t as u32) == min => gamma.clone(),
        Some(t) if t <= n as usize => collect(t as u32),
        _ => Vec::new(),
    };
    let tau = min.map(|w| w as usize);
    Ok(OracleReport {
        n,
        tau,
        gamma_count: gamma.len(),
        gamma,
        t,
        weight_t_solutions,
        min_sat_weight: tau,
    })
}

/// Weight-`t` assignments that NAE-satisfy `f` directly, without building
/// the negation closure.
pub fn nae_solutions_direct(f: &Formula, t: usize) -> Result<Vec<Assignment>, OracleError> {
    check_size(f)?;
    let n = f.num_vars();
    if t > n as usize {
        return Ok(Vec::new());
    }
    let m = Masks::new(f);
    Ok(masks_of_weight(n, t as u32)
        .into_par_iter()
        .filter(|&x| m.nae(x))
        .map(to_assignment)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub expected: usize,
    pub emitted: usize,
    pub duplicates: Vec<Assignment>,
    pub missing: Vec<Assignment>,
    pub unexpected: Vec<Assignment>,
    pub first_mismatch: Option<String>,
}

/// Compares an emitted solution list against the oracle's weight-`t` set:
/// same members, each exactly once.
pub fn verify_enumeration(
    f: &Formula,
    t: usize,
    emitted: &[Assignment],
) -> Result<VerifyReport, OracleError> {
    let truth: BTreeSet<Assignment> = brute_force(f, Some(t))?
        .weight_t_solutions
        .into_iter()
        .collect();
    Ok(compare(&truth, emitted))
}

/// The same check against an explicit expected set.
pub fn compare(expected: &BTreeSet<Assignment>, emitted: &[Assignment]) -> VerifyReport {
    let mut counts: BTreeMap<&Assignment, usize> = BTreeMap::new();
    let mut first_mismatch = None;
    for a in emitted {
        let c = counts.entry(a).or_default();
        *c += 1;
        if first_mismatch.is_none() {
            if *c == 2 {
                first_mismatch = Some(format!("duplicate: {}", a.to_line()));
            } else if !expected.contains(a) {
                first_mismatch = Some(format!("unexpected: {}", a.to_line()));
            }
        }
    }
    let duplicates: Vec<Assignment> = counts
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(a, _)| (*a).clone())
        .collect();
    let unexpected: Vec<Assignment> = counts
        .keys()
        .filter(|a| !expected.contains(a))
        .map(|a| (*a).clone())
        .collect();
    let missing: Vec<Assignment> = expected
        .iter()
        .filter(|a| !counts.contains_key(a))
        .cloned()
        .collect();
    if first_mismatch.is_none() {
        first_mismatch = missing.first().map(|a| format!("missing: {}", a.to_line()));
    }
    VerifyReport {
        pass: duplicates.is_empty() && missing.is_empty() && unexpected.is_empty(),
        expected: expected.len(),
        emitted: emitted.len(),
        duplicates,
        missing,
        unexpected,
        first_mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;

    #[test]
    fn weight_masks() {
        assert_eq!(masks_of_weight(4, 2), vec![3, 5, 6, 9, 10, 12]);
        assert_eq!(masks_of_weight(3, 0), vec![0]);
        assert_eq!(masks_of_weight(3, 3), vec![7]);
        assert!(masks_of_weight(3, 4).is_empty());
        assert_eq!(masks_of_weight(24, 24), vec![(1 << 24) - 1]);
    }

    #[test]
    fn empty_formula() {
        let f = Formula::new(3, []).unwrap();
        let r = brute_force(&f, None).unwrap();
        assert_eq!(r.tau, Some(0));
        assert_eq!(r.gamma, vec![Assignment::default()]);
    }

    #[test]
    fn unsatisfiable_formula() {
        let f = Formula::new(1, [Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]).unwrap();
        let r = brute_force(&f, Some(1)).unwrap();
        assert_eq!(r.tau, None);
        assert!(r.weight_t_solutions.is_empty());
    }

    #[test]
    fn refuses_large() {
        let f = Formula::new(25, []).unwrap();
        assert!(brute_force(&f, None).is_err());
    }

    #[test]
    fn nae_direct_examples() {
        let f = Formula::new(1, []).unwrap();
        assert_eq!(
            nae_solutions_direct(&f, 1).unwrap(),
            vec![Assignment::new([1])]
        );
    }

    #[test]
    fn compare_flags_faults() {
        let expected: BTreeSet<Assignment> = [Assignment::new([1]), Assignment::new([2])]
            .into_iter()
            .collect();
        let ok = compare(&expected, &[Assignment::new([2]), Assignment::new([1])]);
        assert!(ok.pass);
        let dup = compare(
            &expected,
            &[
                Assignment::new([1]),
                Assignment::new([1]),
                Assignment::new([2]),
            ],
        );
        assert!(!dup.pass);
        assert_eq!(dup.first_mismatch.as_deref(), Some("duplicate: 1"));
        let miss = compare(&expected, &[Assignment::new([1])]);
        assert_eq!(miss.missing, vec![Assignment::new([2])]);
        assert_eq!(miss.first_mismatch.as_deref(), Some("missing: 2"));
    }
}
