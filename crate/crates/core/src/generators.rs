//! Instance families: the extremal block construction, random
//! negation-closed formulas, and the k-SAT to (k+1)-NAE-SAT reduction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, Formula, Literal, Var};
use crate::error::GenError;

/// Blocks of `2k−2` variables, each carrying every positive `k`-clause
/// over its block.
pub fn maj(n: u32, k: u32) -> Result<Formula, GenError> {
    if k < 2 {
        return Err(GenError::BadParameter(format!(
            "k = {k} must be at least 2"
        )));
    }
    let block = 2 * k - 2;
    if !n.is_multiple_of(block) {
        return Err(GenError::Divisibility { n, block });
    }
    let mut clauses = Vec::new();
    for b in 0..n / block {
        let vars: Vec<Var> = (1..=block).map(|i| b * block + i).collect();
        for_each_subset(&vars, k as usize, &mut |s| {
            clauses.push(Clause::monotone(s.iter().copied()))
        });
    }
    Ok(Formula::new(n, clauses).expect("block variables are in range"))
}

fn for_each_subset(items: &[Var], k: usize, f: &mut dyn FnMut(&[Var])) {
    fn go(items: &[Var], k: usize, start: usize, cur: &mut Vec<Var>, f: &mut dyn FnMut(&[Var])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, k, 0, &mut Vec::with_capacity(k), f);
}

fn triples(n: u32) -> Vec<[Var; 3]> {
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// `m` distinct monotone triples over `n` variables, closed under
/// negation.
pub fn random_negation_closed(n: u32, m: usize, seed: u64) -> Result<Formula, GenError> {
    let all = triples(n);
    if m > all.len() {
        return Err(GenError::BadParameter(format!(
            "{m} triples requested but only {} exist over {n} variables",
            all.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = all
        .choose_multiple(&mut rng, m)
        .map(|t| Clause::monotone(t.iter().copied()));
    Ok(Formula::new(n, picked)
        .expect("triples are in range")
        .negation_closure())
}

fn random_clause(rng: &mut ChaCha8Rng, n: u32, width: usize) -> Clause {
    let vars: Vec<Var> = (1..=n).collect();
    let lits = vars.choose_multiple(rng, width).map(|&v| {
        if rng.gen_bool(0.5) {
            Literal::positive(v)
        } else {
            Literal::negative(v)
        }
    });
    Clause::new(lits.collect::<Vec<_>>()).expect("distinct variables")
}

/// `m` random clauses with independent signs, widths 3 (three in four)
/// or 2, closed under negation. Duplicates collapse, so the result may
/// hold fewer than `2m` clauses.
pub fn random_mixed_closed(n: u32, m: usize, seed: u64) -> Result<Formula, GenError> {
    if n < 3 {
        return Err(GenError::BadParameter(format!("n = {n} is below 3")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<Clause> = (0..m)
        .map(|_| {
            let width = if rng.gen_ratio(1, 4) { 2 } else { 3 };
            random_clause(&mut rng, n, width)
        })
        .collect();
    Ok(Formula::new(n, clauses)
        .expect("clauses are in range")
        .negation_closure())
}

/// `m` random width-`k` clauses with independent signs (not closed).
pub fn random_ksat(n: u32, k: usize, m: usize, seed: u64) -> Result<Formula, GenError> {
    if k == 0 || k > n as usize {
        return Err(GenError::BadParameter(format!(
            "width {k} over {n} variables"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<Clause> = (0..m).map(|_| random_clause(&mut rng, n, k)).collect();
    Ok(Formula::new(n, clauses).expect("clauses are in range"))
}

/// Adds a fresh variable `z = x_{n+1}` to every clause. `f` is satisfiable
/// iff the result has an NAE solution.
pub fn ksat_to_naesat(f: &Formula) -> Formula {
    let z = f.num_vars() + 1;
    let clauses = f.clauses().iter().map(|c| {
        let mut lits = c.literals().to_vec();
        lits.push(Literal::positive(z));
        Clause::new(lits).expect("z is fresh")
    });
    Formula::new(z, clauses).expect("clauses are in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenFamily {
    Maj,
    RandomClosed,
    RandomMixed,
    /// A random `k`-CNF passed through [`ksat_to_naesat`].
    Reduction,
}

/// Everything needed to regenerate an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: GenFamily,
    pub n: u32,
    pub k: u32,
    pub m: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Formula, GenError> {
        match self.family {
            GenFamily::Maj => maj(self.n, self.k),
            GenFamily::RandomClosed => random_negation_closed(self.n, self.m, self.seed),
            GenFamily::RandomMixed => random_mixed_closed(self.n, self.m, self.seed),
            GenFamily::Reduction => {
                random_ksat(self.n, self.k as usize, self.m, self.seed).map(|f| ksat_to_naesat(&f))
            }
        }
    }

    /// A single-line record for a DIMACS comment.
    pub fn comment(&self) -> String {
        format!(
            "genspec {}",
            serde_json::to_string(self).expect("plain struct serializes")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maj4_clauses() {
        let f = maj(4, 3).unwrap();
        let got: Vec<Vec<i64>> = f
            .clauses()
            .iter()
            .map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect())
            .collect();
        assert_eq!(
            got,
            vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]
        );
    }

    #[test]
    fn maj8_blocks() {
        let f = maj(8, 3).unwrap();
        assert_eq!(f.len(), 8);
        assert!(f.clauses()[4..].iter().all(|c| c.vars().all(|v| v > 4)));
    }

    #[test]
    fn maj_divisibility() {
        assert_eq!(maj(6, 3), Err(GenError::Divisibility { n: 6, block: 4 }));
        assert!(maj(4, 1).is_err());
    }

    #[test]
    fn random_closed_is_reproducible() {
        let a = random_negation_closed(6, 4, 1).unwrap();
        let b = random_negation_closed(6, 4, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.is_negation_closed());
        assert_eq!(a.negation_closure(), a);
        assert_eq!(a.len(), 8);
        assert!(random_negation_closed(4, 5, 0).is_err());
    }

    #[test]
    fn mixed_is_closed() {
        for seed in 0..20 {
            let f = random_mixed_closed(7, 6, seed).unwrap();
            assert!(f.is_negation_closed());
            assert!(f.max_width() <= 3);
        }
    }

    #[test]
    fn reduction_examples() {
        let f = Formula::new(2, [Clause::from_dimacs(&[1, 2])]).unwrap();
        let g = ksat_to_naesat(&f);
        assert_eq!(g.num_vars(), 3);
        assert_eq!(g.clauses(), &[Clause::from_dimacs(&[1, 2, 3])]);
        let e = ksat_to_naesat(&Formula::new(2, []).unwrap());
        assert!(e.is_empty());
    }

    #[test]
    fn genspec_roundtrip() {
        let s = GenSpec {
            family: GenFamily::Maj,
            n: 8,
            k: 3,
            m: 0,
            seed: 0,
        };
        assert_eq!(s.generate().unwrap(), maj(8, 3).unwrap());
        let json = s.comment();
        let back: GenSpec = serde_json::from_str(json.trim_start_matches("genspec ")).unwrap();
        assert_eq!(back, s);
    }
}
