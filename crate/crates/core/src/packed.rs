//! Bitmask view of a formula used by the search hot path.

use crate::cnf::Formula;
use crate::varset::VarSet;

/// One clause as positive/negative variable masks, aligned with the
/// canonical clause order of the source [`Formula`].
#[derive(Clone, Debug)]
pub(crate) struct PackedFormula {
    pub pos: Vec<VarSet>,
    pub neg: Vec<VarSet>,
}

/// Everything a node needs to know about `F/v` from one pass over the
/// clauses.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NodeScan {
    /// `F/v` contains the empty clause.
    pub falsified: bool,
    /// Variables `x` with the unit clause `¬x` in `F/v`.
    pub unit_neg: VarSet,
    /// Canonically first clause whose simplification is positive.
    pub best_positive: Option<usize>,
    /// Some clause is not yet satisfied.
    pub any_open: bool,
}

impl PackedFormula {
    pub fn new(f: &Formula) -> Self {
        debug_assert!(f.fits_engine());
        let (pos, neg) = f.clauses().iter().map(|c| c.masks()).unzip();
        PackedFormula { pos, neg }
    }

    pub fn is_transversal(&self, ones: VarSet) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .all(|(&p, &n)| p.intersects(ones) || !n.is_subset(ones))
    }

    pub fn scan(&self, ones: VarSet) -> NodeScan {
        let mut scan = NodeScan {
            falsified: false,
            unit_neg: VarSet::EMPTY,
            best_positive: None,
            any_open: false,
        };
        let mut best_mask = VarSet::EMPTY;
        for (i, (&p, &n)) in self.pos.iter().zip(&self.neg).enumerate() {
            if p.intersects(ones) {
                continue;
            }
            scan.any_open = true;
            let rest_neg = n - ones;
            if rest_neg.is_empty() {
                if p.is_empty() {
                    scan.falsified = true;
                } else if scan.best_positive.is_none() || positive_before(p, best_mask) {
                    scan.best_positive = Some(i);
                    best_mask = p;
                }
            } else if p.is_empty() && rest_neg.len() == 1 {
                scan.unit_neg |= rest_neg;
            }
        }
        scan
    }
}

/// Canonical order on positive simplifications: fewer variables first,
/// then lexicographic on the sorted variable lists.
pub(crate) fn positive_before(a: VarSet, b: VarSet) -> bool {
    if a.len() != b.len() {
        return a.len() < b.len();
    }
    let diff = a.bits() ^ b.bits();
    if diff == 0 {
        return false;
    }
    // The smallest variable in exactly one of the sets decides.
    a.bits() & (diff & diff.wrapping_neg()) != 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;

    #[test]
    fn canonical_positive_order() {
        let s = |v: &[u32]| VarSet::from_vars(v.iter().copied());
        assert!(positive_before(s(&[5]), s(&[1, 2])));
        assert!(positive_before(s(&[1, 4, 9]), s(&[1, 5, 6])));
        assert!(!positive_before(s(&[1, 5, 6]), s(&[1, 4, 9])));
        assert!(!positive_before(s(&[2, 3]), s(&[2, 3])));
    }

    #[test]
    fn scan_reports_units_and_falsification() {
        let f = Formula::new(
            4,
            [
                Clause::from_dimacs(&[-1, -2]),
                Clause::from_dimacs(&[-1, 3]),
                Clause::from_dimacs(&[2, 3, 4]),
            ],
        )
        .unwrap();
        let p = PackedFormula::new(&f);
        let s = p.scan(VarSet::from_vars([1]));
        assert!(!s.falsified);
        assert_eq!(s.unit_neg.to_vec(), vec![2]);
        assert_eq!(s.best_positive, Some(1)); // (x3) after simplification
        let s = p.scan(VarSet::from_vars([1, 2]));
        assert!(s.falsified);
    }
}
