//! Pseudomaximum collections of pairwise variable-disjoint clauses.
//!
//! A collection starts as a greedy maximal packing. Whenever the search
//! produces a concrete larger packing (a reset witness), the collection is
//! replaced by it and re-extended greedily. Each reset grows the collection
//! by at least one clause, so a collection over `n` variables resets at most
//! `n / 3` times.

use serde::Serialize;

use crate::cnf::{Clause, Var};
use crate::error::MatchingError;

/// Which stage of the clause-selection rule a collection belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StageTag {
    /// Disjoint monotone width-3 clauses chosen at the root.
    C0,
    /// Singly marked clauses chosen below a node at the end of the disjoint stage.
    C1,
    /// Disjoint clauses feeding the second controlled sub-stage.
    CR,
}

impl std::fmt::Display for StageTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StageTag::C0 => "C0",
            StageTag::C1 => "C1",
            StageTag::CR => "CR",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResetEvent {
    pub stage: StageTag,
    pub old_size: usize,
    pub new_size: usize,
    /// Clauses that entered the collection.
    #[serde(serialize_with = "ser_clauses")]
    pub witness: Vec<Clause>,
}

fn ser_clauses<S: serde::Serializer>(cls: &[Clause], s: S) -> Result<S::Ok, S::Error> {
    let v: Vec<Vec<i64>> = cls
        .iter()
        .map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect())
        .collect();
    v.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointCollection {
    members: Vec<Clause>,
    tag: StageTag,
    reset_count: u32,
    history: Vec<ResetEvent>,
}

/// Sort key: sorted variable list first, then signs.
fn canonical_key(c: &Clause) -> (Vec<Var>, &Clause) {
    (c.vars().collect(), c)
}

/// Picks clauses in canonical order, keeping each one that is disjoint from
/// everything picked so far. The result is maximal among `candidates`.
pub fn greedy_maximal(candidates: &[Clause], tag: StageTag) -> DisjointCollection {
    let mut coll = DisjointCollection {
        members: Vec::new(),
        tag,
        reset_count: 0,
        history: Vec::new(),
    };
    coll.extend_greedy(candidates);
    coll
}

impl DisjointCollection {
    pub fn members(&self) -> &[Clause] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn tag(&self) -> StageTag {
        self.tag
    }

    pub fn reset_count(&self) -> u32 {
        self.reset_count
    }

    pub fn history(&self) -> &[ResetEvent] {
        &self.history
    }

    pub fn is_pairwise_disjoint(&self) -> bool {
        pairwise_disjoint(&self.members)
    }

    /// No candidate is disjoint from every member.
    pub fn is_maximal_in(&self, candidates: &[Clause]) -> bool {
        candidates
            .iter()
            .all(|c| self.members.iter().any(|m| m.shares_var(c)))
    }

    /// Adds candidates in canonical order while they stay disjoint.
    pub fn extend_greedy(&mut self, candidates: &[Clause]) {
        let mut sorted: Vec<&Clause> = candidates.iter().collect();
        sorted.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
        for c in sorted {
            if self.members.iter().all(|m| !m.shares_var(c)) {
                self.members.push(c.clone());
            }
        }
    }

    /// Replaces `removed` by `added` when that strictly grows the
    /// collection. The kept members stay in order; the added clauses follow
    /// in canonical order.
    pub fn attempt_reset(
        &mut self,
        removed: &[Clause],
        added: &[Clause],
    ) -> Result<Option<ResetEvent>, MatchingError> {
        if removed.iter().any(|r| !self.members.contains(r)) {
            return Err(MatchingError::NotAMember);
        }
        let kept: Vec<Clause> = self
            .members
            .iter()
            .filter(|m| !removed.contains(m))
            .cloned()
            .collect();
        let mut incoming = added.to_vec();
        incoming.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
        incoming.dedup();
        let all: Vec<Clause> = kept.iter().chain(incoming.iter()).cloned().collect();
        if !pairwise_disjoint(&all) {
            return Err(MatchingError::NotDisjoint);
        }
        if all.len() <= self.members.len() {
            return Ok(None);
        }
        let event = ResetEvent {
            stage: self.tag,
            old_size: self.members.len(),
            new_size: all.len(),
            witness: incoming,
        };
        self.members = all;
        self.reset_count += 1;
        self.history.push(event.clone());
        Ok(Some(event))
    }
}

pub fn pairwise_disjoint(clauses: &[Clause]) -> bool {
    clauses
        .iter()
        .enumerate()
        .all(|(i, a)| clauses[i + 1..].iter().all(|b| !a.shares_var(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: &[Var]) -> Clause {
        Clause::monotone(v.iter().copied())
    }

    #[test]
    fn greedy_examples() {
        let c = greedy_maximal(&[m(&[1, 2, 3])], StageTag::C0);
        assert_eq!(c.members(), &[m(&[1, 2, 3])]);
        let c = greedy_maximal(&[m(&[1, 4, 5]), m(&[1, 2, 3])], StageTag::C0);
        assert_eq!(c.members(), &[m(&[1, 2, 3])]);
        let c = greedy_maximal(&[m(&[4, 5, 6]), m(&[1, 2, 3])], StageTag::C0);
        assert_eq!(c.len(), 2);
        assert!(c.is_pairwise_disjoint());
    }

    #[test]
    fn reset_examples() {
        let mut c = greedy_maximal(&[m(&[1, 2, 3])], StageTag::C0);
        let ev = c
            .attempt_reset(&[m(&[1, 2, 3])], &[m(&[1, 4, 5]), m(&[2, 6, 7])])
            .unwrap()
            .unwrap();
        assert_eq!((ev.old_size, ev.new_size), (1, 2));
        assert_eq!(c.reset_count(), 1);
        assert_eq!(c.len(), 2);

        let before = c.clone();
        assert_eq!(c.attempt_reset(&[], &[]).unwrap(), None);
        assert_eq!(
            c.attempt_reset(&[m(&[1, 4, 5])], &[m(&[1, 8, 9])]).unwrap(),
            None
        );
        assert_eq!(c, before);
    }

    #[test]
    fn reset_rejects_bad_witnesses() {
        let mut c = greedy_maximal(&[m(&[1, 2, 3])], StageTag::C1);
        assert_eq!(
            c.attempt_reset(&[], &[m(&[3, 4, 5])]),
            Err(MatchingError::NotDisjoint)
        );
        assert_eq!(
            c.attempt_reset(&[m(&[7, 8, 9])], &[]),
            Err(MatchingError::NotAMember)
        );
    }
}
