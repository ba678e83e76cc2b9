//! Pruned depth-first enumeration over transversal trees.
//!
//! Children are visited in a per-node order; an edge whose label already
//! appears on a child edge to the left of the current path is skipped
//! (that variable is 0 in every leaf below). Every minimum-weight
//! transversal is then reached at exactly one leaf.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::Rational;
use crate::cnf::{Assignment, Clause, Formula, Var};
use crate::engine::{Engine, Expansion, Interrupt, Link, NodeExtra, Perm, Walker};
use crate::error::SearchError;
use crate::matching::{ResetEvent, StageTag};
use crate::packed::PackedFormula;
use crate::selection::{Route, StageProfile};
use crate::tree::{EdgeInfo, LeafKind, MarkingSet, Tree, TreeNode};
use crate::varset::{VarSet, MAX_ENGINE_VARS};

pub use crate::engine::PathState;

/// How children are ordered at each node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
pub enum OrderingSource {
    /// Ascending variable order everywhere.
    Fixed,
    /// A uniformly random permutation per node, drawn from a ChaCha8
    /// stream seeded by the root seed and the node's label path. Subtree
    /// exploration order never perturbs sibling draws.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub t: usize,
    pub ordering: OrderingSource,
    /// Worker threads for level-`t0` subtrees; 1 runs sequentially.
    pub parallel: usize,
}

impl SearchConfig {
    pub fn new(t: usize, ordering: OrderingSource) -> Self {
        SearchConfig {
            t,
            ordering,
            parallel: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResetCounts {
    pub c0: u32,
    pub c1: u32,
    pub cr: u32,
}

/// Controlled-stage profiles seen during a search, grouped by value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileSummary {
    pub t0: usize,
    pub t1: usize,
    pub m_b: usize,
    pub m_r: usize,
    pub m_i: usize,
    pub m_r_prime: usize,
    pub delta_quarters: i64,
    pub i_u0: usize,
    /// Level-`t0` nodes with this profile.
    pub nodes: u64,
    /// How often each κ₂ length occurred below those nodes.
    pub ell_histogram: BTreeMap<usize, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_visited: u64,
    /// Surviving viable leaves, i.e. `L(r)` for this ordering.
    pub leaves_visited: u64,
    pub falsified_leaves: u64,
    pub superfluous_skips: u64,
    pub solutions_emitted: u64,
    /// Work thrown away by restarts after resets.
    pub discarded_nodes: u64,
    pub resets: ResetCounts,
    pub reset_events: Vec<ResetEvent>,
    /// Structural claims that failed without a reset witness.
    pub claim_violations: u64,
    pub claim_log: Vec<String>,
    pub t0: usize,
    pub route: Route,
    pub profiles: Vec<ProfileSummary>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counters {
    nodes: u64,
    leaves: u64,
    falsified: u64,
    superfluous: u64,
    emitted: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Counters) {
        self.nodes += o.nodes;
        self.leaves += o.leaves;
        self.falsified += o.falsified;
        self.superfluous += o.superfluous;
        self.emitted += o.emitted;
    }
}

struct DfsWalker {
    seeded: bool,
    collect: bool,
    c: Counters,
    discarded: u64,
    solutions: Vec<VarSet>,
}

impl DfsWalker {
    fn new(ordering: OrderingSource, collect: bool) -> Self {
        DfsWalker {
            seeded: matches!(ordering, OrderingSource::Seeded(_)),
            collect,
            c: Counters::default(),
            discarded: 0,
            solutions: Vec::new(),
        }
    }
}

const IDENTITY: [u8; 3] = [0, 1, 2];

impl Walker for DfsWalker {
    type Checkpoint = (Counters, usize);

    fn prunes(&self) -> bool {
        true
    }

    fn order(&mut self, st: &PathState, k: usize) -> Perm {
        let mut p = IDENTITY;
        if self.seeded && k > 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(st.node_hash());
            p[..k].shuffle(&mut rng);
        }
        (p, k)
    }

    fn internal(&mut self, _: &PathState, _: Option<&Link>, _: &Expansion, _: &NodeExtra) -> usize {
        self.c.nodes += 1;
        0
    }

    fn leaf(
        &mut self,
        _: &PathState,
        _: usize,
        _: Option<&Link>,
        kind: LeafKind,
        ones: VarSet,
        transversal: bool,
    ) {
        self.c.nodes += 1;
        match kind {
            LeafKind::Falsified => self.c.falsified += 1,
            LeafKind::Viable => {
                self.c.leaves += 1;
                if transversal {
                    self.c.emitted += 1;
                    if self.collect {
                        self.solutions.push(ones);
                    }
                }
            }
            LeafKind::None => {}
        }
    }

    fn superfluous(&mut self) {
        self.c.superfluous += 1;
    }

    fn checkpoint(&self) -> Self::Checkpoint {
        (self.c, self.solutions.len())
    }

    fn rollback(&mut self, cp: Self::Checkpoint) {
        self.discarded += self.c.nodes - cp.0.nodes;
        self.c = cp.0;
        self.solutions.truncate(cp.1);
    }
}

/// Rejects inputs the engine cannot handle.
pub fn validate(f: &Formula, t: usize) -> Result<(), SearchError> {
    if f.num_vars() > MAX_ENGINE_VARS {
        return Err(SearchError::TooManyVariables {
            n: f.num_vars(),
            max: MAX_ENGINE_VARS,
        });
    }
    if f.max_width() > 3 {
        return Err(SearchError::WidthError {
            width: f.max_width(),
        });
    }
    if t > f.num_vars() as usize {
        return Err(SearchError::TargetTooLarge { t, n: f.num_vars() });
    }
    if !f.is_negation_closed() {
        return Err(SearchError::InputNotClosed);
    }
    Ok(())
}

struct Outcome {
    counters: Counters,
    discarded: u64,
    solutions: Vec<VarSet>,
    events: Vec<ResetEvent>,
    claim_count: u64,
    claims: Vec<String>,
    profiles: Vec<(VarSet, StageProfile, BTreeMap<usize, u64>)>,
    t0: usize,
    route: Route,
}

fn seed_of(o: OrderingSource) -> u64 {
    match o {
        OrderingSource::Fixed => 0,
        OrderingSource::Seeded(s) => s,
    }
}

fn drive(f: &Formula, cfg: &SearchConfig, collect: bool) -> Result<Outcome, SearchError> {
    validate(f, cfg.t)?;
    let packed = PackedFormula::new(f);
    let mut engine = Engine::new(f, &packed, cfg.t)?;
    let seed = seed_of(cfg.ordering);
    let pool = if cfg.parallel > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallel)
                .build()
                .map_err(|e| SearchError::Internal(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let mut discarded = 0u64;
    let mut head = DfsWalker::new(cfg.ordering, collect);
    let split = |e: &Engine| pool.is_some() && e.t0() > 0 && e.t0() < cfg.t;

    while let Some(pool) = pool.as_ref().filter(|_| split(&engine)) {
        head = DfsWalker::new(cfg.ordering, collect);
        engine.split_at = Some(engine.t0());
        engine.run(&mut head, seed)?;
        engine.split_at = None;
        let prefixes = std::mem::take(&mut engine.prefixes);
        let proto = engine.worker();
        let results: Vec<Result<(DfsWalker, Engine), Interrupt>> = pool.install(|| {
            prefixes
                .par_iter()
                .map(|p| {
                    let mut e = proto.worker();
                    let mut w = DfsWalker::new(cfg.ordering, collect);
                    e.run_prefix(&mut w, p).map(|()| (w, e))
                })
                .collect()
        });
        let mut interrupted = None;
        let mut done = Vec::with_capacity(results.len());
        for r in results {
            match r {
                Ok(x) => done.push(x),
                Err(i) => {
                    interrupted = Some(i);
                    break;
                }
            }
        }
        match interrupted {
            Some(Interrupt::Fail(e)) => return Err(e),
            Some(Interrupt::Reset(wit)) => {
                discarded += head.c.nodes + done.iter().map(|(w, _)| w.c.nodes).sum::<u64>();
                for (_, e) in &done {
                    engine.events.extend(e.events.iter().cloned());
                }
                engine.apply_global_reset(wit)?;
            }
            None => {
                let mut out = Outcome {
                    counters: head.c,
                    discarded: discarded + head.discarded,
                    solutions: head.solutions,
                    events: engine.events.clone(),
                    claim_count: engine.claim_count,
                    claims: engine.claims.clone(),
                    profiles: Vec::new(),
                    t0: engine.t0(),
                    route: engine.route(),
                };
                for (w, e) in done {
                    out.counters += w.c;
                    out.discarded += w.discarded;
                    out.solutions.extend(w.solutions);
                    out.events.extend(e.events);
                    out.claim_count += e.claim_count;
                    out.claims.extend(e.claims);
                    out.profiles
                        .extend(e.profiles.into_iter().map(|(k, r)| (k, r.profile, r.ell)));
                }
                return Ok(out);
            }
        }
    }

    engine.run(&mut head, seed)?;
    Ok(Outcome {
        counters: head.c,
        discarded: discarded + head.discarded,
        solutions: head.solutions,
        events: engine.events.clone(),
        claim_count: engine.claim_count,
        claims: engine.claims.clone(),
        profiles: engine
            .profiles
            .iter()
            .map(|(k, r)| (*k, r.profile.clone(), r.ell.clone()))
            .collect(),
        t0: engine.t0(),
        route: engine.route(),
    })
}

fn summarize(out: &Outcome) -> SearchStats {
    let mut resets = ResetCounts::default();
    for ev in &out.events {
        match ev.stage {
            StageTag::C0 => resets.c0 += 1,
            StageTag::C1 => resets.c1 += 1,
            StageTag::CR => resets.cr += 1,
        }
    }
    let mut groups: BTreeMap<(usize, usize, usize, usize, usize, usize), ProfileSummary> =
        BTreeMap::new();
    for (_, p, ell) in &out.profiles {
        let key = (p.t0, p.t1, p.m_b, p.m_r, p.m_r_prime, p.m_i);
        let g = groups.entry(key).or_insert_with(|| ProfileSummary {
            t0: p.t0,
            t1: p.t1,
            m_b: p.m_b,
            m_r: p.m_r,
            m_i: p.m_i,
            m_r_prime: p.m_r_prime,
            delta_quarters: p.delta_quarters,
            i_u0: p.i_u0,
            nodes: 0,
            ell_histogram: BTreeMap::new(),
        });
        g.nodes += 1;
        for (l, c) in ell {
            *g.ell_histogram.entry(*l).or_default() += c;
        }
    }
    SearchStats {
        nodes_visited: out.counters.nodes,
        leaves_visited: out.counters.leaves,
        falsified_leaves: out.counters.falsified,
        superfluous_skips: out.counters.superfluous,
        solutions_emitted: out.counters.emitted,
        discarded_nodes: out.discarded,
        resets,
        reset_events: out.events.clone(),
        claim_violations: out.claim_count,
        claim_log: out.claims.clone(),
        t0: out.t0,
        route: out.route,
        profiles: groups.into_values().collect(),
    }
}

/// Sends every weight-`t` satisfying assignment of the negation-closed
/// formula `f` to `sink`, each exactly once.
///
/// Solutions are released only after the search completes, since a reset
/// restarts part of the tree.
pub fn enumerate(
    f: &Formula,
    t: usize,
    ord: OrderingSource,
    sink: &mut dyn FnMut(&Assignment),
) -> Result<SearchStats, SearchError> {
    enumerate_with(f, &SearchConfig::new(t, ord), sink)
}

pub fn enumerate_with(
    f: &Formula,
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(&Assignment),
) -> Result<SearchStats, SearchError> {
    let out = drive(f, cfg, true)?;
    if cfg!(debug_assertions) && f.num_vars() <= 32 {
        let mut seen = HashSet::with_capacity(out.solutions.len());
        for s in &out.solutions {
            if !seen.insert(*s) {
                return Err(SearchError::Internal(format!(
                    "solution {:?} emitted twice",
                    s.to_vec()
                )));
            }
        }
    }
    for s in &out.solutions {
        sink(&Assignment::from_varset(*s));
    }
    Ok(summarize(&out))
}

/// Number of weight-`t` solutions, without storing them.
pub fn count(
    f: &Formula,
    t: usize,
    ord: OrderingSource,
) -> Result<(u64, SearchStats), SearchError> {
    count_with(f, &SearchConfig::new(t, ord))
}

pub fn count_with(f: &Formula, cfg: &SearchConfig) -> Result<(u64, SearchStats), SearchError> {
    let out = drive(f, cfg, false)?;
    let stats = summarize(&out);
    Ok((stats.solutions_emitted, stats))
}

/// The pruning test applied before an edge labeled `label` is traversed
/// from the current node of `path`.
pub fn superfluous(label: Var, path: &PathState) -> bool {
    path.is_superfluous(label)
}

/// Largest instance [`materialize`] accepts.
pub const MATERIALIZE_MAX_VARS: u32 = 24;

struct TreeBuilder {
    nodes: Vec<TreeNode>,
    profiles: Vec<(usize, StageProfile)>,
}

impl TreeBuilder {
    fn edge(st: &PathState, link: &Link) -> EdgeInfo {
        let markers = (0..128)
            .filter(|j| link.marks & (1u128 << j) != 0)
            .map(|j| st.frames[j].node)
            .collect();
        EdgeInfo {
            label: link.label,
            marking: MarkingSet::new(markers),
            falsifying: link.falsifying,
        }
    }

    fn add(&mut self, st: &PathState, link: Option<&Link>, mut node: TreeNode) -> usize {
        let id = self.nodes.len();
        node.id = id;
        if let Some(l) = link {
            node.parent = Some(l.parent);
            node.parent_edge = Some(Self::edge(st, l));
            self.nodes[l.parent].children.push(id);
        }
        self.nodes.push(node);
        id
    }
}

fn blank(depth: usize, ones: VarSet) -> TreeNode {
    TreeNode {
        id: 0,
        depth,
        parent: None,
        parent_edge: None,
        clause: None,
        children: Vec::new(),
        stage: None,
        leaf_kind: LeafKind::None,
        ones,
        transversal: false,
        heavy_budget: None,
        ell: None,
    }
}

impl Walker for TreeBuilder {
    type Checkpoint = usize;

    fn prunes(&self) -> bool {
        false
    }

    fn order(&mut self, _: &PathState, k: usize) -> Perm {
        (IDENTITY, k)
    }

    fn internal(
        &mut self,
        st: &PathState,
        link: Option<&Link>,
        exp: &Expansion,
        extra: &NodeExtra,
    ) -> usize {
        let mut node = blank(st.depth(), st.ones());
        node.clause = Some(Clause::monotone(exp.labels.iter()));
        node.stage = Some(exp.stage);
        node.heavy_budget = extra.heavy_budget;
        node.ell = extra.ell;
        let id = self.add(st, link, node);
        if let Some(p) = &extra.profile {
            self.profiles.push((id, p.clone()));
        }
        id
    }

    fn leaf(
        &mut self,
        st: &PathState,
        depth: usize,
        link: Option<&Link>,
        kind: LeafKind,
        ones: VarSet,
        transversal: bool,
    ) {
        let mut node = blank(depth, ones);
        node.leaf_kind = kind;
        node.transversal = transversal;
        self.add(st, link, node);
    }

    fn superfluous(&mut self) {}

    fn checkpoint(&self) -> usize {
        self.nodes.len()
    }

    fn rollback(&mut self, cp: usize) {
        self.nodes.truncate(cp);
        for n in &mut self.nodes {
            n.children.retain(|&c| c < cp);
        }
        self.profiles.retain(|(id, _)| *id < cp);
    }
}

/// Builds the whole transversal tree without pruning. Debug use only:
/// refused above [`MATERIALIZE_MAX_VARS`] variables.
pub fn materialize(f: &Formula, t: usize) -> Result<Tree, SearchError> {
    validate(f, t)?;
    if f.num_vars() > MATERIALIZE_MAX_VARS {
        return Err(SearchError::TooManyVariables {
            n: f.num_vars(),
            max: MATERIALIZE_MAX_VARS,
        });
    }
    let packed = PackedFormula::new(f);
    let mut engine = Engine::new(f, &packed, t)?;
    let mut b = TreeBuilder {
        nodes: Vec::new(),
        profiles: Vec::new(),
    };
    engine.run(&mut b, 0)?;
    Ok(Tree {
        nodes: b.nodes,
        n: f.num_vars(),
        t,
        t0: engine.t0(),
        route: engine.route(),
        resets: engine.events.clone(),
        claim_violations: engine.claims.clone(),
        profiles: b.profiles,
    })
}

/// Survival counts of one edge across all joint orderings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeSurvival {
    /// Id of the edge's head node in the materialized tree.
    pub child: usize,
    pub label: Var,
    pub marks: usize,
    pub falsifying: bool,
    /// Orderings in which the edge survives.
    pub survived: u64,
    /// Orderings in which the tail node survives.
    pub tail_survived: u64,
    /// Orderings in which both survive.
    pub both: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub orderings: u64,
    pub tree: Tree,
    /// Surviving viable leaves per ordering, as a histogram.
    pub leaf_histogram: BTreeMap<u64, u64>,
    /// Emitted solutions per ordering, as a histogram.
    pub solution_histogram: BTreeMap<u64, u64>,
    /// Exact average of `L(r)` over all joint orderings.
    pub mean_leaves: Rational,
    /// `Σ` over viable leaves of `∏ 2^{-|M(e)|}`.
    pub psi_paths: Rational,
    pub edges: Vec<EdgeSurvival>,
}

pub const DEFAULT_ORDERING_BUDGET: u64 = 1_000_000;

const PERMS2: [[u8; 3]; 2] = [[0, 1, 2], [1, 0, 2]];
const PERMS3: [[u8; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn perms(k: usize) -> &'static [[u8; 3]] {
    match k {
        0 | 1 => &PERMS2[..1],
        2 => &PERMS2,
        _ => &PERMS3,
    }
}

/// Runs the pruned search under every joint ordering of the children of
/// every node, on the materialized tree.
pub fn enumerate_all_orderings(
    f: &Formula,
    t: usize,
    budget: u64,
) -> Result<ExhaustiveReport, SearchError> {
    let tree = materialize(f, t)?;
    let branching: Vec<usize> = tree
        .nodes
        .iter()
        .filter(|n| n.children.len() > 1)
        .map(|n| n.id)
        .collect();
    let mut total: u128 = 1;
    let mut overflow = false;
    for &id in &branching {
        let k = perms(tree.node(id).children.len()).len() as u128;
        match total.checked_mul(k) {
            Some(v) => total = v,
            None => {
                overflow = true;
                break;
            }
        }
    }
    if overflow || total > u128::from(budget) {
        return Err(SearchError::BudgetExceeded {
            required: if overflow {
                "more than 2^128".into()
            } else {
                total.to_string()
            },
            budget,
        });
    }
    let total = total as u64;
    let mut slot = vec![usize::MAX; tree.nodes.len()];
    for (i, &id) in branching.iter().enumerate() {
        slot[id] = i;
    }
    let mut digits = vec![0usize; branching.len()];
    let mut edges: Vec<EdgeSurvival> = tree
        .nodes
        .iter()
        .filter_map(|n| {
            n.parent_edge.as_ref().map(|e| EdgeSurvival {
                child: n.id,
                label: e.label,
                marks: e.marking.len(),
                falsifying: e.falsifying,
                survived: 0,
                tail_survived: 0,
                both: 0,
            })
        })
        .collect();
    let mut edge_slot = vec![usize::MAX; tree.nodes.len()];
    for (i, e) in edges.iter().enumerate() {
        edge_slot[e.child] = i;
    }
    let mut leaf_histogram = BTreeMap::new();
    let mut solution_histogram = BTreeMap::new();
    let mut sum = BigInt::zero();
    let mut stack: Vec<(usize, VarSet, bool)> = Vec::new();

    for _ in 0..total {
        let mut leaves = 0u64;
        let mut sols = 0u64;
        stack.push((0, VarSet::EMPTY, true));
        while let Some((id, lu, alive)) = stack.pop() {
            let node = tree.node(id);
            if node.leaf_kind == LeafKind::Viable && alive {
                leaves += 1;
                sols += u64::from(node.transversal);
            }
            let k = node.children.len();
            let perm = if k > 1 {
                perms(k)[digits[slot[id]]]
            } else {
                IDENTITY
            };
            let mut left = VarSet::EMPTY;
            for &ci in &perm[..k] {
                let c = node.children[ci as usize];
                let e = tree.edge(c).expect("child edge");
                let survives = !e.falsifying && !lu.contains(e.label);
                let es = &mut edges[edge_slot[c]];
                es.survived += u64::from(survives);
                es.tail_survived += u64::from(alive);
                es.both += u64::from(survives && alive);
                stack.push((c, lu | left, alive && survives));
                left = left.with(e.label);
            }
        }
        *leaf_histogram.entry(leaves).or_insert(0u64) += 1;
        *solution_histogram.entry(sols).or_insert(0u64) += 1;
        sum += leaves;
        // Next joint ordering, mixed radix.
        for (i, &id) in branching.iter().enumerate() {
            digits[i] += 1;
            if digits[i] < perms(tree.node(id).children.len()).len() {
                break;
            }
            digits[i] = 0;
        }
    }
    let psi_paths = tree.psi_by_paths();
    Ok(ExhaustiveReport {
        orderings: total,
        tree,
        leaf_histogram,
        solution_histogram,
        mean_leaves: Rational::new(sum, BigInt::from(total)),
        psi_paths,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::maj;

    fn closed_maj(n: u32) -> Formula {
        maj(n, 3).unwrap().negation_closure()
    }

    #[test]
    fn maj_counts() {
        for (n, want) in [(4u32, 6u64), (8, 36), (12, 216)] {
            let f = closed_maj(n);
            let (c, stats) = count(&f, n as usize / 2, OrderingSource::Seeded(1)).unwrap();
            assert_eq!(c, want, "n = {n}");
            assert_eq!(stats.claim_violations, 0);
        }
    }

    #[test]
    fn maj4_enumerates_all_pairs() {
        let f = closed_maj(4);
        let mut got = Vec::new();
        enumerate(&f, 2, OrderingSource::Fixed, &mut |a| got.push(a.clone())).unwrap();
        got.sort();
        assert_eq!(got.len(), 6);
        got.dedup();
        assert_eq!(got.len(), 6);
        assert!(got.iter().all(|a| a.weight() == 2));
    }

    #[test]
    fn depth_zero_tree() {
        let f = Formula::new(3, []).unwrap();
        let mut got = Vec::new();
        let stats = enumerate(&f, 0, OrderingSource::Fixed, &mut |a| got.push(a.clone())).unwrap();
        assert_eq!(got, vec![Assignment::default()]);
        assert_eq!(stats.nodes_visited, 1);
    }

    #[test]
    fn superfluous_examples() {
        let mut p = PathState::new(0);
        let w = VarSet::from_vars([1, 2, 3]);
        assert!(!superfluous(2, &p));
        // Ordered (x2, x1, x3), path goes through x1.
        p.descend(w, 1, VarSet::from_vars([2]));
        assert!(superfluous(2, &p));
        assert!(!superfluous(3, &p));
        p.ascend();
        // Path goes through x2 first: nothing is left of it.
        p.descend(w, 2, VarSet::EMPTY);
        assert!(!superfluous(2, &p));
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = maj(4, 3).unwrap();
        assert_eq!(
            count(&f, 2, OrderingSource::Fixed).unwrap_err(),
            SearchError::InputNotClosed
        );
        let wide = Formula::new(4, [Clause::from_dimacs(&[1, 2, 3, 4])]).unwrap();
        assert!(matches!(
            count(&wide.negation_closure(), 2, OrderingSource::Fixed),
            Err(SearchError::WidthError { width: 4 })
        ));
    }

    #[test]
    fn same_seed_same_stats() {
        let f = closed_maj(8);
        let a = count(&f, 4, OrderingSource::Seeded(9)).unwrap();
        let b = count(&f, 4, OrderingSource::Seeded(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhaustive_maj4() {
        let f = closed_maj(4);
        let r = enumerate_all_orderings(&f, 2, DEFAULT_ORDERING_BUDGET).unwrap();
        assert_eq!(r.mean_leaves, r.psi_paths);
        assert_eq!(r.psi_paths, Rational::from_integer(6.into()));
        assert_eq!(
            r.solution_histogram.keys().copied().collect::<Vec<_>>(),
            vec![6]
        );
    }
}
