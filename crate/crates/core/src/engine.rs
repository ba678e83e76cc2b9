//! The traversal shared by enumeration, counting and tree materialization.
//!
//! A [`Walker`] observes nodes and decides child orderings and pruning; the
//! [`Engine`] applies the staged selection rule, computes markings and
//! falsifying edges, checks the structural claims and drives resets.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::cnf::{Clause, Formula, Var};
use crate::error::SearchError;
use crate::matching::{DisjointCollection, ResetEvent, StageTag};
use crate::packed::PackedFormula;
use crate::selection::{
    branch_on_t0, disjoint_stage, heavy_budget, heavy_witness, monotone_triples, plan_controlled,
    pseudomax_witness, stage_kappa2, ControlledPlan, Kappa2Context, PlanError, PlanPrior,
    ResetWitness, Route, StageProfile, U0Frame, WitnessReason,
};
use crate::tree::{LeafKind, Stage};
use crate::varset::VarSet;

/// SplitMix64 finalizer.
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub node: usize,
    pub children: VarSet,
    pub taken: Var,
    pub left: VarSet,
    pub clause: usize,
    pub stage: Stage,
    pub heavy: bool,
}

/// The root-to-node path of a depth-first traversal together with the
/// labels of already-ordered left siblings of every ancestor.
#[derive(Clone, Debug)]
pub struct PathState {
    pub(crate) frames: Vec<Frame>,
    ones: VarSet,
    left_union: Vec<VarSet>,
    hash: Vec<u64>,
}

impl PathState {
    /// Empty path at the root. `seed` feeds the per-node ordering streams.
    pub fn new(seed: u64) -> Self {
        PathState {
            frames: Vec::new(),
            ones: VarSet::EMPTY,
            left_union: vec![VarSet::EMPTY],
            hash: vec![mix(seed)],
        }
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    /// `Q(v)` of the current node.
    pub fn ones(&self) -> VarSet {
        self.ones
    }

    /// Hash of the seed and the label sequence leading to the current node.
    pub fn node_hash(&self) -> u64 {
        *self.hash.last().expect("root hash")
    }

    /// Move to the child labeled `taken`. `children` are the labels of all
    /// child edges at the current node, `left` those ordered before `taken`.
    pub fn descend(&mut self, children: VarSet, taken: Var, left: VarSet) {
        self.push(Frame {
            node: 0,
            children,
            taken,
            left,
            clause: usize::MAX,
            stage: Stage::Arbitrary,
            heavy: false,
        });
    }

    pub(crate) fn push(&mut self, frame: Frame) {
        let lu = *self.left_union.last().expect("root entry") | frame.left;
        let h = mix(self.node_hash().rotate_left(7) ^ u64::from(frame.taken));
        self.ones = self.ones.with(frame.taken);
        self.left_union.push(lu);
        self.hash.push(h);
        self.frames.push(frame);
    }

    pub fn ascend(&mut self) {
        if let Some(f) = self.frames.pop() {
            self.ones = self.ones.without(f.taken);
            self.left_union.pop();
            self.hash.pop();
        }
    }

    /// Some strict ancestor of the current node has a child edge labeled
    /// `label` to the left of the path.
    pub fn is_superfluous(&self, label: Var) -> bool {
        self.left_union.last().expect("root entry").contains(label)
    }

    /// Depth bitmask of the ancestors having a child edge labeled `label`.
    pub(crate) fn marks_of(&self, label: Var) -> u128 {
        let mut m = 0u128;
        for (j, f) in self.frames.iter().enumerate() {
            if f.children.contains(label) {
                m |= 1u128 << j;
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Child {
    pub label: Var,
    pub marks: u128,
    pub falsifying: bool,
}

impl Child {
    pub fn mark_count(&self) -> u32 {
        self.marks.count_ones()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Expansion {
    pub clause: usize,
    pub stage: Stage,
    pub children: [Child; 3],
    pub len: usize,
    pub labels: VarSet,
    pub heavy: bool,
}

/// The edge from a parent into the node being reported.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Link {
    pub parent: usize,
    pub label: Var,
    pub marks: u128,
    pub falsifying: bool,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct NodeExtra {
    pub heavy_budget: Option<usize>,
    pub ell: Option<usize>,
    pub profile: Option<StageProfile>,
}

pub(crate) type Perm = ([u8; 3], usize);

pub(crate) trait Walker {
    type Checkpoint;
    fn prunes(&self) -> bool;
    fn order(&mut self, st: &PathState, k: usize) -> Perm;
    fn internal(
        &mut self,
        st: &PathState,
        link: Option<&Link>,
        exp: &Expansion,
        extra: &NodeExtra,
    ) -> usize;
    fn leaf(
        &mut self,
        st: &PathState,
        depth: usize,
        link: Option<&Link>,
        kind: LeafKind,
        ones: VarSet,
        transversal: bool,
    );
    fn superfluous(&mut self);
    fn checkpoint(&self) -> Self::Checkpoint;
    fn rollback(&mut self, cp: Self::Checkpoint);
}

pub(crate) enum Interrupt {
    Reset(ResetWitness),
    Fail(SearchError),
}

impl From<SearchError> for Interrupt {
    fn from(e: SearchError) -> Self {
        Interrupt::Fail(e)
    }
}

/// A controlled plan with its clause indices resolved.
#[derive(Debug)]
pub(crate) struct PlanRt {
    pub plan: ControlledPlan,
    pub c1_idx: Vec<usize>,
}

#[derive(Debug)]
pub(crate) struct K2Rt {
    pub ctx: Kappa2Context,
    pub cr_idx: Vec<usize>,
    /// `b_i` for each clause of `C'_R(u)`.
    pub b: Vec<Var>,
    pub budget: usize,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct NodeCtx {
    pub plan: Option<Arc<PlanRt>>,
    pub u0: VarSet,
    pub k2: Option<Arc<K2Rt>>,
}

#[derive(Debug, Default)]
struct PlanSlot {
    prior: PlanPrior,
    last: Option<Arc<PlanRt>>,
}

#[derive(Clone, Debug)]
pub(crate) struct ProfileRecord {
    pub profile: StageProfile,
    pub ell: BTreeMap<usize, u64>,
}

#[derive(Clone, Debug)]
pub(crate) struct Prefix {
    pub st: PathState,
    pub link: Option<Link>,
}

const CLAIM_LOG_CAP: usize = 64;

pub(crate) struct Engine<'a> {
    f: &'a Formula,
    packed: &'a PackedFormula,
    t: usize,
    c0: DisjointCollection,
    c0_idx: Vec<usize>,
    route: Route,
    plans: HashMap<VarSet, PlanSlot>,
    pub events: Vec<ResetEvent>,
    pub claim_count: u64,
    pub claims: Vec<String>,
    pub profiles: HashMap<VarSet, ProfileRecord>,
    pub split_at: Option<usize>,
    pub prefixes: Vec<Prefix>,
}

fn clause_index(f: &Formula, c: &Clause) -> Result<usize, SearchError> {
    f.clauses()
        .binary_search(c)
        .map_err(|_| SearchError::Internal(format!("clause {c:?} is not in the formula")))
}

impl<'a> Engine<'a> {
    pub fn new(f: &'a Formula, packed: &'a PackedFormula, t: usize) -> Result<Self, SearchError> {
        let c0 = disjoint_stage(f);
        let mut e = Engine {
            f,
            packed,
            t,
            c0,
            c0_idx: Vec::new(),
            route: Route::Arbitrary,
            plans: HashMap::new(),
            events: Vec::new(),
            claim_count: 0,
            claims: Vec::new(),
            profiles: HashMap::new(),
            split_at: None,
            prefixes: Vec::new(),
        };
        e.refresh_c0()?;
        Ok(e)
    }

    /// A fresh engine sharing the current `C0`, for an independent subtree.
    pub fn worker(&self) -> Engine<'a> {
        Engine {
            f: self.f,
            packed: self.packed,
            t: self.t,
            c0: self.c0.clone(),
            c0_idx: self.c0_idx.clone(),
            route: self.route,
            plans: HashMap::new(),
            events: Vec::new(),
            claim_count: 0,
            claims: Vec::new(),
            profiles: HashMap::new(),
            split_at: None,
            prefixes: Vec::new(),
        }
    }

    fn refresh_c0(&mut self) -> Result<(), SearchError> {
        self.c0_idx = self
            .c0
            .members()
            .iter()
            .map(|c| clause_index(self.f, c))
            .collect::<Result<_, _>>()?;
        self.route = branch_on_t0(self.c0_idx.len(), self.f.num_vars());
        Ok(())
    }

    pub fn t0(&self) -> usize {
        self.c0_idx.len()
    }

    pub fn route(&self) -> Route {
        self.route
    }

    fn limit(&self) -> u32 {
        self.f.num_vars()
    }

    fn claim(&mut self, msg: String) {
        self.claim_count += 1;
        if self.claims.len() < CLAIM_LOG_CAP {
            self.claims.push(msg);
        }
    }

    /// Full traversal from the root, restarting after every `C0` reset.
    /// `seed` feeds the per-node ordering streams.
    pub fn run<W: Walker>(&mut self, w: &mut W, seed: u64) -> Result<(), SearchError> {
        loop {
            let cp = w.checkpoint();
            let mut st = PathState::new(seed);
            self.prefixes.clear();
            match self.visit(w, &mut st, &NodeCtx::default(), None) {
                Ok(()) => return Ok(()),
                Err(Interrupt::Reset(wit)) => {
                    w.rollback(cp);
                    self.apply_global_reset(wit)?;
                }
                Err(Interrupt::Fail(e)) => return Err(e),
            }
        }
    }

    /// Traversal of the subtree below a collected prefix.
    pub fn run_prefix<W: Walker>(&mut self, w: &mut W, p: &Prefix) -> Result<(), Interrupt> {
        let mut st = p.st.clone();
        self.visit(w, &mut st, &NodeCtx::default(), p.link.as_ref())
    }

    pub fn apply_global_reset(&mut self, wit: ResetWitness) -> Result<(), SearchError> {
        if wit.stage != StageTag::C0 {
            return Err(SearchError::Internal(format!(
                "{} reset escaped its subtree",
                wit.stage
            )));
        }
        let ev = self
            .c0
            .attempt_reset(&wit.removed, &wit.added)
            .map_err(|e| SearchError::Internal(format!("C0 reset witness rejected: {e}")))?
            .ok_or_else(|| SearchError::Internal("C0 reset witness does not grow C0".into()))?;
        self.c0.extend_greedy(&monotone_triples(self.f));
        if self.c0.reset_count() > self.limit() {
            return Err(SearchError::ResetLimit {
                stage: "C0".into(),
                limit: self.limit(),
            });
        }
        self.events.push(ResetEvent {
            new_size: self.c0.len(),
            ..ev
        });
        self.plans.clear();
        self.profiles.clear();
        self.claims.clear();
        self.claim_count = 0;
        self.refresh_c0()
    }

    fn apply_local_reset(&mut self, key: VarSet, wit: ResetWitness) -> Result<(), SearchError> {
        let limit = self.limit();
        let slot = self.plans.entry(key).or_default();
        let last = slot
            .last
            .clone()
            .ok_or_else(|| SearchError::Internal("local reset without a plan".into()))?;
        let (coll, candidates) = match wit.stage {
            StageTag::C1 => (last.plan.k1.c1.clone(), last.plan.k1.f1.clone()),
            StageTag::CR => (last.plan.f2.cr.clone(), last.plan.f2.f2r.clone()),
            StageTag::C0 => unreachable!("C0 resets are global"),
        };
        let mut coll = coll;
        let ev = coll
            .attempt_reset(&wit.removed, &wit.added)
            .map_err(|e| {
                SearchError::Internal(format!("{} reset witness rejected: {e}", wit.stage))
            })?
            .ok_or_else(|| {
                SearchError::Internal(format!("{} witness does not grow it", wit.stage))
            })?;
        coll.extend_greedy(&candidates);
        if coll.reset_count() > limit {
            return Err(SearchError::ResetLimit {
                stage: wit.stage.to_string(),
                limit,
            });
        }
        let ev = ResetEvent {
            new_size: coll.len(),
            ..ev
        };
        match wit.stage {
            StageTag::C1 => {
                slot.prior = PlanPrior {
                    c1: Some(coll),
                    cr: None,
                }
            }
            _ => slot.prior.cr = Some(coll),
        }
        self.events.push(ev);
        Ok(())
    }

    fn plan_for(&mut self, key: VarSet) -> Result<Arc<PlanRt>, Interrupt> {
        let u0 = U0Frame::new(self.c0.members(), key)
            .ok_or_else(|| SearchError::Internal("level-t0 node does not split C0".into()))?;
        let prior = self
            .plans
            .get(&key)
            .map(|s| s.prior.clone())
            .unwrap_or_default();
        let plan = match plan_controlled(self.f, u0, prior) {
            Ok(p) => p,
            Err(PlanError::Reset(w)) => return Err(Interrupt::Reset(w)),
            Err(PlanError::Unbacked(s)) => return Err(SearchError::Internal(s).into()),
        };
        let c1_idx = plan
            .k1
            .c1
            .members()
            .iter()
            .map(|c| clause_index(self.f, c))
            .collect::<Result<_, _>>()?;
        let rt = Arc::new(PlanRt { plan, c1_idx });
        let slot = self.plans.entry(key).or_default();
        slot.prior = PlanPrior {
            c1: Some(rt.plan.k1.c1.clone()),
            cr: Some(rt.plan.f2.cr.clone()),
        };
        slot.last = Some(rt.clone());
        self.profiles.insert(
            key,
            ProfileRecord {
                profile: rt.plan.profile.clone(),
                ell: BTreeMap::new(),
            },
        );
        Ok(rt)
    }

    fn kappa2_for(&mut self, plan: &PlanRt, st: &PathState) -> Result<K2Rt, SearchError> {
        let ctx = stage_kappa2(&plan.plan, st.ones());
        let cr_idx = ctx
            .cr_u
            .iter()
            .map(|c| clause_index(self.f, c))
            .collect::<Result<_, _>>()?;
        let b = ctx
            .cr_u_index
            .iter()
            .map(|&i| plan.plan.k1.b[i].expect("V1 index has b"))
            .collect();
        let budget = heavy_budget(&plan.plan, &ctx);
        Ok(K2Rt {
            ctx,
            cr_idx,
            b,
            budget,
        })
    }

    fn visit<W: Walker>(
        &mut self,
        w: &mut W,
        st: &mut PathState,
        ctx: &NodeCtx,
        link: Option<&Link>,
    ) -> Result<(), Interrupt> {
        let depth = st.depth();
        if depth == 0 && self.packed.scan(st.ones()).falsified {
            w.leaf(st, 0, link, LeafKind::Falsified, st.ones(), false);
            return Ok(());
        }
        if depth == self.t {
            let tr = self.packed.is_transversal(st.ones());
            w.leaf(st, depth, link, LeafKind::Viable, st.ones(), tr);
            return Ok(());
        }
        if self.split_at == Some(depth) {
            self.prefixes.push(Prefix {
                st: st.clone(),
                link: link.copied(),
            });
            return Ok(());
        }
        if self.route == Route::Controlled && depth == self.t0() && ctx.plan.is_none() {
            return self.visit_u0(w, st, link);
        }

        let mut here = ctx.clone();
        let mut extra = NodeExtra::default();
        if let Some(plan) = &ctx.plan {
            if depth == self.t0() {
                extra.profile = Some(plan.plan.profile.clone());
            }
            if ctx.k2.is_none() && depth == self.t0() + plan.c1_idx.len() {
                let k2 = self.kappa2_for(plan, st)?;
                if let Some(rec) = self.profiles.get_mut(&ctx.u0) {
                    *rec.ell.entry(k2.ctx.ell).or_default() += 1;
                }
                here.k2 = Some(Arc::new(k2));
            }
        }
        let exp = self.expand(st, &here)?;
        if let Some(k2) = &here.k2 {
            extra.ell = Some(k2.ctx.ell);
            if exp.stage == Stage::Arbitrary {
                extra.heavy_budget = Some(k2.budget);
            }
        }
        let id = w.internal(st, link, &exp, &extra);
        let (perm, k) = w.order(st, exp.len);
        let mut left = VarSet::EMPTY;
        for &ci in &perm[..k] {
            let ch = exp.children[ci as usize];
            let l = Link {
                parent: id,
                label: ch.label,
                marks: ch.marks,
                falsifying: ch.falsifying,
            };
            if w.prunes() && st.is_superfluous(ch.label) {
                w.superfluous();
            } else if ch.falsifying {
                let ones = st.ones().with(ch.label);
                w.leaf(st, depth + 1, Some(&l), LeafKind::Falsified, ones, false);
            } else {
                st.push(Frame {
                    node: id,
                    children: exp.labels,
                    taken: ch.label,
                    left,
                    clause: exp.clause,
                    stage: exp.stage,
                    heavy: exp.heavy,
                });
                let r = self.visit(w, st, &here, Some(&l));
                st.ascend();
                r?;
            }
            left = left.with(ch.label);
        }
        Ok(())
    }

    fn visit_u0<W: Walker>(
        &mut self,
        w: &mut W,
        st: &mut PathState,
        link: Option<&Link>,
    ) -> Result<(), Interrupt> {
        let key = st.ones();
        loop {
            let cp = w.checkpoint();
            let claims_cp = (self.claim_count, self.claims.len());
            let res = self.plan_for(key).and_then(|plan| {
                let ctx = NodeCtx {
                    plan: Some(plan),
                    u0: key,
                    k2: None,
                };
                self.visit(w, st, &ctx, link)
            });
            match res {
                Ok(()) => return Ok(()),
                Err(Interrupt::Reset(wit)) if wit.stage != StageTag::C0 => {
                    w.rollback(cp);
                    self.claim_count = claims_cp.0;
                    self.claims.truncate(claims_cp.1);
                    self.apply_local_reset(key, wit)?;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn expand(&mut self, st: &PathState, ctx: &NodeCtx) -> Result<Expansion, Interrupt> {
        let depth = st.depth();
        let ones = st.ones();
        let t0 = self.t0();
        let fixed = if depth < t0 {
            Some((Stage::Disjoint, self.c0_idx[depth]))
        } else if let Some(plan) = &ctx.plan {
            let t1 = plan.c1_idx.len();
            if depth < t0 + t1 {
                Some((Stage::Kappa1, plan.c1_idx[depth - t0]))
            } else {
                let k2 = ctx
                    .k2
                    .as_ref()
                    .ok_or_else(|| SearchError::Internal("missing κ₂ context".into()))?;
                let j = depth - t0 - t1;
                (j < k2.ctx.ell).then(|| (Stage::Kappa2, k2.cr_idx[j]))
            }
        } else {
            None
        };
        let scan = self.packed.scan(ones);
        let (stage, clause) = match fixed {
            Some(sc) => sc,
            None => match scan.best_positive {
                Some(i) => (Stage::Arbitrary, i),
                None => {
                    let reason = if scan.any_open {
                        "no clause simplifies to a positive clause"
                    } else {
                        "every clause is already satisfied"
                    };
                    return Err(SearchError::PreconditionViolated {
                        depth,
                        ones: ones.to_vec(),
                        reason: reason.into(),
                    }
                    .into());
                }
            },
        };
        let pos = self.packed.pos[clause];
        let neg = self.packed.neg[clause];
        if pos.intersects(ones) || !neg.is_subset(ones) || pos.is_empty() {
            return Err(SearchError::Internal(format!(
                "{} clause {:?} is not live and positive at depth {depth}",
                stage.as_str(),
                self.f.clauses()[clause]
            ))
            .into());
        }

        let mut children = [Child {
            label: 0,
            marks: 0,
            falsifying: false,
        }; 3];
        let mut len = 0;
        for x in pos.iter() {
            if len == 3 {
                return Err(SearchError::WidthError {
                    width: pos.len() as usize,
                }
                .into());
            }
            children[len] = Child {
                label: x,
                marks: st.marks_of(x),
                falsifying: scan.unit_neg.contains(x),
            };
            len += 1;
        }
        let kids = &children[..len];
        let open: Vec<u32> = kids
            .iter()
            .filter(|c| !c.falsifying)
            .map(Child::mark_count)
            .collect();
        let mut open_sorted = open.clone();
        open_sorted.sort_unstable();
        let heavy = len == 3 && open_sorted == [0, 1, 1];

        if depth >= t0 && len == 3 && kids.iter().all(|c| c.marks == 0) {
            return Err(Interrupt::Reset(ResetWitness {
                stage: StageTag::C0,
                removed: vec![],
                added: vec![self.f.clauses()[clause].clone()],
                reason: WitnessReason::MissesC0,
            }));
        }

        match (stage, &ctx.plan, &ctx.k2) {
            (Stage::Kappa2, _, Some(k2)) => {
                let j = depth - t0 - ctx.plan.as_ref().map_or(0, |p| p.c1_idx.len());
                let b = k2.b[j];
                let b_falsifying = kids.iter().any(|c| c.label == b && c.falsifying);
                let unmarked_open = open.iter().filter(|&&m| m == 0).count();
                if !b_falsifying || open.len() > 2 || (open.len() == 2 && unmarked_open == 2) {
                    self.claim(format!(
                        "κ₂ node at depth {depth} with clause {:?} has effective width {} (b falsifying: {b_falsifying})",
                        self.f.clauses()[clause],
                        open.len()
                    ));
                }
            }
            (Stage::Arbitrary, Some(plan), Some(k2)) => {
                if len == 3 && open_sorted == [0, 0, 1] {
                    let c = &self.f.clauses()[clause];
                    match pseudomax_witness(&plan.plan.u0, &plan.plan.k1, c) {
                        Some(wit) => return Err(Interrupt::Reset(wit)),
                        None => {
                            self.claim(format!("1-marked node of mass 5/2 at depth {depth}: {c:?}"))
                        }
                    }
                }
                if heavy {
                    let mut heavies: Vec<Clause> = st
                        .frames
                        .iter()
                        .filter(|f| f.stage == Stage::Arbitrary && f.heavy)
                        .map(|f| self.f.clauses()[f.clause].clone())
                        .collect();
                    heavies.push(self.f.clauses()[clause].clone());
                    if heavies.len() > k2.budget {
                        match heavy_witness(&plan.plan, &k2.ctx, &heavies) {
                            Some(wit) => return Err(Interrupt::Reset(wit)),
                            None => self.claim(format!(
                                "{} heavy nodes on a shoot at depth {depth}, budget {}",
                                heavies.len(),
                                k2.budget
                            )),
                        }
                    }
                }
            }
            _ => {}
        }

        Ok(Expansion {
            clause,
            stage,
            children,
            len,
            labels: pos,
            heavy,
        })
    }
}
