//! The staged clause-selection rule.
//!
//! The first `t0` levels expand the clauses of the disjoint collection `C0`.
//! When `t0 < n/4` a controlled stage follows below every level-`t0` node
//! `u0`: first the singly marked clauses of `C1` (κ₁), then, below each
//! node `u` at the end of κ₁, the clauses of `C'_R(u)` (κ₂). Everything
//! else is expanded by the canonical arbitrary pick.
//!
//! Whenever an expansion would contradict pseudomaximality of one of the
//! collections, the functions here produce a [`ResetWitness`]: a concrete
//! larger disjoint collection.

use serde::Serialize;

use crate::cnf::{Assignment, Clause, Formula, Var};
use crate::matching::{greedy_maximal, DisjointCollection, StageTag};
use crate::packed::PackedFormula;
use crate::varset::VarSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Disjoint stage followed directly by the arbitrary stage.
    Arbitrary,
    /// Disjoint stage, then κ₁ and κ₂ below each level-`t0` node.
    Controlled,
}

/// `t0 >= n/4` skips the controlled stage. Equality takes the arbitrary
/// route.
pub fn branch_on_t0(t0: usize, n: u32) -> Route {
    if 4 * t0 >= n as usize {
        Route::Arbitrary
    } else {
        Route::Controlled
    }
}

/// Monotone width-3 clauses of `f` in canonical order.
pub fn monotone_triples(f: &Formula) -> Vec<Clause> {
    f.clauses()
        .iter()
        .filter(|c| c.is_monotone() && c.width() == 3)
        .cloned()
        .collect()
}

/// Greedy `C0`. Its length is `t0`.
pub fn disjoint_stage(f: &Formula) -> DisjointCollection {
    greedy_maximal(&monotone_triples(f), StageTag::C0)
}

/// Why a reset witness exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessReason {
    /// Two singly marked clauses through both open variables of one `C0`
    /// clause are disjoint.
    DisjointOpenPair,
    /// A monotone triple live below the disjoint stage misses every `C0`
    /// variable.
    MissesC0,
    /// A singly marked clause through an unused open variable misses `C1`.
    MissesC1,
    /// A clause through the second open variable of `C0_i` avoids `C1_i`.
    OpenVariableAvoidsC1,
    /// A clause through the second open variables of two different `C0`
    /// clauses.
    TwoOpenVariables,
    /// More heavy nodes on a shoot than `C'_R` allows.
    HeavyOverflowR,
    /// More heavy nodes on a shoot than `m_B` allows.
    HeavyOverflowB,
}

/// A proof-backed request to grow one collection: drop `removed`, add
/// `added`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResetWitness {
    pub stage: StageTag,
    pub removed: Vec<Clause>,
    pub added: Vec<Clause>,
    pub reason: WitnessReason,
}

/// Failure while planning the controlled stage below a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanError {
    Reset(ResetWitness),
    /// A structural claim failed without a witness to back a reset.
    Unbacked(String),
}

impl From<ResetWitness> for PlanError {
    fn from(w: ResetWitness) -> Self {
        PlanError::Reset(w)
    }
}

/// The disjoint-stage decomposition seen from a level-`t0` node `u0`:
/// `C0_i = {p_i} ∪ X_i` where `p_i` is the label taken at level `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct U0Frame {
    c0: Vec<Clause>,
    p: Vec<Var>,
    x: Vec<[Var; 2]>,
    ones: VarSet,
    c0_vars: VarSet,
}

impl U0Frame {
    /// `None` unless every `C0` clause has exactly one variable in `ones`.
    pub fn new(c0: &[Clause], ones: VarSet) -> Option<Self> {
        let mut p = Vec::with_capacity(c0.len());
        let mut x = Vec::with_capacity(c0.len());
        let mut c0_vars = VarSet::EMPTY;
        for c in c0 {
            let vs = c.var_set();
            if c.width() != 3 || !c.is_monotone() {
                return None;
            }
            let on = vs & ones;
            if on.len() != 1 {
                return None;
            }
            let rest = (vs - on).to_vec();
            p.push(on.first()?);
            x.push([rest[0], rest[1]]);
            c0_vars |= vs;
        }
        Some(U0Frame {
            c0: c0.to_vec(),
            p,
            x,
            ones,
            c0_vars,
        })
    }

    pub fn t0(&self) -> usize {
        self.c0.len()
    }

    pub fn c0(&self) -> &[Clause] {
        &self.c0
    }

    pub fn p(&self, i: usize) -> Var {
        self.p[i]
    }

    pub fn x(&self, i: usize) -> [Var; 2] {
        self.x[i]
    }

    pub fn ones(&self) -> VarSet {
        self.ones
    }

    pub fn c0_vars(&self) -> VarSet {
        self.c0_vars
    }

    /// Index `i` with `v ∈ X_i`.
    pub fn x_index(&self, v: Var) -> Option<usize> {
        self.x.iter().position(|x| x.contains(&v))
    }

    /// `F₁`: monotone triples live at `u0` with exactly one marked
    /// variable.
    pub fn singly_marked(&self, f: &Formula) -> Vec<Clause> {
        monotone_triples(f)
            .into_iter()
            .filter(|c| {
                let vs = c.var_set();
                !vs.intersects(self.ones) && (vs & self.c0_vars).len() == 1
            })
            .collect()
    }
}

/// Result of the first controlled sub-stage at `u0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kappa1 {
    pub c1: DisjointCollection,
    pub f1: Vec<Clause>,
    /// `V1`, ascending.
    pub v1: Vec<usize>,
    /// `x̃_i`: the open variable of `X_i` used by `C1`, per index.
    pub a: Vec<Option<Var>>,
    /// The other open variable of `X_i` when `i ∈ V1`.
    pub b: Vec<Option<Var>>,
    /// `Y_i = C1_i ∖ {x̃_i}`.
    pub y: Vec<Option<[Var; 2]>>,
    /// Position in `c1` of `C1_i`.
    pub c1_pos: Vec<Option<usize>>,
}

impl Kappa1 {
    pub fn t1(&self) -> usize {
        self.c1.len()
    }

    pub fn c1_vars(&self) -> VarSet {
        self.c1
            .members()
            .iter()
            .fold(VarSet::EMPTY, |s, c| s | c.var_set())
    }

    /// `C1_i` for `i ∈ V1`.
    pub fn c1_clause(&self, i: usize) -> Option<&Clause> {
        self.c1_pos[i].map(|k| &self.c1.members()[k])
    }
}

/// First controlled sub-stage. `prior` carries a `C1` that survived an
/// earlier reset at the same `u0`.
pub fn stage_kappa1(
    f: &Formula,
    u0: &U0Frame,
    prior: Option<DisjointCollection>,
) -> Result<Kappa1, PlanError> {
    let f1 = u0.singly_marked(f);
    if let Some(w) = disjoint_open_pair(u0, &f1) {
        return Err(w.into());
    }
    let c1 = prior.unwrap_or_else(|| greedy_maximal(&f1, StageTag::C1));
    let t0 = u0.t0();
    let mut k1 = Kappa1 {
        c1,
        f1,
        v1: Vec::new(),
        a: vec![None; t0],
        b: vec![None; t0],
        y: vec![None; t0],
        c1_pos: vec![None; t0],
    };
    for (pos, c) in k1.c1.members().iter().enumerate() {
        let vs = c.var_set();
        let marked = vs & u0.c0_vars();
        let a = marked
            .first()
            .filter(|_| marked.len() == 1)
            .ok_or_else(|| PlanError::Unbacked(format!("C1 clause {c:?} is not singly marked")))?;
        let i = u0
            .x_index(a)
            .ok_or_else(|| PlanError::Unbacked(format!("C1 clause {c:?} hits a path label")))?;
        if k1.a[i].is_some() {
            return Err(PlanError::Unbacked(format!(
                "two C1 clauses share the open pair of index {i}"
            )));
        }
        let x = u0.x(i);
        let b = if x[0] == a { x[1] } else { x[0] };
        let rest = (vs.without(a)).to_vec();
        k1.a[i] = Some(a);
        k1.b[i] = Some(b);
        k1.y[i] = Some([rest[0], rest[1]]);
        k1.c1_pos[i] = Some(pos);
        k1.v1.push(i);
    }
    k1.v1.sort_unstable();
    Ok(k1)
}

/// Two disjoint `F₁` clauses through `x_i` and `x'_i` replace `C0_i`.
fn disjoint_open_pair(u0: &U0Frame, f1: &[Clause]) -> Option<ResetWitness> {
    for i in 0..u0.t0() {
        let [x, xp] = u0.x(i);
        let with_x: Vec<&Clause> = f1.iter().filter(|c| c.var_set().contains(x)).collect();
        let with_xp: Vec<&Clause> = f1.iter().filter(|c| c.var_set().contains(xp)).collect();
        for c in &with_x {
            if let Some(d) = with_xp.iter().find(|d| !c.shares_var(d)) {
                return Some(ResetWitness {
                    stage: StageTag::C0,
                    removed: vec![u0.c0()[i].clone()],
                    added: vec![(*c).clone(), (*d).clone()],
                    reason: WitnessReason::DisjointOpenPair,
                });
            }
        }
    }
    None
}

/// Role of a variable relative to the decomposition at `u0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Path label `p_i`.
    P(usize),
    /// `x̃_i`, `i ∈ V1`.
    A(usize),
    /// The other open variable of `X_i`, `i ∈ V1`.
    B(usize),
    /// An open variable of `X_i`, `i ∈ V_B`.
    XB(usize),
    /// A member of `Y_i`.
    Y(usize),
    Free,
}

pub fn role(u0: &U0Frame, k1: &Kappa1, v: Var) -> Role {
    if let Some(i) = u0.p.iter().position(|&p| p == v) {
        return Role::P(i);
    }
    if let Some(i) = u0.x_index(v) {
        return match k1.a[i] {
            Some(a) if a == v => Role::A(i),
            Some(_) => Role::B(i),
            None => Role::XB(i),
        };
    }
    if let Some(i) = k1.y.iter().position(|y| y.is_some_and(|y| y.contains(&v))) {
        return Role::Y(i);
    }
    Role::Free
}

/// A monotone triple whose presence contradicts pseudomaximality of `C0`
/// or `C1`, turned into the larger collection that proves it.
pub fn pseudomax_witness(u0: &U0Frame, k1: &Kappa1, c: &Clause) -> Option<ResetWitness> {
    if !c.is_monotone() || c.width() != 3 {
        return None;
    }
    let roles: Vec<Role> = c.vars().map(|v| role(u0, k1, v)).collect();
    if roles.iter().any(|r| matches!(r, Role::P(_))) {
        return None;
    }
    let opens: Vec<Role> = roles
        .iter()
        .copied()
        .filter(|r| matches!(r, Role::A(_) | Role::B(_) | Role::XB(_)))
        .collect();
    let others: Vec<Role> = roles
        .iter()
        .copied()
        .filter(|r| !matches!(r, Role::A(_) | Role::B(_) | Role::XB(_)))
        .collect();
    let c0 = |i: usize| u0.c0()[i].clone();
    let c1 = |i: usize| k1.c1_clause(i).cloned();
    match opens.as_slice() {
        [] => Some(ResetWitness {
            stage: StageTag::C0,
            removed: vec![],
            added: vec![c.clone()],
            reason: WitnessReason::MissesC0,
        }),
        [Role::XB(_)] if others.iter().all(|r| *r == Role::Free) => Some(ResetWitness {
            stage: StageTag::C1,
            removed: vec![],
            added: vec![c.clone()],
            reason: WitnessReason::MissesC1,
        }),
        [Role::B(i)] if !others.contains(&Role::Y(*i)) => Some(ResetWitness {
            stage: StageTag::C0,
            removed: vec![c0(*i)],
            added: vec![c1(*i)?, c.clone()],
            reason: WitnessReason::OpenVariableAvoidsC1,
        }),
        [Role::B(i), Role::B(j)]
            if i != j && !others.contains(&Role::Y(*i)) && !others.contains(&Role::Y(*j)) =>
        {
            Some(ResetWitness {
                stage: StageTag::C0,
                removed: vec![c0(*i), c0(*j)],
                added: vec![c1(*i)?, c1(*j)?, c.clone()],
                reason: WitnessReason::TwoOpenVariables,
            })
        }
        _ => None,
    }
}

/// The four shapes a clause of `F₂` can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum F2Form {
    /// `(x̃_i, y, z)` with `i ∈ V1`, `y ∈ Y_i`.
    OwnY,
    /// `(x̃_i, x̃_j, z)` with `i ∈ V1`, `j ∈ V_B`.
    OpenB,
    /// `(x̃_i, x̃_j, z)` with `i, j ∈ V_B`.
    BothB,
    /// `(x̃_i, y, z)` with `i ∈ V_B`, `y ∈ Y_j`.
    BWithY,
}

impl F2Form {
    /// Forms with an open variable of a `V1` index go to `F₂R`.
    pub fn is_r(self) -> bool {
        matches!(self, F2Form::OwnY | F2Form::OpenB)
    }
}

/// Classification of `F₂ = F₂(u*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Split {
    pub f2: Vec<(Clause, F2Form)>,
    pub f2r: Vec<Clause>,
    pub f2b: Vec<Clause>,
    /// `V_R`: indices `i ∈ V1` whose other open variable occurs in `F₂R`.
    pub vr: Vec<usize>,
    pub cr: DisjointCollection,
    /// Index `i ∈ V1` of each `C'_R` member.
    pub cr_index: Vec<usize>,
    /// `V'_R`, ascending.
    pub vr_prime: Vec<usize>,
}

/// How often `v` is marked on the shoot ending at `u*`.
fn mark_count(u0: &U0Frame, c1_vars: VarSet, v: Var) -> u32 {
    u32::from(u0.c0_vars().contains(v)) + u32::from(c1_vars.contains(v))
}

/// `Q(u*)`: the path to `u0` extended by every `x̃_i`.
pub fn u_star(u0: &U0Frame, k1: &Kappa1) -> VarSet {
    k1.a.iter().flatten().fold(u0.ones(), |s, &a| s.with(a))
}

pub fn classify_f2(
    f: &Formula,
    u0: &U0Frame,
    k1: &Kappa1,
    prior_cr: Option<DisjointCollection>,
) -> Result<F2Split, PlanError> {
    let ones = u_star(u0, k1);
    let c1_vars = k1.c1_vars();
    let mut f2 = Vec::new();
    for c in monotone_triples(f) {
        let vs = c.var_set();
        if vs.intersects(ones) {
            continue;
        }
        let mut counts: Vec<u32> = c.vars().map(|v| mark_count(u0, c1_vars, v)).collect();
        counts.sort_unstable();
        if counts != [0, 1, 1] {
            continue;
        }
        let marked: Vec<Role> = c
            .vars()
            .filter(|&v| mark_count(u0, c1_vars, v) == 1)
            .map(|v| role(u0, k1, v))
            .collect();
        let form = match (marked[0], marked[1]) {
            (Role::B(i), Role::Y(j)) | (Role::Y(j), Role::B(i)) if i == j => Some(F2Form::OwnY),
            (Role::B(_), Role::XB(_)) | (Role::XB(_), Role::B(_)) => Some(F2Form::OpenB),
            (Role::XB(_), Role::XB(_)) => Some(F2Form::BothB),
            (Role::XB(_), Role::Y(_)) | (Role::Y(_), Role::XB(_)) => Some(F2Form::BWithY),
            _ => None,
        };
        match form {
            Some(form) => f2.push((c, form)),
            None => {
                return Err(match pseudomax_witness(u0, k1, &c) {
                    Some(w) => w.into(),
                    None => PlanError::Unbacked(format!("F2 clause {c:?} fits no known form")),
                })
            }
        }
    }
    let f2r: Vec<Clause> = f2
        .iter()
        .filter(|(_, k)| k.is_r())
        .map(|(c, _)| c.clone())
        .collect();
    let f2b: Vec<Clause> = f2
        .iter()
        .filter(|(_, k)| !k.is_r())
        .map(|(c, _)| c.clone())
        .collect();
    let b_index = |c: &Clause| -> Option<usize> {
        c.vars().find_map(|v| match role(u0, k1, v) {
            Role::B(i) => Some(i),
            _ => None,
        })
    };
    let mut vr: Vec<usize> = f2r.iter().filter_map(b_index).collect();
    vr.sort_unstable();
    vr.dedup();
    let cr = prior_cr.unwrap_or_else(|| greedy_maximal(&f2r, StageTag::CR));
    let cr_index: Vec<usize> = cr
        .members()
        .iter()
        .map(|c| {
            b_index(c).ok_or_else(|| {
                PlanError::Unbacked(format!("C'_R clause {c:?} lacks an open V1 variable"))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut vr_prime = cr_index.clone();
    vr_prime.sort_unstable();
    Ok(F2Split {
        f2,
        f2r,
        f2b,
        vr,
        cr,
        cr_index,
        vr_prime,
    })
}

/// Per-`u0` summary of the controlled stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageProfile {
    pub t0: usize,
    pub t1: usize,
    pub m_b: usize,
    pub m_r: usize,
    pub m_i: usize,
    pub m_r_prime: usize,
    pub v1: Vec<usize>,
    pub vb: Vec<usize>,
    pub vr: Vec<usize>,
    pub vr_prime: Vec<usize>,
    /// `4 t0 − n`, i.e. four times the offset of `t0` from `n/4`.
    pub delta_quarters: i64,
    /// `I(u0) = 3 t0 + 2 t1 + m'_R + m_B`.
    pub i_u0: usize,
}

impl StageProfile {
    pub fn check(&self) -> Result<(), String> {
        if self.v1.len() != self.t1 {
            return Err(format!("|V1| = {} but t1 = {}", self.v1.len(), self.t1));
        }
        if self.m_b + self.t1 != self.t0 {
            return Err("m_B + t1 != t0".into());
        }
        if !(self.m_r_prime <= self.m_r && self.m_r <= self.t1) {
            return Err(format!(
                "expected m'_R <= m_R <= t1, got {} {} {}",
                self.m_r_prime, self.m_r, self.t1
            ));
        }
        if self.m_b + self.m_r + self.m_i != self.t0 {
            return Err("m_B + m_R + m_I != t0".into());
        }
        Ok(())
    }
}

/// The controlled stage below one `u0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlledPlan {
    pub u0: U0Frame,
    pub k1: Kappa1,
    pub f2: F2Split,
    pub profile: StageProfile,
}

/// Collections carried over from an earlier attempt at the same `u0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlanPrior {
    pub c1: Option<DisjointCollection>,
    pub cr: Option<DisjointCollection>,
}

pub fn plan_controlled(
    f: &Formula,
    u0: U0Frame,
    prior: PlanPrior,
) -> Result<ControlledPlan, PlanError> {
    let k1 = stage_kappa1(f, &u0, prior.c1)?;
    let f2 = classify_f2(f, &u0, &k1, prior.cr)?;
    let t0 = u0.t0();
    let t1 = k1.t1();
    let vb: Vec<usize> = (0..t0).filter(|i| k1.a[*i].is_none()).collect();
    let m_r = f2.vr.len();
    let profile = StageProfile {
        t0,
        t1,
        m_b: t0 - t1,
        m_r,
        m_i: t1.saturating_sub(m_r),
        m_r_prime: f2.cr.len(),
        v1: k1.v1.clone(),
        vb,
        vr: f2.vr.clone(),
        vr_prime: f2.vr_prime.clone(),
        delta_quarters: 4 * t0 as i64 - i64::from(f.num_vars()),
        i_u0: 3 * t0 + 2 * t1 + f2.cr.len() + (t0 - t1),
    };
    profile.check().map_err(PlanError::Unbacked)?;
    Ok(ControlledPlan {
        u0,
        k1,
        f2,
        profile,
    })
}

/// κ₂ bookkeeping for a node `u` at the end of κ₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kappa2Context {
    /// Indices `i ∈ V1` with `x̃_i` on the path to `u`.
    pub vmarked: Vec<usize>,
    /// `C'_R(u)` in expansion order.
    pub cr_u: Vec<Clause>,
    /// Index `i` of each clause of `cr_u`.
    pub cr_u_index: Vec<usize>,
    pub ell: usize,
}

pub fn stage_kappa2(plan: &ControlledPlan, ones_u: VarSet) -> Kappa2Context {
    let vmarked: Vec<usize> = plan
        .k1
        .v1
        .iter()
        .copied()
        .filter(|&i| plan.k1.a[i].is_some_and(|a| ones_u.contains(a)))
        .collect();
    let mut cr_u = Vec::new();
    let mut cr_u_index = Vec::new();
    for (c, &i) in plan.f2.cr.members().iter().zip(&plan.f2.cr_index) {
        if vmarked.contains(&i) {
            cr_u.push(c.clone());
            cr_u_index.push(i);
        }
    }
    let ell = cr_u.len();
    Kappa2Context {
        vmarked,
        cr_u,
        cr_u_index,
        ell,
    }
}

/// Budget for heavy nodes on any shoot below `u`.
pub fn heavy_budget(plan: &ControlledPlan, k2: &Kappa2Context) -> usize {
    (plan.profile.m_r_prime + plan.profile.m_b).saturating_sub(k2.ell)
}

/// Largest pairwise disjoint subset, by exhaustive search over a small
/// list.
fn max_disjoint_subset(cls: &[Clause]) -> Vec<Clause> {
    fn go(cls: &[Clause], i: usize, cur: &mut Vec<Clause>, best: &mut Vec<Clause>) {
        if cur.len() + (cls.len() - i) <= best.len() {
            return;
        }
        if i == cls.len() {
            *best = cur.clone();
            return;
        }
        if cur.iter().all(|c| !c.shares_var(&cls[i])) {
            cur.push(cls[i].clone());
            go(cls, i + 1, cur, best);
            cur.pop();
        }
        go(cls, i + 1, cur, best);
    }
    let mut best = Vec::new();
    go(cls, 0, &mut Vec::new(), &mut best);
    best
}

/// Witness for a shoot carrying more heavy nodes than the budget allows.
pub fn heavy_witness(
    plan: &ControlledPlan,
    k2: &Kappa2Context,
    heavy: &[Clause],
) -> Option<ResetWitness> {
    for c in heavy {
        if let Some(w) = pseudomax_witness(&plan.u0, &plan.k1, c) {
            return Some(w);
        }
    }
    let in_r: Vec<Clause> = heavy
        .iter()
        .filter(|c| plan.f2.f2r.contains(c) && k2.cr_u.iter().all(|d| !d.shares_var(c)))
        .cloned()
        .collect();
    let s_r = max_disjoint_subset(&in_r);
    if s_r.len() + k2.ell > plan.profile.m_r_prime {
        let removed: Vec<Clause> = plan
            .f2
            .cr
            .members()
            .iter()
            .filter(|c| !k2.cr_u.contains(c))
            .cloned()
            .collect();
        return Some(ResetWitness {
            stage: StageTag::CR,
            removed,
            added: s_r,
            reason: WitnessReason::HeavyOverflowR,
        });
    }
    let in_b: Vec<Clause> = heavy
        .iter()
        .filter(|c| plan.f2.f2b.contains(c))
        .cloned()
        .collect();
    let s_b = max_disjoint_subset(&in_b);
    if s_b.len() > plan.profile.m_b {
        let removed: Vec<Clause> = plan
            .profile
            .vb
            .iter()
            .map(|&i| plan.u0.c0()[i].clone())
            .collect();
        return Some(ResetWitness {
            stage: StageTag::C0,
            removed,
            added: s_b,
            reason: WitnessReason::HeavyOverflowB,
        });
    }
    None
}

/// Canonical arbitrary-stage pick: among clauses whose simplification at
/// `ones` is positive, the one with the fewest variables left, ties broken
/// lexicographically on the sorted variable list.
pub fn arbitrary_stage_pick(f: &Formula, ones: &Assignment) -> Option<Clause> {
    let packed = PackedFormula::new(f);
    let i = packed.scan(ones.to_varset()).best_positive?;
    f.clauses()[i].simplify(ones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::maj;

    fn m(v: &[Var]) -> Clause {
        Clause::monotone(v.iter().copied())
    }

    #[test]
    fn route_boundaries() {
        assert_eq!(branch_on_t0(2, 8), Route::Arbitrary);
        assert_eq!(branch_on_t0(3, 8), Route::Arbitrary);
        assert_eq!(branch_on_t0(1, 8), Route::Controlled);
        assert_eq!(branch_on_t0(0, 0), Route::Arbitrary);
    }

    #[test]
    fn disjoint_stage_sizes() {
        let f = maj(4, 3).unwrap().negation_closure();
        assert_eq!(disjoint_stage(&f).len(), 1);
        let f = maj(8, 3).unwrap().negation_closure();
        assert_eq!(disjoint_stage(&f).len(), 2);
        let f = Formula::new(3, [Clause::from_dimacs(&[1, -2, 3])]).unwrap();
        assert_eq!(disjoint_stage(&f.negation_closure()).len(), 0);
    }

    #[test]
    fn kappa1_single_candidate() {
        // C0 = {123}, path took x1, so X_0 = {2, 3}.
        let f = Formula::new(6, [m(&[1, 2, 3]), m(&[2, 5, 6])]).unwrap();
        let u0 = U0Frame::new(&[m(&[1, 2, 3])], VarSet::from_vars([1])).unwrap();
        let k1 = stage_kappa1(&f, &u0, None).unwrap();
        assert_eq!(k1.c1.members(), &[m(&[2, 5, 6])]);
        assert_eq!(k1.t1(), 1);
        assert_eq!(k1.v1, vec![0]);
        assert_eq!(k1.a[0], Some(2));
        assert_eq!(k1.b[0], Some(3));
        assert_eq!(k1.y[0], Some([5, 6]));
    }

    #[test]
    fn kappa1_empty() {
        let f = Formula::new(6, [m(&[1, 2, 3]), m(&[4, 5, 6])]).unwrap();
        let u0 = U0Frame::new(&[m(&[1, 2, 3]), m(&[4, 5, 6])], VarSet::from_vars([1, 4])).unwrap();
        let k1 = stage_kappa1(&f, &u0, None).unwrap();
        assert_eq!(k1.t1(), 0);
    }

    #[test]
    fn kappa1_disjoint_pair_resets_c0() {
        let f = Formula::new(7, [m(&[1, 2, 3]), m(&[2, 4, 5]), m(&[3, 6, 7])]).unwrap();
        let u0 = U0Frame::new(&[m(&[1, 2, 3])], VarSet::from_vars([1])).unwrap();
        let err = stage_kappa1(&f, &u0, None).unwrap_err();
        let PlanError::Reset(w) = err else {
            panic!("expected reset")
        };
        assert_eq!(w.stage, StageTag::C0);
        assert_eq!(w.removed, vec![m(&[1, 2, 3])]);
        assert_eq!(w.added, vec![m(&[2, 4, 5]), m(&[3, 6, 7])]);
        let mut c0 = disjoint_stage(&Formula::new(7, [m(&[1, 2, 3])]).unwrap());
        let ev = c0.attempt_reset(&w.removed, &w.added).unwrap().unwrap();
        assert_eq!(ev.new_size, ev.old_size + 1);
    }

    fn two_block_frame() -> (U0Frame, Kappa1, Formula) {
        // C0 = {1 2 3, 4 5 6}, path took 1 and 4. C1 = {2 7 8}.
        let f = Formula::new(12, [m(&[1, 2, 3]), m(&[4, 5, 6]), m(&[2, 7, 8])]).unwrap();
        let u0 = U0Frame::new(&[m(&[1, 2, 3]), m(&[4, 5, 6])], VarSet::from_vars([1, 4])).unwrap();
        let k1 = stage_kappa1(&f, &u0, None).unwrap();
        (u0, k1, f)
    }

    #[test]
    fn f2_forms() {
        let (u0, k1, _) = two_block_frame();
        assert_eq!(k1.v1, vec![0]);
        let f = Formula::new(
            12,
            [
                m(&[1, 2, 3]),
                m(&[4, 5, 6]),
                m(&[2, 7, 8]),
                m(&[3, 7, 9]),  // own Y
                m(&[3, 5, 10]), // open with V_B
                m(&[5, 6, 11]), // both V_B (same index)
                m(&[6, 8, 12]), // V_B with Y
            ],
        )
        .unwrap();
        let split = classify_f2(&f, &u0, &k1, None).unwrap();
        let forms: Vec<F2Form> = split.f2.iter().map(|(_, k)| *k).collect();
        assert!(forms.contains(&F2Form::OwnY));
        assert!(forms.contains(&F2Form::OpenB));
        assert!(forms.contains(&F2Form::BothB));
        assert!(forms.contains(&F2Form::BWithY));
        assert_eq!(split.f2r.len(), 2);
        assert_eq!(split.f2b.len(), 2);
        assert_eq!(split.vr, vec![0]);
        assert_eq!(split.cr.len(), 1);
        assert_eq!(split.vr_prime, vec![0]);
    }

    #[test]
    fn f2_empty() {
        let (u0, k1, f) = two_block_frame();
        let split = classify_f2(&f, &u0, &k1, None).unwrap();
        assert!(split.f2.is_empty());
        assert_eq!(split.cr.len(), 0);
    }

    #[test]
    fn witnesses_by_shape() {
        let (u0, k1, _) = two_block_frame();
        // No open variable at all.
        let w = pseudomax_witness(&u0, &k1, &m(&[9, 10, 11])).unwrap();
        assert_eq!((w.stage, w.reason), (StageTag::C0, WitnessReason::MissesC0));
        // Open V_B variable with two free variables.
        let w = pseudomax_witness(&u0, &k1, &m(&[5, 9, 10])).unwrap();
        assert_eq!((w.stage, w.reason), (StageTag::C1, WitnessReason::MissesC1));
        // Other open variable of a V1 index, avoiding its Y.
        let w = pseudomax_witness(&u0, &k1, &m(&[3, 9, 10])).unwrap();
        assert_eq!(w.reason, WitnessReason::OpenVariableAvoidsC1);
        assert_eq!(w.added, vec![m(&[2, 7, 8]), m(&[3, 9, 10])]);
        // Its own Y is not a witness.
        assert_eq!(pseudomax_witness(&u0, &k1, &m(&[3, 7, 9])), None);
    }

    #[test]
    fn kappa2_length() {
        let (u0, _, _) = two_block_frame();
        let f = Formula::new(
            12,
            [m(&[1, 2, 3]), m(&[4, 5, 6]), m(&[2, 7, 8]), m(&[3, 7, 9])],
        )
        .unwrap();
        let plan = plan_controlled(&f, u0.clone(), PlanPrior::default()).unwrap();
        assert_eq!(plan.profile.m_r_prime, 1);
        let k2 = stage_kappa2(&plan, VarSet::from_vars([1, 4, 7]));
        assert_eq!(k2.ell, 0);
        let k2 = stage_kappa2(&plan, VarSet::from_vars([1, 4, 2]));
        assert_eq!(k2.ell, 1);
        assert_eq!(k2.cr_u, vec![m(&[3, 7, 9])]);
    }

    #[test]
    fn arbitrary_pick_examples() {
        let f = Formula::new(7, [m(&[5, 6, 7])]).unwrap();
        assert_eq!(
            arbitrary_stage_pick(&f, &Assignment::default()),
            Some(m(&[5, 6, 7]))
        );
        let f = Formula::new(7, [m(&[5, 6, 7]), Clause::from_dimacs(&[-1, 5])]).unwrap();
        assert_eq!(
            arbitrary_stage_pick(&f, &Assignment::new([1])),
            Some(m(&[5]))
        );
        assert_eq!(arbitrary_stage_pick(&f, &Assignment::new([5])), None);
    }
}
