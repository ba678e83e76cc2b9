//! Transversal trees: nodes, labeled edges, marking sets and the shoot
//! accounting (defect, weight, mass) used by the analysis.
//!
//! The search never stores a whole tree. [`Tree`] is the fully
//! materialized debug form built by [`crate::search::materialize`].

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::analysis::Rational;
use crate::cnf::{Clause, Var};
use crate::matching::ResetEvent;
use crate::selection::{Route, StageProfile};
use crate::varset::VarSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Disjoint,
    Kappa1,
    Kappa2,
    Arbitrary,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Disjoint => "disjoint",
            Stage::Kappa1 => "kappa1",
            Stage::Kappa2 => "kappa2",
            Stage::Arbitrary => "arbitrary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafKind {
    None,
    Falsified,
    Viable,
}

impl LeafKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LeafKind::None => "internal",
            LeafKind::Falsified => "falsified",
            LeafKind::Viable => "viable",
        }
    }
}

/// Ancestors other than the tail of an edge that have a child edge with the
/// same label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MarkingSet {
    markers: Vec<usize>,
}

impl MarkingSet {
    pub fn new(mut markers: Vec<usize>) -> Self {
        markers.sort_unstable();
        markers.dedup();
        MarkingSet { markers }
    }

    pub fn markers(&self) -> &[usize] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn is_disjoint(&self, other: &MarkingSet) -> bool {
        self.markers
            .iter()
            .all(|m| other.markers.binary_search(m).is_err())
    }

    /// Survival probability `2^{-|M|}` of a non-falsifying edge.
    pub fn survival(&self) -> Rational {
        Rational::new(1.into(), num_bigint::BigInt::one() << self.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInfo {
    pub label: Var,
    pub marking: MarkingSet,
    pub falsifying: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub id: usize,
    pub depth: usize,
    pub parent: Option<usize>,
    pub parent_edge: Option<EdgeInfo>,
    /// Selected clause as simplified at this node.
    pub clause: Option<Clause>,
    pub children: Vec<usize>,
    /// Stage that expanded this node; `None` for leaves.
    pub stage: Option<Stage>,
    pub leaf_kind: LeafKind,
    /// `Q(v)`.
    pub ones: VarSet,
    /// Viable leaf whose `Q` satisfies the formula.
    pub transversal: bool,
    /// Heavy-node budget in force below this node (arbitrary stage of the
    /// controlled route only).
    pub heavy_budget: Option<usize>,
    /// Length of κ₂ below the end of κ₁ on this node's path.
    pub ell: Option<usize>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.leaf_kind != LeafKind::None
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ShootStats {
    pub marked_edge_count: usize,
    pub defect: usize,
    pub weight: usize,
}

/// A fully materialized transversal tree (no pruning).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
    pub n: u32,
    pub t: usize,
    pub t0: usize,
    pub route: Route,
    pub resets: Vec<ResetEvent>,
    pub claim_violations: Vec<String>,
    /// Controlled-stage profile for each level-`t0` node id.
    pub profiles: Vec<(usize, StageProfile)>,
}

impl Tree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn edge(&self, child: usize) -> Option<&EdgeInfo> {
        self.nodes[child].parent_edge.as_ref()
    }

    /// Ids from the root down to `id`.
    pub fn path(&self, id: usize) -> Vec<usize> {
        let mut p = vec![id];
        let mut cur = id;
        while let Some(par) = self.nodes[cur].parent {
            p.push(par);
            cur = par;
        }
        p.reverse();
        p
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn viable_leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes
            .iter()
            .filter(|n| n.leaf_kind == LeafKind::Viable)
    }

    /// `ψ(r) = Σ` over viable leaves of the product of `2^{-|M(e)|}`
    /// along the root path.
    pub fn psi_by_paths(&self) -> Rational {
        let mut total = Rational::zero();
        for leaf in self.viable_leaves() {
            let marks: usize = self
                .path(leaf.id)
                .iter()
                .skip(1)
                .map(|&v| self.edge(v).map_or(0, |e| e.marking.len()))
                .sum();
            total += Rational::new(1.into(), num_bigint::BigInt::one() << marks);
        }
        total
    }

    /// `ψ(u)` for every node, bottom-up: `ψ(u) = Σ σ(uv) ψ(v)`.
    pub fn psi_bottom_up(&self) -> Vec<Rational> {
        let mut psi = vec![Rational::zero(); self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            psi[id] = match node.leaf_kind {
                LeafKind::Viable => Rational::one(),
                LeafKind::Falsified => Rational::zero(),
                LeafKind::None => node
                    .children
                    .iter()
                    .map(|&c| {
                        let e = self.edge(c).expect("child has an edge");
                        if e.falsifying {
                            Rational::zero()
                        } else {
                            e.marking.survival() * &psi[c]
                        }
                    })
                    .fold(Rational::zero(), |a, b| a + b),
            };
        }
        psi
    }
}

/// Child count minus falsifying child edges.
pub fn effective_width(tree: &Tree, node: usize) -> usize {
    let n = tree.node(node);
    n.children
        .iter()
        .filter(|&&c| !tree.edge(c).is_some_and(|e| e.falsifying))
        .count()
}

/// `Σ 2^{-|M(e)|}` over non-falsifying child edges.
pub fn mass(tree: &Tree, node: usize) -> Rational {
    tree.node(node)
        .children
        .iter()
        .filter_map(|&c| tree.edge(c))
        .filter(|e| !e.falsifying)
        .map(|e| e.marking.survival())
        .fold(Rational::zero(), |a, b| a + b)
}

/// Number of marked child edges.
pub fn marked_children(tree: &Tree, node: usize) -> usize {
    tree.node(node)
        .children
        .iter()
        .filter(|&&c| tree.edge(c).is_some_and(|e| !e.marking.is_empty()))
        .count()
}

/// Statistics of the shoot `S(from, to)`: the edges of `P(from, to)` plus
/// every child edge of the path nodes other than `to`.
pub fn shoot_stats(tree: &Tree, from: usize, to: usize) -> Option<ShootStats> {
    let path = tree.path(to);
    let start = path.iter().position(|&v| v == from)?;
    let mut s = ShootStats::default();
    for &v in &path[start..path.len() - 1] {
        let node = tree.node(v);
        s.defect += 3usize.saturating_sub(node.children.len());
        s.marked_edge_count += node
            .children
            .iter()
            .filter(|&&c| tree.edge(c).is_some_and(|e| !e.marking.is_empty()))
            .count();
    }
    s.weight = s.marked_edge_count + s.defect;
    Some(s)
}

/// Text export, one node per line in preorder:
/// `depth parent_label |M(e)| stage leaf_kind`, with `-` for absent fields.
pub fn export_text(tree: &Tree) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# n={} t={} t0={} route={:?} nodes={}",
        tree.n,
        tree.t,
        tree.t0,
        tree.route,
        tree.nodes.len()
    );
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        let (label, marks) = match &node.parent_edge {
            Some(e) => (e.label.to_string(), e.marking.len().to_string()),
            None => ("-".to_string(), "-".to_string()),
        };
        let stage = node.stage.map_or("-", Stage::as_str);
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            node.depth,
            label,
            marks,
            stage,
            node.leaf_kind.as_str()
        );
        stack.extend(node.children.iter().rev());
    }
    out
}

/// One violated structural property of a materialized tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantViolation {
    pub node: usize,
    pub property: &'static str,
    pub detail: String,
}

/// Checks every structural property the analysis relies on. An empty
/// result means the tree is clean.
pub fn check_invariants(tree: &Tree) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    let bad = |out: &mut Vec<InvariantViolation>, node, property, detail: String| {
        out.push(InvariantViolation {
            node,
            property,
            detail,
        })
    };
    let limit_for = |marked: usize| -> Option<Rational> {
        match marked {
            1 => Some(Rational::new(5.into(), 2.into())),
            2 => Some(Rational::from_integer(2.into())),
            3 => Some(Rational::new(3.into(), 2.into())),
            _ => None,
        }
    };
    let nine_quarters = Rational::new(9.into(), 4.into());
    let three_halves = Rational::new(3.into(), 2.into());

    for node in &tree.nodes {
        let id = node.id;
        if node.depth > tree.t {
            bad(&mut out, id, "depth", format!("depth {} > t", node.depth));
        }
        if let Some(e) = &node.parent_edge {
            // Markers must lie strictly above the tail and carry the label.
            let path = tree.path(id);
            let tail = path[path.len() - 2];
            for &m in e.marking.markers() {
                let ok = path[..path.len() - 2].contains(&m)
                    && tree
                        .node(m)
                        .children
                        .iter()
                        .any(|&c| tree.edge(c).is_some_and(|ce| ce.label == e.label));
                if !ok || m == tail {
                    bad(&mut out, id, "marker", format!("bad marker {m}"));
                }
            }
            if !e.falsifying {
                for w in path.iter().skip(1).take(path.len() - 2) {
                    let pe = tree.edge(*w).expect("path edge");
                    if !pe.marking.is_disjoint(&e.marking) {
                        bad(
                            &mut out,
                            id,
                            "disjointly_marked",
                            format!("shares a marker with edge into {w}"),
                        );
                    }
                }
            }
        }
        if node.leaf_kind == LeafKind::Falsified && !node.children.is_empty() {
            bad(
                &mut out,
                id,
                "falsified_terminal",
                "falsified node has children".into(),
            );
        }
        if node.leaf_kind != LeafKind::None {
            // Weight along the root shoot. Shallow falsified leaves are held
            // to the bound for their own depth.
            let s = shoot_stats(tree, 0, id).expect("root is an ancestor");
            let need = 3 * node.depth as i64 - i64::from(tree.n);
            if (s.weight as i64) < need {
                bad(
                    &mut out,
                    id,
                    "shoot_weight",
                    format!("weight {} < 3*{} - {}", s.weight, node.depth, tree.n),
                );
            }
            continue;
        }

        let clause = node.clause.as_ref();
        let width = node.children.len();
        let marked = marked_children(tree, id);
        let m = mass(tree, id);
        if let Some(lim) = limit_for(marked) {
            if m > lim {
                bad(
                    &mut out,
                    id,
                    "mass_by_marking",
                    format!("{marked}-marked mass {m}"),
                );
            }
        }
        if node.depth >= tree.t0 && width == 3 && marked == 0 {
            bad(
                &mut out,
                id,
                "not_zero_marked",
                format!("clause {clause:?}"),
            );
        }
        match node.stage {
            Some(Stage::Kappa2) => {
                if effective_width(tree, id) > 2 {
                    bad(
                        &mut out,
                        id,
                        "kappa2_effective_width",
                        format!("clause {clause:?}"),
                    );
                }
                if m > three_halves {
                    bad(&mut out, id, "kappa2_mass", format!("mass {m}"));
                }
            }
            Some(Stage::Arbitrary)
                if tree.route == Route::Controlled && marked == 1 && m > nine_quarters =>
            {
                bad(&mut out, id, "one_marked_mass", format!("mass {m}"));
            }
            _ => {}
        }
    }

    if tree.route == Route::Controlled {
        for leaf in tree.leaves() {
            let path = tree.path(leaf.id);
            let mut heavy = 0usize;
            let mut budget = None;
            for &v in &path[..path.len() - 1] {
                let node = tree.node(v);
                if node.stage == Some(Stage::Arbitrary) {
                    budget = node.heavy_budget;
                    if is_heavy(tree, v) {
                        heavy += 1;
                    }
                }
            }
            if let Some(b) = budget {
                if heavy > b {
                    bad(
                        &mut out,
                        leaf.id,
                        "heavy_count",
                        format!("{heavy} heavy > {b}"),
                    );
                }
            }
        }
    }
    out
}

/// Width 3, markings `{0, 1, 1}` and no falsifying edge: mass exactly 2
/// with two marked edges.
pub fn is_heavy(tree: &Tree, node: usize) -> bool {
    let n = tree.node(node);
    if n.children.len() != 3 {
        return false;
    }
    let mut marks: Vec<usize> = Vec::with_capacity(3);
    for &c in &n.children {
        let e = tree.edge(c).expect("child edge");
        if e.falsifying {
            return false;
        }
        marks.push(e.marking.len());
    }
    marks.sort_unstable();
    marks == [0, 1, 1]
}
