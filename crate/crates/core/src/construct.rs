//! Tree unraveling of finite models and their constant-domain completion.
//!
//! Nodes of an unraveled tree are chains of worlds starting at a chosen root;
//! each node behaves like the last world of its chain. The completion keeps
//! the tree and replaces every domain by a single set of partial "choice
//! functions" that are constant along branches, with atoms holding of a tuple
//! of functions exactly when they hold wherever all of them are defined.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{
    assignments_over, eval_formula, eval_sequent, Assignment, ElementId, Evaluator, KripkeModel,
    WorldId,
};
use crate::syntax::{Formula, Sequent, Var};

/// Default cap on the number of choice functions built for a completion.
pub const DEFAULT_CHOICE_BUDGET: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("the order has a cycle through `{0}`; use the stuttered unraveling instead")]
    NotAntisymmetric(String),
    #[error("not a tree: {0}")]
    NotTree(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("node set is not upward closed: `{0}` is in it but its successor `{1}` is not")]
    NotUpwardClosed(String, String),
    #[error("the set does not bar the root")]
    DoesNotBarRoot,
    #[error("pin for `{node}` is {element}, which is not in its domain")]
    PinOutsideDomain { node: String, element: String },
    #[error("no pin for block minimum `{0}`")]
    MissingPin(String),
    #[error("pin given for `{0}`, which is not a block minimum")]
    StrayPin(String),
    #[error("more than {0} choice functions")]
    Budget(usize),
    #[error("stutter length must be at least 1")]
    ZeroLength,
    #[error("assignment value for `{0}` is not in the root domain")]
    AssignmentOutsideRoot(Var),
}

/// A model whose order is a finite rooted tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeModel {
    model: KripkeModel,
    root: WorldId,
    parent: Vec<Option<WorldId>>,
    last_map: Option<Vec<WorldId>>,
    truncated: bool,
}

impl TreeModel {
    /// Checks that the model's order is a rooted tree and recovers its parent map.
    pub fn from_model(model: KripkeModel) -> Result<Self, ConstructError> {
        if !model.is_partial_order() {
            let w = model
                .worlds()
                .find(|&w| model.worlds().any(|v| v != w && model.leq(w, v) && model.leq(v, w)))
                .expect("non-antisymmetric order has a cycle");
            return Err(ConstructError::NotAntisymmetric(model.world_name(w).to_string()));
        }
        let roots: Vec<WorldId> = model
            .worlds()
            .filter(|&r| model.worlds().all(|v| model.leq(r, v)))
            .collect();
        let root = match roots[..] {
            [r] => r,
            _ => return Err(ConstructError::NotTree("no least world".into())),
        };
        let mut parent = vec![None; model.world_count()];
        for v in model.worlds() {
            let below: Vec<WorldId> = model
                .worlds()
                .filter(|&u| u != v && model.leq(u, v))
                .collect();
            for (i, &a) in below.iter().enumerate() {
                for &b in &below[i + 1..] {
                    if !model.leq(a, b) && !model.leq(b, a) {
                        return Err(ConstructError::NotTree(format!(
                            "`{}` has incomparable predecessors `{}` and `{}`",
                            model.world_name(v),
                            model.world_name(a),
                            model.world_name(b)
                        )));
                    }
                }
            }
            parent[v.0] = below
                .iter()
                .copied()
                .find(|&u| below.iter().all(|&x| model.leq(x, u)));
        }
        Ok(TreeModel {
            model,
            root,
            parent,
            last_map: None,
            truncated: false,
        })
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn into_model(self) -> KripkeModel {
        self.model
    }

    pub fn root(&self) -> WorldId {
        self.root
    }

    pub fn parent(&self, w: WorldId) -> Option<WorldId> {
        self.parent[w.0]
    }

    pub fn children(&self, w: WorldId) -> impl Iterator<Item = WorldId> + '_ {
        self.model
            .worlds()
            .filter(move |&v| self.parent[v.0] == Some(w))
    }

    /// The parent-child pairs.
    pub fn covering(&self) -> Vec<(WorldId, WorldId)> {
        self.model
            .worlds()
            .filter_map(|v| self.parent[v.0].map(|p| (p, v)))
            .collect()
    }

    /// For unraveled trees: the original world each node stands for.
    pub fn last_map(&self) -> Option<&[WorldId]> {
        self.last_map.as_deref()
    }

    /// True for stuttered unravelings cut at a length bound, where value
    /// preservation and the bar property are only guaranteed in the limit.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn node_count(&self) -> usize {
        self.model.world_count()
    }

    pub fn upset(&self, w: WorldId) -> BTreeSet<WorldId> {
        self.model.successors(w).collect()
    }

    /// The deepest common ancestor of two nodes.
    pub fn meet(&self, a: WorldId, b: WorldId) -> WorldId {
        let mut x = a;
        while !self.model.leq(x, b) {
            x = self.parent[x.0].expect("the root is below every node");
        }
        x
    }
}

fn unravel(
    k: &KripkeModel,
    start: WorldId,
    step: impl Fn(WorldId, WorldId) -> bool,
    max_len: Option<usize>,
) -> TreeModel {
    let mut chains: Vec<Vec<WorldId>> = vec![vec![start]];
    let mut parent = vec![None];
    let mut i = 0;
    while i < chains.len() {
        let chain = chains[i].clone();
        if max_len.is_none_or(|l| chain.len() < l) {
            let last = *chain.last().expect("chains are nonempty");
            for v in k.worlds().filter(|&v| step(last, v)) {
                let mut next = chain.clone();
                next.push(v);
                chains.push(next);
                parent.push(Some(WorldId(i)));
            }
        }
        i += 1;
    }
    let names = chains
        .iter()
        .map(|c| {
            c.iter()
                .map(|&w| k.world_name(w))
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    let last_map: Vec<WorldId> = chains.iter().map(|c| *c.last().expect("nonempty")).collect();
    let n = chains.len();
    let order: Vec<(WorldId, WorldId)> = (0..n)
        .filter_map(|v| parent[v].map(|p: WorldId| (p, WorldId(v))))
        .collect();
    let domains = last_map.iter().map(|&w| k.domain(w).to_vec()).collect();
    let facts: Vec<(WorldId, String, Vec<ElementId>)> = last_map
        .iter()
        .enumerate()
        .flat_map(|(node, &w)| {
            k.facts()
                .filter(move |(fw, _, _)| *fw == w)
                .map(move |(_, p, args)| (WorldId(node), p.to_string(), args.to_vec()))
        })
        .collect();
    let model = KripkeModel::new(names, k.element_names().to_vec(), &order, domains, facts);
    TreeModel {
        model,
        root: WorldId(0),
        parent,
        last_map: Some(last_map),
        truncated: max_len.is_some(),
    }
}

/// `unravel_strict`: the tree of chains from `start` along covering steps of
/// the order. Node names join the world names with `.`.
pub fn unravel_strict(k: &KripkeModel, start: WorldId) -> Result<TreeModel, ConstructError> {
    if start.0 >= k.world_count() {
        return Err(ConstructError::UnknownWorld(format!("#{}", start.0)));
    }
    if !k.is_partial_order() {
        let w = k
            .worlds()
            .find(|&w| k.worlds().any(|v| v != w && k.leq(w, v) && k.leq(v, w)))
            .expect("non-antisymmetric order has a cycle");
        return Err(ConstructError::NotAntisymmetric(k.world_name(w).to_string()));
    }
    let covers = |a: WorldId, b: WorldId| {
        a != b
            && k.leq(a, b)
            && !k
                .worlds()
                .any(|c| c != a && c != b && k.leq(a, c) && k.leq(c, b))
    };
    Ok(unravel(k, start, covers, None))
}

/// `unravel_stuttered`: all chains `start ⪯ w1 ⪯ ...` of at most `length`
/// worlds, repeats allowed. The result is marked truncated.
pub fn unravel_stuttered(
    k: &KripkeModel,
    start: WorldId,
    length: usize,
) -> Result<TreeModel, ConstructError> {
    if length == 0 {
        return Err(ConstructError::ZeroLength);
    }
    if start.0 >= k.world_count() {
        return Err(ConstructError::UnknownWorld(format!("#{}", start.0)));
    }
    Ok(unravel(k, start, |a, b| k.leq(a, b), Some(length)))
}

/// Whether every maximal branch of the subtree at `w` meets `b`.
pub fn bars(t: &TreeModel, w: WorldId, b: &BTreeSet<WorldId>) -> bool {
    if b.contains(&w) {
        return true;
    }
    let mut children = t.children(w).peekable();
    children.peek().is_some() && children.all(|c| bars(t, c, b))
}

/// A set of tree nodes closed under successors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UpwardClosedSet(BTreeSet<WorldId>);

impl UpwardClosedSet {
    pub fn new(t: &TreeModel, nodes: BTreeSet<WorldId>) -> Result<Self, ConstructError> {
        for &w in &nodes {
            if let Some(v) = t.model.successors(w).find(|v| !nodes.contains(v)) {
                return Err(ConstructError::NotUpwardClosed(
                    t.model.world_name(w).to_string(),
                    t.model.world_name(v).to_string(),
                ));
            }
        }
        Ok(UpwardClosedSet(nodes))
    }

    pub fn upset(t: &TreeModel, w: WorldId) -> Self {
        UpwardClosedSet(t.upset(w))
    }

    pub fn all(t: &TreeModel) -> Self {
        UpwardClosedSet(t.model.worlds().collect())
    }

    pub fn nodes(&self) -> &BTreeSet<WorldId> {
        &self.0
    }

    pub fn contains(&self, w: WorldId) -> bool {
        self.0.contains(&w)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One block of a partition: an upward-closed set with a least node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub min: WorldId,
    pub nodes: BTreeSet<WorldId>,
}

/// `partition_upward_closed`: the connected pieces of `v` under the
/// parent-child relation, each of which is the upset of its least node.
pub fn partition_upward_closed(t: &TreeModel, v: &UpwardClosedSet) -> Vec<Block> {
    v.0.iter()
        .filter(|&&w| t.parent(w).is_none_or(|p| !v.contains(p)))
        .map(|&min| Block {
            min,
            nodes: t.upset(min),
        })
        .collect()
}

/// A partial map from tree nodes to elements; the individuals of the completion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ChoiceFunction(BTreeMap<WorldId, ElementId>);

impl ChoiceFunction {
    pub fn get(&self, w: WorldId) -> Option<ElementId> {
        self.0.get(&w).copied()
    }

    pub fn dom(&self) -> BTreeSet<WorldId> {
        self.0.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WorldId, ElementId)> + '_ {
        self.0.iter().map(|(&w, &e)| (w, e))
    }

    /// The total function with constant value `a`.
    pub fn constant(t: &TreeModel, a: ElementId) -> Self {
        ChoiceFunction(t.model.worlds().map(|w| (w, a)).collect())
    }

    pub fn display<'a>(&'a self, t: &'a TreeModel) -> impl fmt::Display + 'a {
        ChoiceDisplay(self, t)
    }
}

impl FromIterator<(WorldId, ElementId)> for ChoiceFunction {
    fn from_iter<I: IntoIterator<Item = (WorldId, ElementId)>>(iter: I) -> Self {
        ChoiceFunction(iter.into_iter().collect())
    }
}

struct ChoiceDisplay<'a>(&'a ChoiceFunction, &'a TreeModel);

impl fmt::Display for ChoiceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.1.model;
        let parts: Vec<String> = self
            .0
             .0
            .iter()
            .map(|(&w, &e)| format!("{} -> {}", k.world_name(w), k.element_name(e)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Every violated choice-function condition, described in words.
pub fn choice_violations(t: &TreeModel, f: &ChoiceFunction) -> Vec<String> {
    let k = &t.model;
    let dom = f.dom();
    let mut out = Vec::new();
    for &w in &dom {
        if let Some(v) = k.successors(w).find(|v| !dom.contains(v)) {
            out.push(format!(
                "domain not upward closed at {} (missing {})",
                k.world_name(w),
                k.world_name(v)
            ));
        }
    }
    if !bars(t, t.root, &dom) {
        out.push("domain does not bar the root".into());
    }
    for (w, e) in f.iter() {
        if !k.in_domain(w, e) {
            out.push(format!(
                "value {} at {} is outside its domain",
                k.element_name(e),
                k.world_name(w)
            ));
        }
        for v in k.successors(w) {
            if let Some(e2) = f.get(v) {
                if e2 != e {
                    out.push(format!(
                        "value changes from {} at {} to {} at {}",
                        k.element_name(e),
                        k.world_name(w),
                        k.element_name(e2),
                        k.world_name(v)
                    ));
                }
            }
        }
    }
    out
}

/// `extend_choice`: a choice function defined on `upset(w) ∩ s` with the
/// pinned values at the minima of that set's blocks.
///
/// It is also defined on every node incomparable with all those minima, with
/// each such block taking the first element of its least node's domain.
pub fn extend_choice(
    t: &TreeModel,
    s: &UpwardClosedSet,
    w: WorldId,
    pins: &BTreeMap<WorldId, ElementId>,
) -> Result<ChoiceFunction, ConstructError> {
    let k = &t.model;
    if !bars(t, t.root, &s.0) {
        return Err(ConstructError::DoesNotBarRoot);
    }
    let v: BTreeSet<WorldId> = t.upset(w).intersection(&s.0).copied().collect();
    let blocks = partition_upward_closed(t, &UpwardClosedSet(v));
    for &p in pins.keys() {
        if !blocks.iter().any(|b| b.min == p) {
            return Err(ConstructError::StrayPin(k.world_name(p).to_string()));
        }
    }
    let mut g = BTreeMap::new();
    for b in &blocks {
        let a = *pins
            .get(&b.min)
            .ok_or_else(|| ConstructError::MissingPin(k.world_name(b.min).to_string()))?;
        if !k.in_domain(b.min, a) {
            return Err(ConstructError::PinOutsideDomain {
                node: k.world_name(b.min).to_string(),
                element: k
                    .element_names()
                    .get(a.0)
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", a.0)),
            });
        }
        for &n in &b.nodes {
            g.insert(n, a);
        }
    }
    let comparable = |a: WorldId, b: WorldId| k.leq(a, b) || k.leq(b, a);
    let u: BTreeSet<WorldId> = k
        .worlds()
        .filter(|&n| blocks.iter().all(|b| !comparable(n, b.min)))
        .collect();
    for b in partition_upward_closed(t, &UpwardClosedSet(u)) {
        let first = *k
            .domain(b.min)
            .iter()
            .min()
            .expect("domains are nonempty");
        for &n in &b.nodes {
            g.insert(n, first);
        }
    }
    Ok(ChoiceFunction(g))
}

/// Upward-closed sets inside the subtree at `w` that bar `w`.
fn barring_sets(t: &TreeModel, w: WorldId) -> Vec<BTreeSet<WorldId>> {
    let mut out = vec![t.upset(w)];
    let children: Vec<WorldId> = t.children(w).collect();
    if children.is_empty() {
        return out;
    }
    let mut combos: Vec<BTreeSet<WorldId>> = vec![BTreeSet::new()];
    for c in children {
        let options = barring_sets(t, c);
        combos = combos
            .iter()
            .flat_map(|acc| {
                options.iter().map(move |o| {
                    let mut next = acc.clone();
                    next.extend(o.iter().copied());
                    next
                })
            })
            .collect();
    }
    out.extend(combos);
    out
}

/// `enumerate_Dpp`: every choice function on the tree, at most `budget` of them.
///
/// Ordered by domain (as produced by the recursive bar decomposition, the
/// full tree first), then by the values at block minima in element order.
pub fn enumerate_dpp(t: &TreeModel, budget: usize) -> Result<Vec<ChoiceFunction>, ConstructError> {
    let k = &t.model;
    let mut out = Vec::new();
    for dom in barring_sets(t, t.root) {
        let blocks = partition_upward_closed(t, &UpwardClosedSet(dom));
        let mut partial: Vec<BTreeMap<WorldId, ElementId>> = vec![BTreeMap::new()];
        for b in &blocks {
            let mut next = Vec::new();
            for g in &partial {
                for &a in k.domain(b.min) {
                    let mut h = g.clone();
                    for &n in &b.nodes {
                        h.insert(n, a);
                    }
                    next.push(h);
                }
            }
            if out.len() + next.len() > budget {
                return Err(ConstructError::Budget(budget));
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(ChoiceFunction));
        if out.len() > budget {
            return Err(ConstructError::Budget(budget));
        }
    }
    Ok(out)
}

/// The completion of a tree: a constant-domain model over the same nodes
/// whose elements are the tree's choice functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub model: KripkeModel,
    /// Element `F{i+1}` of the model is `functions[i]`.
    pub functions: Vec<ChoiceFunction>,
}

impl Completion {
    pub fn function(&self, e: ElementId) -> &ChoiceFunction {
        &self.functions[e.0]
    }

    pub fn element_of(&self, f: &ChoiceFunction) -> Option<ElementId> {
        self.functions.iter().position(|g| g == f).map(ElementId)
    }
}

/// `complete_to_constant_domain` with the default choice budget, over the
/// predicates that have facts in the tree.
///
/// A predicate with no facts at all can still hold of functions whose common
/// domain misses a node's upset, so callers that know the full signature
/// should use [`complete_to_constant_domain_with`].
pub fn complete_to_constant_domain(t: &TreeModel) -> Result<Completion, ConstructError> {
    complete_to_constant_domain_with(t, &BTreeMap::new(), DEFAULT_CHOICE_BUDGET)
}

/// The completion over the tree's predicates plus `preds`.
pub fn complete_to_constant_domain_with(
    t: &TreeModel,
    preds: &BTreeMap<String, usize>,
    budget: usize,
) -> Result<Completion, ConstructError> {
    let k = &t.model;
    let functions = enumerate_dpp(t, budget)?;
    let mut arities: BTreeMap<String, usize> = k
        .facts()
        .map(|(_, p, args)| (p.to_string(), args.len()))
        .collect();
    arities.extend(preds.iter().map(|(p, &n)| (p.clone(), n)));
    let mut facts = Vec::new();
    for (p, &n) in &arities {
        let tuples = product(functions.len(), n);
        for w in k.worlds() {
            for tuple in &tuples {
                let fs: Vec<&ChoiceFunction> = tuple.iter().map(|&i| &functions[i]).collect();
                let holds = k.successors(w).all(|v| {
                    let args: Option<Vec<ElementId>> = fs.iter().map(|f| f.get(v)).collect();
                    args.is_none_or(|args| k.holds(v, p, &args))
                });
                if holds {
                    facts.push((
                        w,
                        p.to_string(),
                        tuple.iter().map(|&i| ElementId(i)).collect(),
                    ));
                }
            }
        }
    }
    let all: Vec<ElementId> = (0..functions.len()).map(ElementId).collect();
    let model = KripkeModel::with_exact_order(
        k.world_names().to_vec(),
        (1..=functions.len()).map(|i| format!("F{i}")).collect(),
        k.worlds()
            .map(|w| k.worlds().map(|v| k.leq(w, v)).collect())
            .collect(),
        vec![all; k.world_count()],
        facts,
    );
    Ok(Completion { model, functions })
}

/// All `n`-tuples over `0..m` in lexicographic order.
fn product(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// `lift_assignment`: each variable goes to the total function constantly
/// equal to its value at the root.
pub fn lift_assignment(
    t: &TreeModel,
    completion: &Completion,
    rho: &Assignment,
) -> Result<Assignment, ConstructError> {
    rho.iter()
        .map(|(x, a)| {
            if !t.model.in_domain(t.root, a) {
                return Err(ConstructError::AssignmentOutsideRoot(x.clone()));
            }
            let f = ChoiceFunction::constant(t, a);
            let e = completion
                .element_of(&f)
                .expect("total constant functions are choice functions");
            Ok((x.clone(), e))
        })
        .collect()
}

/// Result of checking the main equivalence at one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaStatus {
    Holds,
    Fails,
    PreconditionFailed,
}

/// A place where the tree's value of a subformula disagrees with the bar
/// condition on its 1-set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarViolation {
    pub formula: String,
    pub node: String,
    pub assignment: String,
    pub value: bool,
    pub barred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub status: LemmaStatus,
    pub formula: String,
    pub node: String,
    /// Value in the completion at the node.
    pub completion_value: bool,
    /// Whether the tree makes the formula 1 at every node above where all
    /// free variables' functions are defined.
    pub tree_condition: bool,
    pub bar_violations: Vec<BarViolation>,
}

/// Bar-property failures of the tree for `phi` and all its subformulas.
pub fn bar_violations(t: &TreeModel, phi: &Formula) -> Vec<BarViolation> {
    let k = &t.model;
    let mut out = Vec::new();
    for psi in phi.subformulas() {
        let vars = psi.free_vars();
        for w in k.worlds() {
            for rho in assignments_over(k, w, &vars) {
                let ones: BTreeSet<WorldId> = k
                    .successors(w)
                    .filter(|&v| eval_formula(k, v, &rho, psi).expect("assignment in domain"))
                    .collect();
                let value = ones.contains(&w);
                let barred = bars(t, w, &ones);
                if value != barred {
                    out.push(BarViolation {
                        formula: psi.to_string(),
                        node: k.world_name(w).to_string(),
                        assignment: rho.display(k).to_string(),
                        value,
                        barred,
                    });
                }
            }
        }
    }
    out
}

/// `check_main_lemma_instance`: compares the completion's value of `phi` at
/// `w` under `rho` (an assignment into the completion's elements) with the
/// tree-side condition.
///
/// A mismatch is reported as `PreconditionFailed` when the tree lacks the bar
/// property for some subformula, and as `Fails` otherwise.
pub fn check_main_lemma_instance(
    t: &TreeModel,
    completion: &Completion,
    phi: &Formula,
    w: WorldId,
    rho: &Assignment,
) -> Result<LemmaReport, crate::semantics::EvalError> {
    let k = &t.model;
    let fv = phi.free_vars();
    let completion_value = eval_formula(&completion.model, w, rho, phi)?;
    let mut tree_condition = true;
    for v in k.successors(w) {
        let mut local = Assignment::empty();
        let mut defined = true;
        for x in &fv {
            let e = rho
                .get(x)
                .ok_or_else(|| crate::semantics::EvalError::Unbound(x.clone()))?;
            match completion.function(e).get(v) {
                Some(a) => local.set(x.clone(), a),
                None => defined = false,
            }
        }
        if defined && !eval_formula(k, v, &local, phi)? {
            tree_condition = false;
            break;
        }
    }
    let bar_violations = bar_violations(t, phi);
    let status = if completion_value == tree_condition {
        LemmaStatus::Holds
    } else if bar_violations.is_empty() {
        LemmaStatus::Fails
    } else {
        LemmaStatus::PreconditionFailed
    };
    Ok(LemmaReport {
        status,
        formula: phi.to_string(),
        node: k.world_name(w).to_string(),
        completion_value,
        tree_condition,
        bar_violations,
    })
}

/// Tries to turn a finite Kripke countermodel into a constant-domain one by
/// unraveling from the refuting world and completing.
///
/// Returns the completed model, its root, and the lifted assignment when the
/// sequent is still refuted there. Returns `None` if the order is not a
/// partial order, the completion is too large, or the refutation does not
/// survive (the finite tree may lack the bar property).
pub fn cd_countermodel_via_completion(
    k: &KripkeModel,
    world: WorldId,
    rho: &Assignment,
    seq: &Sequent,
) -> Option<(KripkeModel, WorldId, Assignment)> {
    let t = unravel_strict(k, world).ok()?;
    let completion = complete_to_constant_domain_with(&t, &seq.predicates(), 512).ok()?;
    let lifted = lift_assignment(&t, &completion, rho).ok()?;
    let refuted = !eval_sequent(&completion.model, t.root, &lifted, seq).ok()?;
    refuted.then_some((completion.model, t.root, lifted))
}

/// Worlds of the tree at which the sequent is refuted, with the first
/// refuting assignment; used to confirm that unraveling keeps refutations.
pub fn refutation_points(t: &TreeModel, seq: &Sequent) -> Vec<(WorldId, Assignment)> {
    let mut ev = Evaluator::new(&t.model);
    let vars = seq.free_vars();
    let mut out = Vec::new();
    for w in t.model.worlds() {
        for rho in assignments_over(&t.model, w, &vars) {
            if !ev.eval_sequent(w, &rho, seq).expect("assignment in domain") {
                out.push((w, rho));
                break;
            }
        }
    }
    out
}
