//! Finite Kripke models and the evaluation of formulas and sequents in them.

mod eval;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::Var;

pub use eval::{
    classical_eval, eval_formula, eval_sequent, model_validates, ClassicalStructure, EvalError,
    Evaluator, ModelVerdict,
};
pub use io::ModelFileError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WorldId(pub usize);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ElementId(pub usize);

/// A finite Kripke model `⟨W, ⪯, D, I⟩`.
///
/// Interpretations default to 0; only the tuples mapped to 1 are stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KripkeModel {
    world_names: Vec<String>,
    element_names: Vec<String>,
    leq: Vec<Vec<bool>>,
    domains: Vec<Vec<ElementId>>,
    in_domain: Vec<Vec<bool>>,
    facts: BTreeMap<String, Vec<BTreeSet<Vec<ElementId>>>>,
}

/// One violated model invariant.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum Violation {
    #[error("order is not reflexive at {0}")]
    NotReflexive(String),
    #[error("order is not transitive: {0} ⪯ {1} ⪯ {2} but not {0} ⪯ {2}")]
    NotTransitive(String, String, String),
    #[error("domain of {0} is empty")]
    EmptyDomain(String),
    #[error("domain not monotone: {element} is in D({lower}) but not in D({upper})")]
    DomainNotMonotone {
        lower: String,
        upper: String,
        element: String,
    },
    #[error("heredity fails: {pred}({args}) holds at {lower} but not at {upper}")]
    Heredity {
        lower: String,
        upper: String,
        pred: String,
        args: String,
    },
    #[error("fact {pred}({args}) at {world} uses elements outside D({world})")]
    FactOutsideDomain {
        world: String,
        pred: String,
        args: String,
    },
    #[error("predicate {0} is used with more than one arity")]
    ArityConflict(String),
}

impl KripkeModel {
    /// Builds a model, closing `order` reflexively and transitively.
    ///
    /// `domains[w]` lists element indices; `facts` lists `(world, predicate, args)`
    /// for the tuples interpreted as 1. Panics on out-of-range indices.
    pub fn new(
        world_names: Vec<String>,
        element_names: Vec<String>,
        order: &[(WorldId, WorldId)],
        domains: Vec<Vec<ElementId>>,
        facts: impl IntoIterator<Item = (WorldId, String, Vec<ElementId>)>,
    ) -> Self {
        let n = world_names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in order {
            leq[a.0][b.0] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::with_exact_order(world_names, element_names, leq, domains, facts)
    }

    /// Builds a model with `leq` taken verbatim (no closure).
    pub fn with_exact_order(
        world_names: Vec<String>,
        element_names: Vec<String>,
        leq: Vec<Vec<bool>>,
        domains: Vec<Vec<ElementId>>,
        facts: impl IntoIterator<Item = (WorldId, String, Vec<ElementId>)>,
    ) -> Self {
        let n = world_names.len();
        let m = element_names.len();
        assert_eq!(leq.len(), n, "order matrix size");
        assert_eq!(domains.len(), n, "one domain per world");
        let mut in_domain = vec![vec![false; m]; n];
        let domains: Vec<Vec<ElementId>> = domains
            .into_iter()
            .enumerate()
            .map(|(w, mut d)| {
                d.sort();
                d.dedup();
                for e in &d {
                    in_domain[w][e.0] = true;
                }
                d
            })
            .collect();
        let mut fact_map: BTreeMap<String, Vec<BTreeSet<Vec<ElementId>>>> = BTreeMap::new();
        for (w, pred, args) in facts {
            assert!(w.0 < n, "fact at unknown world");
            assert!(args.iter().all(|e| e.0 < m), "fact on unknown element");
            fact_map
                .entry(pred)
                .or_insert_with(|| vec![BTreeSet::new(); n])[w.0]
                .insert(args);
        }
        KripkeModel {
            world_names,
            element_names,
            leq,
            domains,
            in_domain,
            facts: fact_map,
        }
    }

    pub fn world_count(&self) -> usize {
        self.world_names.len()
    }

    pub fn worlds(&self) -> impl Iterator<Item = WorldId> {
        (0..self.world_names.len()).map(WorldId)
    }

    pub fn element_count(&self) -> usize {
        self.element_names.len()
    }

    pub fn world_name(&self, w: WorldId) -> &str {
        &self.world_names[w.0]
    }

    pub fn element_name(&self, e: ElementId) -> &str {
        &self.element_names[e.0]
    }

    pub fn world_names(&self) -> &[String] {
        &self.world_names
    }

    pub fn element_names(&self) -> &[String] {
        &self.element_names
    }

    pub fn world_by_name(&self, name: &str) -> Option<WorldId> {
        self.world_names.iter().position(|n| n == name).map(WorldId)
    }

    pub fn element_by_name(&self, name: &str) -> Option<ElementId> {
        self.element_names.iter().position(|n| n == name).map(ElementId)
    }

    /// `w ⪯ v`.
    pub fn leq(&self, w: WorldId, v: WorldId) -> bool {
        self.leq[w.0][v.0]
    }

    /// All `v` with `w ⪯ v`, in world order.
    pub fn successors(&self, w: WorldId) -> impl Iterator<Item = WorldId> + '_ {
        self.leq[w.0]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| WorldId(v))
    }

    /// `D(w)` in declaration order.
    pub fn domain(&self, w: WorldId) -> &[ElementId] {
        &self.domains[w.0]
    }

    pub fn in_domain(&self, w: WorldId, e: ElementId) -> bool {
        self.in_domain[w.0][e.0]
    }

    /// `I(w, p)(args)`; 0 for predicates with no stored facts.
    pub fn holds(&self, w: WorldId, pred: &str, args: &[ElementId]) -> bool {
        self.facts
            .get(pred)
            .is_some_and(|per_world| per_world[w.0].contains(args))
    }

    /// Stored 1-entries as `(world, predicate, args)`, sorted.
    pub fn facts(&self) -> impl Iterator<Item = (WorldId, &str, &[ElementId])> {
        self.facts.iter().flat_map(|(p, per_world)| {
            per_world.iter().enumerate().flat_map(move |(w, set)| {
                set.iter().map(move |args| (WorldId(w), p.as_str(), args.as_slice()))
            })
        })
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.facts.keys().map(String::as_str)
    }

    fn args_string(&self, args: &[ElementId]) -> String {
        args.iter()
            .map(|e| self.element_names[e.0].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Every violated invariant; empty means the model is a valid Kripke model.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.world_count();
        let name = |w: usize| self.world_names[w].clone();
        let mut out = Vec::new();
        for w in 0..n {
            if !self.leq[w][w] {
                out.push(Violation::NotReflexive(name(w)));
            }
        }
        for u in 0..n {
            for v in 0..n {
                if !self.leq[u][v] {
                    continue;
                }
                for w in 0..n {
                    if self.leq[v][w] && !self.leq[u][w] {
                        out.push(Violation::NotTransitive(name(u), name(v), name(w)));
                    }
                }
            }
        }
        for w in 0..n {
            if self.domains[w].is_empty() {
                out.push(Violation::EmptyDomain(name(w)));
            }
        }
        for w in 0..n {
            for v in 0..n {
                if w == v || !self.leq[w][v] {
                    continue;
                }
                for e in &self.domains[w] {
                    if !self.in_domain[v][e.0] {
                        out.push(Violation::DomainNotMonotone {
                            lower: name(w),
                            upper: name(v),
                            element: self.element_names[e.0].clone(),
                        });
                    }
                }
            }
        }
        for (pred, per_world) in &self.facts {
            let arities: BTreeSet<usize> =
                per_world.iter().flat_map(|s| s.iter().map(Vec::len)).collect();
            if arities.len() > 1 {
                out.push(Violation::ArityConflict(pred.clone()));
            }
            for (w, set) in per_world.iter().enumerate() {
                for args in set {
                    if args.iter().any(|e| !self.in_domain[w][e.0]) {
                        out.push(Violation::FactOutsideDomain {
                            world: name(w),
                            pred: pred.clone(),
                            args: self.args_string(args),
                        });
                    }
                    for v in 0..n {
                        if v != w && self.leq[w][v] && !per_world[v].contains(args) {
                            out.push(Violation::Heredity {
                                lower: name(w),
                                upper: name(v),
                                pred: pred.clone(),
                                args: self.args_string(args),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// `D(w) = D(v)` for all worlds.
    pub fn is_constant_domain(&self) -> bool {
        self.domains.windows(2).all(|p| p[0] == p[1])
    }

    /// Whether `⪯` is antisymmetric.
    pub fn is_partial_order(&self) -> bool {
        let n = self.world_count();
        (0..n).all(|i| (0..n).all(|j| i == j || !(self.leq[i][j] && self.leq[j][i])))
    }
}

/// `validate_model`.
pub fn validate_model(k: &KripkeModel) -> Vec<Violation> {
    k.validate()
}

pub fn is_constant_domain(k: &KripkeModel) -> bool {
    k.is_constant_domain()
}

/// A partial map from variables to elements.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Assignment(BTreeMap<Var, ElementId>);

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    /// `ρ[x ↦ a]`.
    pub fn with(&self, x: &Var, a: ElementId) -> Self {
        let mut m = self.0.clone();
        m.insert(x.clone(), a);
        Assignment(m)
    }

    pub fn set(&mut self, x: Var, a: ElementId) {
        self.0.insert(x, a);
    }

    pub fn get(&self, x: &Var) -> Option<ElementId> {
        self.0.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, ElementId)> {
        self.0.iter().map(|(x, &e)| (x, e))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Self {
        Assignment(
            self.0
                .iter()
                .filter(|(x, _)| vars.contains(*x))
                .map(|(x, &e)| (x.clone(), e))
                .collect(),
        )
    }

    /// Renders with element names from `k`, e.g. `{x ↦ a1}`.
    pub fn display<'a>(&'a self, k: &'a KripkeModel) -> impl fmt::Display + 'a {
        AssignmentDisplay(self, k)
    }
}

impl FromIterator<(Var, ElementId)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Var, ElementId)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

struct AssignmentDisplay<'a>(&'a Assignment, &'a KripkeModel);

impl fmt::Display for AssignmentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} ↦ {}", self.1.element_name(e))?;
        }
        f.write_str("}")
    }
}

/// All total assignments of `vars` into `D(w)`, in the reproducible order:
/// variables sorted, first variable most significant, elements in declaration order.
pub fn assignments_over(k: &KripkeModel, w: WorldId, vars: &BTreeSet<Var>) -> Vec<Assignment> {
    let dom = k.domain(w);
    let mut out = vec![Assignment::empty()];
    for x in vars {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for rho in &out {
            for &a in dom {
                next.push(rho.with(x, a));
            }
        }
        out = next;
    }
    out
}
