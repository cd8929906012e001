//! Bounded enumeration of finite Kripke models and validity verdicts.
//!
//! Search is sound for refutation: a `Refuted` verdict carries a genuine
//! countermodel. `ValidUpToBounds` only says that no countermodel exists
//! within the bounds.

mod corpus;
mod relations;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;
use thiserror::Error;

use crate::semantics::{Assignment, ElementId, Evaluator, KripkeModel, WorldId};
use crate::syntax::Sequent;

pub use corpus::{all_formulas, generate_corpus, random_formula, CorpusConfig};
pub use relations::{
    check_cd_to_classical, check_kripke_to_cd, classify_connectives, report_relations, Census,
    RelationReport, TransferOutcome, TransferReport,
};

/// Default cap on `max_worlds * max_domain`.
pub const DEFAULT_BUDGET: usize = 24;

/// Cap on the number of ground atoms per model (they are packed into a `u64`).
pub const MAX_ATOMS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("bounds {worlds} worlds x {domain} elements exceed the budget of {budget}")]
    Budget {
        worlds: usize,
        domain: usize,
        budget: usize,
    },
    #[error("bounds must be positive")]
    ZeroBound,
    #[error("{0} ground atoms exceed the limit of {MAX_ATOMS}")]
    TooManyAtoms(usize),
}

/// Shape of the accessibility relation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Shape {
    AnyPreorder,
    Poset,
    Tree,
    Chain,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::AnyPreorder => "any-preorder",
            Shape::Poset => "poset",
            Shape::Tree => "tree",
            Shape::Chain => "chain",
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any-preorder" | "preorder" | "any" => Ok(Shape::AnyPreorder),
            "poset" => Ok(Shape::Poset),
            "tree" => Ok(Shape::Tree),
            "chain" => Ok(Shape::Chain),
            other => Err(format!(
                "unknown shape `{other}` (expected any-preorder, poset, tree or chain)"
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SearchBounds {
    pub max_worlds: usize,
    pub max_domain: usize,
    pub shape: Shape,
    pub constant_domain: bool,
    pub budget: usize,
}

impl SearchBounds {
    pub fn new(max_worlds: usize, max_domain: usize, shape: Shape) -> Self {
        SearchBounds {
            max_worlds,
            max_domain,
            shape,
            constant_domain: false,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn constant_domain(mut self) -> Self {
        self.constant_domain = true;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn check(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 || self.max_domain == 0 {
            return Err(SearchError::ZeroBound);
        }
        if self.max_worlds * self.max_domain > self.budget {
            return Err(SearchError::Budget {
                worlds: self.max_worlds,
                domain: self.max_domain,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|W| <= {}, |D| <= {}, shape {}{}",
            self.max_worlds,
            self.max_domain,
            self.shape.name(),
            if self.constant_domain {
                ", constant domain"
            } else {
                ""
            }
        )
    }
}

/// Which class of models a sequent is checked against.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    Kripke,
    Cd,
    Classical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Kripke => "kripke",
            Mode::Cd => "cd",
            Mode::Classical => "classical",
        }
    }

    /// The bounds actually searched in this mode.
    pub fn restrict(self, bounds: SearchBounds) -> SearchBounds {
        match self {
            Mode::Kripke => bounds,
            Mode::Cd => bounds.constant_domain(),
            Mode::Classical => SearchBounds {
                max_worlds: 1,
                constant_domain: true,
                ..bounds
            },
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kripke" => Ok(Mode::Kripke),
            "cd" => Ok(Mode::Cd),
            "classical" => Ok(Mode::Classical),
            other => Err(format!(
                "unknown mode `{other}` (expected kripke, cd or classical)"
            )),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    ValidUpToBounds(SearchBounds),
    Refuted {
        model: KripkeModel,
        world: WorldId,
        assignment: Assignment,
    },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

/// All reflexive-transitive relations of the given shape on `n` worlds.
///
/// Except for `AnyPreorder`, worlds are labeled so that `i ⪯ j` implies `i <= j`.
pub fn frames(n: usize, shape: Shape) -> Vec<Vec<Vec<bool>>> {
    match shape {
        Shape::Chain => vec![(0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect()],
        Shape::Tree => {
            let mut out = Vec::new();
            let mut parent = vec![0usize; n];
            tree_frames(1, n, &mut parent, &mut out);
            out
        }
        Shape::Poset => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            closed_relations(n, &pairs)
        }
        Shape::AnyPreorder => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            closed_relations(n, &pairs)
        }
    }
}

fn tree_frames(i: usize, n: usize, parent: &mut Vec<usize>, out: &mut Vec<Vec<Vec<bool>>>) {
    if i >= n {
        let mut leq = vec![vec![false; n]; n];
        for v in 0..n {
            let mut u = v;
            loop {
                leq[u][v] = true;
                if u == 0 {
                    break;
                }
                u = parent[u];
            }
        }
        out.push(leq);
        return;
    }
    for p in 0..i {
        parent[i] = p;
        tree_frames(i + 1, n, parent, out);
    }
}

fn closed_relations(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<Vec<bool>>> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| !leq[i][j] || (0..n).all(|k| !leq[j][k] || leq[i][k]))
        });
        if transitive {
            out.push(leq);
        }
    }
    out
}

/// A frame with domains; interpretations are enumerated per skeleton.
#[derive(Clone, Debug)]
struct Skeleton {
    leq: Vec<Vec<bool>>,
    elements: usize,
    domains: Vec<u32>,
}

fn skeletons(bounds: &SearchBounds) -> Vec<Skeleton> {
    let mut out = Vec::new();
    for n in 1..=bounds.max_worlds {
        for leq in frames(n, bounds.shape) {
            for m in 1..=bounds.max_domain {
                let full = (1u32 << m) - 1;
                if bounds.constant_domain {
                    out.push(Skeleton {
                        leq: leq.clone(),
                        elements: m,
                        domains: vec![full; n],
                    });
                    continue;
                }
                let mut doms = vec![0u32; n];
                domain_assignments(0, &leq, full, &mut doms, &mut |d| {
                    if d.iter().fold(0, |acc, &x| acc | x) == full {
                        out.push(Skeleton {
                            leq: leq.clone(),
                            elements: m,
                            domains: d.to_vec(),
                        });
                    }
                });
            }
        }
    }
    out
}

fn domain_assignments(
    w: usize,
    leq: &[Vec<bool>],
    full: u32,
    doms: &mut Vec<u32>,
    emit: &mut impl FnMut(&[u32]),
) {
    let n = leq.len();
    if w == n {
        emit(doms);
        return;
    }
    for d in 1..=full {
        let ok = (0..w).all(|u| {
            (!leq[u][w] || doms[u] & !d == 0) && (!leq[w][u] || d & !doms[u] == 0)
        });
        if ok {
            doms[w] = d;
            domain_assignments(w + 1, leq, full, doms, emit);
        }
    }
}

/// Ground atoms `(predicate, tuple)` over elements `0..m`, in a fixed order.
fn ground_atoms(preds: &[(String, usize)], m: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (pi, (_, arity)) in preds.iter().enumerate() {
        let count = m.pow(*arity as u32);
        for idx in 0..count {
            let mut tuple = vec![0usize; *arity];
            let mut rest = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = rest % m;
                rest /= m;
            }
            out.push((pi, tuple));
        }
    }
    out
}

impl Skeleton {
    fn for_each_model(
        &self,
        preds: &[(String, usize)],
        f: &mut impl FnMut(KripkeModel) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>, SearchError> {
        let n = self.leq.len();
        let atoms = ground_atoms(preds, self.elements);
        if atoms.len() > MAX_ATOMS {
            return Err(SearchError::TooManyAtoms(atoms.len()));
        }
        let allowed: Vec<u64> = self
            .domains
            .iter()
            .map(|&d| {
                atoms.iter().enumerate().fold(0u64, |acc, (i, (_, t))| {
                    if t.iter().all(|&e| d >> e & 1 == 1) {
                        acc | 1 << i
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mut facts = vec![0u64; n];
        let flow = self.interpretations(0, &allowed, &mut facts, &mut |facts| {
            f(self.build(preds, &atoms, facts))
        });
        Ok(flow)
    }

    fn interpretations(
        &self,
        w: usize,
        allowed: &[u64],
        facts: &mut Vec<u64>,
        emit: &mut impl FnMut(&[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = self.leq.len();
        if w == n {
            return emit(facts);
        }
        let mut forced = 0u64;
        let mut ceiling = allowed[w];
        for u in 0..w {
            if self.leq[u][w] {
                forced |= facts[u];
            }
            if self.leq[w][u] {
                ceiling &= facts[u];
            }
        }
        if forced & !ceiling != 0 {
            return ControlFlow::Continue(());
        }
        let free = ceiling & !forced;
        // enumerate subsets of `free` in increasing order
        let mut sub = 0u64;
        loop {
            facts[w] = forced | sub;
            self.interpretations(w + 1, allowed, facts, emit)?;
            if sub == free {
                break;
            }
            sub = (sub.wrapping_sub(free)) & free;
        }
        ControlFlow::Continue(())
    }

    fn build(&self, preds: &[(String, usize)], atoms: &[(usize, Vec<usize>)], facts: &[u64]) -> KripkeModel {
        let n = self.leq.len();
        let worlds = (1..=n).map(|i| format!("w{i}")).collect();
        let elements = (1..=self.elements).map(|i| format!("a{i}")).collect();
        let domains = self
            .domains
            .iter()
            .map(|&d| {
                (0..self.elements)
                    .filter(|&e| d >> e & 1 == 1)
                    .map(ElementId)
                    .collect()
            })
            .collect();
        let mut fact_list = Vec::new();
        for (w, &mask) in facts.iter().enumerate() {
            for (i, (pi, tuple)) in atoms.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    fact_list.push((
                        WorldId(w),
                        preds[*pi].0.clone(),
                        tuple.iter().map(|&e| ElementId(e)).collect(),
                    ));
                }
            }
        }
        KripkeModel::with_exact_order(worlds, elements, self.leq.clone(), domains, fact_list)
    }
}

/// Visits every model within `bounds` over the given predicates, in the
/// canonical order: world count, frame, element count, domains, interpretation.
pub fn for_each_model(
    preds: &BTreeMap<String, usize>,
    bounds: &SearchBounds,
    mut f: impl FnMut(KripkeModel) -> ControlFlow<()>,
) -> Result<(), SearchError> {
    bounds.check()?;
    let preds: Vec<(String, usize)> = preds.iter().map(|(p, &a)| (p.clone(), a)).collect();
    for sk in skeletons(bounds) {
        if sk.for_each_model(&preds, &mut f)?.is_break() {
            break;
        }
    }
    Ok(())
}

/// `enumerate_models`: every model within `bounds`, collected in canonical order.
pub fn enumerate_models(
    preds: &BTreeMap<String, usize>,
    bounds: &SearchBounds,
) -> Result<Vec<KripkeModel>, SearchError> {
    let mut out = Vec::new();
    for_each_model(preds, bounds, |k| {
        out.push(k);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// `decide`: the first countermodel in canonical order, or `ValidUpToBounds`.
///
/// Skeletons are searched in parallel; the earliest refuting skeleton wins,
/// so the verdict does not depend on scheduling.
pub fn decide(seq: &Sequent, mode: Mode, bounds: SearchBounds) -> Result<Verdict, SearchError> {
    let bounds = mode.restrict(bounds);
    bounds.check()?;
    let preds: Vec<(String, usize)> = seq.predicates().into_iter().collect();
    let sks = skeletons(&bounds);
    let found = sks
        .par_iter()
        .map(|sk| {
            let mut hit = None;
            let flow = sk.for_each_model(&preds, &mut |k| {
                let mut ev = Evaluator::new(&k);
                if let Some((world, assignment)) = ev.counterwitness(seq) {
                    drop(ev);
                    hit = Some(Verdict::Refuted {
                        model: k,
                        world,
                        assignment,
                    });
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            flow.map(|_| hit)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(Verdict::ValidUpToBounds(bounds)),
        Some(Ok(v)) => Ok(v.expect("only hits are kept")),
        Some(Err(e)) => Err(e),
    }
}

/// A random valid model over `preds` with at most the given sizes.
///
/// The frame is drawn uniformly from the labeled frames of a random size.
/// Each world draws a nonempty set of fresh elements and a set of atoms;
/// domains and facts are then accumulated upwards, which makes them monotone
/// and hereditary by construction.
pub fn random_model<R: rand::Rng>(
    rng: &mut R,
    preds: &BTreeMap<String, usize>,
    max_worlds: usize,
    max_domain: usize,
    shape: Shape,
) -> KripkeModel {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let fs = frames(n, shape);
    let leq = fs[rng.gen_range(0..fs.len())].clone();
    let m = rng.gen_range(1..=max_domain.max(1));
    let seeds: Vec<u32> = (0..n).map(|_| rng.gen_range(1..1u32 << m)).collect();
    let domains: Vec<u32> = (0..n)
        .map(|w| (0..n).filter(|&u| leq[u][w]).fold(0, |acc, u| acc | seeds[u]))
        .collect();
    let preds: Vec<(String, usize)> = preds.iter().map(|(p, &a)| (p.clone(), a)).collect();
    let atoms = ground_atoms(&preds, m);
    let own: Vec<Vec<usize>> = (0..n)
        .map(|w| {
            (0..atoms.len())
                .filter(|&i| {
                    atoms[i].1.iter().all(|&e| domains[w] >> e & 1 == 1) && rng.gen_bool(0.5)
                })
                .collect()
        })
        .collect();
    let mut facts: Vec<(WorldId, String, Vec<ElementId>)> = Vec::new();
    let mut used = 0u32;
    for w in 0..n {
        used |= domains[w];
        let mut here: Vec<usize> = (0..n)
            .filter(|&u| leq[u][w])
            .flat_map(|u| own[u].iter().copied())
            .collect();
        here.sort_unstable();
        here.dedup();
        for i in here {
            let (pi, tuple) = &atoms[i];
            facts.push((
                WorldId(w),
                preds[*pi].0.clone(),
                tuple.iter().map(|&e| ElementId(e)).collect(),
            ));
        }
    }
    // keep only elements that occur somewhere, renumbered in order
    let keep: Vec<usize> = (0..m).filter(|&e| used >> e & 1 == 1).collect();
    let renum = |e: usize| ElementId(keep.iter().position(|&k| k == e).expect("used element"));
    let facts: Vec<(WorldId, String, Vec<ElementId>)> = facts
        .into_iter()
        .map(|(w, p, args)| (w, p, args.into_iter().map(|e| renum(e.0)).collect()))
        .collect();
    KripkeModel::with_exact_order(
        (1..=n).map(|i| format!("w{i}")).collect(),
        (1..=keep.len()).map(|i| format!("a{i}")).collect(),
        leq,
        domains
            .iter()
            .map(|&d| keep.iter().filter(|&&e| d >> e & 1 == 1).map(|&e| renum(e)).collect())
            .collect(),
        facts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_sequent, is_constant_domain};
    use crate::syntax::{parse_sequent_inferring, Signature};

    fn preds(list: &[(&str, usize)]) -> BTreeMap<String, usize> {
        list.iter().map(|&(p, a)| (p.to_string(), a)).collect()
    }

    fn seq(text: &str) -> Sequent {
        parse_sequent_inferring(text, &mut Signature::new()).unwrap()
    }

    #[test]
    fn frame_counts() {
        assert_eq!(frames(3, Shape::Chain).len(), 1);
        assert_eq!(frames(3, Shape::Tree).len(), 2);
        assert_eq!(frames(3, Shape::Poset).len(), 7);
        // labeled preorders on 3 points
        assert_eq!(frames(3, Shape::AnyPreorder).len(), 29);
        assert_eq!(frames(4, Shape::AnyPreorder).len(), 355);
        assert_eq!(frames(2, Shape::Chain)[0], vec![vec![true, true], vec![false, true]]);
    }

    #[test]
    fn one_world_one_element_unary() {
        let b = SearchBounds::new(1, 1, Shape::Poset);
        assert_eq!(enumerate_models(&preds(&[("p", 1)]), &b).unwrap().len(), 2);
    }

    #[test]
    fn every_model_is_valid() {
        let b = SearchBounds::new(3, 2, Shape::AnyPreorder);
        let mut count = 0;
        for_each_model(&preds(&[("p", 1), ("r", 0)]), &b, |k| {
            assert!(k.validate().is_empty(), "{:?}", k.validate());
            count += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!(count > 1000);
    }

    #[test]
    fn constant_domain_flag() {
        let b = SearchBounds::new(3, 2, Shape::Poset).constant_domain();
        for k in enumerate_models(&preds(&[("p", 1)]), &b).unwrap() {
            assert!(is_constant_domain(&k));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let b = SearchBounds::new(10, 10, Shape::Chain);
        assert!(matches!(
            enumerate_models(&preds(&[]), &b),
            Err(SearchError::Budget { .. })
        ));
        assert_eq!(
            enumerate_models(&preds(&[]), &SearchBounds::new(0, 1, Shape::Chain)),
            Err(SearchError::ZeroBound)
        );
    }

    #[test]
    fn double_negation_refuted_on_two_chain() {
        let s = seq("not(not(p)) => p");
        match decide(&s, Mode::Kripke, SearchBounds::new(2, 1, Shape::Chain)).unwrap() {
            Verdict::Refuted {
                model,
                world,
                assignment,
            } => {
                assert_eq!(model.world_count(), 2);
                assert_eq!(world, WorldId(0));
                assert!(!model.holds(WorldId(0), "p", &[]));
                assert!(model.holds(WorldId(1), "p", &[]));
                assert!(!eval_sequent(&model, world, &assignment, &s).unwrap());
            }
            v => panic!("expected a refutation, got {v:?}"),
        }
        assert!(!decide(&s, Mode::Classical, SearchBounds::new(2, 2, Shape::Poset))
            .unwrap()
            .is_refuted());
    }

    #[test]
    fn random_models_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let ps = preds(&[("p", 1), ("q", 2), ("r", 0)]);
        for shape in [Shape::AnyPreorder, Shape::Poset, Shape::Tree, Shape::Chain] {
            for _ in 0..200 {
                let k = random_model(&mut rng, &ps, 4, 2, shape);
                assert!(k.validate().is_empty(), "{:?}", k.validate());
                assert!(k.world_count() <= 4 && k.element_count() <= 2);
            }
        }
    }

    #[test]
    fn verdict_is_deterministic() {
        let s = seq("forall x. or(p(x), q) => or(forall x. p(x), q)");
        let b = SearchBounds::new(3, 2, Shape::Poset);
        let first = decide(&s, Mode::Kripke, b).unwrap();
        for _ in 0..3 {
            assert_eq!(decide(&s, Mode::Kripke, b).unwrap(), first);
        }
    }
}
