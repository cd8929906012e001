use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::marker::PhantomData;
use std::rc::Rc;

use thiserror::Error;

use super::{assignments_over, Assignment, ElementId, KripkeModel, WorldId};
use crate::syntax::{Formula, Sequent, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable `{0}` is not assigned")]
    Unbound(Var),
    #[error("`{var}` is mapped to {element}, which is not in D({world})")]
    NotInDomain {
        var: Var,
        element: String,
        world: String,
    },
    #[error("single-succedent check needs exactly one succedent formula, found {0}")]
    NotSingleSuccedent(usize),
    #[error("classical structure has an empty domain")]
    EmptyDomain,
}

fn check_assignment(
    k: &KripkeModel,
    w: WorldId,
    rho: &Assignment,
    vars: &BTreeSet<Var>,
) -> Result<(), EvalError> {
    for x in vars {
        let a = rho.get(x).ok_or_else(|| EvalError::Unbound(x.clone()))?;
        if a.0 >= k.element_count() || !k.in_domain(w, a) {
            return Err(EvalError::NotInDomain {
                var: x.clone(),
                element: k
                    .element_names()
                    .get(a.0)
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", a.0)),
                world: k.world_name(w).to_string(),
            });
        }
    }
    Ok(())
}

fn atom_args(rho: &Assignment, args: &[Var]) -> Vec<ElementId> {
    args.iter()
        .map(|x| rho.get(x).expect("assignment checked on entry"))
        .collect()
}

/// The value `‖φ‖` at `w` under `ρ`, computed directly from the four clauses.
///
/// `ρ` must be defined on `FV(φ)` with values in `D(w)`.
pub fn eval_formula(
    k: &KripkeModel,
    w: WorldId,
    rho: &Assignment,
    phi: &Formula,
) -> Result<bool, EvalError> {
    check_assignment(k, w, rho, &phi.free_vars())?;
    Ok(value(k, w, rho, phi))
}

fn value(k: &KripkeModel, w: WorldId, rho: &Assignment, phi: &Formula) -> bool {
    match phi {
        Formula::Atom { pred, args } => k.holds(w, pred, &atom_args(rho, args)),
        Formula::Conn { conn, args } => k.successors(w).all(|v| {
            let bits: Vec<bool> = args.iter().map(|a| value(k, v, rho, a)).collect();
            conn.func.eval_bits(&bits).expect("arity checked at construction")
        }),
        Formula::Forall(x, body) => k.successors(w).all(|v| {
            k.domain(v)
                .iter()
                .all(|&a| value(k, v, &rho.with(x, a), body))
        }),
        Formula::Exists(x, body) => k
            .domain(w)
            .iter()
            .any(|&a| value(k, w, &rho.with(x, a), body)),
    }
}

/// Memoizing evaluator over one model.
///
/// Results are cached per subformula occurrence, world and the restriction of
/// the assignment to the subformula's free variables. Formulas passed in must
/// outlive the evaluator, since occurrences are keyed by address.
pub struct Evaluator<'m, 'f> {
    model: &'m KripkeModel,
    memo: HashMap<(usize, WorldId, Vec<ElementId>), bool>,
    free: HashMap<usize, Rc<[Var]>>,
    _formulas: PhantomData<&'f Formula>,
}

impl<'m, 'f> Evaluator<'m, 'f> {
    pub fn new(model: &'m KripkeModel) -> Self {
        Evaluator {
            model,
            memo: HashMap::new(),
            free: HashMap::new(),
            _formulas: PhantomData,
        }
    }

    pub fn model(&self) -> &'m KripkeModel {
        self.model
    }

    pub fn eval(
        &mut self,
        w: WorldId,
        rho: &Assignment,
        phi: &'f Formula,
    ) -> Result<bool, EvalError> {
        check_assignment(self.model, w, rho, &phi.free_vars())?;
        Ok(self.value(w, rho, phi))
    }

    pub fn eval_sequent(
        &mut self,
        w: WorldId,
        rho: &Assignment,
        seq: &'f Sequent,
    ) -> Result<bool, EvalError> {
        check_assignment(self.model, w, rho, &seq.free_vars())?;
        Ok(self.sequent_value(w, rho, seq))
    }

    fn sequent_value(&mut self, w: WorldId, rho: &Assignment, seq: &'f Sequent) -> bool {
        let refuted = seq.antecedent.iter().all(|a| self.value(w, rho, a))
            && seq.succedent.iter().all(|b| !self.value(w, rho, b));
        !refuted
    }

    fn value(&mut self, w: WorldId, rho: &Assignment, phi: &'f Formula) -> bool {
        let addr = phi as *const Formula as usize;
        let free = self
            .free
            .entry(addr)
            .or_insert_with(|| phi.free_vars().into_iter().collect())
            .clone();
        let key = (
            addr,
            w,
            free.iter()
                .map(|x| rho.get(x).expect("assignment checked on entry"))
                .collect::<Vec<_>>(),
        );
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let k = self.model;
        let result = match phi {
            Formula::Atom { pred, args } => k.holds(w, pred, &atom_args(rho, args)),
            Formula::Conn { conn, args } => {
                let mut ok = true;
                for v in k.successors(w) {
                    let bits: Vec<bool> = args.iter().map(|a| self.value(v, rho, a)).collect();
                    if !conn.func.eval_bits(&bits).expect("arity checked at construction") {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            Formula::Forall(x, body) => {
                let mut ok = true;
                'outer: for v in k.successors(w) {
                    for &a in k.domain(v) {
                        if !self.value(v, &rho.with(x, a), body) {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                ok
            }
            Formula::Exists(x, body) => {
                let mut found = false;
                for &a in k.domain(w) {
                    if self.value(w, &rho.with(x, a), body) {
                        found = true;
                        break;
                    }
                }
                found
            }
        };
        self.memo.insert(key, result);
        result
    }

    /// First world and total assignment (in the reproducible order) at which
    /// the sequent takes value 0.
    pub fn counterwitness(&mut self, seq: &'f Sequent) -> Option<(WorldId, Assignment)> {
        let vars = seq.free_vars();
        for w in self.model.worlds() {
            for rho in assignments_over(self.model, w, &vars) {
                if !self.sequent_value(w, &rho, seq) {
                    return Some((w, rho));
                }
            }
        }
        None
    }
}

/// The sequent value: 0 iff every antecedent formula is 1 and every succedent formula is 0.
pub fn eval_sequent(
    k: &KripkeModel,
    w: WorldId,
    rho: &Assignment,
    seq: &Sequent,
) -> Result<bool, EvalError> {
    check_assignment(k, w, rho, &seq.free_vars())?;
    let refuted = seq.antecedent.iter().all(|a| value(k, w, rho, a))
        && seq.succedent.iter().all(|b| !value(k, w, rho, b));
    Ok(!refuted)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ModelVerdict {
    Valid,
    Counterwitness { world: WorldId, assignment: Assignment },
}

impl ModelVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ModelVerdict::Valid)
    }
}

/// Whether `K ⊨ S`; otherwise the first counterwitness in world order and
/// assignment order.
pub fn model_validates(
    k: &KripkeModel,
    seq: &Sequent,
    single_succedent: bool,
) -> Result<ModelVerdict, EvalError> {
    if single_succedent && seq.succedent.len() != 1 {
        return Err(EvalError::NotSingleSuccedent(seq.succedent.len()));
    }
    let mut ev = Evaluator::new(k);
    Ok(match ev.counterwitness(seq) {
        None => ModelVerdict::Valid,
        Some((world, assignment)) => ModelVerdict::Counterwitness { world, assignment },
    })
}

/// A classical first-order structure over predicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalStructure {
    pub element_names: Vec<String>,
    pub facts: BTreeMap<String, BTreeSet<Vec<ElementId>>>,
}

impl ClassicalStructure {
    pub fn new(element_names: Vec<String>) -> Self {
        ClassicalStructure {
            element_names,
            facts: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, pred: &str, args: Vec<ElementId>) {
        self.facts.entry(pred.to_string()).or_default().insert(args);
    }

    /// The induced one-world Kripke model.
    pub fn to_kripke(&self) -> KripkeModel {
        let all: Vec<ElementId> = (0..self.element_names.len()).map(ElementId).collect();
        let facts = self.facts.iter().flat_map(|(p, set)| {
            set.iter()
                .map(move |args| (WorldId(0), p.clone(), args.clone()))
        });
        KripkeModel::new(
            vec!["w".to_string()],
            self.element_names.clone(),
            &[],
            vec![all],
            facts,
        )
    }
}

/// Tarskian truth in a classical structure.
pub fn classical_eval(
    s: &ClassicalStructure,
    rho: &Assignment,
    phi: &Formula,
) -> Result<bool, EvalError> {
    let n = s.element_names.len();
    if n == 0 {
        return Err(EvalError::EmptyDomain);
    }
    for x in phi.free_vars() {
        match rho.get(&x) {
            None => return Err(EvalError::Unbound(x)),
            Some(a) if a.0 >= n => {
                return Err(EvalError::NotInDomain {
                    var: x,
                    element: format!("#{}", a.0),
                    world: "the structure".into(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(classical_value(s, rho, phi))
}

fn classical_value(s: &ClassicalStructure, rho: &Assignment, phi: &Formula) -> bool {
    match phi {
        Formula::Atom { pred, args } => s
            .facts
            .get(pred)
            .is_some_and(|set| set.contains(&atom_args(rho, args))),
        Formula::Conn { conn, args } => {
            let bits: Vec<bool> = args.iter().map(|a| classical_value(s, rho, a)).collect();
            conn.func.eval_bits(&bits).expect("arity checked at construction")
        }
        Formula::Forall(x, body) => (0..s.element_names.len())
            .all(|a| classical_value(s, &rho.with(x, ElementId(a)), body)),
        Formula::Exists(x, body) => (0..s.element_names.len())
            .any(|a| classical_value(s, &rho.with(x, ElementId(a)), body)),
    }
}
