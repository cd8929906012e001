//! Separating sequents for connectives that are not supermultiplicative.
//!
//! Given such a connective `c`, the synthesizer builds a sequent that holds in
//! every constant-domain model but is refuted at the root of a fixed two-world
//! model with a growing domain (`K*`). The construction picks a witness pair
//! `a, b` with `f(a) = f(b) = 1`, `f(a ⊓ b) = 0` and splits into five cases on
//! a few further table lookups.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::search::{decide, Mode, SearchBounds, SearchError, Shape, Verdict};
use crate::semantics::{eval_formula, eval_sequent, Assignment, ElementId, KripkeModel, WorldId};
use crate::syntax::{Connective, Formula, Sequent, Signature};
use crate::truthfun::TruthVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("connective `{0}` is supermultiplicative; no separating sequent exists")]
    Supermultiplicative(String),
    #[error("vectors of lengths {0} and {1} cannot be combined")]
    LengthMismatch(usize, usize),
    #[error("case {case} does not apply to `{conn}`: {reason}")]
    WrongCase {
        case: Case,
        conn: String,
        reason: String,
    },
    #[error("`{0}` is not a witness pair: {1}")]
    NotWitness(String, String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// A pair of 1-valued inputs whose meet is 0-valued.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WitnessPair {
    pub a: TruthVector,
    pub b: TruthVector,
}

impl fmt::Display for WitnessPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {}, b = {}", self.a, self.b)
    }
}

/// `a` and `b` with their common 0-positions raised to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StarVectors {
    pub a_star: TruthVector,
    pub b_star: TruthVector,
}

impl fmt::Display for StarVectors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a* = {}, b* = {}", self.a_star, self.b_star)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
            Case::E => "E",
        };
        f.write_str(s)
    }
}

/// The lexicographically least witness pair of `c`.
pub fn find_witness(c: &Connective) -> Result<WitnessPair, SynthError> {
    match c.func.supermultiplicativity_witness() {
        Some((a, b)) => Ok(WitnessPair { a, b }),
        None => Err(SynthError::Supermultiplicative(c.name.clone())),
    }
}

pub fn star_vectors(a: &TruthVector, b: &TruthVector) -> Result<StarVectors, SynthError> {
    if a.len() != b.len() {
        return Err(SynthError::LengthMismatch(a.len(), b.len()));
    }
    let raise = |v: &TruthVector| {
        TruthVector::new(
            (0..v.len())
                .map(|i| v.get(i) || !(a.get(i) || b.get(i)))
                .collect(),
        )
    };
    Ok(StarVectors {
        a_star: raise(a),
        b_star: raise(b),
    })
}

fn value(c: &Connective, v: &TruthVector) -> bool {
    c.func.eval(v).expect("vector length matches arity")
}

/// Whether the defining condition of `case` holds for `c` (independently of
/// the earlier cases).
fn case_condition(c: &Connective, case: Case, s: &StarVectors) -> Result<(), String> {
    let one = TruthVector::ones(c.arity());
    let f1 = value(c, &one);
    let fa = value(c, &s.a_star);
    let fb = value(c, &s.b_star);
    let fm = value(c, &s.a_star.meet(&s.b_star).expect("equal lengths"));
    let ok = match case {
        Case::A => !f1,
        Case::B => fa,
        Case::C => fb,
        Case::D => !fa && !fb && !fm && f1,
        Case::E => !fa && !fb && fm && f1,
    };
    if ok {
        Ok(())
    } else {
        Err(format!(
            "f(1) = {}, f(a*) = {}, f(b*) = {}, f(a* ⊓ b*) = {}",
            u8::from(f1),
            u8::from(fa),
            u8::from(fb),
            u8::from(fm)
        ))
    }
}

/// The first of the five cases whose condition holds.
pub fn case_select(c: &Connective, w: &WitnessPair, s: &StarVectors) -> Case {
    debug_assert!(value(c, &w.a) && value(c, &w.b));
    [Case::A, Case::B, Case::C, Case::D, Case::E]
        .into_iter()
        .find(|&case| case_condition(c, case, s).is_ok())
        .expect("the five cases are exhaustive")
}

/// Predicate names playing the roles of `p`, `q` (unary) and `T`, `R` (0-ary).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Roles {
    pub p: String,
    pub q: String,
    pub t: String,
    pub r: String,
}

impl Default for Roles {
    fn default() -> Self {
        Roles {
            p: "p".into(),
            q: "q".into(),
            t: "T".into(),
            r: "R".into(),
        }
    }
}

impl Roles {
    /// The default names, each suffixed with the least number that avoids
    /// the symbols of `sig` and the other roles.
    pub fn avoiding(sig: &Signature) -> Self {
        let mut taken: Vec<String> = Vec::new();
        let mut pick = |base: &str| {
            let mut name = base.to_string();
            let mut i = 1;
            while sig.contains(&name) || taken.contains(&name) {
                name = format!("{base}{i}");
                i += 1;
            }
            taken.push(name.clone());
            name
        };
        Roles {
            p: pick("p"),
            q: pick("q"),
            t: pick("T"),
            r: pick("R"),
        }
    }

    fn p_x(&self) -> Formula {
        Formula::atom(&self.p, ["x"])
    }

    fn q_x(&self) -> Formula {
        Formula::atom(&self.q, ["x"])
    }

    fn t(&self) -> Formula {
        Formula::prop(&self.t)
    }

    fn r(&self) -> Formula {
        Formula::prop(&self.r)
    }

    fn all_p(&self) -> Formula {
        Formula::forall("x", self.p_x())
    }

    fn some_q(&self) -> Formula {
        Formula::exists("x", self.q_x())
    }
}

/// The vector pair that drives the selector tables in each case.
fn selector_vectors(
    case: Case,
    w: &WitnessPair,
    s: &StarVectors,
) -> (TruthVector, TruthVector) {
    match case {
        Case::A | Case::D | Case::E => (w.a.clone(), w.b.clone()),
        Case::B => (s.a_star.clone(), w.b.clone()),
        Case::C => (w.a.clone(), s.b_star.clone()),
    }
}

/// `build_sequent`: the separating sequent of the given case.
///
/// For cases A to D this is `T, ∀x c(φ1..φn) ⇒ c(ψ1..ψn)`. Case E adds the
/// antecedent `R ↔c ∀x p(x)`; see [`two_biconditional_case_e_sequent`] for why the second
/// biconditional of the textbook form is left out.
pub fn build_sequent(
    c: &Connective,
    case: Case,
    w: &WitnessPair,
    s: &StarVectors,
    roles: &Roles,
) -> Result<Sequent, SynthError> {
    check_witness(c, w)?;
    case_condition(c, case, s).map_err(|reason| SynthError::WrongCase {
        case,
        conn: c.name.clone(),
        reason,
    })?;
    let (x, y) = selector_vectors(case, w, s);
    let zero_filler = match case {
        Case::A => Some(Formula::conn(c, vec![roles.t(); c.arity()])),
        Case::D | Case::E => Some(roles.r()),
        // no common 0-position survives the raising
        Case::B | Case::C => None,
    };
    let mut phis = Vec::new();
    let mut psis = Vec::new();
    for i in 0..c.arity() {
        let (l, r) = match (x.get(i), y.get(i)) {
            (false, false) => {
                let f = zero_filler.clone().expect("no joint 0 in cases B and C");
                (f.clone(), f)
            }
            (false, true) => (roles.p_x(), roles.all_p()),
            (true, false) => (roles.q_x(), roles.some_q()),
            (true, true) => (roles.t(), roles.t()),
        };
        phis.push(l);
        psis.push(r);
    }
    let phi = Formula::forall("x", Formula::conn(c, phis));
    let psi = Formula::conn(c, psis);
    let mut antecedent = vec![roles.t(), phi];
    if case == Case::E {
        antecedent.push(biconditional(c, s, &roles.r(), &roles.all_p(), roles)?);
    }
    Ok(Sequent::new(antecedent, [psi]))
}

/// The case-E sequent exactly as in the textbook construction, with both
/// `R ↔c ∀x p(x)` and `R ↔c ∃x q(x)` in the antecedent.
///
/// Kept for comparison only: the second biconditional is 0 at the root of
/// `K*` (there `∃x q(x)` flips from 0 to 1 while `R` stays 0), so this form is
/// not refuted by `K*`.
pub fn two_biconditional_case_e_sequent(
    c: &Connective,
    w: &WitnessPair,
    s: &StarVectors,
    roles: &Roles,
) -> Result<Sequent, SynthError> {
    let base = build_sequent(c, Case::E, w, s, roles)?;
    let mut antecedent: Vec<Formula> = base.antecedent.into_iter().collect();
    antecedent.push(biconditional(c, s, &roles.r(), &roles.some_q(), roles)?);
    Ok(Sequent::new(antecedent, base.succedent))
}

fn check_witness(c: &Connective, w: &WitnessPair) -> Result<(), SynthError> {
    let n = c.arity();
    if w.a.len() != n || w.b.len() != n {
        return Err(SynthError::LengthMismatch(w.a.len(), n));
    }
    let m = w.a.meet(&w.b).expect("equal lengths");
    if value(c, &w.a) && value(c, &w.b) && !value(c, &m) {
        Ok(())
    } else {
        Err(SynthError::NotWitness(
            w.to_string(),
            format!("f(a) = {}, f(b) = {}, f(a ⊓ b) = {}", u8::from(value(c, &w.a)), u8::from(value(c, &w.b)), u8::from(value(c, &m))),
        ))
    }
}

/// `α ↔c β`: `c` applied to `α` where `a*` is 0, `β` where `b*` is 0, and `T`
/// elsewhere. Behaves as a biconditional wherever `T` holds.
pub fn biconditional(
    c: &Connective,
    s: &StarVectors,
    alpha: &Formula,
    beta: &Formula,
    roles: &Roles,
) -> Result<Formula, SynthError> {
    case_condition(c, Case::E, s).map_err(|reason| SynthError::WrongCase {
        case: Case::E,
        conn: c.name.clone(),
        reason,
    })?;
    let thetas = (0..c.arity())
        .map(|i| match (s.a_star.get(i), s.b_star.get(i)) {
            (false, _) => alpha.clone(),
            (true, false) => beta.clone(),
            (true, true) => roles.t(),
        })
        .collect();
    Ok(Formula::conn(c, thetas))
}

/// The two-world model refuting every synthesized sequent at `w1`.
pub fn kstar() -> KripkeModel {
    kstar_with(&Roles::default())
}

pub fn kstar_with(roles: &Roles) -> KripkeModel {
    let (w1, w2) = (WorldId(0), WorldId(1));
    let (a1, a2) = (ElementId(0), ElementId(1));
    let facts = [
        (w1, roles.p.clone(), vec![a1]),
        (w2, roles.p.clone(), vec![a1]),
        (w2, roles.q.clone(), vec![a2]),
        (w1, roles.t.clone(), vec![]),
        (w2, roles.t.clone(), vec![]),
    ];
    KripkeModel::new(
        vec!["w1".into(), "w2".into()],
        vec!["a1".into(), "a2".into()],
        &[(w1, w2)],
        vec![vec![a1], vec![a1, a2]],
        facts,
    )
}

/// Evidence that a sequent separates constant-domain validity from Kripke validity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCertificate {
    pub connective: Connective,
    pub case: Case,
    pub witness: WitnessPair,
    pub stars: StarVectors,
    pub roles: Roles,
    pub sequent: Sequent,
    pub kstar: KripkeModel,
    /// Values at `(K*, w1, ∅)` of each antecedent formula, in sequent order.
    pub antecedent_values: Vec<bool>,
    /// Values at `(K*, w1, ∅)` of each succedent formula.
    pub succedent_values: Vec<bool>,
    /// The sequent value at `(K*, w1, ∅)`; 0 for a sound certificate.
    pub sequent_value: bool,
    /// Constant-domain search verdict, when bounds were given.
    pub cd_verdict: Option<Verdict>,
}

impl SeparationCertificate {
    /// Re-evaluates the sequent in `K*` and checks the recorded values.
    pub fn recheck(&self) -> bool {
        let w1 = WorldId(0);
        let rho = Assignment::empty();
        let values = |side: &std::collections::BTreeSet<Formula>| -> Vec<bool> {
            side.iter()
                .map(|f| eval_formula(&self.kstar, w1, &rho, f).expect("closed formula"))
                .collect()
        };
        self.kstar.validate().is_empty()
            && values(&self.sequent.antecedent) == self.antecedent_values
            && values(&self.sequent.succedent) == self.succedent_values
            && eval_sequent(&self.kstar, w1, &rho, &self.sequent) == Ok(self.sequent_value)
            && !self.sequent_value
    }
}

impl fmt::Display for SeparationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bit = |b: bool| u8::from(b);
        writeln!(f, "connective: {} {}", self.connective.name, self.connective.func.table_string())?;
        writeln!(f, "case: {}", self.case)?;
        writeln!(f, "witness: {}", self.witness)?;
        writeln!(f, "stars: {}", self.stars)?;
        writeln!(f, "sequent: {}", self.sequent)?;
        writeln!(f, "refutation: K*, w1, empty assignment")?;
        for (phi, v) in self.sequent.antecedent.iter().zip(&self.antecedent_values) {
            writeln!(f, "  antecedent {} = {}", phi, bit(*v))?;
        }
        for (psi, v) in self.sequent.succedent.iter().zip(&self.succedent_values) {
            writeln!(f, "  succedent {} = {}", psi, bit(*v))?;
        }
        writeln!(f, "  sequent value = {}", bit(self.sequent_value))?;
        match &self.cd_verdict {
            None => writeln!(f, "cd search: not run")?,
            Some(Verdict::ValidUpToBounds(b)) => {
                writeln!(f, "cd search: no countermodel with {b}")?
            }
            Some(Verdict::Refuted { model, world, assignment }) => writeln!(
                f,
                "cd search: REFUTED at {} under {}",
                model.world_name(*world),
                assignment.display(model)
            )?,
        }
        Ok(())
    }
}

/// Default bounds for the constant-domain check of a certificate.
pub fn default_cd_bounds() -> SearchBounds {
    SearchBounds::new(3, 2, Shape::Tree)
}

/// `synthesize`: witness, stars, case, sequent and the `K*` refutation, plus a
/// bounded constant-domain search when `cd_bounds` is given.
pub fn synthesize(
    c: &Connective,
    cd_bounds: Option<SearchBounds>,
) -> Result<SeparationCertificate, SynthError> {
    let witness = find_witness(c)?;
    let stars = star_vectors(&witness.a, &witness.b)?;
    let case = case_select(c, &witness, &stars);
    let mut sig = Signature::new();
    sig.add_connective(&c.name, c.func.clone())
        .expect("a fresh signature accepts any connective name");
    let roles = Roles::avoiding(&sig);
    let sequent = build_sequent(c, case, &witness, &stars, &roles)?;
    let kstar = kstar_with(&roles);
    let w1 = WorldId(0);
    let rho = Assignment::empty();
    let eval = |f: &Formula| eval_formula(&kstar, w1, &rho, f).expect("closed formula");
    let antecedent_values = sequent.antecedent.iter().map(eval).collect();
    let succedent_values = sequent.succedent.iter().map(eval).collect();
    let sequent_value = eval_sequent(&kstar, w1, &rho, &sequent).expect("closed sequent");
    let cd_verdict = cd_bounds
        .map(|b| decide(&sequent, Mode::Cd, b))
        .transpose()?;
    Ok(SeparationCertificate {
        connective: c.clone(),
        case,
        witness,
        stars,
        roles,
        sequent,
        kstar,
        antecedent_values,
        succedent_values,
        sequent_value,
        cd_verdict,
    })
}

/// Certificates for every non-supermultiplicative function of one arity,
/// keyed by table string. Connectives are named `c`.
pub fn synthesize_all(
    arity: usize,
    cd_bounds: Option<SearchBounds>,
) -> Result<BTreeMap<String, SeparationCertificate>, SynthError> {
    use rayon::prelude::*;
    let fns: Vec<_> = crate::truthfun::enumerate_truth_functions(arity)
        .expect("arity within the enumeration cap")
        .collect();
    fns.into_par_iter()
        .filter(|f| !f.is_supermultiplicative())
        .map(|f| {
            let c = Connective::new("c", f);
            synthesize(&c, cd_bounds).map(|cert| (c.func.table_string(), cert))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truthfun::TruthFunction;

    fn tv(s: &str) -> TruthVector {
        TruthVector::parse(s).unwrap()
    }

    fn parity3() -> Connective {
        Connective::new("c3", TruthFunction::from_table_str(3, "01101001").unwrap())
    }

    #[test]
    fn witnesses() {
        let or = Connective::builtin("or").unwrap();
        assert_eq!(
            find_witness(&or).unwrap(),
            WitnessPair { a: tv("01"), b: tv("10") }
        );
        let xor = Connective::builtin("xor").unwrap();
        assert_eq!(find_witness(&xor).unwrap().a, tv("01"));
        assert!(matches!(
            find_witness(&Connective::builtin("and").unwrap()),
            Err(SynthError::Supermultiplicative(_))
        ));
    }

    #[test]
    fn stars() {
        let s = star_vectors(&tv("01"), &tv("10")).unwrap();
        assert_eq!((s.a_star, s.b_star), (tv("01"), tv("10")));
        let s = star_vectors(&tv("001"), &tv("010")).unwrap();
        assert_eq!((s.a_star.clone(), s.b_star.clone()), (tv("101"), tv("110")));
        assert!(s.a_star.join(&s.b_star).unwrap().is_top());
        assert!(star_vectors(&tv("0"), &tv("01")).is_err());
    }

    #[test]
    fn cases() {
        let pick = |c: &Connective| {
            let w = find_witness(c).unwrap();
            let s = star_vectors(&w.a, &w.b).unwrap();
            case_select(c, &w, &s)
        };
        assert_eq!(pick(&Connective::builtin("xor").unwrap()), Case::A);
        assert_eq!(pick(&Connective::builtin("or").unwrap()), Case::B);
        let c = parity3();
        let w = find_witness(&c).unwrap();
        assert_eq!((w.a.clone(), w.b.clone()), (tv("001"), tv("010")));
        assert_eq!(pick(&c), Case::E);
    }

    #[test]
    fn textbook_sequents() {
        let cert = synthesize(&Connective::builtin("or").unwrap(), None).unwrap();
        assert_eq!(
            cert.sequent.to_string(),
            "T, forall x. or(p(x), q(x)) => or(forall x. p(x), exists x. q(x))"
        );
        assert!(cert.recheck());
        let cert = synthesize(&Connective::builtin("xor").unwrap(), None).unwrap();
        assert_eq!(
            cert.sequent.to_string(),
            "T, forall x. xor(p(x), q(x)) => xor(forall x. p(x), exists x. q(x))"
        );
    }

    #[test]
    fn wrong_case_is_rejected() {
        let or = Connective::builtin("or").unwrap();
        let w = find_witness(&or).unwrap();
        let s = star_vectors(&w.a, &w.b).unwrap();
        assert!(matches!(
            build_sequent(&or, Case::A, &w, &s, &Roles::default()),
            Err(SynthError::WrongCase { .. })
        ));
        // B and C both apply to disjunction
        assert!(build_sequent(&or, Case::C, &w, &s, &Roles::default()).is_ok());
    }

    #[test]
    fn kstar_facts() {
        let k = kstar();
        assert!(k.validate().is_empty());
        assert!(!k.is_constant_domain());
        let rho = Assignment::empty();
        let roles = Roles::default();
        assert!(!eval_formula(&k, WorldId(0), &rho, &roles.all_p()).unwrap());
        assert!(!eval_formula(&k, WorldId(0), &rho, &roles.some_q()).unwrap());
    }

    #[test]
    fn case_e_sequent_is_refuted_but_textbook_form_is_not() {
        let c = parity3();
        let cert = synthesize(&c, None).unwrap();
        assert_eq!(cert.case, Case::E);
        assert!(cert.recheck());
        let both = two_biconditional_case_e_sequent(&c, &cert.witness, &cert.stars, &cert.roles).unwrap();
        assert!(eval_sequent(&kstar(), WorldId(0), &Assignment::empty(), &both).unwrap());
    }

    #[test]
    fn role_names_avoid_the_connective() {
        let c = Connective::new("p", TruthFunction::from_table_str(2, "0111").unwrap());
        let cert = synthesize(&c, None).unwrap();
        assert_eq!(cert.roles.p, "p1");
        assert!(cert.recheck());
    }
}
