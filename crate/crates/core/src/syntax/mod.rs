//! Signatures, formulas and sequents.
//!
//! Concrete syntax is prefix application throughout: `name(arg, ...)` for
//! both predicates and connectives, `forall x. body`, `exists x. body`, and
//! `a, b => c` for sequents. Whether `name(...)` is an atom or a connective
//! application is decided by the signature.

mod parse;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::truthfun::{self, TruthError, TruthFunction};

pub use parse::{parse_formula, parse_formula_inferring, parse_sequent, parse_sequent_inferring};

pub const RESERVED: [&str; 2] = ["forall", "exists"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("offset {pos}: unexpected character {ch:?}")]
    Lex { pos: usize, ch: char },
    #[error("offset {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("offset {pos}: unknown symbol `{name}`")]
    UnknownSymbol { pos: usize, name: String },
    #[error("offset {pos}: `{name}` takes {expected} argument(s), found {found}")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` is declared twice")]
    Duplicate(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
    #[error("signature file: {0}")]
    SignatureFile(String),
    #[error(transparent)]
    Truth(#[from] TruthError),
}

/// An individual variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

/// A named connective together with its truth function.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Connective {
    pub name: String,
    pub func: TruthFunction,
}

impl Connective {
    pub fn new(name: impl Into<String>, func: TruthFunction) -> Self {
        Connective {
            name: name.into(),
            func,
        }
    }

    pub fn builtin(name: &str) -> Result<Self, TruthError> {
        Ok(Connective::new(name, truthfun::builtin(name)?))
    }

    pub fn arity(&self) -> usize {
        self.func.arity()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Predicate symbols with arities and connective symbols with truth functions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    predicates: BTreeMap<String, usize>,
    connectives: BTreeMap<String, TruthFunction>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    /// A signature holding the six builtin connectives and no predicates.
    pub fn with_builtins() -> Self {
        let mut sig = Signature::new();
        for name in truthfun::BUILTIN_NAMES {
            sig.connectives
                .insert(name.to_string(), truthfun::builtin(name).expect("builtin"));
        }
        sig
    }

    fn check_name(&self, name: &str) -> Result<(), SyntaxError> {
        if RESERVED.contains(&name) {
            return Err(SyntaxError::Reserved(name.to_string()));
        }
        if !is_identifier(name) {
            return Err(SyntaxError::BadIdentifier(name.to_string()));
        }
        if self.predicates.contains_key(name) || self.connectives.contains_key(name) {
            return Err(SyntaxError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        self.check_name(name)?;
        self.predicates.insert(name.to_string(), arity);
        Ok(())
    }

    pub fn add_connective(&mut self, name: &str, func: TruthFunction) -> Result<(), SyntaxError> {
        self.check_name(name)?;
        self.connectives.insert(name.to_string(), func);
        Ok(())
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn connective(&self, name: &str) -> Option<Connective> {
        self.connectives
            .get(name)
            .map(|f| Connective::new(name, f.clone()))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn connectives(&self) -> impl Iterator<Item = Connective> + '_ {
        self.connectives
            .iter()
            .map(|(n, f)| Connective::new(n.clone(), f.clone()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.predicates.contains_key(name) || self.connectives.contains_key(name)
    }

    /// Reads the TOML signature format: a `[predicates]` table of arities and a
    /// `[connectives]` table whose entries are either a builtin name or an
    /// `{ arity, table }` truth function.
    pub fn from_toml(text: &str) -> Result<Self, SyntaxError> {
        let file: SignatureFile =
            toml::from_str(text).map_err(|e| SyntaxError::SignatureFile(e.to_string()))?;
        let mut sig = Signature::new();
        for (name, arity) in file.predicates {
            sig.add_predicate(&name, arity)?;
        }
        for (name, spec) in file.connectives {
            let func = match spec {
                ConnectiveSpec::Builtin(b) => truthfun::builtin(&b)?,
                ConnectiveSpec::Table(f) => f,
            };
            sig.add_connective(&name, func)?;
        }
        Ok(sig)
    }

    pub fn to_toml(&self) -> String {
        let file = SignatureFile {
            predicates: self.predicates.clone(),
            connectives: self
                .connectives
                .iter()
                .map(|(n, f)| (n.clone(), ConnectiveSpec::Table(f.clone())))
                .collect(),
        };
        toml::to_string(&file).expect("signature serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct SignatureFile {
    #[serde(default)]
    predicates: BTreeMap<String, usize>,
    #[serde(default)]
    connectives: BTreeMap<String, ConnectiveSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConnectiveSpec {
    Builtin(String),
    Table(TruthFunction),
}

/// A first-order formula over predicates and truth-functional connectives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom { pred: String, args: Vec<Var> },
    Conn { conn: Connective, args: Vec<Formula> },
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn atom<V: Into<Var>>(pred: &str, args: impl IntoIterator<Item = V>) -> Self {
        Formula::Atom {
            pred: pred.to_string(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    /// A 0-ary atom such as `T`.
    pub fn prop(pred: &str) -> Self {
        Formula::Atom {
            pred: pred.to_string(),
            args: Vec::new(),
        }
    }

    /// Panics if the argument count differs from the connective's arity.
    pub fn conn(conn: &Connective, args: Vec<Formula>) -> Self {
        assert_eq!(
            args.len(),
            conn.arity(),
            "connective `{}` applied to wrong number of arguments",
            conn.name
        );
        Formula::Conn {
            conn: conn.clone(),
            args,
        }
    }

    pub fn forall(var: impl Into<Var>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<Var>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => {
                for x in args {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
            }
            Formula::Conn { args, .. } => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// All subformulas in post-order, first occurrence kept.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.push_subformulas(&mut seen, &mut out);
        out
    }

    fn push_subformulas<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::Atom { .. } => {}
            Formula::Conn { args, .. } => {
                for a in args {
                    a.push_subformulas(seen, out);
                }
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.push_subformulas(seen, out),
        }
        if seen.insert(self) {
            out.push(self);
        }
    }

    /// Nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.depth(),
        }
    }

    /// Predicate symbols with the arity they are used at.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Atom { pred, args } => {
                out.insert(pred.clone(), args.len());
            }
            Formula::Conn { args, .. } => args.iter().for_each(|a| a.collect_predicates(out)),
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.collect_predicates(out),
        }
    }

    pub fn connectives(&self) -> BTreeSet<Connective> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<Connective>) {
        match self {
            Formula::Atom { .. } => {}
            Formula::Conn { conn, args } => {
                out.insert(conn.clone());
                args.iter().for_each(|a| a.collect_connectives(out));
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.collect_connectives(out),
        }
    }
}

/// `free_vars`.
pub fn free_vars(phi: &Formula) -> BTreeSet<Var> {
    phi.free_vars()
}

/// `subformulas`.
pub fn subformulas(phi: &Formula) -> Vec<&Formula> {
    phi.subformulas()
}

/// `render`: the canonical concrete syntax.
pub fn render(phi: &Formula) -> String {
    phi.to_string()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { pred, args } => {
                f.write_str(pred)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, x) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{x}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Conn { conn, args } => {
                f.write_str(&conn.name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Forall(x, body) => write!(f, "forall {x}. {body}"),
            Formula::Exists(x, body) => write!(f, "exists {x}. {body}"),
        }
    }
}

/// `Γ ⇒ Δ` with both sides finite sets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Sequent {
    pub antecedent: BTreeSet<Formula>,
    pub succedent: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(
        antecedent: impl IntoIterator<Item = Formula>,
        succedent: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent: succedent.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.formulas().flat_map(Formula::free_vars).collect()
    }

    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for phi in self.formulas() {
            out.extend(phi.predicates());
        }
        out
    }

    pub fn connectives(&self) -> BTreeSet<Connective> {
        self.formulas().flat_map(Formula::connectives).collect()
    }

    /// The smallest signature this sequent is well-formed over.
    pub fn signature(&self) -> Result<Signature, SyntaxError> {
        let mut sig = Signature::new();
        for (p, arity) in self.predicates() {
            sig.add_predicate(&p, arity)?;
        }
        for c in self.connectives() {
            sig.add_connective(&c.name, c.func)?;
        }
        Ok(sig)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |set: &BTreeSet<Formula>| {
            set.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match (self.antecedent.is_empty(), self.succedent.is_empty()) {
            (true, true) => f.write_str("=>"),
            (true, false) => write!(f, "=> {}", side(&self.succedent)),
            (false, true) => write!(f, "{} =>", side(&self.antecedent)),
            (false, false) => write!(f, "{} => {}", side(&self.antecedent), side(&self.succedent)),
        }
    }
}
