//! Truth vectors and truth functions.
//!
//! A truth function of arity `n` is stored as its table of `2^n` output bits.
//! The table is indexed by the input vector read as a binary number with the
//! leftmost component most significant, so index 0 is the all-zero vector and
//! the last index is the all-one vector.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on the arity accepted by [`enumerate_truth_functions`].
pub const DEFAULT_ARITY_CAP: usize = 4;

/// Largest arity a [`TruthFunction`] may have at all.
pub const MAX_ARITY: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruthError {
    #[error("truth vectors have different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("function of arity {arity} applied to a vector of length {len}")]
    ArityMismatch { arity: usize, len: usize },
    #[error("table for arity {arity} must have {expected} entries, found {found}")]
    TableLength {
        arity: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid table digit {0:?} (expected 0 or 1)")]
    BadDigit(char),
    #[error("arity {arity} exceeds the cap of {cap}")]
    ArityCap { arity: usize, cap: usize },
    #[error("unknown builtin connective `{0}`")]
    UnknownBuiltin(String),
}

/// A fixed-length sequence of truth values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthVector {
    bits: Vec<bool>,
}

impl TruthVector {
    pub fn new(bits: Vec<bool>) -> Self {
        TruthVector { bits }
    }

    /// Parses a string of `0`/`1` digits.
    pub fn parse(s: &str) -> Result<Self, TruthError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(TruthError::BadDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruthVector { bits })
    }

    pub fn zeros(len: usize) -> Self {
        TruthVector {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        TruthVector {
            bits: vec![true; len],
        }
    }

    /// The vector whose table index is `index` (leftmost component most significant).
    pub fn from_index(len: usize, index: usize) -> Self {
        let bits = (0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect();
        TruthVector { bits }
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_top(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    fn check_len(&self, other: &TruthVector) -> Result<(), TruthError> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(TruthError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            })
        }
    }

    /// Componentwise order `a ⊑ b`.
    pub fn leq(&self, other: &TruthVector) -> Result<bool, TruthError> {
        self.check_len(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| a <= b))
    }

    /// Componentwise minimum `a ⊓ b`.
    pub fn meet(&self, other: &TruthVector) -> Result<TruthVector, TruthError> {
        self.check_len(other)?;
        Ok(TruthVector {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && b).collect(),
        })
    }

    /// Componentwise maximum `a ⊔ b`.
    pub fn join(&self, other: &TruthVector) -> Result<TruthVector, TruthError> {
        self.check_len(other)?;
        Ok(TruthVector {
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect(),
        })
    }
}

impl fmt::Display for TruthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &b) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for TruthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `tv_leq`: componentwise order on equal-length vectors.
pub fn tv_leq(a: &TruthVector, b: &TruthVector) -> Result<bool, TruthError> {
    a.leq(b)
}

/// `tv_meet`: componentwise minimum on equal-length vectors.
pub fn tv_meet(a: &TruthVector, b: &TruthVector) -> Result<TruthVector, TruthError> {
    a.meet(b)
}

/// A map from `{0,1}^arity` to `{0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct TruthFunction {
    arity: usize,
    table: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    arity: usize,
    table: String,
}

impl TryFrom<TableRepr> for TruthFunction {
    type Error = TruthError;

    fn try_from(repr: TableRepr) -> Result<Self, Self::Error> {
        TruthFunction::from_table_str(repr.arity, &repr.table)
    }
}

impl From<TruthFunction> for TableRepr {
    fn from(f: TruthFunction) -> Self {
        TableRepr {
            arity: f.arity,
            table: f.table_string(),
        }
    }
}

impl TruthFunction {
    pub fn new(arity: usize, table: Vec<bool>) -> Result<Self, TruthError> {
        if arity > MAX_ARITY {
            return Err(TruthError::ArityCap {
                arity,
                cap: MAX_ARITY,
            });
        }
        let expected = 1usize << arity;
        if table.len() != expected {
            return Err(TruthError::TableLength {
                arity,
                expected,
                found: table.len(),
            });
        }
        Ok(TruthFunction { arity, table })
    }

    pub fn from_table_str(arity: usize, table: &str) -> Result<Self, TruthError> {
        let bits = TruthVector::parse(table)?;
        TruthFunction::new(arity, bits.bits)
    }

    pub fn from_fn(arity: usize, f: impl Fn(&TruthVector) -> bool) -> Self {
        let table = (0..1usize << arity)
            .map(|i| f(&TruthVector::from_index(arity, i)))
            .collect();
        TruthFunction { arity, table }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn table_string(&self) -> String {
        self.table.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn eval(&self, a: &TruthVector) -> Result<bool, TruthError> {
        if a.len() != self.arity {
            return Err(TruthError::ArityMismatch {
                arity: self.arity,
                len: a.len(),
            });
        }
        Ok(self.table[a.index()])
    }

    /// Evaluates on a bit slice without allocating a vector.
    pub fn eval_bits(&self, bits: &[bool]) -> Result<bool, TruthError> {
        if bits.len() != self.arity {
            return Err(TruthError::ArityMismatch {
                arity: self.arity,
                len: bits.len(),
            });
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        Ok(self.table[idx])
    }

    /// Value at table index `i`.
    pub fn at(&self, i: usize) -> bool {
        self.table[i]
    }

    /// Indices of all inputs mapped to 1.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    /// Lexicographically least pair `(a, b)` with `f(a) = f(b) = 1` and
    /// `f(a ⊓ b) = 0`, if one exists.
    pub fn supermultiplicativity_witness(&self) -> Option<(TruthVector, TruthVector)> {
        let size = self.table.len();
        for a in 0..size {
            if !self.table[a] {
                continue;
            }
            for b in 0..size {
                if self.table[b] && !self.table[a & b] {
                    return Some((
                        TruthVector::from_index(self.arity, a),
                        TruthVector::from_index(self.arity, b),
                    ));
                }
            }
        }
        None
    }

    pub fn is_supermultiplicative(&self) -> bool {
        self.supermultiplicativity_witness().is_none()
    }

    /// Order preservation: `a ⊑ b` implies `f(a) ≤ f(b)`.
    pub fn is_monotonic(&self) -> bool {
        let size = self.table.len();
        (0..size).all(|a| {
            (0..size)
                .filter(|&b| a & b == a)
                .all(|b| self.table[a] <= self.table[b])
        })
    }

    /// Brute-force check that the meet of any `n` inputs mapped to 1 is mapped to 1.
    pub fn nary_meet_closure(&self, n: usize) -> bool {
        assert!(n >= 1, "meet closure needs at least one vector");
        let ones: Vec<usize> = self.ones().collect();
        if ones.is_empty() {
            return true;
        }
        let all = (1usize << self.arity) - 1;
        // odometer over n-tuples drawn from `ones`
        let mut digits = vec![0usize; n];
        loop {
            let meet = digits.iter().fold(all, |acc, &d| acc & ones[d]);
            if !self.table[meet] {
                return false;
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return true;
                }
                digits[pos] += 1;
                if digits[pos] < ones.len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

impl fmt::Display for TruthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.arity, self.table_string())
    }
}

impl fmt::Debug for TruthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthFunction({self})")
    }
}

/// `tf_eval`: table lookup.
pub fn tf_eval(f: &TruthFunction, a: &TruthVector) -> Result<bool, TruthError> {
    f.eval(a)
}

/// `is_supermultiplicative`, returning the least witness when it fails.
pub fn is_supermultiplicative(f: &TruthFunction) -> (bool, Option<(TruthVector, TruthVector)>) {
    match f.supermultiplicativity_witness() {
        Some(w) => (false, Some(w)),
        None => (true, None),
    }
}

pub fn is_monotonic(f: &TruthFunction) -> bool {
    f.is_monotonic()
}

pub fn nary_meet_closure(f: &TruthFunction, n: usize) -> bool {
    f.nary_meet_closure(n)
}

/// Every truth function of the given arity, ordered by table string
/// (`"00…0"` first, `"11…1"` last).
pub fn enumerate_truth_functions(
    arity: usize,
) -> Result<impl Iterator<Item = TruthFunction>, TruthError> {
    enumerate_truth_functions_capped(arity, DEFAULT_ARITY_CAP)
}

pub fn enumerate_truth_functions_capped(
    arity: usize,
    cap: usize,
) -> Result<impl Iterator<Item = TruthFunction>, TruthError> {
    if arity > cap || arity > 5 {
        return Err(TruthError::ArityCap {
            arity,
            cap: cap.min(5),
        });
    }
    let size = 1usize << arity;
    let count = 1u64 << size;
    Ok((0..count).map(move |k| {
        let table = (0..size).map(|i| (k >> (size - 1 - i)) & 1 == 1).collect();
        TruthFunction { arity, table }
    }))
}

/// The standard connectives, looked up by ASCII name or symbol.
pub fn builtin(name: &str) -> Result<TruthFunction, TruthError> {
    let (arity, table) = match name {
        "not" | "¬" => (1, "10"),
        "and" | "∧" => (2, "0001"),
        "or" | "∨" => (2, "0111"),
        "imp" | "→" => (2, "1101"),
        "xor" | "⊻" => (2, "0110"),
        "iff" | "↔" => (2, "1001"),
        other => return Err(TruthError::UnknownBuiltin(other.to_string())),
    };
    TruthFunction::from_table_str(arity, table)
}

/// ASCII names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = ["not", "and", "or", "imp", "xor", "iff"];
