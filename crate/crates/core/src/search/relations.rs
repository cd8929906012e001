//! The connective census, the relation report between the three logics, and
//! corpus-level transfer checks that test those relations at small bounds.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::{decide, Mode, SearchBounds, SearchError, Verdict};
use crate::construct::cd_countermodel_via_completion;
use crate::syntax::{Connective, Sequent, Signature};
use crate::truthfun::{enumerate_truth_functions, TruthError, TruthFunction};

/// Truth functions of one arity, sorted by (supermultiplicative, monotonic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Census {
    pub arity: usize,
    pub quadrants: BTreeMap<(bool, bool), Vec<TruthFunction>>,
}

impl Census {
    pub fn count(&self, supermultiplicative: bool, monotonic: bool) -> usize {
        self.quadrants
            .get(&(supermultiplicative, monotonic))
            .map_or(0, Vec::len)
    }

    pub fn total(&self) -> usize {
        self.quadrants.values().map(Vec::len).sum()
    }

    pub fn where_supermultiplicative(&self, value: bool) -> Vec<&TruthFunction> {
        self.quadrants
            .iter()
            .filter(|((sm, _), _)| *sm == value)
            .flat_map(|(_, v)| v)
            .collect()
    }

    pub fn where_monotonic(&self, value: bool) -> Vec<&TruthFunction> {
        self.quadrants
            .iter()
            .filter(|((_, m), _)| *m == value)
            .flat_map(|(_, v)| v)
            .collect()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arity {}: {} functions", self.arity, self.total())?;
        for sm in [true, false] {
            for mono in [true, false] {
                let fns = self.quadrants.get(&(sm, mono)).map_or(&[][..], |v| v);
                write!(
                    f,
                    "supermultiplicative={sm} monotonic={mono}: {}",
                    fns.len()
                )?;
                if fns.len() <= 16 && !fns.is_empty() {
                    let tables: Vec<String> = fns.iter().map(|t| t.table_string()).collect();
                    write!(f, " [{}]", tables.join(" "))?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

pub fn classify_connectives(arity: usize) -> Result<Census, TruthError> {
    let mut quadrants: BTreeMap<(bool, bool), Vec<TruthFunction>> = BTreeMap::new();
    for f in [true, false]
        .iter()
        .flat_map(|&a| [true, false].map(|b| (a, b)))
    {
        quadrants.insert(f, Vec::new());
    }
    for f in enumerate_truth_functions(arity)? {
        let key = (f.is_supermultiplicative(), f.is_monotonic());
        quadrants.entry(key).or_default().push(f);
    }
    Ok(Census { arity, quadrants })
}

/// Which of the three first-order logics coincide for a connective set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub ils_eq_cds: bool,
    pub cds_eq_cls: bool,
    pub ils_eq_cls: bool,
    /// Connectives that are not supermultiplicative.
    pub not_supermultiplicative: Vec<String>,
    /// Connectives that are not monotonic.
    pub not_monotonic: Vec<String>,
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let why = |names: &[String], prop: &str| {
            if names.is_empty() {
                format!("all connectives {prop}")
            } else {
                format!("not {prop}: {}", names.join(", "))
            }
        };
        let sm = why(&self.not_supermultiplicative, "supermultiplicative");
        let mono = why(&self.not_monotonic, "monotonic");
        writeln!(f, "FOILS = FOCDS: {} ({sm})", self.ils_eq_cds)?;
        writeln!(f, "FOCDS = FOCLS: {} ({mono})", self.cds_eq_cls)?;
        writeln!(f, "FOILS = FOCLS: {} ({sm}; {mono})", self.ils_eq_cls)
    }
}

pub fn report_relations(sig: &Signature) -> RelationReport {
    let conns: Vec<Connective> = sig.connectives().collect();
    let not_supermultiplicative: Vec<String> = conns
        .iter()
        .filter(|c| !c.func.is_supermultiplicative())
        .map(|c| c.name.clone())
        .collect();
    let not_monotonic: Vec<String> = conns
        .iter()
        .filter(|c| !c.func.is_monotonic())
        .map(|c| c.name.clone())
        .collect();
    let ils_eq_cds = not_supermultiplicative.is_empty();
    let cds_eq_cls = not_monotonic.is_empty();
    RelationReport {
        ils_eq_cds,
        cds_eq_cls,
        ils_eq_cls: ils_eq_cds && cds_eq_cls,
        not_supermultiplicative,
        not_monotonic,
    }
}

/// Outcome of testing one corpus sequent against a logic inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TransferOutcome {
    /// Not refuted in the larger model class at the bounds.
    NotRefuted,
    /// Refuted in the larger class and the refutation transferred.
    Transferred,
    /// Refuted in the larger class; no countermodel in the smaller class was
    /// found within the search budget.
    Inconclusive,
    /// The smaller class refutes while the larger class does not, which the
    /// embedding of model classes rules out.
    Violation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransferReport {
    pub outcomes: Vec<TransferOutcome>,
}

impl TransferReport {
    pub fn count(&self, o: TransferOutcome) -> usize {
        self.outcomes.iter().filter(|&&x| x == o).count()
    }

    pub fn inconclusive_rate(&self) -> f64 {
        if self.outcomes.is_empty() {
            0.0
        } else {
            self.count(TransferOutcome::Inconclusive) as f64 / self.outcomes.len() as f64
        }
    }
}

impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sequents: {} not refuted, {} transferred, {} inconclusive, {} violations",
            self.outcomes.len(),
            self.count(TransferOutcome::NotRefuted),
            self.count(TransferOutcome::Transferred),
            self.count(TransferOutcome::Inconclusive),
            self.count(TransferOutcome::Violation),
        )
    }
}

/// Compares Kripke refutability at `kripke` bounds with constant-domain
/// refutability at `cd` bounds, which should lie within `kripke`.
///
/// A Kripke-valid sequent with a constant-domain countermodel is a violation.
/// A Kripke countermodel is carried over by unraveling and completion, falling
/// back to a constant-domain search; if both fail the sequent is inconclusive.
pub fn check_kripke_to_cd(
    corpus: &[Sequent],
    kripke: SearchBounds,
    cd: SearchBounds,
) -> Result<TransferReport, SearchError> {
    let outcomes = corpus
        .par_iter()
        .map(|s| -> Result<TransferOutcome, SearchError> {
            match decide(s, Mode::Kripke, kripke)? {
                Verdict::Refuted {
                    model,
                    world,
                    assignment,
                } => {
                    if cd_countermodel_via_completion(&model, world, &assignment, s).is_some() {
                        return Ok(TransferOutcome::Transferred);
                    }
                    Ok(if decide(s, Mode::Cd, cd)?.is_refuted() {
                        TransferOutcome::Transferred
                    } else {
                        TransferOutcome::Inconclusive
                    })
                }
                Verdict::ValidUpToBounds(_) => Ok(if decide(s, Mode::Cd, cd)?.is_refuted() {
                    TransferOutcome::Violation
                } else {
                    TransferOutcome::NotRefuted
                }),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TransferReport { outcomes })
}

/// For monotonic signatures: every constant-domain refutation at `cd` bounds
/// should have a classical one with at most `classical_domain` elements.
pub fn check_cd_to_classical(
    corpus: &[Sequent],
    cd: SearchBounds,
    classical_domain: usize,
) -> Result<TransferReport, SearchError> {
    let classical = SearchBounds {
        max_domain: classical_domain,
        ..cd
    };
    let outcomes = corpus
        .par_iter()
        .map(|s| -> Result<TransferOutcome, SearchError> {
            let cd_refuted = decide(s, Mode::Cd, cd)?.is_refuted();
            let cl_refuted = decide(s, Mode::Classical, classical)?.is_refuted();
            Ok(match (cd_refuted, cl_refuted) {
                (true, true) => TransferOutcome::Transferred,
                (true, false) => TransferOutcome::Inconclusive,
                (false, false) => TransferOutcome::NotRefuted,
                // one-world models are constant-domain models
                (false, true) if classical_domain <= cd.max_domain => TransferOutcome::Violation,
                (false, true) => TransferOutcome::NotRefuted,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TransferReport { outcomes })
}
