//! The model file format.
//!
//! ```toml
//! worlds = ["w1", "w2"]
//! elements = ["a1", "a2"]
//! order = [["w1", "w2"]]
//! facts = [
//!     { world = "w1", pred = "p", args = ["a1"] },
//!     { world = "w1", pred = "T", args = [] },
//! ]
//!
//! [domains]
//! w1 = ["a1"]
//! w2 = ["a1", "a2"]
//! ```
//!
//! `order` may be any generating relation; it is closed reflexively and
//! transitively on load. Facts not listed are 0. `elements` is optional and
//! fixes the declaration order; without it, elements are ordered by first
//! appearance in the domains taken in world order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ElementId, KripkeModel, Violation, WorldId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelFileError {
    #[error("model file: {0}")]
    Parse(String),
    #[error("model file mentions unknown world `{0}`")]
    UnknownWorld(String),
    #[error("model file mentions unknown element `{0}`")]
    UnknownElement(String),
    #[error("world `{0}` is declared twice")]
    DuplicateWorld(String),
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    elements: Option<Vec<String>>,
    #[serde(default)]
    order: Vec<(String, String)>,
    #[serde(default)]
    facts: Vec<FactEntry>,
    domains: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct FactEntry {
    world: String,
    pred: String,
    #[serde(default)]
    args: Vec<String>,
}

impl KripkeModel {
    /// Parses the model file format without validating the result.
    pub fn from_toml_unchecked(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile =
            toml::from_str(text).map_err(|e| ModelFileError::Parse(e.to_string()))?;
        let mut world_idx = BTreeMap::new();
        for (i, w) in file.worlds.iter().enumerate() {
            if world_idx.insert(w.clone(), i).is_some() {
                return Err(ModelFileError::DuplicateWorld(w.clone()));
            }
        }
        for w in file.domains.keys() {
            if !world_idx.contains_key(w) {
                return Err(ModelFileError::UnknownWorld(w.clone()));
            }
        }
        let elements = match file.elements {
            Some(e) => e,
            None => {
                let mut seen = Vec::new();
                for w in &file.worlds {
                    for e in file.domains.get(w).into_iter().flatten() {
                        if !seen.contains(e) {
                            seen.push(e.clone());
                        }
                    }
                }
                seen
            }
        };
        let elem = |name: &str| {
            elements
                .iter()
                .position(|e| e == name)
                .map(ElementId)
                .ok_or_else(|| ModelFileError::UnknownElement(name.to_string()))
        };
        let world = |name: &str| {
            world_idx
                .get(name)
                .copied()
                .map(WorldId)
                .ok_or_else(|| ModelFileError::UnknownWorld(name.to_string()))
        };
        let order = file
            .order
            .iter()
            .map(|(a, b)| Ok((world(a)?, world(b)?)))
            .collect::<Result<Vec<_>, ModelFileError>>()?;
        let domains = file
            .worlds
            .iter()
            .map(|w| {
                file.domains
                    .get(w)
                    .into_iter()
                    .flatten()
                    .map(|e| elem(e))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let facts = file
            .facts
            .iter()
            .map(|f| {
                let args = f.args.iter().map(|a| elem(a)).collect::<Result<Vec<_>, _>>()?;
                Ok((world(&f.world)?, f.pred.clone(), args))
            })
            .collect::<Result<Vec<_>, ModelFileError>>()?;
        Ok(KripkeModel::new(file.worlds, elements, &order, domains, facts))
    }

    /// Parses and validates a model file.
    pub fn from_toml(text: &str) -> Result<Self, ModelFileError> {
        let k = Self::from_toml_unchecked(text)?;
        let violations = k.validate();
        if violations.is_empty() {
            Ok(k)
        } else {
            Err(ModelFileError::Invalid(violations))
        }
    }

    /// Writes the model file format. The order is written as its covering
    /// pairs (or all strict pairs on cycles), which reloads to the same model.
    pub fn to_toml(&self) -> String {
        let n = self.world_count();
        let mut order = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.leq[i][j] {
                    continue;
                }
                let covered = self.is_partial_order()
                    && (0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j]);
                if !covered {
                    order.push((self.world_names[i].clone(), self.world_names[j].clone()));
                }
            }
        }
        let mut facts: Vec<(WorldId, &str, &[ElementId])> = self.facts().collect();
        facts.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let file = ModelFile {
            worlds: self.world_names.clone(),
            elements: Some(self.element_names.clone()),
            order,
            facts: facts
                .into_iter()
                .map(|(w, p, args)| FactEntry {
                    world: self.world_names[w.0].clone(),
                    pred: p.to_string(),
                    args: args.iter().map(|e| self.element_names[e.0].clone()).collect(),
                })
                .collect(),
            domains: self
                .worlds()
                .map(|w| {
                    (
                        self.world_names[w.0].clone(),
                        self.domain(w)
                            .iter()
                            .map(|e| self.element_names[e.0].clone())
                            .collect(),
                    )
                })
                .collect(),
        };
        toml::to_string(&file).expect("model serializes")
    }
}
