//! Finite Routley-Meyer structures `<W, R, *, T, V>` and the satisfaction relation.

mod frame;
mod generate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, PropId};

pub use frame::{check_frame, Condition, FrameReport, SystemClass, Violation};
pub use generate::generate_model;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("unknown proposition {0:?}")]
    UnknownProp(String),
    #[error("model generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("invalid model json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Index of a world inside one model. World ids are only meaningful for the
/// model that issued them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(pub usize);

impl WorldId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// On-disk model description.
///
/// ```json
/// {"worlds": ["t","s"], "star": {"t":"s","s":"t"}, "R": [["t","t","t"]],
///  "T": "t", "valuation": {"p": ["t","s"], "q": ["t"]}}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub worlds: Vec<String>,
    pub star: BTreeMap<String, String>,
    #[serde(rename = "R")]
    pub relation: Vec<[String; 3]>,
    #[serde(rename = "T")]
    pub base: String,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl ModelFile {
    /// Checks the structural invariants: nonempty distinct worlds, `T` a world,
    /// star total on worlds, triples and valuations over worlds.
    pub fn validate(&self) -> Result<(), ModelError> {
        Model::from_file(self).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    names: Vec<String>,
    index: BTreeMap<String, WorldId>,
    star: Vec<WorldId>,
    base: WorldId,
    relation: Vec<bool>,
    successors: Vec<Vec<(WorldId, WorldId)>>,
    valuation: BTreeMap<PropId, Vec<bool>>,
}

fn malformed(detail: impl Into<String>) -> ModelError {
    ModelError::Malformed(detail.into())
}

impl Model {
    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        if file.worlds.is_empty() {
            return Err(malformed("world set is empty"));
        }
        let mut index = BTreeMap::new();
        for (i, name) in file.worlds.iter().enumerate() {
            if name.is_empty() {
                return Err(malformed("world names must be nonempty"));
            }
            if index.insert(name.clone(), WorldId(i)).is_some() {
                return Err(malformed(format!("duplicate world {name:?}")));
            }
        }
        let lookup = |name: &str, what: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| malformed(format!("{what} refers to unknown world {name:?}")))
        };

        let base = lookup(&file.base, "T")?;

        let mut star = vec![None; file.worlds.len()];
        for (from, to) in &file.star {
            let from_id = lookup(from, "star")?;
            star[from_id.0] = Some(lookup(to, "star")?);
        }
        let star = star
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    malformed(format!(
                        "star is not total: no image for {:?}",
                        file.worlds[i]
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut triples = BTreeSet::new();
        for [x, y, z] in &file.relation {
            triples.insert((
                lookup(x, "R triple")?,
                lookup(y, "R triple")?,
                lookup(z, "R triple")?,
            ));
        }

        let mut valuation = BTreeMap::new();
        for (prop, worlds) in &file.valuation {
            let id = PropId::new(prop).map_err(|e| malformed(e.to_string()))?;
            let mut ext = vec![false; file.worlds.len()];
            for w in worlds {
                ext[lookup(w, "valuation")?.0] = true;
            }
            valuation.insert(id, ext);
        }

        Ok(Model::assemble(
            file.worlds.clone(),
            index,
            star,
            base,
            triples,
            valuation,
        ))
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        Model::from_file(&file)
    }

    fn assemble(
        names: Vec<String>,
        index: BTreeMap<String, WorldId>,
        star: Vec<WorldId>,
        base: WorldId,
        triples: BTreeSet<(WorldId, WorldId, WorldId)>,
        valuation: BTreeMap<PropId, Vec<bool>>,
    ) -> Self {
        let n = names.len();
        let mut relation = vec![false; n * n * n];
        let mut successors = vec![Vec::new(); n];
        for &(x, y, z) in &triples {
            relation[(x.0 * n + y.0) * n + z.0] = true;
            successors[x.0].push((y, z));
        }
        Model {
            names,
            index,
            star,
            base,
            relation,
            successors,
            valuation,
        }
    }

    /// Builds a model over index-named worlds. Used by the generator and tests.
    pub(crate) fn from_parts(
        names: Vec<String>,
        star: Vec<WorldId>,
        base: WorldId,
        triples: BTreeSet<(WorldId, WorldId, WorldId)>,
        valuation: BTreeMap<PropId, Vec<bool>>,
    ) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), WorldId(i)))
            .collect();
        Model::assemble(names, index, star, base, triples, valuation)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            worlds: self.names.clone(),
            star: self
                .worlds()
                .map(|w| {
                    (
                        self.name(w).to_string(),
                        self.name(self.star(w)).to_string(),
                    )
                })
                .collect(),
            relation: self
                .triples()
                .map(|(x, y, z)| {
                    [
                        self.name(x).to_string(),
                        self.name(y).to_string(),
                        self.name(z).to_string(),
                    ]
                })
                .collect(),
            base: self.name(self.base).to_string(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, ext)| {
                    let worlds = self
                        .worlds()
                        .filter(|w| ext[w.0])
                        .map(|w| self.name(w).to_string());
                    (p.to_string(), worlds.collect())
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn worlds(&self) -> impl Iterator<Item = WorldId> + Clone {
        (0..self.names.len()).map(WorldId)
    }

    pub fn name(&self, w: WorldId) -> &str {
        &self.names[w.0]
    }

    pub fn world(&self, name: &str) -> Result<WorldId, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn star(&self, w: WorldId) -> WorldId {
        self.star[w.0]
    }

    /// The designated world `T`.
    pub fn base(&self) -> WorldId {
        self.base
    }

    pub fn related(&self, x: WorldId, y: WorldId, z: WorldId) -> bool {
        let n = self.len();
        self.relation[(x.0 * n + y.0) * n + z.0]
    }

    /// Pairs `(y, z)` with `R x y z`, in ascending order.
    pub fn successors(&self, x: WorldId) -> &[(WorldId, WorldId)] {
        &self.successors[x.0]
    }

    pub fn triples(&self) -> impl Iterator<Item = (WorldId, WorldId, WorldId)> + '_ {
        self.worlds()
            .flat_map(move |x| self.successors(x).iter().map(move |&(y, z)| (x, y, z)))
    }

    /// Propositions with a valuation in this model, sorted by name.
    pub fn props(&self) -> impl Iterator<Item = &PropId> {
        self.valuation.keys()
    }

    pub fn has_prop(&self, p: &PropId) -> bool {
        self.valuation.contains_key(p)
    }

    pub fn holds_atom(&self, p: &PropId, w: WorldId) -> Result<bool, ModelError> {
        self.valuation
            .get(p)
            .map(|ext| ext[w.0])
            .ok_or_else(|| ModelError::UnknownProp(p.to_string()))
    }

    pub fn check_world(&self, w: WorldId) -> Result<(), ModelError> {
        if w.0 < self.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownWorld(format!("#{}", w.0)))
        }
    }

    /// Extension of `~phi` given the extension of `phi`.
    pub fn negation_extension(&self, inner: &[bool]) -> Vec<bool> {
        self.worlds().map(|w| !inner[self.star(w).0]).collect()
    }

    /// Extension of `phi -> psi` given the extensions of `phi` and `psi`.
    pub fn implication_extension(&self, antecedent: &[bool], consequent: &[bool]) -> Vec<bool> {
        self.worlds()
            .map(|w| {
                self.successors(w)
                    .iter()
                    .all(|&(a, b)| !antecedent[a.0] || consequent[b.0])
            })
            .collect()
    }

    /// The set of worlds satisfying `f`, as a membership vector indexed by world.
    pub fn extension(&self, f: &Formula) -> Result<Vec<bool>, ModelError> {
        for p in f.props() {
            if !self.has_prop(&p) {
                return Err(ModelError::UnknownProp(p.to_string()));
            }
        }
        Ok(self.extension_unchecked(f))
    }

    fn extension_unchecked(&self, f: &Formula) -> Vec<bool> {
        match f {
            Formula::Bottom => vec![false; self.len()],
            Formula::Atom(p) => self.valuation[p].clone(),
            Formula::Neg(inner) => self.negation_extension(&self.extension_unchecked(inner)),
            Formula::Conj(items) => items.iter().fold(vec![true; self.len()], |mut acc, item| {
                let ext = self.extension_unchecked(item);
                acc.iter_mut().zip(ext).for_each(|(a, e)| *a &= e);
                acc
            }),
            Formula::Disj(items) => items.iter().fold(vec![false; self.len()], |mut acc, item| {
                let ext = self.extension_unchecked(item);
                acc.iter_mut().zip(ext).for_each(|(a, e)| *a |= e);
                acc
            }),
            Formula::Impl(a, b) => self
                .implication_extension(&self.extension_unchecked(a), &self.extension_unchecked(b)),
        }
    }

    pub fn satisfies(&self, w: WorldId, f: &Formula) -> Result<bool, ModelError> {
        self.check_world(w)?;
        Ok(self.extension(f)?[w.0])
    }
}

/// `M, w |= f`.
pub fn satisfies(model: &Model, w: WorldId, f: &Formula) -> Result<bool, ModelError> {
    model.satisfies(w, f)
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_string(&self.to_file()).map_err(|_| fmt::Error)?;
        f.write_str(&text)
    }
}

/// The two-world model from the inconsistency argument: star swaps `t` and `s`,
/// `R` holds everywhere except `(t, t, s)`, `V(p) = {t, s}`, `V(q) = {t}`.
pub fn fixture_a() -> Model {
    Model::from_json(include_str!("../../fixtures/fixture_a.json"))
        .expect("fixture A is well formed")
}

/// One world `t`, `R = {(t,t,t)}`, star the identity, `V(p) = {}`.
pub fn fixture_b() -> Model {
    Model::from_json(include_str!("../../fixtures/fixture_b.json"))
        .expect("fixture B is well formed")
}
