//! Relevant directed bisimulations between two finite models.
//!
//! A directed pair `<Z1, Z2>` has `Z1 ⊆ W1 × W2` and `Z2 ⊆ W2 × W1`. For
//! `i ∈ {1, 2}` and `j` the opposite index it must satisfy
//!
//! 1. `x Zi y` only if `y*j Zj x*i`;
//! 2. if `x Zi y` and `Rj y b c` then some `Ri x b' c'` has `b Zj b'` and `c' Zi c`;
//! 3. if `x Zi y` then every proposition true at `x` is true at `y`.
//!
//! [`stratify`] computes the greatest α-stratification stage by stage until it
//! stops shrinking; the last stage is the greatest directed bisimulation.

mod distinguish;

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::formula::PropId;
use crate::model::{Model, ModelError, WorldId};

pub use distinguish::{distinguish, Distinction, Distinguisher};

#[derive(Debug, Error)]
pub enum BisimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("worlds {0} and {1} are related by the greatest directed bisimulation; no formula separates them")]
    NotDistinguishable(String, String),
}

/// Which component of a directed pair: `Left` is `Z1 ⊆ W1 × W2`, `Right` is `Z2 ⊆ W2 × W1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// 1 for `Left`, 2 for `Right`.
    pub fn number(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// The two models of a comparison, addressed by [`Side`].
#[derive(Debug, Clone, Copy)]
pub struct ModelPair<'a> {
    pub left: &'a Model,
    pub right: &'a Model,
}

impl<'a> ModelPair<'a> {
    pub fn new(left: &'a Model, right: &'a Model) -> Self {
        ModelPair { left, right }
    }

    /// The model whose worlds form the domain of the `side` component.
    pub fn source(&self, side: Side) -> &'a Model {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// The model whose worlds form the codomain of the `side` component.
    pub fn target(&self, side: Side) -> &'a Model {
        self.source(side.opposite())
    }

    pub fn check_props(&self, props: &[PropId]) -> Result<(), ModelError> {
        for p in props {
            for m in [self.left, self.right] {
                if !m.has_prop(p) {
                    return Err(ModelError::UnknownProp(p.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// Propositions valued in both models, sorted by name.
pub fn shared_props(left: &Model, right: &Model) -> Vec<PropId> {
    left.props()
        .filter(|p| right.has_prop(p))
        .cloned()
        .collect()
}

/// A binary relation between two finite world sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Relation {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Relation {
            rows,
            cols,
            bits: vec![true; rows * cols],
        }
    }

    pub fn from_pairs(
        rows: usize,
        cols: usize,
        pairs: impl IntoIterator<Item = (WorldId, WorldId)>,
    ) -> Self {
        let mut rel = Relation::empty(rows, cols);
        for (x, y) in pairs {
            rel.insert(x, y);
        }
        rel
    }

    pub fn contains(&self, x: WorldId, y: WorldId) -> bool {
        x.0 < self.rows && y.0 < self.cols && self.bits[x.0 * self.cols + y.0]
    }

    pub fn insert(&mut self, x: WorldId, y: WorldId) {
        self.bits[x.0 * self.cols + y.0] = true;
    }

    pub fn remove(&mut self, x: WorldId, y: WorldId) {
        self.bits[x.0 * self.cols + y.0] = false;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Members in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (WorldId, WorldId)> + '_ {
        let cols = self.cols;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (WorldId(i / cols), WorldId(i % cols)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedPair {
    pub z1: Relation,
    pub z2: Relation,
}

impl DirectedPair {
    pub fn identity(model: &Model) -> Self {
        let n = model.len();
        let id = Relation::from_pairs(n, n, model.worlds().map(|w| (w, w)));
        DirectedPair {
            z1: id.clone(),
            z2: id,
        }
    }

    pub fn component(&self, side: Side) -> &Relation {
        match side {
            Side::Left => &self.z1,
            Side::Right => &self.z2,
        }
    }

    pub fn component_mut(&mut self, side: Side) -> &mut Relation {
        match side {
            Side::Left => &mut self.z1,
            Side::Right => &mut self.z2,
        }
    }

    pub fn contains(&self, side: Side, x: WorldId, y: WorldId) -> bool {
        self.component(side).contains(x, y)
    }

    pub fn is_subset(&self, other: &DirectedPair) -> bool {
        self.z1.is_subset(&other.z1) && self.z2.is_subset(&other.z2)
    }
}

/// Why a pair left the stratification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropWitness {
    /// The proposition holds at `x` but not at `y`.
    Atom(PropId),
    /// The star-dual pair `(y*, x*)` of the opposite component was already gone.
    Star { x: WorldId, y: WorldId },
    /// `R y b c` in the target model has no matching response from `x` at the
    /// previous stage.
    Challenge { b: WorldId, c: WorldId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DropRecord {
    pub side: Side,
    pub x: WorldId,
    pub y: WorldId,
    /// First stage the pair is absent from.
    pub stage: usize,
    pub witness: DropWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    pub props: Vec<PropId>,
    /// Stages `0..=alpha`; `stages[alpha]` is the fixed point.
    pub stages: Vec<DirectedPair>,
    pub alpha: usize,
    /// Drop records in removal order. Each record's witness only refers to pairs
    /// dropped before it.
    pub drops: Vec<DropRecord>,
    index: BTreeMap<(Side, WorldId, WorldId), usize>,
}

impl Stratification {
    pub fn fixed_point(&self) -> &DirectedPair {
        &self.stages[self.alpha]
    }

    pub fn drop_record(&self, side: Side, x: WorldId, y: WorldId) -> Option<&DropRecord> {
        self.index.get(&(side, x, y)).map(|&i| &self.drops[i])
    }

    /// Trace document with world names.
    pub fn to_json(&self, pair: ModelPair<'_>) -> Value {
        let names = |side: Side, rel: &Relation| -> Value {
            let (s, t) = (pair.source(side), pair.target(side));
            rel.pairs()
                .map(|(x, y)| json!([s.name(x), t.name(y)]))
                .collect()
        };
        let stages: Vec<Value> = self
            .stages
            .iter()
            .enumerate()
            .map(|(i, st)| json!({"stage": i, "z1": names(Side::Left, &st.z1), "z2": names(Side::Right, &st.z2)}))
            .collect();
        let drops: Vec<Value> = self.drops.iter().map(|d| drop_json(d, pair)).collect();
        json!({
            "alpha": self.alpha,
            "props": self.props.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "stages": stages,
            "drops": drops,
        })
    }
}

pub fn drop_json(d: &DropRecord, pair: ModelPair<'_>) -> Value {
    let (s, t) = (pair.source(d.side), pair.target(d.side));
    let witness = match &d.witness {
        DropWitness::Atom(p) => json!({"kind": "atom", "prop": p.to_string()}),
        DropWitness::Star { x, y } => {
            json!({"kind": "star", "pair": [t.name(*x), s.name(*y)]})
        }
        DropWitness::Challenge { b, c } => {
            json!({"kind": "challenge", "triple": [t.name(d.y), t.name(*b), t.name(*c)]})
        }
    };
    json!({
        "side": d.side.number(),
        "x": s.name(d.x),
        "y": t.name(d.y),
        "stage": d.stage,
        "witness": witness,
    })
}

struct Builder<'a> {
    pair: ModelPair<'a>,
    drops: Vec<DropRecord>,
    index: BTreeMap<(Side, WorldId, WorldId), usize>,
}

impl Builder<'_> {
    fn record(&mut self, side: Side, x: WorldId, y: WorldId, stage: usize, witness: DropWitness) {
        self.index.insert((side, x, y), self.drops.len());
        self.drops.push(DropRecord {
            side,
            x,
            y,
            stage,
            witness,
        });
    }

    /// Removes pairs violating clause (1) until none remain.
    fn close_under_star(&mut self, current: &mut DirectedPair, stage: usize) {
        loop {
            let mut changed = false;
            for side in Side::BOTH {
                let (s, t) = (self.pair.source(side), self.pair.target(side));
                let members: Vec<_> = current.component(side).pairs().collect();
                for (x, y) in members {
                    let (dx, dy) = (t.star(y), s.star(x));
                    if !current.contains(side.opposite(), dx, dy) {
                        current.component_mut(side).remove(x, y);
                        self.record(side, x, y, stage, DropWitness::Star { x: dx, y: dy });
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn initial(&mut self, props: &[PropId]) -> DirectedPair {
        let (n1, n2) = (self.pair.left.len(), self.pair.right.len());
        let mut stage = DirectedPair {
            z1: Relation::full(n1, n2),
            z2: Relation::full(n2, n1),
        };
        for side in Side::BOTH {
            let (s, t) = (self.pair.source(side), self.pair.target(side));
            for x in s.worlds() {
                for y in t.worlds() {
                    let failing = props.iter().find(|p| {
                        s.holds_atom(p, x).unwrap_or(false) && !t.holds_atom(p, y).unwrap_or(false)
                    });
                    if let Some(p) = failing {
                        stage.component_mut(side).remove(x, y);
                        self.record(side, x, y, 0, DropWitness::Atom(p.clone()));
                    }
                }
            }
        }
        self.close_under_star(&mut stage, 0);
        stage
    }

    fn refine(&mut self, previous: &DirectedPair, stage: usize) -> DirectedPair {
        let mut next = previous.clone();
        for side in Side::BOTH {
            let (s, t) = (self.pair.source(side), self.pair.target(side));
            for (x, y) in previous.component(side).pairs() {
                let unanswered = t.successors(y).iter().find(|&&(b, c)| {
                    !s.successors(x).iter().any(|&(b2, c2)| {
                        previous.contains(side.opposite(), b, b2) && previous.contains(side, c2, c)
                    })
                });
                if let Some(&(b, c)) = unanswered {
                    next.component_mut(side).remove(x, y);
                    self.record(side, x, y, stage, DropWitness::Challenge { b, c });
                }
            }
        }
        self.close_under_star(&mut next, stage);
        next
    }
}

/// Greatest relevant directed α-stratification for `props`, refined until two
/// consecutive stages coincide.
pub fn stratify(
    left: &Model,
    right: &Model,
    props: &[PropId],
) -> Result<Stratification, BisimError> {
    let pair = ModelPair::new(left, right);
    pair.check_props(props)?;
    let mut builder = Builder {
        pair,
        drops: Vec::new(),
        index: BTreeMap::new(),
    };
    let mut stages = vec![builder.initial(props)];
    loop {
        let previous = stages.last().expect("stage 0 exists");
        let next = builder.refine(previous, stages.len());
        if &next == previous {
            break;
        }
        stages.push(next);
    }
    Ok(Stratification {
        props: props.to_vec(),
        alpha: stages.len() - 1,
        stages,
        drops: builder.drops,
        index: builder.index,
    })
}

/// The greatest directed bisimulation, or `None` when it has an empty component.
pub fn max_bisim(
    left: &Model,
    right: &Model,
    props: &[PropId],
) -> Result<Option<DirectedPair>, BisimError> {
    let strat = stratify(left, right, props)?;
    let fixed = strat.fixed_point();
    if fixed.z1.is_empty() || fixed.z2.is_empty() {
        Ok(None)
    } else {
        Ok(Some(fixed.clone()))
    }
}

/// First clause a candidate pair fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseViolation {
    Empty(Side),
    Star {
        side: Side,
        x: WorldId,
        y: WorldId,
    },
    Forth {
        side: Side,
        x: WorldId,
        y: WorldId,
        b: WorldId,
        c: WorldId,
    },
    Atom {
        side: Side,
        x: WorldId,
        y: WorldId,
        prop: PropId,
    },
}

impl ClauseViolation {
    /// `"nonempty"`, `"1"`, `"2"` or `"3"`.
    pub fn clause(&self) -> &'static str {
        match self {
            ClauseViolation::Empty(_) => "nonempty",
            ClauseViolation::Star { .. } => "1",
            ClauseViolation::Forth { .. } => "2",
            ClauseViolation::Atom { .. } => "3",
        }
    }
}

/// Checks that `candidate` is a relevant directed bisimulation for `props`.
pub fn check_bisim(
    left: &Model,
    right: &Model,
    candidate: &DirectedPair,
    props: &[PropId],
) -> Result<Option<ClauseViolation>, BisimError> {
    let pair = ModelPair::new(left, right);
    pair.check_props(props)?;
    for side in Side::BOTH {
        if candidate.component(side).is_empty() {
            return Ok(Some(ClauseViolation::Empty(side)));
        }
    }
    for side in Side::BOTH {
        let (s, t) = (pair.source(side), pair.target(side));
        for (x, y) in candidate.component(side).pairs() {
            if x.0 >= s.len() || y.0 >= t.len() {
                return Err(ModelError::UnknownWorld(format!("#{}/#{}", x.0, y.0)).into());
            }
            if !candidate.contains(side.opposite(), t.star(y), s.star(x)) {
                return Ok(Some(ClauseViolation::Star { side, x, y }));
            }
            for &(b, c) in t.successors(y) {
                let answered = s.successors(x).iter().any(|&(b2, c2)| {
                    candidate.contains(side.opposite(), b, b2) && candidate.contains(side, c2, c)
                });
                if !answered {
                    return Ok(Some(ClauseViolation::Forth { side, x, y, b, c }));
                }
            }
            for p in props {
                if s.holds_atom(p, x)? && !t.holds_atom(p, y)? {
                    return Ok(Some(ClauseViolation::Atom {
                        side,
                        x,
                        y,
                        prop: p.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}
