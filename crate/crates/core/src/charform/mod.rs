//! Stage-indexed characteristic formulas for worlds of two models.
//!
//! For a world `a` of model `Mi` (the source) and the opposite model `Mj` (the
//! target), the stage-0 formula conjoins every literal `p` or `~p` true at `a`.
//! The stage-`n+1` formula conjoins the stage-`n` formula with every implication
//!
//! ```text
//! F[n](b) -> Or[F[n](d) : d in X]        (b a world of Mj, X a subset of Wi)
//! ```
//!
//! that holds at `a`, and the negation of every such implication whose negation
//! holds at `a`. By default the mirrored implications (`b` a world of `Mi`, `X` a
//! subset of `Wj`) are offered too; see [`Family`]. Formulas of both sides are
//! built together.
//!
//! Conjuncts whose satisfaction sets in both models repeat an earlier conjunct are
//! left out; they cannot change any satisfaction test on the two models.

mod dag;

use std::collections::HashSet;

use thiserror::Error;

use crate::bisim::{ModelPair, Side};
use crate::formula::{Formula, PropId};
use crate::model::{check_frame, Model, ModelError, SystemClass, WorldId};

pub use dag::{FormulaDag, Node, NodeId, Pattern};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CharFormError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("formula store exceeded its budget of {cap} nodes")]
    BudgetExceeded { cap: usize },
    #[error("{0} model is not a B-model")]
    NotBModel(&'static str),
    #[error("formula tree has {size} nodes, more than the limit of {cap}")]
    TooLarge { size: u64, cap: u64 },
}

/// Identifies `φ^{stage, world}`: the formula of `world` in the `source` model,
/// aimed at the opposite model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharKey {
    pub source: Side,
    pub world: WorldId,
    pub stage: usize,
}

impl CharKey {
    pub fn target(&self) -> Side {
        self.source.opposite()
    }
}

/// Which implications a successor stage may conjoin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Family {
    /// Only `F(b) -> Or[F(d) : d in X]` with `b` a world of the target and `X` a
    /// set of source worlds. This family does not always separate worlds that are
    /// not bisimilar; see the tests.
    OneSided,
    /// Both orientations: the antecedent may also come from the source and the
    /// disjuncts from the target. Worlds of either model then draw on the same
    /// implications, which the star clause needs.
    #[default]
    TwoSided,
}

#[derive(Debug, Clone)]
struct Candidate {
    antecedent: NodeId,
    disjuncts: Vec<NodeId>,
    disjunction: Pattern,
    pattern: Pattern,
}

pub struct CharFormulas<'a> {
    dag: FormulaDag<'a>,
    family: Family,
    props: Vec<PropId>,
    /// `stages[n][side][world]`
    stages: Vec<[Vec<NodeId>; 2]>,
}

fn slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl<'a> CharFormulas<'a> {
    pub fn new(
        left: &'a Model,
        right: &'a Model,
        props: &[PropId],
        node_cap: usize,
    ) -> Result<Self, CharFormError> {
        Self::with_family(left, right, props, node_cap, Family::default())
    }

    pub fn with_family(
        left: &'a Model,
        right: &'a Model,
        props: &[PropId],
        node_cap: usize,
        family: Family,
    ) -> Result<Self, CharFormError> {
        let pair = ModelPair::new(left, right);
        pair.check_props(props)?;
        let mut forms = CharFormulas {
            dag: FormulaDag::new(pair, node_cap),
            family,
            props: props.to_vec(),
            stages: Vec::new(),
        };
        let initial = [forms.literals(Side::Left)?, forms.literals(Side::Right)?];
        forms.stages.push(initial);
        Ok(forms)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dag(&self) -> &FormulaDag<'a> {
        &self.dag
    }

    pub fn dag_mut(&mut self) -> &mut FormulaDag<'a> {
        &mut self.dag
    }

    /// Number of stages built so far.
    pub fn built(&self) -> usize {
        self.stages.len()
    }

    fn literals(&mut self, side: Side) -> Result<Vec<NodeId>, CharFormError> {
        let model = self.dag.pair().source(side);
        let mut out = Vec::with_capacity(model.len());
        for a in model.worlds() {
            let mut conjuncts = Vec::new();
            for p in self.props.clone() {
                let atom = self.dag.intern(Node::Atom(p))?;
                if self.dag.holds(atom, side, a) {
                    conjuncts.push(atom);
                }
                let neg = self.dag.intern(Node::Neg(atom))?;
                if self.dag.holds(neg, side, a) {
                    conjuncts.push(neg);
                }
            }
            out.push(self.dag.intern(Node::Conj(conjuncts))?);
        }
        Ok(out)
    }

    fn extend(&mut self) -> Result<(), CharFormError> {
        let current = self.stages.last().expect("stage 0 exists").clone();
        let candidates = self.candidates(&current);
        let mut next = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            next[slot(side)] = self.successor_stage(side, &current, &candidates)?;
        }
        self.stages.push(next);
        Ok(())
    }

    /// Implications `F(b) -> Or[F(d) : d in X]` offered to worlds of `side`, with
    /// their patterns. The antecedent comes from one side and the disjuncts from
    /// the other.
    fn candidates(&self, current: &[Vec<NodeId>; 2]) -> [Vec<Candidate>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            out[slot(side)] = self.oriented(current, side.opposite(), side);
        }
        if self.family == Family::TwoSided {
            let left = self.oriented(current, Side::Left, Side::Right);
            let right = self.oriented(current, Side::Right, Side::Left);
            out[0].extend(left);
            out[1].extend(right);
        }
        out
    }

    fn oriented(
        &self,
        current: &[Vec<NodeId>; 2],
        ante_side: Side,
        disj_side: Side,
    ) -> Vec<Candidate> {
        let pair = self.dag.pair();
        let own = &current[slot(disj_side)];
        let n = own.len();
        // Disjunctions over subsets X, by bitmask.
        let subsets: Vec<(Vec<NodeId>, Pattern)> = (0u64..(1u64 << n))
            .map(|mask| {
                let items: Vec<NodeId> = (0..n)
                    .filter(|d| mask >> d & 1 == 1)
                    .map(|d| own[d])
                    .collect();
                let pattern = self.dag.pattern_of(&Node::Disj(items.clone()));
                (items, pattern)
            })
            .collect();
        let mut out = Vec::with_capacity(current[slot(ante_side)].len() << n);
        for &b in &current[slot(ante_side)] {
            let ante = self.dag.pattern(b);
            for (items, disj) in &subsets {
                let pattern = Pattern {
                    left: pair.left.implication_extension(&ante.left, &disj.left),
                    right: pair.right.implication_extension(&ante.right, &disj.right),
                };
                out.push(Candidate {
                    antecedent: b,
                    disjuncts: items.clone(),
                    disjunction: disj.clone(),
                    pattern,
                });
            }
        }
        out
    }

    fn successor_stage(
        &mut self,
        side: Side,
        current: &[Vec<NodeId>; 2],
        candidates: &[Vec<Candidate>; 2],
    ) -> Result<Vec<NodeId>, CharFormError> {
        let pair = self.dag.pair();
        let own = &current[slot(side)];
        let offered = &candidates[slot(side)];
        let mut out = Vec::with_capacity(own.len());
        for a in pair.source(side).worlds() {
            let mut conjuncts = vec![own[a.0]];
            let mut seen: HashSet<Pattern> = HashSet::new();
            seen.insert(self.dag.pattern(own[a.0]).clone());
            for negated in [false, true] {
                for c in offered {
                    let pattern = if negated {
                        Pattern {
                            left: pair.left.negation_extension(&c.pattern.left),
                            right: pair.right.negation_extension(&c.pattern.right),
                        }
                    } else {
                        c.pattern.clone()
                    };
                    if !pattern.side(side)[a.0] || seen.contains(&pattern) {
                        continue;
                    }
                    let disj = self
                        .dag
                        .intern_with(Node::Disj(c.disjuncts.clone()), c.disjunction.clone())?;
                    let imp = self.dag.intern(Node::Impl(c.antecedent, disj))?;
                    let id = if negated {
                        self.dag.intern(Node::Neg(imp))?
                    } else {
                        imp
                    };
                    seen.insert(pattern);
                    conjuncts.push(id);
                }
            }
            out.push(self.dag.intern(Node::Conj(conjuncts))?);
        }
        Ok(out)
    }

    fn ensure(&mut self, stage: usize) -> Result<(), CharFormError> {
        while self.stages.len() <= stage {
            self.extend()?;
        }
        Ok(())
    }

    /// The node for `φ^{key.stage, key.world}`, building stages as needed.
    pub fn formula(&mut self, key: CharKey) -> Result<NodeId, CharFormError> {
        self.dag.pair().source(key.source).check_world(key.world)?;
        self.ensure(key.stage)?;
        Ok(self.stages[key.stage][slot(key.source)][key.world.0])
    }

    /// Satisfaction of every stage-`stage` formula of either side in both models.
    pub fn satisfaction(&mut self, stage: usize) -> Result<Vec<Pattern>, CharFormError> {
        self.ensure(stage)?;
        Ok(self.stages[stage]
            .iter()
            .flatten()
            .map(|&id| self.dag.pattern(id).clone())
            .collect())
    }

    /// Least stage whose satisfaction relations equal those of the next stage.
    /// Every later stage has the same satisfaction relations.
    pub fn stabilization_stage(&mut self) -> Result<usize, CharFormError> {
        let mut stage = 0;
        loop {
            if self.satisfaction(stage)? == self.satisfaction(stage + 1)? {
                return Ok(stage);
            }
            stage += 1;
        }
    }
}

/// `φ^{stage, world}` for `world` of `source` aimed at `target`.
pub fn char_formula<'a>(
    source: &'a Model,
    world: WorldId,
    target: &'a Model,
    props: &[PropId],
    stage: usize,
    node_cap: usize,
) -> Result<(CharFormulas<'a>, NodeId), CharFormError> {
    let mut forms = CharFormulas::new(source, target, props, node_cap)?;
    let id = forms.formula(CharKey {
        source: Side::Left,
        world,
        stage,
    })?;
    Ok((forms, id))
}

/// Stabilization stage for the pair `(left, right)`.
pub fn stabilization_stage(
    left: &Model,
    right: &Model,
    props: &[PropId],
    node_cap: usize,
) -> Result<usize, CharFormError> {
    CharFormulas::new(left, right, props, node_cap)?.stabilization_stage()
}

/// The stabilized characteristic formula of a world, aimed at a target model.
pub struct Theta<'a> {
    forms: CharFormulas<'a>,
    root: NodeId,
    stage: usize,
}

impl<'a> Theta<'a> {
    pub fn root(&self) -> NodeId {
        self.root
    }

    /// The stabilization stage the formula was taken at.
    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Satisfaction at a world of the target model.
    pub fn holds_in_target(&self, w: WorldId) -> bool {
        self.forms.dag().holds(self.root, Side::Right, w)
    }

    /// Satisfaction at a world of the source model.
    pub fn holds_in_source(&self, w: WorldId) -> bool {
        self.forms.dag().holds(self.root, Side::Left, w)
    }

    pub fn node_count(&self) -> usize {
        self.forms.dag().len()
    }

    pub fn tree_size(&mut self) -> u64 {
        let root = self.root;
        self.forms.dag_mut().tree_size(root)
    }

    pub fn materialize(&mut self, max_size: u64) -> Result<Formula, CharFormError> {
        let root = self.root;
        self.forms.dag_mut().materialize(root, max_size)
    }

    pub fn forms(&mut self) -> &mut CharFormulas<'a> {
        &mut self.forms
    }

    pub fn into_forms(self) -> CharFormulas<'a> {
        self.forms
    }
}

/// `θ` for `world` of `source` aimed at `target`: the characteristic formula at the
/// stabilization stage. Both models must be B-models.
pub fn theta<'a>(
    source: &'a Model,
    world: WorldId,
    target: &'a Model,
    props: &[PropId],
    node_cap: usize,
) -> Result<Theta<'a>, CharFormError> {
    theta_with_family(source, world, target, props, node_cap, Family::default())
}

pub fn theta_with_family<'a>(
    source: &'a Model,
    world: WorldId,
    target: &'a Model,
    props: &[PropId],
    node_cap: usize,
    family: Family,
) -> Result<Theta<'a>, CharFormError> {
    if !check_frame(source, SystemClass::B).passed {
        return Err(CharFormError::NotBModel("source"));
    }
    if !check_frame(target, SystemClass::B).passed {
        return Err(CharFormError::NotBModel("target"));
    }
    source.check_world(world)?;
    let mut forms = CharFormulas::with_family(source, target, props, node_cap, family)?;
    let stage = forms.stabilization_stage()?;
    let root = forms.formula(CharKey {
        source: Side::Left,
        world,
        stage,
    })?;
    Ok(Theta { forms, root, stage })
}
