//! Distinguishing formulas for pairs outside the greatest directed bisimulation.
//!
//! For a pair `(x, y)` dropped from component `i` at stage `s`, the formula is
//! true at `x` in `Mi`, false at `y` in `Mj`, and has degree at most `s`:
//!
//! * atom drops give the atom;
//! * star drops negate the formula of the star-dual pair;
//! * challenge drops for `Rj y b c` give `A -> C`, where `A` conjoins formulas
//!   separating `b` from each response antecedent `b'` and `C` disjoins formulas
//!   separating each response consequent `c'` from `c`. An empty `A` is `top`, an
//!   empty `C` is `bot`.

use std::collections::BTreeMap;

use super::{stratify, BisimError, DropWitness, ModelPair, Side, Stratification};
use crate::formula::{Formula, PropId};
use crate::model::{Model, WorldId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    pub formula: Formula,
    /// Stage at which the pair left the stratification.
    pub stage: usize,
}

pub struct Distinguisher<'a> {
    pair: ModelPair<'a>,
    strat: &'a Stratification,
    memo: BTreeMap<(Side, WorldId, WorldId), Formula>,
}

impl<'a> Distinguisher<'a> {
    pub fn new(left: &'a Model, right: &'a Model, strat: &'a Stratification) -> Self {
        Distinguisher {
            pair: ModelPair::new(left, right),
            strat,
            memo: BTreeMap::new(),
        }
    }

    /// A formula true at `x` in the source model of `side` and false at `y` in its
    /// target, or `None` if the pair is in the fixed point.
    pub fn distinguish(&mut self, side: Side, x: WorldId, y: WorldId) -> Option<Distinction> {
        let stage = self.strat.drop_record(side, x, y)?.stage;
        Some(Distinction {
            formula: self.formula(side, x, y),
            stage,
        })
    }

    fn formula(&mut self, side: Side, x: WorldId, y: WorldId) -> Formula {
        if let Some(f) = self.memo.get(&(side, x, y)) {
            return f.clone();
        }
        let record = self
            .strat
            .drop_record(side, x, y)
            .expect("only dropped pairs are separated");
        let stage = record.stage;
        let formula = match record.witness.clone() {
            DropWitness::Atom(p) => Formula::Atom(p),
            DropWitness::Star { x: dx, y: dy } => self.formula(side.opposite(), dx, dy).neg(),
            DropWitness::Challenge { b, c } => {
                let previous = &self.strat.stages[stage - 1];
                let source = self.pair.source(side);
                let mut antecedents: Vec<Formula> = Vec::new();
                let mut consequents: Vec<Formula> = Vec::new();
                for &(b2, c2) in source.successors(x) {
                    if !previous.contains(side.opposite(), b, b2) {
                        push_unique(&mut antecedents, self.formula(side.opposite(), b, b2));
                    } else {
                        debug_assert!(!previous.contains(side, c2, c));
                        push_unique(&mut consequents, self.formula(side, c2, c));
                    }
                }
                let antecedent = match antecedents.len() {
                    0 => Formula::top(),
                    1 => antecedents.pop().expect("one item"),
                    _ => Formula::Conj(antecedents),
                };
                let consequent = match consequents.len() {
                    0 => Formula::Bottom,
                    1 => consequents.pop().expect("one item"),
                    _ => Formula::Disj(consequents),
                };
                antecedent.implies(consequent)
            }
        };
        self.memo.insert((side, x, y), formula.clone());
        formula
    }
}

fn push_unique(items: &mut Vec<Formula>, f: Formula) {
    if !items.contains(&f) {
        items.push(f);
    }
}

/// A formula true at `w1` in `left` and false at `w2` in `right`. Swap the
/// arguments for the other direction.
pub fn distinguish(
    left: &Model,
    w1: WorldId,
    right: &Model,
    w2: WorldId,
    props: &[PropId],
) -> Result<Distinction, BisimError> {
    left.check_world(w1)?;
    right.check_world(w2)?;
    let strat = stratify(left, right, props)?;
    Distinguisher::new(left, right, &strat)
        .distinguish(Side::Left, w1, w2)
        .ok_or_else(|| {
            BisimError::NotDistinguishable(left.name(w1).to_string(), right.name(w2).to_string())
        })
}
