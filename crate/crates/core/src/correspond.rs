//! Standard translation into the first-order correspondence language, and a
//! finite-model evaluator for it.
//!
//! The signature has one constant `T`, a unary function `*`, a ternary relation `R`
//! and one unary predicate per proposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, PropId};
use crate::model::{Model, ModelError, WorldId};

#[derive(Debug, Error)]
pub enum CorrespondError {
    #[error("variable {0} has no value")]
    UnboundVariable(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FOTerm {
    Var(String),
    Star(Box<FOTerm>),
    ConstT,
}

impl FOTerm {
    pub fn var(name: &str) -> Self {
        FOTerm::Var(name.to_string())
    }

    pub fn star(self) -> Self {
        FOTerm::Star(Box::new(self))
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FOTerm::Var(v) => {
                out.insert(v.clone());
            }
            FOTerm::Star(t) => t.collect_vars(out),
            FOTerm::ConstT => {}
        }
    }

    pub fn eval(
        &self,
        model: &Model,
        assignment: &BTreeMap<String, WorldId>,
    ) -> Result<WorldId, CorrespondError> {
        match self {
            FOTerm::Var(v) => assignment
                .get(v)
                .copied()
                .ok_or_else(|| CorrespondError::UnboundVariable(v.clone())),
            FOTerm::Star(t) => Ok(model.star(t.eval(model, assignment)?)),
            FOTerm::ConstT => Ok(model.base()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FOFormula {
    Pred(PropId, FOTerm),
    RAtom(FOTerm, FOTerm, FOTerm),
    Not(Box<FOFormula>),
    And(Vec<FOFormula>),
    Or(Vec<FOFormula>),
    MatImpl(Box<FOFormula>, Box<FOFormula>),
    Forall(Vec<String>, Box<FOFormula>),
    Exists(Vec<String>, Box<FOFormula>),
}

impl FOFormula {
    pub fn negate(self) -> Self {
        FOFormula::Not(Box::new(self))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            FOFormula::Pred(_, t) => t.collect_vars(out),
            FOFormula::RAtom(a, b, c) => {
                a.collect_vars(out);
                b.collect_vars(out);
                c.collect_vars(out);
            }
            FOFormula::Not(f) => f.collect_free(out),
            FOFormula::And(items) | FOFormula::Or(items) => {
                items.iter().for_each(|f| f.collect_free(out))
            }
            FOFormula::MatImpl(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            FOFormula::Forall(vars, f) | FOFormula::Exists(vars, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                out.extend(inner.into_iter().filter(|v| !vars.contains(v)));
            }
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(
            self,
            FOFormula::Pred(..) | FOFormula::RAtom(..) | FOFormula::Not(_)
        ) || matches!(self, FOFormula::And(items) | FOFormula::Or(items) if items.is_empty())
    }
}

/// `T_x(f)` with world variable `x`. Bound variables are `y0, z0, y1, z1, ...`,
/// skipping `x`.
pub fn translate(f: &Formula, x: &str) -> FOFormula {
    let mut fresh = Fresh { next: 0, avoid: x };
    fresh.translate(f, &FOTerm::var(x))
}

struct Fresh<'a> {
    next: usize,
    avoid: &'a str,
}

impl Fresh<'_> {
    fn pair(&mut self) -> (String, String) {
        loop {
            let (y, z) = (format!("y{}", self.next), format!("z{}", self.next));
            self.next += 1;
            if y != self.avoid && z != self.avoid {
                return (y, z);
            }
        }
    }

    fn translate(&mut self, f: &Formula, at: &FOTerm) -> FOFormula {
        match f {
            Formula::Bottom => {
                let r = FOFormula::RAtom(at.clone(), at.clone(), at.clone());
                FOFormula::And(vec![r.clone().negate(), r])
            }
            Formula::Atom(p) => FOFormula::Pred(p.clone(), at.clone()),
            Formula::Neg(inner) => self.translate(inner, &at.clone().star()).negate(),
            Formula::Conj(items) => {
                FOFormula::And(items.iter().map(|g| self.translate(g, at)).collect())
            }
            Formula::Disj(items) => {
                FOFormula::Or(items.iter().map(|g| self.translate(g, at)).collect())
            }
            Formula::Impl(a, b) => {
                let (y, z) = self.pair();
                let (ty, tz) = (FOTerm::var(&y), FOTerm::var(&z));
                let ante = self.translate(a, &ty);
                let cons = self.translate(b, &tz);
                let body = FOFormula::MatImpl(
                    Box::new(FOFormula::And(vec![
                        FOFormula::RAtom(at.clone(), ty, tz),
                        ante,
                    ])),
                    Box::new(cons),
                );
                FOFormula::Forall(vec![y, z], Box::new(body))
            }
        }
    }
}

/// Tarskian truth of `f` in `model` under `assignment`. Quantifiers range over the
/// worlds of the model.
pub fn fo_eval(
    model: &Model,
    f: &FOFormula,
    assignment: &BTreeMap<String, WorldId>,
) -> Result<bool, CorrespondError> {
    let mut env = assignment.clone();
    eval(model, f, &mut env)
}

fn eval(
    model: &Model,
    f: &FOFormula,
    env: &mut BTreeMap<String, WorldId>,
) -> Result<bool, CorrespondError> {
    Ok(match f {
        FOFormula::Pred(p, t) => {
            let w = t.eval(model, env)?;
            model.holds_atom(p, w)?
        }
        FOFormula::RAtom(a, b, c) => model.related(
            a.eval(model, env)?,
            b.eval(model, env)?,
            c.eval(model, env)?,
        ),
        FOFormula::Not(g) => !eval(model, g, env)?,
        FOFormula::And(items) => {
            for g in items {
                if !eval(model, g, env)? {
                    return Ok(false);
                }
            }
            true
        }
        FOFormula::Or(items) => {
            for g in items {
                if eval(model, g, env)? {
                    return Ok(true);
                }
            }
            false
        }
        FOFormula::MatImpl(a, b) => !eval(model, a, env)? || eval(model, b, env)?,
        FOFormula::Forall(vars, g) => quantify(model, vars, g, env, true)?,
        FOFormula::Exists(vars, g) => quantify(model, vars, g, env, false)?,
    })
}

/// Checks `g` under every assignment of `vars`, stopping at the first value
/// different from `universal`.
fn quantify(
    model: &Model,
    vars: &[String],
    g: &FOFormula,
    env: &mut BTreeMap<String, WorldId>,
    universal: bool,
) -> Result<bool, CorrespondError> {
    let Some((v, rest)) = vars.split_first() else {
        return eval(model, g, env);
    };
    let saved = env.get(v).copied();
    let mut result = universal;
    for w in model.worlds() {
        env.insert(v.clone(), w);
        match quantify(model, rest, g, env, universal) {
            Ok(value) if value != universal => {
                result = value;
                break;
            }
            Ok(_) => {}
            Err(e) => {
                restore(env, v, saved);
                return Err(e);
            }
        }
    }
    restore(env, v, saved);
    Ok(result)
}

fn restore(env: &mut BTreeMap<String, WorldId>, v: &str, saved: Option<WorldId>) {
    match saved {
        Some(w) => env.insert(v.to_string(), w),
        None => env.remove(v),
    };
}

fn predicate_name(p: &PropId) -> String {
    let mut chars = p.as_str().chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

impl fmt::Display for FOTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FOTerm::Var(v) => write!(f, "{v}"),
            FOTerm::Star(t) => write!(f, "{t}^*"),
            FOTerm::ConstT => write!(f, "T"),
        }
    }
}

struct Operand<'a>(&'a FOFormula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atomic() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

fn join(f: &mut fmt::Formatter<'_>, items: &[FOFormula], sep: &str) -> fmt::Result {
    for (i, g) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " {sep} ")?;
        }
        write!(f, "{}", Operand(g))?;
    }
    Ok(())
}

/// ASCII syntax: `forall y0 z0. (R(x,y0,z0) & P(y0)) => Q(z0)`.
impl fmt::Display for FOFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FOFormula::Pred(p, t) => write!(f, "{}({t})", predicate_name(p)),
            FOFormula::RAtom(a, b, c) => write!(f, "R({a},{b},{c})"),
            FOFormula::Not(g) => write!(f, "~{}", Operand(g)),
            FOFormula::And(items) if items.is_empty() => write!(f, "true"),
            FOFormula::Or(items) if items.is_empty() => write!(f, "false"),
            FOFormula::And(items) => join(f, items, "&"),
            FOFormula::Or(items) => join(f, items, "|"),
            FOFormula::MatImpl(a, b) => write!(f, "{} => {}", Operand(a), Operand(b)),
            FOFormula::Forall(vars, g) => write!(f, "forall {}. {g}", vars.join(" ")),
            FOFormula::Exists(vars, g) => write!(f, "exists {}. {g}", vars.join(" ")),
        }
    }
}
