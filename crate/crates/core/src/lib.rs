//! Finite Routley-Meyer model theory for infinitary relevant logic.
//!
//! * [`formula`]: formula AST, concrete syntax, degree, iterated entailment.
//! * [`model`]: finite models, frame conditions for B/R/RM, satisfaction, generator.
//! * [`bisim`]: directed α-bisimulation stratification, maximal directed
//!   bisimulations and distinguishing formulas.
//! * [`charform`]: stage-indexed characteristic formulas and the θ-test.
//! * [`correspond`]: standard translation into the first-order correspondence
//!   language and a first-order evaluator.
//! * [`corpus`]: seeded random formulas and model pairs for property checks.
//! * [`cli`]: the command-line front end.

pub mod bisim;
pub mod charform;
pub mod cli;
pub mod corpus;
pub mod correspond;
pub mod formula;
pub mod model;

pub use formula::{Formula, PropId};
pub use model::{Model, WorldId};
