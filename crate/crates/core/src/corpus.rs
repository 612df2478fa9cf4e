//! Seeded random formulas and model pairs for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, PropId};
use crate::model::{generate_model, Model, ModelError, SystemClass};

/// A random formula over `props` of tree depth at most `max_depth`.
pub fn random_formula(rng: &mut impl Rng, props: &[PropId], max_depth: usize) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| {
        if props.is_empty() || rng.gen_bool(0.15) {
            Formula::Bottom
        } else {
            Formula::Atom(props[rng.gen_range(0..props.len())].clone())
        }
    };
    if max_depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng);
    }
    let d = max_depth - 1;
    match rng.gen_range(0..5) {
        0 => random_formula(rng, props, d).neg(),
        1 => Formula::Conj(
            (0..rng.gen_range(0..=3))
                .map(|_| random_formula(rng, props, d))
                .collect(),
        ),
        2 => Formula::Disj(
            (0..rng.gen_range(0..=3))
                .map(|_| random_formula(rng, props, d))
                .collect(),
        ),
        _ => random_formula(rng, props, d).implies(random_formula(rng, props, d)),
    }
}

/// `count` formulas drawn from `seed`.
pub fn formula_pool(seed: u64, count: usize, props: &[PropId], max_depth: usize) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_formula(&mut rng, props, max_depth))
        .collect()
}

/// Two generated models over the same `props` propositions, with world counts in
/// `1..=max_worlds`.
pub fn model_pair(
    seed: u64,
    max_worlds: usize,
    props: usize,
    system: SystemClass,
) -> Result<(Model, Model), ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n1 = rng.gen_range(1..=max_worlds);
    let n2 = rng.gen_range(1..=max_worlds);
    Ok((
        generate_model(n1, props, system, rng.gen())?,
        generate_model(n2, props, system, rng.gen())?,
    ))
}
