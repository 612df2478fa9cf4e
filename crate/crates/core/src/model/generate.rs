//! Seeded random models for test corpora.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::{check_frame, SystemClass};
use super::{Model, ModelError, WorldId};
use crate::formula::PropId;

const MAX_ATTEMPTS: usize = 16;
const TRIPLE_DENSITY: f64 = 0.2;

type Triple = (WorldId, WorldId, WorldId);

/// Draws a model with `worlds` worlds named `w0..` and `props` propositions named
/// `p0..` that satisfies the frame conditions of `system`. The result depends only
/// on the arguments.
pub fn generate_model(
    worlds: usize,
    props: usize,
    system: SystemClass,
    seed: u64,
) -> Result<Model, ModelError> {
    if worlds == 0 {
        return Err(ModelError::Malformed(
            "a model needs at least one world".into(),
        ));
    }
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let model = draw(worlds, props, system, &mut rng);
        if check_frame(&model, system).passed {
            return Ok(model);
        }
    }
    Err(ModelError::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

fn draw(n: usize, k: usize, system: SystemClass, rng: &mut ChaCha8Rng) -> Model {
    let ids: Vec<WorldId> = (0..n).map(WorldId).collect();

    let star = if system == SystemClass::Raw {
        (0..n).map(|_| WorldId(rng.gen_range(0..n))).collect()
    } else {
        involution(&ids, rng)
    };
    let base = WorldId(rng.gen_range(0..n));

    let mut triples = BTreeSet::new();
    if system == SystemClass::Raw {
        for &x in &ids {
            for &y in &ids {
                for &z in &ids {
                    if rng.gen_bool(TRIPLE_DENSITY) {
                        triples.insert((x, y, z));
                    }
                }
            }
        }
    } else {
        // Closure adds many triples, so start from a few.
        for _ in 0..rng.gen_range(0..=n) {
            let mut pick = || ids[rng.gen_range(0..n)];
            triples.insert((pick(), pick(), pick()));
        }

        close_relation(&mut triples, &ids, &star, base, system, rng);
    }

    let mut valuation = BTreeMap::new();
    for i in 0..k {
        let mut ext: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if system != SystemClass::Raw {
            close_upward(&mut ext, &triples, base);
        }
        valuation.insert(
            PropId::new(&format!("p{i}")).expect("generated names are valid"),
            ext,
        );
    }

    let names = (0..n).map(|i| format!("w{i}")).collect();
    Model::from_parts(names, star, base, triples, valuation)
}

/// Random star with `x** = x`: shuffle, then pair neighbours or leave them fixed.
fn involution(ids: &[WorldId], rng: &mut ChaCha8Rng) -> Vec<WorldId> {
    let mut order = ids.to_vec();
    order.shuffle(rng);
    let mut star = ids.to_vec();
    let mut i = 0;
    while i < order.len() {
        if i + 1 < order.len() && rng.gen_bool(0.5) {
            let (a, b) = (order[i], order[i + 1]);
            star[a.0] = b;
            star[b.0] = a;
            i += 2;
        } else {
            i += 1;
        }
    }
    star
}

/// Adds triples until every implicational frame condition of `system` holds.
/// Existential and disjunctive conditions (r5, m1) are repaired by a random choice
/// of witness. The full relation satisfies every condition, so this terminates.
fn close_relation(
    triples: &mut BTreeSet<Triple>,
    ids: &[WorldId],
    star: &[WorldId],
    base: WorldId,
    system: SystemClass,
    rng: &mut ChaCha8Rng,
) {
    let strong = matches!(system, SystemClass::R | SystemClass::RM);
    loop {
        let mut added: Vec<Triple> = Vec::new();
        let has = |t: &BTreeSet<Triple>, x, y, z| t.contains(&(x, y, z));

        for &x in ids {
            added.push((base, x, x));
            if strong {
                added.push((x, x, x));
            }
        }
        for &(a, b, c) in triples.iter() {
            // b2: R T b c and R c y z give R b y z.
            if a == base {
                for &(v, y, z) in triples.range((c, WorldId(0), WorldId(0))..) {
                    if v != c {
                        break;
                    }
                    added.push((b, y, z));
                }
            }
            if strong {
                added.push((a, star[c.0], star[b.0]));
                added.push((b, a, c));
            } else if a == base {
                added.push((base, star[c.0], star[b.0]));
            }
        }
        added.retain(|&(x, y, z)| !has(triples, x, y, z));

        if added.is_empty() && strong {
            if let Some((x, y, z, v)) = first_r5_failure(triples, ids) {
                let u = ids[rng.gen_range(0..ids.len())];
                added.push((x, u, v));
                added.push((y, z, u));
            }
        }
        if added.is_empty() && system == SystemClass::RM {
            let failure = triples
                .iter()
                .copied()
                .find(|&(x, y, z)| !has(triples, base, x, z) && !has(triples, base, y, z));
            if let Some((x, y, z)) = failure {
                let pick = if rng.gen_bool(0.5) { x } else { y };
                added.push((base, pick, z));
            }
        }

        added.retain(|&(x, y, z)| !has(triples, x, y, z));
        if added.is_empty() {
            return;
        }
        triples.extend(added);
    }
}

fn first_r5_failure(
    triples: &BTreeSet<Triple>,
    ids: &[WorldId],
) -> Option<(WorldId, WorldId, WorldId, WorldId)> {
    let has = |x, y, z| triples.contains(&(x, y, z));
    for &x in ids {
        for &y in ids {
            for &z in ids {
                for &v in ids {
                    let left = ids.iter().any(|&u| has(x, y, u) && has(u, z, v));
                    let right = ids.iter().any(|&u| has(x, u, v) && has(y, z, u));
                    if left && !right {
                        return Some((x, y, z, v));
                    }
                }
            }
        }
    }
    None
}

fn close_upward(ext: &mut [bool], triples: &BTreeSet<Triple>, base: WorldId) {
    loop {
        let mut changed = false;
        for &(t, x, y) in triples.iter() {
            if t == base && ext[x.0] && !ext[y.0] {
                ext[y.0] = true;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}
