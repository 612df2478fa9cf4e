//! Oracles shared by the integration tests. They are written straight from the
//! definitions and avoid the library's own algorithms.

#![allow(dead_code)]

use std::collections::BTreeSet;

use routley::formula::PropId;
use routley::model::{Model, SystemClass, WorldId};

pub fn props(names: &[&str]) -> Vec<PropId> {
    names.iter().map(|n| PropId::new(n).unwrap()).collect()
}

pub fn ws(m: &Model) -> Vec<WorldId> {
    m.worlds().collect()
}

/// Frame conditions by direct quantification.
pub fn frame_oracle(m: &Model, system: SystemClass) -> bool {
    let w = ws(m);
    let r = |x: WorldId, y: WorldId, z: WorldId| m.related(x, y, z);
    let t = m.base();
    let s = |x: WorldId| m.star(x);
    let mut triples = Vec::new();
    for &x in &w {
        for &y in &w {
            for &z in &w {
                triples.push((x, y, z));
            }
        }
    }
    let all3 = || triples.iter().copied();

    let b1 = w.iter().all(|&x| r(t, x, x));
    let b2 = all3().all(|(x, y, z)| w.iter().all(|&v| !(r(t, x, v) && r(v, y, z)) || r(x, y, z)));
    let b3 = w.iter().all(|&x| s(s(x)) == x);
    let b4 = w
        .iter()
        .all(|&x| w.iter().all(|&y| !r(t, x, y) || r(t, s(y), s(x))));
    let b5 = m.props().all(|p| {
        w.iter().all(|&x| {
            w.iter().all(|&y| {
                !(m.holds_atom(p, x).unwrap() && r(t, x, y)) || m.holds_atom(p, y).unwrap()
            })
        })
    });
    let r4 = all3().all(|(z, x, y)| !r(z, x, y) || r(z, s(y), s(x)));
    let r5 = all3().all(|(x, y, z)| {
        w.iter().all(|&v| {
            let left = w.iter().any(|&u| r(x, y, u) && r(u, z, v));
            let right = w.iter().any(|&u| r(x, u, v) && r(y, z, u));
            !left || right
        })
    });
    let r6 = w.iter().all(|&x| r(x, x, x));
    let r7 = all3().all(|(x, y, z)| !r(x, y, z) || r(y, x, z));
    let m1 = all3().all(|(x, y, z)| !r(x, y, z) || r(t, x, z) || r(t, y, z));

    match system {
        SystemClass::Raw => true,
        SystemClass::B => b1 && b2 && b3 && b4 && b5,
        SystemClass::R => b1 && b2 && b3 && r4 && b5 && r5 && r6 && r7,
        SystemClass::RM => b1 && b2 && b3 && r4 && b5 && r5 && r6 && r7 && m1,
    }
}

pub type Rel = BTreeSet<(WorldId, WorldId)>;

fn subsets(universe: &[(WorldId, WorldId)]) -> impl Iterator<Item = Rel> + '_ {
    (0u64..1 << universe.len()).map(move |mask| {
        universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| *p)
            .collect()
    })
}

fn product(a: &[WorldId], b: &[WorldId]) -> Vec<(WorldId, WorldId)> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .collect()
}

/// Clauses (1)-(3) of a directed bisimulation for one direction: `zi` goes from
/// `mi` to `mj`, `zj` back.
fn clauses_hold(mi: &Model, mj: &Model, zi: &Rel, zj: &Rel, props: &[PropId]) -> bool {
    zi.iter().all(|&(x, y)| {
        let star = zj.contains(&(mj.star(y), mi.star(x)));
        let atoms = props
            .iter()
            .all(|p| !mi.holds_atom(p, x).unwrap() || mj.holds_atom(p, y).unwrap());
        let forth = ws(mj).iter().all(|&b| {
            ws(mj).iter().all(|&c| {
                !mj.related(y, b, c)
                    || ws(mi).iter().any(|&b2| {
                        ws(mi).iter().any(|&c2| {
                            mi.related(x, b2, c2) && zj.contains(&(b, b2)) && zi.contains(&(c2, c))
                        })
                    })
            })
        });
        star && atoms && forth
    })
}

pub fn is_bisimulation(m1: &Model, m2: &Model, z1: &Rel, z2: &Rel, props: &[PropId]) -> bool {
    !z1.is_empty()
        && !z2.is_empty()
        && clauses_hold(m1, m2, z1, z2, props)
        && clauses_hold(m2, m1, z2, z1, props)
}

/// Union of every directed bisimulation, by enumerating all candidate pairs.
/// Feasible only for tiny models.
pub fn brute_force_max_bisim(m1: &Model, m2: &Model, props: &[PropId]) -> (Rel, Rel) {
    let (w1, w2) = (ws(m1), ws(m2));
    let u1 = product(&w1, &w2);
    let u2 = product(&w2, &w1);
    let mut best = (Rel::new(), Rel::new());
    let all2: Vec<Rel> = subsets(&u2).collect();
    for z1 in subsets(&u1) {
        for z2 in &all2 {
            if is_bisimulation(m1, m2, &z1, z2, props) {
                best.0.extend(z1.iter().copied());
                best.1.extend(z2.iter().copied());
            }
        }
    }
    best
}
