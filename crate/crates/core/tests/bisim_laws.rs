mod common;

use std::collections::BTreeSet;

use common::{brute_force_max_bisim, is_bisimulation, props, Rel};
use routley::bisim::{
    check_bisim, distinguish, max_bisim, shared_props, stratify, BisimError, DirectedPair, Side,
};
use routley::charform::{theta, DEFAULT_NODE_CAP};
use routley::corpus::{formula_pool, model_pair};
use routley::model::{fixture_a, fixture_b, Model, ModelFile, SystemClass, WorldId};

fn as_set(pair: &DirectedPair, side: Side) -> Rel {
    pair.component(side).pairs().collect()
}

fn pairs(
    seeds: std::ops::Range<u64>,
    max_worlds: usize,
    system: SystemClass,
) -> Vec<(Model, Model)> {
    seeds
        .map(|s| model_pair(s, max_worlds, 2, system).unwrap())
        .collect()
}

#[test]
fn fixture_a_agrees_with_brute_force() {
    let a = fixture_a();
    let ps = props(&["p", "q"]);
    let (z1, z2) = brute_force_max_bisim(&a, &a, &ps);
    let fixed = max_bisim(&a, &a, &ps).unwrap().unwrap();
    assert_eq!(as_set(&fixed, Side::Left), z1);
    assert_eq!(as_set(&fixed, Side::Right), z2);
    let (t, s) = (a.world("t").unwrap(), a.world("s").unwrap());
    for side in Side::BOTH {
        assert!(fixed.contains(side, t, t) && fixed.contains(side, s, s));
    }
    let strat = stratify(&a, &a, &ps).unwrap();
    let record = strat.drop_record(Side::Left, t, s).unwrap();
    assert_eq!(record.stage, 0);
}

#[test]
fn small_random_pairs_agree_with_brute_force() {
    for system in [SystemClass::Raw, SystemClass::B] {
        for (m1, m2) in pairs(0..40, 2, system) {
            let ps = shared_props(&m1, &m2);
            let (z1, z2) = brute_force_max_bisim(&m1, &m2, &ps);
            let strat = stratify(&m1, &m2, &ps).unwrap();
            let fixed = strat.fixed_point();
            assert_eq!(as_set(fixed, Side::Left), z1);
            assert_eq!(as_set(fixed, Side::Right), z2);
        }
    }
}

#[test]
fn one_world_examples() {
    let b = fixture_b();
    let full: Model = Model::from_file(
        &serde_json::from_str::<ModelFile>(
            r#"{"worlds":["t"],"star":{"t":"t"},"R":[["t","t","t"]],"T":"t","valuation":{"p":["t"]}}"#,
        )
        .unwrap(),
    )
    .unwrap();
    let ps = props(&["p"]);
    let fixed = max_bisim(&full, &full, &ps).unwrap().unwrap();
    assert_eq!(
        as_set(&fixed, Side::Left),
        BTreeSet::from([(WorldId(0), WorldId(0))])
    );
    assert_eq!(stratify(&full, &full, &ps).unwrap().alpha, 0);
    // V(p) = W against V(p) = empty.
    assert_eq!(max_bisim(&full, &b, &ps).unwrap(), None);
}

#[test]
fn stratification_laws() {
    for (m1, m2) in pairs(100..160, 3, SystemClass::Raw)
        .into_iter()
        .chain(pairs(200..260, 3, SystemClass::B))
    {
        let ps = shared_props(&m1, &m2);
        let strat = stratify(&m1, &m2, &ps).unwrap();
        assert!(strat.alpha <= 2 * m1.len() * m2.len());
        assert_eq!(strat.stages.len(), strat.alpha + 1);
        for w in strat.stages.windows(2) {
            assert!(w[1].is_subset(&w[0]));
        }
        for d in &strat.drops {
            let (x, y) = (d.x, d.y);
            assert!(!strat.stages[d.stage].contains(d.side, x, y));
            if d.stage > 0 {
                assert!(strat.stages[d.stage - 1].contains(d.side, x, y));
            }
        }
        match max_bisim(&m1, &m2, &ps).unwrap() {
            Some(fixed) => {
                assert_eq!(check_bisim(&m1, &m2, &fixed, &ps).unwrap(), None);
                let z1 = as_set(&fixed, Side::Left);
                let z2 = as_set(&fixed, Side::Right);
                assert!(is_bisimulation(&m1, &m2, &z1, &z2, &ps));
            }
            None => assert!(strat.fixed_point().z1.is_empty() && strat.fixed_point().z2.is_empty()),
        }
    }
}

#[test]
fn fixed_point_preserves_formulas() {
    for (i, (m1, m2)) in pairs(300..340, 3, SystemClass::B).into_iter().enumerate() {
        let ps = shared_props(&m1, &m2);
        let strat = stratify(&m1, &m2, &ps).unwrap();
        let pool = formula_pool(i as u64, 40, &ps, 4);
        for side in Side::BOTH {
            let (src, tgt) = if side == Side::Left {
                (&m1, &m2)
            } else {
                (&m2, &m1)
            };
            for (x, y) in strat.fixed_point().component(side).pairs() {
                for f in &pool {
                    assert!(
                        !src.satisfies(x, f).unwrap() || tgt.satisfies(y, f).unwrap(),
                        "{f}"
                    );
                }
            }
        }
    }
}

#[test]
fn verdicts_agree() {
    for (m1, m2) in pairs(400..460, 3, SystemClass::B) {
        let ps = shared_props(&m1, &m2);
        let fixed = stratify(&m1, &m2, &ps).unwrap().fixed_point().clone();
        for x in m1.worlds() {
            let th = theta(&m1, x, &m2, &ps, DEFAULT_NODE_CAP).unwrap();
            for y in m2.worlds() {
                let related = fixed.contains(Side::Left, x, y);
                match distinguish(&m1, x, &m2, y, &ps) {
                    Err(BisimError::NotDistinguishable(..)) => assert!(related),
                    Ok(d) => {
                        assert!(!related);
                        assert!(m1.satisfies(x, &d.formula).unwrap());
                        assert!(!m2.satisfies(y, &d.formula).unwrap());
                        assert!(d.formula.degree() <= d.stage);
                    }
                    Err(e) => panic!("{e}"),
                }
                assert_eq!(
                    th.holds_in_target(y),
                    related,
                    "{}\n{}\nx={x:?} y={y:?} xi={}",
                    m1,
                    m2,
                    th.stage()
                );
            }
        }
    }
}

#[test]
fn model_against_itself_contains_identity() {
    for (m, _) in pairs(500..520, 3, SystemClass::Raw) {
        let ps = shared_props(&m, &m);
        let fixed = max_bisim(&m, &m, &ps).unwrap().unwrap();
        assert!(DirectedPair::identity(&m).is_subset(&fixed));
        assert_eq!(fixed.z1, fixed.z2);
    }
}
