//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use routley::bisim::{check_bisim, max_bisim, shared_props, stratify, Distinguisher, Side};
use routley::charform::{
    theta, theta_with_family, CharFormulas, CharKey, Family, DEFAULT_NODE_CAP,
};
use routley::corpus::{formula_pool, model_pair};
use routley::correspond::{fo_eval, translate};
use routley::formula::{Formula, PropId};
use routley::model::{check_frame, fixture_a, generate_model, Model, SystemClass};

const CORPUS_PAIRS: u64 = 200;
const SYSTEMS: [SystemClass; 4] = [
    SystemClass::Raw,
    SystemClass::B,
    SystemClass::R,
    SystemClass::RM,
];

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }
}

fn report(id: u32, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = run();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        out.require(elapsed < limit, || {
            format!("took {elapsed:.2?}, limit {limit:?}")
        });
    }
    let passed = out.failures.is_empty();
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!(
        "{verdict} criterion {id}: {name} ({}; {elapsed:.2?})",
        out.detail
    );
    for f in out.failures.iter().filter(|f| !f.is_empty()) {
        println!("    {f}");
    }
    passed
}

fn props(names: &[&str]) -> Vec<PropId> {
    names.iter().map(|n| PropId::new(n).unwrap()).collect()
}

fn corpus() -> Vec<(Model, Model)> {
    (0..CORPUS_PAIRS)
        .map(|seed| model_pair(seed, 3, 2, SYSTEMS[seed as usize % SYSTEMS.len()]).unwrap())
        .collect()
}

fn is_b_pair(m1: &Model, m2: &Model) -> bool {
    check_frame(m1, SystemClass::B).passed && check_frame(m2, SystemClass::B).passed
}

fn fixture_regression() -> Outcome {
    let mut out = Outcome::new();
    let a = fixture_a();
    let t = a.world("t").unwrap();
    let good: Formula = "And[q, ~q]".parse().unwrap();
    let bad: Formula = "And[p, ~p]".parse().unwrap();
    out.require(a.satisfies(t, &good).unwrap(), || {
        "And[q, ~q] should hold at t".into()
    });
    out.require(!a.satisfies(t, &bad).unwrap(), || {
        "And[p, ~p] should fail at t".into()
    });
    let frame = check_frame(&a, SystemClass::RM);
    out.require(frame.passed && frame.violations.is_empty(), || {
        format!("{} RM violations", frame.violations.len())
    });
    out.detail = "fixture A".into();
    out
}

fn translation_oracle() -> Outcome {
    let mut out = Outcome::new();
    let ps = props(&["p0", "p1", "p2"]);
    let mut cases = 0;
    for seed in 0..125u64 {
        let n = 1 + seed as usize % 4;
        let m = generate_model(n, 3, SYSTEMS[seed as usize / 4 % SYSTEMS.len()], seed).unwrap();
        for f in formula_pool(seed, 4, &ps, 4) {
            let fo = translate(&f, "x");
            for w in m.worlds() {
                cases += 1;
                let direct = m.satisfies(w, &f).unwrap();
                let via = fo_eval(&m, &fo, &BTreeMap::from([("x".to_string(), w)])).unwrap();
                out.require(direct == via, || {
                    format!("seed {seed}: {f} at {}", m.name(w))
                });
            }
        }
    }
    out.require(cases >= 500, || format!("only {cases} cases"));
    out.detail = format!("{cases} model/world/formula cases");
    out
}

fn stratification_laws(pairs: &[(Model, Model)]) -> Outcome {
    let mut out = Outcome::new();
    let mut present = 0;
    for (i, (m1, m2)) in pairs.iter().enumerate() {
        let ps = shared_props(m1, m2);
        let strat = stratify(m1, m2, &ps).unwrap();
        for (beta, w) in strat.stages.windows(2).enumerate() {
            out.require(w[1].is_subset(&w[0]), || {
                format!("pair {i}: stage {} not inside stage {beta}", beta + 1)
            });
        }
        out.require(strat.alpha <= 2 * m1.len() * m2.len(), || {
            format!("pair {i}: alpha {}", strat.alpha)
        });
        if let Some(fixed) = max_bisim(m1, m2, &ps).unwrap() {
            present += 1;
            let verdict = check_bisim(m1, m2, &fixed, &ps).unwrap();
            out.require(verdict.is_none(), || {
                format!("pair {i}: check_bisim rejects fixed point: {verdict:?}")
            });
        }
    }
    out.detail = format!("{} pairs, {present} with a bisimulation", pairs.len());
    out
}

fn verdicts_agree(pairs: &[(Model, Model)], one_sided_misses: &mut usize) -> Outcome {
    let mut out = Outcome::new();
    let (mut checked, mut theta_checked, mut related_count) = (0, 0, 0);
    for (i, (m1, m2)) in pairs.iter().enumerate() {
        let ps = shared_props(m1, m2);
        let strat = stratify(m1, m2, &ps).unwrap();
        let b_pair = is_b_pair(m1, m2);
        for side in Side::BOTH {
            let (src, tgt) = if side == Side::Left {
                (m1, m2)
            } else {
                (m2, m1)
            };
            let mut dist = Distinguisher::new(m1, m2, &strat);
            for x in src.worlds() {
                let thetas = b_pair.then(|| {
                    (
                        theta(src, x, tgt, &ps, DEFAULT_NODE_CAP).unwrap(),
                        theta_with_family(src, x, tgt, &ps, DEFAULT_NODE_CAP, Family::OneSided)
                            .unwrap(),
                    )
                });
                for y in tgt.worlds() {
                    checked += 1;
                    let related = strat.fixed_point().contains(side, x, y);
                    related_count += usize::from(related);
                    let indistinguishable = dist.distinguish(side, x, y).is_none();
                    out.require(related == indistinguishable, || {
                        format!("pair {i} side {side}: fixed point vs distinguish at ({x:?},{y:?})")
                    });
                    if let Some((two, one)) = &thetas {
                        theta_checked += 1;
                        out.require(two.holds_in_target(y) == related, || {
                            format!("pair {i} side {side}: theta vs fixed point at ({x:?},{y:?})")
                        });
                        if one.holds_in_target(y) != related {
                            *one_sided_misses += 1;
                        }
                    }
                }
            }
        }
    }
    out.detail = format!(
        "{checked} world pairs, {related_count} related, {theta_checked} with the theta test"
    );
    out
}

fn distinguisher_soundness(pairs: &[(Model, Model)]) -> Outcome {
    let mut out = Outcome::new();
    let mut dropped = 0;
    for (i, (m1, m2)) in pairs.iter().enumerate() {
        let ps = shared_props(m1, m2);
        let strat = stratify(m1, m2, &ps).unwrap();
        let mut dist = Distinguisher::new(m1, m2, &strat);
        for record in &strat.drops {
            dropped += 1;
            let (src, tgt) = if record.side == Side::Left {
                (m1, m2)
            } else {
                (m2, m1)
            };
            let Some(d) = dist.distinguish(record.side, record.x, record.y) else {
                out.require(false, || format!("pair {i}: no formula for a dropped pair"));
                continue;
            };
            let ok = src.satisfies(record.x, &d.formula).unwrap()
                && !tgt.satisfies(record.y, &d.formula).unwrap()
                && d.formula.degree() <= record.stage;
            out.require(ok, || {
                format!("pair {i}: {} fails for drop {record:?}", d.formula)
            });
        }
    }
    out.detail = format!("{dropped} dropped pairs");
    out
}

fn charform_laws(pairs: &[(Model, Model)]) -> Outcome {
    let mut out = Outcome::new();
    let (mut b_pairs, mut max_xi) = (0, 0);
    for (i, (m1, m2)) in pairs.iter().enumerate() {
        if !is_b_pair(m1, m2) {
            continue;
        }
        b_pairs += 1;
        let ps = shared_props(m1, m2);
        let mut forms = CharFormulas::new(m1, m2, &ps, DEFAULT_NODE_CAP).unwrap();
        let xi = forms.stabilization_stage().unwrap();
        max_xi = max_xi.max(xi);
        out.require(xi <= 2 * m1.len() * m2.len() + 1, || {
            format!("pair {i}: xi {xi}")
        });
        for side in Side::BOTH {
            let (src, tgt) = if side == Side::Left {
                (m1, m2)
            } else {
                (m2, m1)
            };
            for u in src.worlds() {
                let ids: Vec<_> = (0..=xi + 1)
                    .map(|stage| {
                        forms
                            .formula(CharKey {
                                source: side,
                                world: u,
                                stage,
                            })
                            .unwrap()
                    })
                    .collect();
                for (beta, &id) in ids.iter().enumerate() {
                    out.require(forms.dag().holds(id, side, u), || {
                        format!("pair {i}: stage {beta} formula fails at its world")
                    });
                    for v in tgt.worlds() {
                        if forms.dag().holds(id, side.opposite(), v) {
                            for (gamma, &earlier) in ids[..beta].iter().enumerate() {
                                out.require(forms.dag().holds(earlier, side.opposite(), v), || {
                                    format!("pair {i}: stage {beta} holds but stage {gamma} fails")
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out.detail = format!("{b_pairs} B-model pairs, largest stabilization stage {max_xi}");
    out
}

fn determinism() -> Outcome {
    let mut out = Outcome::new();
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let a = fixtures.join("fixture_a.json").display().to_string();
    let b = fixtures.join("fixture_b.json").display().to_string();
    let dir = std::env::temp_dir().join(format!("routley-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let generated = dir.join("gen.json").display().to_string();
    let trace = dir.join("trace.json").display().to_string();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "check",
            "--model",
            &a,
            "--world",
            "t",
            "--formula",
            "And[q, ~q]",
        ],
        vec![
            "check",
            "--model",
            &a,
            "--world",
            "t",
            "--formula",
            "And[p, ~p]",
            "--format",
            "text",
        ],
        vec!["frame", "--model", &a, "--system", "RM"],
        vec!["frame", "--model", &b, "--system", "B", "--format", "text"],
        vec!["bisim", "--left", &a, "--right", &a, "--pair", "t:s"],
        vec!["bisim", "--left", &a, "--right", &b, "--trace", &trace],
        vec![
            "distinguish",
            "--left",
            &a,
            "--left-world",
            "t",
            "--right",
            &a,
            "--right-world",
            "s",
        ],
        vec![
            "charform", "--model", &a, "--world", "t", "--target", &a, "--emit",
        ],
        vec![
            "charform", "--model", &a, "--world", "s", "--target", &b, "--stage", "2",
        ],
        vec!["translate", "--formula", "((p -> q) -> ~r)", "--var", "w"],
        vec![
            "gen", "--worlds", "4", "--props", "3", "--system", "B", "--seed", "99",
        ],
        vec![
            "gen", "--worlds", "3", "--props", "2", "--system", "RM", "--seed", "5", "--out",
            &generated,
        ],
        vec![
            "check",
            "--model",
            &a,
            "--world",
            "t",
            "--formula",
            "And[q,",
        ],
    ];
    for args in &invocations {
        let run = || {
            let o = Command::new(env!("CARGO_BIN_EXE_routley"))
                .args(args)
                .output()
                .unwrap();
            let written: Vec<u8> = [&trace, &generated]
                .iter()
                .flat_map(|p| std::fs::read(p).unwrap_or_default())
                .collect();
            (o.status.code(), o.stdout, o.stderr, written)
        };
        let (first, second) = (run(), run());
        out.require(first == second, || format!("output differs for {args:?}"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    out.detail = format!("{} invocations run twice", invocations.len());
    out
}

fn main() {
    let pairs = corpus();
    let mut one_sided_misses = 0;
    let results = [
        report(
            1,
            "fixture regression",
            Some(Duration::from_secs(1)),
            fixture_regression,
        ),
        report(
            2,
            "translation oracle",
            Some(Duration::from_secs(30)),
            translation_oracle,
        ),
        report(
            3,
            "stratification laws",
            Some(Duration::from_secs(60)),
            || stratification_laws(&pairs),
        ),
        report(
            4,
            "bisimulation, distinguisher and theta agree",
            None,
            || verdicts_agree(&pairs, &mut one_sided_misses),
        ),
        report(5, "distinguisher soundness", None, || {
            distinguisher_soundness(&pairs)
        }),
        report(
            6,
            "characteristic-formula laws",
            Some(Duration::from_secs(300)),
            || charform_laws(&pairs),
        ),
        report(7, "CLI determinism", None, determinism),
    ];
    println!("note: the one-sided implication family disagrees with the fixed point on {one_sided_misses} theta tests");
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
