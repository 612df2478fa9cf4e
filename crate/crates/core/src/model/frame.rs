//! Brute-force checking of the B, R and RM frame conditions.

use std::fmt;
use std::str::FromStr;

use super::{Model, WorldId};
use crate::formula::PropId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemClass {
    Raw,
    B,
    R,
    RM,
}

impl SystemClass {
    pub fn conditions(self) -> &'static [Condition] {
        use Condition::*;
        match self {
            SystemClass::Raw => &[],
            SystemClass::B => &[B1, B2, B3, B4, B5],
            SystemClass::R => &[B1, B2, B3, R4, B5, R5, R6, R7],
            SystemClass::RM => &[B1, B2, B3, R4, B5, R5, R6, R7, M1],
        }
    }
}

impl fmt::Display for SystemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemClass::Raw => "Raw",
            SystemClass::B => "B",
            SystemClass::R => "R",
            SystemClass::RM => "RM",
        })
    }
}

impl FromStr for SystemClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Raw" | "raw" => Ok(SystemClass::Raw),
            "B" => Ok(SystemClass::B),
            "R" => Ok(SystemClass::R),
            "RM" => Ok(SystemClass::RM),
            other => Err(format!(
                "unknown system {other:?}; expected Raw, B, R or RM"
            )),
        }
    }
}

/// Frame conditions with stable ids.
///
/// | id | condition |
/// |----|-----------|
/// | b1 | `R T x x` |
/// | b2 | `R T x v` and `R v y z` imply `R x y z` |
/// | b3 | `x** = x` |
/// | b4 | `R T x y` implies `R T y* x*` |
/// | b5 | `x ∈ V(p)` and `R T x y` imply `y ∈ V(p)` |
/// | r4 | `R z x y` implies `R z y* x*` |
/// | r5 | `R²(xy)zv` implies `R²x(yz)v` |
/// | r6 | `R x x x` |
/// | r7 | `R x y z` implies `R y x z` |
/// | m1 | `R x y z` implies `R T x z` or `R T y z` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    B1,
    B2,
    B3,
    B4,
    B5,
    R4,
    R5,
    R6,
    R7,
    M1,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::B1 => "b1",
            Condition::B2 => "b2",
            Condition::B3 => "b3",
            Condition::B4 => "b4",
            Condition::B5 => "b5",
            Condition::R4 => "r4",
            Condition::R5 => "r5",
            Condition::R6 => "r6",
            Condition::R7 => "r7",
            Condition::M1 => "m1",
        }
    }

    /// Names of the quantified world variables, in witness order.
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            Condition::B1 | Condition::B3 | Condition::R6 => &["x"],
            Condition::B2 => &["x", "v", "y", "z"],
            Condition::B4 | Condition::B5 => &["x", "y"],
            Condition::R4 => &["z", "x", "y"],
            Condition::R5 => &["x", "y", "z", "v"],
            Condition::R7 | Condition::M1 => &["x", "y", "z"],
        }
    }

    /// Whether the condition holds for one assignment of its variables
    /// (and, for b5, one proposition).
    pub fn holds(self, m: &Model, w: &[WorldId], prop: Option<&PropId>) -> bool {
        let t = m.base();
        let r = |x, y, z| m.related(x, y, z);
        match self {
            Condition::B1 => r(t, w[0], w[0]),
            Condition::B2 => !(r(t, w[0], w[1]) && r(w[1], w[2], w[3])) || r(w[0], w[2], w[3]),
            Condition::B3 => m.star(m.star(w[0])) == w[0],
            Condition::B4 => !r(t, w[0], w[1]) || r(t, m.star(w[1]), m.star(w[0])),
            Condition::B5 => {
                let p = prop.expect("b5 is checked per proposition");
                let holds = |x| m.holds_atom(p, x).unwrap_or(false);
                !(holds(w[0]) && r(t, w[0], w[1])) || holds(w[1])
            }
            Condition::R4 => !r(w[0], w[1], w[2]) || r(w[0], m.star(w[2]), m.star(w[1])),
            Condition::R5 => {
                let (x, y, z, v) = (w[0], w[1], w[2], w[3]);
                let left = m.worlds().any(|u| r(x, y, u) && r(u, z, v));
                let right = m.worlds().any(|u| r(x, u, v) && r(y, z, u));
                !left || right
            }
            Condition::R6 => r(w[0], w[0], w[0]),
            Condition::R7 => !r(w[0], w[1], w[2]) || r(w[1], w[0], w[2]),
            Condition::M1 => !r(w[0], w[1], w[2]) || r(t, w[0], w[2]) || r(t, w[1], w[2]),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// Worlds assigned to `condition.variables()`, in the same order.
    pub witness: Vec<WorldId>,
    /// The proposition, for heredity (b5) failures.
    pub prop: Option<PropId>,
}

impl Violation {
    pub fn named_witness<'m>(&self, m: &'m Model) -> Vec<(&'static str, &'m str)> {
        self.condition
            .variables()
            .iter()
            .zip(&self.witness)
            .map(|(v, &w)| (*v, m.name(w)))
            .collect()
    }

    /// `VIOLATION b1: witness x=t`
    pub fn render(&self, m: &Model) -> String {
        let mut line = format!("VIOLATION {}: witness", self.condition);
        for (var, world) in self.named_witness(m) {
            line.push_str(&format!(" {var}={world}"));
        }
        if let Some(p) = &self.prop {
            line.push_str(&format!(" prop={p}"));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<WorldId>> {
    let total = n.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut tuple = vec![WorldId(0); arity];
        for slot in tuple.iter_mut().rev() {
            *slot = WorldId(code % n);
            code /= n;
        }
        tuple
    })
}

/// Checks every condition of `system` over all world tuples and reports every
/// failing assignment. Violations are ordered by condition, then witness.
pub fn check_frame(model: &Model, system: SystemClass) -> FrameReport {
    let mut violations = Vec::new();
    for &condition in system.conditions() {
        let arity = condition.variables().len();
        if condition == Condition::B5 {
            for p in model.props() {
                for w in tuples(model.len(), arity) {
                    if !condition.holds(model, &w, Some(p)) {
                        violations.push(Violation {
                            condition,
                            witness: w,
                            prop: Some(p.clone()),
                        });
                    }
                }
            }
        } else {
            for w in tuples(model.len(), arity) {
                if !condition.holds(model, &w, None) {
                    violations.push(Violation {
                        condition,
                        witness: w,
                        prop: None,
                    });
                }
            }
        }
    }
    FrameReport {
        passed: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fixture_a, fixture_b, ModelFile};

    fn model(json: &str) -> Model {
        Model::from_file(&serde_json::from_str::<ModelFile>(json).unwrap()).unwrap()
    }

    #[test]
    fn fixtures_are_rm_models() {
        for m in [fixture_a(), fixture_b()] {
            for system in [
                SystemClass::Raw,
                SystemClass::B,
                SystemClass::R,
                SystemClass::RM,
            ] {
                let report = check_frame(&m, system);
                assert!(report.passed, "{system}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn empty_relation_fails_reflexivity_at_base() {
        let m = model(r#"{"worlds":["t","s"],"star":{"t":"t","s":"s"},"R":[],"T":"t"}"#);
        let report = check_frame(&m, SystemClass::B);
        assert!(!report.passed);
        let first = &report.violations[0];
        assert_eq!(first.condition, Condition::B1);
        assert_eq!(first.named_witness(&m), vec![("x", "t")]);
        assert_eq!(first.render(&m), "VIOLATION b1: witness x=t");
        // Every reported witness falsifies its condition.
        for v in &report.violations {
            assert!(!v.condition.holds(&m, &v.witness, v.prop.as_ref()));
        }
    }

    #[test]
    fn heredity_failure_names_the_prop() {
        let m = model(
            r#"{"worlds":["t","s"],"star":{"t":"t","s":"s"},
                "R":[["t","t","t"],["t","s","s"],["t","t","s"]],"T":"t","valuation":{"p":["t"]}}"#,
        );
        let report = check_frame(&m, SystemClass::B);
        let b5: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.condition == Condition::B5)
            .collect();
        assert_eq!(b5.len(), 1);
        assert_eq!(b5[0].render(&m), "VIOLATION b5: witness x=t y=s prop=p");
    }

    #[test]
    fn non_involutive_star_fails_b3() {
        let m =
            model(r#"{"worlds":["a","b","c"],"star":{"a":"b","b":"c","c":"a"},"R":[],"T":"a"}"#);
        let report = check_frame(&m, SystemClass::B);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::B3));
        assert!(check_frame(&m, SystemClass::Raw).passed);
    }

    #[test]
    fn system_names_parse() {
        assert_eq!("RM".parse::<SystemClass>().unwrap(), SystemClass::RM);
        assert!("S4".parse::<SystemClass>().is_err());
    }
}
