//! Command-line front end.
//!
//! Every command produces a [`CommandResult`]; [`report`] renders it as one compact
//! JSON line with sorted keys, or as plain text. Exit codes: 0 ok, 1 negative
//! answer, 2 bad input, 3 internal failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bisim::{drop_json, shared_props, stratify, BisimError, Distinguisher, ModelPair, Side};
use crate::charform::{
    theta_with_family, CharFormError, CharFormulas, CharKey, Family, DEFAULT_NODE_CAP,
};
use crate::correspond::translate;
use crate::formula::{parse, print, Formula, PropId};
use crate::model::{check_frame, generate_model, Model, ModelError, SystemClass, WorldId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    FailedCheck,
    UserError,
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::FailedCheck => 1,
            Status::UserError => 2,
            Status::InternalError => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    /// Human-readable rendering of `payload`, one fact per line.
    pub text: String,
}

impl CommandResult {
    fn new(status: Status, payload: Value, text: impl Into<String>) -> Self {
        CommandResult {
            status,
            payload,
            text: text.into(),
        }
    }

    fn user_error(kind: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        CommandResult::new(
            Status::UserError,
            json!({"error": {"kind": kind, "message": message}}),
            format!("error: {message}"),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    OneSided,
    TwoSided,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::OneSided => Family::OneSided,
            FamilyArg::TwoSided => Family::TwoSided,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "routley",
    version,
    about = "Model checking and bisimulation for finite Routley-Meyer models"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula at a world.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
    },
    /// Check the frame conditions of a system.
    Frame {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        system: SystemClass,
    },
    /// Compute the greatest directed bisimulation between two models.
    Bisim {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Ask whether `w` (left) and `v` (right) are related.
        #[arg(long, value_name = "W:V")]
        pair: Option<String>,
        /// Write the full stratification to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Propositions to compare; defaults to those valued in both models.
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
    },
    /// Find a formula true at the left world and false at the right one.
    Distinguish {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        left_world: String,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        right_world: String,
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
    },
    /// Build the characteristic formula of a world aimed at a target model.
    Charform {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: String,
        #[arg(long)]
        target: PathBuf,
        /// Stage to build; defaults to the stabilization stage.
        #[arg(long)]
        stage: Option<usize>,
        /// Print the formula itself.
        #[arg(long)]
        emit: bool,
        #[arg(long, value_delimiter = ',')]
        props: Option<Vec<String>>,
        /// Limit on stored formula nodes.
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: usize,
        /// Limit on the size of an emitted formula.
        #[arg(long, default_value_t = 100_000)]
        max_size: u64,
        /// Implications offered at successor stages.
        #[arg(long, value_enum, default_value_t = FamilyArg::TwoSided)]
        family: FamilyArg,
    },
    /// Print the first-order translation of a formula.
    Translate {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Generate a random model.
    Gen {
        #[arg(long)]
        worlds: usize,
        #[arg(long)]
        props: usize,
        #[arg(long)]
        system: SystemClass,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name) and runs the command. Also returns
/// the requested output format, or the default if parsing failed.
pub fn dispatch(argv: &[String]) -> (CommandResult, Format) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let format = requested_format(argv);
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (
                    CommandResult::new(Status::Ok, json!({"message": rendered}), rendered),
                    Format::Text,
                ),
                _ => (
                    CommandResult::user_error("usage", rendered.trim_end()),
                    format,
                ),
            };
        }
    };
    let result = match run(cli.command) {
        Ok(r) => r,
        Err(e) => e,
    };
    (result, cli.format)
}

fn requested_format(argv: &[String]) -> Format {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let value = match arg.strip_prefix("--format") {
            Some("") => it.next().map(String::as_str),
            Some(rest) => rest.strip_prefix('='),
            None => None,
        };
        if value == Some("text") {
            return Format::Text;
        }
    }
    Format::Json
}

/// Renders `result` as bytes for stdout or stderr.
pub fn report(result: &CommandResult, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", result.payload),
        Format::Text => {
            let mut out = result.text.clone();
            if !out.ends_with('\n') {
                out.push('\n');
            }
            out
        }
    }
}

type Outcome = Result<CommandResult, CommandResult>;

fn load_model(path: &Path) -> Result<Model, CommandResult> {
    let text = fs::read_to_string(path).map_err(|e| {
        CommandResult::user_error("io", format!("cannot read {}: {e}", path.display()))
    })?;
    Model::from_json(&text)
        .map_err(|e| CommandResult::user_error("model", format!("{}: {e}", path.display())))
}

fn load_formula(text: &str) -> Result<Formula, CommandResult> {
    parse(text).map_err(|e| {
        CommandResult::new(
            Status::UserError,
            json!({"error": {
                "kind": "syntax",
                "message": e.to_string(),
                "line": e.line,
                "column": e.column,
                "expected": e.expected,
                "found": e.found,
            }}),
            format!("error: {e}"),
        )
    })
}

fn world(model: &Model, name: &str) -> Result<WorldId, CommandResult> {
    model.world(name).map_err(model_error)
}

fn model_error(e: ModelError) -> CommandResult {
    CommandResult::user_error("model", e.to_string())
}

fn bisim_error(e: BisimError) -> CommandResult {
    match e {
        BisimError::Model(e) => model_error(e),
        other => CommandResult::new(
            Status::InternalError,
            json!({"error": {"kind": "internal", "message": other.to_string()}}),
            format!("internal error: {other}"),
        ),
    }
}

fn charform_error(e: CharFormError) -> CommandResult {
    let kind = match &e {
        CharFormError::Model(_) => "model",
        CharFormError::BudgetExceeded { .. } => "budget",
        CharFormError::NotBModel(_) => "not_b_model",
        CharFormError::TooLarge { .. } => "too_large",
    };
    CommandResult::user_error(kind, e.to_string())
}

fn prop_list(
    names: Option<Vec<String>>,
    left: &Model,
    right: &Model,
) -> Result<Vec<PropId>, CommandResult> {
    let Some(names) = names else {
        return Ok(shared_props(left, right));
    };
    let mut props = Vec::new();
    for name in names.iter().filter(|n| !n.is_empty()) {
        let p = PropId::new(name).map_err(|e| CommandResult::user_error("props", e.to_string()))?;
        if !props.contains(&p) {
            props.push(p);
        }
    }
    props.sort();
    ModelPair::new(left, right)
        .check_props(&props)
        .map_err(model_error)?;
    Ok(props)
}

fn names(model: &Model, ext: &[bool]) -> Vec<String> {
    model
        .worlds()
        .filter(|w| ext[w.0])
        .map(|w| model.name(w).to_string())
        .collect()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Check {
            model,
            world: w,
            formula,
        } => {
            let m = load_model(&model)?;
            let f = load_formula(&formula)?;
            let w = world(&m, &w)?;
            let holds = m.satisfies(w, &f).map_err(model_error)?;
            let status = if holds {
                Status::Ok
            } else {
                Status::FailedCheck
            };
            let verb = if holds { "holds" } else { "does not hold" };
            Ok(CommandResult::new(
                status,
                json!({"holds": holds}),
                format!("{} {verb} at {}", print(&f), m.name(w)),
            ))
        }
        Command::Frame { model, system } => {
            let m = load_model(&model)?;
            let report = check_frame(&m, system);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    let witness: serde_json::Map<String, Value> = v
                        .named_witness(&m)
                        .into_iter()
                        .map(|(k, w)| (k.to_string(), json!(w)))
                        .collect();
                    let mut entry = json!({"condition": v.condition.id(), "witness": witness});
                    if let Some(p) = &v.prop {
                        entry["prop"] = json!(p.as_str());
                    }
                    entry
                })
                .collect();
            let text = if report.passed {
                format!("frame conditions of {system} hold")
            } else {
                report
                    .violations
                    .iter()
                    .map(|v| v.render(&m))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            let status = if report.passed {
                Status::Ok
            } else {
                Status::FailedCheck
            };
            Ok(CommandResult::new(
                status,
                json!({"passed": report.passed, "violations": violations}),
                text,
            ))
        }
        Command::Bisim {
            left,
            right,
            pair,
            trace,
            props,
        } => {
            let (l, r) = (load_model(&left)?, load_model(&right)?);
            let props = prop_list(props, &l, &r)?;
            let strat = stratify(&l, &r, &props).map_err(bisim_error)?;
            let mp = ModelPair::new(&l, &r);
            if let Some(path) = trace {
                fs::write(&path, format!("{}\n", strat.to_json(mp))).map_err(|e| {
                    CommandResult::user_error("io", format!("cannot write {}: {e}", path.display()))
                })?;
            }
            match pair {
                None => Ok(bisim_summary(&strat, mp)),
                Some(query) => {
                    let (a, b) = query.split_once(':').ok_or_else(|| {
                        CommandResult::user_error(
                            "usage",
                            format!("--pair expects W:V, got {query:?}"),
                        )
                    })?;
                    let (x, y) = (world(&l, a)?, world(&r, b)?);
                    match strat.drop_record(Side::Left, x, y) {
                        None => Ok(CommandResult::new(
                            Status::Ok,
                            json!({"related": true, "alpha": strat.alpha}),
                            format!(
                                "{a} and {b} are related by the greatest directed bisimulation"
                            ),
                        )),
                        Some(record) => {
                            let d = Distinguisher::new(&l, &r, &strat)
                                .distinguish(Side::Left, x, y)
                                .ok_or_else(|| {
                                    internal("dropped pair has no distinguishing formula")
                                })?;
                            let formula = print(&d.formula);
                            Ok(CommandResult::new(
                                Status::FailedCheck,
                                json!({"related": false, "alpha": strat.alpha, "drop": drop_json(record, mp), "formula": formula}),
                                format!("{a} and {b} are not related: dropped at stage {}\ndistinguishing formula: {formula}", record.stage),
                            ))
                        }
                    }
                }
            }
        }
        Command::Distinguish {
            left,
            left_world,
            right,
            right_world,
            props,
        } => {
            let (l, r) = (load_model(&left)?, load_model(&right)?);
            let props = prop_list(props, &l, &r)?;
            let (x, y) = (world(&l, &left_world)?, world(&r, &right_world)?);
            let strat = stratify(&l, &r, &props).map_err(bisim_error)?;
            match Distinguisher::new(&l, &r, &strat).distinguish(Side::Left, x, y) {
                Some(d) => {
                    let formula = print(&d.formula);
                    Ok(CommandResult::new(
                        Status::Ok,
                        json!({"formula": formula, "stage": d.stage, "degree": d.formula.degree()}),
                        format!(
                            "{formula}\nstage {}, degree {}",
                            d.stage,
                            d.formula.degree()
                        ),
                    ))
                }
                None => Ok(CommandResult::new(
                    Status::FailedCheck,
                    json!({"formula": null}),
                    format!("{left_world} and {right_world} are not distinguishable"),
                )),
            }
        }
        Command::Charform {
            model,
            world: w,
            target,
            stage,
            emit,
            props,
            node_cap,
            max_size,
            family,
        } => {
            let (m, t) = (load_model(&model)?, load_model(&target)?);
            let props = prop_list(props, &m, &t)?;
            let w = world(&m, &w)?;
            let (mut forms, root, stabilized) = match stage {
                Some(stage) => {
                    let mut forms =
                        CharFormulas::with_family(&m, &t, &props, node_cap, family.into())
                            .map_err(charform_error)?;
                    let root = forms
                        .formula(CharKey {
                            source: Side::Left,
                            world: w,
                            stage,
                        })
                        .map_err(charform_error)?;
                    (forms, root, None)
                }
                None => {
                    let th = theta_with_family(&m, w, &t, &props, node_cap, family.into())
                        .map_err(charform_error)?;
                    let (root, stage) = (th.root(), th.stage());
                    (th.into_forms(), root, Some(stage))
                }
            };
            charform_result(&mut forms, root, stage, stabilized, emit, max_size, &m, &t)
        }
        Command::Translate { formula, var } => {
            let f = load_formula(&formula)?;
            if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(CommandResult::user_error(
                    "usage",
                    format!("invalid variable name {var:?}"),
                ));
            }
            let fo = translate(&f, &var).to_string();
            Ok(CommandResult::new(Status::Ok, json!({"fo": fo}), fo))
        }
        Command::Gen {
            worlds,
            props,
            system,
            seed,
            out,
        } => {
            let m = generate_model(worlds, props, system, seed).map_err(model_error)?;
            let file = serde_json::to_value(m.to_file()).map_err(|e| internal(&e.to_string()))?;
            match out {
                Some(path) => {
                    fs::write(&path, format!("{file}\n")).map_err(|e| {
                        CommandResult::user_error(
                            "io",
                            format!("cannot write {}: {e}", path.display()),
                        )
                    })?;
                    let shown = path.display().to_string();
                    Ok(CommandResult::new(
                        Status::Ok,
                        json!({"written": shown}),
                        format!("wrote {shown}"),
                    ))
                }
                None => {
                    let text = serde_json::to_string_pretty(&file)
                        .map_err(|e| internal(&e.to_string()))?;
                    Ok(CommandResult::new(Status::Ok, file, text))
                }
            }
        }
    }
}

fn internal(message: &str) -> CommandResult {
    CommandResult::new(
        Status::InternalError,
        json!({"error": {"kind": "internal", "message": message}}),
        format!("internal error: {message}"),
    )
}

fn bisim_summary(strat: &crate::bisim::Stratification, mp: ModelPair<'_>) -> CommandResult {
    let fixed = strat.fixed_point();
    let pairs = |side: Side| -> Vec<Value> {
        let (s, t) = (mp.source(side), mp.target(side));
        fixed
            .component(side)
            .pairs()
            .map(|(x, y)| json!([s.name(x), t.name(y)]))
            .collect()
    };
    let (z1, z2) = (pairs(Side::Left), pairs(Side::Right));
    let absent = z1.is_empty() && z2.is_empty();
    let mut text = format!("alpha {}\n", strat.alpha);
    for (label, zs) in [("Z1", &z1), ("Z2", &z2)] {
        let shown: Vec<String> = zs
            .iter()
            .map(|p| {
                format!(
                    "{}:{}",
                    p[0].as_str().unwrap_or(""),
                    p[1].as_str().unwrap_or("")
                )
            })
            .collect();
        text.push_str(&format!("{label}: {}\n", shown.join(" ")));
    }
    CommandResult::new(
        Status::Ok,
        json!({"alpha": strat.alpha, "absent": absent, "z1": z1, "z2": z2}),
        text,
    )
}

#[allow(clippy::too_many_arguments)]
fn charform_result(
    forms: &mut CharFormulas<'_>,
    root: crate::charform::NodeId,
    stage: Option<usize>,
    stabilized: Option<usize>,
    emit: bool,
    max_size: u64,
    source: &Model,
    target: &Model,
) -> Outcome {
    let stage = stage.or(stabilized).unwrap_or(0);
    let pattern = forms.dag().pattern(root).clone();
    let tree_size = forms.dag_mut().tree_size(root);
    let satisfied = names(target, &pattern.right);
    let shown = if satisfied.is_empty() {
        "none".to_string()
    } else {
        satisfied.join(" ")
    };
    let mut payload = json!({
        "stage": stage,
        "nodes": forms.dag().len(),
        "tree_size": tree_size,
        "source_worlds": names(source, &pattern.left),
        "target_worlds": satisfied,
    });
    let mut text = format!(
        "stage {stage}\nnodes {}\ntree size {tree_size}\nholds in target at: {shown}\n",
        forms.dag().len(),
    );
    if let Some(xi) = stabilized {
        payload["stabilization_stage"] = json!(xi);
        text.push_str(&format!("stabilization stage {xi}\n"));
    }
    if emit {
        let f = forms
            .dag_mut()
            .materialize(root, max_size)
            .map_err(charform_error)?;
        let printed = print(&f);
        text.push_str(&printed);
        payload["formula"] = json!(printed);
    }
    Ok(CommandResult::new(Status::Ok, payload, text))
}
