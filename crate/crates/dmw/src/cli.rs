//! Command-line front door. Every subcommand is a pure function of its
//! inputs: JSON on stdout, diagnostics on stderr, and a four-value exit
//! code contract:
//!
//! - `0`: success / positive verdict,
//! - `1`: negative verdict (unsat, false, no witness),
//! - `2`: usage or input error,
//! - `3`: budget exhausted.
//!
//! File-valued flags accept `-` to read the payload from stdin.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::counter_machine::{
    bounded_reachability, reconstruct_reliable, run_reliable, CounterMachine, InstructionSeq, Run,
};
use crate::decider::{
    decide_sat, selective_filtrate, DeciderParams, FiltrationOptions, LogicSpec, SatResult,
    SearchMode,
};
use crate::encodings::{grid_formula, machine_formula, EncodingStyle};
use crate::formula::Formula;
use crate::frames::World;
use crate::model_builders::{build_finitary_model, extract_runs, ExtractionStyle};
use crate::semantics::Model;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "dmw",
    about = "Workbench for two-dimensional modal product logics with a diagonal constant",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its canonical rendering, JSON tree, and metrics.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Model-check a formula at every world of a model.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Decide satisfiability under a product logic.
    Sat {
        #[arg(long)]
        logic: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "budgeted")]
        mode: String,
        #[arg(long, default_value_t = 3)]
        hcap: usize,
        #[arg(long, default_value_t = 3)]
        vcap: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Decide validity under a product logic (satisfiability of the negation).
    Valid {
        #[arg(long)]
        logic: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value = "budgeted")]
        mode: String,
        #[arg(long, default_value_t = 3)]
        hcap: usize,
        #[arg(long, default_value_t = 3)]
        vcap: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Compile a counter machine into an encoding formula.
    Encode {
        #[arg(long)]
        style: String,
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        qfin: Option<String>,
        #[arg(long)]
        qr: Option<String>,
    },
    /// Execute the unique reliable run of an instruction sequence.
    CmRun {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        tau: PathBuf,
    },
    /// Check the machine invariants and list violations.
    CmValidate {
        #[arg(long)]
        machine: PathBuf,
    },
    /// Reconstruct the reliable run from a lossy / insertion-error pair.
    CmApprox {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        lossy: PathBuf,
        #[arg(long)]
        ierr: PathBuf,
    },
    /// Bounded reliable reachability of a state.
    CmReach {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        qfin: String,
        #[arg(long, default_value_t = 32)]
        steps: usize,
    },
    /// Build a verified finitary-encoding model from a reliable run.
    BuildModel {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        qfin: String,
    },
    /// Extract the instruction sequence and faulty runs from a model.
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        machine: PathBuf,
    },
    /// Selectively filtrate a product model against a formula.
    Filtrate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// End-to-end pipeline: find a run, encode, build, check, extract,
    /// reconstruct, compare.
    Demo {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        qfin: Option<String>,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
}

struct Ctx<'a> {
    stdin: &'a [u8],
}

#[derive(Debug)]
struct Failure {
    exit_code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            exit_code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(i32, Value), Failure>;

impl Ctx<'_> {
    fn read_input(&self, path: &PathBuf) -> Result<String, Failure> {
        if path.as_os_str() == "-" {
            String::from_utf8(self.stdin.to_vec())
                .map_err(|_| Failure::usage("stdin is not valid UTF-8"))
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
        }
    }

    fn read_json(&self, path: &PathBuf) -> Result<Value, Failure> {
        serde_json::from_str(&self.read_input(path)?)
            .map_err(|e| Failure::usage(format!("{}: invalid JSON: {e}", path.display())))
    }

    fn read_machine(&self, path: &PathBuf) -> Result<CounterMachine, Failure> {
        CounterMachine::from_json(&self.read_json(path)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn read_tau(&self, path: &PathBuf) -> Result<InstructionSeq, Failure> {
        InstructionSeq::from_json(&self.read_json(path)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn read_run(&self, path: &PathBuf) -> Result<Run, Failure> {
        Run::from_json(&self.read_json(path)?)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn read_model(&self, path: &PathBuf) -> Result<(Model, Option<World>), Failure> {
        let value = self.read_json(path)?;
        let model = Model::from_json(&value)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let designated = match value.get("designated") {
            Some(v) => Some(
                World::from_json(v)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
            ),
            None => None,
        };
        Ok((model, designated))
    }
}

fn parse_formula(text: &str) -> Result<Formula, Failure> {
    Formula::parse(text).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_logic(text: &str) -> Result<LogicSpec, Failure> {
    LogicSpec::parse(text).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_style(
    style: &str,
    qfin: Option<String>,
    qr: Option<String>,
) -> Result<EncodingStyle, Failure> {
    match style {
        "forward" => Ok(EncodingStyle::Forward),
        "finitary" => {
            let q_fin =
                qfin.ok_or_else(|| Failure::usage("--style finitary requires --qfin"))?;
            Ok(EncodingStyle::Finitary { q_fin })
        }
        "backward" => Ok(EncodingStyle::Backward),
        "linear" => Ok(EncodingStyle::Linear { q_r: qr }),
        other => Err(Failure::usage(format!(
            "unknown style {other:?}; use forward|finitary|backward|linear"
        ))),
    }
}

fn parse_mode(mode: &str) -> Result<SearchMode, Failure> {
    match mode {
        "exhaustive" => Ok(SearchMode::Exhaustive),
        "budgeted" => Ok(SearchMode::Budgeted),
        other => Err(Failure::usage(format!(
            "unknown mode {other:?}; use exhaustive|budgeted"
        ))),
    }
}

fn sat_result_output(result: &SatResult) -> (i32, Value) {
    let code = match result {
        SatResult::Sat { .. } => EXIT_OK,
        SatResult::UnsatWithinBound { .. } => EXIT_NEGATIVE,
        SatResult::Unknown { .. } => EXIT_BUDGET,
    };
    (code, result.to_json())
}

fn formula_json(f: &Formula) -> Value {
    json!({"text": f.render(), "ast": f.to_json()})
}

fn run_parsed(cli: Cli, ctx: &Ctx) -> CmdResult {
    match cli.command {
        Command::Parse { formula } => {
            let f = parse_formula(&formula)?;
            let m = f.metrics();
            Ok((
                EXIT_OK,
                json!({
                    "canonical": f.render(),
                    "full": f.render_full(),
                    "ast": f.to_json(),
                    "metrics": {
                        "subformulas": m.subformula_count,
                        "hd": m.horizontal_depth,
                        "vd": m.vertical_depth,
                        "variables": m.variables.iter().collect::<Vec<_>>(),
                    },
                }),
            ))
        }
        Command::Mc { model, formula } => {
            let (model, _) = ctx.read_model(&model)?;
            let f = parse_formula(&formula)?;
            let per_world: Vec<Value> = model
                .frame()
                .worlds()
                .iter()
                .map(|w| {
                    json!({
                        "world": w.to_json(),
                        "holds": model.check_at(w, &f).unwrap(),
                    })
                })
                .collect();
            let global = model.holds_globally(&f);
            let code = if global { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, json!({"global": global, "worlds": per_world})))
        }
        Command::Sat {
            logic,
            formula,
            mode,
            hcap,
            vcap,
            jobs,
            budget,
        } => {
            let spec = parse_logic(&logic)?;
            let f = parse_formula(&formula)?;
            let mode = parse_mode(&mode)?;
            let params = DeciderParams {
                h_cap: hcap,
                v_cap: vcap,
                jobs: jobs.max(1),
                budget,
                ..DeciderParams::default()
            };
            let result = decide_sat(&f, &spec, mode, &params)
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok(sat_result_output(&result))
        }
        Command::Valid {
            logic,
            formula,
            mode,
            hcap,
            vcap,
            jobs,
            budget,
        } => {
            let spec = parse_logic(&logic)?;
            let f = parse_formula(&formula)?;
            let mode = parse_mode(&mode)?;
            let params = DeciderParams {
                h_cap: hcap,
                v_cap: vcap,
                jobs: jobs.max(1),
                budget,
                ..DeciderParams::default()
            };
            let negated = Formula::not(f);
            let result = decide_sat(&negated, &spec, mode, &params)
                .map_err(|e| Failure::usage(e.to_string()))?;
            match result {
                SatResult::UnsatWithinBound { exhaustive, .. } => Ok((
                    EXIT_OK,
                    json!({"valid": true, "exhaustive": exhaustive}),
                )),
                SatResult::Sat { model, world } => Ok((
                    EXIT_NEGATIVE,
                    json!({
                        "valid": false,
                        "countermodel": model.to_json(),
                        "world": world.to_json(),
                    }),
                )),
                SatResult::Unknown { budget_spent } => Ok((
                    EXIT_BUDGET,
                    json!({"valid": null, "budget_spent": budget_spent}),
                )),
            }
        }
        Command::Encode {
            style,
            machine,
            qfin,
            qr,
        } => {
            let m = ctx.read_machine(&machine)?;
            let style = parse_style(&style, qfin, qr)?;
            let grid = grid_formula(&style);
            let machine_part =
                machine_formula(&m, &style).map_err(|e| Failure::usage(e.to_string()))?;
            let full = Formula::and(grid.clone(), machine_part.clone());
            Ok((
                EXIT_OK,
                json!({
                    "grid": formula_json(&grid),
                    "machine": formula_json(&machine_part),
                    "conjunction": formula_json(&full),
                }),
            ))
        }
        Command::CmRun { machine, tau } => {
            let m = ctx.read_machine(&machine)?;
            let tau = ctx.read_tau(&tau)?;
            match run_reliable(&m, &tau) {
                Ok(run) => Ok((EXIT_OK, run.to_json())),
                Err(e) => Ok((EXIT_NEGATIVE, json!({"error": e.to_string()}))),
            }
        }
        Command::CmValidate { machine } => {
            let m = ctx.read_machine(&machine)?;
            let violations = m.validate();
            let code = if violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            Ok((code, json!({"violations": violations})))
        }
        Command::CmApprox {
            machine,
            tau,
            lossy,
            ierr,
        } => {
            let m = ctx.read_machine(&machine)?;
            let tau = ctx.read_tau(&tau)?;
            let lossy = ctx.read_run(&lossy)?;
            let ierr = ctx.read_run(&ierr)?;
            let run = reconstruct_reliable(&m, &tau, &lossy, &ierr)
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok((EXIT_OK, run.to_json()))
        }
        Command::CmReach {
            machine,
            qfin,
            steps,
        } => {
            let m = ctx.read_machine(&machine)?;
            match bounded_reachability(&m, &qfin, steps) {
                Some((tau, run)) => Ok((
                    EXIT_OK,
                    json!({"tau": tau.to_json(), "run": run.to_json()}),
                )),
                None => Ok((
                    EXIT_NEGATIVE,
                    json!({"witness": null, "steps_searched": steps}),
                )),
            }
        }
        Command::BuildModel { machine, tau, qfin } => {
            let m = ctx.read_machine(&machine)?;
            let tau = ctx.read_tau(&tau)?;
            let run = run_reliable(&m, &tau).map_err(|e| Failure::usage(e.to_string()))?;
            let (model, designated) = build_finitary_model(&m, &tau, &run, &qfin)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let mut out = model.to_json();
            out["designated"] = designated.to_json();
            out["verified"] = json!(true);
            out["worlds_count"] = json!(model.frame().worlds().len());
            Ok((EXIT_OK, out))
        }
        Command::Extract { model, machine } => {
            let (model, designated) = ctx.read_model(&model)?;
            let m = ctx.read_machine(&machine)?;
            let root = designated.ok_or_else(|| {
                Failure::usage("model JSON needs a \"designated\" world for extraction")
            })?;
            let extracted = extract_runs(&model, &m, &root, None, ExtractionStyle::Forward)
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok((
                EXIT_OK,
                json!({
                    "tau": extracted.tau.to_json(),
                    "lossy": extracted.lossy.to_json(),
                    "ierr": extracted.ierr.to_json(),
                    "columns": extracted.columns.iter().map(World::to_json).collect::<Vec<_>>(),
                    "ambiguous_steps": extracted.ambiguous_steps,
                }),
            ))
        }
        Command::Filtrate { model, formula } => {
            let (model, designated) = ctx.read_model(&model)?;
            let f = parse_formula(&formula)?;
            let root = designated.ok_or_else(|| {
                Failure::usage("model JSON needs a \"designated\" world to filtrate at")
            })?;
            let (filtered, stats) =
                selective_filtrate(&model, &root, &f, FiltrationOptions::default())
                    .map_err(|e| Failure::usage(e.to_string()))?;
            let mut out = filtered.to_json();
            out["designated"] = root.to_json();
            out["sizes"] = json!({
                "before": model.frame().worlds().len(),
                "after": filtered.frame().worlds().len(),
                "u_v_layers": stats.u_v_sizes,
                "u_h_layers": stats.u_h_sizes,
            });
            Ok((EXIT_OK, out))
        }
        Command::Demo {
            machine,
            qfin,
            steps,
        } => demo(ctx, &machine, qfin, steps),
    }
}

/// The end-to-end pipeline over one machine; each stage cross-checks the
/// previous ones and the summary reports every comparison.
fn demo(ctx: &Ctx, machine: &PathBuf, qfin: Option<String>, steps: usize) -> CmdResult {
    let m = ctx.read_machine(machine)?;
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(Failure::usage(format!(
            "machine fails validation: {}",
            violations.join("; ")
        )));
    }
    let q_fin = match qfin {
        Some(q) => q,
        None => m
            .halting
            .first()
            .cloned()
            .ok_or_else(|| Failure::usage("machine has no halting state; pass --qfin"))?,
    };
    let Some((tau, run)) = bounded_reachability(&m, &q_fin, steps) else {
        return Ok((
            EXIT_NEGATIVE,
            json!({"error": format!("no reliable run reaches {q_fin:?} within {steps} steps")}),
        ));
    };
    let (model, designated) = build_finitary_model(&m, &tau, &run, &q_fin)
        .map_err(|e| Failure::usage(format!("model construction failed: {e}")))?;

    let style = EncodingStyle::Finitary {
        q_fin: q_fin.clone(),
    };
    let target = Formula::and(
        grid_formula(&style),
        machine_formula(&m, &style).map_err(|e| Failure::usage(e.to_string()))?,
    );
    let model_checks = model.check_at(&designated, &target) == Ok(true);

    let extracted = extract_runs(&model, &m, &designated, None, ExtractionStyle::Forward)
        .map_err(|e| Failure::usage(format!("extraction failed: {e}")))?;
    let tau_matches = extracted.tau == tau;
    let reconstructed = reconstruct_reliable(&m, &extracted.tau, &extracted.lossy, &extracted.ierr)
        .map_err(|e| Failure::usage(format!("reconstruction failed: {e}")))?;
    let run_matches = reconstructed.configs == run.configs;

    let all_green = model_checks && tau_matches && run_matches;
    Ok((
        if all_green { EXIT_OK } else { EXIT_NEGATIVE },
        json!({
            "qfin": q_fin,
            "tau": tau.to_json(),
            "run": run.to_json(),
            "model_worlds": model.frame().worlds().len(),
            "designated": designated.to_json(),
            "checks": {
                "encoding_model_checks": model_checks,
                "extracted_tau_matches": tau_matches,
                "reconstruction_matches_run": run_matches,
            },
            "all_green": all_green,
        }),
    ))
}

/// Run one command line. `argv` excludes nothing: pass the program name as
/// the first element. JSON lands on stdout (or the `--out` file), human
/// diagnostics on stderr.
pub fn run_command(argv: &[String], stdin: &[u8]) -> CliOutcome {
    // Peel off a trailing/interleaved `--out FILE` before clap parsing so
    // every subcommand supports it uniformly.
    let mut out_file: Option<PathBuf> = None;
    let mut args: Vec<String> = Vec::with_capacity(argv.len());
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        if arg == "--out" {
            match it.next() {
                Some(path) => out_file = Some(PathBuf::from(path)),
                None => {
                    return CliOutcome {
                        exit_code: EXIT_USAGE,
                        stdout: String::new(),
                        stderr: "--out requires a file path\n".into(),
                    }
                }
            }
        } else {
            args.push(arg.clone());
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output on "error".
            let rendered = e.render().to_string();
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            return CliOutcome {
                exit_code: if is_help { EXIT_OK } else { EXIT_USAGE },
                stdout: if is_help { rendered.clone() } else { String::new() },
                stderr: if is_help { String::new() } else { rendered },
            };
        }
    };
    let ctx = Ctx { stdin };
    match run_parsed(cli, &ctx) {
        Ok((exit_code, value)) => {
            let body = format!("{}\n", serde_json::to_string_pretty(&value).unwrap());
            match out_file {
                Some(path) => match std::fs::write(&path, &body) {
                    Ok(()) => CliOutcome {
                        exit_code,
                        stdout: String::new(),
                        stderr: format!("wrote {}\n", path.display()),
                    },
                    Err(e) => CliOutcome {
                        exit_code: EXIT_USAGE,
                        stdout: String::new(),
                        stderr: format!("cannot write {}: {e}\n", path.display()),
                    },
                },
                None => CliOutcome {
                    exit_code,
                    stdout: body,
                    stderr: String::new(),
                },
            }
        }
        Err(failure) => CliOutcome {
            exit_code: failure.exit_code,
            stdout: String::new(),
            stderr: format!("error: {}\n", failure.message),
        },
    }
}

/// Convenience for tests: split a command line on spaces (no quoting).
pub fn run_line(line: &str, stdin: &[u8]) -> CliOutcome {
    let argv: Vec<String> = std::iter::once("dmw".to_string())
        .chain(line.split_whitespace().map(str::to_string))
        .collect();
    run_command(&argv, stdin)
}
