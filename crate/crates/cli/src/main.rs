mod corpus;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tst_core::encoding::export_dot;
use tst_core::kinding::{self, KindError};
use tst_core::monitor::{self, events_of, format_trace, parse_trace, TraceError};
use tst_core::semantics::{oracle_compliant, OracleError, Side};
use tst_core::syntax::{parse, parse_unchecked, validate, SyntaxError, Tst};
use tst_core::verify::{self, CheckOptions, SearchOrder, VerifyError};

#[derive(Parser)]
#[command(name = "tst", version, about = "Compliance, kinds, duals, subtyping and monitoring for timed session types")]
struct Cli {
    /// Add wall-clock timing to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Bfs,
    Dfs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a TST.
    Check { file: String },
    /// Decide whether two TSTs are compliant.
    Compliant {
        p: String,
        q: String,
        /// Cross-check the verdict against the region-graph oracle.
        #[arg(long)]
        oracle: bool,
        /// Write the concrete counterexample as a trace file.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[arg(long, value_enum, default_value_t = Order::Bfs)]
        order: Order,
        /// Explore exact zones, without extrapolation.
        #[arg(long)]
        exact: bool,
    },
    /// Decide whether a TST admits a compliant, and print its kind.
    Admits { file: String },
    /// Print the canonical compliant of a TST.
    Dual {
        file: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the first TST is a subtype of the second.
    Subtype { p: String, q: String },
    /// Encode a TST as a timed automaton.
    ToTa {
        file: String,
        /// Write GraphViz output here instead of embedding it in the report.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Replay a timed trace through the runtime monitor.
    Monitor { p: String, q: String, trace: String },
    /// List the bundled corpus and its expected verdicts.
    Corpus,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Check { .. } => "check",
            Cmd::Compliant { .. } => "compliant",
            Cmd::Admits { .. } => "admits",
            Cmd::Dual { .. } => "dual",
            Cmd::Subtype { .. } => "subtype",
            Cmd::ToTa { .. } => "to-ta",
            Cmd::Monitor { .. } => "monitor",
            Cmd::Corpus => "corpus",
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("no corpus entry `{0}`")]
    UnknownCorpus(String),
    #[error("{input}: {source}")]
    Syntax { input: String, source: SyntaxError },
    #[error("{input}: {source}")]
    Trace { input: String, source: TraceError },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Kind(#[from] KindError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A command's result: the verdict payload and the exit code.
struct Outcome {
    verdict: Value,
    code: u8,
}

impl Outcome {
    fn decided(positive: bool, verdict: Value) -> Outcome {
        Outcome {
            verdict,
            code: if positive { 0 } else { 1 },
        }
    }
}

struct Input {
    name: String,
    text: String,
}

impl Input {
    fn load(arg: &str) -> Result<Input, CliError> {
        let text = match arg.strip_prefix("corpus:") {
            Some(name) => corpus::get(name)
                .ok_or_else(|| CliError::UnknownCorpus(name.into()))?
                .to_string(),
            None => fs::read_to_string(arg).map_err(|source| CliError::Read {
                path: arg.into(),
                source,
            })?,
        };
        Ok(Input { name: arg.into(), text })
    }

    fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }

    fn tst(&self) -> Result<Tst, CliError> {
        parse(&self.text).map_err(|source| CliError::Syntax {
            input: self.name.clone(),
            source,
        })
    }
}

fn side(s: Side) -> &'static str {
    match s {
        Side::Left => "A",
        Side::Right => "B",
    }
}

fn sides(ss: &[Side]) -> Value {
    ss.iter().map(|&s| side(s)).collect()
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn run(cmd: &Cmd, inputs: &mut Vec<Input>) -> Result<Outcome, CliError> {
    let mut load = |arg: &str| -> Result<usize, CliError> {
        inputs.push(Input::load(arg)?);
        Ok(inputs.len() - 1)
    };
    match cmd {
        Cmd::Check { file } => {
            let i = load(file)?;
            let input = &inputs[i];
            let t = parse_unchecked(&input.text).map_err(|source| CliError::Syntax {
                input: input.name.clone(),
                source,
            })?;
            let violations = validate(&t);
            if !violations.is_empty() {
                let v: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Ok(Outcome::decided(false, json!({ "valid": false, "violations": v })));
            }
            Ok(Outcome::decided(
                true,
                json!({
                    "valid": true,
                    "normalized": t.to_string(),
                    "clocks": t.clocks().into_iter().collect::<Vec<_>>(),
                    "max_constant": t.max_constant(),
                }),
            ))
        }
        Cmd::Compliant {
            p,
            q,
            oracle,
            trace_out,
            jobs,
            max_states,
            order,
            exact,
        } => {
            let (i, j) = (load(p)?, load(q)?);
            let (p, q) = (inputs[i].tst()?, inputs[j].tst()?);
            let opts = CheckOptions {
                max_states: *max_states,
                order: match order {
                    Order::Bfs => SearchOrder::BreadthFirst,
                    Order::Dfs => SearchOrder::DepthFirst,
                },
                abstraction: !exact,
                jobs: *jobs,
            };
            let v = verify::check_with(&p, &q, &opts)?;
            let mut verdict = json!({ "compliant": v.compliant, "states": v.states });
            if let Some(cx) = &v.counterexample {
                let symbolic: Vec<Value> = cx
                    .symbolic
                    .iter()
                    .map(|s| json!({ "move": s.description, "left": s.left, "right": s.right, "zone": s.zone }))
                    .collect();
                let trace = format_trace(&events_of(&cx.trace));
                if let Some(path) = trace_out {
                    write_file(path, &trace)?;
                }
                verdict["counterexample"] = json!({
                    "symbolic": symbolic,
                    "trace": trace.lines().collect::<Vec<_>>(),
                });
            }
            if *oracle {
                let o = oracle_compliant(&p, &q)?;
                verdict["oracle"] = json!(o);
                if o != v.compliant {
                    return Ok(Outcome { verdict, code: 3 });
                }
            }
            Ok(Outcome::decided(v.compliant, verdict))
        }
        Cmd::Admits { file } => {
            let i = load(file)?;
            let (ok, k) = kinding::admits_compliant(&inputs[i].tst()?)?;
            Ok(Outcome::decided(ok, json!({ "admits": ok, "kind": k.to_string() })))
        }
        Cmd::Dual { file, out } => {
            let i = load(file)?;
            let p = inputs[i].tst()?;
            let (ok, _) = kinding::admits_compliant(&p)?;
            if !ok {
                return Ok(Outcome::decided(false, json!({ "admits": false, "dual": null })));
            }
            let d = kinding::dual(&p)?.to_string();
            if let Some(path) = out {
                write_file(path, &format!("{}\n", d))?;
            }
            Ok(Outcome::decided(true, json!({ "admits": true, "dual": d })))
        }
        Cmd::Subtype { p, q } => {
            let (i, j) = (load(p)?, load(q)?);
            let s = kinding::subtype(&inputs[i].tst()?, &inputs[j].tst()?)?;
            Ok(Outcome::decided(s, json!({ "subtype": s })))
        }
        Cmd::ToTa { file, dot } => {
            let i = load(file)?;
            let a = verify::automaton(&inputs[i].tst()?, "X")?;
            let text = export_dot(&a);
            let mut verdict = json!({
                "locations": a.locations.len(),
                "edges": a.edges.len(),
                "urgent": a.locations.iter().filter(|l| l.urgent).count(),
                "initial": a.initial_name().to_string(),
            });
            match dot {
                Some(path) => write_file(path, &text)?,
                None => verdict["dot"] = json!(text),
            }
            Ok(Outcome::decided(true, verdict))
        }
        Cmd::Monitor { p, q, trace } => {
            let (i, j, k) = (load(p)?, load(q)?, load(trace)?);
            let (p, q) = (inputs[i].tst()?, inputs[j].tst()?);
            let events = parse_trace(&inputs[k].text).map_err(|source| CliError::Trace {
                input: inputs[k].name.clone(),
                source,
            })?;
            let r = monitor::replay(&p, &q, &events);
            let steps: Vec<Value> = r
                .steps
                .iter()
                .map(|(e, rule, g)| {
                    let digest = hex::encode(&Sha256::digest(g.to_string().as_bytes())[..8]);
                    json!({ "event": e.to_string(), "rule": rule.to_string(), "state_digest": digest })
                })
                .collect();
            Ok(Outcome::decided(
                r.report.culpable.is_empty(),
                json!({
                    "success": r.report.success,
                    "culpable": sides(&r.report.culpable),
                    "on_duty": sides(&r.report.on_duty),
                    "final": r.last().to_string(),
                    "steps": steps,
                }),
            ))
        }
        Cmd::Corpus => {
            let files: Vec<Value> = corpus::FILES
                .iter()
                .map(|(n, src)| json!({ "name": n, "tst": src.trim() }))
                .collect();
            let pairs: Vec<Value> = corpus::pairs()
                .iter()
                .map(|(a, b, c)| json!({ "left": a, "right": b, "compliant": c }))
                .collect();
            Ok(Outcome::decided(true, json!({ "files": files, "pairs": pairs })))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut inputs = Vec::new();
    let result = run(&cli.cmd, &mut inputs);
    let mut report = json!({
        "command": cli.cmd.name(),
        "inputs": inputs.iter().map(|i| json!({ "name": i.name, "sha256": i.digest() })).collect::<Vec<_>>(),
    });
    let code = match result {
        Ok(o) => {
            report["verdict"] = o.verdict;
            o.code
        }
        Err(e) => {
            eprintln!("tst: {}", e);
            report["error"] = json!(e.to_string());
            2
        }
    };
    if code == 3 {
        eprintln!("tst: the zone checker and the region oracle disagree; please report this with the inputs below");
        for i in &inputs {
            eprintln!("--- {}\n{}", i.name, i.text.trim_end());
        }
    }
    if cli.timing {
        report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, &report);
    let _ = writeln!(out);
    ExitCode::from(code)
}
