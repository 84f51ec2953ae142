//! `livesession`: check, explore and compare session-typed processes.
//!
//! Exit codes: 0 pass, 1 fail, 2 parse error (or unreadable input),
//! 3 internal error.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use livesession::harness::{run_suite, SuiteConfig, SUITES};
use livesession::semantics::{explore, step, ExploreConfig, Primitives};
use livesession::syntax::{
    fmt_labels, parse_env_entries, parse_process, parse_type, Label, LabelSet, Process,
    SessionType, Value,
};
use livesession::types::{is_dual, TypeAutomaton};
use livesession::typing::{approx_a, check_live, check_std, Gamma, LiveCtx, StdCtx, TypeEnv};

const STATE_BUDGET_VAR: &str = "LIVESESSION_MAX_STATES";

#[derive(Parser)]
#[command(name = "livesession", version, about = "Session types with responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prims {
    /// The shopping-cart helpers.
    Shopping,
    /// The shopping-cart helpers with an `update` that never shrinks the cart.
    Stuck,
    /// No primitives at all.
    None,
}

impl Prims {
    fn table(self) -> Primitives {
        match self {
            Prims::Shopping => Primitives::shopping(),
            Prims::Stuck => Primitives::shopping_stuck(),
            Prims::None => Primitives::new(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Standard typing: ∅ ⊢ P ▹ Δ.
    Check { process: String, env: String },
    /// Liveness typing: ·; L ⊢ P ▹ Δ.
    CheckLive {
        process: String,
        env: String,
        /// Pending responses L, comma separated.
        #[arg(long, default_value = "")]
        pending: String,
        /// Print the derivation (or the error) as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Whether two types are dual.
    Dual { left: String, right: String },
    /// Steps a process, taking transition `--pick i` at each step.
    Simulate {
        process: String,
        #[arg(long)]
        pick: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "shopping")]
        prims: Prims,
    },
    /// Explores the traces of a process and prints them as JSON.
    Traces {
        process: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
        /// Detect lassos (ultimately periodic traces).
        #[arg(long)]
        lassos: bool,
        /// Environment whose response annotations drive the liveness verdict.
        #[arg(long)]
        env: Option<String>,
        #[arg(long, value_enum, default_value = "shopping")]
        prims: Prims,
    },
    /// Prints the response approximation A(P).
    Approx { process: String },
    /// Prints the transition graph of a type in DOT.
    Automaton { ty: String },
    /// Runs harness suites (all of them unless named).
    Suite {
        names: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    /// Unreadable or unparsable input.
    Input(String),
    Internal(String),
}

type Outcome = Result<bool, Failure>;

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn load_process(path: &str) -> Result<Process, Failure> {
    parse_process(&read(path)?).map_err(|e| Failure::Input(format!("{path}:{e}")))
}

fn load_type(path: &str) -> Result<SessionType, Failure> {
    let t = parse_type(&read(path)?).map_err(|e| Failure::Input(format!("{path}:{e}")))?;
    t.check_well_formed()
        .map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(t)
}

fn load_env(path: &str) -> Result<TypeEnv, Failure> {
    let entries = parse_env_entries(&read(path)?).map_err(|e| Failure::Input(format!("{path}:{e}")))?;
    for (k, t) in &entries {
        t.check_well_formed()
            .map_err(|e| Failure::Input(format!("{path}: {k}: {e}")))?;
    }
    Ok(TypeEnv::from_entries(entries))
}

fn parse_labels(s: &str) -> LabelSet {
    s.split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(Label::new)
        .collect()
}

fn parse_value(s: &str) -> Result<Value, Failure> {
    let s = s.trim();
    match s {
        "true" => Ok(Value::Bool(true)),
        "false" => Ok(Value::Bool(false)),
        _ => s
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| Failure::Input(format!("not a value: {s}"))),
    }
}

fn explore_config(depth: usize, values: &Option<Vec<String>>) -> Result<ExploreConfig, Failure> {
    let mut cfg = ExploreConfig::default().with_depth(depth);
    if let Some(vs) = values {
        cfg.values = vs.iter().map(|v| parse_value(v)).collect::<Result<_, _>>()?;
    }
    if let Some(n) = max_states()? {
        cfg.max_states = n;
    }
    Ok(cfg)
}

fn max_states() -> Result<Option<usize>, Failure> {
    match std::env::var(STATE_BUDGET_VAR) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::Input(format!("{STATE_BUDGET_VAR}: not a number: {v}"))),
        Err(_) => Ok(None),
    }
}

/// The requests each selected label carries, read off the environment.
fn request_table(env: &TypeEnv) -> BTreeMap<Label, LabelSet> {
    let mut table: BTreeMap<Label, LabelSet> = BTreeMap::new();
    for (_, t) in env.iter() {
        for out in TypeAutomaton::build(t).edges {
            for (l, _) in out {
                if let Some(sel) = l.sel() {
                    table.entry(sel.clone()).or_default().extend(l.req());
                }
            }
        }
    }
    table
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check { process, env } => {
            let (p, env) = (load_process(&process)?, load_env(&env)?);
            match check_std(&StdCtx::new(), &p, &env) {
                Ok(()) => {
                    println!("well-typed");
                    Ok(true)
                }
                Err(e) => {
                    println!("not well-typed");
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Command::CheckLive {
            process,
            env,
            pending,
            json,
        } => {
            let (p, env) = (load_process(&process)?, load_env(&env)?);
            let ctx = LiveCtx {
                gamma: Gamma::new(),
                pending: parse_labels(&pending),
            };
            let result = check_live(&ctx, &p, &env);
            if json {
                let text = match &result {
                    Ok(d) => serde_json::to_string_pretty(d),
                    Err(e) => serde_json::to_string_pretty(e),
                }
                .map_err(|e| Failure::Internal(e.to_string()))?;
                println!("{text}");
            }
            match result {
                Ok(d) => {
                    if !json {
                        println!("live-typed");
                        for (path, inv) in d.invariants() {
                            println!(
                                "  invariant {} at {}",
                                fmt_labels(&inv.chosen),
                                livesession::syntax::fmt_path(path)
                            );
                        }
                    }
                    Ok(true)
                }
                Err(e) if e.is_unsupported() => Err(Failure::Internal(e.to_string())),
                Err(e) => {
                    if !json {
                        if e.pending_left.is_empty() {
                            println!("not live-typed");
                        } else {
                            println!("not live-typed: undischarged {}", fmt_labels(&e.pending_left));
                        }
                    }
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        Command::Dual { left, right } => {
            let (t, s) = (load_type(&left)?, load_type(&right)?);
            let d = is_dual(&t, &s);
            println!("{}", if d { "dual" } else { "not dual" });
            Ok(d)
        }
        Command::Simulate {
            process,
            pick,
            values,
            prims,
        } => {
            let mut p = load_process(&process)?;
            let cfg = explore_config(0, &values)?;
            let prims = prims.table();
            for (n, &i) in pick.iter().enumerate() {
                let ts = step(&p, &prims, &cfg.values);
                println!("state {n}: {p}");
                for (j, t) in ts.iter().enumerate() {
                    println!("  [{j}] {} -> {}", t.label, t.target);
                }
                let Some(t) = ts.get(i) else {
                    eprintln!("step {n}: no transition {i} (there are {})", ts.len());
                    return Ok(false);
                };
                println!("  pick {i}: {}", t.label);
                p = t.target.clone();
            }
            let ts = step(&p, &prims, &cfg.values);
            println!("state {}: {p}", pick.len());
            for (j, t) in ts.iter().enumerate() {
                println!("  [{j}] {} -> {}", t.label, t.target);
            }
            Ok(true)
        }
        Command::Traces {
            process,
            depth,
            values,
            lassos,
            env,
            prims,
        } => {
            let p = load_process(&process)?;
            let mut cfg = explore_config(depth, &values)?;
            cfg.detect_lassos = lassos;
            if let Some(env) = env {
                cfg.requests = Some(request_table(&load_env(&env)?));
            }
            let ex = explore(&p, &cfg, &prims.table());
            let json = serde_json::to_string_pretty(&ex.to_json())
                .map_err(|e| Failure::Internal(e.to_string()))?;
            println!("{json}");
            if ex.budget_exhausted {
                eprintln!("state budget exhausted after {} states", ex.states.len());
            }
            Ok(true)
        }
        Command::Approx { process } => {
            let p = load_process(&process)?;
            println!("{}", fmt_labels(&approx_a(&p)));
            Ok(true)
        }
        Command::Automaton { ty } => {
            print!("{}", TypeAutomaton::build(&load_type(&ty)?).to_dot());
            Ok(true)
        }
        Command::Suite {
            names,
            seed,
            count,
            json,
        } => {
            let mut cfg = SuiteConfig {
                seed,
                count,
                ..SuiteConfig::default()
            };
            if let Some(n) = max_states()? {
                cfg.max_states = n;
            }
            let names: Vec<String> = if names.is_empty() {
                SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                names
            };
            let mut ok = true;
            let mut reports = Vec::new();
            for name in &names {
                let Some(r) = run_suite(name, &cfg) else {
                    return Err(Failure::Input(format!(
                        "unknown suite {name}; expected one of {}",
                        SUITES.join(", ")
                    )));
                };
                ok &= r.passed();
                if !json {
                    print!("{r}");
                }
                reports.push(r);
            }
            if json {
                let text = serde_json::to_string_pretty(&reports)
                    .map_err(|e| Failure::Internal(e.to_string()))?;
                println!("{text}");
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::from(0),
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}
