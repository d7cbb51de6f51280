use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use x3sat::oracle::Oracle;
use x3sat::{
    emit_result, parse_x3c, solve, verify_assignment, Assignment, Instance, LiteralOrder, PickPolicy, ScanConfig,
    SolveConfig, Status, Verdict,
};
use x3sat_harness::store::STORE_ENV;
use x3sat_harness::{replay, run_campaign, CounterexampleStore, DiffConfig, GenConfig};

const EXIT_SAT: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FALSIFIED: u8 = 3;
const EXIT_UNSAT: u8 = 20;

#[derive(Parser)]
#[command(name = "x3sat", version, about = "Exactly-1 3SAT scan solver, enumeration oracle and fuzzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an x3c instance; exit 0 sat, 20 unsat, 1 unknown or error
    Solve {
        /// Instance file, or - for stdin
        file: PathBuf,
        /// Print the JSON result instead of DIMACS-style lines
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the scan trace as JSON lines
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Decide an instance by exhaustive enumeration
    Oracle {
        file: PathBuf,
        /// Also count models
        #[arg(long)]
        count: bool,
        /// Maximum number of enumerated variables
        #[arg(long, default_value_t = x3sat::oracle::DEFAULT_CAP)]
        cap: u32,
    },
    /// Check a `v ... 0` model against an instance; exit 0 valid, 1 otherwise
    Verify { file: PathBuf, model: PathBuf },
    /// Run a seeded differential campaign and print its summary as JSON
    Fuzz(FuzzArgs),
    /// Re-run a stored counterexample with its recorded settings
    Replay { store: PathBuf, id: String },
}

#[derive(Args)]
struct SolverArgs {
    /// Literal order for the scan: pos-first, neg-first or random:SEED
    #[arg(long, default_value = "pos-first")]
    order: LiteralOrder,
    /// Primitive step budget; default 64*n^3*m
    #[arg(long)]
    step_budget: Option<u64>,
    /// Pick policy for construction: pos-lowest, neg-lowest, random:SEED or sequence:L,L,...
    #[arg(long, default_value = "pos-lowest")]
    pick: PickPolicy,
}

impl SolverArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            scan: ScanConfig {
                order: self.order,
                step_budget: self.step_budget,
            },
            pick: self.pick.clone(),
        }
    }
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    count: u64,
    /// Counterexample store; defaults to $X3SAT_STORE when set
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    two_clause_fraction: f64,
    #[arg(long, default_value_t = 0.5)]
    positive_bias: f64,
    #[arg(long, default_value_t = 0.0)]
    special_fraction: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = read_text(path)?;
    let doc = parse_x3c(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.to_instance())
}

fn cmd_solve(file: &Path, json: bool, solver: &SolverArgs, trace: Option<&Path>) -> Result<u8> {
    let instance = read_instance(file)?;
    let solution = solve(&instance, &solver.config());
    if let Some(path) = trace {
        let mut out = String::new();
        for event in &solution.trace {
            out.push_str(&serde_json::to_string(event)?);
            out.push('\n');
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    let mut stdout = io::stdout().lock();
    if json {
        writeln!(stdout, "{}", emit_result(&solution))?;
    } else {
        match &solution.verdict {
            Verdict::Sat(cert) => {
                writeln!(stdout, "s SATISFIABLE")?;
                writeln!(stdout, "{}", cert.total.to_model_line())?;
            }
            Verdict::Unsat => writeln!(stdout, "s UNSATISFIABLE")?,
            Verdict::BudgetExceeded { budget } => {
                writeln!(stdout, "c step budget {budget} exceeded")?;
                writeln!(stdout, "s UNKNOWN")?;
            }
            Verdict::ConstructionFailed(e) => {
                writeln!(stdout, "c scan terminated, construction failed: {e}")?;
                writeln!(stdout, "s UNKNOWN")?;
            }
            Verdict::VerificationFailed { violation, .. } => {
                writeln!(stdout, "c scan terminated, assignment invalid: {violation}")?;
                writeln!(stdout, "s UNKNOWN")?;
            }
        }
    }
    Ok(match solution.status() {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::Unknown => EXIT_ERROR,
    })
}

fn cmd_oracle(file: &Path, count: bool, cap: u32) -> Result<u8> {
    let instance = read_instance(file)?;
    let mut stdout = io::stdout().lock();
    let psi = match instance.initial_minterm() {
        Ok(psi) => psi,
        Err(var) => {
            writeln!(stdout, "c conjuncts clash on x{var}")?;
            if count {
                writeln!(stdout, "c models 0")?;
            }
            writeln!(stdout, "s UNSATISFIABLE")?;
            return Ok(EXIT_UNSAT);
        }
    };
    let verdict = Oracle::new(cap).solve(&instance.formula, &psi, count)?;
    if let Some(total) = verdict.total_models() {
        writeln!(stdout, "c models {total}")?;
    }
    match &verdict.witness {
        Some(w) => {
            writeln!(stdout, "s SATISFIABLE")?;
            writeln!(stdout, "{}", w.to_model_line())?;
            Ok(EXIT_SAT)
        }
        None => {
            writeln!(stdout, "s UNSATISFIABLE")?;
            Ok(EXIT_UNSAT)
        }
    }
}

fn cmd_verify(file: &Path, model: &Path) -> Result<u8> {
    let instance = read_instance(file)?;
    let text = read_text(model)?;
    let assignment = Assignment::parse_model(&text, instance.num_vars())
        .with_context(|| format!("parsing {}", model.display()))?;
    match verify_assignment(&instance, &assignment) {
        Ok(()) => {
            writeln!(io::stdout(), "OK")?;
            Ok(EXIT_SAT)
        }
        Err(v) => {
            writeln!(io::stdout(), "INVALID {v}")?;
            Ok(EXIT_ERROR)
        }
    }
}

fn cmd_fuzz(args: &FuzzArgs) -> Result<u8> {
    let mut cfg = GenConfig::new(args.seed, args.n, args.m);
    cfg.two_clause_fraction = args.two_clause_fraction;
    cfg.positive_bias = args.positive_bias;
    cfg.special_fraction = args.special_fraction;
    cfg.validate()?;
    let diff = DiffConfig {
        solve: args.solver.config(),
        oracle: Oracle::default(),
    };
    let store_path = args
        .store
        .clone()
        .or_else(|| std::env::var_os(STORE_ENV).map(PathBuf::from));
    let mut store = store_path.map(CounterexampleStore::open).transpose()?;
    let result = run_campaign(&[cfg], args.count, &diff, store.as_mut())?;
    let summary = &result.summary;
    writeln!(io::stdout(), "{}", summary.to_json())?;
    if let Some(a) = &summary.aborted {
        eprintln!("campaign aborted: {} at index {}", a.class.name(), a.index);
        return Ok(EXIT_ERROR);
    }
    let falsified = result.reports.iter().any(|(_, r)| r.class.is_falsification());
    Ok(if falsified { EXIT_FALSIFIED } else { EXIT_SAT })
}

fn cmd_replay(store: &Path, id: &str) -> Result<u8> {
    if !store.exists() {
        bail!("no store at {}", store.display());
    }
    let entry = CounterexampleStore::open(store)?.get(id)?;
    let r = replay(&entry)?;
    writeln!(
        io::stdout(),
        "{}",
        serde_json::json!({
            "id": entry.id,
            "recorded": r.recorded,
            "replayed": r.report.class,
            "reproduced": r.reproduced(),
            "digest_matches": r.report.digest == entry.digest,
            "detail": r.report.detail,
        })
    )?;
    Ok(if r.reproduced() && r.recorded.is_falsification() {
        EXIT_FALSIFIED
    } else if r.report.class.is_agreement() {
        EXIT_SAT
    } else {
        EXIT_ERROR
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            file,
            json,
            solver,
            trace,
        } => cmd_solve(file, *json, solver, trace.as_deref()),
        Command::Oracle { file, count, cap } => cmd_oracle(file, *count, *cap),
        Command::Verify { file, model } => cmd_verify(file, model),
        Command::Fuzz(args) => cmd_fuzz(args),
        Command::Replay { store, id } => cmd_replay(store, id),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
