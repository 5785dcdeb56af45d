use std::fs;
use std::io::{self, BufRead, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sva_equiv::harness::{self, report, Denominator, EvalSettings};
use sva_equiv::metrics::{self, TaskOutcome};
use sva_equiv::normalize::{self, Profile};
use sva_equiv::pec::{self, smt, Backend, CheckConfig, CheckError, SolverKind, Verdict};
use sva_equiv::syntax;
use sva_equiv::tcl;
use sva_equiv::wrapper;

const EXIT_FATAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "sva-equiv", version, about = "Bounded equivalence checking for SystemVerilog assertions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the temporal class (C1/C2/C3) of each assertion.
    Classify {
        /// Assertions; read one per line from stdin when absent.
        sva: Vec<String>,
        /// Histogram over a JSONL file instead.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        /// Field holding the assertion in each JSONL row.
        #[arg(long, default_value = "reference_sva")]
        field: String,
    },
    /// Apply the textual rewrite rules.
    Normalize {
        sva: String,
        #[arg(long, default_value = "lint")]
        profile: Profile,
        /// Print the rule report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Emit a self-contained checker module for one assertion.
    Wrap {
        sva: String,
        #[arg(long, default_value = "sva")]
        id: String,
        /// Write `<id>.sv` here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Decide the verdict between a candidate and a reference.
    Check {
        #[arg(long = "ref")]
        reference: String,
        #[arg(long)]
        cand: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Print the SMT-LIB script for one direction.
    Smt {
        #[arg(long = "ref")]
        reference: String,
        #[arg(long)]
        cand: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Direction::Forward)]
        direction: Direction,
    },
    /// Score a JSONL file of candidates.
    Eval(EvalArgs),
    /// pass@k with bootstrap intervals from JSONL rows of {task_id, n, c}.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
        k: Vec<u64>,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Assume the candidate, assert the reference.
    Forward,
    /// Assume the reference, assert the candidate.
    Backward,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value_t = 20)]
    depth: usize,
    /// Seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value = "enumerate")]
    backend: Backend,
    #[arg(long, default_value = "auto")]
    solver: SolverKind,
    #[arg(long, default_value_t = 20)]
    max_enum_bits: u32,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    backend: Option<Backend>,
    #[arg(long)]
    solver: Option<SolverKind>,
    #[arg(long)]
    max_enum_bits: Option<u32>,
    /// Report JSON path; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-candidate CSV path.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long)]
    denominator: Option<Denominator>,
    /// `key = value` file with defaults for any flag above.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl EvalArgs {
    fn settings(self) -> Result<EvalSettings, String> {
        let cli = EvalSettings {
            input: self.input,
            depth: self.depth,
            timeout: self.timeout,
            workers: self.workers,
            backend: self.backend,
            solver: self.solver,
            max_enum_bits: self.max_enum_bits,
            report: self.report,
            dump: self.dump,
            denominator: self.denominator,
        };
        let file = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                EvalSettings::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
            None => EvalSettings::default(),
        };
        Ok(cli.over(file))
    }
}

fn engine_config(a: &EngineArgs) -> Result<CheckConfig, String> {
    if !(a.timeout.is_finite() && a.timeout > 0.0) {
        return Err(format!("timeout must be positive, got {}", a.timeout));
    }
    let cfg = CheckConfig {
        depth: a.depth,
        timeout: Duration::from_secs_f64(a.timeout),
        backend: a.backend,
        max_enum_bits: a.max_enum_bits,
        solver: a.solver,
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify { sva, jsonl, field } => classify(sva, jsonl, &field),
        Command::Normalize { sva, profile, json } => match normalize::normalize(&sva, profile) {
            Ok((_, rep)) if json => {
                println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
                ExitCode::SUCCESS
            }
            Ok((text, _)) => {
                println!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_FATAL, e),
        },
        Command::Wrap { sva, id, out_dir } => wrap(&sva, &id, out_dir.as_deref()),
        Command::Check { reference, cand, engine } => check(&reference, &cand, &engine),
        Command::Smt {
            reference,
            cand,
            depth,
            direction,
        } => emit_smt(&reference, &cand, depth, direction),
        Command::Eval(args) => eval(args),
        Command::Metrics {
            input,
            k,
            replicates,
            seed,
            level,
        } => metrics_cmd(&input, &k, replicates, seed, level),
    }
}

fn classify(sva: Vec<String>, jsonl: Option<PathBuf>, field: &str) -> ExitCode {
    if let Some(path) = jsonl {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => return fail(EXIT_FATAL, format!("{}: {e}", path.display())),
        };
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let v: serde_json::Value = match serde_json::from_str(line) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_FATAL, format!("line {}: {e}", i + 1)),
            };
            match v.get(field).and_then(|f| f.as_str()) {
                Some(s) => rows.push(s.to_string()),
                None => return fail(EXIT_FATAL, format!("line {}: no string field '{field}'", i + 1)),
            }
        }
        let h = tcl::class_histogram(&rows);
        println!("{}", serde_json::to_string_pretty(&h).expect("serializable"));
        return ExitCode::SUCCESS;
    }
    let lines: Vec<String> = if sva.is_empty() {
        io::stdin().lock().lines().map_while(Result::ok).filter(|l| !l.trim().is_empty()).collect()
    } else {
        sva
    };
    let mut code = ExitCode::SUCCESS;
    for s in lines {
        match tcl::classify(&s) {
            Ok(c) => println!("{c}\t{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                code = ExitCode::from(EXIT_FATAL);
            }
        }
    }
    code
}

fn wrap(sva: &str, id: &str, out_dir: Option<&Path>) -> ExitCode {
    let text = match normalize::normalize(sva, Profile::Lint) {
        Ok((t, _)) => t,
        Err(e) => return fail(EXIT_FATAL, e),
    };
    let module = match wrapper::synthesize_wrapper(&text) {
        Ok(m) => m.to_sv(),
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match out_dir {
        None => {
            print!("{module}");
            ExitCode::SUCCESS
        }
        Some(dir) => {
            let path = dir.join(format!("{id}.sv"));
            match fs::create_dir_all(dir).and_then(|_| fs::write(&path, module)) {
                Ok(()) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(EXIT_FATAL, format!("{}: {e}", path.display())),
            }
        }
    }
}

fn check(reference: &str, cand: &str, engine: &EngineArgs) -> ExitCode {
    let cfg = match engine_config(engine) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match pec::check_equivalence_report(cand, reference, &cfg) {
        Ok(rep) => {
            println!("{}", serde_json::to_string(&rep).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e @ CheckError::Syntax { .. }) => {
            println!("{}", json!({"error": "syntax", "message": e.to_string()}));
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e @ CheckError::Config(_)) => fail(EXIT_CONFIG, e),
        Err(e) => fail(EXIT_FATAL, e),
    }
}

fn emit_smt(reference: &str, cand: &str, depth: usize, direction: Direction) -> ExitCode {
    let lowered = |src: &str| -> Result<pec::Lowered, String> {
        let ast = syntax::parse(src).map_err(|e| e.to_string())?;
        lower_or_explain(&ast)
    };
    let (c, r) = match (lowered(cand), lowered(reference)) {
        (Ok(c), Ok(r)) => (c, r),
        (Err(e), _) | (_, Err(e)) => return fail(EXIT_CONFIG, e),
    };
    if depth == 0 {
        return fail(EXIT_CONFIG, "depth must be at least 1");
    }
    let script = match direction {
        Direction::Forward => smt::emit(&c, &r, depth),
        Direction::Backward => smt::emit(&r, &c, depth),
    };
    print!("{}", script.text);
    ExitCode::SUCCESS
}

fn lower_or_explain(ast: &syntax::Node) -> Result<pec::Lowered, String> {
    pec::lower(ast).map_err(|u| Verdict::Unsupported(u.reason).to_string() + ": " + &u.detail)
}

fn eval(args: EvalArgs) -> ExitCode {
    let settings = match args.settings() {
        Ok(s) => s,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let (cfg, workers) = match (settings.check_config(), settings.workers()) {
        (Ok(c), Ok(w)) => (c, w),
        (Err(e), _) | (_, Err(e)) => return fail(EXIT_CONFIG, e),
    };
    let Some(input) = settings.input.clone() else {
        return fail(EXIT_CONFIG, "no --input given");
    };
    let ingested = match harness::ingest(&input) {
        Ok(i) => i,
        Err(e) => return fail(EXIT_FATAL, format!("{}: {e}", input.display())),
    };
    for e in &ingested.errors {
        eprintln!("warning: {}:{}: {}", input.display(), e.line, e.message);
    }
    for w in &ingested.warnings {
        eprintln!("warning: {}: {w}", input.display());
    }
    let start = Instant::now();
    let results = harness::run_batch(&ingested.rows, &cfg, workers);
    let rep = report::report(&results, settings.denominator.unwrap_or_default());
    eprint!("{}", rep.to_text());
    eprintln!("elapsed {:.2}s with {workers} worker(s)", start.elapsed().as_secs_f64());
    let json = rep.to_json();
    match &settings.report {
        Some(p) => {
            if let Err(e) = fs::write(p, json + "\n") {
                return fail(EXIT_FATAL, format!("{}: {e}", p.display()));
            }
        }
        None => println!("{json}"),
    }
    if let Some(p) = &settings.dump {
        let written = fs::File::create(p)
            .map_err(|e| e.to_string())
            .and_then(|f| report::write_csv(&results, f).map_err(|e| e.to_string()));
        if let Err(e) = written {
            return fail(EXIT_FATAL, format!("{}: {e}", p.display()));
        }
    }
    ExitCode::SUCCESS
}

fn metrics_cmd(input: &Path, ks: &[u64], replicates: usize, seed: u64, level: f64) -> ExitCode {
    let mut text = String::new();
    if let Err(e) = fs::File::open(input).and_then(|mut f| f.read_to_string(&mut text)) {
        return fail(EXIT_FATAL, format!("{}: {e}", input.display()));
    }
    let mut tasks = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str::<TaskOutcome>(line) {
            Ok(t) if t.n >= 1 && t.c <= t.n => tasks.push(t),
            Ok(t) => return fail(EXIT_FATAL, format!("line {}: need 1 <= n and c <= n in {t:?}", i + 1)),
            Err(e) => return fail(EXIT_FATAL, format!("line {}: {e}", i + 1)),
        }
    }
    if tasks.is_empty() {
        return fail(EXIT_FATAL, format!("{}: no tasks", input.display()));
    }
    match metrics::pass_at_k_table(&tasks, ks, replicates, seed, level) {
        Ok(table) => {
            let out = json!({
                "tasks": tasks.len(),
                "replicates": replicates,
                "seed": seed,
                "level": level,
                "pass_at_k": table,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_CONFIG, e),
    }
}
