//! `polarsat` command-line tool.
//!
//! Exit status: 0 on success (an UNSAT verdict is a result, not a failure),
//! 1 on domain errors, 2 on usage errors. All randomness flows from `--seed`;
//! when it is omitted a random seed is drawn and logged so the run can be
//! replayed.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::{json, Value};

use polarsat::bounds::{
    distinct_tuple_probability_lb, log2_expected_models, log2_expected_models_with_slack,
    pretzel_probability_bound, upper_density,
};
use polarsat::dimacs::{parse_dimacs, to_dimacs_with_meta, DimacsMeta};
use polarsat::experiments::{csv_header, run_plan, PlanKind, RunOptions, SolverChoice, TrialPlan};
use polarsat::generator::{sample_formula, ModelParams};
use polarsat::solver::spine_set;
use polarsat::twosat::{find_pretzel, for_each_unicycle, has_bicycle, implication_digraph, solve_2sat};
use polarsat::{Assignment, Error, Formula, Literal, SatResult};

/// `println!` that tolerates a closed stdout (e.g. piping into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

macro_rules! out_raw {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "polarsat", version, about = "Polarized random k-SAT experiments")]
struct Cli {
    /// Master seed; a random one is drawn and logged when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,

    /// Log level on stderr.
    #[arg(long, value_enum, global = true, default_value_t = LogLevel::Info)]
    log_level: LogLevel,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a formula and write it as DIMACS.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: usize,
        /// Write DIMACS here instead of stdout.
        #[arg(long)]
        dimacs_out: Option<PathBuf>,
    },
    /// Decide satisfiability of a DIMACS formula.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        /// Exit 10 on SAT and 20 on UNSAT.
        #[arg(long)]
        solver_exit_codes: bool,
    },
    /// List the spine variables of a satisfiable formula.
    Spine {
        #[command(flatten)]
        input: Input,
    },
    /// Structural queries on the implication digraph of a 2-CNF formula.
    Twosat {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Check::Sat)]
        check: Check,
        /// Largest pretzel interior / unicycle half-length searched (default n).
        #[arg(long)]
        max_t: Option<usize>,
    },
    /// Closed-form bounds.
    Bounds {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Satisfiability probability over an (m, p) grid, coupled across p.
    Sweep(PlanArgs),
    /// Median breakpoint density for each p.
    Threshold(PlanArgs),
    /// Spine-count moments over an (m, p) grid.
    Spines(PlanArgs),
}

#[derive(Args, Debug)]
struct Input {
    /// DIMACS file; stdin when omitted or `-`.
    #[arg(long)]
    dimacs_in: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Auto,
    Exact,
    TwoSat,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> SolverChoice {
        match s {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Exact => SolverChoice::Exact,
            SolverArg::TwoSat => SolverChoice::TwoSat,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Sat,
    Bicycle,
    Pretzel,
    Unicycles,
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// TOML plan file; inline flags are ignored when given.
    #[arg(long, conflicts_with_all = ["n", "k", "p_grid", "m_grid", "density_grid", "trials"])]
    plan: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated polarizations.
    #[arg(long, value_delimiter = ',')]
    p_grid: Vec<f64>,
    /// Comma-separated clause counts.
    #[arg(long, value_delimiter = ',')]
    m_grid: Vec<usize>,
    /// Comma-separated densities; m = ceil(d·n).
    #[arg(long, value_delimiter = ',')]
    density_grid: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Worker threads.
    #[arg(long, env = "POLARSAT_WORKERS")]
    workers: Option<usize>,
    /// Keep per-trial detail and also write `<out>.json`.
    #[arg(long)]
    verbose: bool,
    /// Results CSV.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

/// A failure after argument parsing: usage errors exit 2, the rest 1.
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.log_level {
        LogLevel::Error => log::LevelFilter::Error,
        LogLevel::Warn => log::LevelFilter::Warn,
        LogLevel::Info => log::LevelFilter::Info,
        LogLevel::Debug => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();

    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let format = if cli.json { Format::Json } else { cli.format };
    let seed = cli.seed.unwrap_or_else(rand::random);
    info!(
        "polarsat {} args={:?} seed={seed}",
        polarsat::VERSION,
        std::env::args().skip(1).collect::<Vec<_>>()
    );
    match cli.command {
        Command::Gen { n, k, p, m, dimacs_out } => gen(n, k, p, m, seed, dimacs_out.as_deref(), format),
        Command::Solve {
            input,
            solver,
            solver_exit_codes,
        } => {
            let formula = read_formula(&input)?;
            let result = SolverChoice::from(solver).solve(&formula)?;
            print_sat(&result, format);
            Ok(match (solver_exit_codes, result.is_sat()) {
                (false, _) => ExitCode::SUCCESS,
                (true, true) => ExitCode::from(10),
                (true, false) => ExitCode::from(20),
            })
        }
        Command::Spine { input } => spine(&read_formula(&input)?, format),
        Command::Twosat { input, check, max_t } => twosat(&read_formula(&input)?, check, max_t, format),
        Command::Bounds { k, n, p, m } => bounds(k, n, p, m, format),
        Command::Sweep(args) => plan_command(PlanKind::Sweep, args, cli.seed, seed, format),
        Command::Threshold(args) => plan_command(PlanKind::Threshold, args, cli.seed, seed, format),
        Command::Spines(args) => plan_command(PlanKind::Spines, args, cli.seed, seed, format),
    }
}

fn read_formula(input: &Input) -> Result<Formula, Failure> {
    let text = match input.dimacs_in.as_deref() {
        Some(path) if path != Path::new("-") => fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(Error::from)?;
            s
        }
    };
    let (formula, _) = parse_dimacs(&text, None)?;
    info!("read formula n={} m={} k={}", formula.n(), formula.m(), formula.k());
    Ok(formula)
}

fn dimacs_literals(a: &Assignment) -> Vec<i64> {
    (1..=a.len() as u32)
        .map(|v| if a.value(v).is_pos() { v as i64 } else { -(v as i64) })
        .collect()
}

fn literal_list(ls: &[Literal]) -> Vec<i64> {
    ls.iter().map(|l| l.to_dimacs()).collect()
}

fn join(xs: impl IntoIterator<Item = impl ToString>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn gen(n: usize, k: usize, p: f64, m: usize, seed: u64, out: Option<&Path>, format: Format) -> Outcome {
    let formula = sample_formula(&ModelParams::new(n, k, p, m)?, seed)?;
    let meta = DimacsMeta {
        k: Some(k),
        p: Some(p),
        seed: Some(seed),
    };
    let text = to_dimacs_with_meta(&formula, &meta);
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        info!("wrote {}", path.display());
    }
    match format {
        Format::Json => {
            let clauses: Vec<Vec<i64>> = formula.clauses().iter().map(|c| literal_list(c.literals())).collect();
            out!(
                "{}",
                json!({ "n": n, "k": k, "p": p, "m": m, "seed": seed, "clauses": clauses })
            );
        }
        _ if out.is_none() => out_raw!("{text}"),
        _ => {}
    }
    Ok(ExitCode::SUCCESS)
}

fn print_sat(result: &SatResult, format: Format) {
    let status = if result.is_sat() { "SAT" } else { "UNSAT" };
    let witness = result.witness.as_ref().map(dimacs_literals);
    match format {
        Format::Json => out!("{}", json!({ "status": status, "witness": witness })),
        _ => {
            out!("{status}");
            if let Some(w) = witness {
                out!("v {} 0", join(w));
            }
        }
    }
}

fn spine(formula: &Formula, format: Format) -> Outcome {
    let report = spine_set(formula)?;
    match format {
        Format::Json => out!(
            "{}",
            json!({ "positive": report.positive, "negative": report.negative, "size": report.size() })
        ),
        _ => {
            out!("S+ {}", join(&report.positive));
            out!("S- {}", join(&report.negative));
            out!("S {}", report.size());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn twosat(formula: &Formula, check: Check, max_t: Option<usize>, format: Format) -> Outcome {
    let g = implication_digraph(formula)?;
    let max_t = max_t.unwrap_or(formula.n());
    let text = format != Format::Json;
    match check {
        Check::Sat => print_sat(&solve_2sat(formula)?, format),
        Check::Bicycle => match (has_bicycle(&g), text) {
            (Some(b), true) => out!("bicycle x{}: {}", b.variable, join(literal_list(&b.walk))),
            (None, true) => out!("no bicycle"),
            (b, false) => out!("{}", json!({ "bicycle": b })),
        },
        Check::Pretzel => match (find_pretzel(&g, max_t), text) {
            (Some(p), true) => out!(
                "pretzel t={}: {} -> {} -> {}",
                p.t(),
                p.head.to_dimacs(),
                join(literal_list(&p.interior)),
                p.tail.to_dimacs()
            ),
            (None, true) => out!("no pretzel with t <= {max_t}"),
            (p, false) => out!("{}", json!({ "max_t": max_t, "pretzel": p })),
        },
        Check::Unicycles => {
            let mut counts = vec![0u64; max_t + 1];
            let mut example = None;
            for_each_unicycle(&g, 1..=max_t, |u| {
                counts[u.t()] += 1;
                example.get_or_insert_with(|| u.clone());
                true
            })?;
            if text {
                out!("t count");
                for (t, c) in counts.iter().enumerate().skip(1) {
                    out!("{t} {c}");
                }
                if let Some(u) = &example {
                    out!("example x{}: {}", u.variable, join(literal_list(&u.cycle)));
                }
            } else {
                let rows: Vec<Value> = (1..=max_t).map(|t| json!({ "t": t, "count": counts[t] })).collect();
                out!("{}", json!({ "counts": rows, "example": example }));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds(k: usize, n: Option<usize>, p: Option<f64>, m: Option<usize>, format: Format) -> Outcome {
    let mut rows: Vec<(String, Option<f64>)> = vec![(format!("upper_density(k={k})"), Some(upper_density(k)?))];
    let mut doc = json!({ "k": k, "upper_density": upper_density(k)? });
    if let Some(n) = n {
        if n >= k {
            let d = distinct_tuple_probability_lb(k, n)?;
            rows.push((format!("distinct_tuple_lb_power(k={k},s={n})"), Some(d.power)));
            rows.push((format!("distinct_tuple_lb_linear(k={k},s={n})"), Some(d.linear)));
            doc["distinct_tuple_lb"] = json!(d);
        }
    }
    if let (Some(n), Some(m)) = (n, m) {
        match pretzel_probability_bound(n, m) {
            Ok(b) => {
                rows.push((format!("pretzel_bound_raw(n={n},m={m})"), Some(b.raw)));
                rows.push((format!("pretzel_bound_clamped(n={n},m={m})"), Some(b.clamped)));
                doc["pretzel_bound"] = json!(b);
            }
            Err(Error::Undefined(_)) => {
                rows.push((format!("pretzel_bound(n={n},m={m})"), None));
                doc["pretzel_bound"] = Value::Null;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let (Some(n), Some(p), Some(m)) = (n, p, m) {
        let plain = log2_expected_models(n, k, p, m)?;
        let slack = log2_expected_models_with_slack(n, k, p, m)?;
        let markov = slack.exp2().min(1.0);
        rows.push((format!("log2_expected_models(n={n},p={p},m={m})"), Some(plain)));
        rows.push((format!("log2_expected_models_with_slack(n={n},p={p},m={m})"), Some(slack)));
        rows.push(("markov_sat_bound".into(), Some(markov)));
        doc["log2_expected_models"] = json!(plain);
        doc["log2_expected_models_with_slack"] = json!(slack);
        doc["markov_sat_bound"] = json!(markov);
    }
    let shown = |v: Option<f64>| v.map_or("undefined".to_string(), |v| format!("{v:.6}"));
    match format {
        Format::Json => out!("{doc}"),
        Format::Csv => {
            out!("quantity,value");
            for (q, v) in rows {
                out!("{q},{}", shown(v));
            }
        }
        Format::Text => {
            let width = rows.iter().map(|(q, _)| q.len()).max().unwrap_or(0);
            out!("{:width$}  value", "quantity");
            for (q, v) in rows {
                out!("{q:width$}  {}", shown(v));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn plan_command(kind: PlanKind, args: PlanArgs, explicit_seed: Option<u64>, seed: u64, format: Format) -> Outcome {
    let mut plan = match &args.plan {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut plan = TrialPlan::from_toml(&text)?;
            if plan.kind != kind {
                return Err(Failure::Usage(format!(
                    "plan {} has kind {:?}, which does not match this subcommand",
                    path.display(),
                    plan.kind
                )));
            }
            if let Some(s) = explicit_seed {
                plan.seed = s;
            }
            plan
        }
        None => inline_plan(kind, &args, seed)?,
    };
    if let Some(solver) = args.solver {
        plan.solver = solver.into();
    }
    plan.validate()?;
    info!("plan {}", serde_json::to_string(&plan).expect("plans serialize"));
    let options = RunOptions {
        workers: args.workers,
        verbose: args.verbose,
    };
    let output = run_plan(&plan, &args.out, &options)?;
    info!("wrote {}", args.out.display());
    match format {
        Format::Json => out!("{}", output.body.to_json()),
        Format::Csv => out_raw!("{}", output.body.to_csv(Some(&output.seconds))),
        Format::Text => {
            let header: Vec<&str> = csv_header(kind).split(',').collect();
            let rows: Vec<Vec<String>> = output
                .body
                .records
                .iter()
                .zip(&output.seconds)
                .map(|(r, &s)| r.csv_row(s).split(',').map(str::to_string).collect())
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|j| rows.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            out!("{}", line(header.clone()));
            for r in &rows {
                out!("{}", line(r.iter().map(String::as_str).collect()));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn inline_plan(kind: PlanKind, args: &PlanArgs, seed: u64) -> Result<TrialPlan, Failure> {
    let missing = |flag: &str| Failure::Usage(format!("--{flag} is required without --plan"));
    let grid = |v: &[usize]| (!v.is_empty()).then(|| v.to_vec());
    let dgrid = |v: &[f64]| (!v.is_empty()).then(|| v.to_vec());
    if args.p_grid.is_empty() {
        return Err(missing("p-grid"));
    }
    Ok(TrialPlan {
        kind,
        n: args.n.ok_or_else(|| missing("n"))?,
        k: args.k.ok_or_else(|| missing("k"))?,
        p_grid: args.p_grid.clone(),
        m_grid: grid(&args.m_grid),
        density_grid: dgrid(&args.density_grid),
        trials: args.trials.ok_or_else(|| missing("trials"))?,
        seed,
        solver: SolverChoice::Auto,
    })
}
