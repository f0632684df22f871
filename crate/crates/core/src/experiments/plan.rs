//! Plan files and the plan runner.
//!
//! A plan is a TOML document:
//!
//! ```toml
//! kind = "sweep"          # sweep | threshold | spines
//! n = 200
//! k = 3
//! p_grid = [0.0, 0.5]
//! m_grid = [850]          # or density_grid = [4.0, 4.25]; m = ceil(d·n)
//! trials = 2000
//! seed = 42
//! solver = "auto"         # auto | two_sat | exact
//! ```
//!
//! Results go to a CSV file (one row per point, preceded by `#` lines with the
//! version and the plan) and, when verbose, to a JSON file holding the same
//! body plus per-trial detail. Completed units are appended to
//! `<out>.partial.jsonl` as they finish; rerunning the same plan against the
//! same output path resumes after the last completed unit.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    check_capacity, estimate_breakpoints, monotonicity_sweep, point_seed, spine_moment_detailed,
    BreakpointRecord, EstimateRecord, SolverChoice, SpineMomentRecord, MAX_EXACT_N, MAX_SPINE_N,
};
use crate::error::{Error, Result};
use crate::generator::{validate_p, validate_shape, ModelParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    /// `P̂` over `m_grid × p_grid`, coupled across `p`.
    #[default]
    Sweep,
    /// Median breakpoint density per `p`.
    Threshold,
    /// Spine moments over `m_grid × p_grid`.
    Spines,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialPlan {
    #[serde(default)]
    pub kind: PlanKind,
    pub n: usize,
    pub k: usize,
    pub p_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_grid: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverChoice,
}

impl TrialPlan {
    pub fn from_toml(text: &str) -> Result<TrialPlan> {
        let plan: TrialPlan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plans serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::BadParams(msg) | Error::Unsupported(msg) => Error::Config(msg),
            other => other,
        };
        validate_shape(self.n, self.k).map_err(cfg)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.p_grid.is_empty() {
            return Err(Error::Config("p_grid is empty".into()));
        }
        for &p in &self.p_grid {
            validate_p(p).map_err(cfg)?;
        }
        let solver = self.solver.resolve(self.k)?;
        match self.kind {
            PlanKind::Sweep => {
                if self.p_grid.iter().any(|&p| p > 0.5) || self.p_grid.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::Config("sweep p_grid must be sorted within [0, 1/2]".into()));
                }
                self.m_values()?;
                check_capacity(self.n, self.k, solver, MAX_EXACT_N).map_err(cfg)?;
            }
            PlanKind::Threshold => {
                check_capacity(self.n, self.k, solver, MAX_EXACT_N).map_err(cfg)?;
            }
            PlanKind::Spines => {
                self.m_values()?;
                check_capacity(self.n, self.k, SolverChoice::Exact, MAX_SPINE_N).map_err(cfg)?;
            }
        }
        Ok(())
    }

    /// Clause counts from `m_grid`, or `ceil(d·n)` for each `d` in `density_grid`.
    pub fn m_values(&self) -> Result<Vec<usize>> {
        let ms = match (&self.m_grid, &self.density_grid) {
            (Some(ms), None) => ms.clone(),
            (None, Some(ds)) => {
                if ds.iter().any(|d| !d.is_finite() || *d < 0.0) {
                    return Err(Error::Config("densities must be finite and non-negative".into()));
                }
                ds.iter().map(|d| (d * self.n as f64).ceil() as usize).collect()
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config("give m_grid or density_grid, not both".into()))
            }
            (None, None) => return Err(Error::Config("missing m_grid or density_grid".into())),
        };
        if ms.is_empty() {
            return Err(Error::Config("clause-count grid is empty".into()));
        }
        Ok(ms)
    }

    fn unit_count(&self) -> usize {
        match self.kind {
            PlanKind::Sweep => self.m_values().map_or(0, |m| m.len()),
            PlanKind::Threshold => self.p_grid.len(),
            PlanKind::Spines => self.m_values().map_or(0, |m| m.len()) * self.p_grid.len(),
        }
    }
}

/// One row of results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PointRecord {
    Estimate {
        #[serde(flatten)]
        record: EstimateRecord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outcomes: Option<Vec<bool>>,
    },
    Breakpoints {
        #[serde(flatten)]
        record: BreakpointRecord,
    },
    Spines {
        #[serde(flatten)]
        record: SpineMomentRecord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spine_counts: Option<Vec<Option<usize>>>,
    },
}

impl PointRecord {
    pub fn csv_row(&self, seconds: f64) -> String {
        match self {
            PointRecord::Estimate { record: r, .. } => format!(
                "{},{},{},{},{},{},{},{},{},{:.3}",
                r.n, r.k, r.p, r.m, r.trials, r.sat_count, r.p_hat, r.ci_lo, r.ci_hi, seconds
            ),
            PointRecord::Breakpoints { record: r } => format!(
                "{},{},{},{},{},{},{},{:.3}",
                r.n,
                r.k,
                r.p,
                r.trials,
                r.median_density,
                r.breakpoints.iter().min().copied().unwrap_or(0),
                r.breakpoints.iter().max().copied().unwrap_or(0),
                seconds
            ),
            PointRecord::Spines { record: r, .. } => format!(
                "{},{},{},{},{},{},{},{},{},{:.3}",
                r.n,
                r.k,
                r.p,
                r.m,
                r.trials,
                r.sat_trials,
                r.mean_s,
                r.mean_s_pow_k_minus_1,
                r.m_hat,
                seconds
            ),
        }
    }
}

pub fn csv_header(kind: PlanKind) -> &'static str {
    match kind {
        PlanKind::Sweep => "n,k,p,m,trials,sat_count,p_hat,ci_lo,ci_hi,seconds",
        PlanKind::Threshold => "n,k,p,trials,median_density,min_breakpoint,max_breakpoint,seconds",
        PlanKind::Spines => "n,k,p,m,trials,sat_trials,mean_s,mean_s_pow_k_minus_1,m_hat,seconds",
    }
}

/// The deterministic part of a run: identical for identical plans regardless
/// of worker count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsBody {
    pub version: String,
    pub plan: TrialPlan,
    pub records: Vec<PointRecord>,
}

impl ResultsBody {
    /// Canonical JSON; identical bytes for identical plans and seeds.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("results serialize")
    }

    /// CSV text; with `seconds = None` the timing column is written as 0.
    pub fn to_csv(&self, seconds: Option<&[f64]>) -> String {
        let mut out = format!(
            "# polarsat {}\n# plan {}\n{}\n",
            self.version,
            serde_json::to_string(&self.plan).expect("plans serialize"),
            csv_header(self.plan.kind)
        );
        for (i, r) in self.records.iter().enumerate() {
            let s = seconds.and_then(|s| s.get(i).copied()).unwrap_or(0.0);
            out.push_str(&r.csv_row(s));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub body: ResultsBody,
    /// Wall time per record, in the order of `body.records`.
    pub seconds: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Keep per-trial detail and write `<out>.json`.
    pub verbose: bool,
}

#[derive(Serialize, Deserialize)]
struct PartialUnit {
    records: Vec<PointRecord>,
    seconds: Vec<f64>,
}

fn partial_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".partial.jsonl");
    out.with_file_name(name)
}

fn plan_fingerprint(plan: &TrialPlan, verbose: bool) -> String {
    serde_json::json!({ "version": crate::VERSION, "plan": plan, "verbose": verbose }).to_string()
}

/// Completed units from an earlier interrupted run of the same plan.
fn load_partial(path: &Path, fingerprint: &str) -> Result<Vec<PartialUnit>> {
    let Ok(file) = File::open(path) else {
        return Ok(Vec::new());
    };
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(first)) if first == fingerprint => {}
        _ => return Ok(Vec::new()),
    }
    let mut units = Vec::new();
    for line in lines {
        let Ok(line) = line else { break };
        // a torn final line is dropped and recomputed
        match serde_json::from_str::<PartialUnit>(&line) {
            Ok(u) => units.push(u),
            Err(_) => break,
        }
    }
    Ok(units)
}

fn run_unit(plan: &TrialPlan, unit: usize, verbose: bool) -> Result<PartialUnit> {
    let (n, k, master) = (plan.n, plan.k, plan.seed);
    match plan.kind {
        PlanKind::Sweep => {
            let m = plan.m_values()?[unit];
            let sweep = monotonicity_sweep(
                n,
                k,
                m,
                &plan.p_grid,
                plan.trials,
                point_seed(master, unit as u64),
                plan.solver,
            )?;
            let seconds = sweep.records.iter().map(|r| r.seconds).collect();
            let records = sweep
                .records
                .into_iter()
                .enumerate()
                .map(|(j, record)| PointRecord::Estimate {
                    record,
                    outcomes: verbose.then(|| sweep.outcomes.iter().map(|o| o[j]).collect()),
                })
                .collect();
            Ok(PartialUnit { records, seconds })
        }
        PlanKind::Threshold => {
            let p = plan.p_grid[unit];
            let record = estimate_breakpoints(n, k, p, plan.trials, point_seed(master, 0), plan.solver)?;
            Ok(PartialUnit {
                seconds: vec![record.seconds],
                records: vec![PointRecord::Breakpoints { record }],
            })
        }
        PlanKind::Spines => {
            let ms = plan.m_values()?;
            let (mi, pi) = (unit / plan.p_grid.len(), unit % plan.p_grid.len());
            let params = ModelParams::new(n, k, plan.p_grid[pi], ms[mi])?;
            let (record, counts) =
                spine_moment_detailed(&params, plan.trials, point_seed(master, mi as u64))?;
            Ok(PartialUnit {
                seconds: vec![record.seconds],
                records: vec![PointRecord::Spines {
                    record,
                    spine_counts: verbose.then_some(counts),
                }],
            })
        }
    }
}

/// Runs every point of `plan`, writing CSV to `out` (and JSON when verbose).
pub fn run_plan(plan: &TrialPlan, out: &Path, options: &RunOptions) -> Result<RunOutput> {
    plan.validate()?;
    match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| run_plan_inner(plan, out, options.verbose))
        }
        None => run_plan_inner(plan, out, options.verbose),
    }
}

fn run_plan_inner(plan: &TrialPlan, out: &Path, verbose: bool) -> Result<RunOutput> {
    let partial = partial_path(out);
    let fingerprint = plan_fingerprint(plan, verbose);
    let done = load_partial(&partial, &fingerprint)?;
    let cursor = done.len();

    // rewrite the progress file so a torn tail never survives
    let mut progress = File::create(&partial)?;
    writeln!(progress, "{fingerprint}")?;
    for u in &done {
        writeln!(progress, "{}", serde_json::to_string(u).expect("records serialize"))?;
    }
    progress.flush()?;
    let mut progress = OpenOptions::new().append(true).open(&partial)?;

    let mut units = done;
    for unit in cursor..plan.unit_count() {
        let result = run_unit(plan, unit, verbose)?;
        writeln!(progress, "{}", serde_json::to_string(&result).expect("records serialize"))
            .and_then(|_| progress.flush())
            .map_err(|e| Error::Io(format!("{e} (resume cursor: unit {unit})")))?;
        units.push(result);
    }

    let mut records = Vec::new();
    let mut seconds = Vec::new();
    for u in units {
        records.extend(u.records);
        seconds.extend(u.seconds);
    }
    let output = RunOutput {
        body: ResultsBody {
            version: crate::VERSION.to_string(),
            plan: plan.clone(),
            records,
        },
        seconds,
    };
    fs::write(out, output.body.to_csv(Some(&output.seconds)))?;
    if verbose {
        let json = serde_json::to_string_pretty(&output).expect("results serialize");
        fs::write(out.with_extension("json"), json)?;
    }
    fs::remove_file(&partial)?;
    Ok(output)
}
