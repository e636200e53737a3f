//! Command-line front end: `plan`, `validate` and `adequacy`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use tep_core::cost::to_musd;
use tep_core::network::LineStatus;
use tep_core::planner::{AdequacyAssessment, LineOutcome};
use tep_core::{
    load_case, read_case, Chromosome, ContingencyMode, EvalConfig, Evaluator, GaConfig, NetworkCase, PlanResult,
    SamplerConfig, SizingConfig, UpgradePolicy,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Case(tep_core::Error),
    #[error(transparent)]
    Runtime(tep_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl CliError {
    /// 1 for bad input (case file or flags), 2 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Case(_) => 1,
            CliError::Runtime(_) | CliError::Io { .. } | CliError::Csv { .. } => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "tep", version, about = "Probabilistic transmission expansion planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for the cheapest line selection and write plan.json, report.csv, history.csv.
    Plan(PlanArgs),
    /// Check a case file and print every invariant.
    Validate {
        /// Case file (JSON).
        case: PathBuf,
    },
    /// Adequacy of one fixed network, without sizing or search.
    Adequacy(AdequacyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub case: PathBuf,
    #[arg(long, default_value = "mcs")]
    pub mode: ContingencyMode,
    #[arg(long, default_value = "wel")]
    pub policy: UpgradePolicy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Retained Monte Carlo samples per month.
    #[arg(long, default_value_t = 1000)]
    pub mcs_iters: usize,
    #[arg(long, default_value_t = 20)]
    pub generations: usize,
    #[arg(long, default_value_t = 10)]
    pub pop_size: usize,
    /// Capacity step per wheel hit, MW.
    #[arg(long, default_value_t = 5.0)]
    pub delta_f: f64,
    #[arg(long, default_value_t = 0.1)]
    pub congestion_threshold: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_resamples: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl PlanArgs {
    /// Flags with the given case and output directory, defaults elsewhere.
    pub fn new(case: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        let Command::Plan(mut a) = Cli::parse_from(["tep", "plan", "--case", "case.json"]).command else {
            unreachable!("parsed a plan command")
        };
        a.case = case.into();
        a.out = out.into();
        a
    }

    fn check(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.pop_size < 2 {
            return bad(format!("--pop-size must be at least 2, got {}", self.pop_size));
        }
        if self.mode == ContingencyMode::Mcs && self.mcs_iters == 0 {
            return bad("--mcs-iters must be at least 1".into());
        }
        if !(self.delta_f > 0.0 && self.delta_f.is_finite()) {
            return bad(format!("--delta-f must be positive, got {}", self.delta_f));
        }
        if !(0.0..1.0).contains(&self.congestion_threshold) {
            return bad(format!("--congestion-threshold must lie in [0, 1), got {}", self.congestion_threshold));
        }
        if self.max_resamples == 0 {
            return bad("--max-resamples must be at least 1".into());
        }
        Ok(())
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            sampler: SamplerConfig {
                mode: self.mode,
                n_mcs: self.mcs_iters,
                seed: self.seed,
                max_resamples: self.max_resamples,
            },
            policy: self.policy,
            sizing: SizingConfig {
                delta_f: self.delta_f,
                congestion_threshold: self.congestion_threshold,
                max_iterations: self.max_iterations,
            },
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            population_size: self.pop_size,
            generations: self.generations,
            seed: self.seed,
            ..GaConfig::default()
        }
    }
}

/// Everything needed to rerun a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub case_path: PathBuf,
    pub mode: ContingencyMode,
    pub policy: UpgradePolicy,
    pub seed: u64,
    pub ga: GaConfig,
    pub eval: EvalConfig,
    pub tool_version: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub manifest: RunManifest,
    pub result: PlanResult,
}

fn load(path: &Path) -> CliResult<NetworkCase> {
    load_case(path).map_err(CliError::Case)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the planner and writes the three artifacts into `args.out`.
pub fn cmd_plan(args: &PlanArgs) -> CliResult<PlanFile> {
    args.check()?;
    let case = load(&args.case)?;
    let started = Instant::now();
    let (ga, eval) = (args.ga_config(), args.eval_config());
    let result = tep_core::planner::run(&case, &ga, &eval).map_err(CliError::Runtime)?;
    let plan = PlanFile {
        manifest: RunManifest {
            case_path: args.case.clone(),
            mode: args.mode,
            policy: args.policy,
            seed: args.seed,
            ga,
            eval,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
        },
        result,
    };

    create_dir(&args.out)?;
    let json = serde_json::to_string_pretty(&plan).expect("plan serializes");
    write_file(&args.out.join("plan.json"), &json)?;
    write_report(&args.out.join("report.csv"), &case, &plan.result)?;
    write_history(&args.out.join("history.csv"), &plan.result)?;
    Ok(plan)
}

fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "inf".into()
    }
}

/// One row per case line in file order, then the summary rows.
pub fn report_rows(case: &NetworkCase, result: &PlanResult) -> Vec<[String; 6]> {
    let best = &result.best;
    let mut rows = Vec::new();
    for spec in &case.lines {
        let built: Option<&LineOutcome> = best.lines.iter().find(|l| l.id == spec.id);
        let existing = match spec.status {
            LineStatus::Existing => spec.base_capacity_mw.to_string(),
            LineStatus::Candidate => String::new(),
        };
        rows.push([
            format!("TL {}", spec.id),
            spec.length_km.to_string(),
            format!("{}-{}", spec.from_bus, spec.to_bus),
            existing,
            built.map_or("-".into(), |l| l.capacity_mw.to_string()),
            built.map_or(String::new(), |l| l.congestion_probability.to_string()),
        ]);
    }
    let summary_row = |name: &str, v: String| [name.to_string(), String::new(), String::new(), String::new(), v, String::new()];
    match (&best.breakdown, &best.expectations) {
        (Some(b), Some(e)) => {
            rows.push(summary_row("EDNS (MW)", fmt_value(e.edns_mean())));
            rows.push(summary_row("EGNS (MW)", fmt_value(e.egns_mean())));
            rows.push(summary_row("EWL (MW)", fmt_value(e.ewl_mean())));
            rows.push(summary_row("T_inv (M$)", fmt_value(to_musd(b.t_inv))));
            rows.push(summary_row("EC (M$)", fmt_value(to_musd(b.ec))));
            rows.push(summary_row("G_inv (M$)", fmt_value(to_musd(b.g_inv))));
            rows.push(summary_row("J (M$)", fmt_value(to_musd(b.j))));
        }
        _ => rows.push(summary_row("J (M$)", "inf".into())),
    }
    rows
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_report(path: &Path, case: &NetworkCase, result: &PlanResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    let column = format!("{}_{}_mw", result.mode, result.policy);
    w.write_record(["row", "length_km", "buses", "existing_mw", column.as_str(), "p_con"])
        .map_err(csv_error(path))?;
    for row in report_rows(case, result) {
        w.write_record(&row).map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_history(path: &Path, result: &PlanResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    w.write_record(["generation", "best_j_musd", "feasible", "evaluations"])
        .map_err(csv_error(path))?;
    for h in &result.history {
        w.write_record([
            h.generation.to_string(),
            h.best_j.map_or("inf".into(), |j| to_musd(j).to_string()),
            h.feasible.to_string(),
            h.evaluations.to_string(),
        ])
        .map_err(csv_error(path))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Prints one line per invariant; fails if the file cannot be read or any
/// invariant is violated.
pub fn cmd_validate(path: &Path, out: &mut impl Write) -> CliResult<()> {
    let case = read_case(path).map_err(CliError::Case)?;
    let mut failed = None;
    for check in case.invariant_checks() {
        let line = match &check.failure {
            None => format!("PASS  {}", check.name),
            Some((field, message)) => {
                failed.get_or_insert_with(|| format!("{field}: {message}"));
                format!("FAIL  {}  [{field}] {message}", check.name)
            }
        };
        writeln!(out, "{line}").map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?;
    }
    match failed {
        Some(m) => Err(CliError::Validation(m)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct AdequacyArgs {
    #[arg(long)]
    pub case: PathBuf,
    /// plan.json whose best chromosome and sized capacities are assessed.
    #[arg(long, conflicts_with = "chromosome")]
    pub plan: Option<PathBuf>,
    /// Candidate selection as a 0/1 string; all candidates when omitted.
    #[arg(long)]
    pub chromosome: Option<String>,
    #[arg(long, default_value = "mcs")]
    pub mode: ContingencyMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub mcs_iters: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_resamples: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_adequacy(args: &AdequacyArgs) -> CliResult<AdequacyAssessment> {
    let case = load(&args.case)?;
    let (chromosome, capacities) = match (&args.plan, &args.chromosome) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let plan: PlanFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            let best = plan.result.best;
            let caps: Vec<f64> = best.lines.iter().map(|l| l.capacity_mw).collect();
            (best.chromosome, Some(caps))
        }
        (None, Some(bits)) => {
            let c: Chromosome = bits
                .parse()
                .map_err(|e: String| CliError::Validation(e))?;
            (c, None)
        }
        (None, None) => (Chromosome::ones(case.candidate_count()), None),
    };
    if chromosome.len() != case.candidate_count() {
        return Err(CliError::Validation(format!(
            "chromosome has {} bits, case has {} candidate lines",
            chromosome.len(),
            case.candidate_count()
        )));
    }
    let config = EvalConfig {
        sampler: SamplerConfig {
            mode: args.mode,
            n_mcs: args.mcs_iters,
            seed: args.seed,
            max_resamples: args.max_resamples,
        },
        ..EvalConfig::default()
    };
    let evaluator = Evaluator::new(&case, config).map_err(|e| CliError::Validation(e.to_string()))?;
    evaluator
        .assess(&chromosome, capacities.as_deref())
        .map_err(CliError::Runtime)
}

/// Dispatches a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Plan(args) => cmd_plan(&args).map(|plan| {
            let b = &plan.result.best;
            println!(
                "best {}  J = {} M$  ({} chromosomes evaluated) -> {}",
                b.chromosome,
                fmt_value(to_musd(b.j())),
                plan.result.evaluations,
                args.out.display()
            );
        }),
        Command::Validate { case } => cmd_validate(&case, &mut std::io::stdout()),
        Command::Adequacy(args) => cmd_adequacy(&args).and_then(|report| {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match &args.out {
                Some(path) => write_file(path, &json),
                None => {
                    println!("{json}");
                    Ok(())
                }
            }
        }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
