//! Command-line front end: `synth` and `check`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dnc::{synthesize_dnc, DncConfig};
use crate::enumerate::{synthesize, Outcome, SynthConfig, SynthesisResult};
use crate::formula::{Formula, OpSet};
use crate::oracle;
use crate::trace::{parse_specification, Specification};

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ltlf-synth", version, about = "Minimum-cost LTLf formula synthesis from example traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Enumerate,
    Dnc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a separating formula.
    Synth(SynthArgs),
    /// Check a formula against a specification.
    Check(CheckArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "enumerate")]
    pub mode: Mode,
    /// Comma-separated subset of not,and,or,next,future,until.
    #[arg(long, default_value = "not,and,next,future,until")]
    pub ops: String,
    #[arg(long, default_value_t = 20)]
    pub max_cost: usize,
    #[arg(long, default_value_t = 300.0)]
    pub time_budget_s: f64,
    #[arg(long, default_value_t = 8192)]
    pub memory_budget_mb: u64,
    #[arg(long, default_value_t = 1 << 16)]
    pub batch_size: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Traces per directly solved sub-specification in dnc mode.
    #[arg(long, default_value_t = 8)]
    pub threshold: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub formula: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_cost: usize,
    pub time_budget_s: f64,
    pub memory_budget_mb: u64,
    pub batch_size: usize,
}

/// Machine-readable outcome of `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub formula: Option<String>,
    pub cost: Option<usize>,
    pub minimal: bool,
    pub constructed: u64,
    pub unique: usize,
    pub elapsed_ms: u64,
    pub mode: Mode,
    pub operator_set: Vec<String>,
    pub budgets: Budgets,
    /// `found` or `budget exhausted`.
    pub outcome: String,
    /// Which budget ran out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<String>,
    /// Sub-specification that failed in dnc mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_leaf: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.formula.is_some() {
            EXIT_FOUND
        } else {
            EXIT_EXHAUSTED
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match &self.formula {
            Some(f) => s.push_str(&format!("formula: {f}\n")),
            None => s.push_str("formula: none\n"),
        }
        if let Some(c) = self.cost {
            s.push_str(&format!("cost: {c}\n"));
        }
        s.push_str(&format!("minimal: {}\n", self.minimal));
        s.push_str(&format!("constructed: {}\n", self.constructed));
        s.push_str(&format!("unique: {}\n", self.unique));
        s.push_str(&format!("elapsed_ms: {}\n", self.elapsed_ms));
        s.push_str(&format!("outcome: {}", self.outcome));
        if let Some(e) = &self.exhausted {
            s.push_str(&format!(" ({e})"));
        }
        if let Some(l) = &self.failed_leaf {
            s.push_str(&format!(" at leaf {l}"));
        }
        s.push('\n');
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: crate::SpecError },
    #[error("formula: {0}")]
    Formula(#[from] crate::FormulaError),
    #[error("{0}")]
    Usage(String),
}

fn load(path: &PathBuf) -> Result<Specification, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.clone(), source })?;
    parse_specification(&text).map_err(|source| CliError::Spec { path: path.clone(), source })
}

impl SynthArgs {
    pub fn config(&self) -> Result<SynthConfig, CliError> {
        let ops = OpSet::parse(&self.ops).map_err(CliError::Usage)?;
        if ops == OpSet::EMPTY && self.max_cost > 1 {
            return Err(CliError::Usage("--ops selects no operators".into()));
        }
        if self.max_cost == 0 {
            return Err(CliError::Usage("--max-cost must be positive".into()));
        }
        if !(self.time_budget_s > 0.0 && self.time_budget_s.is_finite()) {
            return Err(CliError::Usage("--time-budget-s must be positive".into()));
        }
        if self.memory_budget_mb == 0 || self.batch_size == 0 {
            return Err(CliError::Usage("budgets must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        Ok(SynthConfig {
            ops,
            max_cost: self.max_cost,
            time_budget: Some(Duration::from_secs_f64(self.time_budget_s)),
            memory_budget: (self.memory_budget_mb as usize).saturating_mul(1 << 20),
            batch_size: self.batch_size,
            threads: self.threads.unwrap_or(0),
            ..SynthConfig::default()
        })
    }

    fn budgets(&self) -> Budgets {
        Budgets {
            max_cost: self.max_cost,
            time_budget_s: self.time_budget_s,
            memory_budget_mb: self.memory_budget_mb,
            batch_size: self.batch_size,
        }
    }
}

/// Runs `synth` and builds its report.
pub fn synth_report(args: &SynthArgs) -> Result<Report, CliError> {
    let spec = load(&args.input)?;
    let config = args.config()?;
    let (result, failed_leaf) = match args.mode {
        Mode::Enumerate => (synthesize(&spec, &config), None),
        Mode::Dnc => {
            if args.threshold == 0 {
                return Err(CliError::Usage("--threshold must be positive".into()));
            }
            match synthesize_dnc(&spec, &DncConfig { threshold: args.threshold, leaf: config.clone() })
            {
                Ok(r) => (r, None),
                Err(fail) => (
                    SynthesisResult { formula: None, cost: None, stats: fail.stats.clone() },
                    Some(if fail.leaf.is_empty() { "root".to_string() } else { fail.leaf }),
                ),
            }
        }
    };
    let outcome = result.stats.outcome;
    Ok(Report {
        formula: result.formula.as_ref().map(|f| f.to_text(spec.alphabet())),
        cost: result.cost,
        minimal: result.stats.minimal,
        constructed: result.stats.constructed,
        unique: result.stats.unique,
        elapsed_ms: result.stats.elapsed.as_millis() as u64,
        mode: args.mode,
        operator_set: config.ops.names().into_iter().map(String::from).collect(),
        budgets: args.budgets(),
        outcome: if outcome == Outcome::Found { "found" } else { "budget exhausted" }.to_string(),
        exhausted: (outcome != Outcome::Found).then(|| outcome.describe().to_string()),
        failed_leaf,
    })
}

/// Per-trace verdicts of `check`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub formula: String,
    pub traces: Vec<TraceVerdict>,
    pub separates: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceVerdict {
    /// `P1`, `P2`, ... for positives and `N1`, ... for negatives, in file order.
    pub trace: String,
    pub expected: bool,
    pub holds: bool,
}

fn trace_label(spec: &Specification, t: usize) -> String {
    if spec.is_positive(t) {
        format!("P{}", t + 1)
    } else {
        format!("N{}", t - spec.positives().len() + 1)
    }
}

pub fn check_report(args: &CheckArgs) -> Result<CheckReport, CliError> {
    let spec = load(&args.input)?;
    let formula = Formula::parse(&args.formula, spec.alphabet())?;
    let traces: Vec<TraceVerdict> = spec
        .traces()
        .iter()
        .enumerate()
        .map(|(t, tr)| TraceVerdict {
            trace: trace_label(&spec, t),
            expected: spec.is_positive(t),
            holds: oracle::holds(tr, 0, &formula),
        })
        .collect();
    let violations: Vec<String> =
        traces.iter().filter(|v| v.holds != v.expected).map(|v| v.trace.clone()).collect();
    Ok(CheckReport {
        formula: formula.to_text(spec.alphabet()),
        separates: violations.is_empty(),
        traces,
        violations,
    })
}

impl CheckReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("formula: {}\n", self.formula);
        for v in &self.traces {
            let verdict = if v.holds { "accepts" } else { "rejects" };
            let mark = if v.holds == v.expected { "ok" } else { "VIOLATION" };
            s.push_str(&format!("{}: {verdict} ({mark})\n", v.trace));
        }
        if self.separates {
            s.push_str("separates: yes\n");
        } else {
            s.push_str(&format!("separates: no (violated by {})\n", self.violations.join(", ")));
        }
        s
    }
}

/// Parses `args` and runs the chosen subcommand, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_FOUND };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Synth(args) => synth_report(args).map(|report| {
            let text = match args.format {
                Format::Text => report.to_text(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
            };
            (text, report.exit_code())
        }),
        Command::Check(args) => check_report(args).map(|report| {
            let text = match args.format {
                Format::Text => report.to_text(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serialises") + "\n",
            };
            (text, if report.separates { EXIT_FOUND } else { EXIT_ERROR })
        }),
    };
    match result {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
