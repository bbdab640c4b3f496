//! Command-line front end: witnesses, satisfiability, containment,
//! equivalence and batch corpus reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use schemawit_core::error::Error;
use schemawit_core::generate::Outcome;
use schemawit_core::json::{parse, to_canonical_string, JsonValue};
use schemawit_core::limits::{Deadline, Limits};
use schemawit_core::pattern::DEFAULT_MAX_STATES;
use schemawit_core::pipeline::{self, Containment, DumpStage, Equivalence, Options, Run};
use schemawit_core::reference::reference_validate;

const EXIT_ERROR: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "schemawit", version, about = "Witness generation and containment checking for JSON Schema")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Print the translated algebra to standard error.
    #[arg(long, global = true)]
    emit_algebra: bool,
    /// Print an intermediate form to standard error: not-eliminated,
    /// stratified, gdnf, canonical or prepared.
    #[arg(long, global = true, value_parser = parse_stage)]
    emit_stage: Vec<DumpStage>,
    /// Wall-clock budget per schema, in seconds.
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// State budget for every pattern automaton.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    max_automaton_states: usize,
    /// Accepted for compatibility; every run is deterministic.
    #[arg(long, global = true)]
    seed_less: bool,
    /// Leave timings out of reports so that they are byte-for-byte stable.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print a witness for a schema.
    Witness { schema: PathBuf },
    /// Print a satisfiability report for a schema.
    Sat { schema: PathBuf },
    /// Check whether every instance of the first schema satisfies the second.
    Contain { left: PathBuf, right: PathBuf },
    /// Check whether two schemas accept the same instances.
    Equiv { left: PathBuf, right: PathBuf },
    /// Report on every *.json schema of a directory.
    Corpus {
        dir: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn parse_stage(s: &str) -> Result<DumpStage, String> {
    DumpStage::parse(s).ok_or_else(|| {
        let names: Vec<&str> = DumpStage::ALL.iter().map(|d| d.name()).collect();
        format!("unknown stage `{s}`, expected one of {}", names.join(", "))
    })
}

const DEFAULT_TIMEOUT_SECS: f64 = 3600.0;
const CORPUS_TIMEOUT_SECS: f64 = 60.0;

impl Common {
    fn options(&self, default_timeout: f64) -> Options {
        let secs = self.timeout.unwrap_or(default_timeout);
        let limits = Limits {
            deadline: Deadline::after(Duration::from_secs_f64(secs)),
            max_states: self.max_automaton_states,
            ..Limits::default()
        };
        let mut dumps = self.emit_stage.clone();
        if self.emit_algebra {
            dumps.push(DumpStage::Algebra);
        }
        Options { limits, dumps }
    }
}

#[derive(Serialize, Clone, Copy)]
struct TimingsMs {
    translate: f64,
    normalize: f64,
    prepare: f64,
    generate: f64,
    total: f64,
}

#[derive(Serialize)]
struct RunReport {
    schema_path: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
    validated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<TimingsMs>,
    pass_count: usize,
    variables_created: usize,
    bottom_disjuncts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn to_serde(j: &JsonValue) -> serde_json::Value {
    serde_json::from_str(&to_canonical_string(j)).expect("canonical JSON is valid JSON")
}

fn read_schema(path: &Path) -> Result<JsonValue, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_dumps(runs: &[&Run]) {
    for run in runs {
        for (stage, text) in &run.dumps {
            eprintln!("== {} ==\n{text}", stage.name());
        }
    }
}

fn error_outcome(e: &Error) -> &'static str {
    match e {
        Error::Timeout => "timeout",
        _ => "error",
    }
}

fn exit_for_error(e: &Error) -> ExitCode {
    ExitCode::from(if matches!(e, Error::Timeout) { EXIT_TIMEOUT } else { EXIT_ERROR })
}

/// Runs the pipeline on one file and re-validates any witness against the
/// untranslated schema.
fn report_for(path: &Path, opts: &Options, with_timings: bool) -> (RunReport, Option<Run>) {
    let mut report = RunReport {
        schema_path: path.display().to_string(),
        outcome: "error",
        witness: None,
        validated: false,
        timings_ms: None,
        pass_count: 0,
        variables_created: 0,
        bottom_disjuncts: 0,
        error: None,
    };
    let schema = match read_schema(path) {
        Ok(s) => s,
        Err(e) => {
            report.error = Some(e);
            return (report, None);
        }
    };
    let run = match pipeline::witness(&schema, opts) {
        Ok(run) => run,
        Err(e) => {
            report.outcome = error_outcome(&e);
            report.error = Some(e.to_string());
            return (report, None);
        }
    };
    report.pass_count = run.passes;
    report.variables_created = run.variables_created;
    report.bottom_disjuncts = run.bottom_disjuncts;
    if with_timings {
        let t = run.timings;
        report.timings_ms = Some(TimingsMs {
            translate: ms(t.translate),
            normalize: ms(t.normalize),
            prepare: ms(t.prepare),
            generate: ms(t.generate),
            total: ms(t.total()),
        });
    }
    match &run.outcome {
        Outcome::Witness(j) => match reference_validate(&schema, j) {
            Ok(true) => {
                report.outcome = "witness";
                report.validated = true;
                report.witness = Some(to_serde(j));
            }
            Ok(false) => report.error = Some(format!("witness {} failed validation", to_canonical_string(j))),
            Err(e) => report.error = Some(e.to_string()),
        },
        Outcome::Unsatisfiable => report.outcome = "unsat",
    }
    (report, Some(run))
}

fn exit_for_report(r: &RunReport) -> ExitCode {
    ExitCode::from(match r.outcome {
        "witness" => 0,
        "unsat" => 1,
        "timeout" => EXIT_TIMEOUT,
        _ => EXIT_ERROR,
    })
}

fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn cmd_witness(path: &Path, common: &Common) -> ExitCode {
    let opts = common.options(DEFAULT_TIMEOUT_SECS);
    let (report, run) = report_for(path, &opts, !common.no_timings);
    if let Some(run) = &run {
        print_dumps(&[run]);
    }
    match (&report.witness, &report.error) {
        (Some(w), _) => println!("{}", serde_json::to_string(w).expect("witness serializes")),
        (None, Some(e)) => eprintln!("error: {e}"),
        (None, None) => eprintln!("unsatisfiable"),
    }
    exit_for_report(&report)
}

fn cmd_sat(path: &Path, common: &Common) -> ExitCode {
    let opts = common.options(DEFAULT_TIMEOUT_SECS);
    let (report, run) = report_for(path, &opts, !common.no_timings);
    if let Some(run) = &run {
        print_dumps(&[run]);
    }
    println!("{}", json_line(&report));
    exit_for_report(&report)
}

fn load_pair(left: &Path, right: &Path) -> Result<(JsonValue, JsonValue), String> {
    Ok((read_schema(left)?, read_schema(right)?))
}

fn cmd_contain(left: &Path, right: &Path, common: &Common) -> ExitCode {
    let opts = common.options(DEFAULT_TIMEOUT_SECS);
    let (s1, s2) = match load_pair(left, right) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match pipeline::check_containment(&s1, &s2, &opts) {
        Ok((verdict, run)) => {
            print_dumps(&[&run]);
            match verdict {
                Containment::Included => {
                    println!("INCLUDED");
                    ExitCode::SUCCESS
                }
                Containment::CounterExample(j) => {
                    println!("NOT INCLUDED");
                    println!("{}", to_canonical_string(&j));
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for_error(&e)
        }
    }
}

fn cmd_equiv(left: &Path, right: &Path, common: &Common) -> ExitCode {
    let opts = common.options(DEFAULT_TIMEOUT_SECS);
    let (s1, s2) = match load_pair(left, right) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match pipeline::check_equivalence(&s1, &s2, &opts) {
        Ok((verdict, runs)) => {
            print_dumps(&runs.iter().collect::<Vec<_>>());
            match verdict {
                Equivalence::Equivalent => {
                    println!("EQUIVALENT");
                    ExitCode::SUCCESS
                }
                Equivalence::Differ { left_not_in_right, counterexample } => {
                    let (a, b) = if left_not_in_right { (left, right) } else { (right, left) };
                    println!("NOT EQUIVALENT: {} is not included in {}", a.display(), b.display());
                    println!("{}", to_canonical_string(&counterexample));
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for_error(&e)
        }
    }
}

#[derive(Serialize)]
struct Summary {
    summary: bool,
    files: usize,
    witness: usize,
    unsat: usize,
    error: usize,
    timeout: usize,
    logical_errors: usize,
    success_pct: f64,
    failure_pct: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p95_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_ms: Option<f64>,
}

fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        (n as f64 * 10000.0 / d as f64).round() / 100.0
    }
}

fn summarize(reports: &[RunReport], with_timings: bool) -> Summary {
    let count = |o: &str| reports.iter().filter(|r| r.outcome == o).count();
    let files = reports.len();
    let (witness, unsat, error, timeout) = (count("witness"), count("unsat"), count("error"), count("timeout"));
    let logical_errors = reports.iter().filter(|r| r.outcome == "witness" && !r.validated).count();
    let mut times: Vec<f64> = reports.iter().filter_map(|r| r.timings_ms.map(|t| t.total)).collect();
    times.sort_by(f64::total_cmp);
    let pick = |q: f64| -> Option<f64> {
        if times.is_empty() {
            return None;
        }
        let i = ((times.len() - 1) as f64 * q).round() as usize;
        Some(times[i])
    };
    let avg = (!times.is_empty()).then(|| (times.iter().sum::<f64>() / times.len() as f64 * 1e3).round() / 1e3);
    Summary {
        summary: true,
        files,
        witness,
        unsat,
        error,
        timeout,
        logical_errors,
        success_pct: percent(witness + unsat, files),
        failure_pct: percent(error + timeout, files),
        median_ms: if with_timings { pick(0.5) } else { None },
        p95_ms: if with_timings { pick(0.95) } else { None },
        avg_ms: if with_timings { avg } else { None },
    }
}

fn cmd_corpus(dir: &Path, jobs: usize, common: &Common) -> ExitCode {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let opts = common.options(CORPUS_TIMEOUT_SECS);
    let with_timings = !common.no_timings;
    let run_one = |p: &PathBuf| {
        // A fresh deadline per schema.
        let opts = Options {
            limits: Limits { deadline: common.options(CORPUS_TIMEOUT_SECS).limits.deadline, ..opts.limits },
            ..opts.clone()
        };
        report_for(p, &opts, with_timings).0
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let reports: Vec<RunReport> = pool.install(|| files.par_iter().map(run_one).collect());
    for r in &reports {
        println!("{}", json_line(r));
    }
    let summary = summarize(&reports, with_timings);
    println!("{}", json_line(&summary));
    eprintln!(
        "{} schemas: {} witness, {} unsat, {} error, {} timeout; success {}%",
        summary.files, summary.witness, summary.unsat, summary.error, summary.timeout, summary.success_pct
    );
    if summary.error + summary.timeout > 0 {
        ExitCode::from(EXIT_ERROR)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let common = &cli.common;
    match &cli.command {
        Command::Witness { schema } => cmd_witness(schema, common),
        Command::Sat { schema } => cmd_sat(schema, common),
        Command::Contain { left, right } => cmd_contain(left, right, common),
        Command::Equiv { left, right } => cmd_equiv(left, right, common),
        Command::Corpus { dir, jobs } => cmd_corpus(dir, *jobs, common),
    }
}
