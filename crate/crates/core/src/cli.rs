// Copyright 2026 The qsearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `qsearch` command line.
//!
//! Exit codes: 0 success, 1 invariant violation or I/O failure, 2 usage
//! error. Every command accepts `--seed` (default 0); commands without
//! randomness ignore it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adversary::{phased_schedule, random_schedule, search, AdversaryConfig};
use crate::bounds::{self, audit_trace, component_gap, lemma_worst_pair, phase_align, BOUND_TOL};
use crate::ensemble::{run_schedule_with, Fault, SimConfig, SpreadTrace, DEFAULT_MAX_DIM};
use crate::grover::{grover_schedule, grover_spread_exact, success_probability};
use crate::report::{grover_csv, ser_sig12, to_json_line, trace_csv};
use crate::selfcheck::{run_selfcheck, SelfcheckConfig};
use crate::state::{stream_rng, uniform_state, StateVector};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qsearch",
    version,
    about = "Ensemble spread simulation and query lower-bound checks for quantum search"
)]
pub struct RunConfig {
    /// Seed for every random stream
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Largest N simulated as a full N+1 trajectory ensemble
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleKind {
    Grover,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    ReferenceQuery,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grover run: success probability, spread and bounds per query
    Grover {
        /// Search space size N
        #[arg(long)]
        n: usize,
        /// Number of oracle queries
        #[arg(long)]
        steps: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spread trace of a Grover or Haar-random schedule
    Ensemble {
        /// Search space size N
        #[arg(long)]
        n: usize,
        /// Number of oracle queries
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "grover")]
        schedule: ScheduleKind,
        /// Add one deviation column per trajectory
        #[arg(long)]
        per_alpha: bool,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolvability threshold and minimum query counts for N
    Bounds {
        /// Search space size N
        #[arg(long)]
        n: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill-climbing search for the fastest-spreading phased schedule
    Adversary {
        /// Search space size N
        #[arg(long)]
        n: usize,
        /// Number of oracle queries
        #[arg(long)]
        steps: usize,
        /// Independent hill-climbing restarts
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Winning trace CSV; defaults to `<out>.trace.csv` when `--out` is set
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Refuse N above this
        #[arg(long, default_value_t = 64)]
        max_n: usize,
        /// Refuse more queries than this
        #[arg(long, default_value_t = 32)]
        max_steps: usize,
    },
    /// Randomized search for component-gap lemma violations
    Lemma {
        /// Random vector pairs to test
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every invariant suite at small sizes
    Selfcheck {
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

/// Why a command stopped; maps onto the exit codes.
#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Invariant(String),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_)
            | Error::NotUnitary { .. }
            | Error::NotNormalized { .. } => CommandError::Invariant(e.to_string()),
            _ => CommandError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Invariant(format!("i/o error: {e}"))
    }
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => EXIT_USAGE,
            CommandError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

pub type CmdResult = std::result::Result<i32, CommandError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&config, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = match &e {
                CommandError::Usage(msg) => writeln!(stderr, "error: {msg}"),
                CommandError::Invariant(msg) => writeln!(stderr, "invariant violation: {msg}"),
            };
            e.exit_code()
        }
    }
}

fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let sim = SimConfig {
        max_dim: config.max_dim,
        ..SimConfig::default()
    };
    match &config.command {
        Command::Grover { n, steps, out } => cmd_grover(*n, *steps, out.as_deref(), sim, stdout),
        Command::Ensemble {
            n,
            steps,
            schedule,
            per_alpha,
            out,
        } => cmd_ensemble(
            *n,
            *steps,
            *schedule,
            config.seed,
            *per_alpha,
            out.as_deref(),
            sim,
            stdout,
        ),
        Command::Bounds { n, out } => cmd_bounds(*n, out.as_deref(), stdout),
        Command::Adversary {
            n,
            steps,
            restarts,
            out,
            trace_out,
            max_n,
            max_steps,
        } => {
            let caps = AdversaryConfig {
                max_dim: *max_n,
                max_steps: *max_steps,
                ..AdversaryConfig::default()
            };
            cmd_adversary(
                *n,
                *steps,
                *restarts,
                config.seed,
                &caps,
                out.as_deref(),
                trace_out.as_deref(),
                stdout,
            )
        }
        Command::Lemma { samples, out } => cmd_lemma(*samples, config.seed, out.as_deref(), stdout),
        Command::Selfcheck { inject_fault } => {
            let cfg = SelfcheckConfig {
                seed: config.seed,
                fault: inject_fault.map(|FaultArg::ReferenceQuery| Fault::QueryOnReference),
            };
            cmd_selfcheck(&cfg, stdout, stderr)
        }
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => stdout.write_all(content.as_bytes()),
    }
}

fn require_n(n: usize) -> std::result::Result<(), CommandError> {
    if n == 0 {
        return Err(CommandError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn check_trace(trace: &SpreadTrace) -> std::result::Result<(), CommandError> {
    let audit = audit_trace(trace)?;
    if !audit.recursions_hold()
        || audit.sum_mismatch > BOUND_TOL
        || audit.deviation_range > BOUND_TOL
    {
        return Err(CommandError::Invariant(format!(
            "spread trace audit failed: {audit:?}"
        )));
    }
    Ok(())
}

/// Grover table for `t = 0..=steps`.
pub fn cmd_grover(
    n: usize,
    steps: usize,
    out: Option<&Path>,
    sim: SimConfig,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_n(n)?;
    let trace = run_schedule_with(&grover_schedule(n, steps)?, &uniform_state(n)?, sim)?;
    check_trace(&trace)?;
    for row in &trace.rows {
        let exact = grover_spread_exact(n, row.t)?;
        if (row.spread - exact).abs() > BOUND_TOL {
            return Err(CommandError::Invariant(format!(
                "t={}: simulated spread {} differs from exact {}",
                row.t, row.spread, exact
            )));
        }
    }
    let success = trace
        .rows
        .iter()
        .map(|r| success_probability(n, r.t))
        .collect::<crate::Result<Vec<_>>>()?;
    emit(out, stdout, &grover_csv(&trace, &success))?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_ensemble(
    n: usize,
    steps: usize,
    kind: ScheduleKind,
    seed: u64,
    per_alpha: bool,
    out: Option<&Path>,
    sim: SimConfig,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_n(n)?;
    if n > sim.max_dim {
        return Err(CommandError::Usage(format!(
            "--n {n} exceeds --max-dim {}",
            sim.max_dim
        )));
    }
    let schedule = match kind {
        ScheduleKind::Grover => grover_schedule(n, steps)?,
        ScheduleKind::Random => random_schedule(n, steps, seed)?,
    };
    let trace = run_schedule_with(&schedule, &uniform_state(n)?, sim)?;
    check_trace(&trace)?;
    emit(out, stdout, &trace_csv(&trace, per_alpha))?;
    Ok(EXIT_OK)
}

pub fn cmd_bounds(n: usize, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    require_n(n)?;
    let report = bounds::bound_report(n)?;
    emit(out, stdout, &to_json_line(&report))?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_adversary(
    n: usize,
    steps: usize,
    restarts: usize,
    seed: u64,
    caps: &AdversaryConfig,
    out: Option<&Path>,
    trace_out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_n(n)?;
    let run = search(n, steps, restarts, seed, caps)?;
    let result = &run.result;
    if result.best_spread > result.envelope + 1e-6 || result.tightness > 1.0 + BOUND_TOL {
        return Err(CommandError::Invariant(format!(
            "best spread {} exceeds envelope {}",
            result.best_spread, result.envelope
        )));
    }
    let trace = run_schedule_with(
        &phased_schedule(n, &result.best_parameters)?,
        &uniform_state(n)?,
        SimConfig::default(),
    )?;
    check_trace(&trace)?;
    emit(out, stdout, &to_json_line(result))?;
    let trace_path = match (trace_out, out) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(p)) => Some(p.with_extension("trace.csv")),
        (None, None) => None,
    };
    if let Some(path) = trace_path {
        fs::write(path, trace_csv(&trace, false))?;
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct LemmaReport {
    samples: usize,
    seed: u64,
    violations: usize,
    #[serde(serialize_with = "ser_sig12")]
    max_excess: f64,
    #[serde(serialize_with = "ser_sig12")]
    worst_pair_max_error: f64,
    phase_aligned_violations: usize,
    complex_violations: usize,
    #[serde(serialize_with = "ser_sig12")]
    complex_max_excess: f64,
    hypothesis: &'static str,
}

/// Non-negative survey (asserted), the extremal pair on a θ grid, and
/// exploratory statistics for unrestricted complex pairs (not asserted).
pub fn cmd_lemma(
    samples: usize,
    seed: u64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let survey = bounds::survey_lemma(samples, seed, false);
    let complex = bounds::survey_lemma(samples, seed, true);

    let mut worst_pair_max_error = 0.0f64;
    for k in 0..100 {
        let theta = std::f64::consts::FRAC_PI_2 * (k as f64 / 99.0);
        let (a, b) = lemma_worst_pair(theta)?;
        worst_pair_max_error = worst_pair_max_error.max(component_gap(&a, &b)?.excess().abs());
    }

    let mut rng = stream_rng(seed, 2);
    let mut phase_aligned_violations = 0;
    for k in 0..samples {
        let dim = 2 + k % 15;
        let a = phase_align(&StateVector::random(dim, &mut rng)?);
        let b = phase_align(&StateVector::random(dim, &mut rng)?);
        if !bounds::lemma_check(&a, &b)? {
            phase_aligned_violations += 1;
        }
    }

    let report = LemmaReport {
        samples,
        seed,
        violations: survey.violations,
        max_excess: survey.max_excess,
        worst_pair_max_error,
        phase_aligned_violations,
        complex_violations: complex.violations,
        complex_max_excess: complex.max_excess,
        hypothesis: "real non-negative components; complex pairs phase-aligned to magnitudes",
    };
    emit(out, stdout, &to_json_line(&report))?;
    if survey.violations > 0 || phase_aligned_violations > 0 || worst_pair_max_error > 1e-12 {
        return Err(CommandError::Invariant(
            "component-gap lemma violated".into(),
        ));
    }
    Ok(EXIT_OK)
}

pub fn cmd_selfcheck(
    cfg: &SelfcheckConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let results = run_selfcheck(cfg);
    for r in &results {
        writeln!(stdout, "{}", r.line())?;
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        writeln!(stdout, "all {} suites passed", results.len())?;
        Ok(EXIT_OK)
    } else {
        writeln!(stderr, "failed suites: {}", failed.join(", "))?;
        Ok(EXIT_INVARIANT)
    }
}
