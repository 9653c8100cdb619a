//! Command-line front end.
//!
//! Exit codes: 0 success, 1 replication mismatch, 2 precondition rejected,
//! 3 retries exhausted, 64 usage error. JSON goes to stdout as a single
//! document per run; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;

use crate::continued_fraction::cf_expand;
use crate::engine::{
    choose_geometry, closed_form_distribution, closed_form_params, prepare_pre_measurement_state,
    reg1_distribution, ModExpFunction, OutcomeDistribution, DEFAULT_MAX_AMPLITUDES,
};
use crate::error::Error;
use crate::montecarlo::monte_carlo_step2;
use crate::number_theory::multiplicative_order;
use crate::pipeline::{shor_factor, ShorConfig, StepOutcome};
use crate::replicate::{replicate_worked_example, WorkedExample};
use crate::serialize::{format_prob, prob17};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_EXHAUSTED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "shorlab",
    version,
    about = "Classical simulation of Shor's factoring algorithm"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor an odd composite with the simulated period finder.
    Factor(FactorArgs),
    /// Write the register-1 outcome distribution as CSV.
    Distribution(DistributionArgs),
    /// Print the continued-fraction table of NUMERATOR/DENOMINATOR.
    Cf(CfArgs),
    /// Estimate the period-recovery rate over many seeded measurements.
    Montecarlo(MonteCarloArgs),
    /// Replay the N = 91 worked example and diff every published value.
    Replicate(ReplicateArgs),
}

#[derive(Debug, Args)]
struct FactorArgs {
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    retries: u32,
    #[arg(long, default_value_t = 20)]
    mr_rounds: u32,
    #[arg(long)]
    forced_m: Option<u64>,
    #[arg(long)]
    forced_y: Option<u64>,
    #[arg(long)]
    q_override: Option<u64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["closed_form", "simulate", "compare"])))]
struct DistributionArgs {
    n: u64,
    m: u64,
    /// Use the analytic formula (period from the classical order oracle).
    #[arg(long)]
    closed_form: bool,
    /// Run the full two-register simulation.
    #[arg(long)]
    simulate: bool,
    /// Run both paths and report the largest entrywise discrepancy.
    #[arg(long, conflicts_with = "out")]
    compare: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CfArgs {
    numerator: u64,
    denominator: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    n: u64,
    m: u64,
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    forced_y: Option<u64>,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    #[arg(long)]
    json: bool,
    /// Corrupt one expected value (negative control).
    #[arg(long, hide = true)]
    perturb: bool,
}

#[derive(Serialize)]
struct Timing {
    timestamp_unix_ms: u128,
    elapsed_ms: f64,
}

/// Everything needed to re-run a command. Only `timing` varies between
/// identical invocations.
#[derive(Serialize)]
struct Manifest<C: Serialize> {
    command: &'static str,
    config: C,
    artifact_version: &'static str,
    outputs: Vec<String>,
    timing: Timing,
}

#[derive(Serialize)]
struct Document<C: Serialize, R: Serialize> {
    schema_version: u32,
    manifest: Manifest<C>,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(
    out: &mut dyn Write,
    command: &'static str,
    config: C,
    outputs: Vec<String>,
    started: Instant,
    result: R,
) -> io::Result<()> {
    let timestamp_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        manifest: Manifest {
            command,
            config,
            artifact_version: env!("CARGO_PKG_VERSION"),
            outputs,
            timing: Timing {
                timestamp_unix_ms,
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            },
        },
        result,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Factor(a) => cmd_factor(a, out, err),
        Command::Distribution(a) => cmd_distribution(a, out, err),
        Command::Cf(a) => cmd_cf(a, out, err),
        Command::Montecarlo(a) => cmd_montecarlo(a, out, err),
        Command::Replicate(a) => cmd_replicate(a, out),
    };
    result.unwrap_or_else(|e| {
        // a closed downstream pipe (`| head`) is not an error worth reporting
        if e.kind() != io::ErrorKind::BrokenPipe {
            let _ = writeln!(err, "error: i/o failure: {e}");
        }
        EXIT_PRECONDITION
    })
}

fn precondition(err: &mut dyn Write, e: &Error) -> io::Result<u8> {
    writeln!(err, "error: {e}")?;
    Ok(EXIT_PRECONDITION)
}

#[derive(Serialize)]
struct FactorResult<'a> {
    outcome: StepOutcome,
    factor: Option<u64>,
    period: Option<u64>,
    trace: &'a crate::pipeline::FactorizationTrace,
}

fn cmd_factor(a: FactorArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let started = Instant::now();
    let config = ShorConfig {
        rng_seed: a.seed,
        max_outer_retries: a.retries,
        miller_rabin_rounds: a.mr_rounds,
        forced_m: a.forced_m,
        forced_y: a.forced_y,
        q_override: a.q_override,
        ..ShorConfig::default()
    };
    let (outcome, trace) = match shor_factor(a.n, &config) {
        Ok(r) => r,
        Err(e) => return precondition(err, &e),
    };
    let period = trace.attempts.last().and_then(|att| att.period);
    let result = FactorResult {
        outcome,
        factor: outcome.factor(),
        period,
        trace: &trace,
    };
    emit(out, "factor", &config, Vec::new(), started, result)?;
    if outcome.factor().is_some() {
        Ok(EXIT_OK)
    } else {
        writeln!(
            err,
            "error: no factor after {} attempts",
            trace.attempts.len()
        )?;
        Ok(EXIT_EXHAUSTED)
    }
}

pub fn write_distribution_csv(dist: &OutcomeDistribution, w: &mut dyn Write) -> io::Result<()> {
    writeln!(w, "y,prob")?;
    for (y, &p) in dist.probs().iter().enumerate() {
        writeln!(w, "{y},{}", format_prob(p))?;
    }
    Ok(())
}

fn simulated(n: u64, m: u64) -> Result<OutcomeDistribution, Error> {
    let geometry = choose_geometry(n)?;
    let f = ModExpFunction::new(m, n)?;
    let state = prepare_pre_measurement_state(geometry, &f, DEFAULT_MAX_AMPLITUDES)?;
    Ok(reg1_distribution(&state))
}

fn closed_form(n: u64, m: u64) -> Result<OutcomeDistribution, Error> {
    let geometry = choose_geometry(n)?;
    ModExpFunction::new(m, n)?;
    let period = multiplicative_order(m, n)?;
    Ok(closed_form_distribution(&closed_form_params(
        period,
        geometry.register_size(),
    )?))
}

#[derive(Serialize)]
struct DistributionConfig {
    n: u64,
    m: u64,
    mode: &'static str,
}

#[derive(Serialize)]
struct DistributionSummary {
    register_size: u64,
    rows: u64,
    nonzero_rows: usize,
    #[serde(serialize_with = "prob17")]
    total: f64,
}

#[derive(Serialize)]
struct CompareSummary {
    register_size: u64,
    #[serde(serialize_with = "prob17")]
    max_abs_discrepancy: f64,
    #[serde(serialize_with = "prob17")]
    simulated_total: f64,
    #[serde(serialize_with = "prob17")]
    closed_form_total: f64,
}

fn cmd_distribution(
    a: DistributionArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<u8> {
    let started = Instant::now();
    if a.compare {
        let (sim, closed) = match simulated(a.n, a.m).and_then(|s| Ok((s, closed_form(a.n, a.m)?)))
        {
            Ok(pair) => pair,
            Err(e) => return precondition(err, &e),
        };
        let summary = CompareSummary {
            register_size: sim.register_size(),
            max_abs_discrepancy: sim.max_abs_diff(&closed).unwrap_or(f64::INFINITY),
            simulated_total: sim.total(),
            closed_form_total: closed.total(),
        };
        let config = DistributionConfig {
            n: a.n,
            m: a.m,
            mode: "compare",
        };
        emit(out, "distribution", config, Vec::new(), started, summary)?;
        return Ok(EXIT_OK);
    }

    let (mode, dist) = if a.closed_form {
        ("closed_form", closed_form(a.n, a.m))
    } else {
        ("simulate", simulated(a.n, a.m))
    };
    let dist = match dist {
        Ok(d) => d,
        Err(e) => return precondition(err, &e),
    };
    match a.out {
        None => write_distribution_csv(&dist, out)?,
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            write_distribution_csv(&dist, &mut w)?;
            w.flush()?;
            let summary = DistributionSummary {
                register_size: dist.register_size(),
                rows: dist.register_size(),
                nonzero_rows: dist.probs().iter().filter(|&&p| p > 1e-12).count(),
                total: dist.total(),
            };
            let config = DistributionConfig {
                n: a.n,
                m: a.m,
                mode,
            };
            let outputs = vec![path.display().to_string()];
            emit(out, "distribution", config, outputs, started, summary)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CfRow {
    n: usize,
    a_n: u64,
    p_n: u64,
    q_n: u64,
}

fn cmd_cf(a: CfArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let cf = match cf_expand(a.numerator, a.denominator) {
        Ok(cf) => cf,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let rows: Vec<CfRow> = cf
        .coefficients()
        .iter()
        .zip(cf.convergents())
        .enumerate()
        .map(|(n, (&a_n, &(p_n, q_n)))| CfRow { n, a_n, p_n, q_n })
        .collect();
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &rows)?;
        writeln!(out)?;
    } else {
        writeln!(out, "{:>4} {:>20} {:>20} {:>20}", "n", "a_n", "p_n", "q_n")?;
        for r in &rows {
            writeln!(out, "{:>4} {:>20} {:>20} {:>20}", r.n, r.a_n, r.p_n, r.q_n)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct MonteCarloConfig {
    n: u64,
    m: u64,
    trials: u64,
    seed: u64,
    forced_y: Option<u64>,
}

fn cmd_montecarlo(a: MonteCarloArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let started = Instant::now();
    if a.trials == 0 {
        writeln!(err, "error: {}", Error::NoTrials)?;
        return Ok(EXIT_USAGE);
    }
    let report = match monte_carlo_step2(a.n, a.m, a.trials, a.seed, a.forced_y) {
        Ok(r) => r,
        Err(e) => return precondition(err, &e),
    };
    let config = MonteCarloConfig {
        n: a.n,
        m: a.m,
        trials: a.trials,
        seed: a.seed,
        forced_y: a.forced_y,
    };
    emit(out, "montecarlo", config, Vec::new(), started, report)?;
    Ok(EXIT_OK)
}

fn cmd_replicate(a: ReplicateArgs, out: &mut dyn Write) -> io::Result<u8> {
    let mut expected = WorkedExample::default();
    if a.perturb {
        expected.factor = 7;
    }
    let report = match replicate_worked_example(&expected) {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "FAIL pipeline error: {e}")?;
            return Ok(EXIT_MISMATCH);
        }
    };
    if a.json {
        #[derive(Serialize)]
        struct Json<'a> {
            schema_version: u32,
            passed: bool,
            checks: &'a [crate::replicate::FieldCheck],
        }
        let doc = Json {
            schema_version: SCHEMA_VERSION,
            passed: report.passed(),
            checks: &report.checks,
        };
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
    } else {
        for c in &report.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{tag} {}: expected {} got {}",
                c.field, c.expected, c.actual
            )?;
        }
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}
