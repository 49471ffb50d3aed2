//! Command-line front end: `simulate`, `curves`, `sweep`, and `diagnose`.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime
//! (I/O) error. All output is deterministic for a fixed argument vector;
//! the `HOWLGUARD_SEED` environment variable overrides the scenario seed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::attenuator::{component_curves, AttenuatorParams, PARAMETERS};
use crate::diagnostics::{diagnose, DetectorThresholds, THRESHOLDS};
use crate::dynamics::{run_trajectory, AttenuationMode};
use crate::emit;
use crate::error::{Error, Result};
use crate::scenario::{builtin, load_scenario, sweep, Metric, Scenario, SweepSpec, BUILTIN_NAMES};

#[derive(Parser)]
#[command(
    name = "howlguard",
    version,
    about = "Salience-attenuation simulator: closed-loop reinforcement dynamics, \
             correction curves, parameter sweeps, and failure-mode diagnosis",
    after_help = registry_help(),
    after_long_help = registry_help()
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Write the attenuator component curves over a weight grid as CSV.
    Curves(CurvesArgs),
    /// Sweep one attenuator parameter and write the metric table as CSV.
    Sweep(SweepArgs),
    /// Run every applicable failure detector over a scenario's trajectory.
    Diagnose(DiagnoseArgs),
}

/// Exactly one scenario source.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Builtin fixture name (see the scenario list in the long help).
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Path to a scenario JSON file.
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Toggle {
    On,
    Off,
}

impl Toggle {
    fn is_on(self) -> bool {
        matches!(self, Toggle::On)
    }
}

#[derive(Copy, Clone, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    PerWeight,
    MaxOnly,
}

impl From<ModeArg> for AttenuationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PerWeight => AttenuationMode::PerWeight,
            ModeArg::MaxOnly => AttenuationMode::MaxOnly,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
#[value(rename_all = "snake_case")]
enum MetricArg {
    PeakWMax,
    RecoverySteps,
    FinalEntropy,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::PeakWMax => Metric::PeakWMax,
            MetricArg::RecoverySteps => Metric::RecoverySteps,
            MetricArg::FinalEntropy => Metric::FinalEntropy,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: Source,
    /// Whether the corrective feedback loop runs.
    #[arg(long, value_enum, default_value = "on")]
    attenuator: Toggle,
    /// Which weights the correction is applied to.
    #[arg(long, value_enum, default_value = "per_weight")]
    mode: ModeArg,
    /// Attenuator parameter override; repeatable.
    #[arg(long = "set", value_name = "KEY=VAL")]
    set: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Number of grid points over the weight interval (minimum 2).
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    /// Attenuator parameter override; repeatable.
    #[arg(long = "set", value_name = "KEY=VAL")]
    set: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Attenuator parameter to sweep.
    #[arg(long, value_name = "NAME")]
    param: String,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    /// Number of grid points (ignored when from == to).
    #[arg(long, default_value_t = 2)]
    steps: usize,
    /// Summary statistic reported per grid point.
    #[arg(long, value_enum, default_value = "peak_w_max")]
    metric: MetricArg,
    /// Base attenuator parameter override; repeatable.
    #[arg(long = "set", value_name = "KEY=VAL")]
    set: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    source: Source,
    /// Whether the corrective feedback loop runs.
    #[arg(long, value_enum, default_value = "on")]
    attenuator: Toggle,
    /// Which weights the correction is applied to.
    #[arg(long, value_enum, default_value = "per_weight")]
    mode: ModeArg,
    /// Attenuator parameter override; repeatable.
    #[arg(long = "set", value_name = "KEY=VAL")]
    set: Vec<String>,
    /// Detector threshold override; repeatable.
    #[arg(long = "threshold", value_name = "KEY=VAL")]
    threshold: Vec<String>,
    /// Report format.
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// The generated help appendix: every tunable with its default, plus the
/// builtin scenario list. Kept in sync with the library by construction
/// and asserted by a test.
fn registry_help() -> String {
    let params = AttenuatorParams::default();
    let thresholds = DetectorThresholds::default();
    let mut s = String::from("Attenuator parameters (--set KEY=VAL):\n");
    for spec in PARAMETERS {
        let default = params
            .get(spec.name)
            .expect("registry names its own fields");
        s.push_str(&format!(
            "  {:<20} {} [default: {}]\n",
            spec.name, spec.doc, default
        ));
    }
    s.push_str("\nDetector thresholds (--threshold KEY=VAL):\n");
    for spec in THRESHOLDS {
        let default = thresholds
            .get(spec.name)
            .expect("registry names its own fields");
        s.push_str(&format!(
            "  {:<20} {} [default: {}]\n",
            spec.name, spec.doc, default
        ));
    }
    s.push_str("\nBuiltin scenarios (--builtin NAME):\n  ");
    s.push_str(&BUILTIN_NAMES.join(", "));
    s.push('\n');
    s
}

/// Splits a `KEY=VAL` override and parses the value as a real.
fn parse_override(pair: &str) -> Result<(&str, f64)> {
    let (key, raw) = pair
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override '{pair}' is not KEY=VAL")))?;
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("override '{pair}': '{raw}' is not a number")))?;
    Ok((key.trim(), value))
}

fn apply_param_overrides(params: &mut AttenuatorParams, pairs: &[String]) -> Result<()> {
    for pair in pairs {
        let (key, value) = parse_override(pair)?;
        params.set(key, value)?;
    }
    Ok(())
}

fn apply_threshold_overrides(th: &mut DetectorThresholds, pairs: &[String]) -> Result<()> {
    for pair in pairs {
        let (key, value) = parse_override(pair)?;
        th.set(key, value)?;
    }
    Ok(())
}

/// Loads the scenario from whichever source was given and applies the
/// `HOWLGUARD_SEED` override when the variable is set.
fn load_source(source: &Source) -> Result<Scenario> {
    let mut scenario = match (&source.builtin, &source.scenario) {
        (Some(name), None) => builtin(name)?,
        (None, Some(path)) => load_scenario(path)?,
        _ => unreachable!("argument group enforces exactly one source"),
    };
    match std::env::var("HOWLGUARD_SEED") {
        Ok(raw) => {
            let seed: u64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::invalid("HOWLGUARD_SEED", format!("'{raw}' is not a u64")))?;
            scenario.seed = seed;
        }
        Err(std::env::VarError::NotPresent) => {}
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Error::invalid("HOWLGUARD_SEED", "value is not valid UTF-8"));
        }
    }
    Ok(scenario)
}

/// Streams `write` into the output file, or standard output when no path
/// was given.
fn write_out<F>(out: &Option<PathBuf>, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let scenario = load_source(&a.source)?;
            let mut params = AttenuatorParams::default();
            apply_param_overrides(&mut params, &a.set)?;
            let traj = run_trajectory(&scenario, &params, a.attenuator.is_on(), a.mode.into())?;
            write_out(&a.out, |w| emit::write_trajectory(w, &traj))
        }
        Command::Curves(a) => {
            let mut params = AttenuatorParams::default();
            apply_param_overrides(&mut params, &a.set)?;
            let rows = component_curves(a.grid, &params)?;
            write_out(&a.out, |w| emit::write_curves(w, &rows))
        }
        Command::Sweep(a) => {
            let scenario = load_source(&a.source)?;
            let mut params = AttenuatorParams::default();
            apply_param_overrides(&mut params, &a.set)?;
            let spec = SweepSpec {
                param: a.param.clone(),
                from: a.from,
                to: a.to,
                steps: a.steps,
                metric: a.metric.into(),
            };
            let rows = sweep(&scenario, &spec, &params)?;
            write_out(&a.out, |w| emit::write_sweep(w, &rows))
        }
        Command::Diagnose(a) => {
            let scenario = load_source(&a.source)?;
            let mut params = AttenuatorParams::default();
            apply_param_overrides(&mut params, &a.set)?;
            let mut thresholds = DetectorThresholds::default();
            apply_threshold_overrides(&mut thresholds, &a.threshold)?;
            let traj = run_trajectory(&scenario, &params, a.attenuator.is_on(), a.mode.into())?;
            let diagnoses = diagnose(&traj, &scenario.meta(), &thresholds);
            write_out(&a.out, |w| match a.format {
                ReportFormat::Text => emit::write_diagnoses_text(w, &diagnoses),
                ReportFormat::Csv => emit::write_diagnoses_csv(w, &diagnoses),
            })
        }
    }
}

/// Parses `argv` and runs the requested command, returning the process
/// exit code instead of exiting so the mapping stays testable.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    0
                }
                _ => {
                    eprint!("{err}");
                    1
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

/// Renders the long help text (used by the registry-sync test).
pub fn long_help() -> String {
    Cli::command().render_long_help().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn help_lists_every_parameter_and_default() {
        let help = long_help();
        let params = AttenuatorParams::default();
        for spec in PARAMETERS {
            assert!(help.contains(spec.name), "help lacks {}", spec.name);
            let needle = format!("[default: {}]", params.get(spec.name).unwrap());
            let line = help
                .lines()
                .find(|l| l.trim_start().starts_with(spec.name))
                .unwrap_or_else(|| panic!("no help line for {}", spec.name));
            assert!(
                line.contains(&needle),
                "{} line lacks {}",
                spec.name,
                needle
            );
        }
        let thresholds = DetectorThresholds::default();
        for spec in THRESHOLDS {
            let needle = format!("[default: {}]", thresholds.get(spec.name).unwrap());
            let line = help
                .lines()
                .find(|l| l.trim_start().starts_with(spec.name))
                .unwrap_or_else(|| panic!("no help line for {}", spec.name));
            assert!(
                line.contains(&needle),
                "{} line lacks {}",
                spec.name,
                needle
            );
        }
        for name in BUILTIN_NAMES {
            assert!(help.contains(name), "help lacks builtin {name}");
        }
    }

    #[test]
    fn override_parsing() {
        assert_eq!(parse_override("gamma=2.5").unwrap(), ("gamma", 2.5));
        assert_eq!(parse_override("eps_b=0.775").unwrap(), ("eps_b", 0.775));
        assert!(matches!(parse_override("gamma"), Err(Error::Parse(_))));
        assert!(matches!(parse_override("gamma=abc"), Err(Error::Parse(_))));
        let mut params = AttenuatorParams::default();
        let err = apply_param_overrides(&mut params, &["nope=1".to_string()]).unwrap_err();
        assert_eq!(err.to_string(), "unknown parameter: nope");
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["howlguard", "simulate"]), 1);
        assert_eq!(run(["howlguard", "bogus-command"]), 1);
        assert_eq!(
            run([
                "howlguard",
                "simulate",
                "--builtin",
                "runaway",
                "--scenario",
                "x.json"
            ]),
            1
        );
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["howlguard", "--help"]), 0);
        assert_eq!(run(["howlguard", "simulate", "--help"]), 0);
    }

    #[test]
    fn validation_errors_exit_two() {
        assert_eq!(run(["howlguard", "curves", "--grid", "1"]), 2);
        assert_eq!(run(["howlguard", "simulate", "--builtin", "nonesuch"]), 2);
        assert_eq!(
            run([
                "howlguard",
                "simulate",
                "--builtin",
                "runaway",
                "--set",
                "nope=1"
            ]),
            2
        );
    }

    #[test]
    fn missing_scenario_file_exits_three() {
        assert_eq!(
            run([
                "howlguard",
                "simulate",
                "--scenario",
                "/nonexistent/path.json"
            ]),
            3
        );
    }
}
