//! Scenario definition and loading, the canned fixture scenarios, and
//! parameter sweeps over attenuator constants.
//!
//! Scenarios are JSON documents; see `load_scenario`. Unknown fields are
//! rejected and every validation error names the offending field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attenuator::AttenuatorParams;
use crate::diagnostics::entropy_lenient;
use crate::dynamics::{
    init_state, run_trajectory, AttenuationMode, ReinforcementModel, SalienceState, Trajectory,
};
use crate::error::{Error, Result};

// ─── scenario schema ─────────────────────────────────────────────────────────

/// Which channel the per-step reinforcement lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Closed loop: the model's own chosen output is reinforced.
    #[default]
    Output,
    /// Open loop: the scheduled input channel is reinforced, modelling
    /// content reinjected from outside each step.
    Input,
}

/// Initial weight specification.
///
/// Accepts `"uniform"`, `{"one_hot": i}`, `{"explicit": [..]}`, or a bare
/// array as shorthand for `explicit`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", from = "InitialRepr")]
pub enum InitialWeights {
    #[default]
    Uniform,
    OneHot(usize),
    Explicit(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InitialRepr {
    Tagged(InitialTagged),
    Bare(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum InitialTagged {
    Uniform,
    OneHot(usize),
    Explicit(Vec<f64>),
}

impl From<InitialRepr> for InitialWeights {
    fn from(repr: InitialRepr) -> Self {
        match repr {
            InitialRepr::Tagged(InitialTagged::Uniform) => InitialWeights::Uniform,
            InitialRepr::Tagged(InitialTagged::OneHot(i)) => InitialWeights::OneHot(i),
            InitialRepr::Tagged(InitialTagged::Explicit(v)) | InitialRepr::Bare(v) => {
                InitialWeights::Explicit(v)
            }
        }
    }
}

/// Input schedule: which channel is stimulated at each step.
///
/// Accepts `{"constant": i}`, `"round_robin"`, `{"random": {"seed": s}}`,
/// `{"explicit": [..]}`, or a bare array as shorthand for `explicit`.
/// Explicit patterns repeat cyclically when shorter than the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", from = "ScheduleRepr")]
pub enum Schedule {
    Constant(usize),
    RoundRobin,
    Random { seed: u64 },
    Explicit(Vec<usize>),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Constant(0)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScheduleRepr {
    Tagged(ScheduleTagged),
    Bare(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ScheduleTagged {
    Constant(usize),
    RoundRobin,
    Random { seed: u64 },
    Explicit(Vec<usize>),
}

impl From<ScheduleRepr> for Schedule {
    fn from(repr: ScheduleRepr) -> Self {
        match repr {
            ScheduleRepr::Tagged(ScheduleTagged::Constant(i)) => Schedule::Constant(i),
            ScheduleRepr::Tagged(ScheduleTagged::RoundRobin) => Schedule::RoundRobin,
            ScheduleRepr::Tagged(ScheduleTagged::Random { seed }) => Schedule::Random { seed },
            ScheduleRepr::Tagged(ScheduleTagged::Explicit(v)) | ScheduleRepr::Bare(v) => {
                Schedule::Explicit(v)
            }
        }
    }
}

impl Schedule {
    /// Expands the schedule to one input channel per step.
    ///
    /// `Random` draws from its own seeded stream, independent of the
    /// scenario's model seed.
    pub fn materialize(&self, steps: usize, k: usize) -> Result<Vec<usize>> {
        match self {
            Schedule::Constant(c) => {
                if *c >= k {
                    return Err(Error::invalid(
                        "schedule.constant",
                        format!("channel {c} out of range for k={k}"),
                    ));
                }
                Ok(vec![*c; steps])
            }
            Schedule::RoundRobin => Ok((0..steps).map(|i| i % k).collect()),
            Schedule::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..steps).map(|_| rng.gen_range(0..k)).collect())
            }
            Schedule::Explicit(pattern) => {
                if pattern.is_empty() {
                    return Err(Error::invalid(
                        "schedule.explicit",
                        "pattern must not be empty",
                    ));
                }
                if let Some(bad) = pattern.iter().find(|c| **c >= k) {
                    return Err(Error::invalid(
                        "schedule.explicit",
                        format!("channel {bad} out of range for k={k}"),
                    ));
                }
                Ok((0..steps).map(|i| pattern[i % pattern.len()]).collect())
            }
        }
    }
}

/// A complete, loadable simulation definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub k: usize,
    #[serde(default)]
    pub initial: InitialWeights,
    #[serde(default)]
    pub schedule: Schedule,
    pub steps: usize,
    #[serde(default)]
    pub model: ReinforcementModel,
    /// Ground-truth channel reliability for overconfidence detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub drive: Drive,
    /// Channel representing the unsolved task, for hyperfixation detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_channel: Option<usize>,
    /// Channel representing "resolution found", for hyperfixation detection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_channel: Option<usize>,
    /// Weight level treated as a committed decision by the hyperfixation
    /// detector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_threshold: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::invalid("id", "must not be empty"));
        }
        if self.k < 2 {
            return Err(Error::invalid("k", "need at least 2 channels"));
        }
        match &self.initial {
            InitialWeights::Uniform => {}
            InitialWeights::OneHot(c) => {
                if *c >= self.k {
                    return Err(Error::invalid(
                        "initial.one_hot",
                        format!("channel {c} out of range for k={}", self.k),
                    ));
                }
            }
            InitialWeights::Explicit(v) => {
                if v.len() != self.k {
                    return Err(Error::invalid(
                        "initial.explicit",
                        format!("expected {} weights, got {}", self.k, v.len()),
                    ));
                }
            }
        }
        // Materializing to zero steps exercises only entry validation.
        self.schedule.materialize(0, self.k)?;
        self.model.validate()?;
        if let Some(r) = &self.reliability {
            if r.len() != self.k {
                return Err(Error::invalid(
                    "reliability",
                    format!("expected {} entries, got {}", self.k, r.len()),
                ));
            }
            for (i, v) in r.iter().enumerate() {
                if !(v.is_finite() && (0.0..=1.0).contains(v)) {
                    return Err(Error::invalid(
                        format!("reliability[{i}]"),
                        format!("{v} is not a finite value in [0, 1]"),
                    ));
                }
            }
        }
        for (name, ch) in [
            ("task_channel", self.task_channel),
            ("resolution_channel", self.resolution_channel),
        ] {
            if let Some(c) = ch {
                if c >= self.k {
                    return Err(Error::invalid(
                        name,
                        format!("channel {c} out of range for k={}", self.k),
                    ));
                }
            }
        }
        if let (Some(t), Some(r)) = (self.task_channel, self.resolution_channel) {
            if t == r {
                return Err(Error::invalid(
                    "resolution_channel",
                    "must differ from task_channel",
                ));
            }
        }
        if let Some(d) = self.decision_threshold {
            if !(d.is_finite() && d > 0.0 && d < 1.0) {
                return Err(Error::invalid("decision_threshold", "must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// Builds the step-0 state from the initial weight specification.
    pub fn initial_state(&self) -> Result<SalienceState> {
        init_state(self.k, &self.initial, self.model.normalized)
    }

    /// The detector-relevant side channel of the scenario.
    pub fn meta(&self) -> ScenarioMeta {
        ScenarioMeta {
            reliability: self.reliability.clone(),
            task_channel: self.task_channel,
            resolution_channel: self.resolution_channel,
            decision_threshold: self.decision_threshold,
        }
    }
}

/// Scenario ground truth consumed by the detectors but not by the dynamics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioMeta {
    pub reliability: Option<Vec<f64>>,
    pub task_channel: Option<usize>,
    pub resolution_channel: Option<usize>,
    pub decision_threshold: Option<f64>,
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text)?;
    scenario.validate()?;
    if scenario.steps < 1 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    Ok(scenario)
}

/// Loads a scenario from a JSON file.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

// ─── builtin fixtures ────────────────────────────────────────────────────────

/// Names accepted by [`builtin`], in documentation order.
pub const BUILTIN_NAMES: &[&str] = &[
    "runaway",
    "reinjection",
    "equalization",
    "adversarial_repetition",
    "starvation",
    "drift",
    "ping_pong",
    "hyperfixation",
];

/// Returns one of the canned fixture scenarios used by the test suite and
/// the examples. Each triggers exactly one detector under its documented
/// configuration.
pub fn builtin(name: &str) -> Result<Scenario> {
    let base = Scenario {
        id: name.to_string(),
        k: 8,
        initial: InitialWeights::Uniform,
        schedule: Schedule::Constant(0),
        steps: 0,
        model: ReinforcementModel::default(),
        reliability: None,
        seed: 42,
        drive: Drive::Output,
        task_channel: None,
        resolution_channel: None,
        decision_threshold: None,
    };
    let scenario = match name {
        // Closed-loop self-reinforcement from a cold start; locks in hard
        // without the attenuator. Runs unnormalized: under simplex
        // renormalization the clamp caps the pumped channel's gain at one
        // unit of 1/(1−w) per step, which stretches saturation past 100
        // steps; raw saturation is the regime being demonstrated. Alpha
        // sits below the corrected map's oscillation threshold (~0.075,
        // where the slope of w → (1+α)w·(1−β) at the balance point passes
        // −1), so the attenuated run converges instead of settling into a
        // period-two orbit that would read as entrapment.
        "runaway" => Scenario {
            steps: 500,
            model: ReinforcementModel {
                alpha: 0.05,
                normalized: false,
                ..ReinforcementModel::default()
            },
            ..base
        },
        // One topic reinjected with every interaction.
        "reinjection" => Scenario {
            k: 6,
            schedule: Schedule::Constant(3),
            steps: 400,
            model: ReinforcementModel {
                alpha: 0.2,
                ..ReinforcementModel::default()
            },
            drive: Drive::Input,
            ..base
        },
        // Mildly spread weights pulled together by strong per-weight
        // suppression (pair with `equalization_params`); ends in a tie.
        "equalization" => Scenario {
            k: 4,
            initial: InitialWeights::Explicit(vec![0.30, 0.27, 0.23, 0.20]),
            steps: 50,
            model: ReinforcementModel {
                alpha: 0.0,
                ..ReinforcementModel::default()
            },
            drive: Drive::Input,
            ..base
        },
        // A falsehood repeated until it outweighs everything it contradicts.
        "adversarial_repetition" => Scenario {
            k: 5,
            schedule: Schedule::Constant(1),
            steps: 18,
            model: ReinforcementModel {
                alpha: 0.15,
                ..ReinforcementModel::default()
            },
            reliability: Some(vec![0.5, 0.05, 0.5, 0.5, 0.5]),
            drive: Drive::Input,
            ..base
        },
        // The most reliable channel never stimulated; its salience starves.
        "starvation" => Scenario {
            k: 5,
            steps: 18,
            model: ReinforcementModel {
                alpha: 0.15,
                ..ReinforcementModel::default()
            },
            reliability: Some(vec![0.05, 0.5, 0.5, 0.5, 0.9]),
            drive: Drive::Input,
            ..base
        },
        // Half the channels reinforced in rotation: system-wide drift with
        // no single dominant channel.
        "drift" => Scenario {
            initial: InitialWeights::Explicit(vec![0.16, 0.16, 0.16, 0.16, 0.09, 0.09, 0.09, 0.09]),
            schedule: Schedule::Explicit(vec![0, 1, 2, 3]),
            steps: 120,
            model: ReinforcementModel {
                alpha: 0.1,
                ..ReinforcementModel::default()
            },
            drive: Drive::Input,
            ..base
        },
        // Two channels stimulated alternately; the quantized state revisits
        // a two-step loop forever. Alpha is large enough that the
        // off-balance half of the orbit sits clearly below the collapse
        // entropy threshold, so the loop reads as entrapment.
        "ping_pong" => Scenario {
            k: 2,
            schedule: Schedule::RoundRobin,
            steps: 60,
            model: ReinforcementModel {
                alpha: 0.5,
                ..ReinforcementModel::default()
            },
            drive: Drive::Input,
            ..base
        },
        // Task salience parked high, resolution parked low, nothing moves.
        "hyperfixation" => Scenario {
            k: 3,
            initial: InitialWeights::Explicit(vec![0.8, 0.1, 0.1]),
            steps: 80,
            model: ReinforcementModel {
                alpha: 0.0,
                ..ReinforcementModel::default()
            },
            drive: Drive::Input,
            task_channel: Some(0),
            resolution_channel: Some(1),
            decision_threshold: Some(0.5),
            ..base
        },
        other => {
            return Err(Error::invalid(
                "builtin",
                format!("unknown scenario '{other}'"),
            ))
        }
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Companion attenuator settings for the `equalization` fixture: gates moved
/// down into the fixture's weight range, amplification disabled, and the
/// response trimmed so suppression stays out of the clamp.
pub fn equalization_params() -> AttenuatorParams {
    AttenuatorParams {
        theta_global: 0.3,
        eps_a: 0.15,
        eps_b: 0.25,
        eps_c: 0.35,
        rho_a: 20.0,
        rho_b: 20.0,
        rho_c: 20.0,
        beta_min: 0.0,
        ..AttenuatorParams::default()
    }
}

/// The attenuator configuration under which a builtin fixture produces
/// exactly its documented diagnosis. Most fixtures demonstrate an
/// *uncorrected* failure and therefore run with the attenuator off;
/// `equalization` is the exception, showing over-suppression with
/// [`equalization_params`].
pub fn builtin_demo_config(name: &str) -> Result<(bool, AttenuatorParams)> {
    if !BUILTIN_NAMES.contains(&name) {
        return Err(Error::invalid(
            "builtin",
            format!("unknown scenario '{name}'"),
        ));
    }
    Ok(match name {
        "equalization" => (true, equalization_params()),
        _ => (false, AttenuatorParams::default()),
    })
}

// ─── sweeps ──────────────────────────────────────────────────────────────────

/// Summary statistic extracted from one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Maximum over steps of the maximum weight.
    PeakWMax,
    /// First step after the peak at which the maximum weight falls below
    /// `eps_a`; infinite when it never recovers.
    RecoverySteps,
    /// Normalized entropy at the last step.
    FinalEntropy,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::PeakWMax => "peak_w_max",
            Metric::RecoverySteps => "recovery_steps",
            Metric::FinalEntropy => "final_entropy",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peak_w_max" => Ok(Metric::PeakWMax),
            "recovery_steps" => Ok(Metric::RecoverySteps),
            "final_entropy" => Ok(Metric::FinalEntropy),
            other => Err(Error::Parse(format!(
                "unknown metric '{other}' (expected peak_w_max, recovery_steps, or final_entropy)"
            ))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluates a metric on a finished trajectory.
///
/// `eps_a` must be the value from the parameters the trajectory ran with, so
/// recovery is judged against the gate floor that was actually in force.
pub fn compute_metric(traj: &Trajectory, metric: Metric, eps_a: f64) -> f64 {
    let series = traj.max_weight_series();
    match metric {
        Metric::PeakWMax => series
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            .max(initial_max(traj)),
        Metric::RecoverySteps => {
            let mut peak_idx = 0;
            for (i, w) in series.iter().enumerate() {
                if *w > series[peak_idx] {
                    peak_idx = i;
                }
            }
            series
                .iter()
                .enumerate()
                .skip(peak_idx + 1)
                .find(|(_, w)| **w < eps_a)
                .map(|(i, _)| i as f64)
                .unwrap_or(f64::INFINITY)
        }
        Metric::FinalEntropy => traj
            .records
            .last()
            .map(|r| r.entropy)
            .unwrap_or_else(|| entropy_lenient(&traj.initial_weights)),
    }
}

fn initial_max(traj: &Trajectory) -> f64 {
    traj.initial_weights
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// One attenuator parameter swept over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// An [`crate::attenuator::PARAMETERS`] name.
    pub param: String,
    pub from: f64,
    pub to: f64,
    /// Grid size; ignored when `from == to` (a single degenerate point).
    pub steps: usize,
    pub metric: Metric,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        AttenuatorParams::default().get(&self.param)?;
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::invalid("from/to", "must be finite"));
        }
        if self.from > self.to {
            return Err(Error::invalid("from/to", "from must not exceed to"));
        }
        if self.from < self.to && self.steps < 2 {
            return Err(Error::invalid("steps", "need at least 2 grid points"));
        }
        Ok(())
    }

    /// The parameter values visited, in grid order.
    pub fn grid(&self) -> Vec<f64> {
        if self.from == self.to {
            return vec![self.from];
        }
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// One output row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub metric: Metric,
    pub metric_value: f64,
}

/// Runs one trajectory per grid point with the named parameter overridden,
/// attenuator on, and reports the requested metric.
///
/// Grid points execute in parallel; the result table is ordered by grid
/// index regardless of completion order.
pub fn sweep(
    scenario: &Scenario,
    spec: &SweepSpec,
    base: &AttenuatorParams,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    scenario.validate()?;
    let rows: Result<Vec<SweepRow>> = spec
        .grid()
        .par_iter()
        .map(|value| {
            let mut params = base.clone();
            params.set(&spec.param, *value)?;
            let traj = run_trajectory(scenario, &params, true, AttenuationMode::PerWeight)?;
            Ok(SweepRow {
                param: spec.param.clone(),
                value: *value,
                metric: spec.metric,
                metric_value: compute_metric(&traj, spec.metric, params.eps_a),
            })
        })
        .collect();
    rows
}

// ─── tests ───────────────────────────────────────────────────────────────────
