//! Closed-loop salience dynamics: selection, reinforcement, and the
//! application of attenuation corrections to a weight vector.
//!
//! A step runs in a fixed order: read the scheduled input, select an output,
//! reinforce the driving channel, attenuate, record. The driving channel is
//! the chosen output in the default closed-loop configuration (the model's
//! own output feeds back as evidence) or the scheduled input when a scenario
//! models reinjected prompts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attenuator::{beta_final, AttenuatorParams};
use crate::diagnostics::entropy_lenient;
use crate::error::{Error, Result};
use crate::scenario::{Drive, InitialWeights, Scenario};

// ─── state ───────────────────────────────────────────────────────────────────

/// A salience distribution over `k` channels plus a step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceState {
    pub weights: Vec<f64>,
    pub step: usize,
}

impl SalienceState {
    /// Wraps a weight vector, requiring at least two channels and every
    /// weight finite in `[0, 1]`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid("weights", "need at least 2 channels"));
        }
        for (i, w) in weights.iter().enumerate() {
            if !(w.is_finite() && (0.0..=1.0).contains(w)) {
                return Err(Error::invalid(
                    format!("weights[{i}]"),
                    format!("{w} is not a finite value in [0, 1]"),
                ));
            }
        }
        Ok(SalienceState { weights, step: 0 })
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Index of the largest weight; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..self.weights.len() {
            if self.weights[i] > self.weights[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_weight(&self) -> f64 {
        self.weights[self.argmax()]
    }
}

/// Builds a step-0 state from an initial weight specification.
///
/// In normalized mode the supplied weights must already form a distribution
/// (sum 1 within 1e−9); nothing is silently rescaled.
pub fn init_state(k: usize, initial: &InitialWeights, normalized: bool) -> Result<SalienceState> {
    if k < 2 {
        return Err(Error::invalid("k", "need at least 2 channels"));
    }
    let weights = match initial {
        InitialWeights::Uniform => vec![1.0 / k as f64; k],
        InitialWeights::OneHot(c) => {
            if *c >= k {
                return Err(Error::invalid(
                    "initial.one_hot",
                    format!("channel {c} out of range for k={k}"),
                ));
            }
            let mut w = vec![0.0; k];
            w[*c] = 1.0;
            w
        }
        InitialWeights::Explicit(v) => {
            if v.len() != k {
                return Err(Error::invalid(
                    "initial.explicit",
                    format!("expected {k} weights, got {}", v.len()),
                ));
            }
            v.clone()
        }
    };
    let state = SalienceState::new(weights)?;
    if normalized {
        let sum: f64 = state.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "initial",
                format!("weights sum to {sum}, expected 1 in normalized mode"),
            ));
        }
    }
    Ok(state)
}

// ─── reinforcement model ─────────────────────────────────────────────────────

/// How much reinforcement a weight receives per step, as a function of the
/// weight itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accumulation {
    /// `Δw = α·w`: compounding growth, the runaway regime.
    Linear,
    /// `Δw = α`: fixed increment regardless of current salience.
    Constant,
    /// `Δw = α·w²`: superlinear, saturates slowly from below.
    Quadratic,
}

/// Output selection policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Deterministic: the highest weight wins, lowest index on ties.
    Argmax,
    /// Stochastic: sample from `softmax(w / temperature)`.
    Softmax,
}

/// Parameters of the reinforcement loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReinforcementModel {
    /// Reinforcement rate per step.
    pub alpha: f64,
    pub accumulation: Accumulation,
    pub selection: Selection,
    /// Softmax temperature; ignored under argmax selection.
    pub temperature: f64,
    /// Renormalize the weight vector to sum 1 after every mutation.
    pub normalized: bool,
}

impl Default for ReinforcementModel {
    fn default() -> Self {
        ReinforcementModel {
            alpha: 0.1,
            accumulation: Accumulation::Linear,
            selection: Selection::Argmax,
            temperature: 1.0,
            normalized: true,
        }
    }
}

impl ReinforcementModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid("model.alpha", "must be finite and >= 0"));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::invalid(
                "model.temperature",
                "must be finite and > 0",
            ));
        }
        Ok(())
    }
}

/// Which channels the attenuator corrects each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttenuationMode {
    /// Every channel is evaluated against its own weight.
    PerWeight,
    /// Only the current maximum-weight channel is evaluated.
    MaxOnly,
}

impl std::str::FromStr for AttenuationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_weight" => Ok(AttenuationMode::PerWeight),
            "max_only" => Ok(AttenuationMode::MaxOnly),
            other => Err(Error::Parse(format!(
                "unknown attenuation mode '{other}' (expected per_weight or max_only)"
            ))),
        }
    }
}

impl std::fmt::Display for AttenuationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AttenuationMode::PerWeight => "per_weight",
            AttenuationMode::MaxOnly => "max_only",
        })
    }
}

// ─── step operations ─────────────────────────────────────────────────────────

/// Picks an output channel from the current weights.
///
/// Argmax ignores the RNG entirely. Softmax uses the numerically stable
/// shifted form `exp((w − w_max)/T)` so extreme temperature values cannot
/// overflow.
pub fn select_output<R: Rng>(
    state: &SalienceState,
    model: &ReinforcementModel,
    rng: &mut R,
) -> usize {
    match model.selection {
        Selection::Argmax => state.argmax(),
        Selection::Softmax => {
            let wmax = state.max_weight();
            let mut probs: Vec<f64> = state
                .weights
                .iter()
                .map(|w| ((w - wmax) / model.temperature).exp())
                .collect();
            let total: f64 = probs.iter().sum();
            for p in &mut probs {
                *p /= total;
            }
            let draw: f64 = rng.gen();
            let mut acc = 0.0;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if draw < acc {
                    return i;
                }
            }
            state.k() - 1
        }
    }
}

/// Adds reinforcement to one channel, clamps it into `[0, 1]`, and
/// renormalizes the vector when the model is normalized.
pub fn reinforce(state: &mut SalienceState, target: usize, model: &ReinforcementModel) {
    let w = state.weights[target];
    let inc = match model.accumulation {
        Accumulation::Linear => model.alpha * w,
        Accumulation::Constant => model.alpha,
        Accumulation::Quadratic => model.alpha * w * w,
    };
    state.weights[target] = (w + inc).clamp(0.0, 1.0);
    if model.normalized {
        renormalize(&mut state.weights);
    }
}

fn renormalize(weights: &mut [f64]) {
    let sum: f64 = weights.iter().sum();
    if sum > 0.0 {
        for w in weights.iter_mut() {
            *w /= sum;
        }
    }
}

/// Applies one round of attenuation and returns the effective per-channel
/// correction `β̂_j = 1 − m_j`, where `m_j` is the multiplier channel `j`
/// received before renormalization.
///
/// Each evaluated channel gets `β = beta_final(w_i)`. A positive β suppresses
/// the channel itself; a negative β cannot be spent on the channel that
/// triggered it (that would reward the spike), so its multiplier `1 − β > 1`
/// is routed to every other channel instead, amplifying the alternatives.
pub fn attenuate(
    state: &mut SalienceState,
    params: &AttenuatorParams,
    mode: AttenuationMode,
    normalized: bool,
) -> Vec<f64> {
    let k = state.k();
    let mut mults = vec![1.0f64; k];
    let drivers: Vec<usize> = match mode {
        AttenuationMode::PerWeight => (0..k).collect(),
        AttenuationMode::MaxOnly => vec![state.argmax()],
    };
    for i in drivers {
        let beta = beta_final(state.weights[i], params);
        if beta >= 0.0 {
            mults[i] *= 1.0 - beta;
        } else {
            for (j, m) in mults.iter_mut().enumerate() {
                if j != i {
                    *m *= 1.0 - beta;
                }
            }
        }
    }
    if mults.iter().all(|&m| m == 1.0) {
        return vec![0.0; k];
    }
    for (w, m) in state.weights.iter_mut().zip(&mults) {
        *w = (*w * m).clamp(0.0, 1.0);
    }
    if normalized {
        renormalize(&mut state.weights);
    }
    mults.iter().map(|m| 1.0 - m).collect()
}

/// Adds a small fixed increment to one channel, modelling a brief external
/// priority signal, then renormalizes if requested.
pub fn micro_priority_bump(
    state: &mut SalienceState,
    channel: usize,
    magnitude: f64,
    normalized: bool,
) -> Result<()> {
    if channel >= state.k() {
        return Err(Error::invalid(
            "channel",
            format!("index {channel} out of range for k={}", state.k()),
        ));
    }
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::invalid("magnitude", "must be finite and >= 0"));
    }
    state.weights[channel] = (state.weights[channel] + magnitude).clamp(0.0, 1.0);
    if normalized {
        renormalize(&mut state.weights);
    }
    Ok(())
}

// ─── trajectories ────────────────────────────────────────────────────────────

/// Everything observable about one simulation step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub input_channel: usize,
    pub chosen_output: usize,
    /// Weights after reinforcement and attenuation.
    pub weights_after: Vec<f64>,
    /// Effective per-channel correction applied this step; zeros when the
    /// attenuator is off.
    pub beta_applied: Vec<f64>,
    /// Clamped response at the pre-attenuation maximum weight; 0 when off.
    pub beta_max: f64,
    /// Normalized entropy of `weights_after`.
    pub entropy: f64,
}

/// A complete simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scenario_id: String,
    pub k: usize,
    pub seed: u64,
    pub initial_weights: Vec<f64>,
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    /// Weights at the end of the run; the initial weights if no steps ran.
    pub fn final_weights(&self) -> &[f64] {
        self.records
            .last()
            .map(|r| r.weights_after.as_slice())
            .unwrap_or(&self.initial_weights)
    }

    /// The maximum weight after each step.
    pub fn max_weight_series(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| {
                r.weights_after
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

/// Runs a scenario to completion.
///
/// The run is fully determined by the scenario (including its seed) and the
/// attenuator configuration; repeated calls produce identical trajectories.
pub fn run_trajectory(
    scenario: &Scenario,
    params: &AttenuatorParams,
    attenuator_on: bool,
    mode: AttenuationMode,
) -> Result<Trajectory> {
    scenario.validate()?;
    params.validate()?;
    let inputs = scenario.schedule.materialize(scenario.steps, scenario.k)?;
    let mut state = scenario.initial_state()?;
    let initial_weights = state.weights.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let k = scenario.k;
    let mut records = Vec::with_capacity(scenario.steps);
    for (step, &input) in inputs.iter().enumerate() {
        let chosen = select_output(&state, &scenario.model, &mut rng);
        let target = match scenario.drive {
            Drive::Output => chosen,
            Drive::Input => input,
        };
        reinforce(&mut state, target, &scenario.model);
        let pre_max = state.max_weight();
        let (beta_applied, beta_max) = if attenuator_on {
            let applied = attenuate(&mut state, params, mode, scenario.model.normalized);
            (applied, beta_final(pre_max, params))
        } else {
            (vec![0.0; k], 0.0)
        };
        let entropy = entropy_lenient(&state.weights);
        records.push(StepRecord {
            step,
            input_channel: input,
            chosen_output: chosen,
            weights_after: state.weights.clone(),
            beta_applied,
            beta_max,
            entropy,
        });
        state.step += 1;
    }
    Ok(Trajectory {
        scenario_id: scenario.id.clone(),
        k,
        seed: scenario.seed,
        initial_weights,
        records,
    })
}

// ─── tests ───────────────────────────────────────────────────────────────────
