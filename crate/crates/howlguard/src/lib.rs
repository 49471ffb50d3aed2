//! Closed-loop salience reinforcement with dynamic attenuation.
//!
//! An agent that feeds its own outputs back into its salience weighting can
//! talk itself into a corner: one channel's weight compounds until the
//! system locks in, equalizes into an undecidable tie, or drifts wholesale.
//! This crate simulates that loop at desk scale and implements the
//! corrective response
//!
//! ```text
//! beta(W) = tau_a(W) e^(-gamma W) + tau_b(W) phi(W) + tau_c(W) ln(1 + W)
//! ```
//!
//! where each `tau` is a logistic gate that switches its component on near
//! a threshold weight, `phi` is a signed variant of the inverse hyperbolic
//! secant that allows upward correction, and the corrected weight is
//! `W(1 - beta)`. Six failure-mode detectors report when a trajectory
//! locks in (howlround), equalizes, loops, fixates, overweights an
//! unreliable channel, or drifts system-wide.
//!
//! # Modules
//!
//! - [`attenuator`]: the response curve, its gated components, and the
//!   parameter registry.
//! - [`dynamics`]: salience state, reinforcement, per-step correction, and
//!   trajectory recording.
//! - [`diagnostics`]: normalized entropy and the failure detectors.
//! - [`scenario`]: JSON scenarios, builtin fixtures, metrics, and sweeps.
//! - [`emit`]: deterministic CSV and text output.
//! - [`cli`]: the `howlguard` binary's argument grammar and dispatch.
//!
//! # Examples directory
//!
//! Each major capability has a runnable example:
//!
//! - `attenuator_curves`: the response landscape and its landmarks.
//! - `runaway_lockin`: uncorrected lock-in next to the attenuated run.
//! - `lockin_recovery`: recovery after starting from near-certainty.
//! - `collapse_and_bump`: over-suppression, collapse, and the
//!   micro-priority bump that breaks the tie.
//! - `failure_zoo`: every builtin fixture and the detector it trips.
//! - `parameter_sweep`: parallel sweeps over attenuator parameters.
//! - `custom_scenario`: authoring a scenario as JSON and diagnosing it.
//!
//! Run one with `cargo run --example failure_zoo`.

pub mod attenuator;
pub mod cli;
pub mod diagnostics;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod scenario;

pub use attenuator::{
    apply_correction, arsech, beta_basic, beta_final, component_curves, gate, phi,
    AttenuatorParams, CurveRow,
};
pub use diagnostics::{
    diagnose, normalized_entropy, DetectorThresholds, FailureDiagnosis, FailureKind,
};
pub use dynamics::{
    micro_priority_bump, run_trajectory, AttenuationMode, ReinforcementModel, SalienceState,
    StepRecord, Trajectory,
};
pub use error::{Error, Result};
pub use scenario::{
    builtin, builtin_demo_config, compute_metric, load_scenario, parse_scenario, sweep, Metric,
    Scenario, SweepRow, SweepSpec, BUILTIN_NAMES,
};
