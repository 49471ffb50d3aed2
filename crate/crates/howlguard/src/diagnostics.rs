//! Detectors mapping finished trajectories to the failure-mode taxonomy.
//!
//! Each detector is a pure function of the trajectory, scenario ground truth,
//! and thresholds; `diagnose` runs every applicable detector and returns the
//! positive findings ordered by onset. The six modes:
//!
//! | kind                     | signature observed in the trajectory         |
//! |--------------------------|----------------------------------------------|
//! | Howlround                | one channel locked high, self-reinforcing    |
//! | SalienceCollapse         | entropy pinned at maximum, no stable winner  |
//! | RecursiveEntrapment      | quantized state loops without resolving      |
//! | AnalyticalHyperfixation  | task stuck above threshold, resolution below |
//! | SalientaryOverconfidence | final confidence far from ground truth       |
//! | RBSE                     | sustained multi-channel drift, no one driver |

use std::collections::BTreeMap;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::scenario::ScenarioMeta;

/// Weight-difference level below which two channels count as tied.
const TIE_EPS: f64 = 1e-9;
/// Slack when requiring a weight series to be non-decreasing.
const MONOTONE_EPS: f64 = 1e-12;
/// Noise tolerance for drift growth comparisons.
const DRIFT_EPS: f64 = 1e-6;

// ─── verdict types ───────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureKind {
    Howlround,
    SalienceCollapse,
    RecursiveEntrapment,
    AnalyticalHyperfixation,
    SalientaryOverconfidence,
    Rbse,
    None,
}

impl std::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailureKind::Howlround => "Howlround",
            FailureKind::SalienceCollapse => "SalienceCollapse",
            FailureKind::RecursiveEntrapment => "RecursiveEntrapment",
            FailureKind::AnalyticalHyperfixation => "AnalyticalHyperfixation",
            FailureKind::SalientaryOverconfidence => "SalientaryOverconfidence",
            FailureKind::Rbse => "RBSE",
            FailureKind::None => "None",
        })
    }
}

/// A detector verdict. `onset_step` is present exactly when `kind` is not
/// [`FailureKind::None`]; metrics carry detector-specific scalars in a
/// deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureDiagnosis {
    pub kind: FailureKind,
    pub onset_step: Option<usize>,
    pub metrics: BTreeMap<String, f64>,
}

impl FailureDiagnosis {
    fn none() -> Self {
        FailureDiagnosis {
            kind: FailureKind::None,
            onset_step: None,
            metrics: BTreeMap::new(),
        }
    }

    fn found(kind: FailureKind, onset: usize, metrics: &[(&str, f64)]) -> Self {
        FailureDiagnosis {
            kind,
            onset_step: Some(onset),
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.kind != FailureKind::None
    }
}

/// Tunable detector sensitivity. All thresholds are configurable; the
/// defaults reuse the attenuator's highest activation level where a lock-in
/// weight is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorThresholds {
    /// Weight above which a channel counts as locked in.
    pub howlround_w: f64,
    /// Consecutive steps of non-decreasing dominance required.
    pub howlround_window: usize,
    /// Normalized-entropy floor for collapse.
    pub collapse_entropy: f64,
    /// Weight-rounding granularity for state-revisit hashing.
    pub cycle_quantization: f64,
    /// |confidence − reliability| trigger level.
    pub confidence_gap: f64,
    /// Steps over which systemic drift must grow.
    pub drift_window: usize,
}

impl Default for DetectorThresholds {
    fn default() -> Self {
        DetectorThresholds {
            howlround_w: 0.875,
            howlround_window: 5,
            collapse_entropy: 0.99,
            cycle_quantization: 1e-3,
            confidence_gap: 0.3,
            drift_window: 50,
        }
    }
}

/// Registry of every [`DetectorThresholds`] field accepted by `set`/`get`.
pub const THRESHOLDS: &[crate::attenuator::ParamSpec] = &[
    crate::attenuator::ParamSpec {
        name: "howlround_w",
        doc: "lock-in weight threshold",
    },
    crate::attenuator::ParamSpec {
        name: "howlround_window",
        doc: "consecutive non-decreasing steps required",
    },
    crate::attenuator::ParamSpec {
        name: "collapse_entropy",
        doc: "normalized-entropy floor",
    },
    crate::attenuator::ParamSpec {
        name: "cycle_quantization",
        doc: "weight rounding for cycle hashing",
    },
    crate::attenuator::ParamSpec {
        name: "confidence_gap",
        doc: "|confidence - reliability| trigger",
    },
    crate::attenuator::ParamSpec {
        name: "drift_window",
        doc: "steps of sustained drift required",
    },
];

impl DetectorThresholds {
    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "howlround_w" => self.howlround_w,
            "howlround_window" => self.howlround_window as f64,
            "collapse_entropy" => self.collapse_entropy,
            "cycle_quantization" => self.cycle_quantization,
            "confidence_gap" => self.confidence_gap,
            "drift_window" => self.drift_window as f64,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let as_window = |field: &str| -> Result<usize> {
            if value.is_finite() && value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::invalid(field, "must be a positive integer"))
            }
        };
        match name {
            "howlround_w" => self.howlround_w = value,
            "howlround_window" => self.howlround_window = as_window("howlround_window")?,
            "collapse_entropy" => self.collapse_entropy = value,
            "cycle_quantization" => self.cycle_quantization = value,
            "confidence_gap" => self.confidence_gap = value,
            "drift_window" => self.drift_window = as_window("drift_window")?,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.howlround_w.is_finite() && self.howlround_w > 0.0 && self.howlround_w < 1.0) {
            return Err(Error::invalid("howlround_w", "must lie in (0, 1)"));
        }
        if self.howlround_window < 1 {
            return Err(Error::invalid("howlround_window", "must be at least 1"));
        }
        if !(self.collapse_entropy > 0.0 && self.collapse_entropy <= 1.0) {
            return Err(Error::invalid("collapse_entropy", "must lie in (0, 1]"));
        }
        if !(self.cycle_quantization.is_finite() && self.cycle_quantization > 0.0) {
            return Err(Error::invalid("cycle_quantization", "must be positive"));
        }
        if !(self.confidence_gap.is_finite()
            && self.confidence_gap > 0.0
            && self.confidence_gap < 1.0)
        {
            return Err(Error::invalid("confidence_gap", "must lie in (0, 1)"));
        }
        if self.drift_window < 2 {
            return Err(Error::invalid("drift_window", "must be at least 2"));
        }
        Ok(())
    }
}

// ─── entropy ─────────────────────────────────────────────────────────────────

/// Normalized Shannon entropy `−Σ p ln p / ln K` with `0·ln 0 := 0`.
///
/// The weights must form a distribution (non-negative, summing to 1 within
/// 1e−9). Uniform input gives exactly 1.0 when K is a power of two and is
/// within one ulp otherwise; the result is clamped into `[0, 1]`.
pub fn normalized_entropy(weights: &[f64]) -> Result<f64> {
    if weights.len() < 2 {
        return Err(Error::invalid("weights", "need at least 2 channels"));
    }
    let mut sum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::invalid(
                format!("weights[{i}]"),
                format!("{w} is not a finite non-negative value"),
            ));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "weights",
            format!("sum to {sum}, expected 1 (not a distribution)"),
        ));
    }
    Ok(entropy_of_distribution(weights))
}

/// Entropy for trajectory bookkeeping: rescales by the actual sum and maps a
/// degenerate all-zero vector to 0 instead of erroring.
pub(crate) fn entropy_lenient(weights: &[f64]) -> f64 {
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) || weights.len() < 2 {
        return 0.0;
    }
    let scaled: Vec<f64> = weights.iter().map(|w| w / sum).collect();
    entropy_of_distribution(&scaled)
}

fn entropy_of_distribution(p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for v in p {
        if *v > 0.0 {
            acc += v * v.ln();
        }
    }
    // The leading minus can produce -0.0 for one-hot input; adding zero
    // restores the canonical sign.
    ((-acc / (p.len() as f64).ln()) + 0.0).clamp(0.0, 1.0)
}

// ─── detectors ───────────────────────────────────────────────────────────────

fn argmax(weights: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..weights.len() {
        if weights[i] > weights[best] {
            best = i;
        }
    }
    best
}

fn top_two_gap(weights: &[f64]) -> f64 {
    let mut top = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for w in weights {
        if *w > top {
            second = top;
            top = *w;
        } else if *w > second {
            second = *w;
        }
    }
    top - second
}

/// One channel holds above `howlround_w` with non-decreasing weight for
/// `howlround_window` consecutive steps while being the chosen output each
/// step. Onset is the first step that channel ever crossed the threshold.
pub fn detect_howlround(traj: &Trajectory, th: &DetectorThresholds) -> FailureDiagnosis {
    let records = &traj.records;
    if records.is_empty() {
        return FailureDiagnosis::none();
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for c in 0..traj.k {
        let mut run_len = 0usize;
        let mut prev_w = 0.0f64;
        let mut qualified = false;
        for r in records {
            let w = r.weights_after[c];
            if w > th.howlround_w && r.chosen_output == c {
                if run_len > 0 && w < prev_w - MONOTONE_EPS {
                    run_len = 1;
                } else {
                    run_len += 1;
                }
            } else {
                run_len = 0;
            }
            prev_w = w;
            if run_len >= th.howlround_window {
                qualified = true;
                break;
            }
        }
        if !qualified {
            continue;
        }
        let onset = records
            .iter()
            .position(|r| r.weights_after[c] > th.howlround_w)
            .expect("a qualifying run implies a crossing");
        let peak = records
            .iter()
            .map(|r| r.weights_after[c])
            .fold(f64::NEG_INFINITY, f64::max);
        if best.map(|(o, _, _)| onset < o).unwrap_or(true) {
            best = Some((onset, c, peak));
        }
    }
    match best {
        Some((onset, channel, peak)) => FailureDiagnosis::found(
            FailureKind::Howlround,
            onset,
            &[("channel", channel as f64), ("peak_w_max", peak)],
        ),
        None => FailureDiagnosis::none(),
    }
}

/// Entropy at or above `collapse_entropy` for `howlround_window` consecutive
/// steps while the argmax is unstable: it changes between steps or the top
/// two weights are tied within 1e−9.
pub fn detect_salience_collapse(traj: &Trajectory, th: &DetectorThresholds) -> FailureDiagnosis {
    let records = &traj.records;
    let w = th.howlround_window;
    if records.len() < w {
        return FailureDiagnosis::none();
    }
    for start in 0..=(records.len() - w) {
        let window = &records[start..start + w];
        if !window.iter().all(|r| r.entropy >= th.collapse_entropy) {
            continue;
        }
        let argmaxes: Vec<usize> = window.iter().map(|r| argmax(&r.weights_after)).collect();
        let changes = argmaxes.windows(2).any(|p| p[0] != p[1]);
        let tied = window
            .iter()
            .any(|r| top_two_gap(&r.weights_after) <= TIE_EPS);
        if changes || tied {
            return FailureDiagnosis::found(
                FailureKind::SalienceCollapse,
                start,
                &[("entropy", window[0].entropy), ("window", w as f64)],
            );
        }
    }
    FailureDiagnosis::none()
}

/// The quantized (weights, chosen output) state recurs with a constant
/// period of at least 2, revisited at least three times, without entropy
/// decreasing across the repetitions. A constant state (period 1) is a fixed
/// point, not a loop, and is excluded.
pub fn detect_recursive_entrapment(traj: &Trajectory, th: &DetectorThresholds) -> FailureDiagnosis {
    let records = &traj.records;
    if records.len() < 5 {
        return FailureDiagnosis::none();
    }
    let quantize = |ws: &[f64]| -> Vec<i64> {
        ws.iter()
            .map(|w| (w / th.cycle_quantization).round() as i64)
            .collect()
    };
    let mut seen: BTreeMap<(Vec<i64>, usize), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        seen.entry((quantize(&r.weights_after), r.chosen_output))
            .or_default()
            .push(i);
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for occurrences in seen.values() {
        if occurrences.len() < 4 {
            continue;
        }
        let period = occurrences[1] - occurrences[0];
        if period < 2 {
            continue;
        }
        if occurrences.windows(2).any(|p| p[1] - p[0] != period) {
            continue;
        }
        let h_first = records[occurrences[0]].entropy;
        let h_last = records[*occurrences.last().expect("non-empty")].entropy;
        if h_last < h_first - TIE_EPS {
            continue;
        }
        let onset = occurrences[0];
        let repeats = occurrences.len() - 1;
        let better = match best {
            Some((o, p, _)) => onset < o || (onset == o && period < p),
            None => true,
        };
        if better {
            best = Some((onset, period, repeats));
        }
    }
    match best {
        Some((onset, period, repeats)) => FailureDiagnosis::found(
            FailureKind::RecursiveEntrapment,
            onset,
            &[("cycle_length", period as f64), ("repeats", repeats as f64)],
        ),
        None => FailureDiagnosis::none(),
    }
}

/// The task channel stays above the decision threshold while the resolution
/// channel never crosses it, for a full `drift_window` of consecutive steps.
pub fn detect_hyperfixation(
    traj: &Trajectory,
    task_channel: usize,
    resolution_channel: usize,
    decision_threshold: f64,
    th: &DetectorThresholds,
) -> Result<FailureDiagnosis> {
    let records = &traj.records;
    if records.is_empty() {
        return Err(Error::invalid("trajectory", "empty; nothing to assess"));
    }
    if task_channel >= traj.k || resolution_channel >= traj.k {
        return Err(Error::invalid(
            "task_channel/resolution_channel",
            format!("must be below k={}", traj.k),
        ));
    }
    if task_channel == resolution_channel {
        return Err(Error::invalid(
            "resolution_channel",
            "must differ from task_channel",
        ));
    }
    if !(decision_threshold.is_finite() && decision_threshold > 0.0 && decision_threshold < 1.0) {
        return Err(Error::invalid("decision_threshold", "must lie in (0, 1)"));
    }
    let w = th.drift_window;
    if records.len() < w {
        return Ok(FailureDiagnosis::none());
    }
    for start in 0..=(records.len() - w) {
        let window = &records[start..start + w];
        let fixated = window.iter().all(|r| {
            r.weights_after[task_channel] > decision_threshold
                && r.weights_after[resolution_channel] <= decision_threshold
        });
        if fixated {
            return Ok(FailureDiagnosis::found(
                FailureKind::AnalyticalHyperfixation,
                start,
                &[
                    ("task_weight", window[0].weights_after[task_channel]),
                    (
                        "resolution_weight",
                        window[0].weights_after[resolution_channel],
                    ),
                    ("window", w as f64),
                ],
            ));
        }
    }
    Ok(FailureDiagnosis::none())
}

/// The final weight of some channel sits further than `confidence_gap` from
/// its ground-truth reliability. Reports the worst channel; direction +1
/// means overweighted, −1 means salience starvation. Onset is the first step
/// that channel's gap exceeded the threshold.
pub fn detect_overconfidence(
    traj: &Trajectory,
    reliability: &[f64],
    th: &DetectorThresholds,
) -> Result<FailureDiagnosis> {
    let records = &traj.records;
    if records.is_empty() {
        return Err(Error::invalid("trajectory", "empty; nothing to assess"));
    }
    if reliability.len() != traj.k {
        return Err(Error::invalid(
            "reliability",
            format!("expected {} entries, got {}", traj.k, reliability.len()),
        ));
    }
    let last = &records[records.len() - 1].weights_after;
    let mut worst = 0usize;
    let mut worst_gap = -1.0f64;
    for (i, (w, r)) in last.iter().zip(reliability).enumerate() {
        let gap = (w - r).abs();
        if gap > worst_gap {
            worst_gap = gap;
            worst = i;
        }
    }
    if worst_gap <= th.confidence_gap {
        return Ok(FailureDiagnosis::none());
    }
    let onset = records
        .iter()
        .position(|r| (r.weights_after[worst] - reliability[worst]).abs() > th.confidence_gap)
        .expect("final gap above threshold implies a first crossing");
    let direction = if last[worst] > reliability[worst] {
        1.0
    } else {
        -1.0
    };
    Ok(FailureDiagnosis::found(
        FailureKind::SalientaryOverconfidence,
        onset,
        &[
            ("channel", worst as f64),
            ("gap", worst_gap),
            ("direction", direction),
            ("weight", last[worst]),
            ("reliability", reliability[worst]),
        ],
    ))
}

/// Total-variation distance from the initial distribution grows monotonically
/// (within noise) across a full `drift_window`, the drift touches at least
/// half the channels, and no single channel owns more than 90% of the
/// positive drift. The last condition separates system-wide drift from a
/// localized howlround.
pub fn detect_rbse(traj: &Trajectory, th: &DetectorThresholds) -> Result<FailureDiagnosis> {
    let records = &traj.records;
    let w = th.drift_window;
    if records.len() <= w {
        return Err(Error::invalid(
            "trajectory",
            format!(
                "need more than {w} steps to assess drift, got {}",
                records.len()
            ),
        ));
    }
    let tv: Vec<f64> = records
        .iter()
        .map(|r| {
            r.weights_after
                .iter()
                .zip(&traj.initial_weights)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                * 0.5
        })
        .collect();
    for start in 0..(records.len() - w) {
        let end = start + w;
        let slice = &tv[start..=end];
        if slice.windows(2).any(|p| p[1] < p[0] - DRIFT_EPS) {
            continue;
        }
        if tv[end] - tv[start] <= DRIFT_EPS {
            continue;
        }
        let drift: Vec<f64> = records[end]
            .weights_after
            .iter()
            .zip(&traj.initial_weights)
            .map(|(a, b)| a - b)
            .collect();
        let affected = drift.iter().filter(|d| d.abs() > DRIFT_EPS).count();
        if affected * 2 < traj.k {
            continue;
        }
        let positive: f64 = drift.iter().filter(|d| **d > 0.0).sum();
        if positive <= 0.0 {
            continue;
        }
        let max_share = drift.iter().cloned().fold(0.0f64, f64::max) / positive;
        if max_share > 0.9 {
            continue;
        }
        return Ok(FailureDiagnosis::found(
            FailureKind::Rbse,
            start,
            &[
                ("drift_distance", tv[end]),
                ("channels_affected", affected as f64),
                ("max_share", max_share),
            ],
        ));
    }
    Ok(FailureDiagnosis::none())
}

/// Runs every detector whose preconditions the trajectory and metadata
/// satisfy and returns the positive findings ordered by onset step.
pub fn diagnose(
    traj: &Trajectory,
    meta: &ScenarioMeta,
    th: &DetectorThresholds,
) -> Vec<FailureDiagnosis> {
    let mut out = Vec::new();
    if traj.records.is_empty() {
        return out;
    }
    let mut push = |d: FailureDiagnosis| {
        if d.is_positive() {
            out.push(d);
        }
    };
    push(detect_howlround(traj, th));
    push(detect_salience_collapse(traj, th));
    push(detect_recursive_entrapment(traj, th));
    if let (Some(task), Some(resolution), Some(threshold)) = (
        meta.task_channel,
        meta.resolution_channel,
        meta.decision_threshold,
    ) {
        if let Ok(d) = detect_hyperfixation(traj, task, resolution, threshold, th) {
            push(d);
        }
    }
    if let Some(reliability) = &meta.reliability {
        if reliability.len() == traj.k {
            if let Ok(d) = detect_overconfidence(traj, reliability, th) {
                push(d);
            }
        }
    }
    if traj.records.len() > th.drift_window {
        if let Ok(d) = detect_rbse(traj, th) {
            push(d);
        }
    }
    out.sort_by_key(|d| d.onset_step.unwrap_or(usize::MAX));
    out
}

// ─── tests ───────────────────────────────────────────────────────────────────
