//! Dynamic salience attenuation: the β response curve and its components.
//!
//! The attenuator maps a salience weight in `[0, 1]` to a correction factor β
//! consumed as `w_new = w · (1 − β)`. Positive β suppresses an overweighted
//! channel; negative β is an upward correction routed to the starved
//! remainder of the distribution (see [`crate::dynamics::attenuate`]).
//!
//! Three components cover the low, mid, and high salience ranges, each behind
//! its own logistic gate `τ = σ(ρ·(w − ε))`:
//!
//! | term     | shape          | gate opens near | role                     |
//! |----------|----------------|-----------------|--------------------------|
//! | exp_term | `e^(−γw)`      | `eps_a = 0.625` | early, gentle damping    |
//! | phi_term | `ln(2(1−w)/w)` | `eps_b = 0.775` | mid-range, signed        |
//! | log_term | `ln(1+w)`      | `eps_c = 0.875` | high-confidence brake    |
//!
//! The phi term crosses zero at `w = 2/3` and diverges to −∞ as `w → 1`, so
//! the summed response dips below the axis for extreme weights: past roughly
//! `w ≈ 0.84` the clamped β sits at `beta_min` and the correction becomes an
//! upward push on the alternatives rather than a direct cut of the maximum.
//! Below `w = 0.5` all gates are closed and `|β| < 1e−3` (first, do no harm).

use crate::error::{Error, Result};

// ─── parameters ─────────────────────────────────────────────────────────────

/// Tunable shape of the attenuation response.
///
/// Construct via [`Default`] and adjust fields, or use [`AttenuatorParams::set`]
/// with a name from [`PARAMETERS`]. Call [`AttenuatorParams::validate`] after
/// manual edits; the simulation entry points do so on every run.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuatorParams {
    /// Global trim Θ scaling the whole response. `0` disables the attenuator.
    pub theta_global: f64,
    /// Per-term trim for the exponential component.
    pub theta_a: f64,
    /// Per-term trim for the phi component.
    pub theta_b: f64,
    /// Per-term trim for the logarithmic component.
    pub theta_c: f64,
    /// Decay rate γ of the exponential component.
    pub gamma: f64,
    /// Gate steepness for the exponential component.
    pub rho_a: f64,
    /// Gate steepness for the phi component.
    pub rho_b: f64,
    /// Gate steepness for the logarithmic component.
    pub rho_c: f64,
    /// Activation threshold of the exponential component.
    pub eps_a: f64,
    /// Activation threshold of the phi component.
    pub eps_b: f64,
    /// Activation threshold of the logarithmic component.
    pub eps_c: f64,
    /// Domain clamp δ keeping phi's argument inside `[δ, 1−δ]`.
    pub w_clamp_delta: f64,
    /// Lower clamp on β; caps per-step upward correction.
    pub beta_min: f64,
    /// Upper clamp on β; caps per-step suppression.
    pub beta_max: f64,
}

impl Default for AttenuatorParams {
    fn default() -> Self {
        AttenuatorParams {
            theta_global: 1.0,
            theta_a: 1.0,
            theta_b: 1.0,
            theta_c: 1.0,
            gamma: 2.0,
            rho_a: 60.0,
            rho_b: 40.0,
            rho_c: 20.0,
            eps_a: 0.625,
            eps_b: 0.775,
            eps_c: 0.875,
            w_clamp_delta: 1e-6,
            beta_min: -0.5,
            beta_max: 0.95,
        }
    }
}

/// One registry entry per tunable field, used by CLI help, overrides, and sweeps.
pub struct ParamSpec {
    pub name: &'static str,
    pub doc: &'static str,
}

/// Registry of every [`AttenuatorParams`] field accepted by `set`/`get`.
pub const PARAMETERS: &[ParamSpec] = &[
    ParamSpec {
        name: "theta_global",
        doc: "global trim; 0 disables the attenuator",
    },
    ParamSpec {
        name: "theta_a",
        doc: "trim on the exponential term",
    },
    ParamSpec {
        name: "theta_b",
        doc: "trim on the phi term",
    },
    ParamSpec {
        name: "theta_c",
        doc: "trim on the logarithmic term",
    },
    ParamSpec {
        name: "gamma",
        doc: "exponential decay rate",
    },
    ParamSpec {
        name: "rho_a",
        doc: "gate steepness, exponential term",
    },
    ParamSpec {
        name: "rho_b",
        doc: "gate steepness, phi term",
    },
    ParamSpec {
        name: "rho_c",
        doc: "gate steepness, logarithmic term",
    },
    ParamSpec {
        name: "eps_a",
        doc: "activation threshold, exponential term",
    },
    ParamSpec {
        name: "eps_b",
        doc: "activation threshold, phi term",
    },
    ParamSpec {
        name: "eps_c",
        doc: "activation threshold, logarithmic term",
    },
    ParamSpec {
        name: "w_clamp_delta",
        doc: "domain clamp for phi's argument",
    },
    ParamSpec {
        name: "beta_min",
        doc: "lower clamp on beta (amplification cap)",
    },
    ParamSpec {
        name: "beta_max",
        doc: "upper clamp on beta (suppression cap)",
    },
];

impl AttenuatorParams {
    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "theta_global" => self.theta_global,
            "theta_a" => self.theta_a,
            "theta_b" => self.theta_b,
            "theta_c" => self.theta_c,
            "gamma" => self.gamma,
            "rho_a" => self.rho_a,
            "rho_b" => self.rho_b,
            "rho_c" => self.rho_c,
            "eps_a" => self.eps_a,
            "eps_b" => self.eps_b,
            "eps_c" => self.eps_c,
            "w_clamp_delta" => self.w_clamp_delta,
            "beta_min" => self.beta_min,
            "beta_max" => self.beta_max,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "theta_global" => &mut self.theta_global,
            "theta_a" => &mut self.theta_a,
            "theta_b" => &mut self.theta_b,
            "theta_c" => &mut self.theta_c,
            "gamma" => &mut self.gamma,
            "rho_a" => &mut self.rho_a,
            "rho_b" => &mut self.rho_b,
            "rho_c" => &mut self.rho_c,
            "eps_a" => &mut self.eps_a,
            "eps_b" => &mut self.eps_b,
            "eps_c" => &mut self.eps_c,
            "w_clamp_delta" => &mut self.w_clamp_delta,
            "beta_min" => &mut self.beta_min,
            "beta_max" => &mut self.beta_max,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        };
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("theta_global", self.theta_global),
            ("theta_a", self.theta_a),
            ("theta_b", self.theta_b),
            ("theta_c", self.theta_c),
            ("gamma", self.gamma),
            ("rho_a", self.rho_a),
            ("rho_b", self.rho_b),
            ("rho_c", self.rho_c),
            ("eps_a", self.eps_a),
            ("eps_b", self.eps_b),
            ("eps_c", self.eps_c),
            ("w_clamp_delta", self.w_clamp_delta),
            ("beta_min", self.beta_min),
            ("beta_max", self.beta_max),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("theta_global", self.theta_global),
            ("theta_a", self.theta_a),
            ("theta_b", self.theta_b),
            ("theta_c", self.theta_c),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, "must be >= 0"));
            }
        }
        if self.gamma <= 0.0 {
            return Err(Error::invalid("gamma", "must be > 0"));
        }
        for (name, v) in [
            ("rho_a", self.rho_a),
            ("rho_b", self.rho_b),
            ("rho_c", self.rho_c),
        ] {
            if v <= 0.0 {
                return Err(Error::invalid(name, "must be > 0"));
            }
        }
        if !(self.eps_a > 0.0
            && self.eps_a < self.eps_b
            && self.eps_b < self.eps_c
            && self.eps_c < 1.0)
        {
            return Err(Error::invalid(
                "eps_a/eps_b/eps_c",
                "thresholds must satisfy 0 < eps_a < eps_b < eps_c < 1",
            ));
        }
        if !(self.w_clamp_delta > 0.0 && self.w_clamp_delta <= 0.01) {
            return Err(Error::invalid("w_clamp_delta", "must lie in (0, 0.01]"));
        }
        if !(self.beta_min <= 0.0 && 0.0 <= self.beta_max) {
            return Err(Error::invalid(
                "beta_min/beta_max",
                "clamp must satisfy beta_min <= 0 <= beta_max",
            ));
        }
        Ok(())
    }
}

// ─── scalar functions ────────────────────────────────────────────────────────

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Inverse hyperbolic secant, `ln(1/x + sqrt(1/x² − 1))`, defined on `(0, 1]`.
///
/// `arsech(1)` is exactly `0`; the function grows without bound as `x → 0+`.
pub fn arsech(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain {
            func: "arsech",
            value: x,
            domain: "(0, 1]",
        });
    }
    let inv = 1.0 / x;
    Ok((inv + (inv * inv - 1.0).sqrt()).ln())
}

/// Modified inverse hyperbolic secant `ln(1/x + sqrt(1/x²) − 2)` on `(0, 1)`.
///
/// Evaluated through the algebraically equal form `ln(2(1−x)/x)`, which stays
/// accurate next to the pole at `x = 1` where the raw transcription loses
/// roughly six digits to cancellation. Crosses zero at `x = 2/3`, is positive
/// below and negative above, and is strictly decreasing.
pub fn phi(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain {
            func: "phi",
            value: x,
            domain: "(0, 1)",
        });
    }
    Ok(phi_unchecked(x))
}

fn phi_unchecked(x: f64) -> f64 {
    (2.0 * (1.0 - x) / x).ln()
}

/// Logistic activation gate `σ(ρ·(w_max − ε))`.
///
/// Returns exactly `0.5` at `w_max = ε`, is strictly increasing in `w_max`,
/// and saturates smoothly to `0`/`1` without producing NaN for finite input.
pub fn gate(w_max: f64, rho: f64, eps: f64) -> f64 {
    logistic(rho * (w_max - eps))
}

// ─── response curve ──────────────────────────────────────────────────────────

/// Gated but untrimmed components (exp, phi, log) at a given weight.
fn components(w_max: f64, p: &AttenuatorParams) -> (f64, f64, f64) {
    let w = w_max.clamp(0.0, 1.0);
    // Only phi needs its argument kept off the poles at 0 and 1.
    let wp = w.clamp(p.w_clamp_delta, 1.0 - p.w_clamp_delta);
    let exp_term = gate(w, p.rho_a, p.eps_a) * (-p.gamma * w).exp();
    let phi_term = gate(w, p.rho_b, p.eps_b) * phi_unchecked(wp);
    let log_term = gate(w, p.rho_c, p.eps_c) * w.ln_1p();
    (exp_term, phi_term, log_term)
}

/// Unclamped three-term response `τ_a·e^(−γw) + τ_b·φ(w) + τ_c·ln(1+w)`.
pub fn beta_basic_raw(w_max: f64, params: &AttenuatorParams) -> f64 {
    let (a, b, c) = components(w_max, params);
    a + b + c
}

/// Three-term response clamped into `[beta_min, beta_max]`.
pub fn beta_basic(w_max: f64, params: &AttenuatorParams) -> f64 {
    beta_basic_raw(w_max, params).clamp(params.beta_min, params.beta_max)
}

/// Unclamped trimmed response `Θ·(θ_a·A + θ_b·B + θ_c·C)`.
///
/// With all trims at one this is bit-identical to [`beta_basic_raw`].
pub fn beta_final_raw(w_max: f64, params: &AttenuatorParams) -> f64 {
    let (a, b, c) = components(w_max, params);
    params.theta_global * (params.theta_a * a + params.theta_b * b + params.theta_c * c)
}

/// Trimmed response clamped into `[beta_min, beta_max]`. The production curve.
pub fn beta_final(w_max: f64, params: &AttenuatorParams) -> f64 {
    beta_final_raw(w_max, params).clamp(params.beta_min, params.beta_max)
}

/// Applies a correction factor to one weight: `clamp(w·(1−β), 0, 1)`.
pub fn apply_correction(w: f64, beta: f64) -> f64 {
    (w * (1.0 - beta)).clamp(0.0, 1.0)
}

/// One sample of the response curve split into its trimmed components.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub w: f64,
    pub exp_term: f64,
    pub phi_term: f64,
    pub log_term: f64,
    /// The clamped production response, `beta_final(w)`.
    pub sum: f64,
}

/// Samples the response components on an even grid over `[δ, 1−δ]`.
pub fn component_curves(grid_size: usize, params: &AttenuatorParams) -> Result<Vec<CurveRow>> {
    params.validate()?;
    if grid_size < 2 {
        return Err(Error::invalid("grid_size", "must be at least 2"));
    }
    let lo = params.w_clamp_delta;
    let hi = 1.0 - params.w_clamp_delta;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let mut rows = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let w = if i + 1 == grid_size {
            hi
        } else {
            lo + step * i as f64
        };
        let (a, b, c) = components(w, params);
        rows.push(CurveRow {
            w,
            exp_term: params.theta_global * (params.theta_a * a),
            phi_term: params.theta_global * (params.theta_b * b),
            log_term: params.theta_global * (params.theta_c * c),
            sum: beta_final(w, params),
        });
    }
    Ok(rows)
}

// ─── tests ───────────────────────────────────────────────────────────────────
