//! Acceptance suite: each test checks one numbered criterion at its stated
//! tolerance and prints a `[PASS]` line, so `--nocapture` reads as a
//! checklist. Frozen constants are regression values captured from the
//! simulation oracle; loosening them is a behavior change, not a fix.

use astro_float::{BigFloat, Consts, RoundingMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use howlguard::attenuator::{
    arsech, beta_basic_raw, beta_final, beta_final_raw, component_curves, gate, phi,
    AttenuatorParams,
};
use howlguard::diagnostics::{diagnose, DetectorThresholds, FailureKind};
use howlguard::dynamics::{
    micro_priority_bump, run_trajectory, AttenuationMode, ReinforcementModel, SalienceState,
};
use howlguard::emit::write_trajectory;
use howlguard::scenario::{
    builtin, builtin_demo_config, compute_metric, Drive, InitialWeights, Metric, Scenario,
    Schedule, BUILTIN_NAMES,
};

fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn bare_scenario(id: &str, k: usize) -> Scenario {
    Scenario {
        id: id.to_string(),
        k,
        initial: InitialWeights::Uniform,
        schedule: Schedule::Constant(0),
        steps: 1,
        model: ReinforcementModel::default(),
        reliability: None,
        seed: 42,
        drive: Drive::Input,
        task_channel: None,
        resolution_channel: None,
        decision_threshold: None,
    }
}

#[test]
fn ac01_phi_identity_and_zero() {
    for x in grid(10_000, 1e-6, 1.0 - 1e-6) {
        let reference = (2.0 * (1.0 - x) / x).ln();
        let got = phi(x).unwrap();
        assert!(
            (got - reference).abs() < 1e-12,
            "phi({x}) = {got}, reference {reference}"
        );
    }
    let z = 2.0 / 3.0;
    assert!(
        phi(z).unwrap().abs() < 1e-12,
        "phi(2/3) = {}",
        phi(z).unwrap()
    );
    assert!(phi(z - 1e-9).unwrap() > 0.0);
    assert!(phi(z + 1e-9).unwrap() < 0.0);
    println!(
        "[PASS] AC1: phi identity within 1e-12 on 10,000 points; zero bracketed at 2/3 within 1e-9"
    );
}

#[test]
fn ac02_phi_sits_below_arsech() {
    let n = 10_000;
    for i in 1..n {
        let x = i as f64 / n as f64;
        let p = phi(x).unwrap();
        let a = arsech(x).unwrap();
        assert!(p < a, "phi({x}) = {p} not below arsech = {a}");
    }
    assert_eq!(arsech(1.0).unwrap(), 0.0);
    println!("[PASS] AC2: phi(x) < arsech(x) across (0,1); arsech(1) = 0 exactly");
}

#[test]
fn ac03_gate_midpoint_and_monotonicity() {
    let rhos = [5.0, 20.0, 40.0, 60.0, 100.0];
    let epss = [0.1, 0.625, 0.775, 0.875, 0.95];
    for &rho in &rhos {
        for &eps in &epss {
            assert!(
                (gate(eps, rho, eps) - 0.5).abs() < 1e-15,
                "gate(eps) at rho={rho}, eps={eps}"
            );
            let mut prev = f64::NEG_INFINITY;
            for w in grid(1000, 0.0, 1.0) {
                let g = gate(w, rho, eps);
                assert!(
                    g >= prev,
                    "gate not monotone at w={w}, rho={rho}, eps={eps}"
                );
                prev = g;
            }
            assert!(gate(eps - 0.05, rho, eps) < 0.5);
            assert!(gate(eps + 0.05, rho, eps) > 0.5);
        }
    }
    println!("[PASS] AC3: gate(eps) = 0.5 within 1e-15 and monotone on a 5x5 (rho, eps) lattice");
}

#[test]
fn ac04_weighted_sum_reduces_to_plain_sum() {
    let params = AttenuatorParams::default();
    assert_eq!(params.theta_global, 1.0);
    assert_eq!(
        (params.theta_a, params.theta_b, params.theta_c),
        (1.0, 1.0, 1.0)
    );
    for w in grid(1000, 0.0, 1.0) {
        let weighted = beta_final_raw(w, &params);
        let plain = beta_basic_raw(w, &params);
        assert!(
            (weighted - plain).abs() < 1e-12,
            "pre-clamp mismatch at w={w}: {weighted} vs {plain}"
        );
    }
    println!("[PASS] AC4: unit trims make the weighted response equal the plain sum within 1e-12 on 1,000 points");
}

#[test]
fn ac05_do_no_harm() {
    let params = AttenuatorParams::default();
    for w in grid(5001, 0.0, 0.5) {
        let b = beta_final(w, &params);
        assert!(b.abs() < 1e-3, "beta({w}) = {b} not inert below 0.5");
    }

    // Quiescent runs: nothing reinforced, so correction must not move the
    // state. At rest (uniform, normalized) the equal per-channel response
    // cancels through renormalization; with low unnormalized mass every
    // gate is shut.
    let mut uniform = bare_scenario("quiescent_uniform", 8);
    uniform.steps = 50;
    uniform.model = ReinforcementModel {
        alpha: 0.0,
        ..ReinforcementModel::default()
    };
    let mut low_mass = bare_scenario("quiescent_low_mass", 6);
    low_mass.steps = 50;
    low_mass.initial = InitialWeights::Explicit(vec![0.02; 6]);
    low_mass.model = ReinforcementModel {
        alpha: 0.0,
        normalized: false,
        ..ReinforcementModel::default()
    };

    for sc in [uniform, low_mass] {
        let on = run_trajectory(&sc, &params, true, AttenuationMode::PerWeight).unwrap();
        let off = run_trajectory(&sc, &params, false, AttenuationMode::PerWeight).unwrap();
        for (a, b) in on.records.iter().zip(&off.records) {
            for (wa, wb) in a.weights_after.iter().zip(&b.weights_after) {
                assert!(
                    (wa - wb).abs() < 1e-9,
                    "{}: quiescent divergence {wa} vs {wb}",
                    sc.id
                );
            }
        }
    }
    println!(
        "[PASS] AC5: |beta| < 1e-3 for w <= 0.5; quiescent trajectories identical within 1e-9"
    );
}

#[test]
fn ac06_no_spikes_or_discontinuities() {
    let params = AttenuatorParams::default();
    let rows = component_curves(10_000, &params).unwrap();
    let max_jump = rows
        .windows(2)
        .map(|p| (p[1].sum - p[0].sum).abs())
        .fold(0.0_f64, f64::max);
    assert!(
        max_jump < 10.0 / 10_000.0,
        "max adjacent difference {max_jump}"
    );
    println!("[PASS] AC6: max adjacent difference {max_jump:.3e} < 1e-3 on a 10,000-point grid");
}

#[test]
fn ac07_howlround_reproduction_and_recovery() {
    let params = AttenuatorParams::default();
    let thresholds = DetectorThresholds::default();
    let scenario = builtin("runaway").unwrap();

    // Uncorrected: locks in fast.
    let off = run_trajectory(&scenario, &params, false, AttenuationMode::PerWeight).unwrap();
    let series = off.max_weight_series();
    let lock_step = series
        .iter()
        .position(|w| *w >= 0.99)
        .expect("never locked in");
    assert!(lock_step <= 60, "lock-in took {lock_step} steps");
    assert_eq!(lock_step, 42); // frozen regression value
    let ds = diagnose(&off, &scenario.meta(), &thresholds);
    let howl = ds
        .iter()
        .find(|d| d.kind == FailureKind::Howlround)
        .expect("no howlround diagnosed");
    assert_eq!(howl.onset_step, Some(39)); // frozen regression value

    // Corrected: bounded, healthy, converges.
    let on = run_trajectory(&scenario, &params, true, AttenuationMode::PerWeight).unwrap();
    let series = on.max_weight_series();
    assert!(series.iter().all(|w| *w < 0.99));
    let last = *series.last().unwrap();
    assert!(last < 0.875, "corrected run ended at {last}");
    let peak = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((peak - 0.569_230_981_365_763_6).abs() < 1e-12); // frozen
    assert!((last - 0.567_741_544_645_895_7).abs() < 1e-12); // frozen
    assert!(diagnose(&on, &scenario.meta(), &thresholds).is_empty());

    // Recovery: start from near-certainty, watch the correction pull it down.
    let mut hot = bare_scenario("recovery", 8);
    hot.steps = 120;
    hot.schedule = Schedule::Constant(1);
    hot.model = ReinforcementModel {
        alpha: 0.2,
        ..ReinforcementModel::default()
    };
    let mut initial = vec![0.005 / 7.0; 8];
    initial[0] = 0.995;
    hot.initial = InitialWeights::Explicit(initial);
    let recovered = run_trajectory(&hot, &params, true, AttenuationMode::PerWeight).unwrap();
    let steps = compute_metric(&recovered, Metric::RecoverySteps, params.eps_a);
    assert!(steps.is_finite(), "never recovered");
    assert_eq!(steps, 11.0); // frozen regression value
    println!("[PASS] AC7: lock-in at step 42 (<= 60) with Howlround; corrected run peaks at {peak:.4}, ends at {last:.4}, empty diagnosis; recovery in {steps} steps");
}

#[test]
fn ac08_collapse_and_bump() {
    let params = AttenuatorParams::default();
    let thresholds = DetectorThresholds::default();

    let mut flat = bare_scenario("flatline", 4);
    flat.steps = 30;
    flat.model = ReinforcementModel {
        alpha: 0.0,
        ..ReinforcementModel::default()
    };
    let traj = run_trajectory(&flat, &params, false, AttenuationMode::PerWeight).unwrap();
    let ds = diagnose(&traj, &flat.meta(), &thresholds);
    assert!(
        ds.iter().any(|d| d.kind == FailureKind::SalienceCollapse),
        "uniform trajectory not diagnosed as collapse: {ds:?}"
    );

    let mut state = SalienceState::new(traj.final_weights().to_vec()).unwrap();
    micro_priority_bump(&mut state, 2, 0.01, true).unwrap();

    let mut resume = bare_scenario("post_bump", 4);
    resume.steps = 20;
    resume.schedule = Schedule::Constant(2);
    resume.initial = InitialWeights::Explicit(state.weights.clone());
    resume.model = ReinforcementModel {
        alpha: 0.1,
        ..ReinforcementModel::default()
    };
    let resumed = run_trajectory(&resume, &params, false, AttenuationMode::PerWeight).unwrap();
    let finals = resumed.final_weights();
    let best = finals[2];
    assert!(best > 0.5, "bumped channel only reached {best}");
    for (i, w) in finals.iter().enumerate() {
        if i != 2 {
            assert!(
                *w < best,
                "channel {i} at {w} ties or beats the bumped channel"
            );
        }
    }
    assert!((best - 0.699_897_963_726_087_8).abs() < 1e-9); // frozen
    println!("[PASS] AC8: uniform run diagnosed SalienceCollapse; bumped channel is unique argmax at {best:.4} > 0.5");
}

#[test]
fn ac09_extended_precision_oracle() {
    const P: usize = 256;
    const RM: RoundingMode = RoundingMode::None;
    let mut cc = Consts::new().unwrap();
    let one = BigFloat::from_f64(1.0, P);
    let two = BigFloat::from_f64(2.0, P);

    // Straight transcription of the production response at 256-bit
    // precision: logistic gates, exp term, phi written exactly as
    // ln(1/x + sqrt(1/x^2) - 2), log term, theta-weighted sum.
    let logistic_hp = |z: &BigFloat, cc: &mut Consts| -> BigFloat {
        let ez = z.neg().exp(P, RM, cc);
        one.div(&one.add(&ez, P, RM), P, RM)
    };
    let oracle = |w: f64, p: &AttenuatorParams, cc: &mut Consts| -> BigFloat {
        let wb = BigFloat::from_f64(w, P);
        let gate_hp = |rho: f64, eps: f64, cc: &mut Consts| {
            let z =
                BigFloat::from_f64(rho, P).mul(&wb.sub(&BigFloat::from_f64(eps, P), P, RM), P, RM);
            logistic_hp(&z, cc)
        };
        let tau_a = gate_hp(p.rho_a, p.eps_a, cc);
        let tau_b = gate_hp(p.rho_b, p.eps_b, cc);
        let tau_c = gate_hp(p.rho_c, p.eps_c, cc);
        let exp_term = wb
            .mul(&BigFloat::from_f64(-p.gamma, P), P, RM)
            .exp(P, RM, cc);
        let inv = one.div(&wb, P, RM);
        let inv_sq_root = one.div(&wb.mul(&wb, P, RM), P, RM).sqrt(P, RM);
        let phi_term = inv.add(&inv_sq_root, P, RM).sub(&two, P, RM).ln(P, RM, cc);
        let log_term = one.add(&wb, P, RM).ln(P, RM, cc);
        let a = BigFloat::from_f64(p.theta_a, P).mul(&tau_a.mul(&exp_term, P, RM), P, RM);
        let b = BigFloat::from_f64(p.theta_b, P).mul(&tau_b.mul(&phi_term, P, RM), P, RM);
        let c = BigFloat::from_f64(p.theta_c, P).mul(&tau_c.mul(&log_term, P, RM), P, RM);
        BigFloat::from_f64(p.theta_global, P).mul(&a.add(&b, P, RM).add(&c, P, RM), P, RM)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bound = BigFloat::from_f64(1e-9, P);
    let mut checked = 0;
    while checked < 1000 {
        let w: f64 = rng.gen_range(0.05..0.995);
        let params = AttenuatorParams {
            gamma: rng.gen_range(0.5..4.0),
            rho_a: rng.gen_range(10.0..80.0),
            rho_b: rng.gen_range(10.0..80.0),
            rho_c: rng.gen_range(10.0..80.0),
            eps_a: rng.gen_range(0.3..0.5),
            eps_b: rng.gen_range(0.55..0.7),
            eps_c: rng.gen_range(0.75..0.95),
            theta_a: rng.gen_range(0.25..2.0),
            theta_b: rng.gen_range(0.25..2.0),
            theta_c: rng.gen_range(0.25..2.0),
            theta_global: rng.gen_range(0.25..2.0),
            ..Default::default()
        };
        params.validate().unwrap();

        let reference = oracle(w, &params, &mut cc);
        // Relative error is meaningless at the response's zero crossings;
        // the draw ranges make these rare, skip them without consuming a
        // trial so the count stays at 1,000.
        if matches!(reference.abs().cmp(&BigFloat::from_f64(1e-4, P)), Some(c) if c < 0) {
            continue;
        }
        let mine = BigFloat::from_f64(beta_final_raw(w, &params), P);
        let rel = mine.sub(&reference, P, RM).div(&reference, P, RM).abs();
        assert!(
            matches!(rel.cmp(&bound), Some(c) if c < 0),
            "draw {checked}: w={w}, params={params:?}, rel err {rel:?}"
        );
        checked += 1;
    }
    println!(
        "[PASS] AC9: 1,000 random draws match the 256-bit transcription to relative error < 1e-9"
    );
}

#[test]
fn ac10_builtin_csv_determinism() {
    for name in BUILTIN_NAMES {
        let render = || {
            let scenario = builtin(name).unwrap();
            let (on, params) = builtin_demo_config(name).unwrap();
            let traj = run_trajectory(&scenario, &params, on, AttenuationMode::PerWeight).unwrap();
            let mut buf = Vec::new();
            write_trajectory(&mut buf, &traj).unwrap();
            buf
        };
        assert_eq!(render(), render(), "{name} CSV not reproducible");
    }
    println!("[PASS] AC10: two renders of every builtin produce byte-identical CSV");
}
