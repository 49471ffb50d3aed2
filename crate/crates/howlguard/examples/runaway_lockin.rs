//! Runs the `runaway` fixture twice: once with the attenuator disabled
//! (weights lock in at the ceiling and the howlround detector fires) and
//! once with it enabled (the same feedback loop settles at a bounded
//! fixed point with a clean diagnosis).
//!
//! Run with `cargo run --example runaway_lockin`.

use howlguard::{
    builtin, diagnose, run_trajectory, AttenuationMode, AttenuatorParams, DetectorThresholds,
};

fn main() {
    let scenario = builtin("runaway").unwrap();
    let params = AttenuatorParams::default();
    let thresholds = DetectorThresholds::default();
    let meta = scenario.meta();

    for (label, on) in [("attenuator off", false), ("attenuator on", true)] {
        let traj = run_trajectory(&scenario, &params, on, AttenuationMode::PerWeight).unwrap();
        let series = traj.max_weight_series();
        let peak = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let last = *series.last().unwrap();
        let lock = series.iter().position(|w| *w >= 0.99);

        println!("{label}");
        println!("  peak max weight   {peak:.6}");
        println!("  final max weight  {last:.6}");
        match lock {
            Some(step) => println!("  locked in (>= 0.99) at step {step}"),
            None => println!("  never crossed 0.99"),
        }
        let ds = diagnose(&traj, &meta, &thresholds);
        if ds.is_empty() {
            println!("  diagnosis: clean");
        }
        for d in &ds {
            match d.onset_step {
                Some(step) => println!("  diagnosis: {} with onset at step {step}", d.kind),
                None => println!("  diagnosis: {}", d.kind),
            }
        }
        println!();
    }
}
