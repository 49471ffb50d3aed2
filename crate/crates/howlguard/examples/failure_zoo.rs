//! Runs every builtin fixture under its documented demonstration
//! configuration and prints the failure mode each one reproduces.
//!
//! Run with `cargo run --example failure_zoo`.

use howlguard::{
    builtin, builtin_demo_config, diagnose, run_trajectory, AttenuationMode, DetectorThresholds,
    BUILTIN_NAMES,
};

fn main() {
    let thresholds = DetectorThresholds::default();
    println!(
        "{:<24} {:<11} {:<26} onset",
        "fixture", "attenuator", "failure mode"
    );
    for name in BUILTIN_NAMES {
        let scenario = builtin(name).unwrap();
        let (on, params) = builtin_demo_config(name).unwrap();
        let traj = run_trajectory(&scenario, &params, on, AttenuationMode::PerWeight).unwrap();
        let ds = diagnose(&traj, &scenario.meta(), &thresholds);
        let att = if on { "on" } else { "off" };
        if ds.is_empty() {
            println!("{name:<24} {att:<11} {:<26} -", "(none)");
        }
        for d in &ds {
            let onset = d
                .onset_step
                .map(|s| s.to_string())
                .unwrap_or_else(|| "-".to_string());
            println!("{name:<24} {att:<11} {:<26} {onset}", d.kind.to_string());
        }
    }
}
