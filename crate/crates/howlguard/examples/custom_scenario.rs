//! Builds a scenario from JSON (the same schema the CLI loads from disk),
//! runs it with softmax selection, and prints the trajectory CSV plus a
//! diagnosis.
//!
//! Run with `cargo run --example custom_scenario`.

use howlguard::emit::{write_diagnoses_text, write_trajectory};
use howlguard::{
    diagnose, parse_scenario, run_trajectory, AttenuationMode, AttenuatorParams, DetectorThresholds,
};

const SCENARIO: &str = r#"{
    "id": "softmax_demo",
    "k": 4,
    "steps": 12,
    "initial": [0.4, 0.3, 0.2, 0.1],
    "schedule": {"random": {"seed": 5}},
    "model": {"alpha": 0.15, "selection": "softmax", "temperature": 0.7},
    "drive": "output",
    "seed": 1
}"#;

fn main() {
    let scenario = parse_scenario(SCENARIO).unwrap();
    let traj = run_trajectory(
        &scenario,
        &AttenuatorParams::default(),
        true,
        AttenuationMode::PerWeight,
    )
    .unwrap();

    let mut stdout = std::io::stdout().lock();
    write_trajectory(&mut stdout, &traj).unwrap();
    println!();

    let ds = diagnose(&traj, &scenario.meta(), &DetectorThresholds::default());
    write_diagnoses_text(&mut stdout, &ds).unwrap();
}
