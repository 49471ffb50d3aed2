//! Starts a channel at near-certainty (0.995) and shows the enabled
//! attenuator pulling it back out of the lock-in band while reinforcement
//! keeps pushing the other way.
//!
//! Run with `cargo run --example lockin_recovery`.

use howlguard::scenario::{Drive, InitialWeights, Schedule};
use howlguard::{
    compute_metric, run_trajectory, AttenuationMode, AttenuatorParams, Metric, ReinforcementModel,
    Scenario,
};

fn main() {
    let k = 8;
    let hot = 0.995;
    let mut initial = vec![(1.0 - hot) / (k as f64 - 1.0); k];
    initial[0] = hot;
    let scenario = Scenario {
        id: "hot_start".to_string(),
        k,
        initial: InitialWeights::Explicit(initial),
        schedule: Schedule::Constant(1),
        steps: 120,
        model: ReinforcementModel {
            alpha: 0.2,
            ..ReinforcementModel::default()
        },
        reliability: None,
        seed: 42,
        drive: Drive::Input,
        task_channel: None,
        resolution_channel: None,
        decision_threshold: None,
    };

    let params = AttenuatorParams::default();
    let traj = run_trajectory(&scenario, &params, true, AttenuationMode::PerWeight).unwrap();
    let series = traj.max_weight_series();

    println!("start at {hot}, after one corrected step {:.6}", series[0]);
    let gates = [
        (params.eps_c, "top"),
        (params.eps_b, "middle"),
        (params.eps_a, "bottom"),
    ];
    let mut prev = hot;
    for (step, w) in series.iter().enumerate() {
        for (gate, name) in gates {
            if prev > gate && *w <= gate {
                println!(
                    "step {step:>3}  max weight {w:.6}  crossed below the {name} gate ({gate})"
                );
            }
        }
        prev = *w;
    }

    let recovery = compute_metric(&traj, Metric::RecoverySteps, params.eps_a);
    println!(
        "first step with max weight below {}: step {recovery}",
        params.eps_a
    );
    println!("final max weight {:.6}", series.last().unwrap());
}
