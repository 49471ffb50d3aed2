//! Over-suppression flattens every weight into an exact tie (salience
//! collapse), then a single micro priority bump on one channel is enough
//! for ordinary reinforcement to re-establish a unique preference.
//!
//! Run with `cargo run --example collapse_and_bump`.

use howlguard::scenario::{equalization_params, Drive, InitialWeights, Schedule};
use howlguard::{
    builtin, diagnose, micro_priority_bump, run_trajectory, AttenuationMode, DetectorThresholds,
    FailureKind, ReinforcementModel, SalienceState, Scenario,
};

fn main() {
    // Strong suppression (low gates, high floor on beta) erases structure.
    let scenario = builtin("equalization").unwrap();
    let params = equalization_params();
    let thresholds = DetectorThresholds::default();
    let traj = run_trajectory(&scenario, &params, true, AttenuationMode::PerWeight).unwrap();

    println!(
        "after {} over-suppressed steps: {:?}",
        scenario.steps,
        traj.final_weights()
    );
    let ds = diagnose(&traj, &scenario.meta(), &thresholds);
    let collapse = ds
        .iter()
        .find(|d| d.kind == FailureKind::SalienceCollapse)
        .expect("collapse not diagnosed");
    println!(
        "diagnosed {} with onset at step {}",
        collapse.kind,
        collapse.onset_step.unwrap()
    );

    // One nudge breaks the tie.
    let mut state = SalienceState::new(traj.final_weights().to_vec()).unwrap();
    micro_priority_bump(&mut state, 2, 0.01, true).unwrap();
    println!("bumped channel 2 by 0.01: {:?}", state.weights);

    let resume = Scenario {
        id: "post_bump".to_string(),
        k: scenario.k,
        initial: InitialWeights::Explicit(state.weights.clone()),
        schedule: Schedule::Constant(2),
        steps: 20,
        model: ReinforcementModel {
            alpha: 0.1,
            ..ReinforcementModel::default()
        },
        reliability: None,
        seed: 42,
        drive: Drive::Input,
        task_channel: None,
        resolution_channel: None,
        decision_threshold: None,
    };
    let resumed = run_trajectory(
        &resume,
        &howlguard::AttenuatorParams::default(),
        false,
        AttenuationMode::PerWeight,
    )
    .unwrap();
    let finals = resumed.final_weights();
    let best = finals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    println!(
        "after 20 ordinary steps the argmax is channel {} at {:.6}",
        best.0, best.1
    );
}
