//! Sweeps attenuator parameters against the runaway fixture and reports
//! the peak salience each setting allows, in the same CSV the `sweep`
//! subcommand emits.
//!
//! Run with `cargo run --example parameter_sweep`.

use howlguard::emit::write_sweep;
use howlguard::{builtin, sweep, AttenuatorParams, Metric, SweepSpec};

fn main() {
    let scenario = builtin("runaway").unwrap();
    let base = AttenuatorParams::default();

    // theta_global 0 disables the correction entirely; 1 is the default.
    let onoff = SweepSpec {
        param: "theta_global".to_string(),
        from: 0.0,
        to: 1.0,
        steps: 2,
        metric: Metric::PeakWMax,
    };
    let rows = sweep(&scenario, &onoff, &base).unwrap();
    let mut stdout = std::io::stdout().lock();
    write_sweep(&mut stdout, &rows).unwrap();
    println!();

    // Pushing the top gate later admits slightly higher peaks.
    let top_gate = SweepSpec {
        param: "eps_c".to_string(),
        from: 0.875,
        to: 0.95,
        steps: 4,
        metric: Metric::PeakWMax,
    };
    let rows = sweep(&scenario, &top_gate, &base).unwrap();
    write_sweep(&mut stdout, &rows).unwrap();
}
