//! Walks the correction factor through its regimes: dormant at low salience,
//! then the exponential, arsech-like, and logarithmic terms waking in turn
//! as their gates open.
//!
//! Run with `cargo run --example attenuator_curves`.

use howlguard::{arsech, beta_final, component_curves, phi, AttenuatorParams};

fn main() {
    let params = AttenuatorParams::default();

    println!("landmarks");
    println!("  arsech(1)        = {:+.6}", arsech(1.0).unwrap());
    println!(
        "  phi(2/3)         = {:+.6}  (sign change of the middle term)",
        phi(2.0 / 3.0).unwrap()
    );
    println!("  phi(0.5)         = {:+.6}", phi(0.5).unwrap());
    println!(
        "  arsech(0.5)      = {:+.6}  (phi stays below arsech everywhere)",
        arsech(0.5).unwrap()
    );
    println!();

    println!("beta at the gate midpoints and beyond");
    println!("  {:>7}  {:>10}", "w", "beta");
    for w in [0.5, params.eps_a, params.eps_b, params.eps_c, 0.95, 0.995] {
        println!("  {:>7.3}  {:>10.6}", w, beta_final(w, &params));
    }
    println!();

    // A coarse grid of the three gated components. The full-resolution CSV
    // comes from the `curves` subcommand.
    let rows = component_curves(9, &params).unwrap();
    println!("component breakdown");
    println!(
        "  {:>7}  {:>10}  {:>10}  {:>10}  {:>10}",
        "w", "exp", "phi", "log", "sum"
    );
    for row in rows {
        println!(
            "  {:>7.3}  {:>10.6}  {:>10.6}  {:>10.6}  {:>10.6}",
            row.w, row.exp_term, row.phi_term, row.log_term, row.sum
        );
    }
}
