//! A single excited source leaks amplitude onto the line, one site per step.
//! Its survival probability is q^n, and the entanglement between the
//! internal register and the radiated wave is the binary entropy of that
//! survival — computed here both by brute-force evolution and from the
//! closed form.
//!
//! Run with: cargo run --example single_decay

use ticktock::density::{partial_trace, Keep};
use ticktock::operators::{ScatterParams, StepOperator};
use ticktock::single_particle::{decay_entropy, source_state};

fn main() -> ticktock::Result<()> {
    let q = 0.9;
    let op = StepOperator::standard(ScatterParams::from_survival(q)?);
    let mut state = source_state(0);

    println!("source decay at q = {q}");
    println!("{:>4} {:>12} {:>16} {:>16} {:>10}", "n", "survival", "entropy (brute)", "entropy (closed)", "support");
    let mut worst: f64 = 0.0;
    for n in 0..=30u64 {
        let survival = q.powi(n as i32);
        let brute = partial_trace(&state, Keep::Internal)?.entropy_bits();
        let closed = decay_entropy(n, q)?;
        worst = worst.max((brute - closed).abs());
        if n % 3 == 0 {
            println!(
                "{n:>4} {survival:>12.6} {brute:>16.12} {closed:>16.12} {:>10}",
                state.support_len()
            );
        }
        state = op.apply(&state)?;
    }

    // The entropy peaks at exactly one bit when q^n crosses 1/2 — one
    // half-life into the decay.
    let half_life = -1.0 / q.log2();
    println!("\nhalf-life: {half_life:.3} steps; peak entropy is one bit there");
    println!("max brute-vs-closed discrepancy: {worst:.3e}");
    Ok(())
}
