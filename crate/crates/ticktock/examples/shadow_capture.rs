//! A source released one site early (at -1) slips partly past the detector:
//! the piece that scatters on the very first step is never flipped, leaving
//! a one-bit "shadow" — the internal register stays entangled with whether
//! the escape happened, and the entropy of that record never exceeds one
//! bit no matter how long the decay runs.
//!
//! Run with: cargo run --example shadow_capture

use ticktock::density::{partial_trace, Keep};
use ticktock::operators::{ScatterParams, StepOperator};
use ticktock::single_particle::{shadow_entropy, source_state};

fn main() -> ticktock::Result<()> {
    let q = 0.95;
    let op = StepOperator::standard(ScatterParams::from_survival(q)?);
    let mut state = op.apply(&source_state(-1))?;

    println!("shadow entropy at q = {q} (source starts at site -1)");
    println!("{:>4} {:>16} {:>16}", "n", "entropy (brute)", "entropy (closed)");
    let mut worst: f64 = 0.0;
    let mut peak = (0u64, 0.0f64);
    for n in 1..=150u64 {
        let brute = partial_trace(&state, Keep::Internal)?.entropy_bits();
        let closed = shadow_entropy(n, q)?;
        worst = worst.max((brute - closed).abs());
        if brute > peak.1 {
            peak = (n, brute);
        }
        if n <= 5 || n % 25 == 0 {
            println!("{n:>4} {brute:>16.12} {closed:>16.12}");
        }
        if n < 150 {
            state = op.apply(&state)?;
        }
    }

    println!("\npeak {:.6} bits at n = {} — the shadow saturates below one bit", peak.1, peak.0);
    println!("max brute-vs-closed discrepancy: {worst:.3e}");
    Ok(())
}
