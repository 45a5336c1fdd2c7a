//! Pinch the line into a ring of length l joined through a 2x2 junction
//! port. With a near-decoupling port the interior behaves like a leaky
//! cavity: a particle circulating inside survives each pass of the junction
//! with probability |kappa'|^2, so after m passages exactly
//! (|kappa'|^2)^m of it is left — a discrete radioactive decay of a tiny
//! closed universe.
//!
//! Run with: cargo run --example pinch_ring_decay

use ticktock::pinch::{ring_survival_curve, PinchTopology};

fn main() -> ticktock::Result<()> {
    let ring_len = 4u32;
    let survival = 0.9f64; // |kappa'|^2 per passage
    let topo = PinchTopology::new(ring_len)?;
    let curve = ring_survival_curve(&topo, survival.sqrt(), 48, None)?;

    println!("leaky ring: l = {ring_len}, survival per passage = {survival}");
    println!(
        "{:>4} {:>10} {:>14} {:>14} {:>14}",
        "n", "passages", "p(interior)", "closed q^m", "entropy"
    );
    let mut worst: f64 = 0.0;
    for p in &curve {
        worst = worst
            .max((p.interior - p.interior_closed).abs())
            .max((p.entropy - p.entropy_closed).abs());
        if p.n % 4 == 0 {
            println!(
                "{:>4} {:>10} {:>14.10} {:>14.10} {:>14.10}",
                p.n,
                p.n / ring_len as u64,
                p.interior,
                p.interior_closed,
                p.entropy
            );
        }
    }

    println!("\nthe interior drains only at junction passages (every {ring_len} steps);");
    println!("interior/exterior entanglement is the binary entropy of the survival");
    println!("max brute-vs-closed discrepancy: {worst:.3e}");
    Ok(())
}
