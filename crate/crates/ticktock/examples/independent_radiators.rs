//! Several sources radiating independently: distinguishable radiators with
//! their own survival probabilities and staggered release sites. The joint
//! source-radiation entanglement entropy is exactly the sum of the
//! individual curves — verified here by evolving the three-particle state
//! by brute force and comparing against the additive closed form.
//!
//! Run with: cargo run --example independent_radiators

use ticktock::multi_particle::{
    independent_radiators_entropy, radiators_joint_entropy, RadiatorSpec,
};

fn main() -> ticktock::Result<()> {
    let specs = [
        RadiatorSpec { q: 0.9, start_site: 0 },
        RadiatorSpec { q: 0.8, start_site: -1 },
        RadiatorSpec { q: 0.7, start_site: -3 },
    ];

    println!("three distinguishable radiators:");
    for (i, s) in specs.iter().enumerate() {
        println!("  radiator {i}: q = {}, released from site {}", s.q, s.start_site);
    }
    println!(
        "\n{:>4} {:>18} {:>18} {:>12}",
        "n", "joint (brute)", "sum of singles", "difference"
    );

    let mut worst: f64 = 0.0;
    for n in 0..=16u64 {
        let joint = radiators_joint_entropy(&specs, n)?;
        let additive = independent_radiators_entropy(&specs, n)?;
        let d = (joint - additive).abs();
        worst = worst.max(d);
        if n % 2 == 0 {
            println!("{n:>4} {joint:>18.12} {additive:>18.12} {d:>12.3e}");
        }
    }

    println!("\nlater starts switch on later: a radiator released at -k");
    println!("contributes nothing until its wave reaches the emission site");
    println!("max brute-vs-closed discrepancy: {worst:.3e}");
    Ok(())
}
