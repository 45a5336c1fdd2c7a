//! A one-bit door demon. The particle's own register is the demon's memory:
//! an approach detector arms the door, the junction port is open (identity)
//! for an excited register and closed (swap) for a ground one, and an
//! interior detector disarms it again. A particle walking in from the line
//! is captured with certainty — and because the memory is a single bit,
//! the second pass of the interior detector re-opens the door and the
//! particle escapes after exactly two revolutions.
//!
//! Run with: cargo run --example demon_capture

use ticktock::pinch::{demon_step, interior_probability, DemonSpec, PinchTopology};
use ticktock::state::{Level, Site};

fn main() -> ticktock::Result<()> {
    let ring_len = 7u32;
    let start = -5i64;
    let topo = PinchTopology::new(ring_len)?;
    let spec = DemonSpec::standard();
    let mut state = topo.basis_state(Site::Line(start), Level::Ground)?;

    let capture_step = (-start) as u64;
    let escape_step = capture_step + 2 * ring_len as u64;
    println!("ring l = {ring_len}, particle starts at site {start} with the door closed");
    println!("expected: captured at step {capture_step}, escape at step {escape_step}\n");
    println!("{:>4} {:>12} {:>8}", "n", "p(interior)", "event");

    let mut prev = 0.0;
    for n in 1..=escape_step + 3 {
        state = demon_step(&topo, &spec, &state)?;
        let p = interior_probability(&state);
        let event = if p > prev + 0.5 {
            "captured"
        } else if p < prev - 0.5 {
            "escaped"
        } else {
            ""
        };
        if !event.is_empty() || n % 4 == 0 {
            println!("{n:>4} {p:>12.6} {:>8}", event);
        }
        assert!((state.norm() - 1.0).abs() < 1e-12, "norm drift");
        match n {
            n if n >= capture_step && n < escape_step => assert_eq!(p, 1.0),
            n if n < capture_step || n >= escape_step => assert_eq!(p, 0.0),
            _ => unreachable!(),
        }
        prev = p;
    }

    println!("\na single classical bit cannot hold the door shut forever;");
    println!("permanent capture needs a longer ring than the observation window");
    println!("(the bundled demon scenario uses l = 600, so a 1000-step run never sees the escape)");
    Ok(())
}
