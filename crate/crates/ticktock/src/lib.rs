//! Exact sparse simulation of discrete-time unitary radiator models on an
//! integer lattice, with pinch-topology generalizations.
//!
//! # The model
//!
//! A particle lives on lattice sites and carries a two-level internal
//! register. One time step is a fixed unitary: a shift-and-scatter move in
//! which every site advances by one while the source site (0) splits its
//! amplitude — it keeps a fraction `q` (amplitude `alpha`) and leaks the
//! rest (amplitude `beta`) onto the outgoing track — followed by a detector
//! flip that toggles the register of anything crossing the detector site.
//! Iterating the step entangles the source's survival record with the
//! radiated wave; this crate computes that entanglement exactly.
//!
//! Everything is evolved twice where a closed form exists: once by sparse
//! brute-force application of the step operator, once analytically, and the
//! two are compared at tight tolerances throughout the test suite and the
//! `check` subcommand of the bundled CLI.
//!
//! # Modules
//!
//! * [`state`] — sparse pure states over site/register basis labels.
//! * [`operators`] — the shift-scatter step, detector placements, and
//!   unitarity checks on finite windows.
//! * [`density`] — reduced density matrices, partial traces, and entropies
//!   (all entropies are in bits).
//! * [`single_particle`] — one-particle evolutions and their closed forms:
//!   source decay, the shadow site, the moved-detector residual, limiting
//!   radiation waves, and co-moving front profiles.
//! * [`multi_particle`] — two- and three-particle evolutions for Fermi,
//!   Bose, and distinguishable statistics, stored once per mode multiset;
//!   statistics-resolved entropy curves and multi-source radiators.
//! * [`pinch`] — a ring grafted onto the line through a 2x2 junction port:
//!   leaky interiors, exact decoupling, port schedules (freeze and reopen),
//!   a register-controlled door, and a flanking 4x4 variant.
//! * [`scenario`] — named scenario configs, figure reproduction, sweeps,
//!   and the self-check suite behind the CLI.
//!
//! # Quick example
//!
//! ```
//! use ticktock::density::{partial_trace, Keep};
//! use ticktock::operators::{ScatterParams, StepOperator};
//! use ticktock::single_particle::{decay_entropy, evolve, source_state};
//!
//! let q = 0.9;
//! let op = StepOperator::standard(ScatterParams::from_survival(q).unwrap());
//! let state = evolve(&op, &source_state(0), 7).unwrap();
//! let brute = partial_trace(&state, Keep::Internal).unwrap().entropy_bits();
//! let closed = decay_entropy(7, q).unwrap();
//! assert!((brute - closed).abs() < 1e-12);
//! ```
//!
//! # Runnable examples
//!
//! One example per major capability lives in `examples/`:
//!
//! * `single_decay` — source decay entropy, brute force vs closed form.
//! * `shadow_capture` — the one-bit shadow left at the site behind the
//!   source.
//! * `statistics_comparison` — Fermi vs Bose vs distinguishable pair
//!   entropies from one code path.
//! * `residual_entanglement` — the moved detector's non-vanishing residual
//!   entropy plateau.
//! * `asymptotic_profile` — stationary co-moving front profiles for both
//!   detector placements.
//! * `pinch_ring_decay` — a leaky ring interior draining one revolution at
//!   a time.
//! * `baby_universe` — closing the junction mid-flight freezes the interior
//!   exactly.
//! * `prodigal_universe` — a pause-and-reopen schedule that resumes the
//!   decay curve unchanged.
//! * `demon_capture` — a register-controlled door that captures a passing
//!   particle, and the deterministic escape its one-bit memory forces.
//! * `independent_radiators` — several staggered sources radiating onto one
//!   track, with additive entropy.

pub mod density;
pub mod error;
pub mod multi_particle;
pub mod operators;
pub mod pinch;
pub mod scenario;
pub mod single_particle;
pub mod state;

pub use error::{Error, Result};
