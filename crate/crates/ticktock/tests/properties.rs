//! Property-based invariants: norm and inner-product preservation, purity
//! complementarity, reduced-trace normalization, exchange-symmetry
//! residuals, unitarity windows, and emission stability.

use num_complex::Complex64;
use proptest::prelude::*;

use ticktock::density::{partial_trace, Keep};
use ticktock::multi_particle::{exchange_residual, ManyParticleState, Mode, Statistics};
use ticktock::operators::{check_unitarity, line_basis, ScatterParams, StepOperator};
use ticktock::scenario::series::{
    format_sig12, hex_float, parse_hex_float, Column, Metadata, SeriesOutput,
};
use ticktock::single_particle::{evolve, source_state};
use ticktock::state::{BasisLabel, Level, PureState, Site};

fn level(excited: bool) -> Level {
    if excited {
        Level::Excited
    } else {
        Level::Ground
    }
}

/// A random normalized single-particle line state with a handful of terms.
fn arb_state() -> impl Strategy<Value = PureState> {
    proptest::collection::vec(
        ((-8i64..=20), any::<bool>(), -1.0..1.0f64, -1.0..1.0f64),
        1..6,
    )
    .prop_filter_map("state must not be numerically null", |terms| {
        let state = PureState::from_terms(
            1,
            1,
            terms.into_iter().map(|(x, e, re, im)| {
                (
                    BasisLabel::single(Site::Line(x), level(e)),
                    Complex64::new(re, im),
                )
            }),
        )
        .ok()?;
        let norm = state.norm();
        if norm < 1e-3 {
            return None;
        }
        Some(state.scaled(Complex64::new(1.0 / norm, 0.0)))
    })
}

fn arb_params() -> impl Strategy<Value = ScatterParams> {
    (0.05..0.95f64, 0.0..6.28f64)
        .prop_map(|(q, phase)| ScatterParams::with_phase(q, phase).expect("q in range"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_preserves_norm(params in arb_params(), steps in 1usize..150, moved in any::<bool>()) {
        let op = if moved {
            StepOperator::moved_detector(params)
        } else {
            StepOperator::standard(params)
        };
        let state = evolve(&op, &source_state(0), steps).unwrap();
        prop_assert!((state.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn evolution_preserves_inner_products(
        params in arb_params(),
        a in arb_state(),
        b in arb_state(),
        steps in 1usize..60,
    ) {
        // Orthogonalize b against a, then check orthogonality survives.
        let overlap = a.inner_product(&b).unwrap();
        let b_perp = b.add(&a.scaled(-overlap)).unwrap();
        prop_assume!(b_perp.norm() > 1e-3);
        let b_perp = b_perp.scaled(Complex64::new(1.0 / b_perp.norm(), 0.0));

        let op = StepOperator::standard(params);
        let a_t = evolve(&op, &a, steps).unwrap();
        let b_t = evolve(&op, &b_perp, steps).unwrap();
        prop_assert!(a_t.inner_product(&b_t).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn purity_complementarity(state in arb_state(), params in arb_params(), steps in 0usize..40) {
        // Both halves of a pure state carry the same entropy.
        let op = StepOperator::standard(params);
        let state = evolve(&op, &state, steps).unwrap();
        let s_internal = partial_trace(&state, Keep::Internal).unwrap().entropy_bits();
        let s_spatial = partial_trace(&state, Keep::Spatial).unwrap().entropy_bits();
        prop_assert!((s_internal - s_spatial).abs() <= 1e-10);
    }

    #[test]
    fn reduced_states_have_unit_trace(state in arb_state(), keep_internal in any::<bool>()) {
        let keep = if keep_internal { Keep::Internal } else { Keep::Spatial };
        let rho = partial_trace(&state, keep).unwrap();
        let trace: f64 = rho.diagonal_probs().iter().sum();
        prop_assert!((trace - 1.0).abs() <= 1e-12);
        // And the spectrum is a probability distribution.
        let eigs = rho.eigenvalues();
        prop_assert!(eigs.iter().all(|&e| (0.0..=1.0).contains(&e)));
        prop_assert!((eigs.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identical_particle_evolution_keeps_exchange_symmetry(
        q in 0.1..0.9f64,
        fermi in any::<bool>(),
        steps in 1usize..12,
        x1 in -3i64..=0,
        x2 in -3i64..=0,
        e1 in any::<bool>(),
        e2 in any::<bool>(),
    ) {
        let stats = if fermi { Statistics::Fermi } else { Statistics::Bose };
        let m1: Mode = (Site::Line(x1), level(e1));
        let m2: Mode = (Site::Line(x2), level(e2));
        if fermi && m1 == m2 {
            // Pauli exclusion: not a valid fermionic mode pair.
            prop_assert!(ManyParticleState::from_modes(stats, &[m1, m2]).is_err());
            return Ok(());
        }
        let op = StepOperator::standard_multi(ScatterParams::from_survival(q).unwrap(), 2);
        let state = ManyParticleState::from_modes(stats, &[m1, m2]).unwrap();
        // Each step re-checks the exchange residual internally; on top of
        // that, the expanded physical state must be (anti)symmetric.
        let evolved = state.evolve(&op, steps).unwrap();
        prop_assert!((evolved.norm_sq() - 1.0).abs() <= 1e-12);
        let residual = exchange_residual(&evolved.expanded(), stats).unwrap();
        prop_assert!(residual <= 1e-12);
    }

    #[test]
    fn steps_are_unitary_on_windows(params in arb_params(), moved in any::<bool>()) {
        let op = if moved {
            StepOperator::moved_detector(params)
        } else {
            StepOperator::standard(params)
        };
        let window = line_basis(-4, 10);
        let report = check_unitarity(|s: &PureState| op.apply(s), &window).unwrap();
        prop_assert!(report.is_unitary_within(1e-12));
    }
}

fn arb_finite_f64() -> impl Strategy<Value = f64> {
    any::<u64>().prop_filter_map("finite floats only", |bits| {
        let x = f64::from_bits(bits);
        x.is_finite().then_some(x)
    })
}

proptest! {
    #[test]
    fn hex_floats_round_trip_exactly(x in arb_finite_f64()) {
        let back = parse_hex_float(&hex_float(x)).unwrap();
        prop_assert_eq!(x.to_bits(), back.to_bits());
    }

    #[test]
    fn twelve_digit_rendering_parses_close(x in -1e11..1e11f64) {
        let text = format_sig12(x);
        let back: f64 = text.parse().unwrap();
        let scale = x.abs().max(1e-300);
        prop_assert!((back - x).abs() / scale <= 1e-11, "{x} -> {text} -> {back}");
    }

    #[test]
    fn emission_is_deterministic(
        ints in proptest::collection::vec(-1_000_000i64..1_000_000, 1..20),
        reals in proptest::collection::vec(-1e6..1e6f64, 1..20),
    ) {
        let rows = ints.len().min(reals.len());
        let series = SeriesOutput {
            metadata: Metadata::new("property"),
            columns: vec![
                Column::ints("n", ints[..rows].to_vec()),
                Column::reals("value", reals[..rows].to_vec()),
            ],
        };
        let csv1 = series.to_csv().unwrap();
        let csv2 = series.to_csv().unwrap();
        prop_assert_eq!(&csv1, &csv2);
        prop_assert_eq!(csv1.lines().count(), rows + 1);
        let json1 = series.to_json(true).unwrap();
        let json2 = series.to_json(true).unwrap();
        prop_assert_eq!(&json1, &json2);
        // The JSON is well-formed and carries every row.
        let parsed: serde_json::Value = serde_json::from_str(&json1).unwrap();
        prop_assert_eq!(parsed["columns"][0]["values"].as_array().unwrap().len(), rows);
        // The hex column recovers the exact binary values.
        let hexes = parsed["columns"][1]["values_hex"].as_array().unwrap();
        for (h, x) in hexes.iter().zip(&reals[..rows]) {
            let back = parse_hex_float(h.as_str().unwrap()).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn pruning_only_removes_small_terms(state in arb_state(), eps in 0.0..0.5f64) {
        let mut pruned = state.clone();
        pruned.prune(eps);
        prop_assert!(pruned.norm_sq() <= state.norm_sq() + 1e-15);
        for (label, amp) in pruned.terms() {
            prop_assert!(amp.norm() >= eps);
            prop_assert_eq!(*amp, state.amplitude(label));
        }
        // Dropped weight is bounded by (number of dropped terms) * eps^2.
        let dropped = state.support_len() - pruned.support_len();
        prop_assert!(state.norm_sq() - pruned.norm_sq() <= dropped as f64 * eps * eps + 1e-15);
    }
}
