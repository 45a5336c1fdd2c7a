//! One-particle radiator models and their closed forms.
//!
//! The brute-force side evolves sparse states with [`StepOperator`]s; every
//! closed form here is the exact solution of that evolution, so the two can
//! be cross-checked to near machine precision.

use num_complex::Complex64;

use crate::density::{binary_entropy, partial_trace, DensityMatrix, Keep};
use crate::error::{Error, Result};
use crate::operators::{ScatterParams, StepOperator};
use crate::state::{BasisLabel, Level, PureState, Site};

/// The source ket |x> with an excited register.
pub fn source_state(x: i64) -> PureState {
    PureState::basis_state(BasisLabel::single(Site::Line(x), Level::Excited))
}

/// Apply `op` for `steps` steps.
pub fn evolve(op: &StepOperator, initial: &PureState, steps: usize) -> Result<PureState> {
    evolve_with_prune(op, initial, steps, None)
}

/// Apply `op` for `steps` steps, optionally pruning amplitudes below
/// `prune_epsilon` after each step. Pruning is off by default throughout the
/// crate; it exists to bound support on very long leaky-ring runs.
pub fn evolve_with_prune(
    op: &StepOperator,
    initial: &PureState,
    steps: usize,
    prune_epsilon: Option<f64>,
) -> Result<PureState> {
    let mut state = initial.clone();
    for _ in 0..steps {
        state = op.apply(&state)?;
        if let Some(eps) = prune_epsilon {
            state.prune(eps);
        }
    }
    Ok(state)
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "survival probability q = {q} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// Internal state of the source after `n` steps: diag(q^n, 1 - q^n) in the
/// (excited, ground) basis.
pub fn decay_density(n: u64, q: f64) -> Result<DensityMatrix> {
    check_q(q)?;
    let p = q.powi(n as i32);
    DensityMatrix::diagonal(vec!["e".into(), "g".into()], &[p, 1.0 - p])
}

/// Source-radiation entanglement entropy after `n` steps: the binary entropy
/// of the survival probability q^n.
pub fn decay_entropy(n: u64, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(binary_entropy(q.powi(n as i32)))
}

/// Continuum limit of the decay entropy with time in half-lives:
/// t 2^{-t} - (1 - 2^{-t}) log2(1 - 2^{-t}), the binary entropy of 2^{-t}.
/// Peaks at exactly one bit at t = 1.
pub fn continuum_entropy(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("time t = {t} is negative")));
    }
    let p = (-t).exp2();
    let complement = 1.0 - p;
    let tail = if complement > 0.0 {
        complement * complement.log2()
    } else {
        0.0
    };
    Ok(t * p - tail)
}

/// The exact wave function of the decaying source after `n` steps:
/// alpha^n |0, e> + sum_{j=1..n} beta alpha^{n-j} |j, g>.
pub fn exact_decay_state(n: u64, params: &ScatterParams) -> PureState {
    let alpha = params.alpha();
    let beta = params.beta();
    let mut terms = vec![(
        BasisLabel::single(Site::Line(0), Level::Excited),
        alpha.powu(n as u32),
    )];
    for j in 1..=n {
        terms.push((
            BasisLabel::single(Site::Line(j as i64), Level::Ground),
            beta * alpha.powu((n - j) as u32),
        ));
    }
    PureState::from_terms(1, 1, terms).expect("layout is fixed")
}

/// Internal state of a source started one site behind (at -1) after `n >= 1`
/// steps: diag(q^{n-1} - q^n, 1 - q^{n-1} + q^n). The delayed start leaves a
/// one-step "shadow": the excited weight is the probability of decaying in
/// exactly the window (n-1, n].
pub fn shadow_density(n: u64, q: f64) -> Result<DensityMatrix> {
    check_q(q)?;
    if n == 0 {
        return Err(Error::Domain(
            "shadow closed form needs n >= 1 (the source reaches the emission pair after one \
             step)"
                .into(),
        ));
    }
    let p = q.powi((n - 1) as i32) - q.powi(n as i32);
    DensityMatrix::diagonal(vec!["e".into(), "g".into()], &[p, 1.0 - p])
}

pub fn shadow_entropy(n: u64, q: f64) -> Result<f64> {
    Ok(shadow_density(n, q)?.entropy_bits())
}

/// Internal state of the source under the moved detector (detector on the
/// source site itself) after `n` steps. The register parity alternates with
/// the number of steps survived, so the form depends on the parity of `n`:
/// even n: diag((1 + q^{n+1})/(1 + q), (q - q^{n+1})/(1 + q));
/// odd n:  diag((1 - q^{n+1})/(1 + q), (q + q^{n+1})/(1 + q)).
/// Both converge to diag(1/(1+q), q/(1+q)).
pub fn residual_density(n: u64, q: f64) -> Result<DensityMatrix> {
    check_q(q)?;
    let qn1 = q.powi((n + 1) as i32);
    let denom = 1.0 + q;
    let p_excited = if n % 2 == 0 {
        (1.0 + qn1) / denom
    } else {
        (1.0 - qn1) / denom
    };
    DensityMatrix::diagonal(vec!["e".into(), "g".into()], &[p_excited, 1.0 - p_excited])
}

pub fn residual_entropy(n: u64, q: f64) -> Result<f64> {
    Ok(residual_density(n, q)?.entropy_bits())
}

/// Large-n limit of the moved-detector internal entropy: the binary entropy
/// of 1/(1+q).
pub fn residual_limit_entropy(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(binary_entropy(1.0 / (1.0 + q)))
}

/// The exact wave function under the moved detector after `n` steps:
/// alpha^n |0, v(n)> + beta sum_{j=1..n} alpha^{n-j} |j, v(n-j)>, where
/// v(k) is excited for even k and ground for odd k.
pub fn exact_residual_state(n: u64, params: &ScatterParams) -> PureState {
    let alpha = params.alpha();
    let beta = params.beta();
    let mut terms = vec![(
        BasisLabel::single(Site::Line(0), Level::after_flips(n)),
        alpha.powu(n as u32),
    )];
    for j in 1..=n {
        terms.push((
            BasisLabel::single(Site::Line(j as i64), Level::after_flips(n - j)),
            beta * alpha.powu((n - j) as u32),
        ));
    }
    PureState::from_terms(1, 1, terms).expect("layout is fixed")
}

/// Magnitude of the internal e-g coherence of a single-particle state:
/// |sum_x a_{x,e} conj(a_{x,g})|. Under the moved detector every site carries
/// a definite register parity, so this vanishes identically.
pub fn internal_coherence(state: &PureState) -> Result<f64> {
    if state.particles() != 1 || state.registers() != 1 {
        return Err(Error::Layout(
            "internal coherence is defined for one particle with one register".into(),
        ));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (label, amp) in state.terms() {
        if label.regs[0] == Level::Excited {
            let mut partner = label.clone();
            partner.regs[0] = Level::Ground;
            acc += amp * state.amplitude(&partner).conj();
        }
    }
    Ok(acc.norm())
}

/// The limiting radiation wave left on the line by a fully decayed source,
/// truncated to its `m` leading sites:
/// beta (|m, g> + alpha |m-1, g> + ... + alpha^{m-1} |1, g>).
/// Deliberately subnormalized: its squared norm is 1 - q^m, the probability
/// that the source has decayed within m steps.
pub fn limiting_radiation_state(m: u64, params: &ScatterParams) -> PureState {
    let alpha = params.alpha();
    let beta = params.beta();
    let mut terms = Vec::new();
    for j in 1..=m {
        terms.push((
            BasisLabel::single(Site::Line(j as i64), Level::Ground),
            beta * alpha.powu((m - j) as u32),
        ));
    }
    PureState::from_terms(1, 1, terms).expect("layout is fixed")
}

/// One sample of a co-moving front profile: amplitudes at lattice offset
/// `xi` behind the front (site = t - xi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub xi: u64,
    pub excited: Complex64,
    pub ground: Complex64,
}

/// Read the co-moving profile phi(xi) = amplitude at site t - xi of a
/// single-particle state evolved for `t` steps, for xi = 0..=xi_max.
/// Requires `xi_max < t` so the window stays on radiated sites (site 0, the
/// source, is excluded).
pub fn asymptotic_profile(state: &PureState, t: u64, xi_max: u64) -> Result<Vec<ProfilePoint>> {
    if state.particles() != 1 || state.registers() != 1 {
        return Err(Error::Layout(
            "profiles are defined for one particle with one register".into(),
        ));
    }
    if xi_max >= t {
        return Err(Error::Argument(format!(
            "profile window xi_max = {xi_max} must stay behind the front (xi_max < t = {t})"
        )));
    }
    let mut out = Vec::with_capacity(xi_max as usize + 1);
    for xi in 0..=xi_max {
        let site = Site::Line((t - xi) as i64);
        out.push(ProfilePoint {
            xi,
            excited: state.amplitude(&BasisLabel::single(site, Level::Excited)),
            ground: state.amplitude(&BasisLabel::single(site, Level::Ground)),
        });
    }
    Ok(out)
}

/// Brute-force internal entropy of an evolved initial state after `n` steps.
pub fn evolved_internal_entropy(
    op: &StepOperator,
    initial: &PureState,
    n: usize,
) -> Result<f64> {
    let state = evolve(op, initial, n)?;
    Ok(partial_trace(&state, Keep::Internal)?.entropy_bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: f64 = 0.9;

    fn params() -> ScatterParams {
        ScatterParams::from_survival(Q).unwrap()
    }

    #[test]
    fn brute_force_matches_exact_decay_state() {
        let u = StepOperator::standard(params());
        let mut state = source_state(0);
        for n in 0..=40u64 {
            let exact = exact_decay_state(n, &params());
            let overlap = exact.inner_product(&state).unwrap();
            assert!(
                (overlap.re - 1.0).abs() < 1e-13 && overlap.im.abs() < 1e-13,
                "n={n}: overlap {overlap}"
            );
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn decay_entropy_matches_brute_force() {
        let u = StepOperator::standard(params());
        let mut state = source_state(0);
        for n in 0..=60u64 {
            let brute = partial_trace(&state, Keep::Internal)
                .unwrap()
                .entropy_bits();
            let closed = decay_entropy(n, Q).unwrap();
            assert!((brute - closed).abs() < 1e-12, "n={n}");
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn decay_entropy_reference_value() {
        // H(0.1) at n=1, q=0.9.
        assert!((decay_entropy(1, 0.9).unwrap() - 0.46899559358928116).abs() < 1e-15);
    }

    #[test]
    fn continuum_entropy_peaks_at_one_bit() {
        assert_eq!(continuum_entropy(1.0).unwrap(), 1.0);
        assert_eq!(continuum_entropy(0.0).unwrap(), 0.0);
        // Agrees with the binary entropy of 2^{-t} everywhere.
        for i in 0..=1000 {
            let t = i as f64 * 0.01;
            let direct = continuum_entropy(t).unwrap();
            let via_binary = binary_entropy((-t).exp2());
            assert!((direct - via_binary).abs() < 1e-12, "t={t}");
        }
        assert!(continuum_entropy(-0.5).is_err());
    }

    #[test]
    fn discrete_and_continuum_entropies_agree_on_the_common_grid() {
        // ent(n, q) and the continuum curve are the same binary entropy
        // evaluated at q^n = 2^{-t} with t = -n log2 q.
        for q in [0.5f64, 0.8, 0.9] {
            for n in 0..=50u64 {
                let t = -(n as f64) * q.log2();
                let a = decay_entropy(n, q).unwrap();
                let b = continuum_entropy(t).unwrap();
                assert!((a - b).abs() < 1e-12, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn shadow_density_matches_brute_force() {
        let u = StepOperator::standard(params());
        let mut state = source_state(-1);
        state = u.apply(&state).unwrap();
        for n in 1..=60u64 {
            let brute = partial_trace(&state, Keep::Internal).unwrap();
            let closed = shadow_density(n, Q).unwrap();
            let bd = brute.diagonal_probs();
            let cd = closed.diagonal_probs();
            assert!((bd[0] - cd[0]).abs() < 1e-13, "n={n}");
            assert!((bd[1] - cd[1]).abs() < 1e-13, "n={n}");
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn shadow_closed_form_rejects_step_zero() {
        assert!(matches!(shadow_density(0, 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn shadow_reference_value() {
        // n=1, q=0.95: diag(0.05, 0.95), entropy H(0.05).
        let d = shadow_density(1, 0.95).unwrap();
        let probs = d.diagonal_probs();
        assert!((probs[0] - 0.05).abs() < 1e-15);
        assert!((d.entropy_bits() - 0.28639695711595625).abs() < 1e-12);
        assert!((d.entropy_bits() - 0.28640).abs() < 1e-4);
    }

    #[test]
    fn residual_density_matches_brute_force() {
        let u = StepOperator::moved_detector(params());
        let mut state = source_state(0);
        for n in 0..=80u64 {
            let brute = partial_trace(&state, Keep::Internal).unwrap();
            let closed = residual_density(n, Q).unwrap();
            let bd = brute.diagonal_probs();
            let cd = closed.diagonal_probs();
            assert!((bd[0] - cd[0]).abs() < 1e-12, "n={n}: {bd:?} vs {cd:?}");
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn residual_exact_state_matches_brute_force() {
        let u = StepOperator::moved_detector(params());
        let mut state = source_state(0);
        for n in 0..=40u64 {
            let exact = exact_residual_state(n, &params());
            let overlap = exact.inner_product(&state).unwrap();
            assert!((overlap.re - 1.0).abs() < 1e-13, "n={n}");
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn residual_limit_value() {
        // q = 0.9: H(1/1.9) = 0.99800 within 1e-4, and the closed form at
        // large n converges to it.
        let limit = residual_limit_entropy(0.9).unwrap();
        assert!((limit - 0.99800).abs() < 1e-4);
        let late = residual_entropy(400, 0.9).unwrap();
        assert!((late - limit).abs() < 1e-12);
    }

    #[test]
    fn moved_detector_state_has_no_internal_coherence() {
        let u = StepOperator::moved_detector(ScatterParams::from_survival(0.8).unwrap());
        let mut state = source_state(0);
        for n in 0..=50 {
            let coherence = internal_coherence(&state).unwrap();
            assert!(coherence <= 1e-14, "n={n}: {coherence}");
            state = u.apply(&state).unwrap();
        }
    }

    #[test]
    fn limiting_radiation_overlap_is_decay_probability() {
        // <chi_m | psi(m)> = 1 - q^m exactly: the truncated limiting wave is
        // the radiated component of the evolved state.
        let u = StepOperator::standard(params());
        let m = 10u64;
        let evolved = evolve(&u, &source_state(0), m as usize).unwrap();
        let chi = limiting_radiation_state(m, &params());
        let expect = 1.0 - Q.powi(m as i32);
        assert!((chi.norm_sq() - expect).abs() < 1e-13);
        let overlap = chi.inner_product(&evolved).unwrap();
        assert!((overlap.re - expect).abs() < 1e-13);
        assert!(overlap.im.abs() < 1e-15);
        // 1 - 0.9^10 = 0.65132...
        assert!((expect - 0.6513215599).abs() < 1e-9);
    }

    #[test]
    fn profile_is_stationary_and_geometric() {
        let u = StepOperator::standard(params());
        let t = 45u64;
        let s1 = evolve(&u, &source_state(0), t as usize).unwrap();
        let s2 = evolve(&u, &s1, 7).unwrap();
        let p1 = asymptotic_profile(&s1, t, 30).unwrap();
        let p2 = asymptotic_profile(&s2, t + 7, 30).unwrap();
        let alpha = params().alpha();
        let beta = params().beta();
        for (a, b) in p1.iter().zip(&p2) {
            assert!((a.excited - b.excited).norm() < 1e-14);
            assert!((a.ground - b.ground).norm() < 1e-14);
            // phi(xi) = beta alpha^xi on the ground register.
            let expect = beta * alpha.powu(a.xi as u32);
            assert!((a.ground - expect).norm() < 1e-13, "xi={}", a.xi);
            assert_eq!(a.excited, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn profile_window_must_stay_behind_front() {
        let s = source_state(0);
        assert!(matches!(
            asymptotic_profile(&s, 5, 5),
            Err(Error::Argument(_))
        ));
    }
}
