//! Few-particle evolution under distinguishable, fermionic, and bosonic
//! exchange statistics, plus block-fermion states and compositions of
//! independent radiators.
//!
//! Identical-particle states are stored as canonical representatives: each
//! occupied mode multiset appears once, with its slots sorted ascending by
//! (site, register) and the exchange sign and normalization folded into the
//! stored amplitude. The physical ordered-slot state is reconstructed on
//! demand; evolution expands, applies the step to every slot, and
//! recompresses, checking the (anti)symmetry residual on the way back.

use num_complex::Complex64;

use crate::density::{partial_trace, shannon_entropy, DensityMatrix, Keep};
use crate::error::{Error, Result};
use crate::operators::{ScatterParams, StepOperator};
use crate::single_particle::{decay_entropy, shadow_entropy};
use crate::state::{BasisLabel, Level, PureState, Site};

const EXCHANGE_TOL: f64 = 1e-12;

/// Exchange sector of a many-particle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Distinguishable,
    Fermi,
    Bose,
}

/// One single-particle mode: a site together with a register value.
pub type Mode = (Site, Level);

/// A state of a fixed small number of particles in a fixed exchange sector.
///
/// Distinguishable states store the plain ordered-slot amplitudes. Identical
/// particles (Fermi up to three, Bose pairs) store canonical representatives
/// as described in the module docs.
#[derive(Debug, Clone)]
pub struct ManyParticleState {
    statistics: Statistics,
    state: PureState,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All distinct arrangements of the mode list, each with the parity sign of
/// the permutation that produces it from the sorted order. For multisets the
/// same arrangement is listed once (Bose repeats; Fermi never has repeats).
fn arrangements(sorted: &[Mode]) -> Vec<(Vec<Mode>, f64)> {
    let p = sorted.len();
    let mut idx: Vec<usize> = (0..p).collect();
    let mut out: Vec<(Vec<Mode>, f64)> = Vec::new();
    // Lexicographic permutation walk over index vectors; tiny p keeps this
    // trivial.
    loop {
        let arrangement: Vec<Mode> = idx.iter().map(|&i| sorted[i]).collect();
        let mut sign = 1.0;
        let mut perm = idx.clone();
        for i in 0..p {
            while perm[i] != i {
                let j = perm[i];
                perm.swap(i, j);
                sign = -sign;
            }
        }
        if !out.iter().any(|(a, _)| *a == arrangement) {
            out.push((arrangement, sign));
        }
        // Next permutation of idx.
        let mut i = p.wrapping_sub(1);
        loop {
            if i == 0 {
                return out;
            }
            if idx[i - 1] < idx[i] {
                break;
            }
            i -= 1;
        }
        let pivot = i - 1;
        let mut j = p - 1;
        while idx[j] <= idx[pivot] {
            j -= 1;
        }
        idx.swap(pivot, j);
        idx[pivot + 1..].reverse();
    }
}

fn modes_of(label: &BasisLabel) -> Vec<Mode> {
    label
        .sites
        .iter()
        .copied()
        .zip(label.regs.iter().copied())
        .collect()
}

fn label_of(modes: &[Mode]) -> BasisLabel {
    BasisLabel::new(
        modes.iter().map(|m| m.0).collect(),
        modes.iter().map(|m| m.1).collect(),
    )
}

fn repeat_factor(sorted: &[Mode]) -> f64 {
    let mut product = 1.0;
    let mut run = 1usize;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            product *= factorial(run);
            run = 1;
        }
    }
    product *= factorial(run);
    product
}

impl ManyParticleState {
    /// State with the listed modes occupied.
    ///
    /// Distinguishable: the ordered product, slot i in `modes[i]`.
    /// Fermi: the normalized antisymmetrization (Slater determinant) of the
    /// listed order; up to three particles; repeated modes are rejected.
    /// Bose: the normalized symmetrization; pairs only.
    pub fn from_modes(statistics: Statistics, modes: &[Mode]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Argument("a state needs at least one particle".into()));
        }
        let p = modes.len();
        match statistics {
            Statistics::Distinguishable => {
                let state = PureState::basis_state(label_of(modes));
                Ok(ManyParticleState { statistics, state })
            }
            Statistics::Fermi => {
                if p > 3 {
                    return Err(Error::Argument(format!(
                        "fermionic brute force is budgeted for at most 3 particles, got {p}"
                    )));
                }
                let mut sorted = modes.to_vec();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Argument(
                        "fermionic modes must be pairwise distinct".into(),
                    ));
                }
                // Parity of the sort is the canonical amplitude's sign.
                let mut sign = 1.0;
                let mut work = modes.to_vec();
                for i in 0..p {
                    let min_at = (i..p)
                        .min_by(|&x, &y| work[x].cmp(&work[y]))
                        .expect("nonempty");
                    if min_at != i {
                        work.swap(i, min_at);
                        sign = -sign;
                    }
                }
                let state = PureState::from_terms(
                    p,
                    p,
                    vec![(label_of(&sorted), Complex64::new(sign, 0.0))],
                )?;
                Ok(ManyParticleState { statistics, state })
            }
            Statistics::Bose => {
                if p != 2 {
                    return Err(Error::Argument(format!(
                        "bosonic brute force is budgeted for exactly 2 particles, got {p}"
                    )));
                }
                let mut sorted = modes.to_vec();
                sorted.sort();
                let state = PureState::from_terms(
                    p,
                    p,
                    vec![(label_of(&sorted), Complex64::new(1.0, 0.0))],
                )?;
                Ok(ManyParticleState { statistics, state })
            }
        }
    }

    /// The pair of sources feeding the two-particle comparison: one at the
    /// emission site 0 and one a step behind at -1, both excited.
    pub fn source_pair(statistics: Statistics) -> Self {
        ManyParticleState::from_modes(
            statistics,
            &[
                (Site::Line(0), Level::Excited),
                (Site::Line(-1), Level::Excited),
            ],
        )
        .expect("fixed modes are valid for every sector")
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particles(&self) -> usize {
        self.state.particles()
    }

    /// The stored state: ordered-slot amplitudes for distinguishable
    /// particles, canonical representatives for identical ones.
    pub fn stored(&self) -> &PureState {
        &self.state
    }

    pub fn norm_sq(&self) -> f64 {
        self.state.norm_sq()
    }

    /// The physical ordered-slot state, with exchange copies written out.
    pub fn expanded(&self) -> PureState {
        match self.statistics {
            Statistics::Distinguishable => self.state.clone(),
            _ => {
                let p = self.state.particles();
                let bose = self.statistics == Statistics::Bose;
                self.state.transform(|label, amp, out| {
                    let sorted = modes_of(label);
                    let weight = (repeat_factor(&sorted) / factorial(p)).sqrt();
                    for (arrangement, sign) in arrangements(&sorted) {
                        let s = if bose { 1.0 } else { sign };
                        out.push((label_of(&arrangement), amp * weight * s));
                    }
                })
            }
        }
    }

    /// Apply one step of `op` to every slot, preserving the exchange sector.
    /// For identical particles the (anti)symmetry residual of the stepped
    /// physical state is checked against 1e-12.
    pub fn step(&self, op: &StepOperator) -> Result<Self> {
        match self.statistics {
            Statistics::Distinguishable => Ok(ManyParticleState {
                statistics: self.statistics,
                state: op.apply(&self.state)?,
            }),
            _ => {
                let physical = op.apply(&self.expanded())?;
                let (state, residual) = recompress(&physical, self.statistics)?;
                if residual > EXCHANGE_TOL {
                    return Err(Error::Numeric(format!(
                        "exchange-symmetry residual {residual:.3e} after a step"
                    )));
                }
                Ok(ManyParticleState {
                    statistics: self.statistics,
                    state,
                })
            }
        }
    }

    pub fn evolve(&self, op: &StepOperator, steps: usize) -> Result<Self> {
        let mut current = self.clone();
        for _ in 0..steps {
            current = current.step(op)?;
        }
        Ok(current)
    }

    /// Entropy in bits of the internal (all-register) reduction. For
    /// identical particles the registers are aligned to the canonical site
    /// order, which is the alignment under which the radiator closed forms
    /// hold.
    pub fn internal_entropy(&self) -> Result<f64> {
        Ok(partial_trace(&self.state, Keep::Internal)?.entropy_bits())
    }

    /// The internal reduced matrix of a two-particle state, reported in the
    /// fixed slot basis {ee, eg, ge, gg}.
    ///
    /// For identical particles each mixed-register mode pair embeds as the
    /// symmetric (Bose) or antisymmetric (Fermi) combination of the two slot
    /// words, so a bosonic radiator pair is supported on
    /// {ee, (eg+ge)/sqrt2, gg}. If two conjugate mixed pairs ever share the
    /// same site pair the embedding degenerates and an error is returned;
    /// radiator states never produce that configuration.
    pub fn reduced_internal_two(&self) -> Result<DensityMatrix> {
        if self.particles() != 2 {
            return Err(Error::Layout(format!(
                "slot-basis internal reduction is defined for 2 particles, got {}",
                self.particles()
            )));
        }
        let word_index = |a: Level, b: Level| -> usize {
            (if a == Level::Ground { 2 } else { 0 }) + (if b == Level::Ground { 1 } else { 0 })
        };
        let labels = vec!["ee".into(), "eg".into(), "ge".into(), "gg".into()];
        let mut mat = nalgebra::DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));

        match self.statistics {
            Statistics::Distinguishable => {
                // Plain slot trace, then embed into the fixed basis.
                let mut groups: std::collections::BTreeMap<(Site, Site), Vec<(usize, Complex64)>> =
                    std::collections::BTreeMap::new();
                for (label, amp) in self.state.terms() {
                    let key = (label.sites[0], label.sites[1]);
                    let w = word_index(label.regs[0], label.regs[1]);
                    groups.entry(key).or_default().push((w, *amp));
                }
                for entries in groups.values() {
                    for &(i, a) in entries {
                        for &(j, b) in entries {
                            mat[(i, j)] += a * b.conj();
                        }
                    }
                }
            }
            _ => {
                let s = if self.statistics == Statistics::Bose {
                    1.0
                } else {
                    -1.0
                };
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                let mut groups: std::collections::BTreeMap<(Site, Site), Vec<[Complex64; 4]>> =
                    std::collections::BTreeMap::new();
                let mut mixed_seen: std::collections::BTreeMap<(Site, Site), Level> =
                    std::collections::BTreeMap::new();
                for (label, amp) in self.state.terms() {
                    let key = (label.sites[0], label.sites[1]);
                    let (r1, r2) = (label.regs[0], label.regs[1]);
                    let mut v = [Complex64::new(0.0, 0.0); 4];
                    if r1 == r2 {
                        v[word_index(r1, r2)] = *amp;
                    } else {
                        if key.0 != key.1 {
                            if let Some(prev) = mixed_seen.insert(key, r1) {
                                if prev != r1 {
                                    return Err(Error::Numeric(format!(
                                        "conjugate mixed register pairs share site pair \
                                         ({}, {}); the slot-basis embedding is degenerate there",
                                        key.0, key.1
                                    )));
                                }
                            }
                        }
                        v[word_index(r1, r2)] = amp * inv_sqrt2;
                        v[word_index(r2, r1)] = amp * s * inv_sqrt2;
                    }
                    groups.entry(key).or_default().push(v);
                }
                for vectors in groups.values() {
                    let mut total = [Complex64::new(0.0, 0.0); 4];
                    for v in vectors {
                        for k in 0..4 {
                            total[k] += v[k];
                        }
                    }
                    for i in 0..4 {
                        for j in 0..4 {
                            mat[(i, j)] += total[i] * total[j].conj();
                        }
                    }
                }
            }
        }
        DensityMatrix::from_parts(labels, mat)
    }
}

/// Fold a physical ordered-slot state back to canonical representatives.
/// Returns the canonical state and the worst deviation of the physical
/// amplitudes from exact (anti)symmetry.
fn recompress(physical: &PureState, statistics: Statistics) -> Result<(PureState, f64)> {
    let p = physical.particles();
    let bose = statistics == Statistics::Bose;
    let mut residual: f64 = 0.0;
    let mut canonical_terms: Vec<(BasisLabel, Complex64)> = Vec::new();
    let mut done: std::collections::BTreeSet<BasisLabel> = std::collections::BTreeSet::new();

    for (label, _) in physical.terms() {
        let mut sorted = modes_of(label);
        sorted.sort();
        let canonical = label_of(&sorted);
        if !done.insert(canonical.clone()) {
            continue;
        }
        if statistics == Statistics::Fermi && sorted.windows(2).any(|w| w[0] == w[1]) {
            // Pauli-blocked labels must carry (numerically) no amplitude.
            for (arrangement, _) in arrangements(&sorted) {
                residual = residual.max(physical.amplitude(&label_of(&arrangement)).norm());
            }
            continue;
        }
        let weight = (repeat_factor(&sorted) / factorial(p)).sqrt();
        // Estimate the canonical amplitude from every arrangement and check
        // they agree; averaging keeps the stored state exactly symmetric.
        let orbit = arrangements(&sorted);
        let mut mean = Complex64::new(0.0, 0.0);
        for (arrangement, sign) in &orbit {
            let s = if bose { 1.0 } else { *sign };
            mean += physical.amplitude(&label_of(arrangement)) * s;
        }
        mean /= orbit.len() as f64;
        for (arrangement, sign) in &orbit {
            let s = if bose { 1.0 } else { *sign };
            residual = residual
                .max((physical.amplitude(&label_of(arrangement)) * s - mean).norm());
        }
        let amp = mean / weight;
        if amp.re != 0.0 || amp.im != 0.0 {
            canonical_terms.push((canonical, amp));
        }
    }
    let state = PureState::from_terms(p, p, canonical_terms)?;
    Ok((state, residual))
}

/// Max deviation of an ordered-slot state from exact (anti)symmetry under
/// slot exchange.
pub fn exchange_residual(physical: &PureState, statistics: Statistics) -> Result<f64> {
    if statistics == Statistics::Distinguishable {
        return Err(Error::Argument(
            "exchange residual is defined for identical-particle sectors".into(),
        ));
    }
    let (_, residual) = recompress(physical, statistics)?;
    Ok(residual)
}

/// The three-entry internal distribution of the bosonic source pair after
/// `n` steps: probabilities of (both excited, symmetric mixed, both ground).
/// The n = 0 value is the exact initial configuration (1, 0, 0).
pub fn bose_internal_closed(n: u64, q: f64) -> Result<[f64; 3]> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!(
            "survival probability q = {q} is outside [0, 1]"
        )));
    }
    if n == 0 {
        return Ok([1.0, 0.0, 0.0]);
    }
    let n = n as i32;
    let p_ee = 2.0 * (1.0 - q) * q.powi(2 * n - 1);
    let p_sym = 4.0 * q.powi(n) * (1.0 - q.powi(n - 1)) * (1.0 - q)
        + (2.0 * q - 1.0).powi(2) * q.powi(n - 1);
    let p_gg = 2.0 * q * (1.0 - q) * (1.0 - q.powi(n - 1)).powi(2)
        + (2.0 * q - 1.0).powi(2) * (1.0 - q.powi(n - 1))
        + 2.0 * q * (1.0 - q);
    Ok([p_ee, p_sym, p_gg])
}

/// Per-step internal entropies of the source pair under the three exchange
/// sectors, brute force alongside the closed forms.
///
/// The bosonic and distinguishable entries at index n are taken after n raw
/// steps. The fermionic entry at index n is taken after n + 1 raw steps: the
/// antisymmetrized pair's first step is exact transport (the two sources
/// interfere into a fresh source plus one radiated marker), so its decay
/// clock starts one step late and then tracks the single-particle curve
/// exactly.
#[derive(Debug, Clone)]
pub struct StatisticsCurves {
    pub q: f64,
    pub fermi: Vec<f64>,
    pub bose: Vec<f64>,
    pub distinguishable: Vec<f64>,
    pub fermi_closed: Vec<f64>,
    pub bose_closed: Vec<f64>,
    pub distinguishable_closed: Vec<f64>,
}

impl StatisticsCurves {
    /// Worst brute-vs-closed deviation over the three curves.
    pub fn max_discrepancy(&self) -> f64 {
        let pairs = [
            (&self.fermi, &self.fermi_closed),
            (&self.bose, &self.bose_closed),
            (&self.distinguishable, &self.distinguishable_closed),
        ];
        let mut worst: f64 = 0.0;
        for (brute, closed) in pairs {
            for (b, c) in brute.iter().zip(closed) {
                worst = worst.max((b - c).abs());
            }
        }
        worst
    }
}

pub fn statistics_entropy_curves(q: f64, n_max: u64) -> Result<StatisticsCurves> {
    let params = ScatterParams::from_survival(q)?;
    let op = StepOperator::standard_multi(params, 2);

    let mut fermi = Vec::with_capacity(n_max as usize + 1);
    let mut bose = Vec::with_capacity(n_max as usize + 1);
    let mut dist = Vec::with_capacity(n_max as usize + 1);
    let mut fermi_closed = Vec::new();
    let mut bose_closed = Vec::new();
    let mut dist_closed = Vec::new();

    // Fermi runs one raw step ahead of its reported index.
    let mut fermi_state = ManyParticleState::source_pair(Statistics::Fermi).step(&op)?;
    let mut bose_state = ManyParticleState::source_pair(Statistics::Bose);
    let mut dist_state = ManyParticleState::source_pair(Statistics::Distinguishable);

    for n in 0..=n_max {
        fermi.push(fermi_state.internal_entropy()?);
        bose.push(bose_state.internal_entropy()?);
        dist.push(dist_state.internal_entropy()?);

        fermi_closed.push(decay_entropy(n, q)?);
        bose_closed.push(shannon_entropy(&bose_internal_closed(n, q)?));
        dist_closed.push(
            decay_entropy(n, q)?
                + if n == 0 {
                    0.0
                } else {
                    shadow_entropy(n, q)?
                },
        );

        if n < n_max {
            fermi_state = fermi_state.step(&op)?;
            bose_state = bose_state.step(&op)?;
            dist_state = dist_state.step(&op)?;
        }
    }

    Ok(StatisticsCurves {
        q,
        fermi,
        bose,
        distinguishable: dist,
        fermi_closed,
        bose_closed,
        distinguishable_closed: dist_closed,
    })
}

/// Internal entropy of a solid block of fermionic sources after `n` raw
/// steps: sites `lead, lead-1, ..., lead-(count-1)`, all excited, lead <= 0.
///
/// Entropies are reported on the raw step clock. The two-source block
/// {0, -1} satisfies entropy(n) = decay_entropy(n - 1) exactly: its first
/// step is pure transport, after which a single effective source decays.
pub fn fermion_block_entropy(lead: i64, count: usize, n: u64, q: f64) -> Result<f64> {
    if lead > 0 {
        return Err(Error::Argument(format!(
            "block lead site {lead} must be at most 0 (the emission site)"
        )));
    }
    if count == 0 || count > 3 {
        return Err(Error::Argument(format!(
            "block size {count} is outside the brute-force budget 1..=3"
        )));
    }
    let params = ScatterParams::from_survival(q)?;
    let op = StepOperator::standard_multi(params, count);
    let modes: Vec<Mode> = (0..count)
        .map(|i| (Site::Line(lead - i as i64), Level::Excited))
        .collect();
    let state = ManyParticleState::from_modes(Statistics::Fermi, &modes)?;
    state.evolve(&op, n as usize)?.internal_entropy()
}

/// One independent radiator: survival probability and start site (0 starts
/// on the emission site; -k starts k sites behind it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiatorSpec {
    pub q: f64,
    pub start_site: i64,
}

impl RadiatorSpec {
    fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Argument(format!(
                "radiator q = {} must lie in (0, 1)",
                self.q
            )));
        }
        if self.start_site > 0 {
            return Err(Error::Argument(format!(
                "radiator start site {} must be at most 0",
                self.start_site
            )));
        }
        Ok(())
    }

    /// This radiator's internal entropy after `n` steps. A start at -k walks
    /// freely for k - 1 steps and then follows the one-behind (shadow)
    /// profile, so its entropy is the shadow entropy delayed by k - 1.
    pub fn entropy(&self, n: u64) -> Result<f64> {
        self.validate()?;
        if self.start_site == 0 {
            return decay_entropy(n, self.q);
        }
        let k = (-self.start_site) as u64;
        if n + 1 <= k {
            return Ok(0.0);
        }
        shadow_entropy(n + 1 - k, self.q)
    }
}

/// Total internal entropy of independent distinguishable radiators after `n`
/// steps, computed from the closed forms (entropy is additive over
/// independent subsystems).
pub fn independent_radiators_entropy(specs: &[RadiatorSpec], n: u64) -> Result<f64> {
    if specs.is_empty() {
        return Err(Error::Argument("no radiators given".into()));
    }
    let mut total = 0.0;
    for spec in specs {
        total += spec.entropy(n)?;
    }
    Ok(total)
}

/// Brute-force joint internal entropy of up to three independent radiators:
/// each gets its own particle slot and register, evolved jointly.
pub fn radiators_joint_entropy(specs: &[RadiatorSpec], n: u64) -> Result<f64> {
    if specs.is_empty() {
        return Err(Error::Argument("no radiators given".into()));
    }
    if specs.len() > 3 {
        return Err(Error::Argument(format!(
            "joint brute force is budgeted for at most 3 radiators, got {}",
            specs.len()
        )));
    }
    let mut params = Vec::new();
    let mut modes = Vec::new();
    for spec in specs {
        spec.validate()?;
        params.push(ScatterParams::from_survival(spec.q)?);
        modes.push((Site::Line(spec.start_site), Level::Excited));
    }
    let op = StepOperator::radiators(&params);
    let state = ManyParticleState::from_modes(Statistics::Distinguishable, &modes)?;
    state.evolve(&op, n as usize)?.internal_entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::binary_entropy;
    use crate::single_particle::{evolve, source_state};

    const Q: f64 = 0.9;

    fn op2() -> StepOperator {
        StepOperator::standard_multi(ScatterParams::from_survival(Q).unwrap(), 2)
    }

    #[test]
    fn source_pair_expansions_match_slot_notation() {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let fermi = ManyParticleState::source_pair(Statistics::Fermi).expanded();
        let front = BasisLabel::new(
            vec![Site::Line(0), Site::Line(-1)],
            vec![Level::Excited, Level::Excited],
        );
        let back = BasisLabel::new(
            vec![Site::Line(-1), Site::Line(0)],
            vec![Level::Excited, Level::Excited],
        );
        assert!((fermi.amplitude(&front).re - w).abs() < 1e-15);
        assert!((fermi.amplitude(&back).re + w).abs() < 1e-15);
        assert!((fermi.norm_sq() - 1.0).abs() < 1e-14);

        let bose = ManyParticleState::source_pair(Statistics::Bose).expanded();
        assert!((bose.amplitude(&front).re - w).abs() < 1e-15);
        assert!((bose.amplitude(&back).re - w).abs() < 1e-15);
    }

    #[test]
    fn fermi_rejects_pauli_violation() {
        let m = (Site::Line(0), Level::Excited);
        assert!(matches!(
            ManyParticleState::from_modes(Statistics::Fermi, &[m, m]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn fermi_first_step_is_exact_transport() {
        // The antisymmetrized sources interfere into the single occupied
        // pair {0, 1} with unit weight.
        let s1 = ManyParticleState::source_pair(Statistics::Fermi)
            .step(&op2())
            .unwrap();
        assert_eq!(s1.stored().support_len(), 1);
        let expect = BasisLabel::new(
            vec![Site::Line(0), Site::Line(1)],
            vec![Level::Excited, Level::Ground],
        );
        assert!((s1.stored().amplitude(&expect).norm() - 1.0).abs() < 1e-13);
        assert!(s1.internal_entropy().unwrap().abs() < 1e-12);
    }

    #[test]
    fn exchange_symmetry_is_preserved() {
        for stat in [Statistics::Fermi, Statistics::Bose] {
            let mut state = ManyParticleState::source_pair(stat);
            for _ in 0..15 {
                state = state.step(&op2()).unwrap();
                let residual = exchange_residual(&state.expanded(), stat).unwrap();
                assert!(residual <= 1e-12, "{stat:?}: residual {residual:.3e}");
                assert!((state.norm_sq() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distinguishable_pair_is_exact_product() {
        let params = ScatterParams::from_survival(Q).unwrap();
        let u1 = StepOperator::standard(params);
        let n = 7;
        let joint = ManyParticleState::source_pair(Statistics::Distinguishable)
            .evolve(&op2(), n)
            .unwrap();
        let a = evolve(&u1, &source_state(0), n).unwrap();
        let b = evolve(&u1, &source_state(-1), n).unwrap();
        // Every joint amplitude is the product of the marginals'.
        for (label, amp) in joint.stored().terms() {
            let la = BasisLabel::single(label.sites[0], label.regs[0]);
            let lb = BasisLabel::single(label.sites[1], label.regs[1]);
            let expect = a.amplitude(&la) * b.amplitude(&lb);
            assert!((amp - expect).norm() < 1e-14);
        }
        assert!((joint.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fermionic_entropy_is_the_delayed_single_particle_curve() {
        let mut state = ManyParticleState::source_pair(Statistics::Fermi);
        for raw in 0..=25u64 {
            let entropy = state.internal_entropy().unwrap();
            let expect = if raw == 0 {
                0.0
            } else {
                decay_entropy(raw - 1, Q).unwrap()
            };
            assert!(
                (entropy - expect).abs() < 1e-11,
                "raw={raw}: {entropy} vs {expect}"
            );
            state = state.step(&op2()).unwrap();
        }
    }

    #[test]
    fn bose_brute_force_matches_three_entry_form() {
        let mut state = ManyParticleState::source_pair(Statistics::Bose);
        for n in 0..=25u64 {
            let brute = state.internal_entropy().unwrap();
            let closed = shannon_entropy(&bose_internal_closed(n, Q).unwrap());
            assert!((brute - closed).abs() < 1e-11, "n={n}: {brute} vs {closed}");
            state = state.step(&op2()).unwrap();
        }
    }

    #[test]
    fn bose_entries_are_probabilities_on_a_grid() {
        for q in [0.5, 0.8, 0.9, 0.95] {
            for n in 0..=120u64 {
                let entries = bose_internal_closed(n, q).unwrap();
                let total: f64 = entries.iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "q={q} n={n}: sum {total}");
                for e in entries {
                    assert!((-1e-12..=1.0 + 1e-12).contains(&e), "q={q} n={n}: {e}");
                }
            }
        }
    }

    #[test]
    fn bose_reference_point() {
        let entries = bose_internal_closed(1, 0.9).unwrap();
        assert!((entries[0] - 0.18).abs() < 1e-14);
        assert!((entries[1] - 0.64).abs() < 1e-14);
        assert!((entries[2] - 0.18).abs() < 1e-14);
        assert!((shannon_entropy(&entries) - 1.3026831892554922).abs() < 1e-12);
    }

    #[test]
    fn curves_reference_triple_at_step_one() {
        let curves = statistics_entropy_curves(0.9, 2).unwrap();
        assert!((curves.fermi[1] - 0.46900).abs() < 2e-4);
        assert!((curves.bose[1] - 1.30268).abs() < 2e-4);
        assert!((curves.distinguishable[1] - 0.93800).abs() < 2e-4);
        assert!(curves.max_discrepancy() < 1e-10);
    }

    #[test]
    fn fermionic_curve_never_exceeds_distinguishable() {
        let curves = statistics_entropy_curves(0.9, 30).unwrap();
        for n in 0..curves.fermi.len() {
            assert!(
                curves.fermi[n] <= curves.distinguishable[n] + 1e-12,
                "n={n}"
            );
        }
    }

    #[test]
    fn reduced_internal_two_has_symmetric_sector_support() {
        let state = ManyParticleState::source_pair(Statistics::Bose)
            .step(&op2())
            .unwrap();
        let rho = state.reduced_internal_two().unwrap();
        assert_eq!(rho.labels(), &["ee", "eg", "ge", "gg"]);
        let m = rho.matrix();
        // Mixed sector: p_sym/2 on each diagonal and the full coherence.
        assert!((m[(1, 1)].re - 0.32).abs() < 1e-12);
        assert!((m[(2, 2)].re - 0.32).abs() < 1e-12);
        assert!((m[(1, 2)].re - 0.32).abs() < 1e-12);
        let eigs = rho.eigenvalues();
        assert!(eigs[0].abs() < 1e-12);
        assert!((rho.entropy_bits() - state.internal_entropy().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_member_block_reduces_to_single_particle() {
        for n in [0u64, 1, 4, 9] {
            let block = fermion_block_entropy(0, 1, n, Q).unwrap();
            let single = decay_entropy(n, Q).unwrap();
            assert!((block - single).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn adjacent_pair_block_follows_transport_delay() {
        for n in 1..=12u64 {
            let block = fermion_block_entropy(0, 2, n, Q).unwrap();
            let expect = decay_entropy(n - 1, Q).unwrap();
            assert!((block - expect).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn delayed_pair_block_matches_frozen_oracle() {
        // Block {-1, -2}: H(q) after one step, then H(q^{n-2} (1 - q^2)).
        for n in 1..=12u64 {
            let block = fermion_block_entropy(-1, 2, n, Q).unwrap();
            let expect = if n == 1 {
                binary_entropy(Q)
            } else {
                binary_entropy(Q.powi(n as i32 - 2) * (1.0 - Q * Q))
            };
            assert!((block - expect).abs() < 1e-11, "n={n}: {block} vs {expect}");
        }
    }

    #[test]
    fn three_member_block_runs_and_starts_pure() {
        let e0 = fermion_block_entropy(0, 3, 0, Q).unwrap();
        assert!(e0.abs() < 1e-12);
        let e4 = fermion_block_entropy(0, 3, 4, Q).unwrap();
        assert!(e4.is_finite() && e4 >= 0.0);
    }

    #[test]
    fn equal_radiators_entropy_is_additive() {
        let spec = RadiatorSpec {
            q: 0.9,
            start_site: 0,
        };
        let total = independent_radiators_entropy(&[spec; 3], 1).unwrap();
        assert!((total - 1.40700).abs() < 3e-4);
        assert!((total - 3.0 * decay_entropy(1, 0.9).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn joint_brute_force_matches_closed_sum() {
        let specs = [
            RadiatorSpec {
                q: 0.9,
                start_site: 0,
            },
            RadiatorSpec {
                q: 0.8,
                start_site: -3,
            },
        ];
        for n in 0..=20u64 {
            let brute = radiators_joint_entropy(&specs, n).unwrap();
            let closed = independent_radiators_entropy(&specs, n).unwrap();
            assert!((brute - closed).abs() < 1e-10, "n={n}: {brute} vs {closed}");
        }
    }

    #[test]
    fn delayed_radiator_stays_pure_until_arrival() {
        let spec = RadiatorSpec {
            q: 0.9,
            start_site: -4,
        };
        // Three free-walk steps, entropy starts at the fourth step.
        assert_eq!(spec.entropy(3).unwrap(), 0.0);
        assert!(spec.entropy(4).unwrap() > 0.0);
    }
}
