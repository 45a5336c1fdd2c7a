//! Step operators on the line: the shift-scatter map and detector flips.
//!
//! One time step is a sequence of gates applied in order. The standard step
//! applies the shift-scatter to every particle slot and then flips each
//! particle's register when that particle sits on the detector site. Applying
//! the flip *after* the shift is part of the model's contract: it is what
//! makes the source's internal state record exactly the number of emission
//! chances survived.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{BasisLabel, Level, PureState, Site};

const UNITARITY_TOL: f64 = 1e-12;

/// Amplitudes of the one-step scattering at the source: `alpha` keeps the
/// excitation on the source site, `beta` launches it onto the line.
/// `|alpha|^2 + |beta|^2 = 1`; the survival probability per step is
/// `q = |alpha|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterParams {
    alpha: Complex64,
    beta: Complex64,
}

impl ScatterParams {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let total = alpha.norm_sqr() + beta.norm_sqr();
        if (total - 1.0).abs() > UNITARITY_TOL {
            return Err(Error::Argument(format!(
                "|alpha|^2 + |beta|^2 = {total} is not 1"
            )));
        }
        Ok(ScatterParams { alpha, beta })
    }

    /// Real parameters from the survival probability `q` in [0, 1].
    pub fn from_survival(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Argument(format!(
                "survival probability q = {q} is outside [0, 1]"
            )));
        }
        ScatterParams::new(
            Complex64::new(q.sqrt(), 0.0),
            Complex64::new((1.0 - q).sqrt(), 0.0),
        )
    }

    /// Survival probability `q` with a phase on the surviving amplitude:
    /// `alpha = sqrt(q) e^{i phase}`, `beta = sqrt(1-q)`.
    pub fn with_phase(q: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Argument(format!(
                "survival probability q = {q} is outside [0, 1]"
            )));
        }
        ScatterParams::new(
            Complex64::from_polar(q.sqrt(), phase),
            Complex64::new((1.0 - q).sqrt(), 0.0),
        )
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `q = |alpha|^2`.
    pub fn survival(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// One gate within a step.
#[derive(Debug, Clone)]
pub enum Gate {
    /// Shift-scatter applied to every particle slot (line sites only):
    /// sites below -1 and above 0 shift right by one; the source pair
    /// (-1, 0) mixes unitarily into (0, 1).
    ShiftScatter(ScatterParams),
    /// Shift-scatter applied to a single slot, for per-particle parameters.
    ShiftScatterSlot(ScatterParams, usize),
    /// Flip `register` whenever particle `slot` occupies `site`.
    DetectorFlip {
        site: Site,
        slot: usize,
        register: usize,
    },
}

/// A full time step: gates applied in listed order.
#[derive(Debug, Clone)]
pub struct StepOperator {
    gates: Vec<Gate>,
}

impl StepOperator {
    pub fn from_gates(gates: Vec<Gate>) -> Self {
        StepOperator { gates }
    }

    /// Standard single-particle step: shift-scatter, then detector at site 1
    /// watching the particle's own register.
    pub fn standard(params: ScatterParams) -> Self {
        StepOperator::standard_multi(params, 1)
    }

    /// Standard step for `particles` slots sharing one set of scatter
    /// parameters, each slot watched by its own detector at site 1.
    pub fn standard_multi(params: ScatterParams, particles: usize) -> Self {
        let mut gates = vec![Gate::ShiftScatter(params)];
        for slot in 0..particles {
            gates.push(Gate::DetectorFlip {
                site: Site::Line(1),
                slot,
                register: slot,
            });
        }
        StepOperator { gates }
    }

    /// Moved-detector step: as standard, but the detector sits on the source
    /// site 0 and so also fires on the not-yet-emitted component.
    pub fn moved_detector(params: ScatterParams) -> Self {
        StepOperator {
            gates: vec![
                Gate::ShiftScatter(params),
                Gate::DetectorFlip {
                    site: Site::Line(0),
                    slot: 0,
                    register: 0,
                },
            ],
        }
    }

    /// Independent radiators: slot `i` scatters with `params[i]` and is
    /// watched by its own detector at site 1.
    pub fn radiators(params: &[ScatterParams]) -> Self {
        let mut gates = Vec::new();
        for (slot, p) in params.iter().enumerate() {
            gates.push(Gate::ShiftScatterSlot(*p, slot));
        }
        for slot in 0..params.len() {
            gates.push(Gate::DetectorFlip {
                site: Site::Line(1),
                slot,
                register: slot,
            });
        }
        StepOperator { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Apply one full step.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let mut current = state.clone();
        for gate in &self.gates {
            current = apply_gate(gate, &current)?;
        }
        Ok(current)
    }
}

/// The single-slot shift-scatter on a line site, written as the destination
/// amplitudes of one input ket.
fn scatter_site(
    params: &ScatterParams,
    site: i64,
) -> [(i64, Complex64); 2] {
    let zero = Complex64::new(0.0, 0.0);
    match site {
        0 => [(0, params.alpha), (1, params.beta)],
        -1 => [(0, -params.beta.conj()), (1, params.alpha.conj())],
        x => [(x + 1, Complex64::new(1.0, 0.0)), (x, zero)],
    }
}

fn apply_gate(gate: &Gate, state: &PureState) -> Result<PureState> {
    match gate {
        Gate::ShiftScatter(params) => {
            let slots: Vec<usize> = (0..state.particles()).collect();
            apply_scatter(params, &slots, state)
        }
        Gate::ShiftScatterSlot(params, slot) => {
            if *slot >= state.particles() {
                return Err(Error::Layout(format!(
                    "scatter slot {slot} out of range for {} particle(s)",
                    state.particles()
                )));
            }
            apply_scatter(params, &[*slot], state)
        }
        Gate::DetectorFlip {
            site,
            slot,
            register,
        } => {
            if *slot >= state.particles() || *register >= state.registers() {
                return Err(Error::Layout(format!(
                    "detector watches slot {slot}/register {register}, state has {} \
                     particle(s)/{} register(s)",
                    state.particles(),
                    state.registers()
                )));
            }
            let (site, slot, register) = (*site, *slot, *register);
            Ok(state.transform(|label, amp, out| {
                let mut new = label.clone();
                if new.sites[slot] == site {
                    new.regs[register] = new.regs[register].flipped();
                }
                out.push((new, amp));
            }))
        }
    }
}

fn apply_scatter(params: &ScatterParams, slots: &[usize], state: &PureState) -> Result<PureState> {
    // The scatter is line-only; reject ring occupation up front so the
    // transform itself is total.
    for (label, _) in state.terms() {
        for &slot in slots {
            if let Site::Ring(j) = label.sites[slot] {
                return Err(Error::Topology(format!(
                    "shift-scatter applied to ring site R{j} (slot {slot}); \
                     use a pinch step for ring dynamics"
                )));
            }
        }
    }
    let mut current = state.clone();
    for &slot in slots {
        let params = *params;
        current = current.transform(move |label, amp, out| {
            let x = match label.sites[slot] {
                Site::Line(x) => x,
                Site::Ring(_) => unreachable!("ring occupation rejected above"),
            };
            for (dest, coeff) in scatter_site(&params, x) {
                if coeff.re == 0.0 && coeff.im == 0.0 {
                    continue;
                }
                let mut new = label.clone();
                new.sites[slot] = Site::Line(dest);
                out.push((new, amp * coeff));
            }
        });
    }
    Ok(current)
}

/// Result of checking a step operator against a finite window of basis
/// states.
#[derive(Debug, Clone, Copy)]
pub struct UnitarityReport {
    /// Max over window kets of | ||U e_i|| - 1 |.
    pub max_norm_deviation: f64,
    /// Max over distinct window pairs of |<U e_i, U e_j>|.
    pub max_cross_overlap: f64,
}

impl UnitarityReport {
    pub fn is_unitary_within(&self, tol: f64) -> bool {
        self.max_norm_deviation <= tol && self.max_cross_overlap <= tol
    }
}

/// Check norm preservation and pairwise orthogonality of a step map over an
/// explicit basis window. `step` is any state map (a StepOperator apply, a
/// pinch step, a demon step).
pub fn check_unitarity<F>(step: F, window: &[BasisLabel]) -> Result<UnitarityReport>
where
    F: Fn(&PureState) -> Result<PureState>,
{
    let mut images = Vec::with_capacity(window.len());
    for label in window {
        images.push(step(&PureState::basis_state(label.clone()))?);
    }
    let mut max_norm_deviation: f64 = 0.0;
    let mut max_cross_overlap: f64 = 0.0;
    for (i, a) in images.iter().enumerate() {
        max_norm_deviation = max_norm_deviation.max((a.norm() - 1.0).abs());
        for b in images.iter().skip(i + 1) {
            max_cross_overlap = max_cross_overlap.max(a.inner_product(b)?.norm());
        }
    }
    Ok(UnitarityReport {
        max_norm_deviation,
        max_cross_overlap,
    })
}

/// All single-particle labels with line sites in `lo..=hi` and every register
/// value: a finite window for unitarity checks.
pub fn line_basis(lo: i64, hi: i64) -> Vec<BasisLabel> {
    let mut out = Vec::new();
    for x in lo..=hi {
        for reg in [Level::Excited, Level::Ground] {
            out.push(BasisLabel::single(Site::Line(x), reg));
        }
    }
    out
}
