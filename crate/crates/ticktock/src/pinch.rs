//! The pinched lattice: a bi-infinite line coupled to a ring of length `l`
//! through a 2x2 port unitary, with static, scheduled, and detector-controlled
//! (demon) dynamics.
//!
//! One step is: (1) the port unitary `K` mixes the two sites feeding the
//! junction — `Line(-1)` from outside and `Ring(l-1)` from inside — then
//! (2) the routing shift moves every site forward: `Line(x) -> Line(x+1)`
//! except `Line(-1) -> Ring(0)`, and `Ring(j) -> Ring(j+1)` except
//! `Ring(l-1) -> Line(0)`. The identity port threads the line through the
//! ring; the swap port disconnects them exactly ("two completely separate
//! systems"); intermediate ports leak a tunable amplitude per revolution.

use num_complex::Complex64;

use crate::density::{binary_entropy, partial_trace, Keep, Region};
use crate::error::{Error, Result};
use crate::state::{BasisLabel, Level, PureState, Site};

const UNITARITY_TOL: f64 = 1e-12;

/// The pinched lattice: the full line plus a ring of `ring_len` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PinchTopology {
    ring_len: u32,
}

impl PinchTopology {
    pub fn new(ring_len: u32) -> Result<Self> {
        if ring_len == 0 {
            return Err(Error::Topology("ring length must be at least 1".into()));
        }
        Ok(PinchTopology { ring_len })
    }

    pub fn ring_len(&self) -> u32 {
        self.ring_len
    }

    pub fn validate_site(&self, site: Site) -> Result<()> {
        match site {
            Site::Line(_) => Ok(()),
            Site::Ring(j) if j < self.ring_len => Ok(()),
            Site::Ring(j) => Err(Error::Topology(format!(
                "ring site R{j} is outside a ring of length {}",
                self.ring_len
            ))),
        }
    }

    /// Single-particle basis state, validated against the topology.
    pub fn basis_state(&self, site: Site, reg: Level) -> Result<PureState> {
        self.validate_site(site)?;
        Ok(PureState::basis_state(BasisLabel::single(site, reg)))
    }

    /// The routing permutation applied after the port.
    pub fn route(&self, site: Site) -> Site {
        match site {
            Site::Line(-1) => Site::Ring(0),
            Site::Line(x) => Site::Line(x + 1),
            Site::Ring(j) if j + 1 < self.ring_len => Site::Ring(j + 1),
            Site::Ring(_) => Site::Line(0),
        }
    }

    /// Finite basis window for unitarity checks: line sites `lo..=hi`, every
    /// ring site, both register values.
    pub fn window_basis(&self, lo: i64, hi: i64) -> Vec<BasisLabel> {
        let mut out = Vec::new();
        for x in lo..=hi {
            for reg in [Level::Excited, Level::Ground] {
                out.push(BasisLabel::single(Site::Line(x), reg));
            }
        }
        for j in 0..self.ring_len {
            for reg in [Level::Excited, Level::Ground] {
                out.push(BasisLabel::single(Site::Ring(j), reg));
            }
        }
        out
    }
}

/// A 2x2 unitary acting on the junction span (`Line(-1)`, `Ring(l-1)`)
/// before the routing shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortUnitary {
    k: [[Complex64; 2]; 2],
}

impl PortUnitary {
    pub fn new(k: [[Complex64; 2]; 2]) -> Result<Self> {
        // Columns orthonormal.
        let col = |j: usize| (k[0][j], k[1][j]);
        let (a0, b0) = col(0);
        let (a1, b1) = col(1);
        let n0 = a0.norm_sqr() + b0.norm_sqr();
        let n1 = a1.norm_sqr() + b1.norm_sqr();
        let cross = (a0.conj() * a1 + b0.conj() * b1).norm();
        if (n0 - 1.0).abs() > UNITARITY_TOL || (n1 - 1.0).abs() > UNITARITY_TOL
            || cross > UNITARITY_TOL
        {
            return Err(Error::Argument(format!(
                "port matrix is not unitary (column norms {n0}, {n1}, overlap {cross:.3e})"
            )));
        }
        Ok(PortUnitary { k })
    }

    /// The open port: line traffic threads through the ring and back out.
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        PortUnitary {
            k: [[one, zero], [zero, one]],
        }
    }

    /// The closed port: exterior hops straight over the junction and the
    /// ring circulates forever — the two systems decouple exactly.
    pub fn swap() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        PortUnitary {
            k: [[zero, one], [one, zero]],
        }
    }

    /// Almost-closed port that keeps ring content inside with amplitude
    /// `survival_amp` per revolution (and lets the rest leak out):
    /// [[-c, s], [s, c]] with c = sqrt(1 - s^2).
    pub fn near_decoupling(survival_amp: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&survival_amp) {
            return Err(Error::Argument(format!(
                "survival amplitude {survival_amp} is outside [0, 1]"
            )));
        }
        let s = Complex64::new(survival_amp, 0.0);
        let c = Complex64::new((1.0 - survival_amp * survival_amp).sqrt(), 0.0);
        PortUnitary::new([[-c, s], [s, c]])
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.k
    }

    /// Per-revolution ring survival probability under this port.
    pub fn ring_survival(&self) -> f64 {
        self.k[0][1].norm_sqr()
    }
}

fn apply_port(
    topo: &PinchTopology,
    port: &PortUnitary,
    state: &PureState,
) -> PureState {
    let junction_in = Site::Line(-1);
    let ring_exit = Site::Ring(topo.ring_len - 1);
    let k = *port.entries();
    state.transform(|label, amp, out| {
        let site = label.sites[0];
        let inputs: Option<usize> = if site == junction_in {
            Some(0)
        } else if site == ring_exit {
            Some(1)
        } else {
            None
        };
        match inputs {
            None => out.push((label.clone(), amp)),
            Some(j) => {
                for (i, dest) in [junction_in, ring_exit].into_iter().enumerate() {
                    let coeff = k[i][j];
                    if coeff.re == 0.0 && coeff.im == 0.0 {
                        continue;
                    }
                    let mut new = label.clone();
                    new.sites[0] = dest;
                    out.push((new, amp * coeff));
                }
            }
        }
    })
}

fn apply_routing(topo: &PinchTopology, state: &PureState) -> PureState {
    state.transform(|label, amp, out| {
        let mut new = label.clone();
        new.sites[0] = topo.route(label.sites[0]);
        out.push((new, amp));
    })
}

/// One pinch step: port, then routing. Single-particle states only.
pub fn pinch_step(
    topo: &PinchTopology,
    port: &PortUnitary,
    state: &PureState,
) -> Result<PureState> {
    if state.particles() != 1 {
        return Err(Error::Layout(format!(
            "pinch steps are single-particle, got {} slots",
            state.particles()
        )));
    }
    for (label, _) in state.terms() {
        topo.validate_site(label.sites[0])?;
    }
    Ok(apply_routing(topo, &apply_port(topo, port, state)))
}

/// Total probability of finding the particle on the ring.
pub fn interior_probability(state: &PureState) -> f64 {
    state.probability_where(|label| label.sites.iter().any(|s| matches!(s, Site::Ring(_))))
}

/// Entanglement entropy in bits across the interior/exterior cut (ring
/// content kept, line content traced out).
pub fn interior_exterior_entropy(state: &PureState) -> Result<f64> {
    Ok(partial_trace(state, Keep::RegionWithRegisters(Region::Ring))?.entropy_bits())
}

/// One sample of the leaky-ring decay curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalPoint {
    pub n: u64,
    /// Brute-force interior probability.
    pub interior: f64,
    /// Closed form: survival^(2 * floor(n / l)).
    pub interior_closed: f64,
    /// Brute-force interior/exterior entanglement entropy.
    pub entropy: f64,
    /// Closed form: binary entropy of the closed interior probability.
    pub entropy_closed: f64,
}

/// Evolve a particle that starts on `Ring(0)` under a constant
/// near-decoupling port and record the interior decay curve. Escaped
/// amplitude walks away down the line and never returns, so the interior
/// probability is exactly `survival_amp^(2m)` after `m` completed
/// revolutions.
pub fn ring_survival_curve(
    topo: &PinchTopology,
    survival_amp: f64,
    n_max: u64,
    prune_epsilon: Option<f64>,
) -> Result<Vec<SurvivalPoint>> {
    let port = PortUnitary::near_decoupling(survival_amp)?;
    let mut state = topo.basis_state(Site::Ring(0), Level::Excited)?;
    let l = topo.ring_len() as u64;
    let q = survival_amp * survival_amp;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let passages = (n / l) as i32;
        let closed = q.powi(passages);
        out.push(SurvivalPoint {
            n,
            interior: interior_probability(&state),
            interior_closed: closed,
            entropy: interior_exterior_entropy(&state)?,
            entropy_closed: binary_entropy(closed),
        });
        if n < n_max {
            state = pinch_step(topo, &port, &state)?;
            if let Some(eps) = prune_epsilon {
                state.prune(eps);
            }
        }
    }
    Ok(out)
}

/// A piecewise-constant port schedule: entries (start_step, port), sorted by
/// start step; the port in force at step t is the last entry with
/// start <= t.
#[derive(Debug, Clone)]
pub struct Schedule {
    entries: Vec<(u64, PortUnitary)>,
}

impl Schedule {
    pub fn new(entries: Vec<(u64, PortUnitary)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Argument("schedule needs at least one entry".into()));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Argument(
                "schedule start steps must be strictly increasing".into(),
            ));
        }
        Ok(Schedule { entries })
    }

    pub fn constant(port: PortUnitary) -> Self {
        Schedule {
            entries: vec![(0, port)],
        }
    }

    /// The port in force at step `step`.
    pub fn port_at(&self, step: u64) -> Result<&PortUnitary> {
        self.entries
            .iter()
            .rev()
            .find(|(start, _)| *start <= step)
            .map(|(_, port)| port)
            .ok_or(Error::Schedule(step as usize))
    }
}

/// Evolve under a schedule for `steps` steps (steps are numbered from 0).
pub fn evolve_scheduled(
    topo: &PinchTopology,
    schedule: &Schedule,
    initial: &PureState,
    steps: u64,
) -> Result<PureState> {
    let mut state = initial.clone();
    for t in 0..steps {
        state = pinch_step(topo, schedule.port_at(t)?, &state)?;
    }
    Ok(state)
}

/// A detector-controlled pinch: the particle's own register is the door
/// memory. Each step runs four stages in a fixed order that is part of the
/// scenario contract:
/// 1. flip the register if the particle sits on `approach` (arm the door),
/// 2. apply `open` or `closed` at the junction according to the register
///    (excited = open),
/// 3. flip the register if the particle sits on `interior` (the door closes
///    behind anything that made it inside),
/// 4. the routing shift.
///
/// Every stage is unitary, so the composed step is too. Note the interior
/// detector fires again on every revolution: a captured particle toggles the
/// one-bit memory each time it passes `interior`, re-opening the door, and
/// deterministically escapes after roughly two revolutions. Permanent
/// confinement needs either a bigger memory or a ring long enough that the
/// observation window ends first.
#[derive(Debug, Clone, Copy)]
pub struct DemonSpec {
    pub open: PortUnitary,
    pub closed: PortUnitary,
    pub approach: Site,
    pub interior: Site,
}

impl DemonSpec {
    /// The scenario from the text: open = identity (thread into the ring),
    /// closed = swap (sealed), armed one site before the junction, disarmed
    /// on the first ring site.
    pub fn standard() -> Self {
        DemonSpec {
            open: PortUnitary::identity(),
            closed: PortUnitary::swap(),
            approach: Site::Line(-1),
            interior: Site::Ring(0),
        }
    }

    pub fn validate(&self, topo: &PinchTopology) -> Result<()> {
        match self.approach {
            Site::Line(_) => {}
            Site::Ring(_) => {
                return Err(Error::Topology(
                    "the approach detector must watch a line site".into(),
                ))
            }
        }
        match self.interior {
            Site::Ring(_) => topo.validate_site(self.interior)?,
            Site::Line(_) => {
                return Err(Error::Topology(
                    "the interior detector must watch a ring site".into(),
                ))
            }
        }
        Ok(())
    }
}

fn flip_at(site: Site, state: &PureState) -> PureState {
    state.transform(|label, amp, out| {
        let mut new = label.clone();
        if new.sites[0] == site {
            new.regs[0] = new.regs[0].flipped();
        }
        out.push((new, amp));
    })
}

fn apply_controlled_port(
    topo: &PinchTopology,
    spec: &DemonSpec,
    state: &PureState,
) -> PureState {
    let junction_in = Site::Line(-1);
    let ring_exit = Site::Ring(topo.ring_len() - 1);
    let open = *spec.open.entries();
    let closed = *spec.closed.entries();
    state.transform(|label, amp, out| {
        let site = label.sites[0];
        let j: Option<usize> = if site == junction_in {
            Some(0)
        } else if site == ring_exit {
            Some(1)
        } else {
            None
        };
        match j {
            None => out.push((label.clone(), amp)),
            Some(j) => {
                let k = if label.regs[0] == Level::Excited {
                    open
                } else {
                    closed
                };
                for (i, dest) in [junction_in, ring_exit].into_iter().enumerate() {
                    let coeff = k[i][j];
                    if coeff.re == 0.0 && coeff.im == 0.0 {
                        continue;
                    }
                    let mut new = label.clone();
                    new.sites[0] = dest;
                    out.push((new, amp * coeff));
                }
            }
        }
    })
}

/// One demon step (see [`DemonSpec`] for the stage order).
pub fn demon_step(
    topo: &PinchTopology,
    spec: &DemonSpec,
    state: &PureState,
) -> Result<PureState> {
    if state.particles() != 1 || state.registers() != 1 {
        return Err(Error::Layout(
            "demon steps need one particle with one register".into(),
        ));
    }
    spec.validate(topo)?;
    for (label, _) in state.terms() {
        topo.validate_site(label.sites[0])?;
    }
    let armed = flip_at(spec.approach, state);
    let ported = apply_controlled_port(topo, spec, &armed);
    let sealed = flip_at(spec.interior, &ported);
    Ok(apply_routing(topo, &sealed))
}

/// The flanking-pairs formulation on a plain line: a 4x4 port on sites
/// {0, 1, l+2, l+3} surrounding the interior block {2, ..., l+1}, followed
/// by the global shift x -> x+1. With [`flanking::decoupling_k4`] the
/// interior block becomes a standalone circle of period l+1 (step-end
/// support {2, ..., l+2}) while exterior traffic hops straight from 1 to
/// l+3.
pub mod flanking {
    use super::*;

    /// The block-decoupling port: it exchanges the inner flank site 1 with
    /// the outer flank site l+2, turning the interior into a circle.
    pub fn decoupling_k4() -> [[Complex64; 4]; 4] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        [
            [one, zero, zero, zero],
            [zero, zero, one, zero],
            [zero, one, zero, zero],
            [zero, zero, zero, one],
        ]
    }

    fn check_unitary4(k: &[[Complex64; 4]; 4]) -> Result<()> {
        for a in 0..4 {
            for b in a..4 {
                let mut dot = Complex64::new(0.0, 0.0);
                for r in 0..4 {
                    dot += k[r][a].conj() * k[r][b];
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                if (dot - Complex64::new(expect, 0.0)).norm() > UNITARITY_TOL {
                    return Err(Error::Argument(format!(
                        "4x4 port columns {a} and {b} are not orthonormal"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One flanking step for interior length `l`: the 4x4 port on
    /// (0, 1, l+2, l+3), then the global shift.
    pub fn step(
        state: &PureState,
        l: u32,
        k4: &[[Complex64; 4]; 4],
    ) -> Result<PureState> {
        if state.particles() != 1 {
            return Err(Error::Layout(format!(
                "flanking steps are single-particle, got {} slots",
                state.particles()
            )));
        }
        check_unitary4(k4)?;
        let span = [
            Site::Line(0),
            Site::Line(1),
            Site::Line(l as i64 + 2),
            Site::Line(l as i64 + 3),
        ];
        for (label, _) in state.terms() {
            if matches!(label.sites[0], Site::Ring(_)) {
                return Err(Error::Topology(
                    "the flanking formulation lives on the line only".into(),
                ));
            }
        }
        let k = *k4;
        let ported = state.transform(|label, amp, out| {
            let site = label.sites[0];
            match span.iter().position(|s| *s == site) {
                None => out.push((label.clone(), amp)),
                Some(j) => {
                    for (i, dest) in span.into_iter().enumerate() {
                        let coeff = k[i][j];
                        if coeff.re == 0.0 && coeff.im == 0.0 {
                            continue;
                        }
                        let mut new = label.clone();
                        new.sites[0] = dest;
                        out.push((new, amp * coeff));
                    }
                }
            }
        });
        Ok(ported.transform(|label, amp, out| {
            let mut new = label.clone();
            match new.sites[0] {
                Site::Line(x) => new.sites[0] = Site::Line(x + 1),
                Site::Ring(_) => unreachable!("ring sites rejected above"),
            }
            out.push((new, amp));
        }))
    }

    /// Probability on the circle sites {2, ..., l+2} (step-end support of
    /// the decoupled interior).
    pub fn circle_probability(state: &PureState, l: u32) -> f64 {
        state.probability_where(|label| match label.sites[0] {
            Site::Line(x) => (2..=l as i64 + 2).contains(&x),
            Site::Ring(_) => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::check_unitarity;

    #[test]
    fn topology_validates_ring_sites() {
        let topo = PinchTopology::new(4).unwrap();
        assert!(topo.validate_site(Site::Ring(3)).is_ok());
        assert!(matches!(
            topo.validate_site(Site::Ring(4)),
            Err(Error::Topology(_))
        ));
        assert!(PinchTopology::new(0).is_err());
    }

    #[test]
    fn routing_is_the_documented_permutation() {
        let topo = PinchTopology::new(3).unwrap();
        assert_eq!(topo.route(Site::Line(-2)), Site::Line(-1));
        assert_eq!(topo.route(Site::Line(-1)), Site::Ring(0));
        assert_eq!(topo.route(Site::Ring(0)), Site::Ring(1));
        assert_eq!(topo.route(Site::Ring(2)), Site::Line(0));
        assert_eq!(topo.route(Site::Line(0)), Site::Line(1));
    }

    #[test]
    fn port_constructors_are_unitary_and_validated() {
        assert!(PortUnitary::near_decoupling(0.9486832980505138).is_ok());
        assert!(PortUnitary::near_decoupling(1.5).is_err());
        let bad = [
            [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        assert!(PortUnitary::new(bad).is_err());
    }

    #[test]
    fn identity_port_threads_line_through_ring() {
        // Line(-3) reaches Line(0) after l + 3 steps: 2 to reach the
        // junction input, 1 to enter, l - 1 to circle, 1 to exit.
        let l = 5u32;
        let topo = PinchTopology::new(l).unwrap();
        let port = PortUnitary::identity();
        let mut state = topo.basis_state(Site::Line(-3), Level::Excited).unwrap();
        for _ in 0..(l + 3) {
            state = pinch_step(&topo, &port, &state).unwrap();
        }
        assert!(
            (state
                .amplitude(&BasisLabel::single(Site::Line(0), Level::Excited))
                .norm()
                - 1.0)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn swap_port_decouples_exactly() {
        let l = 4u32;
        let topo = PinchTopology::new(l).unwrap();
        let port = PortUnitary::swap();
        // Exterior bypasses the ring: Line(-3) to Line(0) in 3 steps.
        let mut outside = topo.basis_state(Site::Line(-3), Level::Excited).unwrap();
        for _ in 0..3 {
            outside = pinch_step(&topo, &port, &outside).unwrap();
            assert_eq!(interior_probability(&outside), 0.0);
        }
        assert!(
            (outside
                .amplitude(&BasisLabel::single(Site::Line(0), Level::Excited))
                .norm()
                - 1.0)
                .abs()
                < 1e-12
        );
        // Interior circulates with period l.
        let start = topo.basis_state(Site::Ring(1), Level::Ground).unwrap();
        let mut inside = start.clone();
        for n in 1..=(3 * l) {
            inside = pinch_step(&topo, &port, &inside).unwrap();
            assert!((interior_probability(&inside) - 1.0).abs() < 1e-12);
            if n % l == 0 {
                let overlap = start.inner_product(&inside).unwrap();
                assert!((overlap.norm() - 1.0).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn pinch_step_is_unitary_for_assorted_ports() {
        let topo = PinchTopology::new(3).unwrap();
        for port in [
            PortUnitary::identity(),
            PortUnitary::swap(),
            PortUnitary::near_decoupling(0.9486832980505138).unwrap(),
        ] {
            let report = check_unitarity(
                |s| pinch_step(&topo, &port, s),
                &topo.window_basis(-4, 4),
            )
            .unwrap();
            assert!(report.is_unitary_within(1e-12), "{report:?}");
        }
    }

    #[test]
    fn survival_curve_matches_closed_form() {
        // |kappa'|^2 = 0.9, l = 4: interior probability 0.9^3 = 0.729 after
        // three revolutions, exactly.
        let topo = PinchTopology::new(4).unwrap();
        let curve = ring_survival_curve(&topo, 0.9f64.sqrt(), 12, None).unwrap();
        for point in &curve {
            assert!(
                (point.interior - point.interior_closed).abs() < 1e-12,
                "n={}",
                point.n
            );
            assert!(
                (point.entropy - point.entropy_closed).abs() < 1e-12,
                "n={}",
                point.n
            );
        }
        assert!((curve[12].interior - 0.729).abs() < 1e-12);
    }

    #[test]
    fn schedule_lookup_and_validation() {
        let s = Schedule::new(vec![
            (0, PortUnitary::identity()),
            (5, PortUnitary::swap()),
        ])
        .unwrap();
        assert_eq!(*s.port_at(0).unwrap(), PortUnitary::identity());
        assert_eq!(*s.port_at(4).unwrap(), PortUnitary::identity());
        assert_eq!(*s.port_at(5).unwrap(), PortUnitary::swap());
        assert_eq!(*s.port_at(500).unwrap(), PortUnitary::swap());
        assert!(Schedule::new(vec![]).is_err());
        assert!(Schedule::new(vec![
            (3, PortUnitary::identity()),
            (3, PortUnitary::swap())
        ])
        .is_err());
    }

    #[test]
    fn baby_universe_freezes_interior_after_decoupling() {
        // Leak for a while, then seal: interior probability and entropy stay
        // exactly where they were.
        let l = 4u32;
        let topo = PinchTopology::new(l).unwrap();
        let seal_at = 2 * l as u64 + 1;
        let schedule = Schedule::new(vec![
            (0, PortUnitary::near_decoupling(0.9f64.sqrt()).unwrap()),
            (seal_at, PortUnitary::swap()),
        ])
        .unwrap();
        let mut state = topo.basis_state(Site::Ring(0), Level::Excited).unwrap();
        for t in 0..seal_at {
            state = pinch_step(&topo, schedule.port_at(t).unwrap(), &state).unwrap();
        }
        let frozen_p = interior_probability(&state);
        let frozen_s = interior_exterior_entropy(&state).unwrap();
        assert!(frozen_p > 0.0 && frozen_p < 1.0);
        for t in seal_at..seal_at + 3 * l as u64 {
            state = pinch_step(&topo, schedule.port_at(t).unwrap(), &state).unwrap();
            assert!((interior_probability(&state) - frozen_p).abs() < 1e-12);
            assert!(
                (interior_exterior_entropy(&state).unwrap() - frozen_s).abs() < 1e-12
            );
        }
    }

    #[test]
    fn prodigal_pause_preserves_interior_phases() {
        // Sealing for a whole number of revolutions and reopening gives the
        // same curve as never sealing, shifted by the pause.
        let l = 5u32;
        let topo = PinchTopology::new(l).unwrap();
        let leak = PortUnitary::near_decoupling(0.8).unwrap();
        let pause_start = 7u64;
        let pause_len = 2 * l as u64;
        let paused = Schedule::new(vec![
            (0, leak),
            (pause_start, PortUnitary::swap()),
            (pause_start + pause_len, leak),
        ])
        .unwrap();
        let start = topo.basis_state(Site::Ring(0), Level::Excited).unwrap();
        let total = pause_start + pause_len + 3 * l as u64 + 2;
        let with_pause = evolve_scheduled(&topo, &paused, &start, total).unwrap();
        let without_pause = evolve_scheduled(
            &topo,
            &Schedule::constant(leak),
            &start,
            total - pause_len,
        )
        .unwrap();
        let p1 = interior_probability(&with_pause);
        let p2 = interior_probability(&without_pause);
        assert!((p1 - p2).abs() <= 1e-15);
        let s1 = interior_exterior_entropy(&with_pause).unwrap();
        let s2 = interior_exterior_entropy(&without_pause).unwrap();
        assert!((s1 - s2).abs() <= 1e-15);
        // The ring amplitudes themselves (not just probabilities) agree.
        for (label, amp) in with_pause.terms() {
            if matches!(label.sites[0], Site::Ring(_)) {
                assert!((amp - without_pause.amplitude(label)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn demon_captures_and_later_releases() {
        // Small ring: capture is total by step 6, and the one-bit memory
        // recurrence frees the particle at exactly step 2l + 5.
        let l = 7u32;
        let topo = PinchTopology::new(l).unwrap();
        let spec = DemonSpec::standard();
        let mut state = topo.basis_state(Site::Line(-5), Level::Ground).unwrap();
        let mut first_out_after_capture = None;
        for n in 1..=(2 * l as u64 + 6) {
            state = demon_step(&topo, &spec, &state).unwrap();
            let p = interior_probability(&state);
            if n < 5 {
                assert_eq!(p, 0.0, "n={n}");
            }
            if (5..2 * l as u64 + 5).contains(&n) {
                assert!((p - 1.0).abs() < 1e-12, "n={n}: {p}");
            }
            if n >= 5 && p < 0.5 && first_out_after_capture.is_none() {
                first_out_after_capture = Some(n);
            }
        }
        assert_eq!(first_out_after_capture, Some(2 * l as u64 + 5));
    }

    #[test]
    fn demon_step_is_unitary() {
        let topo = PinchTopology::new(4).unwrap();
        let spec = DemonSpec::standard();
        let report = check_unitarity(
            |s| demon_step(&topo, &spec, s),
            &topo.window_basis(-4, 4),
        )
        .unwrap();
        assert!(report.is_unitary_within(1e-12), "{report:?}");
    }

    #[test]
    fn demon_rejects_misplaced_detectors() {
        let topo = PinchTopology::new(4).unwrap();
        let mut spec = DemonSpec::standard();
        spec.interior = Site::Line(2);
        let state = topo.basis_state(Site::Line(-1), Level::Ground).unwrap();
        assert!(matches!(
            demon_step(&topo, &spec, &state),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn flanking_decoupling_makes_an_interior_circle() {
        let l = 4u32;
        let k4 = flanking::decoupling_k4();
        // Interior content cycles with period l + 1 on sites {2..l+2}.
        let start = PureState::basis_state(BasisLabel::single(Site::Line(2), Level::Excited));
        let mut inside = start.clone();
        for n in 1..=(2 * (l + 1)) {
            inside = flanking::step(&inside, l, &k4).unwrap();
            assert!(
                (flanking::circle_probability(&inside, l) - 1.0).abs() < 1e-12,
                "n={n}"
            );
        }
        let overlap = start.inner_product(&inside).unwrap();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        // Exterior content hops the block: site 1 lands on l + 3.
        let outside = PureState::basis_state(BasisLabel::single(Site::Line(1), Level::Ground));
        let hopped = flanking::step(&outside, l, &k4).unwrap();
        assert!(
            (hopped
                .amplitude(&BasisLabel::single(Site::Line(l as i64 + 3), Level::Ground))
                .norm()
                - 1.0)
                .abs()
                < 1e-12
        );
        assert_eq!(flanking::circle_probability(&hopped, l), 0.0);
    }
}
