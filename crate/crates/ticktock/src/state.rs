//! Sparse pure states over a lattice of line and ring sites, with internal
//! two-level registers.
//!
//! Amplitudes live in a `BTreeMap` keyed by basis label, so iteration order —
//! and therefore every downstream computation and emitted file — is
//! deterministic. Exact zeros are dropped on the fly; nothing else is ever
//! pruned unless [`PureState::prune`] is called explicitly.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A lattice position: a site on the bi-infinite line, or on a ring attached
/// to it. The derived ordering (all line sites before all ring sites) fixes
/// the canonical basis order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Line(i64),
    Ring(u32),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Line(x) => write!(f, "{x}"),
            Site::Ring(j) => write!(f, "R{j}"),
        }
    }
}

/// Internal two-level register value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Excited,
    Ground,
}

impl Level {
    pub fn flipped(self) -> Self {
        match self {
            Level::Excited => Level::Ground,
            Level::Ground => Level::Excited,
        }
    }

    /// Register value reached from `Excited` after `n` detector flips.
    pub fn after_flips(n: u64) -> Self {
        if n % 2 == 0 {
            Level::Excited
        } else {
            Level::Ground
        }
    }

    pub fn letter(self) -> char {
        match self {
            Level::Excited => 'e',
            Level::Ground => 'g',
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One basis ket: a site per particle slot and a value per register.
///
/// The derived lexicographic ordering on `(sites, regs)` is the canonical
/// basis order used by states, partial traces, and emitted output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub sites: Vec<Site>,
    pub regs: Vec<Level>,
}

impl BasisLabel {
    pub fn new(sites: Vec<Site>, regs: Vec<Level>) -> Self {
        BasisLabel { sites, regs }
    }

    /// Single-particle label with one register.
    pub fn single(site: Site, reg: Level) -> Self {
        BasisLabel {
            sites: vec![site],
            regs: vec![reg],
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ";")?;
        for r in &self.regs {
            write!(f, "{r}")?;
        }
        write!(f, ">")
    }
}

/// A finite-support pure state. The number of particle slots and registers is
/// fixed at construction; every stored label must match that layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    particles: usize,
    registers: usize,
    amps: BTreeMap<BasisLabel, Complex64>,
}

impl PureState {
    /// The state |label> with unit amplitude.
    pub fn basis_state(label: BasisLabel) -> Self {
        let particles = label.sites.len();
        let registers = label.regs.len();
        let mut amps = BTreeMap::new();
        amps.insert(label, Complex64::new(1.0, 0.0));
        PureState {
            particles,
            registers,
            amps,
        }
    }

    /// Empty (zero) state with the given layout.
    pub fn zero(particles: usize, registers: usize) -> Self {
        PureState {
            particles,
            registers,
            amps: BTreeMap::new(),
        }
    }

    /// Build a state from label/amplitude terms. Terms with the same label
    /// are summed; exact zeros are dropped.
    pub fn from_terms<I>(particles: usize, registers: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, Complex64)>,
    {
        let mut amps: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        for (label, amp) in terms {
            if label.sites.len() != particles || label.regs.len() != registers {
                return Err(Error::Layout(format!(
                    "label {label} does not match layout of {particles} particle(s), \
                     {registers} register(s)"
                )));
            }
            let entry = amps.entry(label).or_insert(Complex64::new(0.0, 0.0));
            *entry += amp;
        }
        amps.retain(|_, a| a.re != 0.0 || a.im != 0.0);
        Ok(PureState {
            particles,
            registers,
            amps,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    /// Amplitude on a basis label (zero if absent).
    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.amps
            .get(label)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Iterate stored (label, amplitude) pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amps.iter()
    }

    /// Number of basis labels with stored (nonzero) amplitude.
    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// <self|other>, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &PureState) -> Result<Complex64> {
        if self.particles != other.particles || self.registers != other.registers {
            return Err(Error::Layout(format!(
                "inner product between layouts {}p/{}r and {}p/{}r",
                self.particles, self.registers, other.particles, other.registers
            )));
        }
        // Walk the smaller support.
        let mut acc = Complex64::new(0.0, 0.0);
        if self.amps.len() <= other.amps.len() {
            for (label, amp) in &self.amps {
                if let Some(b) = other.amps.get(label) {
                    acc += amp.conj() * b;
                }
            }
        } else {
            for (label, amp) in &other.amps {
                if let Some(a) = self.amps.get(label) {
                    acc += a.conj() * amp;
                }
            }
        }
        Ok(acc)
    }

    /// Apply a linear map defined ket-by-ket: `f` receives each stored label
    /// and amplitude and pushes output (label, amplitude) contributions.
    /// Contributions are summed; exact zeros are dropped. Emitted labels must
    /// keep the state's layout.
    pub fn transform<F>(&self, mut f: F) -> PureState
    where
        F: FnMut(&BasisLabel, Complex64, &mut Vec<(BasisLabel, Complex64)>),
    {
        let mut out: BTreeMap<BasisLabel, Complex64> = BTreeMap::new();
        let mut scratch: Vec<(BasisLabel, Complex64)> = Vec::new();
        for (label, amp) in &self.amps {
            scratch.clear();
            f(label, *amp, &mut scratch);
            for (new_label, contribution) in scratch.drain(..) {
                assert_eq!(
                    (new_label.sites.len(), new_label.regs.len()),
                    (self.particles, self.registers),
                    "transform emitted a label with a different layout"
                );
                let entry = out.entry(new_label).or_insert(Complex64::new(0.0, 0.0));
                *entry += contribution;
            }
        }
        out.retain(|_, a| a.re != 0.0 || a.im != 0.0);
        PureState {
            particles: self.particles,
            registers: self.registers,
            amps: out,
        }
    }

    /// Drop amplitudes with magnitude below `eps`. Off by default everywhere;
    /// evolution is exactly sparse, so this exists only to bound support on
    /// very long leaky-ring runs.
    pub fn prune(&mut self, eps: f64) {
        self.amps.retain(|_, a| a.norm() >= eps);
    }

    /// Total probability of labels satisfying `pred`.
    pub fn probability_where<F>(&self, pred: F) -> f64
    where
        F: Fn(&BasisLabel) -> bool,
    {
        // Explicit +0.0 seed: the std float Sum starts from -0.0, which
        // would leak a negative zero out of an empty selection.
        self.amps
            .iter()
            .filter(|(l, _)| pred(l))
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, |acc, p| acc + p)
    }

    /// `self` scaled by a complex constant.
    pub fn scaled(&self, c: Complex64) -> PureState {
        let mut amps = self.amps.clone();
        amps.retain(|_, a| {
            *a *= c;
            a.re != 0.0 || a.im != 0.0
        });
        PureState {
            particles: self.particles,
            registers: self.registers,
            amps,
        }
    }

    /// `self + other` (layouts must match).
    pub fn add(&self, other: &PureState) -> Result<PureState> {
        if self.particles != other.particles || self.registers != other.registers {
            return Err(Error::Layout(format!(
                "adding states with layouts {}p/{}r and {}p/{}r",
                self.particles, self.registers, other.particles, other.registers
            )));
        }
        let mut amps = self.amps.clone();
        for (label, amp) in &other.amps {
            let entry = amps.entry(label.clone()).or_insert(Complex64::new(0.0, 0.0));
            *entry += *amp;
        }
        amps.retain(|_, a| a.re != 0.0 || a.im != 0.0);
        Ok(PureState {
            particles: self.particles,
            registers: self.registers,
            amps,
        })
    }
}
