//! Reduced density matrices, partial traces, and von Neumann entropy.
//!
//! All entropies are in bits (log base 2).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Level, PureState, Site};

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

/// Binary (Shannon) entropy of a Bernoulli(p) distribution, in bits.
/// Returns 0 at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Shannon entropy in bits of a probability vector; entries at or below zero
/// contribute nothing (eigenvalue clamping can produce exact zeros).
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &p in probs {
        if p > 0.0 {
            acc -= p * p.log2();
        }
    }
    acc
}

/// A density matrix over an explicitly labeled finite basis. Construction
/// validates hermiticity and unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    labels: Vec<String>,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_parts(labels: Vec<String>, mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() != labels.len() {
            return Err(Error::Layout(format!(
                "density matrix shape {}x{} does not match {} label(s)",
                mat.nrows(),
                mat.ncols(),
                labels.len()
            )));
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..mat.nrows() {
            for j in i..mat.ncols() {
                herm_dev = herm_dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::Numeric(format!(
                "density matrix is not Hermitian: deviation {herm_dev:.3e}"
            )));
        }
        let trace: Complex64 = (0..mat.nrows()).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::Numeric(format!(
                "density matrix trace {} is not 1",
                trace.re
            )));
        }
        Ok(DensityMatrix { labels, mat })
    }

    /// Diagonal density matrix from probabilities (validated to sum to 1).
    pub fn diagonal(labels: Vec<String>, probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let mut mat = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = Complex64::new(p, 0.0);
        }
        DensityMatrix::from_parts(labels, mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Diagonal entries (real parts; imaginary parts vanish by hermiticity).
    pub fn diagonal_probs(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Eigenvalues clamped to [0, 1], ascending. Uses the closed form for
    /// 2x2 blocks and symmetric eigendecomposition otherwise.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let mut eigs: Vec<f64> = match n {
            0 => Vec::new(),
            1 => vec![self.mat[(0, 0)].re],
            2 => {
                let a = self.mat[(0, 0)].re;
                let b = self.mat[(1, 1)].re;
                let c = self.mat[(0, 1)].norm_sqr();
                let mid = 0.5 * (a + b);
                let rad = (0.25 * (a - b) * (a - b) + c).sqrt();
                vec![mid - rad, mid + rad]
            }
            _ => {
                // Hermitian, so the self-adjoint eigensolver applies.
                let sym = nalgebra::SymmetricEigen::new(self.mat.clone());
                sym.eigenvalues.iter().copied().collect()
            }
        };
        for e in &mut eigs {
            *e = e.clamp(0.0, 1.0);
        }
        eigs.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        eigs
    }

    /// Von Neumann entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        shannon_entropy(&self.eigenvalues())
    }
}

/// Which tensor factor to keep when tracing out the rest of a pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Line,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep all internal registers, trace out all positions.
    Internal,
    /// Keep all positions, trace out all registers.
    Spatial,
    /// Keep the particle content (site and register) inside a region, trace
    /// out everything outside it. Requires one register per particle.
    RegionWithRegisters(Region),
    /// Keep only the site content inside a region; trace out sites outside
    /// it and all registers.
    RegionSites(Region),
}

fn in_region(site: Site, region: Region) -> bool {
    match (site, region) {
        (Site::Line(_), Region::Line) => true,
        (Site::Ring(_), Region::Ring) => true,
        _ => false,
    }
}

/// Kept/discarded split of one basis label. Both halves are rendered as
/// ordered, canonical byte strings so they can key the accumulation maps.
fn split_label(label: &BasisLabel2<'_>, keep: Keep) -> (String, String) {
    match keep {
        Keep::Internal => {
            let kept: String = label.regs.iter().map(|r| r.letter()).collect();
            let disc: String = label
                .sites
                .iter()
                .map(|s| format!("{s},"))
                .collect();
            (kept, disc)
        }
        Keep::Spatial => {
            let kept: String = label.sites.iter().map(|s| format!("{s},")).collect();
            let disc: String = label.regs.iter().map(|r| r.letter()).collect();
            (kept, disc)
        }
        Keep::RegionWithRegisters(region) => {
            let mut kept = String::new();
            let mut disc = String::new();
            for (slot, site) in label.sites.iter().enumerate() {
                let reg = label.regs[slot];
                let part = format!("s{slot}@{site}:{reg},");
                if in_region(*site, region) {
                    kept.push_str(&part);
                } else {
                    disc.push_str(&part);
                }
            }
            (kept, disc)
        }
        Keep::RegionSites(region) => {
            let mut kept = String::new();
            let mut disc = String::new();
            for (slot, site) in label.sites.iter().enumerate() {
                let part = format!("s{slot}@{site},");
                if in_region(*site, region) {
                    kept.push_str(&part);
                } else {
                    disc.push_str(&part);
                }
            }
            let regs: String = label.regs.iter().map(|r| r.letter()).collect();
            disc.push_str(&regs);
            (kept, disc)
        }
    }
}

struct BasisLabel2<'a> {
    sites: &'a [Site],
    regs: &'a [Level],
}

/// Partial trace of a pure state, keeping the factor selected by `keep`.
///
/// The state is treated as a ray: the accumulated matrix is divided by the
/// state's squared norm, so subnormalized states (after pruning, say) reduce
/// to a unit-trace density matrix. A numerically zero state is an error. For
/// region keeps, the state must carry one register per particle so each
/// register follows its particle across the cut.
pub fn partial_trace(state: &PureState, keep: Keep) -> Result<DensityMatrix> {
    match keep {
        Keep::Internal => {
            if state.registers() == 0 {
                return Err(Error::Layout(
                    "internal reduction of a state with no registers".into(),
                ));
            }
        }
        Keep::Spatial => {
            if state.registers() == 0 {
                return Err(Error::Layout(
                    "spatial reduction of a state with no registers leaves nothing to trace out"
                        .into(),
                ));
            }
        }
        Keep::RegionWithRegisters(_) => {
            if state.registers() != state.particles() {
                return Err(Error::Layout(format!(
                    "region reduction needs one register per particle, got {} register(s) for \
                     {} particle(s)",
                    state.registers(),
                    state.particles()
                )));
            }
        }
        Keep::RegionSites(_) => {}
    }

    // Pass 1: canonical kept-key index, in sorted order.
    let mut kept_keys: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for (label, _) in state.terms() {
        let view = BasisLabel2 {
            sites: &label.sites,
            regs: &label.regs,
        };
        let (kept, _) = split_label(&view, keep);
        kept_keys.insert(kept);
    }
    let kept_index: BTreeMap<String, usize> = kept_keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();

    // Pass 2: group amplitudes by discarded key; each group contributes the
    // outer product v v^dagger over kept indices.
    let mut groups: BTreeMap<String, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (label, amp) in state.terms() {
        let view = BasisLabel2 {
            sites: &label.sites,
            regs: &label.regs,
        };
        let (kept, disc) = split_label(&view, keep);
        let i = kept_index[&kept];
        groups.entry(disc).or_default().push((i, *amp));
    }

    let norm_sq = state.norm_sq();
    if !(norm_sq.is_finite() && norm_sq > 1e-300) {
        return Err(Error::Numeric(format!(
            "cannot reduce a state with squared norm {norm_sq}"
        )));
    }
    let dim = kept_index.len();
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for entries in groups.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                mat[(i, j)] += a * b.conj() / norm_sq;
            }
        }
    }

    let labels: Vec<String> = kept_index.keys().cloned().collect();
    DensityMatrix::from_parts(labels, mat)
}

/// Entropy in bits of the reduced state obtained by keeping `keep`.
pub fn reduced_entropy(state: &PureState, keep: Keep) -> Result<f64> {
    Ok(partial_trace(state, keep)?.entropy_bits())
}
