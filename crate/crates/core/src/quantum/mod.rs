//! Dense state-vector realisation of an argument on `|K|`-dimensional qudits.
//!
//! The computational basis `|g>` is labelled by elements of `K`. Phase gates
//! are diagonal in the character basis and are built as `F^dag D F`, with `F`
//! the tensor product of the per-factor DFT matrices
//! `F[k, g] = e^{2 pi i chi_k(g)} / sqrt|K|` and `D = diag(e^{2 pi i beta(chi_k)})`.
//! With this convention the embedding of `h` acts as `|g> -> |g + h>`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::abelian::{FiniteAbelianGroup, RationalPhase};
use crate::scenario::{coset, Context, EmpiricalModel, MerminArgument, Outcome};

/// Simulated probabilities at or below this are not stored in sparse models.
pub const SUPPORT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantumError {
    #[error("a GHZ state needs at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("state vector of {size} amplitudes exceeds the cap of {cap}")]
    StateSpaceTooLarge { size: u64, cap: u64 },
    #[error("phase table has {found} entries, expected one per character ({expected})")]
    PhaseTableShape { expected: usize, found: usize },
}

/// Square complex matrix acting on one qudit.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleSiteGate {
    dim: usize,
    entries: Vec<Complex64>,
}

impl SingleSiteGate {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn mul(&self, other: &SingleSiteGate) -> SingleSiteGate {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        SingleSiteGate { dim: n, entries }
    }

    pub fn adjoint(&self) -> SingleSiteGate {
        let n = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        SingleSiteGate { dim: n, entries }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SingleSiteGate) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `e^{2 pi i theta}`.
pub fn unit_phase(theta: RationalPhase) -> Complex64 {
    Complex64::from_polar(1.0, TAU * theta.to_f64())
}

/// Tensor product of the per-factor unitary DFT matrices.
pub fn fourier_matrix(group: &FiniteAbelianGroup) -> SingleSiteGate {
    let mut out = SingleSiteGate::identity(1);
    for &d in group.factors() {
        let d = d as usize;
        let scale = 1.0 / (d as f64).sqrt();
        let factor: Vec<Complex64> = (0..d * d)
            .map(|idx| {
                let (k, g) = (idx / d, idx % d);
                Complex64::from_polar(scale, TAU * ((k * g) % d) as f64 / d as f64)
            })
            .collect();
        out = kron(&out, &SingleSiteGate { dim: d, entries: factor });
    }
    out
}

fn kron(a: &SingleSiteGate, b: &SingleSiteGate) -> SingleSiteGate {
    let n = a.dim * b.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..a.dim {
        for j in 0..a.dim {
            let x = a.get(i, j);
            for k in 0..b.dim {
                for l in 0..b.dim {
                    entries[(i * b.dim + k) * n + (j * b.dim + l)] = x * b.get(k, l);
                }
            }
        }
    }
    SingleSiteGate { dim: n, entries }
}

/// The phase gate with eigenvalue `e^{2 pi i beta(chi_k)}` on the character
/// basis vector labelled `k` (enumeration order).
pub fn phase_gate(group: &FiniteAbelianGroup, beta: &[RationalPhase]) -> Result<SingleSiteGate, QuantumError> {
    let n = group.order();
    if beta.len() != n {
        return Err(QuantumError::PhaseTableShape { expected: n, found: beta.len() });
    }
    let f = fourier_matrix(group);
    let diag: Vec<Complex64> = beta.iter().map(|&b| unit_phase(b)).collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for g in 0..n {
        for h in 0..n {
            entries[g * n + h] = (0..n).map(|k| f.get(k, g).conj() * diag[k] * f.get(k, h)).sum();
        }
    }
    Ok(SingleSiteGate { dim: n, entries })
}

/// Pure state of `sites` qudits, amplitudes indexed lexicographically by
/// `K^sites` (site 0 most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    group: FiniteAbelianGroup,
    sites: usize,
    amplitudes: Vec<Complex64>,
}

impl QuditState {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, outcome: &[usize]) -> Complex64 {
        self.amplitudes[self.index(outcome)]
    }

    fn index(&self, outcome: &[usize]) -> usize {
        outcome.iter().fold(0, |acc, &g| acc * self.group.order() + g)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, site: usize, gate: &SingleSiteGate) {
        let d = self.group.order();
        assert_eq!(gate.dim(), d, "gate dimension");
        assert!(site < self.sites, "site out of range");
        let inner = d.pow((self.sites - 1 - site) as u32);
        let block = inner * d;
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for start in (0..self.amplitudes.len()).step_by(block) {
            for offset in 0..inner {
                let base = start + offset;
                for (g, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amplitudes[base + g * inner];
                }
                for g in 0..d {
                    self.amplitudes[base + g * inner] = (0..d).map(|h| gate.get(g, h) * buf[h]).sum();
                }
            }
        }
    }

    /// Applies the phase gate for `tables[j]` at each site `j`.
    pub fn apply_phases(&mut self, tables: &[&[RationalPhase]]) -> Result<(), QuantumError> {
        for (site, table) in tables.iter().enumerate() {
            if table.iter().all(RationalPhase::is_zero) && table.len() == self.group.order() {
                continue;
            }
            let gate = phase_gate(&self.group, table)?;
            self.apply(site, &gate);
        }
        Ok(())
    }

    /// Born-rule probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &QuditState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Uniform superposition over `{g : sum g_j = 0}` with amplitude
/// `1 / sqrt(|K|^(N-1))`.
pub fn ghz_state(group: &FiniteAbelianGroup, parties: usize) -> Result<QuditState, QuantumError> {
    if parties < 2 {
        return Err(QuantumError::TooFewSites(parties));
    }
    let d = group.order();
    let size = d.pow(parties as u32);
    let support = d.pow(parties as u32 - 1);
    let amp = Complex64::new(1.0 / (support as f64).sqrt(), 0.0);
    let mut state =
        QuditState { group: group.clone(), sites: parties, amplitudes: vec![Complex64::new(0.0, 0.0); size] };
    for o in coset(group, parties, 0) {
        let i = state.index(&o);
        state.amplitudes[i] = amp;
    }
    Ok(state)
}

fn amplitude_count(argument: &MerminArgument) -> u64 {
    (argument.group().order() as u64).checked_pow(argument.parties() as u32).unwrap_or(u64::MAX)
}

/// Post-gate state for a context: `P_{beta_{m_j}}` at site `j` of the GHZ state.
pub fn context_state(argument: &MerminArgument, context: &Context) -> Result<QuditState, QuantumError> {
    let mut state = ghz_state(argument.group(), argument.parties())?;
    let tables: Vec<_> = context.choices.iter().map(|&m| argument.phase_table(m)).collect();
    let refs: Vec<&[RationalPhase]> = tables.iter().map(|t| t.as_ref()).collect();
    state.apply_phases(&refs)?;
    Ok(state)
}

/// Dense outcome distribution over `K^N` for one context.
pub fn simulate_context(argument: &MerminArgument, context: &Context) -> Result<Vec<f64>, QuantumError> {
    Ok(context_state(argument, context)?.probabilities())
}

fn sparse(probabilities: &[f64], order: usize, parties: usize) -> BTreeMap<Outcome, f64> {
    probabilities
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > SUPPORT_CUTOFF)
        .map(|(mut idx, &p)| {
            let mut outcome = vec![0; parties];
            for slot in outcome.iter_mut().rev() {
                *slot = idx % order;
                idx /= order;
            }
            (outcome, p)
        })
        .collect()
}

/// Born distributions for every context, computed in parallel and merged by
/// context index.
pub fn simulate_model(argument: &MerminArgument, cap: u64) -> Result<EmpiricalModel<f64>, QuantumError> {
    let size = amplitude_count(argument);
    if size > cap {
        return Err(QuantumError::StateSpaceTooLarge { size, cap });
    }
    let contexts = argument.contexts();
    let order = argument.group().order();
    let n = argument.parties();
    let distributions = contexts
        .par_iter()
        .map(|c| simulate_context(argument, c).map(|p| sparse(&p, order, n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EmpiricalModel::new(argument.group().clone(), n, contexts, distributions))
}
