//! Measurement scenarios built from a validated argument: zero-padding of the
//! system, the control and cyclic variation contexts, and the exact empirical
//! model.

mod model;

pub use model::{check_no_signalling, coset, expected_model, max_abs_deviation, EmpiricalModel, Outcome};

use std::borrow::Cow;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianError, EquationSystem, FiniteAbelianGroup, GroupElement, PhaseSolution, RationalPhase};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("at least 2 parties are required, got {0}")]
    TooFewParties(usize),
    #[error("gcd violation: gcd(N, exp K) = gcd({parties}, {exponent}) = {gcd}, expected 1")]
    GcdViolation { parties: usize, exponent: u64, gcd: u64 },
    #[error("equation {equation}: {reason}")]
    CoefficientBound { equation: usize, reason: String },
    #[error("the supplied phases do not solve the system for every character")]
    PhaseNotASolution,
    #[error("system is inconsistent, so it has no solution in the phase group")]
    InconsistentSystem,
    #[error("argument group {argument} does not match the system's group {system}")]
    GroupMismatch { argument: String, system: String },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// A validated generalised Mermin-type argument: group, system, phase
/// solution and party count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerminArgument {
    system: EquationSystem,
    beta: PhaseSolution,
    parties: usize,
}

/// Checks every condition on the quintuple and returns the argument.
pub fn validate_argument(
    group: &FiniteAbelianGroup,
    system: EquationSystem,
    beta: PhaseSolution,
    parties: usize,
) -> Result<MerminArgument, ScenarioError> {
    if group != system.group() {
        return Err(ScenarioError::GroupMismatch { argument: group.to_string(), system: system.group().to_string() });
    }
    check_structure(&system, parties)?;
    if !system.is_consistent() {
        return Err(ScenarioError::InconsistentSystem);
    }
    if !beta.satisfies(&system) {
        return Err(ScenarioError::PhaseNotASolution);
    }
    Ok(MerminArgument { system, beta, parties })
}

fn check_structure(system: &EquationSystem, parties: usize) -> Result<(), ScenarioError> {
    if parties < 2 {
        return Err(ScenarioError::TooFewParties(parties));
    }
    let exponent = system.group().exponent();
    let gcd = (parties as u64).gcd(&exponent);
    if gcd != 1 {
        return Err(ScenarioError::GcdViolation { parties, exponent, gcd });
    }
    for s in 0..system.equations() {
        let row = system.coefficients().row(s);
        if let Some((r, &n)) = row.iter().enumerate().find(|(_, &n)| n < 0) {
            return Err(ScenarioError::CoefficientBound {
                equation: s + 1,
                reason: format!(
                    "coefficient n_{} = {n} is negative; coefficients count parties, \
                     so rewrite it as a nonnegative representative mod exp K = {exponent} \
                     (this changes the phase equation, so it is not done automatically)",
                    r + 1
                ),
            });
        }
        let total: i64 = row.iter().sum();
        if total > parties as i64 {
            return Err(ScenarioError::CoefficientBound {
                equation: s + 1,
                reason: format!("coefficient sum {total} exceeds the number of parties {parties}"),
            });
        }
    }
    Ok(())
}

impl MerminArgument {
    /// Builds the argument with phases supplied by the torus solver.
    pub fn with_torus_solution(system: EquationSystem, parties: usize) -> Result<Self, ScenarioError> {
        check_structure(&system, parties)?;
        let beta = system.solve_in_torus().map_err(|e| match e {
            AbelianError::InconsistentSystem => ScenarioError::InconsistentSystem,
            other => ScenarioError::Abelian(other),
        })?;
        let group = system.group().clone();
        validate_argument(&group, system, beta, parties)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.system.group()
    }

    pub fn system(&self) -> &EquationSystem {
        &self.system
    }

    pub fn beta(&self) -> &PhaseSolution {
        &self.beta
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Largest measurement choice `M`.
    pub fn max_choice(&self) -> usize {
        self.system.unknowns()
    }

    /// Phase table applied for measurement choice `m`; choice 0 is the zero phase.
    pub fn phase_table(&self, choice: usize) -> Cow<'_, [RationalPhase]> {
        if choice == 0 {
            Cow::Owned(vec![RationalPhase::zero(); self.group().order()])
        } else {
            Cow::Borrowed(self.beta.table(choice - 1))
        }
    }

    pub fn zero_pad(&self) -> PaddedSystem {
        zero_pad(self)
    }

    pub fn contexts(&self) -> Vec<Context> {
        contexts(self)
    }

    /// `a^s` for the context's equation; zero for the control.
    pub fn context_target(&self, label: &ContextLabel) -> GroupElement {
        match *label {
            ContextLabel::Control => self.group().zero(),
            ContextLabel::Variation { equation, .. } => self.system.rhs()[equation - 1].clone(),
        }
    }

    /// The context whose choice tuple is `choices`, if any (first match).
    pub fn find_context(&self, choices: &[usize]) -> Option<Context> {
        self.contexts().into_iter().find(|c| c.choices == choices)
    }
}

/// The system extended with `y_0` so every equation involves exactly `N`
/// phases, plus the control equation `N y_0 = 0` at row 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaddedSystem {
    pub coefficients: Vec<Vec<u64>>,
    pub rhs: Vec<GroupElement>,
}

impl PaddedSystem {
    /// Choices of the first variation for equation `s` (row `s` of the padded
    /// table): the first `n_0` parties choose 0, the next `n_1` choose 1, ...
    pub fn base_pattern(&self, s: usize) -> Vec<usize> {
        let row = &self.coefficients[s];
        let parties: u64 = row.iter().sum();
        (0..parties)
            .map(|j| {
                // largest m with j >= n_0 + ... + n_{m-1}, party index j from 0
                let mut cumulative = 0u64;
                let mut choice = 0;
                for (m, &n) in row.iter().enumerate() {
                    if j >= cumulative {
                        choice = m;
                    }
                    cumulative += n;
                }
                choice
            })
            .collect()
    }
}

pub fn zero_pad(argument: &MerminArgument) -> PaddedSystem {
    let system = argument.system();
    let n = argument.parties() as u64;
    let m = system.unknowns();
    let mut coefficients = Vec::with_capacity(system.equations() + 1);
    let mut control = vec![0u64; m + 1];
    control[0] = n;
    coefficients.push(control);
    for s in 0..system.equations() {
        let row = system.coefficients().row(s);
        let used: u64 = row.iter().map(|&x| x as u64).sum();
        let mut padded = Vec::with_capacity(m + 1);
        padded.push(n - used);
        padded.extend(row.iter().map(|&x| x as u64));
        coefficients.push(padded);
    }
    let mut rhs = vec![argument.group().zero()];
    rhs.extend(system.rhs().iter().cloned());
    PaddedSystem { coefficients, rhs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContextLabel {
    Control,
    /// `equation` is `s` in `1..=S`, `shift` is `k` in `1..=N`.
    Variation {
        equation: usize,
        shift: usize,
    },
}

impl fmt::Display for ContextLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextLabel::Control => write!(f, "control"),
            ContextLabel::Variation { equation, shift } => write!(f, "variation s={equation} k={shift}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Context {
    pub choices: Vec<usize>,
    pub label: ContextLabel,
}

/// Control first, then for each equation `s` the base pattern and its
/// `N - 1` cyclic left shifts.
pub fn contexts(argument: &MerminArgument) -> Vec<Context> {
    let n = argument.parties();
    let padded = zero_pad(argument);
    let mut out = Vec::with_capacity(1 + argument.system().equations() * n);
    out.push(Context { choices: vec![0; n], label: ContextLabel::Control });
    for s in 1..padded.coefficients.len() {
        let base = padded.base_pattern(s);
        for k in 1..=n {
            let choices = (0..n).map(|j| base[(j + k - 1) % n]).collect();
            out.push(Context { choices, label: ContextLabel::Variation { equation: s, shift: k } });
        }
    }
    out
}
