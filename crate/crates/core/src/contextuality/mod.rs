//! Deciding locality three ways (algebraic criterion, explicit LHV model,
//! global-section search) and All-vs-Nothing equation families.

mod avn;
mod search;

pub use avn::{avn_equations, is_avn, is_avn_exhaustive, AvnEquation, AvnTheory};
pub use search::{find_global_section, is_global_section, GlobalSection};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::scenario::{coset, Context, EmpiricalModel, MerminArgument, Outcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextualityError {
    #[error("the given assignment does not solve the system in K")]
    NotASolution,
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u64, cap: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// A solution `(b_1, ..., b_M)` of the system in `K`.
    Local(Vec<GroupElement>),
    Contextual,
}

impl Classification {
    pub fn is_contextual(&self) -> bool {
        matches!(self, Classification::Contextual)
    }
}

/// Local iff the system has a solution in the finite group itself.
pub fn classify(argument: &MerminArgument) -> Classification {
    match argument.system().solve_in_group() {
        Some(b) => Classification::Local(b),
        None => Classification::Contextual,
    }
}

/// LHV model built from a solution in `K`: the hidden variable is uniform on
/// `H_0 = {h : sum h_j = 0}` and party `j` answers choice `m` with `h_j + b_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhvModel {
    group: FiniteAbelianGroup,
    parties: usize,
    /// `b_0 = 0, b_1, ..., b_M` as element indices.
    translations: Vec<usize>,
}

impl LhvModel {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// `b_0 = 0` followed by the solution.
    pub fn translations(&self) -> Vec<GroupElement> {
        self.translations.iter().map(|&i| self.group.element_at(i)).collect()
    }

    pub fn hidden_states(&self) -> impl Iterator<Item = Outcome> + '_ {
        coset(&self.group, self.parties, 0)
    }

    pub fn hidden_state_count(&self) -> usize {
        self.group.order().pow(self.parties as u32 - 1)
    }

    pub fn weight(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.hidden_state_count()))
    }

    /// Deterministic response `f_j(m, h) = h_j + b_m` as an element index.
    pub fn respond(&self, party: usize, choice: usize, hidden: &[usize]) -> usize {
        self.group.add_indices(hidden[party], self.translations[choice])
    }
}

pub fn build_lhv(argument: &MerminArgument, solution: &[GroupElement]) -> Result<LhvModel, ContextualityError> {
    if !argument.system().is_solution(solution) {
        return Err(ContextualityError::NotASolution);
    }
    let group = argument.group().clone();
    let mut translations = vec![0];
    translations.extend(solution.iter().map(|b| group.index_of(b)));
    Ok(LhvModel { group, parties: argument.parties(), translations })
}

/// Exact model of the LHV, by counting over the hidden states.
pub fn lhv_predicted_model(lhv: &LhvModel, contexts: &[Context]) -> EmpiricalModel {
    let weight = lhv.weight();
    let distributions = contexts
        .iter()
        .map(|c| {
            let mut dist: BTreeMap<Outcome, BigRational> = BTreeMap::new();
            for h in lhv.hidden_states() {
                let outcome: Outcome = c.choices.iter().enumerate().map(|(j, &m)| lhv.respond(j, m, &h)).collect();
                *dist.entry(outcome).or_insert_with(BigRational::zero) += &weight;
            }
            dist
        })
        .collect();
    EmpiricalModel::new(lhv.group.clone(), lhv.parties, contexts.to_vec(), distributions)
}
