use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Context, MerminArgument};
use crate::abelian::FiniteAbelianGroup;

/// A joint outcome: one element index (enumeration order of `K`) per party.
pub type Outcome = Vec<usize>;

/// One outcome distribution per measurement context, stored sparsely.
///
/// `P` is `BigRational` for exact models and `f64` for simulated or sampled
/// ones.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalModel<P = BigRational> {
    group: FiniteAbelianGroup,
    parties: usize,
    contexts: Vec<Context>,
    distributions: Vec<BTreeMap<Outcome, P>>,
}

impl<P> EmpiricalModel<P> {
    /// Panics if `contexts` and `distributions` differ in length.
    pub fn new(
        group: FiniteAbelianGroup,
        parties: usize,
        contexts: Vec<Context>,
        distributions: Vec<BTreeMap<Outcome, P>>,
    ) -> Self {
        assert_eq!(contexts.len(), distributions.len(), "one distribution per context");
        Self { group, parties, contexts, distributions }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn distribution(&self, context: usize) -> &BTreeMap<Outcome, P> {
        &self.distributions[context]
    }

    pub fn distributions(&self) -> &[BTreeMap<Outcome, P>] {
        &self.distributions
    }

    /// Iterates `(context index, context, outcome, probability)` in the fixed
    /// output order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &Context, &Outcome, &P)> {
        self.contexts
            .iter()
            .zip(&self.distributions)
            .enumerate()
            .flat_map(|(i, (c, dist))| dist.iter().map(move |(o, p)| (i, c, o, p)))
    }
}

impl EmpiricalModel<BigRational> {
    pub fn total(&self, context: usize) -> BigRational {
        self.distributions[context].values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    /// Outcomes with strictly positive probability.
    pub fn support(&self, context: usize) -> impl Iterator<Item = &Outcome> {
        self.distributions[context].iter().filter(|(_, p)| !p.is_zero()).map(|(o, _)| o)
    }

    /// Marginal of context `context` onto the given party positions.
    pub fn marginal(&self, context: usize, positions: &[usize]) -> BTreeMap<Outcome, BigRational> {
        let mut out: BTreeMap<Outcome, BigRational> = BTreeMap::new();
        for (o, p) in &self.distributions[context] {
            if p.is_zero() {
                continue;
            }
            let key: Outcome = positions.iter().map(|&j| o[j]).collect();
            *out.entry(key).or_insert_with(BigRational::zero) += p;
        }
        out
    }

    pub fn to_f64(&self) -> EmpiricalModel<f64> {
        EmpiricalModel {
            group: self.group.clone(),
            parties: self.parties,
            contexts: self.contexts.clone(),
            distributions: self
                .distributions
                .iter()
                .map(|d| d.iter().map(|(o, p)| (o.clone(), p.to_f64().unwrap_or(f64::NAN))).collect())
                .collect(),
        }
    }
}

/// All `(g_1, ..., g_N)` with `g_1 + ... + g_N = target`, lexicographic.
pub fn coset(group: &FiniteAbelianGroup, parties: usize, target: usize) -> impl Iterator<Item = Outcome> + '_ {
    let order = group.order();
    let free = parties - 1;
    let count = order.pow(free as u32);
    (0..count).map(move |mut code| {
        let mut outcome = vec![0usize; parties];
        for slot in outcome[..free].iter_mut().rev() {
            *slot = code % order;
            code /= order;
        }
        let partial = outcome[..free].iter().fold(0, |acc, &g| group.add_indices(acc, g));
        outcome[free] = group.add_indices(target, group.neg_index(partial));
        outcome
    })
}

/// The exact model: each context is uniform with mass `1/|K|^(N-1)` on the
/// coset `{g : sum g_j = a^s}` of its equation (`a^0 = 0` for the control).
pub fn expected_model(argument: &MerminArgument) -> EmpiricalModel {
    let group = argument.group();
    let n = argument.parties();
    let contexts = argument.contexts();
    let mass = BigRational::new(BigInt::one(), BigInt::from(group.order()).pow((n - 1) as u32));
    let distributions = contexts
        .iter()
        .map(|c| {
            let target = group.index_of(&argument.context_target(&c.label));
            coset(group, n, target).map(|o| (o, mass.clone())).collect()
        })
        .collect();
    EmpiricalModel::new(group.clone(), n, contexts, distributions)
}

/// True iff, for every pair of contexts, the marginals onto the parties whose
/// choices agree coincide exactly.
pub fn check_no_signalling(model: &EmpiricalModel) -> bool {
    let contexts = model.contexts();
    for a in 0..contexts.len() {
        for b in a + 1..contexts.len() {
            let shared: Vec<usize> =
                (0..model.parties()).filter(|&j| contexts[a].choices[j] == contexts[b].choices[j]).collect();
            if shared.is_empty() {
                continue;
            }
            if model.marginal(a, &shared) != model.marginal(b, &shared) {
                return false;
            }
        }
    }
    true
}

/// Largest `|p_exact - p_sim|` over every context and every outcome present
/// in either model (absent entries count as zero). Panics if the context
/// lists differ.
pub fn max_abs_deviation(exact: &EmpiricalModel, simulated: &EmpiricalModel<f64>) -> f64 {
    assert_eq!(exact.contexts(), simulated.contexts(), "models must share contexts");
    let mut worst = 0.0f64;
    for (e, s) in exact.distributions().iter().zip(simulated.distributions()) {
        for (o, p) in e {
            let q = s.get(o).copied().unwrap_or(0.0);
            worst = worst.max((p.to_f64().unwrap_or(f64::NAN) - q).abs());
        }
        for (o, q) in s {
            if !e.contains_key(o) {
                worst = worst.max(q.abs());
            }
        }
    }
    worst
}
