//! Quantum-classical secret sharing on top of a Mermin-type argument.
//!
//! Parties `0..players` are the cooperating players, the remaining parties
//! act as the dealer. Each valid round is a test round with probability `tau`
//! (outcomes are published and counted) or a secret round (the dealer
//! broadcasts `c = p + g_dealer`).

pub mod rng;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::quantum::{simulate_context, QuantumError};
use crate::scenario::{ContextLabel, MerminArgument, Outcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("need 2 <= players < parties, got {players} players for {parties} parties")]
    InvalidPlayers { players: usize, parties: usize },
    #[error("test probability must lie in (0, 1), got {0}")]
    InvalidTestProbability(f64),
    #[error("noise threshold must lie in [0, 1], got {0}")]
    InvalidNoiseThreshold(f64),
    #[error("noise mixture weight must lie in [0, 1], got {0}")]
    InvalidMixture(f64),
    #[error("the adversary's translations do not solve the system in K")]
    NotASolution,
    #[error("plaintext entry {index} is not an element of K")]
    ForeignPlaintext { index: usize },
    #[error("joint input {choices:?} was never tested")]
    InsufficientCoverage { choices: Vec<usize> },
    #[error("gave up after {attempts} rounds with only {valid} valid")]
    TooManyInvalidRounds { attempts: u64, valid: u64 },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviceBackend {
    /// Samples the simulated Born distribution of each context.
    IdealQuantum,
    /// Ideal with probability `1 - delta`, uniform over `K^N` with probability `delta`.
    MixedNoise { delta: f64 },
    /// Deterministic devices driven by a shared `h` uniform on `H_0`, answering
    /// `h_j + b_m`; the eavesdropper records `h`.
    AdversarialClassical { solution: Vec<GroupElement> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Every party picks a choice uniformly; rounds whose joint input is not a
    /// context are discarded.
    #[default]
    IndependentUniform,
    /// A context is drawn uniformly from the context list.
    ContextDirect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub argument: MerminArgument,
    pub players: usize,
    pub test_probability: f64,
    /// Valid rounds to run.
    pub rounds: u64,
    pub max_noise: f64,
    pub backend: DeviceBackend,
    pub seed: u64,
    pub input_mode: InputMode,
    pub amplitude_cap: u64,
}

impl ProtocolConfig {
    /// Config with threshold 0.05, independent inputs and the default
    /// amplitude cap.
    pub fn new(
        argument: MerminArgument,
        players: usize,
        test_probability: f64,
        rounds: u64,
        backend: DeviceBackend,
        seed: u64,
    ) -> Self {
        Self {
            argument,
            players,
            test_probability,
            rounds,
            max_noise: 0.05,
            backend,
            seed,
            input_mode: InputMode::IndependentUniform,
            amplitude_cap: crate::DEFAULT_AMPLITUDE_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let parties = self.argument.parties();
        if self.players < 2 || self.players >= parties {
            return Err(ProtocolError::InvalidPlayers { players: self.players, parties });
        }
        if !(self.test_probability > 0.0 && self.test_probability < 1.0) {
            return Err(ProtocolError::InvalidTestProbability(self.test_probability));
        }
        if !(0.0..=1.0).contains(&self.max_noise) {
            return Err(ProtocolError::InvalidNoiseThreshold(self.max_noise));
        }
        match &self.backend {
            DeviceBackend::MixedNoise { delta } if !(0.0..=1.0).contains(delta) => {
                Err(ProtocolError::InvalidMixture(*delta))
            }
            DeviceBackend::AdversarialClassical { solution } if !self.argument.system().is_solution(solution) => {
                Err(ProtocolError::NotASolution)
            }
            _ => Ok(()),
        }
    }
}

/// `c = p + g_{N'+1} + ... + g_N`.
pub fn encode_round(group: &FiniteAbelianGroup, plaintext: &GroupElement, dealer: &[GroupElement]) -> GroupElement {
    group.add_unchecked(plaintext, &group.sum_unchecked(dealer))
}

/// `p = c + g_1 + ... + g_{N'} - a^s`.
pub fn decode_round(
    group: &FiniteAbelianGroup,
    ciphertext: &GroupElement,
    keys: &[GroupElement],
    target: &GroupElement,
) -> GroupElement {
    let total = group.add_unchecked(ciphertext, &group.sum_unchecked(keys));
    group.add_unchecked(&total, &group.neg_unchecked(target))
}

/// `p = q + k`: hides a round secret `q` under an ephemeral key `k`.
pub fn mask_secret(group: &FiniteAbelianGroup, secret: &[GroupElement], key: &[GroupElement]) -> Vec<GroupElement> {
    secret.iter().zip(key).map(|(q, k)| group.add_unchecked(q, k)).collect()
}

/// `q = p - k`.
pub fn unmask_secret(
    group: &FiniteAbelianGroup,
    plaintext: &[GroupElement],
    key: &[GroupElement],
) -> Vec<GroupElement> {
    plaintext.iter().zip(key).map(|(p, k)| group.add_unchecked(p, &group.neg_unchecked(k))).collect()
}

/// Distinct choice tuples, in context order, with the target of the first
/// context using each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointInput {
    pub choices: Vec<usize>,
    pub label: ContextLabel,
    pub target: GroupElement,
}

pub fn joint_inputs(argument: &MerminArgument) -> Vec<JointInput> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for c in argument.contexts() {
        if seen.insert(c.choices.clone(), ()).is_none() {
            let target = argument.context_target(&c.label);
            out.push(JointInput { choices: c.choices, label: c.label, target });
        }
    }
    out
}

/// Test-round outcome counts per joint input (indexed as [`joint_inputs`]).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TestCounts {
    pub per_input: Vec<BTreeMap<Outcome, u64>>,
}

impl TestCounts {
    pub fn new(inputs: usize) -> Self {
        Self { per_input: vec![BTreeMap::new(); inputs] }
    }

    pub fn record(&mut self, input: usize, outcome: Outcome) {
        *self.per_input[input].entry(outcome).or_insert(0) += 1;
    }

    pub fn total(&self, input: usize) -> u64 {
        self.per_input[input].values().sum()
    }

    /// Associative merge.
    pub fn merge(&mut self, other: &TestCounts) {
        for (mine, theirs) in self.per_input.iter_mut().zip(&other.per_input) {
            for (o, n) in theirs {
                *mine.entry(o.clone()).or_insert(0) += n;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseEstimate {
    pub exact: BigRational,
    pub value: f64,
}

/// `1 - |K|^(N-1) * min` over joint inputs and promised-support outcomes of
/// the normalised test counts.
pub fn noise_parameter(counts: &TestCounts, argument: &MerminArgument) -> Result<NoiseEstimate, ProtocolError> {
    let group = argument.group();
    let n = argument.parties();
    let support_size = BigInt::from(group.order()).pow(n as u32 - 1);
    let inputs = joint_inputs(argument);
    let mut min: Option<BigRational> = None;
    for (i, input) in inputs.iter().enumerate() {
        let total = counts.total(i);
        if total == 0 {
            return Err(ProtocolError::InsufficientCoverage { choices: input.choices.clone() });
        }
        let target = group.index_of(&input.target);
        let smallest = crate::scenario::coset(group, n, target)
            .map(|o| counts.per_input[i].get(&o).copied().unwrap_or(0))
            .min()
            .expect("nonempty support");
        let freq = BigRational::new(BigInt::from(smallest), BigInt::from(total));
        if min.as_ref().is_none_or(|m| freq < *m) {
            min = Some(freq);
        }
    }
    let exact = BigRational::one() - min.expect("at least one joint input") * BigRational::from_integer(support_size);
    let value = exact.to_f64().expect("finite");
    Ok(NoiseEstimate { exact, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Test,
    Secret,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    /// Attempt index, counting discarded rounds.
    pub round: u64,
    pub choices: Vec<usize>,
    pub kind: RoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<GroupElement>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ciphertext: Option<GroupElement>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundBreakdown {
    pub attempted: u64,
    pub invalid: u64,
    pub valid: u64,
    pub test: u64,
    pub secret: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeCount {
    pub outcome: Vec<GroupElement>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputCounts {
    pub choices: Vec<usize>,
    pub label: ContextLabel,
    pub total: u64,
    pub outcomes: Vec<OutcomeCount>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub rounds: RoundBreakdown,
    pub test_fraction: f64,
    pub counts: Vec<InputCounts>,
    /// `1` when some joint input was never tested.
    pub epsilon: f64,
    /// Exact value as `p/q`, absent without coverage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_exact: Option<String>,
    pub coverage_ok: bool,
    pub max_noise: f64,
    /// `epsilon <= max_noise` with full coverage.
    pub success: bool,
    pub plaintext: Vec<GroupElement>,
    pub decoded: Vec<GroupElement>,
    /// Fraction of secret rounds decoded correctly; `1` if there are none.
    pub decode_success_fraction: f64,
    /// Fraction of secret-round plaintexts the eavesdropper reconstructs; `1`
    /// if there are none.
    pub eve_success_fraction: f64,
    pub trace: Vec<RoundRecord>,
}

impl ProtocolReport {
    /// The ephemeral key, released only when the run succeeded.
    pub fn release_key<'a>(&self, key: &'a [GroupElement]) -> Option<&'a [GroupElement]> {
        self.success.then_some(key)
    }
}

/// Per-joint-input cumulative tables for inverse-CDF sampling.
struct Sampler {
    outcomes: Vec<Vec<Outcome>>,
    cumulative: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(argument: &MerminArgument, inputs: &[JointInput], cap: u64) -> Result<Self, ProtocolError> {
        let order = argument.group().order();
        let n = argument.parties();
        let size = (order as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if size > cap {
            return Err(QuantumError::StateSpaceTooLarge { size, cap }.into());
        }
        let contexts = argument.contexts();
        let mut outcomes = Vec::with_capacity(inputs.len());
        let mut cumulative = Vec::with_capacity(inputs.len());
        for input in inputs {
            let context = contexts.iter().find(|c| c.choices == input.choices).expect("joint input is a context");
            let probabilities = simulate_context(argument, context)?;
            let mut os = Vec::new();
            let mut cs = Vec::new();
            let mut acc = 0.0;
            for (mut idx, p) in probabilities.into_iter().enumerate() {
                if p <= crate::quantum::SUPPORT_CUTOFF {
                    continue;
                }
                acc += p;
                let mut o = vec![0; n];
                for slot in o.iter_mut().rev() {
                    *slot = idx % order;
                    idx /= order;
                }
                os.push(o);
                cs.push(acc);
            }
            outcomes.push(os);
            cumulative.push(cs);
        }
        Ok(Self { outcomes, cumulative })
    }

    fn sample(&self, input: usize, rng: &mut impl Rng) -> Outcome {
        let cs = &self.cumulative[input];
        let u = rng.gen::<f64>() * cs.last().copied().unwrap_or(1.0);
        let i = cs.partition_point(|&c| c <= u).min(cs.len() - 1);
        self.outcomes[input][i].clone()
    }
}

fn uniform_outcome(order: usize, parties: usize, rng: &mut impl Rng) -> Outcome {
    (0..parties).map(|_| rng.gen_range(0..order)).collect()
}

/// Runs rounds until `config.rounds` valid ones complete.
///
/// Round `i` draws from the streams of [`rng::round_rng`]: inputs from the
/// input lanes, the test/secret coin from [`rng::LANE_KIND`] and the device
/// outcome from [`rng::LANE_DEVICE`]. A shortfall in `plaintext` is padded
/// with 0, excess entries are ignored.
pub fn run_protocol(config: &ProtocolConfig, plaintext: &[GroupElement]) -> Result<ProtocolReport, ProtocolError> {
    config.validate()?;
    let argument = &config.argument;
    let group = argument.group();
    let order = group.order();
    let n = argument.parties();
    let m = argument.max_choice();
    if let Some(index) = plaintext.iter().position(|p| !group.contains(p)) {
        return Err(ProtocolError::ForeignPlaintext { index });
    }

    let inputs = joint_inputs(argument);
    let lookup: HashMap<Vec<usize>, usize> = inputs.iter().enumerate().map(|(i, x)| (x.choices.clone(), i)).collect();
    let context_inputs: Vec<usize> = argument.contexts().iter().map(|c| lookup[&c.choices]).collect();

    let sampler = match config.backend {
        DeviceBackend::IdealQuantum | DeviceBackend::MixedNoise { .. } => {
            Some(Sampler::new(argument, &inputs, config.amplitude_cap)?)
        }
        DeviceBackend::AdversarialClassical { .. } => None,
    };
    let translations: Vec<usize> = match &config.backend {
        DeviceBackend::AdversarialClassical { solution } => {
            std::iter::once(0).chain(solution.iter().map(|b| group.index_of(b))).collect()
        }
        _ => Vec::new(),
    };

    let max_attempts = config.rounds.saturating_mul(1000).max(1000);
    let mut breakdown = RoundBreakdown::default();
    let mut counts = TestCounts::new(inputs.len());
    let mut trace = Vec::new();
    let mut used_plaintext = Vec::new();
    let mut decoded = Vec::new();
    let mut eve_hits = 0u64;

    let mut round = 0u64;
    while breakdown.valid < config.rounds {
        if round >= max_attempts {
            return Err(ProtocolError::TooManyInvalidRounds { attempts: round, valid: breakdown.valid });
        }
        let this = round;
        round += 1;
        breakdown.attempted += 1;

        let input = match config.input_mode {
            InputMode::IndependentUniform => {
                let choices: Vec<usize> = (0..n)
                    .map(|j| rng::round_rng(config.seed, this, rng::LANE_INPUT + j as u64).gen_range(0..=m))
                    .collect();
                match lookup.get(&choices) {
                    Some(&i) => i,
                    None => {
                        breakdown.invalid += 1;
                        continue;
                    }
                }
            }
            InputMode::ContextDirect => {
                let mut r = rng::round_rng(config.seed, this, rng::LANE_INPUT);
                context_inputs[r.gen_range(0..context_inputs.len())]
            }
        };
        breakdown.valid += 1;
        let joint = &inputs[input];

        let mut device = rng::round_rng(config.seed, this, rng::LANE_DEVICE);
        let (outcome, hidden) = match &config.backend {
            DeviceBackend::IdealQuantum => (sampler.as_ref().expect("sampler").sample(input, &mut device), None),
            DeviceBackend::MixedNoise { delta } => {
                if device.gen::<f64>() < *delta {
                    (uniform_outcome(order, n, &mut device), None)
                } else {
                    (sampler.as_ref().expect("sampler").sample(input, &mut device), None)
                }
            }
            DeviceBackend::AdversarialClassical { .. } => {
                let mut h: Vec<usize> = (0..n - 1).map(|_| device.gen_range(0..order)).collect();
                let partial = h.iter().fold(0, |acc, &x| group.add_indices(acc, x));
                h.push(group.neg_index(partial));
                let g =
                    joint.choices.iter().enumerate().map(|(j, &c)| group.add_indices(h[j], translations[c])).collect();
                (g, Some(h))
            }
        };
        let elements: Vec<GroupElement> = outcome.iter().map(|&i| group.element_at(i)).collect();

        let is_test = rng::round_rng(config.seed, this, rng::LANE_KIND).gen_bool(config.test_probability);
        if is_test {
            breakdown.test += 1;
            counts.record(input, outcome);
            trace.push(RoundRecord {
                round: this,
                choices: joint.choices.clone(),
                kind: RoundKind::Test,
                outcomes: Some(elements),
                ciphertext: None,
            });
            continue;
        }

        let p = plaintext.get(breakdown.secret as usize).cloned().unwrap_or_else(|| group.zero());
        breakdown.secret += 1;
        let (keys, dealer) = elements.split_at(config.players);
        let c = encode_round(group, &p, dealer);
        let recovered = decode_round(group, &c, keys, &joint.target);

        let eve_guess = match &hidden {
            Some(h) => {
                let dealer_key: Vec<GroupElement> = (config.players..n)
                    .map(|j| group.element_at(group.add_indices(h[j], translations[joint.choices[j]])))
                    .collect();
                group.add_unchecked(&c, &group.neg_unchecked(&group.sum_unchecked(&dealer_key)))
            }
            None => group.add_unchecked(&c, &group.neg_unchecked(&joint.target)),
        };
        if eve_guess == p {
            eve_hits += 1;
        }

        trace.push(RoundRecord {
            round: this,
            choices: joint.choices.clone(),
            kind: RoundKind::Secret,
            outcomes: None,
            ciphertext: Some(c),
        });
        used_plaintext.push(p);
        decoded.push(recovered);
    }

    let (epsilon, epsilon_exact, coverage_ok) = match noise_parameter(&counts, argument) {
        Ok(est) => (est.value, Some(est.exact.to_string()), true),
        Err(ProtocolError::InsufficientCoverage { .. }) => (1.0, None, false),
        Err(e) => return Err(e),
    };
    let fraction = |hits: u64| if breakdown.secret == 0 { 1.0 } else { hits as f64 / breakdown.secret as f64 };
    let decode_hits = used_plaintext.iter().zip(&decoded).filter(|(p, d)| p == d).count() as u64;

    let report_counts = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| InputCounts {
            choices: x.choices.clone(),
            label: x.label,
            total: counts.total(i),
            outcomes: counts.per_input[i]
                .iter()
                .map(|(o, &count)| OutcomeCount { outcome: o.iter().map(|&g| group.element_at(g)).collect(), count })
                .collect(),
        })
        .collect();

    Ok(ProtocolReport {
        rounds: breakdown,
        test_fraction: if breakdown.valid == 0 { 0.0 } else { breakdown.test as f64 / breakdown.valid as f64 },
        counts: report_counts,
        epsilon,
        epsilon_exact,
        coverage_ok,
        max_noise: config.max_noise,
        success: coverage_ok && epsilon <= config.max_noise,
        plaintext: used_plaintext,
        decoded,
        decode_success_fraction: fraction(decode_hits),
        eve_success_fraction: fraction(eve_hits),
        trace,
    })
}

/// `delta (1 - 1/|K|)`: the noise parameter of the exact mixture of the
/// promised model with weight `1 - delta` and uniform noise with weight `delta`.
pub fn mixture_noise(group: &FiniteAbelianGroup, delta: &BigRational) -> BigRational {
    let inv = BigRational::new(BigInt::one(), BigInt::from(group.order()));
    delta * (BigRational::one() - inv)
}
