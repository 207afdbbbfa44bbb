use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AbelianError, FiniteAbelianGroup, GroupElement};

/// An exact phase `theta` in `[0, 1)`, standing for `e^{2 pi i theta}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPhase(Ratio<i64>);

impl RationalPhase {
    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    /// `numer / denom` reduced mod 1. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        let frac = r - r.floor();
        Self(frac)
    }

    pub fn value(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(self, n: i64) -> Self {
        Self::from_ratio(self.0 * n)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }
}

impl Add for RationalPhase {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::from_ratio(self.0 + other.0)
    }
}

impl Sub for RationalPhase {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self::from_ratio(self.0 - other.0)
    }
}

impl Neg for RationalPhase {
    type Output = Self;

    fn neg(self) -> Self {
        Self::from_ratio(-self.0)
    }
}

impl fmt::Display for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for RationalPhase {
    type Err = AbelianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AbelianError::BadPhase(s.to_string());
        let s_trim = s.trim();
        let (n, d) = match s_trim.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s_trim, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Self::new(n, d))
    }
}

impl Serialize for RationalPhase {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalPhase {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The character `chi_k : g -> sum_i k_i g_i / d_i (mod 1)`, labelled by `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    index: GroupElement,
}

impl Character {
    pub fn new(group: &FiniteAbelianGroup, index: GroupElement) -> Result<Self, AbelianError> {
        if !group.contains(&index) {
            return Err(AbelianError::ShapeMismatch { expected: group.rank(), found: index.residues().len() });
        }
        Ok(Self { index })
    }

    pub fn index(&self) -> &GroupElement {
        &self.index
    }

    pub fn eval(&self, group: &FiniteAbelianGroup, g: &GroupElement) -> Result<RationalPhase, AbelianError> {
        character_eval(group, &self.index, g)
    }
}

/// Evaluates `chi_k(g)` exactly.
pub fn character_eval(
    group: &FiniteAbelianGroup,
    k: &GroupElement,
    g: &GroupElement,
) -> Result<RationalPhase, AbelianError> {
    group.element(k.residues().to_vec())?;
    group.element(g.residues().to_vec())?;
    Ok(character_eval_unchecked(group, k, g))
}

pub(crate) fn character_eval_unchecked(
    group: &FiniteAbelianGroup,
    k: &GroupElement,
    g: &GroupElement,
) -> RationalPhase {
    let mut total = Ratio::zero();
    for ((&ki, &gi), &d) in k.residues().iter().zip(g.residues()).zip(group.factors()) {
        let d = d as i64;
        total += Ratio::new((ki as i64 * gi as i64) % d, d);
    }
    RationalPhase::from_ratio(total)
}

/// The full character table: `table[k][g] = chi_k(g)` in enumeration order.
pub fn character_table(group: &FiniteAbelianGroup) -> Vec<Vec<RationalPhase>> {
    group.elements().map(|k| group.elements().map(|g| character_eval_unchecked(group, &k, &g)).collect()).collect()
}
