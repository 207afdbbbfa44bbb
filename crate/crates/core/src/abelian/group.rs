use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::AbelianError;

/// A finite abelian group `Z/d_1 x ... x Z/d_n`, kept in the factor order it
/// was given in.
///
/// Elements are enumerated lexicographically on their residue tuples (first
/// factor most significant), and that enumeration doubles as a dense index
/// used by the model and simulator code.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
    order: usize,
}

/// An element of a [`FiniteAbelianGroup`], stored as its residue tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    /// Caller guarantees the residues are already reduced.
    pub(crate) fn from_residues(residues: Vec<u64>) -> Self {
        Self { residues }
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn into_residues(self) -> Vec<u64> {
        self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.residues.len() == 1 {
            return write!(f, "{}", self.residues[0]);
        }
        write!(f, "(")?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, AbelianError> {
        if factors.is_empty() {
            return Err(AbelianError::EmptyGroup);
        }
        let mut order: usize = 1;
        for &d in &factors {
            if d < 2 {
                return Err(AbelianError::InvalidFactor(d));
            }
            let d = usize::try_from(d).map_err(|_| AbelianError::GroupTooLarge)?;
            order = order.checked_mul(d).ok_or(AbelianError::GroupTooLarge)?;
        }
        Ok(Self { factors, order })
    }

    pub fn cyclic(d: u64) -> Result<Self, AbelianError> {
        Self::new(vec![d])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &d| acc.lcm(&d))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.factors.len()] }
    }

    pub fn element(&self, residues: Vec<u64>) -> Result<GroupElement, AbelianError> {
        let g = GroupElement { residues };
        self.check(&g)?;
        Ok(g)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.check(g).is_ok()
    }

    fn check(&self, g: &GroupElement) -> Result<(), AbelianError> {
        if g.residues.len() != self.factors.len() {
            return Err(AbelianError::ShapeMismatch { expected: self.factors.len(), found: g.residues.len() });
        }
        for (&r, &d) in g.residues.iter().zip(&self.factors) {
            if r >= d {
                return Err(AbelianError::ResidueOutOfRange { residue: r, order: d });
            }
        }
        Ok(())
    }

    /// `g (+) h`, componentwise mod `d_i`.
    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, h))
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.check(g)?;
        Ok(self.scale_unchecked(g, -1))
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, &self.scale_unchecked(h, -1)))
    }

    /// The integer multiple `n . g`.
    pub fn scale(&self, g: &GroupElement, n: i64) -> Result<GroupElement, AbelianError> {
        self.check(g)?;
        Ok(self.scale_unchecked(g, n))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let residues =
            g.residues.iter().zip(&h.residues).zip(&self.factors).map(|((&a, &b), &d)| (a + b) % d).collect();
        GroupElement { residues }
    }

    pub(crate) fn neg_unchecked(&self, g: &GroupElement) -> GroupElement {
        self.scale_unchecked(g, -1)
    }

    pub(crate) fn scale_unchecked(&self, g: &GroupElement, n: i64) -> GroupElement {
        let residues = g
            .residues
            .iter()
            .zip(&self.factors)
            .map(|(&r, &d)| {
                let d = d as i128;
                ((n as i128 % d) * r as i128).rem_euclid(d) as u64
            })
            .collect();
        GroupElement { residues }
    }

    /// Sum of a sequence of elements, all assumed to belong to `self`.
    pub(crate) fn sum_unchecked<'a, I>(&self, items: I) -> GroupElement
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        items.into_iter().fold(self.zero(), |acc, g| self.add_unchecked(&acc, g))
    }

    /// Dense index of `g` in the lexicographic enumeration.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues.iter().zip(&self.factors).fold(0usize, |acc, (&r, &d)| acc * d as usize + r as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        debug_assert!(index < self.order);
        let mut residues = vec![0u64; self.factors.len()];
        for (slot, &d) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement { residues }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// Index-level addition, for hot loops that work with dense indices.
    pub fn add_indices(&self, a: usize, b: usize) -> usize {
        let mut out = 0usize;
        let mut stride = 1usize;
        let (mut a, mut b) = (a, b);
        for &d in self.factors.iter().rev() {
            let d = d as usize;
            out += ((a % d + b % d) % d) * stride;
            a /= d;
            b /= d;
            stride *= d;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let mut out = 0usize;
        let mut stride = 1usize;
        let mut a = a;
        for &d in self.factors.iter().rev() {
            let d = d as usize;
            out += ((d - a % d) % d) * stride;
            a /= d;
            stride *= d;
        }
        out
    }
}

impl TryFrom<Vec<u64>> for FiniteAbelianGroup {
    type Error = AbelianError;

    fn try_from(factors: Vec<u64>) -> Result<Self, Self::Error> {
        Self::new(factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<u64> {
    fn from(group: FiniteAbelianGroup) -> Self {
        group.factors
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " × ")?;
            }
            write!(f, "ℤ/{d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &FiniteAbelianGroup, r: &[u64]) -> GroupElement {
        g.element(r.to_vec()).unwrap()
    }

    #[test]
    fn element_add_examples() {
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(k.add(&el(&k, &[1, 0]), &el(&k, &[1, 1])).unwrap(), el(&k, &[0, 1]));

        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        assert_eq!(z4.add(&el(&z4, &[3]), &el(&z4, &[3])).unwrap(), el(&z4, &[2]));

        let k = FiniteAbelianGroup::new(vec![3, 4, 2]).unwrap();
        for g in k.elements() {
            assert_eq!(k.add(&g, &k.zero()).unwrap(), g);
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let k = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let g = el(&z2, &[1]);
        assert!(matches!(k.add(&k.zero(), &g), Err(AbelianError::ShapeMismatch { expected: 2, found: 1 })));
        assert!(k.element(vec![2, 0]).is_err());
    }

    #[test]
    fn invalid_factors() {
        assert!(matches!(FiniteAbelianGroup::new(vec![]), Err(AbelianError::EmptyGroup)));
        assert!(matches!(FiniteAbelianGroup::new(vec![3, 1]), Err(AbelianError::InvalidFactor(1))));
    }

    #[test]
    fn order_and_exponent() {
        let k = FiniteAbelianGroup::new(vec![4, 6]).unwrap();
        assert_eq!(k.order(), 24);
        assert_eq!(k.exponent(), 12);
        assert_eq!(FiniteAbelianGroup::cyclic(9).unwrap().exponent(), 9);
    }

    #[test]
    fn enumeration_is_lexicographic_and_total() {
        let k = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let all: Vec<_> = k.elements().map(|g| g.into_residues()).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]);
        for (i, g) in k.elements().enumerate() {
            assert_eq!(k.index_of(&g), i);
        }
    }

    #[test]
    fn index_arithmetic_matches_element_arithmetic() {
        let k = FiniteAbelianGroup::new(vec![3, 4]).unwrap();
        for a in 0..k.order() {
            let ga = k.element_at(a);
            assert_eq!(k.element_at(k.neg_index(a)), k.neg(&ga).unwrap());
            for b in 0..k.order() {
                let gb = k.element_at(b);
                assert_eq!(k.element_at(k.add_indices(a, b)), k.add(&ga, &gb).unwrap());
            }
        }
    }

    #[test]
    fn scaling() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        assert_eq!(z4.scale(&el(&z4, &[3]), 2).unwrap(), el(&z4, &[2]));
        assert_eq!(z4.scale(&el(&z4, &[1]), -1).unwrap(), el(&z4, &[3]));
        assert_eq!(z4.scale(&el(&z4, &[1]), -7).unwrap(), el(&z4, &[1]));
    }

    #[test]
    fn display() {
        let k = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        assert_eq!(k.to_string(), "ℤ/2 × ℤ/3");
        assert_eq!(el(&k, &[1, 2]).to_string(), "(1,2)");
    }
}
