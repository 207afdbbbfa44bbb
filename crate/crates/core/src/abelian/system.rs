use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use super::phase::character_eval_unchecked;
use super::snf::{smith_normal_form, IntMatrix, SmithDecomposition};
use super::{AbelianError, FiniteAbelianGroup, GroupElement, RationalPhase};

/// `sum_r n^s_r y_r = a^s` for `s = 1..S`, valued in a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    group: FiniteAbelianGroup,
    coefficients: IntMatrix,
    rhs: Vec<GroupElement>,
}

impl EquationSystem {
    pub fn new(
        group: FiniteAbelianGroup,
        coefficients: Vec<Vec<i64>>,
        rhs: Vec<GroupElement>,
    ) -> Result<Self, AbelianError> {
        if coefficients.is_empty() || coefficients[0].is_empty() {
            return Err(AbelianError::EmptySystem);
        }
        let width = coefficients[0].len();
        if coefficients.iter().any(|row| row.len() != width) {
            return Err(AbelianError::RaggedRows);
        }
        if rhs.len() != coefficients.len() {
            return Err(AbelianError::RhsLength { rows: coefficients.len(), rhs: rhs.len() });
        }
        for a in &rhs {
            group.element(a.residues().to_vec())?;
        }
        Ok(Self { group, coefficients: IntMatrix::from_rows(&coefficients), rhs })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Number of equations `S`.
    pub fn equations(&self) -> usize {
        self.coefficients.rows()
    }

    /// Number of unknowns `M`.
    pub fn unknowns(&self) -> usize {
        self.coefficients.cols()
    }

    pub fn coefficients(&self) -> &IntMatrix {
        &self.coefficients
    }

    pub fn coefficient(&self, s: usize, r: usize) -> i64 {
        self.coefficients.get(s, r)
    }

    pub fn rhs(&self) -> &[GroupElement] {
        &self.rhs
    }

    pub fn smith(&self) -> SmithDecomposition {
        smith_normal_form(&self.coefficients)
    }

    /// Evaluates the left-hand side of equation `s` at `y`.
    pub fn lhs(&self, s: usize, y: &[GroupElement]) -> GroupElement {
        let terms: Vec<GroupElement> =
            y.iter().enumerate().map(|(r, yr)| self.group.scale_unchecked(yr, self.coefficient(s, r))).collect();
        self.group.sum_unchecked(&terms)
    }

    pub fn is_solution(&self, y: &[GroupElement]) -> bool {
        y.len() == self.unknowns()
            && y.iter().all(|g| self.group.contains(g))
            && (0..self.equations()).all(|s| self.lhs(s, y) == self.rhs[s])
    }

    /// Integer basis of the left kernel `{c : c^T n = 0}`: the rows of `U`
    /// past the rank.
    pub fn left_kernel_basis(&self) -> Vec<Vec<i64>> {
        let snf = self.smith();
        (snf.rank()..self.equations()).map(|i| snf.u.row(i).to_vec()).collect()
    }

    /// True iff every integer relation between the rows also holds between
    /// the right-hand sides.
    pub fn is_consistent(&self) -> bool {
        self.left_kernel_basis().iter().all(|c| {
            let combo: Vec<GroupElement> =
                c.iter().zip(&self.rhs).map(|(&cs, a)| self.group.scale_unchecked(a, cs)).collect();
            self.group.sum_unchecked(&combo) == self.group.zero()
        })
    }

    /// Some solution `(y_r) in K^M`, or `None` if there is none.
    ///
    /// Each cyclic factor `Z/d` is handled separately: with `U n V = D` the
    /// system becomes `D z = U a (mod d)`, a set of one-variable congruences.
    pub fn solve_in_group(&self) -> Option<Vec<GroupElement>> {
        let snf = self.smith();
        let diag = snf.diagonal();
        let m = self.unknowns();
        let mut per_factor: Vec<Vec<u64>> = Vec::with_capacity(self.group.rank());

        for (i, &d) in self.group.factors().iter().enumerate() {
            let d = d as i64;
            let a: Vec<i64> = self.rhs.iter().map(|g| g.residues()[i] as i64).collect();
            let ua: Vec<i64> = (0..self.equations())
                .map(|row| snf.u.row(row).iter().zip(&a).map(|(&x, &y)| (x % d) * y).sum::<i64>().rem_euclid(d))
                .collect();
            let mut z = vec![0i64; m];
            for (row, &target) in ua.iter().enumerate() {
                let dd = diag.get(row).copied().unwrap_or(0);
                if dd == 0 {
                    if target != 0 {
                        return None;
                    }
                    continue;
                }
                z[row] = solve_congruence(dd, target, d)?;
            }
            let y: Vec<u64> = (0..m)
                .map(|r| (0..m).map(|c| (snf.v.get(r, c) % d) * z[c]).sum::<i64>().rem_euclid(d) as u64)
                .collect();
            per_factor.push(y);
        }

        let solution: Vec<GroupElement> =
            (0..m).map(|r| GroupElement::from_residues(per_factor.iter().map(|y| y[r]).collect())).collect();
        debug_assert!(self.is_solution(&solution));
        Some(solution)
    }

    /// Brute-force search over `K^M` in enumeration order. Cross-check oracle
    /// for [`solve_in_group`](Self::solve_in_group).
    pub fn solve_in_group_exhaustive(&self, cap: u64) -> Result<Option<Vec<GroupElement>>, AbelianError> {
        let order = self.group.order() as u64;
        let space = order.checked_pow(self.unknowns() as u32).unwrap_or(u64::MAX);
        if space > cap {
            return Err(AbelianError::SearchSpaceTooLarge { size: space, cap });
        }
        let m = self.unknowns();
        let mut digits = vec![0usize; m];
        loop {
            let y: Vec<GroupElement> = digits.iter().map(|&i| self.group.element_at(i)).collect();
            if self.is_solution(&y) {
                return Ok(Some(y));
            }
            // odometer, last unknown fastest
            let mut pos = m;
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < self.group.order() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    /// Solves the system in the torus of phases, one character at a time:
    /// for each `chi_k` find `beta_r(chi_k)` with
    /// `sum_r n^s_r beta_r(chi_k) = chi_k(a^s) (mod 1)`.
    pub fn solve_in_torus(&self) -> Result<PhaseSolution, AbelianError> {
        if !self.is_consistent() {
            return Err(AbelianError::InconsistentSystem);
        }
        let snf = self.smith();
        let diag = snf.diagonal();
        let m = self.unknowns();
        let mut tables = vec![Vec::with_capacity(self.group.order()); m];

        for k in self.group.elements() {
            let b: Vec<Ratio<i64>> =
                self.rhs.iter().map(|a| character_eval_unchecked(&self.group, &k, a).value()).collect();
            let ub: Vec<Ratio<i64>> = (0..self.equations())
                .map(|row| {
                    let x: Ratio<i64> = snf.u.row(row).iter().zip(&b).map(|(&c, &x)| x * c).sum();
                    RationalPhase::from_ratio(x).value()
                })
                .collect();
            debug_assert!(
                ub.iter()
                    .enumerate()
                    .all(|(row, x)| diag.get(row).is_some_and(|&dd| dd != 0) || *x == Ratio::from_integer(0)),
                "consistency guarantees zero"
            );
            let z: Vec<Ratio<i64>> = (0..m)
                .map(|c| match (diag.get(c).copied().unwrap_or(0), ub.get(c)) {
                    (0, _) | (_, None) => Ratio::from_integer(0),
                    (dd, Some(x)) => x / dd,
                })
                .collect();
            for (r, table) in tables.iter_mut().enumerate() {
                let x: Ratio<i64> = (0..m).map(|c| z[c] * snf.v.get(r, c)).sum();
                table.push(RationalPhase::from_ratio(x));
            }
        }

        let solution = PhaseSolution { group: self.group.clone(), tables };
        debug_assert!(solution.satisfies(self));
        Ok(solution)
    }
}

/// `x` with `coef * x = target (mod modulus)`, if any.
fn solve_congruence(coef: i64, target: i64, modulus: i64) -> Option<i64> {
    let coef = coef.rem_euclid(modulus);
    let g = coef.gcd(&modulus);
    if target % g != 0 {
        return None;
    }
    let m = modulus / g;
    if m == 1 {
        return Some(0);
    }
    let inv = (coef / g).extended_gcd(&m).x.rem_euclid(m);
    Some(((target / g) % m * inv).rem_euclid(m))
}

/// Modular inverse of `n` mod `modulus` when they are coprime.
pub fn mod_inverse(n: i64, modulus: i64) -> Option<i64> {
    if modulus == 1 {
        return Some(0);
    }
    let e = n.rem_euclid(modulus).extended_gcd(&modulus);
    (e.gcd == 1).then(|| e.x.rem_euclid(modulus))
}

/// A solution in the phase group: for each unknown `r`, a phase per character,
/// indexed in element enumeration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhaseSolution {
    #[serde(skip)]
    group: FiniteAbelianGroup,
    tables: Vec<Vec<RationalPhase>>,
}

impl PhaseSolution {
    pub fn new(group: FiniteAbelianGroup, tables: Vec<Vec<RationalPhase>>) -> Result<Self, AbelianError> {
        if tables.iter().any(|t| t.len() != group.order()) {
            return Err(AbelianError::PhaseTableShape { expected: group.order() });
        }
        Ok(Self { group, tables })
    }

    /// The classical embedding `beta_r(chi_k) = chi_k(b_r)` of elements of `K`.
    pub fn embedding(group: &FiniteAbelianGroup, elements: &[GroupElement]) -> Self {
        let tables = elements
            .iter()
            .map(|b| group.elements().map(|k| character_eval_unchecked(group, &k, b)).collect())
            .collect();
        Self { group: group.clone(), tables }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn unknowns(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, r: usize) -> &[RationalPhase] {
        &self.tables[r]
    }

    pub fn tables(&self) -> &[Vec<RationalPhase>] {
        &self.tables
    }

    /// Exact check of every equation for every character.
    pub fn satisfies(&self, system: &EquationSystem) -> bool {
        if self.group != *system.group() || self.tables.len() != system.unknowns() {
            return false;
        }
        self.group.elements().enumerate().all(|(ki, k)| {
            (0..system.equations()).all(|s| {
                let lhs = (0..system.unknowns())
                    .fold(RationalPhase::zero(), |acc, r| acc + self.tables[r][ki].scale(system.coefficient(s, r)));
                lhs == character_eval_unchecked(&self.group, &k, &system.rhs()[s])
            })
        })
    }
}
