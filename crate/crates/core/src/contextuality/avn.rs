use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ContextualityError;
use crate::abelian::{mod_inverse, EquationSystem, FiniteAbelianGroup, GroupElement};
use crate::scenario::MerminArgument;

/// `sum of x_(party, choice) over variables = rhs`, every coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvnEquation {
    /// `(party, choice)`, parties 0-based.
    pub variables: Vec<(usize, usize)>,
    pub rhs: GroupElement,
}

/// The control equation followed by one equation per variation context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvnTheory {
    pub group: FiniteAbelianGroup,
    pub equations: Vec<AvnEquation>,
}

impl AvnTheory {
    /// All variables, lexicographic.
    pub fn variables(&self) -> Vec<(usize, usize)> {
        self.equations.iter().flat_map(|e| e.variables.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_satisfied_by(&self, assignment: &BTreeMap<(usize, usize), GroupElement>) -> bool {
        self.equations.iter().all(|e| {
            let terms: Option<Vec<&GroupElement>> = e.variables.iter().map(|v| assignment.get(v)).collect();
            terms.is_some_and(|t| self.group.sum_unchecked(t) == e.rhs)
        })
    }
}

pub fn avn_equations(argument: &MerminArgument) -> AvnTheory {
    let equations = argument
        .contexts()
        .into_iter()
        .map(|c| AvnEquation {
            variables: c.choices.iter().enumerate().map(|(j, &m)| (j, m)).collect(),
            rhs: argument.context_target(&c.label),
        })
        .collect();
    AvnTheory { group: argument.group().clone(), equations }
}

/// Decides whether the AvN family has no joint solution in `K`.
///
/// Summing the `N` variations of equation `s` gives
/// `sum_r c_r Y_r = N a^s` with `Y_r = sum_j x_(j,r)`, and the control forces
/// `Y_0 = 0`. Since `N` is invertible mod `exp K`, `y_r = N^-1 Y_r` turns this
/// into a system over `K` that is solvable iff the family is. When it is, the
/// assignment `x_(j,0) = 0`, `x_(j,r) = b_r` satisfies every equation.
pub fn is_avn(argument: &MerminArgument) -> bool {
    let theory = avn_equations(argument);
    let group = argument.group();
    let n = argument.parties();
    let max_choice = argument.max_choice();
    let inverse = mod_inverse(n as i64, group.exponent() as i64).expect("gcd(N, exp K) = 1");

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    // equations 1..=N are the variations of s = 1, and so on
    for family in theory.equations[1..].chunks(n) {
        let mut counts = vec![vec![0i64; max_choice + 1]; n];
        for eq in family {
            for &(j, m) in &eq.variables {
                counts[j][m] += 1;
            }
        }
        debug_assert!(counts.windows(2).all(|w| w[0] == w[1]), "every party sees each position once");
        rows.push(counts[0][1..].to_vec());
        let summed = group.scale_unchecked(&family[0].rhs, n as i64);
        rhs.push(group.scale_unchecked(&summed, inverse));
    }
    let reduced = EquationSystem::new(group.clone(), rows, rhs).expect("shape follows the argument");

    match reduced.solve_in_group() {
        None => true,
        Some(b) => {
            let assignment: BTreeMap<(usize, usize), GroupElement> = theory
                .variables()
                .into_iter()
                .map(|(j, m)| ((j, m), if m == 0 { group.zero() } else { b[m - 1].clone() }))
                .collect();
            debug_assert!(theory.is_satisfied_by(&assignment));
            false
        }
    }
}

/// Brute-force decision of the same question over all assignments of the AvN
/// variables. Independent of the reduction used by [`is_avn`].
pub fn is_avn_exhaustive(argument: &MerminArgument, cap: u64) -> Result<bool, ContextualityError> {
    let theory = avn_equations(argument);
    let variables = theory.variables();
    let order = theory.group.order();
    let size = (order as u64).checked_pow(variables.len() as u32).unwrap_or(u64::MAX);
    if size > cap {
        return Err(ContextualityError::SearchSpaceTooLarge { size, cap });
    }
    let position: BTreeMap<(usize, usize), usize> = variables.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // each equation is checked once its last variable (in search order) is set
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); variables.len()];
    for (e, eq) in theory.equations.iter().enumerate() {
        let last = eq.variables.iter().map(|v| position[v]).max().expect("nonempty equation");
        due[last].push(e);
    }
    let equations: Vec<(Vec<usize>, usize)> = theory
        .equations
        .iter()
        .map(|eq| (eq.variables.iter().map(|v| position[v]).collect(), theory.group.index_of(&eq.rhs)))
        .collect();

    let mut values = vec![0usize; variables.len()];
    Ok(!assign(&theory.group, &equations, &due, &mut values, 0))
}

fn assign(
    group: &FiniteAbelianGroup,
    equations: &[(Vec<usize>, usize)],
    due: &[Vec<usize>],
    values: &mut [usize],
    depth: usize,
) -> bool {
    if depth == values.len() {
        return true;
    }
    for v in 0..group.order() {
        values[depth] = v;
        let ok = due[depth].iter().all(|&e| {
            let (vars, rhs) = &equations[e];
            vars.iter().fold(0, |acc, &i| group.add_indices(acc, values[i])) == *rhs
        });
        if ok && assign(group, equations, due, values, depth + 1) {
            return true;
        }
    }
    false
}
