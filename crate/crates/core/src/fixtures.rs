//! Standard arguments: Mermin's parity argument and the cyclic family
//! `t y = 1` over `Z/d`.

use num_integer::Integer;

use crate::abelian::{EquationSystem, FiniteAbelianGroup};
use crate::scenario::MerminArgument;

/// The single equation `t y = 1` over `Z/d`.
pub fn cyclic_system(d: u64, t: i64) -> EquationSystem {
    let group = FiniteAbelianGroup::cyclic(d).expect("d >= 2");
    let one = group.element(vec![1 % d]).expect("in range");
    EquationSystem::new(group, vec![vec![t]], vec![one]).expect("well-formed")
}

/// `(Z/d, {t y = 1}, N)` with phases from the torus solver.
pub fn cyclic(d: u64, t: i64, parties: usize) -> MerminArgument {
    MerminArgument::with_torus_solution(cyclic_system(d, t), parties)
        .unwrap_or_else(|e| panic!("(d={d}, t={t}, N={parties}) is not a valid argument: {e}"))
}

/// Mermin's argument: `2 y = 1` over `Z/2` with three parties.
pub fn mermin() -> MerminArgument {
    cyclic(2, 2, 3)
}

/// Smallest `N >= max(2, t)` with `gcd(N, d) = 1`.
pub fn minimal_parties(d: u64, t: u64) -> usize {
    let mut n = t.max(2);
    while n.gcd(&d) != 1 {
        n += 1;
    }
    n as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_party_counts() {
        assert_eq!(minimal_parties(2, 2), 3);
        assert_eq!(minimal_parties(2, 1), 3);
        assert_eq!(minimal_parties(3, 2), 2);
        assert_eq!(minimal_parties(4, 2), 3);
        assert_eq!(minimal_parties(6, 2), 5);
        assert_eq!(minimal_parties(9, 3), 4);
        assert_eq!(minimal_parties(9, 8), 8);
    }
}
