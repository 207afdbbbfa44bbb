//! Finite abelian groups, their characters, and integer linear algebra for
//! solving `Z`-module systems in the group and in the torus of phases.

mod group;
mod phase;
mod snf;
mod system;

pub use group::{FiniteAbelianGroup, GroupElement};
pub use phase::{character_eval, character_table, Character, RationalPhase};
pub use snf::{smith_normal_form, IntMatrix, SmithDecomposition};
pub use system::{mod_inverse, EquationSystem, PhaseSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("a group needs at least one cyclic factor")]
    EmptyGroup,
    #[error("cyclic factor order {0} is invalid (must be at least 2)")]
    InvalidFactor(u64),
    #[error("group order does not fit in memory indices")]
    GroupTooLarge,
    #[error("element has {found} residues but the group has {expected} factors")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("residue {residue} out of range for factor of order {order}")]
    ResidueOutOfRange { residue: u64, order: u64 },
    #[error("equation system must have at least one equation and one unknown")]
    EmptySystem,
    #[error("coefficient rows have different lengths")]
    RaggedRows,
    #[error("{rows} equations but {rhs} right-hand sides")]
    RhsLength { rows: usize, rhs: usize },
    #[error("phase table must have one entry per character ({expected})")]
    PhaseTableShape { expected: usize },
    #[error("cannot parse phase {0:?}; expected an exact fraction \"p/q\"")]
    BadPhase(String),
    #[error("system is inconsistent: an integer relation between rows does not hold on the right-hand sides")]
    InconsistentSystem,
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u64, cap: u64 },
}
