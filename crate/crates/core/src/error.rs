use thiserror::Error;

use crate::abelian::AbelianError;
use crate::contextuality::ContextualityError;
use crate::io::IoError;
use crate::protocol::ProtocolError;
use crate::quantum::QuantumError;
use crate::scenario::ScenarioError;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Contextuality(#[from] ContextualityError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Missing files, unreadable input.
    Usage,
    /// Malformed JSON or values.
    Parse,
    /// Well-formed input that violates a mathematical precondition.
    Validation,
    /// A configured size cap was exceeded.
    ResourceCap,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage | ErrorKind::Parse => 1,
            ErrorKind::Validation => 2,
            ErrorKind::ResourceCap => 3,
        }
    }
}

fn abelian_kind(e: &AbelianError) -> ErrorKind {
    match e {
        AbelianError::SearchSpaceTooLarge { .. } | AbelianError::GroupTooLarge => ErrorKind::ResourceCap,
        AbelianError::BadPhase(_) => ErrorKind::Parse,
        _ => ErrorKind::Validation,
    }
}

fn quantum_kind(e: &QuantumError) -> ErrorKind {
    match e {
        QuantumError::StateSpaceTooLarge { .. } => ErrorKind::ResourceCap,
        _ => ErrorKind::Validation,
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Abelian(e) => abelian_kind(e),
            Error::Scenario(ScenarioError::Abelian(e)) => abelian_kind(e),
            Error::Scenario(_) => ErrorKind::Validation,
            Error::Contextuality(ContextualityError::SearchSpaceTooLarge { .. }) => ErrorKind::ResourceCap,
            Error::Contextuality(_) => ErrorKind::Validation,
            Error::Quantum(e) => quantum_kind(e),
            Error::Protocol(ProtocolError::Quantum(e)) => quantum_kind(e),
            Error::Protocol(ProtocolError::TooManyInvalidRounds { .. }) => ErrorKind::ResourceCap,
            Error::Protocol(_) => ErrorKind::Validation,
            Error::Io(IoError::Read { .. }) | Error::Io(IoError::Write { .. }) => ErrorKind::Usage,
            Error::Io(_) => ErrorKind::Parse,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind().exit_code()
    }
}
