use thiserror::Error;

use crate::state::Species;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("register must contain at least one qubit")]
    EmptyRegister,

    #[error("basis state has {bits} entries but the register has {qubits} qubits")]
    LengthMismatch { bits: usize, qubits: usize },

    #[error("basis entry {value} at position {position} is not 0 or 1")]
    InvalidBit { position: usize, value: u8 },

    #[error("register of {0} qubits exceeds the supported maximum of 64")]
    RegisterTooLarge(usize),

    #[error("qubit index {index} out of range for a register of {len} qubits")]
    QubitOutOfRange { index: usize, len: usize },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("rotation angle {0} outside [0, 4pi)")]
    AngleOutOfRange(f64),

    #[error("survival amplitude {0} outside [0, 1]")]
    SurvivalOutOfRange(f64),

    #[error("state has no coherent amplitude left to measure")]
    FullyAbsorbed,

    #[error("registers differ: {0}")]
    RegisterMismatch(String),

    #[error("reference state carries absorbed mass")]
    ReferenceNotPure,

    #[error("control and target must be distinct qubits (both {0})")]
    SameQubit(usize),

    #[error("{control:?} cannot act as the absorber for a {target:?} target")]
    SpeciesMismatch { control: Species, target: Species },

    #[error("transparency eta = {0} outside [0, 1)")]
    EtaOutOfRange(f64),

    #[error("number of beam splitters must be at least {min}, got {got}")]
    TooFewSplitters { min: u64, got: u64 },

    #[error("target probability {0} outside (0, 1)")]
    TargetOutOfRange(f64),

    #[error("permutation index {0} outside 1..=6")]
    PermutationOutOfRange(u8),

    #[error("state is not normalized (total probability {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, SimError>;
