//! Simulation of interaction-free-measurement circuits on dual-rail qubits.
//!
//! * [`state`]: sparse joint state with an absorption ledger.
//! * [`interferometer`]: transfer-matrix analysis of the noisy Zeno cascade.
//! * [`ifm_gate`]: the conditional two-qubit gate built from that cascade.
//! * [`circuits`]: entangled-state preparation, Bell measurement and the
//!   teleportation-based CNOT.
//! * [`trials`]: seeded, parallel Monte Carlo batches of the protocols.

pub mod circuits;
pub mod error;
pub mod ifm_gate;
pub mod interferometer;
pub mod state;
pub mod trials;
pub mod unitary;

pub use error::{Result, SimError};
pub use ifm_gate::{apply_ifm, truth_table, IfmGateConfig, IfmMode, TruthRow};
pub use state::{
    AbsorbedRecord, AbsorptionTag, EventId, LogicalBasisState, Outcome, QubitDescriptor, Species,
    StateVector,
};
pub use unitary::{Axis, OneQubitUnitary};
