//! Signal-level verification of colorings.
//!
//! A coloring with `T` colors is run as a block of `T` time instants. In
//! instant `t` a node transmits for pair `j` whenever `c_t` is in its
//! transmit set, adding (linear deterministic model) or subtracting
//! (Gaussian model) the signals of the mates whose colors it codes. A
//! receiver of pair `j` combines what it heard over its receive instants and
//! must end up with exactly the signal it would have received had its pair
//! run alone on its induced subgraph.
//!
//! * [`symbolic_verify`] checks this with formal coefficients, for both
//!   channel models and every choice of gains at once.
//! * [`deterministic_simulate`] runs the linear deterministic model bit by
//!   bit and compares against each induced subgraph run in isolation.
//! * [`block_simulate`] chains several blocks with relay functions in
//!   between.
//!
//! The Gaussian receiver adds the instants of its effective receive set and
//! subtracts the remaining receive instants, which hold the shared color of
//! its interferers. Each interferer is heard once in each group, so its two
//! copies cancel.

mod bits;
mod block;
mod simulate;
mod symbolic;

pub use bits::{shift_apply, BitSignal, MAX_Q};
pub use block::{block_simulate, BlockRecord, BlockTrace, IdentityForward, ReceiveView, RelayStrategy};
pub use simulate::{
    deterministic_simulate, isolated_receive, random_gains, random_snapshot, run_trials, InstantRecord, NodeSignal,
    Reconstruction, SimulationTrace, Snapshot, TrialSummary,
};
pub use symbolic::{
    cancelling_receive, receive_weights, symbolic_verify, Symbol, SymbolicIssue, SymbolicReport, SymbolicSignal, Term,
};

use thiserror::Error;

use crate::coloring::ColoringError;

/// Errors raised by the simulators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("gain {gain} exceeds q = {q}")]
    GainExceedsQ { gain: u32, q: u32 },
    #[error("q = {0} is outside 1..={MAX_Q}")]
    BadQ(u32),
    #[error("network uses Gaussian gains; bit-level simulation needs deterministic gains")]
    NotDeterministic,
    #[error("simulation network does not match the route-expanded graph")]
    TopologyMismatch,
    #[error("node {node} transmits for two pairs in instant {instant}")]
    SimultaneousTransmit { node: String, instant: usize },
    #[error("snapshot has no signal for {0}")]
    MissingSnapshot(String),
    #[error("relay strategy at {node} read an undeclared signal: {detail}")]
    StrategyArity { node: String, detail: String },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}
