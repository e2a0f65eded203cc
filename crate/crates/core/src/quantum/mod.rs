//! Exact finite-dimensional quantum arithmetic for multi-qubit registers.
//!
//! Qubit `i` of a register is tensor factor `i` and the most significant bit
//! of the amplitude index (see [`crate::bits`]). All validity checks use the
//! absolute tolerance [`crate::linalg::TOL`].

mod channel;
mod povm;
mod state;

pub use channel::{apply_channel, KrausChannel};
pub use povm::{measure, sample_distribution, Povm};
pub use state::{
    epr_state, hadamard_layer, tensor, wiesner_basis, wiesner_probabilities, wiesner_state, DensityOperator, PureState,
    Tensor,
};
