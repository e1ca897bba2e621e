//! Brute-force truncated Fock-space simulator.

mod basis;
mod circuits;
mod operators;
mod passive;
mod state;

pub use basis::{FockBasis, MAX_CUTOFF};
pub use circuits::{
    cvs_state, eight_port_density, oracle_origin_density, oracle_trcvs_pattern, projector_state,
    squeezed_single_photon, squeezed_vacuum, trcvs_state, InputRoute, OracleValue, DEFAULT_CUTOFF,
    MAX_LEAKAGE, MIN_CUTOFF,
};
pub use operators::{
    displaced_squeezed_amplitudes, fidelity, inner, norm_sqr, number_vector, outcome_displacement,
    povm_params, ModeOperator, PovmParams,
};
pub use passive::{Givens, Mesh};
pub use state::{FockArray, NULL_NORM};
