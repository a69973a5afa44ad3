//! Zero-discord analysis of two-qudit circulant states.
//!
//! A state on `C^d ⊗ C^d` is *circulant* when it is block diagonal with
//! respect to the cyclic decomposition `Σ_0 ⊕ … ⊕ Σ_{d−1}`, where
//! `Σ_n = span{ e_i ⊗ e_{i+n} }`. Such a state is described by `d` positive
//! semidefinite `d × d` matrices `a⁽⁰⁾ … a⁽ᵈ⁻¹⁾` ([`CirculantSpec`]).
//!
//! The crate decides whether quantum discord vanishes along two independent
//! routes and lets them check each other:
//!
//! * [`blocks`] and [`circulant`]: structural criteria (commuting block
//!   families for any state; closed-form phase-unitary relations for
//!   circulant and Bell-diagonal states in prime dimension),
//! * [`discord`]: a numeric oracle that maximises measured mutual
//!   information over rank-one projective measurements.

pub mod blocks;
pub mod circulant;
pub mod decompose;
pub mod discord;
pub mod error;
pub mod matrix;
pub mod optimize;
pub mod sampling;
pub mod schema;
pub mod simplex;
pub mod states;
pub mod suites;

use serde::{Deserialize, Serialize};

pub use blocks::{extract_blocks, structural_discord_zero, BlockDecomposition, Criterion, StructuralVerdict, Witness};
pub use circulant::{
    bell_zero_discord_check, circulant_necessary_conditions, circulant_theorem_check, completely_classical_check,
    generate_zero_discord, NecessaryConditions, PhaseVector,
};
pub use decompose::{classical_decomposition, ClassicalComponent};
pub use discord::{
    classical_correlation, conditional_entropy, discord, mutual_information, DiscordResult, MeasurementBasis,
    OptimizerConfig,
};
pub use error::{Error, Result};
pub use matrix::{
    commutator_norm, eig_hermitian, is_normal, kron, partial_trace, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Spectrum,
};
pub use num_complex::Complex64;
pub use states::{BellWeights, CirculantSpec};

/// One of the two parties of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Trial-division primality test; dimensions here are tiny.
pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}
