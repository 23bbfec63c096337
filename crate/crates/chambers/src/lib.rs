//! Exact combinatorics of central hyperplane arrangements.
//!
//! Everything here is computed in exact arithmetic (big integers, big
//! rationals, GF(2)): chamber counts via the Moebius function of the
//! intersection lattice and via deletion-restriction, the eta-star invariant
//! of a point configuration by three independent algorithms (order
//! enumeration, GF(2) homology, the combinatorial-flag average), and the
//! degeneracy / singularity statistics of the +-1 cube configuration.
//!
//! The crate is data-parallel over rayon by default; build with
//! `--no-default-features` for a dependency-free sequential core. Results are
//! identical either way.

pub mod ensembles;
pub mod error;
pub mod eta;
pub mod fixtures;
pub mod homology;
pub mod lattice;
pub mod linalg;
pub mod par;
pub mod projective;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use projective::{Configuration, Order, ProjectivePoint};

/// Budget caps for the potentially exponential enumerations.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Maximum number of flats an intersection lattice may have.
    pub flat_cap: usize,
    /// Maximum number of simplices enumerated per homology degree.
    pub simplex_cap: usize,
    /// Maximum `n` accepted by the cube generator.
    pub en_cap: usize,
    /// Exhaustive genericity verification is used while the number of
    /// subsets to check stays at or below this.
    pub genericity_exhaustive_cap: u64,
    /// Number of sampled subsets checked when exhaustive verification is
    /// over budget.
    pub genericity_samples: u64,
    /// Largest number of points accepted by the exact factorial-ratio sums.
    pub factorial_point_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            flat_cap: 1_000_000,
            simplex_cap: 2_000_000,
            en_cap: 20,
            genericity_exhaustive_cap: 1_000_000,
            genericity_samples: 100_000,
            factorial_point_cap: 24,
        }
    }
}
