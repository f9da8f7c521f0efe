//! Spectral machinery for spin-1/2 XXZ chains and XXX models on trees.
//!
//! The crate builds the nearest-neighbor XXZ chain Hamiltonian with kink
//! boundary fields and the XXX ferromagnet on arbitrary finite trees,
//! decomposes them over magnetization and total-spin sectors, and computes
//! the lowest energy per total-spin sector through two independent
//! pipelines:
//!
//! * an **orthodox route** ([`quantum_group`]) that extracts highest-weight
//!   vectors as the kernel of the deformed raising operator and compresses
//!   the Hamiltonian onto them, and
//! * a **diagram route** ([`tl_diagrams`]) that assembles the sector matrix
//!   `A_{L,n}` directly from the Temperley-Lieb graphical action on
//!   noncrossing arc diagrams (generalized Hulthén brackets).
//!
//! [`spectra`] provides the eigenvalue solvers, including the Perron-shift
//! power method for matrices with non-positive off-diagonal entries, and
//! [`experiments`] runs the level-ordering, volume-monotonicity, spectral-gap,
//! tree, and Lieb-Mattis verification suites on top of both pipelines.
//!
//! All numeric code is generic over the scalar type (see [`Scalar`]); the
//! aliases at the crate root pin the default double-precision
//! instantiations used by the CLI and the test suites.

pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod lattice;
pub mod quantum_group;
pub mod scalar;
pub mod spectra;
pub mod tl_diagrams;

pub use error::{FoelError, Result};
pub use scalar::Scalar;

/// Double-precision anisotropy parameter.
pub type Anisotropy64 = hilbert::Anisotropy<f64>;
/// Double-precision sparse operator on the full product space.
pub type SparseOperator64 = hilbert::SparseOperator<f64>;
/// Double-precision highest-weight basis.
pub type HighestWeightBasis64 = quantum_group::HighestWeightBasis<f64>;
/// Double-precision Temperley-Lieb sector matrix.
pub type SectorMatrix64 = tl_diagrams::SectorMatrix<f64>;
/// Double-precision Perron-shift solve result.
pub type PerronResult64 = spectra::PerronResult<f64>;
/// Double-precision sector energy table.
pub type EnergyTable64 = experiments::EnergyTable<f64>;
