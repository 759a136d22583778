//! Numerical laboratory for t-independent divergence-form elliptic systems
//! on the half-space, discretized on a periodic torus.
//!
//! The library assembles the first-order infinitesimal generator
//! `T_A = Ābar⁻¹ D A̲` as a dense complex matrix, splits it into its
//! Hardy subspaces with the matrix sign function, solves the Dirichlet
//! problem by the semigroup formula on the positive spectral subspace,
//! and measures square functions, non-tangential maximal functions and
//! Carleson box norms of the resulting half-space fields.  Everything is
//! dense and deterministic: operators are materialized matrices, spectra
//! are computed exhaustively, and every experiment reports the constants
//! it observed.

pub mod coeff;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod norms;
pub mod operators;
pub mod solver;
pub mod spectral;
pub mod verifier;

pub use error::LabError;

/// Scalar used throughout: double precision complex.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix (column-major, dynamically sized).
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<C64>;
