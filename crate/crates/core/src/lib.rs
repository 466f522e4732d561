//! C-eigenvalues and C-eigenvectors of piezoelectric-type tensors.
//!
//! A piezoelectric-type tensor is an order-3 real tensor `A` with
//! `a_ijk = a_ikj`. A C-eigenpair is `(λ, x, y)` with unit `x`, `y` such that
//! `A y y = λ x` and `x A y = λ y`. The largest C-eigenpair gives the best
//! rank-one approximation `λ x∘y∘y`. Physically it bounds the polarization
//! under unit uniaxial stress and the strain under a unit field.
//!
//! Modules:
//! - [`tensor`]: storage, contractions, rotation, rank-one residuals.
//! - [`solver`]: multi-start ascent plus Gauss–Newton for the spectrum.
//! - [`catalog`]: point-group patterns and bundled material tensors.
//! - [`mod@unfold`]: the `n × n(n+1)/2` unfolding and its singular value bound.
//! - [`physics`]: direct and converse piezoelectric effects.
//! - [`io`]: the `piezo-tensor v1` text format.

pub mod catalog;
pub mod error;
pub mod format;
pub mod io;
mod linalg;
pub mod physics;
pub mod solver;
pub mod tensor;
pub mod unfold;

pub use catalog::{analytic_spectrum_a_alpha, build, dataset, CrystalSpec, NamedDataset, PointGroup};
pub use error::{PiezoError, Result};
pub use solver::{
    alternating_ascent, brute_force_lower_bound, canonicalize, largest, refine, residuals, solve_spectrum, CEigenPair,
    EigenSpectrum, PairDiagnostics, SolverConfig,
};
pub use tensor::{OrthogonalMatrix, PiezoTensor, Rank1PiezoTensor, SymmetryMode, UnitVector};
pub use unfold::{compare, largest_singular_value, unfold, vec_sym, ComparisonReport, UnfoldMatrix};
