//! Coordinatewise vector lattices over `R` and `C`, their f-algebra
//! structure, and numerical verification of the Cauchy–Schwarz, Hölder,
//! Minkowski and Maligranda inequalities in them.
//!
//! Every lattice infimum or supremum over a parameter family is computed two
//! ways: definitionally, by minimizing over a finite grid with convex
//! refinement, and by its closed form. See [`lattice::Evaluation`].

pub mod config;
pub mod harness;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod power;
pub mod report;
pub mod rng;
pub mod search;
pub mod sesquilinear;

pub use config::GridConfig;
pub use error::{Error, Result};
pub use lattice::{Evaluation, LatticeElement, ScalarField};
pub use maps::{ExponentVector, PositiveLinearMap};
pub use power::{ExponentDecomposition, WeightVector};
pub use report::VerificationReport;
pub use sesquilinear::{CauchySchwarzReport, SesquilinearForm};
