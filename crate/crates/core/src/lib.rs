//! Well functions, sublevel-set 0-homology and well groups of real-valued
//! PL fields on finite graphs, with certified avoidability decisions and a
//! checker for the shrinking-wellness property.
//!
//! The library is generic over the scalar type; the aliases below fix it
//! to `f64`.

pub mod domain;
pub mod error;
pub mod homology;
pub mod instance;
pub mod io;
pub mod perturbations;
pub mod scalar;
pub mod testkit;
pub mod well_function;
pub mod well_groups;

pub use error::{Error, Result};
pub use instance::{counterexample_instance, Analysis, Instance};
pub use scalar::Scalar;

pub type Complex = domain::Complex1D<f64>;
pub type Field = domain::ScalarField<f64>;
pub type PlField = domain::PlField<f64>;
pub type Targets = domain::TargetSet<f64>;
pub type Family = perturbations::PerturbationFamily<f64>;
pub type Tree = homology::MergeTree<f64>;
pub type Diagram = well_groups::WellDiagram<f64>;
pub type Report = well_groups::SwlReport<f64>;
