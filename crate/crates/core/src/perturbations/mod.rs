mod avoid;
mod family;
mod lattice;
mod minimizing;
mod urysohn;
mod zeros;

pub use avoid::{avoidable, shift_hits, verify_decision, AvoidabilityDecision, Certificate, Verdict};
pub use family::{PerturbationFamily, PerturbedField, Provenance, SampledPerturbation};
pub use lattice::{lattice_offsets, lattice_search, LatticeOptions};
pub use minimizing::{minimizing_perturbation, LedgerEntry, MinimizingPerturbation};
pub use urysohn::{blend, urysohn, BlendWeights, RegionDistance};
pub use zeros::{min_target_gap, zeros_on};
