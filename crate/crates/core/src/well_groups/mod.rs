mod crosscheck;
mod diagram;
mod fiber;
mod oracle;
mod swl;

pub use crate::instance::counterexample_instance;
pub use crosscheck::{oracle_crosscheck, CrosscheckSummary};
pub use diagram::{critical_grid, well_diagram, RadiiSpec, WellDiagram};
pub use fiber::{well_group_rank, WellGroupFiber};
pub use oracle::{subspace_oracle, MAX_COMPONENTS, MAX_SUBSETS};
pub use swl::{swl_check, verify_violations, PairInjectivity, PairMode, SwlReport, Violation};
