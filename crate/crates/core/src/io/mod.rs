//! Instance files, reports and plot data.

mod format;
mod instance_json;
mod report;

pub use format::{format_g12, num, to_json_string, G12Formatter};
pub use instance_json::{complex_json, instance_json, parse_instance};
pub use report::{perturbation_json, report_json, step_csv, step_rows, verify_report, ReportCheck};
