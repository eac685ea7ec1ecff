//! Configuration, scenario presets, run orchestration and CSV/summary
//! output.
//!
//! Summary expectations come from the symmetry analysis of the external
//! potential (grid scenarios) or of the inertia tensor (tops), never from a
//! per-scenario list.

mod config;
mod run;

pub use config::{parse_config, validate, ExternalSpec, RunConfig, Scenario, WrapGuard};
pub use run::{
    csv_row, execute, random_family, relative_drift, run, Check, Comparison, RunSummary, Sinks, CONSTRAINT_GROWTH_TOL,
    CSV_HEADER, ORTHO_TOL, RELATIVE_FLOOR, TRANSPORT_MIN_ORDER,
};
