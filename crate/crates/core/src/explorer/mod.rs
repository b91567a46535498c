//! User-facing layer: scenario files, reports, sweeps, design search and
//! output files.

pub mod emit;
pub mod optimize;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use emit::{emit_report, Emit, Format};
pub use optimize::{optimize, optimize_with, Constraints, FreeParameter, Objective, OptimizeOptions, OptimizeResult};
pub use report::{run_scenario, ReportDocument, SimulationReport};
pub use scenario::{load_default_scenario, load_scenario, Scenario};
pub use sweep::{sweep, Scale, SweepResult, SweepRow};
