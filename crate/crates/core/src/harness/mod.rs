//! End-to-end experiments: QRAM → tomography → noise scaling → sampling →
//! mitigation → reconstruction → fidelity.

mod config;
mod pipeline;
mod report;
mod sweep;

pub use config::{
    ExperimentConfig, MemorySource, QramConfig, SweepConfig, DEFAULT_LAMBDAS, DEFAULT_SIGMAS,
};
pub use pipeline::{
    analyze, collect_raw, estimate_cost, payload_from_raw, prepare, run_pipeline,
    run_pipeline_with, Analysis, Lab, PreparedSetting, Problem, RawData, RunPayload, RunRecord,
    Timing,
};
pub use report::{closer_fraction, expectations_csv, table_report, TableRow, TableSummary};
pub use sweep::{sigma_sweep, sweep_from_raw, SweepRow, SweepTable};
