//! Seeded Monte Carlo campaigns over the solvers, with CSV result tables.
//!
//! A campaign is an [`ExperimentGrid`]; it expands into cells (one per grid
//! coordinate) in a fixed order, and every trial of every cell draws its
//! signal, matrix and noise from seeds derived from the master seed and the
//! cell coordinates (see [`crate::seed`]). Cells are therefore independent of
//! each other and of scheduling.

mod config;
mod grid;
mod report;
mod run;

pub use config::{parse_f64_list, parse_usize_list, ConfigOverrides};
pub use grid::{Algorithm, Cell, ExperimentGrid, ExperimentKind, Preset};
pub use report::{emit_csv, format_sig6, read_csv, write_csv, ResultRow, CSV_HEADER};
pub use run::{
    recover_single, run_block_sweep, run_cell, run_grid, run_noise_sweep, run_phase_transition,
    run_powerlaw_sweep, RecoverOutcome, TrialSettings,
};
