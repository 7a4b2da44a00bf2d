use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};
use crate::metrics::{recovery_verdict, RecoveryVerdict};
use crate::model::{
    gen_block_sparse_signal, gen_measurement_matrix, gen_powerlaw_signal, gen_sparse_signal,
    sigma_for_nsr, BlockStructure, MeasurementEnsemble, Signal,
};
use crate::seed::derive_seed;
use crate::solver::{solve, SolverConfig, SolverReport};

use super::grid::{Algorithm, Cell, ExperimentGrid, ExperimentKind};
use super::report::ResultRow;

/// Per-cell trial parameters shared by every cell of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSettings {
    pub trials: usize,
    pub master_seed: u64,
    pub success_threshold: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub workers: usize,
}

impl From<&ExperimentGrid> for TrialSettings {
    fn from(g: &ExperimentGrid) -> Self {
        TrialSettings {
            trials: g.trials,
            master_seed: g.master_seed,
            success_threshold: g.success_threshold,
            outer_iters: g.outer_iters,
            inner_iters: g.inner_iters,
            workers: g.workers,
        }
    }
}

struct TrialOutcome {
    verdict: RecoveryVerdict,
    seconds: f64,
}

/// A planted instance: truth and observations.
struct Instance {
    x: Signal<f64>,
    obs: MeasurementEnsemble<f64>,
}

fn instance(cell: &Cell, master: u64, trial: usize) -> Result<Instance> {
    let t = trial as u64;
    let (n, s, m) = (cell.n as u64, cell.s as u64, cell.m as u64);
    let b = cell.b.unwrap_or(0) as u64;
    let alpha_bits = cell.alpha.map_or(0, f64::to_bits);
    let signal_seed = derive_seed(master, "signal", &[n, s, b, alpha_bits, t]);
    let x = match (cell.alpha, cell.b) {
        (Some(alpha), _) => gen_powerlaw_signal(cell.n, cell.s, alpha, signal_seed)?,
        (None, Some(b)) => {
            let structure = BlockStructure::new(cell.n, b)?;
            gen_block_sparse_signal(&structure, cell.s / b, signal_seed)?
        }
        (None, None) => gen_sparse_signal(cell.n, cell.s, signal_seed)?,
    };
    let a = gen_measurement_matrix(cell.m, cell.n, derive_seed(master, "matrix", &[n, m, t]))?;
    let sigma = sigma_for_nsr(cell.nsr, x.norm());
    let noise_seed = derive_seed(master, "noise", &[n, m, cell.nsr.to_bits(), t]);
    let obs = MeasurementEnsemble::observe(a, &x, sigma, noise_seed)?;
    Ok(Instance { x, obs })
}

fn solver_config(cell: &Cell, settings: &TrialSettings) -> Result<SolverConfig> {
    let mut cfg = match (cell.algorithm, cell.b) {
        (Algorithm::Copram, _) => SolverConfig::plain(cell.s),
        (Algorithm::BlockCopram, Some(b)) => SolverConfig::block(b, cell.s / b),
        (Algorithm::BlockCopram, None) => {
            return Err(Error::config("b", "block-copram needs a block length"))
        }
    };
    cfg.outer_iters = settings.outer_iters;
    cfg.cosamp.max_inner_iters = settings.inner_iters;
    Ok(cfg)
}

fn run_trial(cell: &Cell, settings: &TrialSettings, trial: usize) -> Result<TrialOutcome> {
    let inst = instance(cell, settings.master_seed, trial)?;
    let cfg = solver_config(cell, settings)?;
    let start = Instant::now();
    let report = solve(&inst.obs.a, &inst.obs.y, &cfg, None)?;
    let seconds = start.elapsed().as_secs_f64();
    let verdict = recovery_verdict(&report.x_final, &inst.x, settings.success_threshold)?;
    Ok(TrialOutcome { verdict, seconds })
}

fn build_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))
}

fn aggregate(cell: &Cell, settings: &TrialSettings, outcomes: &[TrialOutcome]) -> ResultRow {
    let trials = outcomes.len();
    let successes = outcomes.iter().filter(|o| o.verdict.success).count();
    let mean = |f: fn(&TrialOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / trials as f64;
    ResultRow {
        experiment: cell.kind,
        algorithm: cell.algorithm,
        n: cell.n,
        s: cell.s,
        b: cell.b,
        k: cell.k(),
        m: cell.m,
        alpha: cell.alpha,
        nsr: cell.nsr,
        trials,
        successes,
        recovery_probability: successes as f64 / trials as f64,
        mean_relative_error: mean(|o| o.verdict.relative_error),
        mean_wall_time_seconds: mean(|o| o.seconds),
        master_seed: settings.master_seed,
    }
}

fn run_cell_in(pool: &ThreadPool, cell: &Cell, settings: &TrialSettings) -> Result<ResultRow> {
    cell.validate()?;
    if settings.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    let outcomes = pool.install(|| {
        (0..settings.trials)
            .into_par_iter()
            .map(|t| run_trial(cell, settings, t))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(aggregate(cell, settings, &outcomes))
}

/// Runs every trial of one cell and aggregates them.
pub fn run_cell(cell: &Cell, settings: &TrialSettings) -> Result<ResultRow> {
    run_cell_in(&build_pool(settings.workers)?, cell, settings)
}

/// Runs all cells of a grid; rows follow [`ExperimentGrid::cells`] order.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<ResultRow>> {
    let cells = grid.cells()?;
    let settings = TrialSettings::from(grid);
    let pool = build_pool(grid.workers)?;
    cells
        .iter()
        .map(|c| run_cell_in(&pool, c, &settings))
        .collect()
}

fn run_kind(grid: &ExperimentGrid, kind: ExperimentKind) -> Result<Vec<ResultRow>> {
    if grid.kind != kind {
        return Err(Error::config(
            "experiment",
            format!("expected a {kind} grid, got {}", grid.kind),
        ));
    }
    run_grid(grid)
}

pub fn run_phase_transition(grid: &ExperimentGrid) -> Result<Vec<ResultRow>> {
    run_kind(grid, ExperimentKind::PhaseTransition)
}

pub fn run_block_sweep(grid: &ExperimentGrid) -> Result<Vec<ResultRow>> {
    run_kind(grid, ExperimentKind::BlockSweep)
}

pub fn run_noise_sweep(grid: &ExperimentGrid) -> Result<Vec<ResultRow>> {
    run_kind(grid, ExperimentKind::NoiseSweep)
}

pub fn run_powerlaw_sweep(grid: &ExperimentGrid) -> Result<Vec<ResultRow>> {
    for alpha in grid.alphas.iter().flatten() {
        if !(*alpha > 1.0) {
            return Err(Error::config(
                "alpha",
                format!("decay exponent must exceed 1, got {alpha}"),
            ));
        }
    }
    run_kind(grid, ExperimentKind::PowerlawSweep)
}

#[derive(Debug, Clone)]
pub struct RecoverOutcome {
    pub cell: Cell,
    pub truth: Signal<f64>,
    pub verdict: RecoveryVerdict,
    pub report: SolverReport<f64>,
    pub seconds: f64,
}

/// Solves trial 0 of the grid's first cell with trace tracking on.
pub fn recover_single(grid: &ExperimentGrid) -> Result<RecoverOutcome> {
    let cell = *grid
        .cells()?
        .first()
        .ok_or_else(|| Error::config("m", "grid has no cells"))?;
    let settings = TrialSettings::from(grid);
    let inst = instance(&cell, settings.master_seed, 0)?;
    let mut cfg = solver_config(&cell, &settings)?;
    cfg.track_trace = true;
    let start = Instant::now();
    let report = solve(&inst.obs.a, &inst.obs.y, &cfg, Some(&inst.x))?;
    let seconds = start.elapsed().as_secs_f64();
    let verdict = recovery_verdict(&report.x_final, &inst.x, settings.success_threshold)?;
    Ok(RecoverOutcome {
        cell,
        truth: inst.x,
        verdict,
        report,
        seconds,
    })
}
