use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::DEFAULT_SUCCESS_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    PhaseTransition,
    BlockSweep,
    NoiseSweep,
    PowerlawSweep,
    SingleRecover,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PhaseTransition => "phase_transition",
            ExperimentKind::BlockSweep => "block_sweep",
            ExperimentKind::NoiseSweep => "noise_sweep",
            ExperimentKind::PowerlawSweep => "powerlaw_sweep",
            ExperimentKind::SingleRecover => "single_recover",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "phase_transition" => ExperimentKind::PhaseTransition,
            "block_sweep" => ExperimentKind::BlockSweep,
            "noise_sweep" => ExperimentKind::NoiseSweep,
            "powerlaw_sweep" => ExperimentKind::PowerlawSweep,
            "single_recover" => ExperimentKind::SingleRecover,
            _ => {
                return Err(Error::config(
                    "experiment",
                    format!("unknown experiment {s:?}"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Copram,
    BlockCopram,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Copram => "copram",
            Algorithm::BlockCopram => "block-copram",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "copram" => Ok(Algorithm::Copram),
            "block-copram" | "block_copram" => Ok(Algorithm::BlockCopram),
            other => Err(Error::config(
                "algo",
                format!("expected copram or block-copram, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Full-size campaigns (n = 3000).
    Paper,
    /// Scaled-down campaigns (n = 500, 20 trials) for CI.
    Quick,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(Preset::Paper),
            "quick" => Ok(Preset::Quick),
            other => Err(Error::config(
                "preset",
                format!("expected paper or quick, got {other:?}"),
            )),
        }
    }
}

/// A Monte Carlo campaign.
///
/// Signals are block-sparse with block length `b` when `block_lens` holds a
/// value (the block solver uses the same `b`); a `None` entry means plain
/// sparse signals. Power-law signals replace the Gaussian amplitudes when
/// `alphas` holds a value; a `None` entry is the Gaussian baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub kind: ExperimentKind,
    pub n: usize,
    pub ms: Vec<usize>,
    pub ss: Vec<usize>,
    pub block_lens: Vec<Option<usize>>,
    pub alphas: Vec<Option<f64>>,
    pub nsrs: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub success_threshold: f64,
    pub algorithms: Vec<Algorithm>,
    pub outer_iters: usize,
    pub inner_iters: usize,
    /// Worker threads for trials; 0 uses all available cores.
    pub workers: usize,
}

/// One grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub kind: ExperimentKind,
    pub algorithm: Algorithm,
    pub n: usize,
    pub s: usize,
    pub b: Option<usize>,
    pub m: usize,
    pub alpha: Option<f64>,
    pub nsr: f64,
}

impl Cell {
    /// Block sparsity `s/b` when the signal is block structured.
    pub fn k(&self) -> Option<usize> {
        self.b.map(|b| self.s / b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "must be positive"));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::config(
                "s",
                format!("need 1 <= s <= n={}, got {}", self.n, self.s),
            ));
        }
        if self.m == 0 {
            return Err(Error::config("m", "must be positive"));
        }
        if self.m < self.s {
            return Err(Error::config(
                "m",
                format!("m={} is smaller than the sparsity s={}", self.m, self.s),
            ));
        }
        if let Some(b) = self.b {
            if b == 0 || !self.n.is_multiple_of(b) {
                return Err(Error::config(
                    "b",
                    format!("block length {b} must divide n={}", self.n),
                ));
            }
            if !self.s.is_multiple_of(b) {
                return Err(Error::config(
                    "b",
                    format!("block length {b} must divide s={}", self.s),
                ));
            }
        }
        if self.algorithm == Algorithm::BlockCopram && self.b.is_none() {
            return Err(Error::config("b", "block-copram needs a block length"));
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 1.0) || !alpha.is_finite() {
                return Err(Error::config(
                    "alpha",
                    format!("decay exponent must exceed 1, got {alpha}"),
                ));
            }
            if self.b.is_some() {
                return Err(Error::config(
                    "alpha",
                    "power-law signals are not block structured",
                ));
            }
        }
        if !(self.nsr >= 0.0) || !self.nsr.is_finite() {
            return Err(Error::config(
                "nsr",
                format!("must be a nonnegative number, got {}", self.nsr),
            ));
        }
        Ok(())
    }
}

pub(crate) fn stepped(start: usize, stop: usize, step: usize) -> Vec<usize> {
    (start..=stop).step_by(step).collect()
}

impl ExperimentGrid {
    pub fn preset(kind: ExperimentKind, preset: Preset) -> Self {
        let mut g = ExperimentGrid {
            kind,
            n: 3000,
            ms: stepped(200, 2000, 200),
            ss: vec![20],
            block_lens: vec![Some(5)],
            alphas: vec![None],
            nsrs: vec![0.0],
            trials: 50,
            master_seed: 1,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            algorithms: vec![Algorithm::Copram, Algorithm::BlockCopram],
            outer_iters: 30,
            inner_iters: 5,
            workers: 0,
        };
        match (kind, preset) {
            (ExperimentKind::PhaseTransition, Preset::Paper) => {
                g.ss = vec![20, 30];
            }
            (ExperimentKind::BlockSweep, Preset::Paper) => {
                g.ms = vec![
                    50, 100, 150, 200, 250, 300, 350, 400, 500, 600, 800, 1000, 1200, 1400,
                ];
                g.block_lens = [20, 10, 5, 2, 1].into_iter().map(Some).collect();
                g.algorithms = vec![Algorithm::BlockCopram];
                g.trials = 200;
            }
            (ExperimentKind::NoiseSweep, Preset::Paper) => {
                g.ms = vec![1600];
                g.nsrs = (1..=10).map(|i| i as f64 / 10.0).collect();
            }
            (ExperimentKind::PowerlawSweep, Preset::Paper) => {
                g.ss = vec![20, 30];
                g.ms = stepped(200, 2200, 200);
                g.block_lens = vec![None];
                g.alphas = vec![None, Some(2.0), Some(4.0), Some(8.0)];
                g.algorithms = vec![Algorithm::Copram];
            }
            (ExperimentKind::SingleRecover, _) => {
                g.ms = vec![1000];
                g.block_lens = vec![None];
                g.algorithms = vec![Algorithm::Copram];
                g.trials = 1;
                if preset == Preset::Quick {
                    g.n = 500;
                    g.ss = vec![10];
                    g.ms = vec![300];
                }
            }
            (_, Preset::Quick) => {
                g.n = 500;
                g.trials = 20;
                g.ss = vec![10];
                g.ms = stepped(50, 500, 50);
                match kind {
                    ExperimentKind::BlockSweep => {
                        g.ms = stepped(25, 300, 25);
                        g.block_lens = [10, 5, 2, 1].into_iter().map(Some).collect();
                        g.algorithms = vec![Algorithm::BlockCopram];
                    }
                    ExperimentKind::NoiseSweep => {
                        g.ms = vec![400];
                        g.nsrs = vec![0.1, 0.4, 0.7, 1.0];
                    }
                    ExperimentKind::PowerlawSweep => {
                        g.block_lens = vec![None];
                        g.alphas = vec![None, Some(2.0), Some(4.0), Some(8.0)];
                        g.algorithms = vec![Algorithm::Copram];
                    }
                    _ => {}
                }
            }
        }
        g
    }

    /// Cells in emission order: algorithm, s, b, alpha, nsr, m (m fastest).
    pub fn cells(&self) -> Result<Vec<Cell>> {
        self.validate()?;
        let mut out = Vec::new();
        for &algorithm in &self.algorithms {
            for &s in &self.ss {
                for &b in &self.block_lens {
                    for &alpha in &self.alphas {
                        for &nsr in &self.nsrs {
                            for &m in &self.ms {
                                let cell = Cell {
                                    kind: self.kind,
                                    algorithm,
                                    n: self.n,
                                    s,
                                    b,
                                    m,
                                    alpha,
                                    nsr,
                                };
                                cell.validate()?;
                                out.push(cell);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = [
            ("m", self.ms.is_empty()),
            ("s", self.ss.is_empty()),
            ("b", self.block_lens.is_empty()),
            ("alpha", self.alphas.is_empty()),
            ("nsr", self.nsrs.is_empty()),
            ("algo", self.algorithms.is_empty()),
        ];
        if let Some((field, _)) = nonempty.iter().find(|(_, empty)| *empty) {
            return Err(Error::config(*field, "grid axis is empty"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.outer_iters == 0 {
            return Err(Error::config("t0", "must be at least 1"));
        }
        if self.inner_iters == 0 {
            return Err(Error::config("inner-iters", "must be at least 1"));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::config("success-threshold", "must be positive"));
        }
        Ok(())
    }
}
