//! Alternating minimization: phase estimation `p = sign(A x)` followed by a
//! warm-started (block-)CoSaMP solve of `min ‖A x − p∘y‖` over the sparsity
//! model, repeated for a fixed number of outer rounds.

use crate::cosamp::{cosamp_with_state, CosampConfig, SparsityModel};
use crate::error::{Error, Result};
use crate::init::{block_copram_init, copram_init};
use crate::linalg::{norm2, DenseMatrix};
use crate::metrics::{dist_op, sign_of};
use crate::model::{BlockStructure, Signal};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMode {
    Plain { s: usize },
    Block { b: usize, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub mode: SolverMode,
    /// Outer rounds `t₀`.
    pub outer_iters: usize,
    pub cosamp: CosampConfig,
    pub track_trace: bool,
    /// Stop early once consecutive iterates differ by at most this (ℓ₂).
    pub stall_tol: f64,
}

impl SolverConfig {
    pub fn plain(s: usize) -> Self {
        Self::with_mode(SolverMode::Plain { s })
    }

    pub fn block(b: usize, k: usize) -> Self {
        Self::with_mode(SolverMode::Block { b, k })
    }

    fn with_mode(mode: SolverMode) -> Self {
        Self {
            mode,
            outer_iters: 30,
            cosamp: CosampConfig::default(),
            track_trace: false,
            stall_tol: 1e-12,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.outer_iters == 0 {
            return Err(Error::config("t0", "must be at least 1"));
        }
        self.cosamp.validate()?;
        match self.mode {
            SolverMode::Plain { s } if s == 0 || s > n => {
                Err(Error::config("s", format!("need 1 <= s <= n={n}, got {s}")))
            }
            SolverMode::Block { b, .. } if b == 0 || !n.is_multiple_of(b) => Err(Error::config(
                "b",
                format!("block length {b} must divide the signal length {n}"),
            )),
            SolverMode::Block { b, k } if k == 0 || k > n / b => Err(Error::config(
                "k",
                format!("need 1 <= k <= {} blocks, got {k}", n / b),
            )),
            _ => Ok(()),
        }
    }
}

/// Where the per-round measurement signs come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSource<T> {
    /// `sign(A xᵗ)` from the current iterate.
    Estimated,
    /// A fixed sign vector (e.g. the true signs, for diagnostics).
    Fixed(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport<T> {
    pub x_final: Signal<T>,
    /// `dist_op(xᵗ, x*)` for `t = 0..=iterations_run`, when tracking with a known truth.
    pub dist_trace: Vec<f64>,
    /// `‖ |A xᵗ| − y ‖` for `t = 0..=iterations_run`, when tracking.
    pub residual_trace: Vec<f64>,
    pub iterations_run: usize,
}

impl<T: Scalar> SolverReport<T> {
    /// Successive ratios `dist(x^{t+1}) / dist(x^t)` (empirical contraction).
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.dist_trace
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// `sign(A x)` with `sign(0) = 0`, as a vector.
pub fn phase_estimate<T: Scalar>(a: &DenseMatrix<T>, x: &Signal<T>) -> Result<Vec<T>> {
    if x.len() != a.cols() {
        return Err(Error::dims("phase_estimate", a.cols(), x.len()));
    }
    let ax = a.matvec_on_support(x.values(), &x.nonzero_indices())?;
    Ok(ax.into_iter().map(sign_of).collect())
}

/// Sparse phase retrieval: spectral initialization then alternating descent.
pub fn copram<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    cfg: &SolverConfig,
    x_true: Option<&Signal<T>>,
) -> Result<SolverReport<T>> {
    let SolverMode::Plain { s } = cfg.mode else {
        return Err(Error::config("mode", "copram requires plain sparsity mode"));
    };
    check_inputs(a, y, cfg)?;
    let init = copram_init(a, y, s)?;
    alternating_descent(a, y, init.x0, cfg, x_true, &PhaseSource::Estimated)
}

/// Block-sparse phase retrieval with block marginals and block CoSaMP.
pub fn block_copram<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    cfg: &SolverConfig,
    x_true: Option<&Signal<T>>,
) -> Result<SolverReport<T>> {
    let SolverMode::Block { b, k } = cfg.mode else {
        return Err(Error::config(
            "mode",
            "block_copram requires block sparsity mode",
        ));
    };
    check_inputs(a, y, cfg)?;
    let structure = BlockStructure::new(a.cols(), b)?;
    let init = block_copram_init(a, y, &structure, k)?;
    alternating_descent(a, y, init.x0, cfg, x_true, &PhaseSource::Estimated)
}

/// Dispatches on `cfg.mode`.
pub fn solve<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    cfg: &SolverConfig,
    x_true: Option<&Signal<T>>,
) -> Result<SolverReport<T>> {
    match cfg.mode {
        SolverMode::Plain { .. } => copram(a, y, cfg, x_true),
        SolverMode::Block { .. } => block_copram(a, y, cfg, x_true),
    }
}

fn check_inputs<T: Scalar>(a: &DenseMatrix<T>, y: &[T], cfg: &SolverConfig) -> Result<()> {
    if y.len() != a.rows() {
        return Err(Error::dims("copram", a.rows(), y.len()));
    }
    cfg.validate(a.cols())
}

/// The descent stage from an explicit starting point.
pub fn alternating_descent<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    x0: Signal<T>,
    cfg: &SolverConfig,
    x_true: Option<&Signal<T>>,
    phases: &PhaseSource<T>,
) -> Result<SolverReport<T>> {
    check_inputs(a, y, cfg)?;
    let (m, n) = (a.rows(), a.cols());
    if x0.len() != n {
        return Err(Error::dims("alternating_descent", n, x0.len()));
    }
    if let Some(xt) = x_true {
        if xt.len() != n {
            return Err(Error::dims("alternating_descent", n, xt.len()));
        }
    }
    if let PhaseSource::Fixed(p) = phases {
        if p.len() != m {
            return Err(Error::dims("alternating_descent", m, p.len()));
        }
    }
    let structure;
    let model = match cfg.mode {
        SolverMode::Plain { s } => SparsityModel::Sparse { s },
        SolverMode::Block { b, k } => {
            structure = BlockStructure::new(n, b)?;
            SparsityModel::Blocks {
                structure: &structure,
                k,
            }
        }
    };

    let inv_sqrt_m = T::one() / T::of_usize(m).sqrt();
    let phi = a.scaled(inv_sqrt_m);
    let mut report = SolverReport {
        x_final: x0,
        dist_trace: Vec::new(),
        residual_trace: Vec::new(),
        iterations_run: 0,
    };
    let record = |rep: &mut SolverReport<T>| -> Result<()> {
        if !cfg.track_trace {
            return Ok(());
        }
        let x = &rep.x_final;
        if let Some(xt) = x_true {
            rep.dist_trace
                .push(dist_op(x.values(), xt.values())?.as_f64());
        }
        let ax = a.matvec_on_support(x.values(), &x.nonzero_indices())?;
        let res = ax
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (&p, &q)| {
                acc + (p.abs() - q) * (p.abs() - q)
            })
            .sqrt();
        rep.residual_trace.push(res.as_f64());
        Ok(())
    };
    record(&mut report)?;

    for _ in 0..cfg.outer_iters {
        let p = match phases {
            PhaseSource::Estimated => phase_estimate(a, &report.x_final)?,
            PhaseSource::Fixed(p) => p.clone(),
        };
        let u: Vec<T> = p
            .iter()
            .zip(y)
            .map(|(&pi, &yi)| pi * yi * inv_sqrt_m)
            .collect();
        let next = cosamp_with_state(&phi, &u, model, &report.x_final, &cfg.cosamp)?.estimate;
        let step: Vec<T> = next
            .values()
            .iter()
            .zip(report.x_final.values())
            .map(|(&a, &b)| a - b)
            .collect();
        let step = norm2(&step).as_f64();
        report.x_final = next;
        report.iterations_run += 1;
        record(&mut report)?;
        if step <= cfg.stall_tol {
            break;
        }
    }
    Ok(report)
}

/// Uniform block parameters that cover a clustered-sparse signal with `s`
/// nonzeros in at most `k_clusters` runs: block sparsity `3·k_clusters` and
/// block length `ceil(s / (3·k_clusters))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformBlockParams {
    pub block_len: usize,
    pub block_sparsity: usize,
}

pub fn clustered_sparsity_frontend(s: usize, k_clusters: usize) -> Result<UniformBlockParams> {
    if k_clusters == 0 || s < k_clusters {
        return Err(Error::contract(
            "clustered_sparsity_frontend",
            format!("need 1 <= k_clusters <= s, got s={s}, k_clusters={k_clusters}"),
        ));
    }
    let block_sparsity = 3 * k_clusters;
    Ok(UniformBlockParams {
        block_len: s.div_ceil(block_sparsity),
        block_sparsity,
    })
}

/// Smallest length `>= n` divisible by `b` (zero padding for non-uniform blocks).
pub fn padded_length(n: usize, b: usize) -> usize {
    n.div_ceil(b) * b
}
