//! Warm-started CoSaMP and its block-sparse (model-based) variant.
//!
//! Both variants share one loop; they differ only in how a support is chosen
//! from a score vector (top entries vs. top blocks by `ℓ₂` norm).

use crate::error::{Error, Result};
use crate::init::top_indices;
use crate::linalg::{least_squares_on_columns, norm2, DenseMatrix};
use crate::model::{BlockStructure, Signal};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosampConfig {
    /// Inner iteration cap `L`.
    pub max_inner_iters: usize,
    /// Early exit once `‖r‖ ≤ residual_tol·‖u‖`.
    pub residual_tol: f64,
}

impl Default for CosampConfig {
    fn default() -> Self {
        Self {
            max_inner_iters: 5,
            residual_tol: 1e-10,
        }
    }
}

impl CosampConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_inner_iters == 0 {
            return Err(Error::config("inner-iters", "must be at least 1"));
        }
        if !(self.residual_tol >= 0.0) {
            return Err(Error::config("residual_tol", "must be nonnegative"));
        }
        Ok(())
    }
}

/// State after the last inner iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CosampState<T> {
    pub estimate: Signal<T>,
    /// `u − Φ·estimate`.
    pub residual: Vec<T>,
    /// Inner iterations executed before the final restricted solve.
    pub inner_iters: usize,
    /// `‖r‖` at entry and after each inner iteration.
    pub residual_norms: Vec<T>,
}

/// Structured sparsity model used for support selection.
#[derive(Debug, Clone, Copy)]
pub enum SparsityModel<'a> {
    Sparse {
        s: usize,
    },
    Blocks {
        structure: &'a BlockStructure,
        k: usize,
    },
}

impl SparsityModel<'_> {
    fn check(&self, n: usize) -> Result<()> {
        match *self {
            SparsityModel::Sparse { s } => {
                if s == 0 || s > n {
                    return Err(Error::contract(
                        "cosamp",
                        format!("need 1 <= s <= n, got s={s}, n={n}"),
                    ));
                }
            }
            SparsityModel::Blocks { structure, k } => {
                if structure.len() != n {
                    return Err(Error::dims("block_cosamp", n, structure.len()));
                }
                if k == 0 || k > structure.block_count() {
                    return Err(Error::contract(
                        "block_cosamp",
                        format!("need 1 <= k <= {}, got k={k}", structure.block_count()),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Model support of the `factor`-fold model best matching `scores`
    /// restricted to `candidates` (ascending coordinates).
    fn select<T: Scalar>(&self, scores: &[T], candidates: &[usize], factor: usize) -> Vec<usize> {
        match *self {
            SparsityModel::Sparse { s } => {
                let mags: Vec<T> = candidates.iter().map(|&j| scores[j].abs()).collect();
                top_indices(&mags, factor * s)
                    .into_iter()
                    .map(|p| candidates[p])
                    .collect()
            }
            SparsityModel::Blocks { structure, k } => {
                let blocks = structure.blocks_of(candidates);
                let norms: Vec<T> = blocks
                    .iter()
                    .map(|&blk| {
                        let r = structure.block_range(blk);
                        if structure.block_len() == 1 {
                            scores[r.start].abs()
                        } else {
                            scores[r].iter().map(|&v| v * v).sum::<T>().sqrt()
                        }
                    })
                    .collect();
                let chosen: Vec<usize> = top_indices(&norms, factor * k)
                    .into_iter()
                    .map(|p| blocks[p])
                    .collect();
                structure.coords_of_blocks(&chosen)
            }
        }
    }
}

/// Sparse CoSaMP on the (already `1/√m`-scaled) system `Φ w ≈ u`, warm
/// started at `x_init`. Output has at most `s` nonzeros.
pub fn cosamp<T: Scalar>(
    phi: &DenseMatrix<T>,
    u: &[T],
    s: usize,
    x_init: &Signal<T>,
    cfg: &CosampConfig,
) -> Result<Signal<T>> {
    Ok(cosamp_with_state(phi, u, SparsityModel::Sparse { s }, x_init, cfg)?.estimate)
}

/// Model-based CoSaMP for `k`-block-sparse signals.
pub fn block_cosamp<T: Scalar>(
    phi: &DenseMatrix<T>,
    u: &[T],
    structure: &BlockStructure,
    k: usize,
    x_init: &Signal<T>,
    cfg: &CosampConfig,
) -> Result<Signal<T>> {
    Ok(cosamp_with_state(phi, u, SparsityModel::Blocks { structure, k }, x_init, cfg)?.estimate)
}

/// Shared CoSaMP loop; returns the final state including the residual trace.
pub fn cosamp_with_state<T: Scalar>(
    phi: &DenseMatrix<T>,
    u: &[T],
    model: SparsityModel<'_>,
    x_init: &Signal<T>,
    cfg: &CosampConfig,
) -> Result<CosampState<T>> {
    let (m, n) = (phi.rows(), phi.cols());
    if u.len() != m {
        return Err(Error::dims("cosamp", m, u.len()));
    }
    if x_init.len() != n {
        return Err(Error::dims("cosamp", n, x_init.len()));
    }
    model.check(n)?;
    cfg.validate()?;

    // Project the warm start onto the model.
    let nz = x_init.nonzero_indices();
    let mut support = model.select(x_init.values(), &nz, 1);
    let mut x = vec![T::zero(); n];
    for &j in &support {
        x[j] = x_init.values()[j];
    }
    support.retain(|&j| x[j] != T::zero());

    let stop = T::of(cfg.residual_tol) * norm2(u);
    let mut r = residual(phi, u, &x, &support)?;
    let mut rnorm = norm2(&r);
    let mut residual_norms = vec![rnorm];
    let mut l = 0;
    while l < cfg.max_inner_iters && rnorm > stop {
        l += 1;
        let proxy = phi.matvec_transposed(&r)?;
        let all: Vec<usize> = (0..n).collect();
        let omega = model.select(&proxy, &all, 2);
        let gamma = union_sorted(&omega, &support);
        let w = least_squares_on_columns(phi, &gamma, u)?;
        let mut w_full = vec![T::zero(); n];
        for (&j, &wj) in gamma.iter().zip(&w) {
            w_full[j] = wj;
        }
        support = model.select(&w_full, &gamma, 1);
        x.iter_mut().for_each(|v| *v = T::zero());
        for &j in &support {
            x[j] = w_full[j];
        }
        r = residual(phi, u, &x, &support)?;
        rnorm = norm2(&r);
        residual_norms.push(rnorm);
    }

    // Final restricted solve on the pruned support.
    x.iter_mut().for_each(|v| *v = T::zero());
    let w = least_squares_on_columns(phi, &support, u)?;
    for (&j, &wj) in support.iter().zip(&w) {
        x[j] = wj;
    }
    let r = residual(phi, u, &x, &support)?;
    Ok(CosampState {
        estimate: Signal::new(x, support)?,
        residual: r,
        inner_iters: l,
        residual_norms,
    })
}

fn residual<T: Scalar>(
    phi: &DenseMatrix<T>,
    u: &[T],
    x: &[T],
    support: &[usize],
) -> Result<Vec<T>> {
    let px = phi.matvec_on_support(x, support)?;
    Ok(u.iter().zip(px).map(|(&a, b)| a - b).collect())
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) if p == q => {
                i += 1;
                j += 1;
                p
            }
            (Some(&p), Some(&q)) if p < q => {
                i += 1;
                p
            }
            (Some(_), Some(&q)) => {
                j += 1;
                q
            }
            (Some(&p), None) => {
                i += 1;
                p
            }
            (None, Some(&q)) => {
                j += 1;
                q
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}
