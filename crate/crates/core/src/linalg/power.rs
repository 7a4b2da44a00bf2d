use super::matrix::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::Scalar;

/// Number of times the normalized operator is squared before iterating.
/// Power iteration then runs on `M^(2^SQUARINGS)`, which shares the
/// eigenvectors of `M` and has the spectral gap raised to that power.
const SQUARINGS: usize = 6;

/// Settings for [`top_singular_vector`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    /// Stop once `‖Mv − (vᵀMv)v‖ ≤ tol·‖M‖_F`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

struct Run<T> {
    v: Vec<T>,
    rayleigh: T,
    residual: T,
    converged: bool,
}

/// Unit-norm leading eigenvector of a symmetric PSD matrix, which is also its
/// top singular vector. The result is sign-canonicalized so that its
/// largest-magnitude entry is positive.
///
/// Iteration starts from the normalized all-ones vector and, independently,
/// from a fixed perturbed pattern; the run with the larger Rayleigh quotient
/// wins, so an all-ones start orthogonal to the leading eigenvector cannot
/// lock onto a lesser one. Ties keep the all-ones run.
pub fn top_singular_vector<T: Scalar>(
    m: &DenseMatrix<T>,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::contract(
            "top_singular_vector",
            format!("matrix must be square, got {}x{}", m.rows(), m.cols()),
        ));
    }
    if !(tol > T::zero()) {
        return Err(Error::contract(
            "top_singular_vector",
            "tol must be positive",
        ));
    }
    let n = m.rows();
    let fro = m.frobenius_norm();
    let sym_tol = T::of(1e-9).max(T::epsilon() * T::of(64.0)) * fro.max(T::one());
    for i in 0..n {
        for j in (i + 1)..n {
            if (m.get(i, j) - m.get(j, i)).abs() > sym_tol {
                return Err(Error::contract(
                    "top_singular_vector",
                    "matrix is not symmetric",
                ));
            }
        }
    }

    let ones = vec![T::one() / T::of_usize(n).sqrt(); n];
    if fro == T::zero() {
        return Ok(canonical_sign(ones));
    }
    // Tolerances below the working precision are unreachable.
    let tol = tol.max(T::epsilon() * T::of(16.0) * T::of_usize(n).sqrt());
    let accel = accelerated(m, fro);

    let golden = 0.618_033_988_749_894_9_f64;
    let mut perturbed: Vec<T> = (0..n)
        .map(|j| T::of(0.5 + ((j + 1) as f64 * golden).fract()))
        .collect();
    let pn = norm2(&perturbed);
    perturbed.iter_mut().for_each(|x| *x = *x / pn);

    let first = iterate(m, &accel, ones, tol * fro, max_iter);
    let second = iterate(m, &accel, perturbed, tol * fro, max_iter);

    let best = match (first.converged, second.converged) {
        (true, true) => {
            if second.rayleigh > first.rayleigh + tol * fro {
                second
            } else {
                first
            }
        }
        (true, false) => first,
        (false, true) => second,
        (false, false) => {
            return Err(Error::Convergence {
                op: "top_singular_vector",
                iterations: max_iter,
                residual: (first.residual.min(second.residual) / fro).as_f64(),
            })
        }
    };
    Ok(canonical_sign(best.v))
}

/// `(M/‖M‖_F)^(2^SQUARINGS)`, renormalized after each squaring.
fn accelerated<T: Scalar>(m: &DenseMatrix<T>, fro: T) -> DenseMatrix<T> {
    let mut p = m.scaled(T::one() / fro);
    for _ in 0..SQUARINGS {
        let sq = p.matmul(&p).expect("square matrix");
        let f = sq.frobenius_norm();
        if f == T::zero() || !f.is_finite() {
            break;
        }
        p = sq.scaled(T::one() / f);
    }
    p
}

fn iterate<T: Scalar>(
    m: &DenseMatrix<T>,
    op: &DenseMatrix<T>,
    mut v: Vec<T>,
    abs_tol: T,
    max_iter: usize,
) -> Run<T> {
    let mut best = residual(m, &v);
    if best.1 <= abs_tol {
        return Run {
            v,
            rayleigh: best.0,
            residual: best.1,
            converged: true,
        };
    }
    for _ in 0..max_iter {
        let w = op.matvec(&v).expect("square matrix");
        let nw = norm2(&w);
        if nw == T::zero() || !nw.is_finite() {
            break;
        }
        v = w.into_iter().map(|x| x / nw).collect();
        best = residual(m, &v);
        if best.1 <= abs_tol {
            return Run {
                v,
                rayleigh: best.0,
                residual: best.1,
                converged: true,
            };
        }
    }
    Run {
        v,
        rayleigh: best.0,
        residual: best.1,
        converged: false,
    }
}

/// Rayleigh quotient and eigen-residual norm of a unit vector.
fn residual<T: Scalar>(m: &DenseMatrix<T>, v: &[T]) -> (T, T) {
    let mv = m.matvec(v).expect("square matrix");
    let lambda = dot(v, &mv);
    let r = mv
        .iter()
        .zip(v)
        .fold(T::zero(), |acc, (&a, &b)| {
            let d = a - lambda * b;
            acc + d * d
        })
        .sqrt();
    (lambda, r)
}

fn canonical_sign<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    let mut lead = 0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > v[lead].abs() {
            lead = j;
        }
    }
    if v[lead] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}
