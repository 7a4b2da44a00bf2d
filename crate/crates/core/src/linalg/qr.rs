//! Minimum-norm least squares through Householder QR with column pivoting.
//!
//! Full column rank systems are solved by back substitution on `R`. When the
//! numerical rank `r` is below the column count (rank deficient or
//! underdetermined), the trapezoid `[R11 R12]` is reduced once more by an
//! LQ step, giving the complete orthogonal decomposition and hence the
//! minimum-norm solution.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::Scalar;

/// Minimum-norm solution of `min_w ‖Φ w − u‖₂`.
pub fn least_squares<T: Scalar>(phi: &DenseMatrix<T>, u: &[T]) -> Result<Vec<T>> {
    let cols: Vec<usize> = (0..phi.cols()).collect();
    least_squares_on_columns(phi, &cols, u)
}

/// Same as [`least_squares`] for the column submatrix `Φ[:, columns]`;
/// the result is indexed like `columns`.
pub fn least_squares_on_columns<T: Scalar>(
    phi: &DenseMatrix<T>,
    columns: &[usize],
    u: &[T],
) -> Result<Vec<T>> {
    let m = phi.rows();
    if u.len() != m {
        return Err(Error::dims("least_squares", m, u.len()));
    }
    if let Some(&bad) = columns.iter().find(|&&c| c >= phi.cols()) {
        return Err(Error::contract(
            "least_squares",
            format!("column {bad} out of range for {} columns", phi.cols()),
        ));
    }
    let t = columns.len();
    if t == 0 {
        return Ok(Vec::new());
    }

    // Column-major working copy of the selected columns.
    let mut a = vec![T::zero(); m * t];
    for i in 0..m {
        let row = phi.row(i);
        for (k, &c) in columns.iter().enumerate() {
            a[k * m + i] = row[c];
        }
    }
    let mut rhs = u.to_vec();
    let mut perm: Vec<usize> = (0..t).collect();
    let mut norms: Vec<T> = (0..t).map(|k| col_sq(&a[k * m..(k + 1) * m])).collect();
    let mut ref_norms = norms.clone();
    let mut rdiag = vec![T::zero(); t];

    let kmax = m.min(t);
    let rank_tol = T::epsilon() * T::of_usize(m.max(t));
    let mut lead = T::zero();
    let mut rank = 0;
    for k in 0..kmax {
        let p = (k..t).fold(k, |best, j| if norms[j] > norms[best] { j } else { best });
        if p != k {
            for i in 0..m {
                a.swap(k * m + i, p * m + i);
            }
            norms.swap(k, p);
            ref_norms.swap(k, p);
            perm.swap(k, p);
        }
        let colk = &a[k * m + k..(k + 1) * m];
        let xnorm = col_sq(colk).sqrt();
        if k == 0 {
            lead = xnorm;
        }
        if xnorm <= rank_tol * lead || xnorm == T::zero() {
            break;
        }
        let alpha = if colk[0] > T::zero() { -xnorm } else { xnorm };
        // v = x - alpha e1, stored in place.
        a[k * m + k] = a[k * m + k] - alpha;
        let vnorm_sq = col_sq(&a[k * m + k..(k + 1) * m]);
        rdiag[k] = alpha;
        rank = k + 1;
        if vnorm_sq == T::zero() {
            continue;
        }
        let beta = T::of(2.0) / vnorm_sq;

        let (head, tail) = a.split_at_mut((k + 1) * m);
        let v = &head[k * m + k..(k + 1) * m];
        for j in (k + 1)..t {
            let col = &mut tail[(j - k - 1) * m + k..(j - k) * m];
            reflect(v, beta, col);
            // Downdate the trailing column norm; recompute on cancellation.
            let top = col[0];
            norms[j] = norms[j] - top * top;
            if norms[j] <= T::epsilon().sqrt() * ref_norms[j] {
                norms[j] = col_sq(&col[1..]);
                ref_norms[j] = norms[j];
            }
        }
        reflect(v, beta, &mut rhs[k..]);
    }

    let mut z = vec![T::zero(); t];
    if rank == t {
        for k in (0..t).rev() {
            let mut acc = rhs[k];
            for j in (k + 1)..t {
                acc = acc - a[j * m + k] * z[j];
            }
            z[k] = acc / rdiag[k];
        }
    } else if rank > 0 {
        z = min_norm_trapezoid(&a, m, t, rank, &rdiag, &rhs[..rank]);
    }

    let mut out = vec![T::zero(); t];
    for (k, &p) in perm.iter().enumerate() {
        out[p] = z[k];
    }
    Ok(out)
}

/// Minimum-norm solution of `[R11 R12] z = c` where `R11` is `r×r` upper
/// triangular, via Householder QR of the transpose.
fn min_norm_trapezoid<T: Scalar>(
    a: &[T],
    m: usize,
    t: usize,
    r: usize,
    rdiag: &[T],
    c: &[T],
) -> Vec<T> {
    // bt = [R11 R12]ᵀ, t×r, column-major (column i holds row i of the trapezoid).
    let mut bt = vec![T::zero(); t * r];
    for i in 0..r {
        for j in i..t {
            bt[i * t + j] = if i == j { rdiag[i] } else { a[j * m + i] };
        }
    }
    let mut reflectors: Vec<(Vec<T>, T)> = Vec::with_capacity(r);
    let mut r2diag = vec![T::zero(); r];
    for k in 0..r {
        let colk = &bt[k * t + k..(k + 1) * t];
        let xnorm = col_sq(colk).sqrt();
        let alpha = if colk[0] > T::zero() { -xnorm } else { xnorm };
        let mut v = colk.to_vec();
        v[0] = v[0] - alpha;
        let vsq = col_sq(&v);
        r2diag[k] = alpha;
        let beta = if vsq == T::zero() {
            T::zero()
        } else {
            T::of(2.0) / vsq
        };
        for j in (k + 1)..r {
            reflect(&v, beta, &mut bt[j * t + k..(j + 1) * t]);
        }
        reflectors.push((v, beta));
    }
    // R2ᵀ g = c by forward substitution; R2[i][j] = bt[j*t + i] for i < j.
    let mut g = vec![T::zero(); t];
    for i in 0..r {
        let mut acc = c[i];
        for (j, gj) in g.iter().enumerate().take(i) {
            acc = acc - bt[i * t + j] * *gj;
        }
        g[i] = acc / r2diag[i];
    }
    // z = Q2 [g; 0] = H_0 H_1 … H_{r-1} [g; 0].
    for k in (0..r).rev() {
        let (v, beta) = &reflectors[k];
        reflect(v, *beta, &mut g[k..]);
    }
    g
}

#[inline]
fn col_sq<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// `x ← (I − β v vᵀ) x`.
#[inline]
fn reflect<T: Scalar>(v: &[T], beta: T, x: &mut [T]) {
    let s = v
        .iter()
        .zip(x.iter())
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
        * beta;
    if s != T::zero() {
        for (xi, &vi) in x.iter_mut().zip(v) {
            *xi = *xi - s * vi;
        }
    }
}
