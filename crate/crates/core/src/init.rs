//! Spectral initialization: power estimate, (block) marginals, coarse support
//! selection and the top eigenvector of the truncated weighted correlation
//! matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{top_singular_vector, DenseMatrix, PowerIteration};
use crate::model::{BlockStructure, Signal};
use crate::Scalar;

/// Per-coordinate marginals `M_jj = (1/m) Σ_i y_i² a_ij²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector<T>(Vec<T>);

/// Per-block `ℓ₂` norms of the coordinate marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMarginalVector<T>(Vec<T>);

impl<T: Scalar> MarginalVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::contract(
                "MarginalVector",
                "entries must be nonnegative",
            ));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }
}

impl<T: Scalar> BlockMarginalVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::contract(
                "BlockMarginalVector",
                "entries must be nonnegative",
            ));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitEstimate<T> {
    /// `φ v`, supported on `support`.
    pub x0: Signal<T>,
    /// Selected coordinates, ascending.
    pub support: Vec<usize>,
    pub phi: T,
}

/// `φ = sqrt((1/m) Σ y_i²)`.
pub fn signal_power_estimate<T: Scalar>(y: &[T]) -> Result<T> {
    if y.is_empty() {
        return Err(Error::contract(
            "signal_power_estimate",
            "empty measurement vector",
        ));
    }
    let sum: T = y.iter().map(|&v| v * v).sum();
    Ok((sum / T::of_usize(y.len())).sqrt())
}

/// Rows are accumulated in order, so the result is bit-stable.
pub fn marginals<T: Scalar>(a: &DenseMatrix<T>, y: &[T]) -> Result<MarginalVector<T>> {
    if y.len() != a.rows() {
        return Err(Error::dims("marginals", a.rows(), y.len()));
    }
    let mut acc = vec![T::zero(); a.cols()];
    for (i, &yi) in y.iter().enumerate() {
        let w = yi * yi;
        if w == T::zero() {
            continue;
        }
        for (o, &aij) in acc.iter_mut().zip(a.row(i)) {
            *o = *o + w * aij * aij;
        }
    }
    let m = T::of_usize(a.rows());
    Ok(MarginalVector(acc.into_iter().map(|v| v / m).collect()))
}

/// Descending by score, ascending by index on ties.
fn rank_order<T: Scalar>(scores: &[T], a: usize, b: usize) -> Ordering {
    scores[b]
        .partial_cmp(&scores[a])
        .unwrap_or(Ordering::Equal)
        .then(a.cmp(&b))
}

/// Indices of the `count` largest scores (lowest index wins ties), ascending.
pub(crate) fn top_indices<T: Scalar>(scores: &[T], count: usize) -> Vec<usize> {
    let count = count.min(scores.len());
    if count == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    if count < idx.len() {
        idx.select_nth_unstable_by(count - 1, |&a, &b| rank_order(scores, a, b));
        idx.truncate(count);
    }
    idx.sort_unstable();
    idx
}

/// Coordinates of the `s` largest marginals.
pub fn top_s_support<T: Scalar>(marg: &MarginalVector<T>, s: usize) -> Result<Vec<usize>> {
    if s > marg.0.len() {
        return Err(Error::contract(
            "top_s_support",
            format!("s={s} exceeds signal length {}", marg.0.len()),
        ));
    }
    Ok(top_indices(&marg.0, s))
}

/// `M_{j_b} = sqrt(Σ_{j ∈ j_b} M_jj²)`; blocks of length one pass through unchanged.
pub fn block_marginals<T: Scalar>(
    marg: &MarginalVector<T>,
    structure: &BlockStructure,
) -> Result<BlockMarginalVector<T>> {
    if marg.0.len() != structure.len() {
        return Err(Error::dims(
            "block_marginals",
            structure.len(),
            marg.0.len(),
        ));
    }
    if structure.block_len() == 1 {
        return Ok(BlockMarginalVector(marg.0.clone()));
    }
    Ok(BlockMarginalVector(
        marg.0
            .chunks_exact(structure.block_len())
            .map(|c| c.iter().map(|&v| v * v).sum::<T>().sqrt())
            .collect(),
    ))
}

/// Coordinates of the `k` blocks with the largest block marginals.
pub fn top_k_block_support<T: Scalar>(
    bm: &BlockMarginalVector<T>,
    k: usize,
    structure: &BlockStructure,
) -> Result<Vec<usize>> {
    if bm.0.len() != structure.block_count() {
        return Err(Error::dims(
            "top_k_block_support",
            structure.block_count(),
            bm.0.len(),
        ));
    }
    if k > structure.block_count() {
        return Err(Error::contract(
            "top_k_block_support",
            format!("k={k} exceeds block count {}", structure.block_count()),
        ));
    }
    Ok(structure.coords_of_blocks(&top_indices(&bm.0, k)))
}

/// Top eigenvector of `M_Ŝ = (1/m) Σ_i y_i² a_{i,Ŝ} a_{i,Ŝ}ᵀ`, embedded at the
/// support and scaled by `phi`.
pub fn spectral_estimate<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    support: &[usize],
    phi: T,
) -> Result<InitEstimate<T>> {
    if y.len() != a.rows() {
        return Err(Error::dims("spectral_estimate", a.rows(), y.len()));
    }
    if support.is_empty() {
        return Err(Error::contract(
            "spectral_estimate",
            "support must be non-empty",
        ));
    }
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if let Some(&bad) = support.iter().find(|&&j| j >= a.cols()) {
        return Err(Error::contract(
            "spectral_estimate",
            format!("support index {bad} out of range"),
        ));
    }

    let t = support.len();
    let mut corr = vec![T::zero(); t * t];
    let mut gathered = vec![T::zero(); t];
    for (i, &yi) in y.iter().enumerate() {
        let w = yi * yi;
        if w == T::zero() {
            continue;
        }
        let row = a.row(i);
        for (g, &j) in gathered.iter_mut().zip(&support) {
            *g = row[j];
        }
        for p in 0..t {
            let wp = w * gathered[p];
            for q in p..t {
                corr[p * t + q] = corr[p * t + q] + wp * gathered[q];
            }
        }
    }
    let m = T::of_usize(a.rows());
    for p in 0..t {
        for q in p..t {
            let v = corr[p * t + q] / m;
            corr[p * t + q] = v;
            corr[q * t + p] = v;
        }
    }
    let corr = DenseMatrix::from_row_major(t, t, corr)?;
    let cfg = PowerIteration::default();
    let v = top_singular_vector(&corr, T::of(cfg.tol), cfg.max_iter)?;

    let mut values = vec![T::zero(); a.cols()];
    for (&j, &vj) in support.iter().zip(&v) {
        values[j] = phi * vj;
    }
    Ok(InitEstimate {
        x0: Signal::new(values, support.clone())?,
        support,
        phi,
    })
}

/// Sparse spectral initialization.
pub fn copram_init<T: Scalar>(a: &DenseMatrix<T>, y: &[T], s: usize) -> Result<InitEstimate<T>> {
    if s == 0 {
        return Err(Error::contract("copram_init", "sparsity must be positive"));
    }
    let phi = signal_power_estimate(y)?;
    let marg = marginals(a, y)?;
    let support = top_s_support(&marg, s)?;
    spectral_estimate(a, y, &support, phi)
}

/// Block-sparse spectral initialization.
pub fn block_copram_init<T: Scalar>(
    a: &DenseMatrix<T>,
    y: &[T],
    structure: &BlockStructure,
    k: usize,
) -> Result<InitEstimate<T>> {
    if structure.len() != a.cols() {
        return Err(Error::dims("block_copram_init", a.cols(), structure.len()));
    }
    if k == 0 {
        return Err(Error::contract(
            "block_copram_init",
            "block sparsity must be positive",
        ));
    }
    let phi = signal_power_estimate(y)?;
    let marg = marginals(a, y)?;
    let bm = block_marginals(&marg, structure)?;
    let support = top_k_block_support(&bm, k, structure)?;
    spectral_estimate(a, y, &support, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::dist_op;
    use crate::model::{
        gen_block_sparse_signal, gen_measurement_matrix, gen_sparse_signal, measure,
    };
    use crate::seed::derive_seed;

    fn mv(v: &[f64]) -> MarginalVector<f64> {
        MarginalVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn power_estimate() {
        assert_eq!(signal_power_estimate(&[2.0, 2.0, 2.0]).unwrap(), 2.0);
        assert_eq!(signal_power_estimate(&[0.0; 4]).unwrap(), 0.0);
        assert!(signal_power_estimate::<f64>(&[]).is_err());
    }

    #[test]
    fn marginals_small() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(marginals(&a, &[1.0]).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(marginals(&a, &[0.0]).unwrap().values(), &[0.0, 0.0]);
        assert!(marginals(&a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn marginals_match_direct_sum() {
        let a: DenseMatrix<f64> = gen_measurement_matrix(30, 7, 1).unwrap();
        let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let got = marginals(&a, &y).unwrap();
        for j in 0..7 {
            let mut want = 0.0;
            for i in 0..30 {
                want += y[i] * y[i] * a.get(i, j) * a.get(i, j);
            }
            assert!((got.values()[j] - want / 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_row_permutation_and_sign_invariance() {
        let a: DenseMatrix<f64> = gen_measurement_matrix(40, 9, 4).unwrap();
        let x: Signal<f64> = gen_sparse_signal(9, 3, 5).unwrap();
        let y = measure(&a, &x).unwrap();
        let base = marginals(&a, &y).unwrap();
        assert_eq!(
            base,
            marginals(&a, &measure(&a, &x.scaled(-1.0)).unwrap()).unwrap()
        );
        let order: Vec<usize> = (0..40).rev().collect();
        let rows: Vec<Vec<f64>> = order.iter().map(|&i| a.row(i).to_vec()).collect();
        let pa = DenseMatrix::from_rows(&rows).unwrap();
        let py: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        for (p, q) in base
            .values()
            .iter()
            .zip(marginals(&pa, &py).unwrap().values())
        {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn top_s_examples() {
        assert_eq!(top_s_support(&mv(&[5.0, 1.0, 3.0]), 2).unwrap(), vec![0, 2]);
        assert_eq!(top_s_support(&mv(&[2.0; 4]), 2).unwrap(), vec![0, 1]);
        assert_eq!(
            top_s_support(&mv(&[1.0, 1.0 + 1e-15, 1.0]), 1).unwrap(),
            vec![1]
        );
        assert!(top_s_support(&mv(&[1.0]), 2).is_err());
    }

    #[test]
    fn block_marginal_examples() {
        let st1 = BlockStructure::new(3, 1).unwrap();
        let m = mv(&[0.3, 2.0, 7.0]);
        assert_eq!(block_marginals(&m, &st1).unwrap().values(), m.values());
        let st2 = BlockStructure::new(4, 2).unwrap();
        let bm = block_marginals(&mv(&[3.0, 4.0, 0.0, 0.0]), &st2).unwrap();
        assert_eq!(bm.values(), &[5.0, 0.0]);
        assert!(block_marginals(&m, &st2).is_err());
    }

    #[test]
    fn top_k_block_examples() {
        let st = BlockStructure::new(15, 5).unwrap();
        let bm = BlockMarginalVector::new(vec![2.0, 9.0, 4.0]).unwrap();
        assert_eq!(
            top_k_block_support(&bm, 1, &st).unwrap(),
            (5..10).collect::<Vec<_>>()
        );
        assert_eq!(
            top_k_block_support(&bm, 3, &st).unwrap(),
            (0..15).collect::<Vec<_>>()
        );
        assert!(top_k_block_support(&bm, 4, &st).is_err());
        let st1 = BlockStructure::new(3, 1).unwrap();
        let m = mv(&[5.0, 1.0, 3.0]);
        let b1 = block_marginals(&m, &st1).unwrap();
        assert_eq!(
            top_k_block_support(&b1, 2, &st1).unwrap(),
            top_s_support(&m, 2).unwrap()
        );
    }

    #[test]
    fn one_dimensional_spectral_estimate() {
        let a = DenseMatrix::from_rows(&[vec![2.0], vec![-1.0]]).unwrap();
        let y = [1.0, 3.0];
        let est = spectral_estimate(&a, &y, &[0], 0.7).unwrap();
        assert_eq!(est.x0.values(), &[0.7]);
        assert!(spectral_estimate(&a, &y, &[], 0.7).is_err());
    }

    #[test]
    fn spectral_estimate_e1() {
        let trials = 40;
        let mut good = 0;
        for t in 0..trials {
            let a: DenseMatrix<f64> =
                gen_measurement_matrix(5000, 20, derive_seed(1, "a", &[t])).unwrap();
            let mut xv = vec![0.0; 20];
            xv[0] = 1.0;
            let x = Signal::new(xv, vec![0]).unwrap();
            let y = measure(&a, &x).unwrap();
            let phi = signal_power_estimate(&y).unwrap();
            let est = spectral_estimate(&a, &y, &[0], phi).unwrap();
            assert!((est.x0.norm() - phi).abs() < 1e-10);
            if dist_op(est.x0.values(), x.values()).unwrap() <= 0.15 {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.95 * trials as f64);
    }

    #[test]
    fn zero_measurements_give_zero_start() {
        let a: DenseMatrix<f64> = gen_measurement_matrix(10, 6, 3).unwrap();
        let est = copram_init(&a, &[0.0; 10], 2).unwrap();
        assert_eq!(est.support, vec![0, 1]);
        assert_eq!(est.x0.nonzero_count(), 0);
    }

    #[test]
    fn init_on_scaled_identity_selects_first_coordinate() {
        // Rows a_i = √n e_i: M_jj = n y_j² / m, and only y_0 is nonzero.
        let n = 6;
        let a = DenseMatrix::<f64>::identity(n).scaled((n as f64).sqrt());
        let mut xv = vec![0.0; n];
        xv[0] = 1.0;
        let y = measure(&a, &Signal::new(xv, vec![0]).unwrap()).unwrap();
        let marg = marginals(&a, &y).unwrap();
        for j in 0..n {
            let want: f64 = (0..n)
                .map(|i| y[i] * y[i] * a.get(i, j) * a.get(i, j))
                .sum::<f64>()
                / n as f64;
            assert_eq!(marg.values()[j], want);
        }
        assert_eq!(copram_init(&a, &y, 1).unwrap().support, vec![0]);
    }

    #[test]
    fn one_sparse_init_is_close() {
        let trials = 30u64;
        let mut good = 0;
        for t in 0..trials {
            let x: Signal<f64> = gen_sparse_signal(100, 1, derive_seed(2, "x", &[t])).unwrap();
            let a: DenseMatrix<f64> =
                gen_measurement_matrix(500, 100, derive_seed(2, "a", &[t])).unwrap();
            let y = measure(&a, &x).unwrap();
            let est = copram_init(&a, &y, 1).unwrap();
            assert_eq!(est.support.len(), 1);
            if dist_op(est.x0.values(), x.values()).unwrap() <= 0.5 {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.9 * trials as f64);
    }

    #[test]
    fn block_init_recovers_block_support() {
        let st = BlockStructure::new(100, 5).unwrap();
        let trials = 30u64;
        let mut good = 0;
        for t in 0..trials {
            let x: Signal<f64> =
                gen_block_sparse_signal(&st, 2, derive_seed(3, "x", &[t])).unwrap();
            let a: DenseMatrix<f64> =
                gen_measurement_matrix(800, 100, derive_seed(3, "a", &[t])).unwrap();
            let y = measure(&a, &x).unwrap();
            let est = block_copram_init(&a, &y, &st, 2).unwrap();
            assert_eq!(
                st.coords_of_blocks(&st.blocks_of(&est.support)),
                est.support
            );
            assert!((est.x0.norm() - est.phi).abs() < 1e-10);
            if est.support == x.support() {
                good += 1;
            }
        }
        assert!(good as f64 >= 0.9 * trials as f64);
    }

    #[test]
    fn unit_block_init_equals_sparse_init() {
        let a: DenseMatrix<f64> = gen_measurement_matrix(200, 40, 8).unwrap();
        let x: Signal<f64> = gen_sparse_signal(40, 3, 9).unwrap();
        let y = measure(&a, &x).unwrap();
        let st = BlockStructure::new(40, 1).unwrap();
        assert_eq!(
            copram_init(&a, &y, 3).unwrap(),
            block_copram_init(&a, &y, &st, 3).unwrap()
        );
    }
}
