//! Ground-truth signals, Gaussian measurement ensembles and magnitude-only
//! observations `y = |A x| (+ ε)`.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::Scalar;

pub(crate) fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A real signal with an optional declared support.
///
/// When `support` is non-empty every coordinate outside it is exactly zero.
/// An empty support means "dense" (iterates that carry no structure).
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    values: Vec<T>,
    support: Vec<usize>,
}

impl<T: Scalar> Signal<T> {
    /// Signal with a declared support; the support is sorted and deduplicated.
    pub fn new(values: Vec<T>, mut support: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::contract("Signal", "length must be at least 1"));
        }
        support.sort_unstable();
        support.dedup();
        if let Some(&j) = support.last() {
            if j >= values.len() {
                return Err(Error::contract(
                    "Signal",
                    format!("support index {j} out of range"),
                ));
            }
        }
        if !support.is_empty() {
            let mut on = support.iter().peekable();
            for (j, v) in values.iter().enumerate() {
                if on.peek() == Some(&&j) {
                    on.next();
                } else if *v != T::zero() {
                    return Err(Error::contract(
                        "Signal",
                        format!("nonzero value at coordinate {j} outside declared support"),
                    ));
                }
            }
        }
        Ok(Self { values, support })
    }

    pub fn dense(values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "signal length must be at least 1");
        Self {
            values,
            support: Vec::new(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::dense(vec![T::zero(); n])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> T {
        norm2(&self.values)
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != T::zero()).count()
    }

    /// Coordinates holding a nonzero value, ascending.
    pub fn nonzero_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.values[j] != T::zero())
            .collect()
    }

    /// Same signal with every value multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * c).collect(),
            support: self.support.clone(),
        }
    }
}

/// Partition of `0..n` into contiguous blocks of uniform length `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockStructure {
    n: usize,
    b: usize,
}

impl BlockStructure {
    pub fn new(n: usize, b: usize) -> Result<Self> {
        if n == 0 || b == 0 {
            return Err(Error::contract(
                "BlockStructure",
                "n and b must be positive",
            ));
        }
        if !n.is_multiple_of(b) {
            return Err(Error::contract(
                "BlockStructure",
                format!("signal length {n} is not divisible by block length {b}"),
            ));
        }
        Ok(Self { n, b })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn block_len(&self) -> usize {
        self.b
    }

    pub fn block_count(&self) -> usize {
        self.n / self.b
    }

    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        block * self.b..(block + 1) * self.b
    }

    pub fn block_of(&self, coord: usize) -> usize {
        coord / self.b
    }

    /// Ascending coordinates covered by the given blocks.
    pub fn coords_of_blocks(&self, blocks: &[usize]) -> Vec<usize> {
        let mut b = blocks.to_vec();
        b.sort_unstable();
        b.dedup();
        b.into_iter().flat_map(|j| self.block_range(j)).collect()
    }

    /// Ascending, deduplicated blocks touched by a coordinate set.
    pub fn blocks_of(&self, coords: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = coords.iter().map(|&c| self.block_of(c)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn unit_normalize(v: &mut [f64]) {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
}

fn embed<T: Scalar>(n: usize, support: Vec<usize>, vals: &[f64]) -> Signal<T> {
    let mut values = vec![T::zero(); n];
    for (&j, &v) in support.iter().zip(vals) {
        values[j] = T::of(v);
    }
    Signal { values, support }
}

/// Draws a nonzero standard normal value (an exact zero would shrink the support).
fn nonzero_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = StandardNormal.sample(rng);
        if v != 0.0 {
            return v;
        }
    }
}

/// `s` nonzeros at uniformly random positions with i.i.d. N(0,1) values,
/// rescaled to unit norm.
pub fn gen_sparse_signal<T: Scalar>(n: usize, s: usize, seed: u64) -> Result<Signal<T>> {
    if s == 0 || s > n {
        return Err(Error::contract(
            "gen_sparse_signal",
            format!("need 1 <= s <= n, got s={s}, n={n}"),
        ));
    }
    let mut rng = rng_from(seed);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let mut vals: Vec<f64> = (0..s).map(|_| nonzero_normal(&mut rng)).collect();
    unit_normalize(&mut vals);
    Ok(embed(n, support, &vals))
}

/// `k` uniformly chosen blocks, fully populated with N(0,1) values,
/// rescaled to unit norm.
pub fn gen_block_sparse_signal<T: Scalar>(
    structure: &BlockStructure,
    k: usize,
    seed: u64,
) -> Result<Signal<T>> {
    if k == 0 || k > structure.block_count() {
        return Err(Error::contract(
            "gen_block_sparse_signal",
            format!(
                "need 1 <= k <= {} blocks, got k={k}",
                structure.block_count()
            ),
        ));
    }
    let mut rng = rng_from(seed);
    let blocks = index::sample(&mut rng, structure.block_count(), k).into_vec();
    let support = structure.coords_of_blocks(&blocks);
    let mut vals: Vec<f64> = (0..support.len())
        .map(|_| nonzero_normal(&mut rng))
        .collect();
    unit_normalize(&mut vals);
    Ok(embed(structure.len(), support, &vals))
}

/// Squared magnitudes of a unit-norm power-law profile: `C/j^α`, `j = 1..s`.
pub fn powerlaw_profile(s: usize, alpha: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=s).map(|j| (j as f64).powf(-alpha)).collect();
    let c = 1.0 / raw.iter().sum::<f64>();
    raw.into_iter().map(|r| c * r).collect()
}

/// `s` random positions carrying magnitudes `sqrt(C(α)/j^α)` in random order,
/// with independent random signs; unit norm.
pub fn gen_powerlaw_signal<T: Scalar>(
    n: usize,
    s: usize,
    alpha: f64,
    seed: u64,
) -> Result<Signal<T>> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::contract(
            "gen_powerlaw_signal",
            format!("decay exponent must exceed 1, got {alpha}"),
        ));
    }
    if s == 0 || s > n {
        return Err(Error::contract(
            "gen_powerlaw_signal",
            format!("need 1 <= s <= n, got s={s}, n={n}"),
        ));
    }
    let mut rng = rng_from(seed);
    let mut positions = index::sample(&mut rng, n, s).into_vec();
    positions.shuffle(&mut rng);
    let mags = powerlaw_profile(s, alpha);
    let mut values = vec![T::zero(); n];
    for (&j, &sq) in positions.iter().zip(&mags) {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        values[j] = T::of(sign * sq.sqrt());
    }
    positions.sort_unstable();
    Ok(Signal {
        values,
        support: positions,
    })
}

/// `m×n` matrix with i.i.d. N(0,1) entries.
pub fn gen_measurement_matrix<T: Scalar>(m: usize, n: usize, seed: u64) -> Result<DenseMatrix<T>> {
    if m == 0 || n == 0 {
        return Err(Error::contract(
            "gen_measurement_matrix",
            "m and n must be positive",
        ));
    }
    let mut rng = rng_from(seed);
    let data = (0..m * n)
        .map(|_| T::of(StandardNormal.sample(&mut rng)))
        .collect();
    DenseMatrix::from_row_major(m, n, data)
}

/// `y = |A x|`.
pub fn measure<T: Scalar>(a: &DenseMatrix<T>, x: &Signal<T>) -> Result<Vec<T>> {
    if x.len() != a.cols() {
        return Err(Error::dims("measure", a.cols(), x.len()));
    }
    let ax = if x.support().is_empty() {
        a.matvec(x.values())?
    } else {
        a.matvec_on_support(x.values(), x.support())?
    };
    Ok(ax.into_iter().map(|v| v.abs()).collect())
}

/// Additive noise distribution for [`measure_with_noise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    #[default]
    Gaussian,
}

/// `y = |A x| + ε`; entries may become negative.
pub fn measure_with_noise<T: Scalar>(
    a: &DenseMatrix<T>,
    x: &Signal<T>,
    sigma: f64,
    noise: NoiseModel,
    seed: u64,
) -> Result<Vec<T>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::contract(
            "measure_noisy",
            format!("sigma must be >= 0, got {sigma}"),
        ));
    }
    let mut y = measure(a, x)?;
    if sigma == 0.0 {
        return Ok(y);
    }
    let mut rng = rng_from(seed);
    match noise {
        NoiseModel::Gaussian => {
            let dist = Normal::new(0.0, sigma).expect("valid sigma");
            for yi in y.iter_mut() {
                *yi = *yi + T::of(dist.sample(&mut rng));
            }
        }
    }
    Ok(y)
}

/// Gaussian-noise shorthand for [`measure_with_noise`].
pub fn measure_noisy<T: Scalar>(
    a: &DenseMatrix<T>,
    x: &Signal<T>,
    sigma: f64,
    seed: u64,
) -> Result<Vec<T>> {
    measure_with_noise(a, x, sigma, NoiseModel::Gaussian, seed)
}

/// Noise standard deviation for a noise-to-signal ratio `σ²/‖x‖²`.
pub fn sigma_for_nsr(nsr: f64, signal_norm: f64) -> f64 {
    (nsr * signal_norm * signal_norm).sqrt()
}

/// Sensing matrix together with the magnitude observations it produced.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble<T> {
    pub a: DenseMatrix<T>,
    pub y: Vec<T>,
    pub noise_sigma: f64,
}

impl<T: Scalar> MeasurementEnsemble<T> {
    pub fn observe(
        a: DenseMatrix<T>,
        x: &Signal<T>,
        noise_sigma: f64,
        noise_seed: u64,
    ) -> Result<Self> {
        let y = measure_noisy(&a, x, noise_sigma, noise_seed)?;
        Ok(Self { a, y, noise_sigma })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }
}
