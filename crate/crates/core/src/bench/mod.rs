//! Synthetic data, metrics, dataset ingestion, and experiment protocols.
//!
//! The toy regression target is the compactly supported radial bump
//! `f(x) = (1 - |x|)_+^4 (4 |x| + 1)` on `[-1, 1]^3`, sampled uniformly with
//! optional Gaussian target noise. Experiments ([`run_phase`], [`run_rate`],
//! [`run_compare`]) are reproducible from a base seed: every train set, fit
//! seed, and the shared noiseless test set use tagged seeds derived from it.

mod experiments;
mod ingest;

pub use experiments::{
    cv_with_defaults, phase_cell_cap, phase_shape, run_compare, run_compare_datasets, run_phase,
    run_rate, CompareConfig, CompareRow, PhaseCell, PhaseGrid, RateConfig, RateResult, RateRow,
    ScaleMode,
};
pub use ingest::{load_csv, load_csv_split};

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimator::{Dataset, Provenance};
use crate::scalar::Real;

/// Input dimension of the toy problem.
pub const TOY_DIM: usize = 3;

/// Size of the fixed noiseless test set used by the experiment protocols.
pub const TEST_SET_SIZE: usize = 1000;

/// Theoretical decay exponent of the squared test error on the toy target
/// (smoothness 2, dimension 3): `-2r / (2r + d) = -4/7`.
pub const TOY_RATE_EXPONENT: f64 = -4.0 / 7.0;

/// The toy regression target `(1 - |x|)_+^4 (4 |x| + 1)`; zero outside the
/// unit ball, 1 at the origin, range `[0, 1]`.
pub fn toy_target<S: Real>(x: &[S]) -> S {
    let norm = x.iter().map(|&v| v * v).fold(S::zero(), |a, b| a + b).sqrt();
    if norm >= S::one() {
        return S::zero();
    }
    let four = S::from_f64_lossy(4.0);
    (S::one() - norm).powi(4) * (four * norm + S::one())
}

/// Samples `m` toy points: inputs uniform on `[-1, 1]^3`, targets
/// `f(x) + sigma * N(0, 1)` when `noisy`, exact `f(x)` otherwise.
/// `sigma` is the noise standard deviation. Deterministic per seed; each
/// sample draws its three coordinates and then its noise from one stream.
pub fn gen_toy<S: Real>(m: usize, sigma: f64, seed: u64, noisy: bool) -> Result<Dataset<S>> {
    if m < 1 {
        return Err(Error::invalid("need at least one sample"));
    }
    if sigma < 0.0 {
        return Err(Error::invalid("noise level must be >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Array2::zeros((m, TOY_DIM));
    let mut targets = Array1::zeros(m);
    for i in 0..m {
        let mut x = [S::zero(); TOY_DIM];
        for (c, xc) in x.iter_mut().enumerate() {
            let v: f64 = rng.random_range(-1.0..=1.0);
            inputs[[i, c]] = S::from_f64_lossy(v);
            *xc = inputs[[i, c]];
        }
        let mut y = toy_target(&x);
        if noisy {
            let eps: f64 = StandardNormal.sample(&mut rng);
            y += S::from_f64_lossy(sigma * eps);
        }
        targets[i] = y;
    }
    Dataset::new(inputs, targets, Provenance::Synthetic)
}

/// Root mean square error between two equal-length vectors.
pub fn rmse<S: Real>(pred: ArrayView1<S>, truth: ArrayView1<S>) -> Result<S> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if pred.is_empty() {
        return Err(Error::invalid("rmse of empty vectors"));
    }
    let m = S::from_f64_lossy(pred.len() as f64);
    let sum = pred
        .iter()
        .zip(truth.iter())
        .map(|(&p, &t)| (p - t) * (p - t))
        .fold(S::zero(), |a, b| a + b);
    Ok((sum / m).sqrt())
}

/// Least-squares slope of `ln y` against `ln x`; all values must be positive.
pub fn loglog_slope<S: Real>(xs: &[S], ys: &[S]) -> Result<S> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::invalid("slope needs at least two points"));
    }
    let pairs: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .map(|(&x, &y)| (x.to_f64_lossy(), y.to_f64_lossy()))
        .collect();
    if pairs.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::invalid("log-log slope needs positive values"));
    }
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in pairs {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::invalid("degenerate abscissae"));
    }
    Ok(S::from_f64_lossy((n * sxy - sx * sy) / denom))
}

/// Spearman rank correlation (average ranks on ties).
pub fn spearman<S: Real>(xs: &[S], ys: &[S]) -> Result<S> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::invalid("correlation needs at least two points"));
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut num, mut dx, mut dy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(ry.iter()) {
        let (da, db) = (a - mean, b - mean);
        num += da * db;
        dx += da * da;
        dy += db * db;
    }
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::invalid("constant sequence has no rank correlation"));
    }
    Ok(S::from_f64_lossy(num / (dx * dy).sqrt()))
}

fn ranks<S: Real>(values: &[S]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = ((i + j) as f64) / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

// Seed-derivation tags; the fixed test set must never collide with a
// training or fitting seed.
const TAG_TRAIN: u64 = 1;
const TAG_TEST: u64 = 2;
const TAG_FIT: u64 = 3;
const TAG_CV: u64 = 4;

/// splitmix64-style mix of a base seed with context tags.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix(base ^ 0x9E37_79B9_7F4A_7C15);
    for &p in parts {
        state = splitmix(state ^ p.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The reserved-noise-free test set shared by all experiment cells under one
/// base seed.
pub fn toy_test_set<S: Real>(base_seed: u64) -> Result<Dataset<S>> {
    gen_toy(TEST_SET_SIZE, 0.0, derive_seed(base_seed, &[TAG_TEST]), false)
}

pub(crate) fn train_seed(base: u64, m: usize, n: usize, repeat: usize) -> u64 {
    derive_seed(base, &[TAG_TRAIN, m as u64, n as u64, repeat as u64])
}

pub(crate) fn fit_seed(base: u64, m: usize, n: usize, repeat: usize) -> u64 {
    derive_seed(base, &[TAG_FIT, m as u64, n as u64, repeat as u64])
}

pub(crate) fn cv_seed(base: u64) -> u64 {
    derive_seed(base, &[TAG_CV])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_target_known_values() {
        assert_eq!(toy_target(&[0.0f64, 0.0, 0.0]), 1.0);
        assert_eq!(toy_target(&[1.0f64, 0.0, 0.0]), 0.0);
        assert_eq!(toy_target(&[0.8f64, 0.6, 0.0]), 0.0); // norm exactly 1
        let v = toy_target(&[0.5f64, 0.0, 0.0]);
        assert!((v - 0.1875).abs() < 1e-15); // 0.5^4 * 3
    }

    #[test]
    fn toy_target_is_radial_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let x: [f64; 3] = [
                rng.random_range(-1.2..1.2),
                rng.random_range(-1.2..1.2),
                rng.random_range(-1.2..1.2),
            ];
            let v = toy_target(&x);
            assert!((0.0..=1.0).contains(&v));
            // Same norm along an axis gives the same value.
            let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let axis = toy_target(&[norm, 0.0, 0.0]);
            assert!((v - axis).abs() < 1e-12);
        }
    }

    #[test]
    fn gen_toy_noiseless_matches_target() {
        let data = gen_toy::<f64>(200, 0.0, 9, false).unwrap();
        for (row, &y) in data.inputs().rows().into_iter().zip(data.targets()) {
            let x = [row[0], row[1], row[2]];
            assert_eq!(toy_target(&x), y);
        }
        // noisy=false ignores sigma entirely
        let same = gen_toy::<f64>(200, 0.5, 9, false).unwrap();
        assert_eq!(same.targets(), data.targets());
    }

    #[test]
    fn gen_toy_same_seed_identical() {
        let a = gen_toy::<f64>(100, 0.1, 3, true).unwrap();
        let b = gen_toy::<f64>(100, 0.1, 3, true).unwrap();
        assert_eq!(a.inputs(), b.inputs());
        assert_eq!(a.targets(), b.targets());
    }

    #[test]
    fn gen_toy_noise_scale_and_marginals() {
        let m = 100_000;
        let noisy = gen_toy::<f64>(m, 0.1, 17, true).unwrap();
        // Residual against the true target evaluated at the same inputs.
        let diffs: Vec<f64> = noisy
            .inputs()
            .rows()
            .into_iter()
            .zip(noisy.targets().iter())
            .map(|(row, &y)| y - toy_target(&[row[0], row[1], row[2]]))
            .collect();
        let mean = diffs.iter().sum::<f64>() / m as f64;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (m as f64 - 1.0);
        let std = var.sqrt();
        assert!((std - 0.1).abs() / 0.1 < 0.03, "noise std {std}");
        for c in 0..TOY_DIM {
            let col_mean = noisy.inputs().column(c).sum() / m as f64;
            assert!(col_mean.abs() < 0.02, "column {c} mean {col_mean}");
        }
    }

    #[test]
    fn rmse_known_values() {
        use ndarray::array;
        let z = array![1.0, 1.0];
        assert_eq!(rmse(z.view(), z.view()).unwrap(), 0.0);
        assert_eq!(rmse(array![1.0, 1.0].view(), array![0.0, 0.0].view()).unwrap(), 1.0);
        assert_eq!(rmse(array![3.0].view(), array![0.0].view()).unwrap(), 3.0);
        assert!(rmse(array![1.0].view(), array![1.0, 2.0].view()).is_err());
    }

    #[test]
    fn slope_of_constant_sequence_is_zero() {
        let xs = [125.0f64, 250.0, 500.0, 1000.0];
        let ys = [0.4f64, 0.4, 0.4, 0.4];
        let slope = loglog_slope(&xs, &ys).unwrap();
        assert!(slope.abs() < 1e-12);
    }

    #[test]
    fn slope_recovers_power_law() {
        let xs: Vec<f64> = vec![10.0, 100.0, 1000.0, 10000.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.75)).collect();
        let slope = loglog_slope(&xs, &ys).unwrap();
        assert!((slope + 0.75).abs() < 1e-12);
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn spearman_signs() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        assert!((spearman(&xs, &[2.0, 3.0, 9.0, 11.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &[5.0, 4.0, 3.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_separate_roles() {
        let base = 0u64;
        let train = train_seed(base, 100, 64, 0);
        let fit = fit_seed(base, 100, 64, 0);
        let test = derive_seed(base, &[TAG_TEST]);
        assert_ne!(train, fit);
        assert_ne!(train, test);
        assert_ne!(fit, test);
        assert_eq!(train_seed(base, 100, 64, 0), train);
        assert_ne!(train_seed(base, 100, 64, 1), train);
    }

    #[test]
    fn toy_rate_exponent_value() {
        assert!((TOY_RATE_EXPONENT + 4.0 / 7.0).abs() < 1e-15);
    }
}
