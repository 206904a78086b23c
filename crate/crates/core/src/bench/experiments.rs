//! Experiment protocols: phase diagram, rate study, and scheme comparison.
//!
//! All protocols share one fixed noiseless test set per base seed and derive
//! every train/fit seed from `(base seed, role, cell, repeat)`, so results
//! are a pure function of their configuration.

use std::time::Instant;

use num_traits::Float;

use crate::activation::logistic_min_scale;
use crate::error::{Error, Result};
use crate::estimator::{
    fit_ltdahp, fit_ltrahp, predict, Dataset, LtdahpParams, LtrahpParams, Scheme, DEFAULT_LAMBDA,
};
use crate::modelsel::{cross_validate, default_grids, Candidate, CvPlan, CvReport};
use crate::scalar::{Real, SolverReal};

use super::{cv_seed, fit_seed, gen_toy, rmse, toy_test_set, train_seed, TOY_DIM};

/// A `(samples, features)` sweep specification on the toy problem.
#[derive(Debug, Clone)]
pub struct PhaseGrid<S> {
    pub m_values: Vec<usize>,
    /// Requested feature counts per cell.
    pub n_values: Vec<usize>,
    pub repeats: usize,
    /// Noise standard deviation of the training targets.
    pub sigma: f64,
    pub base_seed: u64,
    pub scheme: Scheme,
    pub lambda: S,
    /// Activation scale for random-scheme cells; `None` matches the
    /// deterministic scheme's minimum-saturation rule for the cell shape.
    pub scale: Option<S>,
}

impl<S: Real> PhaseGrid<S> {
    pub fn new(m_values: Vec<usize>, n_values: Vec<usize>, repeats: usize, scheme: Scheme) -> Self {
        PhaseGrid {
            m_values,
            n_values,
            repeats,
            sigma: 0.1,
            base_seed: 0,
            scheme,
            lambda: S::from_f64_lossy(DEFAULT_LAMBDA),
            scale: None,
        }
    }
}

/// Aggregated result of one `(m, N)` cell.
#[derive(Debug, Clone, Copy)]
pub struct PhaseCell<S> {
    pub m: usize,
    pub n_features: usize,
    /// NaN when the cell was skipped.
    pub mean_rmse: S,
    pub std_rmse: S,
    pub repeats: usize,
    pub skipped: bool,
}

/// Feature counts above `min(8 m, 4000)` are considered infeasible for a
/// cell with `m` samples and are recorded as skipped rather than run.
pub fn phase_cell_cap(m: usize) -> usize {
    (8 * m).min(4000)
}

/// Splits a requested feature count into the product shape used by the
/// deterministic scheme on the toy problem: `n_thresholds = round(N^{1/d})`
/// (at least 1) and enough weights to cover `N`.
pub fn phase_shape(n_features: usize, d: usize) -> (usize, usize) {
    let l = (n_features as f64).powf(1.0 / d as f64).round().max(1.0) as usize;
    let n_weights = n_features.div_ceil(l);
    (l, n_weights)
}

/// Runs the full sweep; cells are visited in row-major `(m, N)` order and
/// every repeat uses a fresh derived train seed.
pub fn run_phase<S: SolverReal>(grid: &PhaseGrid<S>) -> Result<Vec<PhaseCell<S>>> {
    if grid.repeats < 1 {
        return Err(Error::invalid("need at least one repeat"));
    }
    if grid.m_values.is_empty() || grid.n_values.is_empty() {
        return Err(Error::invalid("empty grid axis"));
    }
    let test = toy_test_set::<S>(grid.base_seed)?;
    let mut cells = Vec::with_capacity(grid.m_values.len() * grid.n_values.len());
    for &m in &grid.m_values {
        for &n_features in &grid.n_values {
            if n_features == 0 {
                return Err(Error::invalid("feature counts must be positive"));
            }
            if n_features > phase_cell_cap(m) {
                cells.push(PhaseCell {
                    m,
                    n_features,
                    mean_rmse: S::nan(),
                    std_rmse: S::nan(),
                    repeats: 0,
                    skipped: true,
                });
                continue;
            }
            let mut errors = Vec::with_capacity(grid.repeats);
            for repeat in 0..grid.repeats {
                let train = gen_toy::<S>(
                    m,
                    grid.sigma,
                    train_seed(grid.base_seed, m, n_features, repeat),
                    true,
                )?;
                let (l, n_weights) = phase_shape(n_features, TOY_DIM);
                let model = match grid.scheme {
                    Scheme::Ltdahp => {
                        let mut params = LtdahpParams::new(l);
                        params.lambda = grid.lambda;
                        params.n_weights_override = Some(n_weights);
                        fit_ltdahp(&train, &params)?
                    }
                    Scheme::Ltrahp => {
                        let scale = match grid.scale {
                            Some(k) => k,
                            None => logistic_min_scale(l)?,
                        };
                        let seed = fit_seed(grid.base_seed, m, n_features, repeat);
                        let mut params = LtrahpParams::new(n_features, scale, seed);
                        params.lambda = grid.lambda;
                        fit_ltrahp(&train, &params)?
                    }
                };
                let preds = predict(&model, test.inputs().view())?;
                errors.push(rmse(preds.view(), test.targets().view())?);
            }
            let (mean, std) = mean_std(&errors);
            cells.push(PhaseCell {
                m,
                n_features,
                mean_rmse: mean,
                std_rmse: std,
                repeats: grid.repeats,
                skipped: false,
            });
        }
    }
    Ok(cells)
}

/// Configuration of the error-decay study.
#[derive(Debug, Clone)]
pub struct RateConfig<S> {
    pub m_values: Vec<usize>,
    pub repeats: usize,
    pub folds: usize,
    pub sigma: f64,
    pub base_seed: u64,
    pub scheme: Scheme,
    pub lambda: S,
}

impl<S: Real> RateConfig<S> {
    pub fn new(m_values: Vec<usize>, repeats: usize, scheme: Scheme) -> Self {
        RateConfig {
            m_values,
            repeats,
            folds: 10,
            sigma: 0.1,
            base_seed: 0,
            scheme,
            lambda: S::from_f64_lossy(DEFAULT_LAMBDA),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RateRow<S> {
    pub m: usize,
    pub mean_sq_err: S,
    pub std_sq_err: S,
}

#[derive(Debug, Clone)]
pub struct RateResult<S> {
    pub rows: Vec<RateRow<S>>,
    /// Least-squares slope of `ln(mean squared error)` against `ln m`.
    pub slope: S,
}

/// For each sample size: select hyperparameters by cross-validation, fit,
/// and measure the squared test RMSE on the shared noiseless test set,
/// averaged over repeats. Returns the per-size table and the log-log slope.
pub fn run_rate<S: SolverReal>(config: &RateConfig<S>) -> Result<RateResult<S>> {
    if config.m_values.len() < 2 {
        return Err(Error::invalid("rate study needs at least two sample sizes"));
    }
    if !config.m_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("sample sizes must be strictly increasing"));
    }
    if config.repeats < 1 {
        return Err(Error::invalid("need at least one repeat"));
    }
    let test = toy_test_set::<S>(config.base_seed)?;
    let mut rows = Vec::with_capacity(config.m_values.len());
    for &m in &config.m_values {
        let mut sq_errors = Vec::with_capacity(config.repeats);
        for repeat in 0..config.repeats {
            let train =
                gen_toy::<S>(m, config.sigma, train_seed(config.base_seed, m, 0, repeat), true)?;
            let grids = default_grids::<S>(TOY_DIM, m);
            let candidates = match config.scheme {
                Scheme::Ltdahp => grids.ltdahp_candidates(config.lambda),
                Scheme::Ltrahp => grids.ltrahp_candidates(config.lambda),
            };
            let plan =
                CvPlan { folds: config.folds.min(m), seed: cv_seed(config.base_seed), candidates };
            let report = cross_validate(&train, &plan)?;
            let model = match report.selected_candidate().candidate {
                Candidate::Ltdahp { n_thresholds, lambda } => {
                    let mut params = LtdahpParams::new(n_thresholds);
                    params.lambda = lambda;
                    fit_ltdahp(&train, &params)?
                }
                Candidate::Ltrahp { n_features, scale, lambda } => {
                    let mut params = LtrahpParams::new(
                        n_features,
                        scale,
                        fit_seed(config.base_seed, m, n_features, repeat),
                    );
                    params.lambda = lambda;
                    fit_ltrahp(&train, &params)?
                }
            };
            let preds = predict(&model, test.inputs().view())?;
            let err = rmse(preds.view(), test.targets().view())?;
            sq_errors.push(err * err);
        }
        let (mean, std) = mean_std(&sq_errors);
        rows.push(RateRow { m, mean_sq_err: mean, std_sq_err: std });
    }
    let xs: Vec<S> = rows.iter().map(|r| S::from_f64_lossy(r.m as f64)).collect();
    let ys: Vec<S> = rows.iter().map(|r| r.mean_sq_err).collect();
    let slope = super::loglog_slope(&xs, &ys)?;
    Ok(RateResult { rows, slope })
}

/// How the random baseline's activation scale is chosen in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    /// Controlled comparison: reuse the deterministic fit's scale, so the
    /// two schemes differ only in how hidden parameters are assigned.
    #[default]
    Matched,
    /// Tune the scale by cross-validation over the default grid.
    Tuned,
}

/// Configuration of the deterministic-vs-random comparison.
#[derive(Debug, Clone)]
pub struct CompareConfig<S> {
    pub m: usize,
    /// Random-scheme refits; fit seeds are `0..repeats`.
    pub repeats: usize,
    pub folds: usize,
    pub sigma: f64,
    pub base_seed: u64,
    pub lambda: S,
    pub scale_mode: ScaleMode,
}

impl<S: Real> CompareConfig<S> {
    pub fn new(m: usize, repeats: usize) -> Self {
        CompareConfig {
            m,
            repeats,
            folds: 10,
            sigma: 0.1,
            base_seed: 0,
            lambda: S::from_f64_lossy(DEFAULT_LAMBDA),
            scale_mode: ScaleMode::Matched,
        }
    }
}

/// One scheme's aggregate in a comparison run.
#[derive(Debug, Clone, Copy)]
pub struct CompareRow<S> {
    pub scheme: Scheme,
    pub m: usize,
    pub n_features: usize,
    pub mean_rmse: S,
    pub std_rmse: S,
    /// Wall time including hyperparameter selection.
    pub train_seconds: f64,
}

/// Toy-problem comparison: the deterministic scheme selects its threshold
/// count by cross-validation; the random scheme gets the matched feature
/// count (and, in the default matched mode, the same scale) and refits with
/// seeds `0..repeats`.
pub fn run_compare<S: SolverReal>(config: &CompareConfig<S>) -> Result<Vec<CompareRow<S>>> {
    let train = gen_toy::<S>(config.m, config.sigma, train_seed(config.base_seed, config.m, 0, 0), true)?;
    let test = toy_test_set::<S>(config.base_seed)?;
    run_compare_datasets(
        &train,
        &test,
        config.repeats,
        config.folds,
        config.base_seed,
        config.lambda,
        config.scale_mode,
    )
}

/// Comparison on explicit train/test datasets (e.g. ingested files).
pub fn run_compare_datasets<S: SolverReal>(
    train: &Dataset<S>,
    test: &Dataset<S>,
    repeats: usize,
    folds: usize,
    base_seed: u64,
    lambda: S,
    scale_mode: ScaleMode,
) -> Result<Vec<CompareRow<S>>> {
    if repeats < 1 {
        return Err(Error::invalid("need at least one repeat"));
    }
    let m = train.n_samples();
    let d = train.input_dim();
    let grids = default_grids::<S>(d, m);

    // Deterministic scheme: CV over threshold counts, one final fit.
    let started = Instant::now();
    let plan = CvPlan {
        folds: folds.min(m),
        seed: cv_seed(base_seed),
        candidates: grids.ltdahp_candidates(lambda),
    };
    let report = cross_validate(train, &plan)?;
    let Candidate::Ltdahp { n_thresholds, .. } = report.selected_candidate().candidate else {
        unreachable!("grid holds only deterministic candidates")
    };
    let mut params = LtdahpParams::new(n_thresholds);
    params.lambda = lambda;
    let model = fit_ltdahp(train, &params)?;
    let n_matched = model.spec().feature_count();
    let preds = predict(&model, test.inputs().view())?;
    let det_rmse = rmse(preds.view(), test.targets().view())?;
    let det_seconds = started.elapsed().as_secs_f64();

    // Random scheme at the matched feature count, refit with seeds
    // 0..repeats. Matched mode reuses the deterministic fit's scale so only
    // the hidden-parameter assignment differs between the rows; tuned mode
    // cross-validates the scale over the default grid first.
    let started = Instant::now();
    let scale = match scale_mode {
        ScaleMode::Matched => model.spec().activation().scale(),
        ScaleMode::Tuned => {
            let scale_candidates: Vec<Candidate<S>> = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
                .iter()
                .map(|&k| Candidate::Ltrahp {
                    n_features: n_matched,
                    scale: S::from_f64_lossy(k),
                    lambda,
                })
                .collect();
            let plan = CvPlan {
                folds: folds.min(m),
                seed: cv_seed(base_seed),
                candidates: scale_candidates,
            };
            let report = cross_validate(train, &plan)?;
            let Candidate::Ltrahp { scale, .. } = report.selected_candidate().candidate else {
                unreachable!("grid holds only random candidates")
            };
            scale
        }
    };
    let mut errors = Vec::with_capacity(repeats);
    for seed in 0..repeats as u64 {
        let mut params = LtrahpParams::new(n_matched, scale, seed);
        params.lambda = lambda;
        let model = fit_ltrahp(train, &params)?;
        let preds = predict(&model, test.inputs().view())?;
        errors.push(rmse(preds.view(), test.targets().view())?);
    }
    let (rand_mean, rand_std) = mean_std(&errors);
    let rand_seconds = started.elapsed().as_secs_f64();

    Ok(vec![
        CompareRow {
            scheme: Scheme::Ltdahp,
            m,
            n_features: n_matched,
            mean_rmse: det_rmse,
            std_rmse: S::zero(),
            train_seconds: det_seconds,
        },
        CompareRow {
            scheme: Scheme::Ltrahp,
            m,
            n_features: n_matched,
            mean_rmse: rand_mean,
            std_rmse: rand_std,
            train_seconds: rand_seconds,
        },
    ])
}

/// Cross-validation of the deterministic scheme with default grids; public
/// entry used by the CLI's `--cv` path.
pub fn cv_with_defaults<S: SolverReal>(
    data: &Dataset<S>,
    folds: usize,
    seed: u64,
    lambda: S,
    scheme: Scheme,
) -> Result<CvReport<S>> {
    let grids = default_grids::<S>(data.input_dim(), data.n_samples());
    let candidates = match scheme {
        Scheme::Ltdahp => grids.ltdahp_candidates(lambda),
        Scheme::Ltrahp => grids.ltrahp_candidates(lambda),
    };
    cross_validate(data, &CvPlan { folds: folds.min(data.n_samples()), seed, candidates })
}

fn mean_std<S: Real>(values: &[S]) -> (S, S) {
    let n = values.len();
    let count = S::from_f64_lossy(n as f64);
    let mean = values.iter().fold(S::zero(), |a, &b| a + b) / count;
    if n < 2 {
        return (mean, S::zero());
    }
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).fold(S::zero(), |a, b| a + b)
        / S::from_f64_lossy((n - 1) as f64);
    (mean, Float::sqrt(var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_shape_mapping() {
        assert_eq!(phase_shape(64, 3), (4, 16));
        assert_eq!(phase_shape(5, 3), (2, 3)); // round(5^(1/3)) = 2, ceil(5/2) = 3
        assert_eq!(phase_shape(1, 3), (1, 1));
    }

    #[test]
    fn single_cell_aggregation() {
        let grid = PhaseGrid::<f64>::new(vec![60], vec![8], 2, Scheme::Ltdahp);
        let cells = run_phase(&grid).unwrap();
        assert_eq!(cells.len(), 1);
        let cell = &cells[0];
        assert!(!cell.skipped);
        assert_eq!(cell.repeats, 2);
        assert!(cell.mean_rmse.is_finite() && cell.std_rmse.is_finite());
        // Repeats use distinct train seeds, so the spread is nonzero.
        assert!(cell.std_rmse > 0.0);
    }

    #[test]
    fn overparameterized_cell_stays_finite() {
        // More features than samples: the ridge weight keeps the fit sane.
        let grid = PhaseGrid::<f64>::new(vec![40], vec![64], 1, Scheme::Ltdahp);
        let cells = run_phase(&grid).unwrap();
        assert!(!cells[0].skipped);
        assert!(cells[0].mean_rmse.is_finite());
    }

    #[test]
    fn infeasible_cells_are_tagged_not_dropped() {
        let grid = PhaseGrid::<f64>::new(vec![10], vec![8, 200], 1, Scheme::Ltdahp);
        let cells = run_phase(&grid).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(!cells[0].skipped);
        assert!(cells[1].skipped); // 200 > 8 * 10
        assert!(cells[1].mean_rmse.is_nan());
    }

    #[test]
    fn phase_errors_shrink_with_more_samples() {
        let grid = PhaseGrid::<f64>::new(vec![100, 400, 1600], vec![64], 3, Scheme::Ltdahp);
        let cells = run_phase(&grid).unwrap();
        let ms: Vec<f64> = cells.iter().map(|c| c.m as f64).collect();
        let errs: Vec<f64> = cells.iter().map(|c| c.mean_rmse).collect();
        let rho = super::super::spearman(&ms, &errs).unwrap();
        assert!(rho < 0.0, "mean rmse not trending down: {errs:?}");
    }

    #[test]
    fn rate_slope_on_tiny_run_is_negative() {
        let mut config = RateConfig::<f64>::new(vec![50, 100, 200, 400], 2, Scheme::Ltdahp);
        config.folds = 5;
        let result = run_rate(&config).unwrap();
        assert_eq!(result.rows.len(), 4);
        assert!(result.slope < 0.0, "slope {}", result.slope);
    }

    #[test]
    fn rate_rejects_bad_m_lists() {
        assert!(run_rate(&RateConfig::<f64>::new(vec![100], 1, Scheme::Ltdahp)).is_err());
        assert!(run_rate(&RateConfig::<f64>::new(vec![100, 100], 1, Scheme::Ltdahp)).is_err());
    }

    #[test]
    fn compare_has_both_scheme_rows() {
        let mut config = CompareConfig::<f64>::new(150, 3);
        config.folds = 5;
        let rows = run_compare(&config).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].scheme, Scheme::Ltdahp);
        assert_eq!(rows[1].scheme, Scheme::Ltrahp);
        assert_eq!(rows[0].n_features, rows[1].n_features);
        assert!(rows.iter().all(|r| r.mean_rmse.is_finite()));
    }
}
