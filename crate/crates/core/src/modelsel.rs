//! k-fold cross-validation grid search over hyperparameters.
//!
//! Folds come from a seeded permutation, so a plan replays exactly. Each
//! candidate is fitted on `k - 1` folds and scored by RMSE on the held-out
//! fold; the selected candidate minimizes the mean validation RMSE, with
//! ties broken toward the smaller model (fewer features, then smaller
//! threshold count / scale).

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{derive_seed, rmse};
use crate::error::{Error, Result};
use crate::estimator::{fit_ltdahp, fit_ltrahp, predict, Dataset, LtdahpParams, LtrahpParams};
use crate::scalar::{Real, SolverReal};

/// One hyperparameter candidate; the variant fixes the fitting scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate<S> {
    Ltdahp { n_thresholds: usize, lambda: S },
    Ltrahp { n_features: usize, scale: S, lambda: S },
}

impl<S: Real> Candidate<S> {
    /// Feature count of the fitted model, given the input dimension.
    pub fn model_size(&self, d: usize) -> usize {
        match *self {
            Candidate::Ltdahp { n_thresholds, .. } => {
                n_thresholds.pow((d - 1) as u32).max(1) * n_thresholds
            }
            Candidate::Ltrahp { n_features, .. } => n_features,
        }
    }

    /// Secondary tie-break key: threshold count or scale.
    fn fineness(&self) -> f64 {
        match *self {
            Candidate::Ltdahp { n_thresholds, .. } => n_thresholds as f64,
            Candidate::Ltrahp { scale, .. } => scale.to_f64_lossy(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Candidate::Ltdahp { n_thresholds, lambda } => {
                format!("ltdahp l={} lambda={:.3e}", n_thresholds, lambda.to_f64_lossy())
            }
            Candidate::Ltrahp { n_features, scale, lambda } => format!(
                "ltrahp N={} K={} lambda={:.3e}",
                n_features,
                scale.to_f64_lossy(),
                lambda.to_f64_lossy()
            ),
        }
    }
}

/// A cross-validation plan: fold count, fold seed, and the candidate grid.
#[derive(Debug, Clone)]
pub struct CvPlan<S> {
    pub folds: usize,
    pub seed: u64,
    pub candidates: Vec<Candidate<S>>,
}

/// Validation outcome of one fold for one candidate.
#[derive(Debug, Clone, Copy)]
pub struct FoldOutcome<S> {
    pub fold: usize,
    pub rmse: S,
    /// Seed used for the fold fit; present for random-scheme candidates.
    pub fit_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct CandidateReport<S> {
    pub candidate: Candidate<S>,
    pub mean_rmse: S,
    pub std_rmse: S,
    pub folds: Vec<FoldOutcome<S>>,
}

/// Full cross-validation table plus the index of the selected candidate.
#[derive(Debug, Clone)]
pub struct CvReport<S> {
    pub candidates: Vec<CandidateReport<S>>,
    pub selected: usize,
}

impl<S: Real> CvReport<S> {
    pub fn selected_candidate(&self) -> &CandidateReport<S> {
        &self.candidates[self.selected]
    }

    /// Rows `candidate,fold,rmse`, one per fold evaluation.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "candidate,fold,rmse")?;
        for report in &self.candidates {
            for fold in &report.folds {
                writeln!(
                    w,
                    "{},{},{:.17e}",
                    report.candidate.label().replace(' ', "_"),
                    fold.fold,
                    fold.rmse.to_f64_lossy()
                )?;
            }
        }
        Ok(())
    }

    /// Human-readable table, one candidate per line, selection marked.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (i, report) in self.candidates.iter().enumerate() {
            let marker = if i == self.selected { " <- selected" } else { "" };
            out.push_str(&format!(
                "{}: mean_rmse={:.6e} std={:.6e}{}\n",
                report.candidate.label(),
                report.mean_rmse.to_f64_lossy(),
                report.std_rmse.to_f64_lossy(),
                marker
            ));
        }
        out
    }
}

/// Deterministic fold assignment: a seeded shuffle of `0..m` chopped into
/// `folds` blocks whose sizes differ by at most one. The blocks partition
/// the index set.
pub fn fold_assignments(m: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::invalid("need at least two folds"));
    }
    if folds > m {
        return Err(Error::invalid(format!("{folds} folds exceed {m} samples")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = m / folds;
    let extra = m % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        out.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

/// Runs the grid search described by `plan` on `data`.
///
/// Per candidate and fold, fits on the complement and scores the held-out
/// fold. Random-scheme fold fits use seeds derived from `(plan.seed,
/// candidate, fold)` and recorded in the report.
pub fn cross_validate<S: SolverReal>(data: &Dataset<S>, plan: &CvPlan<S>) -> Result<CvReport<S>> {
    if plan.candidates.is_empty() {
        return Err(Error::invalid("empty candidate grid"));
    }
    let folds = fold_assignments(data.n_samples(), plan.folds, plan.seed)?;
    let d = data.input_dim();

    let mut reports = Vec::with_capacity(plan.candidates.len());
    for (ci, &candidate) in plan.candidates.iter().enumerate() {
        let mut outcomes = Vec::with_capacity(folds.len());
        for (fi, val_rows) in folds.iter().enumerate() {
            let train_rows: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(other, _)| other != fi)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect();
            let train = data.subset(&train_rows)?;
            let val = data.subset(val_rows)?;
            let (model, fit_seed) = match candidate {
                Candidate::Ltdahp { n_thresholds, lambda } => {
                    let mut params = LtdahpParams::new(n_thresholds);
                    params.lambda = lambda;
                    (fit_ltdahp(&train, &params)?, None)
                }
                Candidate::Ltrahp { n_features, scale, lambda } => {
                    let seed = derive_seed(plan.seed, &[ci as u64, fi as u64]);
                    let mut params = LtrahpParams::new(n_features, scale, seed);
                    params.lambda = lambda;
                    (fit_ltrahp(&train, &params)?, Some(seed))
                }
            };
            let preds = predict(&model, val.inputs().view())?;
            let err = rmse(preds.view(), val.targets().view())?;
            outcomes.push(FoldOutcome { fold: fi, rmse: err, fit_seed });
        }
        let (mean, std) = mean_std(outcomes.iter().map(|o| o.rmse));
        reports.push(CandidateReport { candidate, mean_rmse: mean, std_rmse: std, folds: outcomes });
    }

    let selected = select(&reports, d);
    Ok(CvReport { candidates: reports, selected })
}

fn mean_std<S: Real>(values: impl ExactSizeIterator<Item = S> + Clone) -> (S, S) {
    let n = values.len();
    let count = S::from_f64_lossy(n as f64);
    let mean = values.clone().fold(S::zero(), |a, b| a + b) / count;
    if n < 2 {
        return (mean, S::zero());
    }
    let var = values.map(|v| (v - mean) * (v - mean)).fold(S::zero(), |a, b| a + b)
        / S::from_f64_lossy((n - 1) as f64);
    (mean, Float::sqrt(var))
}

fn select<S: Real>(reports: &[CandidateReport<S>], d: usize) -> usize {
    let mut best = 0usize;
    for i in 1..reports.len() {
        let (a, b) = (&reports[i], &reports[best]);
        let ord = a
            .mean_rmse
            .partial_cmp(&b.mean_rmse)
            .expect("finite rmse")
            .then(a.candidate.model_size(d).cmp(&b.candidate.model_size(d)))
            .then(a.candidate.fineness().total_cmp(&b.candidate.fineness()));
        if ord == std::cmp::Ordering::Less {
            best = i;
        }
    }
    best
}

/// Default hyperparameter grids for a dataset of dimension `d` with `m`
/// samples.
///
/// Deterministic scheme: threshold counts `1..=ceil(2 m^{1/(d+2)})`, capped
/// so the feature count stays within `min(m, 4000)`. Random scheme: feature
/// counts on the geometric grid `16, 32, ...` up to `min(m, 4096)`, crossed
/// with scales `{1, 2, 4, 8, 16, 32}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultGrids<S> {
    pub ltdahp_thresholds: Vec<usize>,
    pub ltrahp_pairs: Vec<(usize, S)>,
}

pub fn default_grids<S: Real>(d: usize, m: usize) -> DefaultGrids<S> {
    let cap = m.min(4000);
    let max_thresholds = (2.0 * (m as f64).powf(1.0 / (d as f64 + 2.0))).ceil() as usize;
    let ltdahp_thresholds: Vec<usize> = (1..=max_thresholds.max(1))
        .filter(|&l| l.pow((d - 1) as u32).max(1) * l <= cap)
        .collect();
    let ltdahp_thresholds =
        if ltdahp_thresholds.is_empty() { vec![1] } else { ltdahp_thresholds };

    let mut ltrahp_pairs = Vec::new();
    let n_cap = m.min(4096);
    let mut n = 16usize;
    let mut n_values = Vec::new();
    while n <= n_cap {
        n_values.push(n);
        n *= 2;
    }
    if n_values.is_empty() {
        n_values.push(n_cap.max(1));
    }
    for &nf in &n_values {
        for k in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            ltrahp_pairs.push((nf, S::from_f64_lossy(k)));
        }
    }
    DefaultGrids { ltdahp_thresholds, ltrahp_pairs }
}

impl<S: Real> DefaultGrids<S> {
    pub fn ltdahp_candidates(&self, lambda: S) -> Vec<Candidate<S>> {
        self.ltdahp_thresholds
            .iter()
            .map(|&l| Candidate::Ltdahp { n_thresholds: l, lambda })
            .collect()
    }

    pub fn ltrahp_candidates(&self, lambda: S) -> Vec<Candidate<S>> {
        self.ltrahp_pairs
            .iter()
            .map(|&(n, k)| Candidate::Ltrahp { n_features: n, scale: k, lambda })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen_toy;

    fn plan(folds: usize, candidates: Vec<Candidate<f64>>) -> CvPlan<f64> {
        CvPlan { folds, seed: 7, candidates }
    }

    #[test]
    fn folds_partition_the_index_set() {
        for (m, k) in [(10usize, 2usize), (11, 3), (57, 10), (8, 8)] {
            let folds = fold_assignments(m, k, 3).unwrap();
            assert_eq!(folds.len(), k);
            let mut seen = vec![false; m];
            for fold in &folds {
                for &i in fold {
                    assert!(!seen[i], "index {i} in two folds");
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1);
        }
    }

    #[test]
    fn leave_one_out_has_singleton_folds() {
        let folds = fold_assignments(12, 12, 0).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn rejects_bad_fold_counts() {
        assert!(fold_assignments(5, 6, 0).is_err());
        assert!(fold_assignments(5, 1, 0).is_err());
    }

    #[test]
    fn singleton_grid_is_selected_with_full_fold_detail() {
        let data = gen_toy::<f64>(60, 0.1, 1, true).unwrap();
        let report = cross_validate(
            &data,
            &plan(5, vec![Candidate::Ltdahp { n_thresholds: 2, lambda: 1e-4 }]),
        )
        .unwrap();
        assert_eq!(report.selected, 0);
        assert_eq!(report.candidates.len(), 1);
        assert_eq!(report.candidates[0].folds.len(), 5);
    }

    #[test]
    fn empty_grid_rejected() {
        let data = gen_toy::<f64>(30, 0.1, 1, true).unwrap();
        assert!(cross_validate(&data, &plan(3, vec![])).is_err());
    }

    #[test]
    fn report_is_reproducible() {
        let data = gen_toy::<f64>(80, 0.1, 5, true).unwrap();
        let candidates = vec![
            Candidate::Ltdahp { n_thresholds: 2, lambda: 1e-4 },
            Candidate::Ltrahp { n_features: 16, scale: 4.0, lambda: 1e-4 },
        ];
        let a = cross_validate(&data, &plan(4, candidates.clone())).unwrap();
        let b = cross_validate(&data, &plan(4, candidates)).unwrap();
        assert_eq!(a.selected, b.selected);
        for (ra, rb) in a.candidates.iter().zip(&b.candidates) {
            assert_eq!(ra.mean_rmse, rb.mean_rmse);
            for (fa, fb) in ra.folds.iter().zip(&rb.folds) {
                assert_eq!(fa.rmse, fb.rmse);
                assert_eq!(fa.fit_seed, fb.fit_seed);
            }
        }
    }

    #[test]
    fn selected_candidate_attains_minimal_mean() {
        let data = gen_toy::<f64>(120, 0.1, 2, true).unwrap();
        let candidates: Vec<Candidate<f64>> = (1..=4)
            .map(|l| Candidate::Ltdahp { n_thresholds: l, lambda: 1e-4 })
            .collect();
        let report = cross_validate(&data, &plan(6, candidates)).unwrap();
        let best = report.selected_candidate().mean_rmse;
        for cand in &report.candidates {
            assert!(best <= cand.mean_rmse);
        }
    }

    #[test]
    fn ties_prefer_smaller_models() {
        let reports: Vec<CandidateReport<f64>> = [1usize, 3, 2]
            .iter()
            .map(|&l| CandidateReport {
                candidate: Candidate::Ltdahp { n_thresholds: l, lambda: 0.0 },
                mean_rmse: 0.5,
                std_rmse: 0.0,
                folds: vec![],
            })
            .collect();
        assert_eq!(select(&reports, 3), 0);
    }

    #[test]
    fn cv_against_straightforward_recomputation() {
        // Re-run the whole table with a plain loop over the same folds and
        // check the selection agrees.
        let data = gen_toy::<f64>(500, 0.1, 21, true).unwrap();
        let candidates: Vec<Candidate<f64>> = (2..=6)
            .map(|l| Candidate::Ltdahp { n_thresholds: l, lambda: 1e-4 })
            .collect();
        let cv_plan = plan(10, candidates.clone());
        let report = cross_validate(&data, &cv_plan).unwrap();

        let folds = fold_assignments(data.n_samples(), cv_plan.folds, cv_plan.seed).unwrap();
        let mut best: Option<(usize, f64)> = None;
        for (ci, cand) in candidates.iter().enumerate() {
            let Candidate::Ltdahp { n_thresholds, lambda } = *cand else { unreachable!() };
            let mut total = 0.0;
            for (fi, val_rows) in folds.iter().enumerate() {
                let train_rows: Vec<usize> = folds
                    .iter()
                    .enumerate()
                    .filter(|&(o, _)| o != fi)
                    .flat_map(|(_, r)| r.iter().copied())
                    .collect();
                let mut params = LtdahpParams::new(n_thresholds);
                params.lambda = lambda;
                let model = fit_ltdahp(&data.subset(&train_rows).unwrap(), &params).unwrap();
                let val = data.subset(val_rows).unwrap();
                let preds = predict(&model, val.inputs().view()).unwrap();
                total += rmse(preds.view(), val.targets().view()).unwrap();
            }
            let mean = total / folds.len() as f64;
            if best.map_or(true, |(_, b)| mean < b) {
                best = Some((ci, mean));
            }
        }
        assert_eq!(report.selected, best.unwrap().0);
    }

    #[test]
    fn default_grid_shapes() {
        let grids = default_grids::<f64>(3, 2000);
        assert!(grids.ltdahp_thresholds.iter().all(|&l| (1..=10).contains(&l)));
        assert_eq!(*grids.ltdahp_thresholds.last().unwrap(), 10);
        assert!(grids.ltrahp_pairs.iter().all(|&(n, k)| n <= 2000 && k >= 1.0));

        let tiny = default_grids::<f64>(3, 20);
        let n_values: Vec<usize> = tiny.ltrahp_pairs.iter().map(|&(n, _)| n).collect();
        assert!(n_values.iter().all(|&n| n == 16));

        for (n, k) in default_grids::<f64>(4, 500).ltrahp_pairs {
            assert!(n > 0 && k > 0.0);
        }
    }

    #[test]
    fn default_grid_respects_feature_cap() {
        // d=3, m=500: feature count l^3 must stay within 500, so l <= 7.
        let grids = default_grids::<f64>(3, 500);
        assert_eq!(*grids.ltdahp_thresholds.last().unwrap(), 7);
    }
}
