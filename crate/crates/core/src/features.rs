//! Hypothesis-space construction and design-matrix assembly.
//!
//! A hypothesis space is spanned by features `x -> phi(K (w . x - b))` built
//! from unit inner weights `w` and thresholds `b`. The deterministic scheme
//! uses the product layout: every inner weight shares one fixed threshold
//! grid, so `n_weights * n_thresholds` features. The random baseline pairs
//! each weight with its own threshold.
//!
//! Inputs are expected in the closed unit ball; [`normalize_inputs`] maps raw
//! data there (per-column affine to `[-1, 1]`, then a global `1/sqrt(d)`
//! shrink) and returns the reusable [`Normalizer`].

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::activation::{logistic_min_scale, ActivationKind, ScaledActivation};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sphere::{eq_points, SphereConfig};

/// Slack allowed on the unit-ball precondition of design-matrix rows.
pub const DOMAIN_TOL: f64 = 1e-9;

/// How inner weights combine with thresholds to form features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureLayout {
    /// Every weight is paired with every threshold; feature `(j, k)` sits at
    /// column `j * n_thresholds + k` (weight-major).
    Product,
    /// Weight `j` is paired with threshold `j` only; one column per weight.
    Paired,
}

/// Fully parameterized feature map: dimension, inner weights, thresholds,
/// scaled activation, and their wiring.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSpec<S> {
    layout: FeatureLayout,
    inner_weights: SphereConfig<S>,
    thresholds: Vec<S>,
    activation: ScaledActivation<S>,
}

impl<S: Real> HypothesisSpec<S> {
    /// Builds the deterministic product-layout space for inputs in `B^d`.
    ///
    /// Inner weights are the `n_weights` equal-area sphere points (default
    /// `n_thresholds^{d-1}`), thresholds the fixed grid, and the activation
    /// scale follows the minimum-saturation rule unless overridden. The step
    /// activation is scale-invariant, so it uses scale 1.
    pub fn build(
        d: usize,
        n_thresholds: usize,
        kind: ActivationKind,
        scale_override: Option<S>,
        n_weights_override: Option<usize>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid(format!("need d >= 2, got {d}")));
        }
        if n_thresholds < 1 {
            return Err(Error::invalid("threshold count must be >= 1"));
        }
        let n_weights = match n_weights_override {
            Some(n) => {
                if n < 1 {
                    return Err(Error::invalid("weight count must be >= 1"));
                }
                n
            }
            None => n_thresholds.pow((d - 1) as u32).max(1),
        };
        let scale = match scale_override {
            Some(k) => k,
            None => match kind {
                ActivationKind::Logistic => logistic_min_scale(n_thresholds)?,
                // Any positive scale gives the same step features.
                ActivationKind::Heaviside => S::one(),
            },
        };
        Ok(HypothesisSpec {
            layout: FeatureLayout::Product,
            inner_weights: eq_points(d, n_weights)?,
            thresholds: threshold_grid(n_thresholds)?,
            activation: ScaledActivation::new(kind, scale)?,
        })
    }

    /// Assembles a spec from parts; used by the random baseline and by model
    /// deserialization.
    pub fn from_parts(
        layout: FeatureLayout,
        inner_weights: SphereConfig<S>,
        thresholds: Vec<S>,
        activation: ScaledActivation<S>,
    ) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::invalid("need at least one threshold"));
        }
        if layout == FeatureLayout::Paired && thresholds.len() != inner_weights.len() {
            return Err(Error::DimensionMismatch {
                expected: inner_weights.len(),
                got: thresholds.len(),
            });
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("threshold list".into()));
        }
        Ok(HypothesisSpec { layout, inner_weights, thresholds, activation })
    }

    pub fn layout(&self) -> FeatureLayout {
        self.layout
    }

    /// Input dimension `d`.
    pub fn input_dim(&self) -> usize {
        self.inner_weights.ambient_dim()
    }

    pub fn n_weights(&self) -> usize {
        self.inner_weights.len()
    }

    pub fn n_thresholds(&self) -> usize {
        self.thresholds.len()
    }

    /// Total feature (column) count.
    pub fn feature_count(&self) -> usize {
        match self.layout {
            FeatureLayout::Product => self.n_weights() * self.n_thresholds(),
            FeatureLayout::Paired => self.n_weights(),
        }
    }

    pub fn inner_weights(&self) -> &SphereConfig<S> {
        &self.inner_weights
    }

    pub fn thresholds(&self) -> &[S] {
        &self.thresholds
    }

    pub fn activation(&self) -> &ScaledActivation<S> {
        &self.activation
    }

    /// Column of feature `(weight j, threshold k)` in the product layout.
    pub fn column_of(&self, j: usize, k: usize) -> usize {
        match self.layout {
            FeatureLayout::Product => j * self.n_thresholds() + k,
            FeatureLayout::Paired => {
                debug_assert_eq!(j, k);
                j
            }
        }
    }

    /// Feature row for a single normalized input point (length
    /// `feature_count`); `out` is overwritten.
    fn feature_row(&self, x: ArrayView1<S>, out: &mut [S]) {
        let weights = self.inner_weights.points();
        match self.layout {
            FeatureLayout::Product => {
                for (j, w) in weights.rows().into_iter().enumerate() {
                    let dot = w.dot(&x);
                    for (k, &b) in self.thresholds.iter().enumerate() {
                        out[j * self.thresholds.len() + k] = self.activation.eval(dot - b);
                    }
                }
            }
            FeatureLayout::Paired => {
                for (j, w) in weights.rows().into_iter().enumerate() {
                    let dot = w.dot(&x);
                    out[j] = self.activation.eval(dot - self.thresholds[j]);
                }
            }
        }
    }
}

/// The fixed threshold grid `-1/2 + k/l` for `k = 1..=l`; strictly
/// increasing, last element exactly `1/2`.
pub fn threshold_grid<S: Real>(n_thresholds: usize) -> Result<Vec<S>> {
    if n_thresholds < 1 {
        return Err(Error::invalid("threshold count must be >= 1"));
    }
    let l = n_thresholds as f64;
    Ok((1..=n_thresholds)
        .map(|k| S::from_f64_lossy(-0.5 + (k as f64) / l))
        .collect())
}

/// Design matrix: activation outputs of every feature at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<S> {
    values: Array2<S>,
}

impl<S: Real> DesignMatrix<S> {
    /// Rows are samples, columns follow the spec's column order.
    pub fn values(&self) -> &Array2<S> {
        &self.values
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn into_values(self) -> Array2<S> {
        self.values
    }
}

/// Evaluates the feature map at every row of `x` (already in the unit ball).
///
/// Rejects any row with norm above `1 + DOMAIN_TOL`, naming the offending
/// row. Entry `(i, column_of(j, k))` is `phi(K (w_j . x_i - b_k))`; the
/// computation is deterministic, row order preserved.
pub fn design_matrix<S: Real>(spec: &HypothesisSpec<S>, x: ArrayView2<S>) -> Result<DesignMatrix<S>> {
    if x.ncols() != spec.input_dim() {
        return Err(Error::DimensionMismatch { expected: spec.input_dim(), got: x.ncols() });
    }
    let limit = S::from_f64_lossy(1.0 + DOMAIN_TOL);
    for (i, row) in x.rows().into_iter().enumerate() {
        let norm = row.dot(&row).sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite(format!("input row {i}")));
        }
        if norm > limit {
            return Err(Error::OutOfDomain { row: i, norm: norm.to_f64_lossy() });
        }
    }
    let m = x.nrows();
    let cols = spec.feature_count();
    let mut values = Array2::zeros((m, cols));
    for (i, row) in x.rows().into_iter().enumerate() {
        let mut out = values.row_mut(i);
        spec.feature_row(row, out.as_slice_mut().expect("row-major layout"));
    }
    Ok(DesignMatrix { values })
}

/// Per-column affine map to `[-1, 1]` followed by a global `1/sqrt(d)`
/// shrink, fitted on training data. Constant columns map to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer<S> {
    col_min: Vec<S>,
    col_max: Vec<S>,
}

impl<S: Real> Normalizer<S> {
    pub fn from_bounds(col_min: Vec<S>, col_max: Vec<S>) -> Result<Self> {
        if col_min.len() != col_max.len() {
            return Err(Error::DimensionMismatch { expected: col_min.len(), got: col_max.len() });
        }
        if col_min.is_empty() {
            return Err(Error::invalid("normalizer needs at least one column"));
        }
        for (lo, hi) in col_min.iter().zip(&col_max) {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::NonFinite("normalizer bounds".into()));
            }
            if lo > hi {
                return Err(Error::invalid("normalizer lower bound above upper bound"));
            }
        }
        Ok(Normalizer { col_min, col_max })
    }

    pub fn dim(&self) -> usize {
        self.col_min.len()
    }

    pub fn bounds(&self) -> (&[S], &[S]) {
        (&self.col_min, &self.col_max)
    }

    fn ball_scale(&self) -> S {
        S::one() / S::from_f64_lossy(self.dim() as f64).sqrt()
    }

    /// Applies the stored map to a matrix of raw inputs.
    pub fn apply(&self, x_raw: ArrayView2<S>) -> Result<Array2<S>> {
        if x_raw.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x_raw.ncols() });
        }
        let scale = self.ball_scale();
        let two = S::from_f64_lossy(2.0);
        let mut out = x_raw.to_owned();
        for (c, mut col) in out.columns_mut().into_iter().enumerate() {
            let (lo, hi) = (self.col_min[c], self.col_max[c]);
            let width = hi - lo;
            for v in col.iter_mut() {
                *v = if width > S::zero() {
                    (two * (*v - lo) / width - S::one()) * scale
                } else {
                    S::zero()
                };
            }
        }
        Ok(out)
    }

    /// Applies the map and then radially projects any point that lands
    /// outside the closed unit ball back onto the unit sphere, so query
    /// points beyond the training range stay in the feature map's domain.
    pub fn apply_clamped(&self, x_raw: ArrayView2<S>) -> Result<Array2<S>> {
        let mut out = self.apply(x_raw)?;
        for mut row in out.rows_mut() {
            let norm = row.dot(&row).sqrt();
            if norm > S::one() {
                for v in row.iter_mut() {
                    *v /= norm;
                }
            }
        }
        Ok(out)
    }
}

/// Fits a [`Normalizer`] on raw training inputs and returns the normalized
/// matrix together with it. Every output row lies in the closed unit ball.
pub fn normalize_inputs<S: Real>(x_raw: ArrayView2<S>) -> Result<(Array2<S>, Normalizer<S>)> {
    let (m, d) = x_raw.dim();
    if m == 0 || d == 0 {
        return Err(Error::invalid("empty input matrix"));
    }
    let mut col_min = vec![S::infinity(); d];
    let mut col_max = vec![S::neg_infinity(); d];
    for row in x_raw.rows() {
        for (c, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("input column {c}")));
            }
            if v < col_min[c] {
                col_min[c] = v;
            }
            if v > col_max[c] {
                col_max[c] = v;
            }
        }
    }
    let normalizer = Normalizer::from_bounds(col_min, col_max)?;
    let normalized = normalizer.apply(x_raw)?;
    Ok((normalized, normalizer))
}
