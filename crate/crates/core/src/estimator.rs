//! End-to-end fitting and prediction for both hidden-parameter schemes.
//!
//! `ltdahp` (deterministic): inner weights are equal-area sphere points, the
//! thresholds a fixed grid, and only the linear coefficients are solved for.
//! Two fits on identical inputs produce byte-identical models.
//!
//! `ltrahp` (random baseline): inner weights drawn uniformly on the sphere
//! (normalized Gaussians) and thresholds uniformly on `[-1/2, 1/2]`, from a
//! seeded generator recorded in the model.
//!
//! Predictions are truncated to `[-M, M]` where `M` defaults to the largest
//! absolute training target.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::time::SystemTime;

use ndarray::{Array1, Array2, ArrayView2};
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::activation::{ActivationKind, ScaledActivation};
use crate::error::{Error, Result};
use crate::features::{
    design_matrix, normalize_inputs, FeatureLayout, HypothesisSpec, Normalizer,
};
use crate::scalar::{Real, SolverReal};
use crate::solver::{clamp_to, ridge_solve, Coefficients, RidgeProblem};
use crate::sphere::SphereConfig;

/// Default ridge weight used by fits and the CLI.
pub const DEFAULT_LAMBDA: f64 = 1e-4;

/// Hidden-parameter assignment scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Deterministic assignment.
    Ltdahp,
    /// Random (seeded) assignment.
    Ltrahp,
}

impl Scheme {
    pub fn token(self) -> &'static str {
        match self {
            Scheme::Ltdahp => "ltdahp",
            Scheme::Ltrahp => "ltrahp",
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        match token {
            "ltdahp" => Ok(Scheme::Ltdahp),
            "ltrahp" => Ok(Scheme::Ltrahp),
            other => Err(Error::invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Synthetic,
    File(String),
    InMemory,
}

/// A supervised regression dataset: `m x d` inputs and `m` targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<S> {
    inputs: Array2<S>,
    targets: Array1<S>,
    provenance: Provenance,
}

impl<S: Real> Dataset<S> {
    pub fn new(inputs: Array2<S>, targets: Array1<S>, provenance: Provenance) -> Result<Self> {
        let (m, d) = inputs.dim();
        if m < 1 {
            return Err(Error::invalid("dataset needs at least one sample"));
        }
        if d < 2 {
            return Err(Error::invalid(format!("dataset dimension must be >= 2, got {d}")));
        }
        if targets.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: targets.len() });
        }
        if inputs.iter().any(|v| !v.is_finite()) || targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset".into()));
        }
        Ok(Dataset { inputs, targets, provenance })
    }

    pub fn n_samples(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.ncols()
    }

    pub fn inputs(&self) -> &Array2<S> {
        &self.inputs
    }

    pub fn targets(&self) -> &Array1<S> {
        &self.targets
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("empty row subset"));
        }
        let d = self.input_dim();
        let mut inputs = Array2::zeros((rows.len(), d));
        let mut targets = Array1::zeros(rows.len());
        for (out, &r) in rows.iter().enumerate() {
            if r >= self.n_samples() {
                return Err(Error::invalid(format!("row {r} out of range")));
            }
            inputs.row_mut(out).assign(&self.inputs.row(r));
            targets[out] = self.targets[r];
        }
        Dataset::new(inputs, targets, self.provenance.clone())
    }
}

/// Fit metadata; the timestamp is in-memory only and never serialized, so
/// identical fits serialize to identical bytes.
#[derive(Debug, Clone)]
pub struct ModelMeta<S> {
    pub scheme: Scheme,
    pub lambda: S,
    pub fitted_at: Option<SystemTime>,
    /// Generator seed; present exactly for the random scheme.
    pub seed: Option<u64>,
}

/// A fitted model: feature-map spec, linear coefficients, truncation bound,
/// and the input normalizer captured at fit time.
#[derive(Debug, Clone)]
pub struct Model<S> {
    spec: HypothesisSpec<S>,
    coeffs: Coefficients<S>,
    bound: S,
    normalizer: Normalizer<S>,
    meta: ModelMeta<S>,
}

impl<S: Real> Model<S> {
    pub fn from_parts(
        spec: HypothesisSpec<S>,
        coeffs: Coefficients<S>,
        bound: S,
        normalizer: Normalizer<S>,
        meta: ModelMeta<S>,
    ) -> Result<Self> {
        if coeffs.len() != spec.feature_count() {
            return Err(Error::DimensionMismatch {
                expected: spec.feature_count(),
                got: coeffs.len(),
            });
        }
        if !(bound > S::zero()) {
            return Err(Error::invalid("truncation bound must be > 0"));
        }
        if normalizer.dim() != spec.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.input_dim(),
                got: normalizer.dim(),
            });
        }
        if meta.scheme == Scheme::Ltdahp && meta.seed.is_some() {
            return Err(Error::invalid("deterministic models carry no seed"));
        }
        Ok(Model { spec, coeffs, bound, normalizer, meta })
    }

    pub fn spec(&self) -> &HypothesisSpec<S> {
        &self.spec
    }

    pub fn coeffs(&self) -> &Coefficients<S> {
        &self.coeffs
    }

    /// Truncation bound `M`.
    pub fn bound(&self) -> S {
        self.bound
    }

    pub fn normalizer(&self) -> &Normalizer<S> {
        &self.normalizer
    }

    pub fn meta(&self) -> &ModelMeta<S> {
        &self.meta
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim()
    }
}

/// Parameters for a deterministic fit.
#[derive(Debug, Clone)]
pub struct LtdahpParams<S> {
    pub n_thresholds: usize,
    pub activation: ActivationKind,
    pub lambda: S,
    pub n_weights_override: Option<usize>,
    pub scale_override: Option<S>,
    pub bound_override: Option<S>,
}

impl<S: Real> LtdahpParams<S> {
    /// Defaults: logistic activation, ridge weight [`DEFAULT_LAMBDA`], no
    /// overrides.
    pub fn new(n_thresholds: usize) -> Self {
        LtdahpParams {
            n_thresholds,
            activation: ActivationKind::Logistic,
            lambda: S::from_f64_lossy(DEFAULT_LAMBDA),
            n_weights_override: None,
            scale_override: None,
            bound_override: None,
        }
    }
}

/// Parameters for a random-baseline fit.
#[derive(Debug, Clone)]
pub struct LtrahpParams<S> {
    pub n_features: usize,
    pub scale: S,
    pub lambda: S,
    pub seed: u64,
    pub activation: ActivationKind,
    pub bound_override: Option<S>,
}

impl<S: Real> LtrahpParams<S> {
    pub fn new(n_features: usize, scale: S, seed: u64) -> Self {
        LtrahpParams {
            n_features,
            scale,
            lambda: S::from_f64_lossy(DEFAULT_LAMBDA),
            seed,
            activation: ActivationKind::Logistic,
            bound_override: None,
        }
    }
}

/// Truncation bound from training targets: `max |y_i|`, or 1 when the
/// targets are identically zero (the bound must stay positive).
fn default_bound<S: Real>(targets: &Array1<S>) -> S {
    let max_abs = targets.iter().fold(S::zero(), |acc, &v| Float::max(acc, Float::abs(v)));
    if max_abs > S::zero() {
        max_abs
    } else {
        S::one()
    }
}

fn stage2<S: SolverReal>(
    spec: HypothesisSpec<S>,
    normalizer: Normalizer<S>,
    normalized: &Array2<S>,
    data: &Dataset<S>,
    lambda: S,
    bound_override: Option<S>,
    scheme: Scheme,
    seed: Option<u64>,
) -> Result<Model<S>> {
    let design = design_matrix(&spec, normalized.view())?;
    let problem = RidgeProblem::new(design.into_values(), data.targets().clone(), lambda)?;
    let coeffs = ridge_solve(&problem)?;
    let bound = bound_override.unwrap_or_else(|| default_bound(data.targets()));
    Model::from_parts(
        spec,
        coeffs,
        bound,
        normalizer,
        ModelMeta { scheme, lambda, fitted_at: Some(SystemTime::now()), seed },
    )
}

/// Deterministic two-stage fit. Stage 1 places the hidden parameters from
/// `(d, n_thresholds)` alone; Stage 2 solves the ridge problem on the
/// normalized design. No randomness anywhere.
pub fn fit_ltdahp<S: SolverReal>(
    data: &Dataset<S>,
    params: &LtdahpParams<S>,
) -> Result<Model<S>> {
    let (normalized, normalizer) = normalize_inputs(data.inputs().view())?;
    let spec = HypothesisSpec::build(
        data.input_dim(),
        params.n_thresholds,
        params.activation,
        params.scale_override,
        params.n_weights_override,
    )?;
    stage2(
        spec,
        normalizer,
        &normalized,
        data,
        params.lambda,
        params.bound_override,
        Scheme::Ltdahp,
        None,
    )
}

/// Random-baseline fit: `n_features` inner weights uniform on the sphere,
/// each paired with a threshold uniform on `[-1/2, 1/2]`, all drawn from a
/// ChaCha8 generator seeded with `params.seed` (weights first, then
/// thresholds). Stage 2 is identical to the deterministic scheme.
pub fn fit_ltrahp<S: SolverReal>(
    data: &Dataset<S>,
    params: &LtrahpParams<S>,
) -> Result<Model<S>> {
    if params.n_features < 1 {
        return Err(Error::invalid("need at least one feature"));
    }
    let d = data.input_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut weights = Array2::zeros((params.n_features, d));
    for i in 0..params.n_features {
        loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for (c, x) in v.iter().enumerate() {
                    weights[[i, c]] = S::from_f64_lossy(x / norm);
                }
                break;
            }
        }
    }
    let uniform = Uniform::new_inclusive(-0.5f64, 0.5).expect("static bounds");
    let thresholds: Vec<S> = (0..params.n_features)
        .map(|_| S::from_f64_lossy(uniform.sample(&mut rng)))
        .collect();

    let spec = HypothesisSpec::from_parts(
        FeatureLayout::Paired,
        SphereConfig::new(weights)?,
        thresholds,
        ScaledActivation::new(params.activation, params.scale)?,
    )?;
    let (normalized, normalizer) = normalize_inputs(data.inputs().view())?;
    stage2(
        spec,
        normalizer,
        &normalized,
        data,
        params.lambda,
        params.bound_override,
        Scheme::Ltrahp,
        Some(params.seed),
    )
}

/// Predicts targets for raw query rows: normalize with the stored map,
/// radially project anything outside the unit ball, evaluate the feature
/// map, and truncate to `[-M, M]`.
pub fn predict<S: Real>(model: &Model<S>, x_raw: ArrayView2<S>) -> Result<Array1<S>> {
    if x_raw.ncols() != model.input_dim() {
        return Err(Error::DimensionMismatch { expected: model.input_dim(), got: x_raw.ncols() });
    }
    let raw = predict_untruncated(model, x_raw)?;
    Ok(raw.mapv(|v| clamp_to(v, model.bound)))
}

/// Prediction without the final truncation; mostly useful for diagnostics.
pub fn predict_untruncated<S: Real>(model: &Model<S>, x_raw: ArrayView2<S>) -> Result<Array1<S>> {
    if x_raw.ncols() != model.input_dim() {
        return Err(Error::DimensionMismatch { expected: model.input_dim(), got: x_raw.ncols() });
    }
    let normalized = model.normalizer.apply_clamped(x_raw)?;
    let design = design_matrix(&model.spec, normalized.view())?;
    Ok(design.values().dot(model.coeffs.values()))
}

// ---------------------------------------------------------------------------
// Model file format
// ---------------------------------------------------------------------------
//
// Line-oriented text, header `LTDAHP1`, `#` comments allowed anywhere.
// Reals carry 17 fractional digits in scientific notation, which round-trips
// f64 exactly; save -> load -> predict is bit-identical.

const MODEL_HEADER: &str = "LTDAHP1";

fn fmt<S: Real>(v: S) -> String {
    format!("{:.17e}", v.to_f64_lossy())
}

impl<S: Real> Model<S> {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MODEL_HEADER}")?;
        writeln!(w, "scheme {}", self.meta.scheme)?;
        if let Some(seed) = self.meta.seed {
            writeln!(w, "seed {seed}")?;
        }
        writeln!(w, "d {}", self.spec.input_dim())?;
        writeln!(w, "l {}", self.spec.n_thresholds())?;
        writeln!(w, "n {}", self.spec.n_weights())?;
        writeln!(w, "K {}", fmt(self.spec.activation().scale()))?;
        writeln!(w, "lambda {}", fmt(self.meta.lambda))?;
        writeln!(w, "M {}", fmt(self.bound))?;
        writeln!(w, "activation {}", self.spec.activation().kind)?;
        writeln!(w, "normalizer {}", self.normalizer.dim())?;
        let (lo, hi) = self.normalizer.bounds();
        for (l, h) in lo.iter().zip(hi.iter()) {
            writeln!(w, "{} {}", fmt(*l), fmt(*h))?;
        }
        let weights = self.spec.inner_weights().points();
        writeln!(w, "weights {} {}", weights.nrows(), weights.ncols())?;
        for row in weights.rows() {
            let fields: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            writeln!(w, "{}", fields.join(" "))?;
        }
        writeln!(w, "thresholds {}", self.spec.n_thresholds())?;
        for &b in self.spec.thresholds() {
            writeln!(w, "{}", fmt(b))?;
        }
        writeln!(w, "coeffs {}", self.coeffs.len())?;
        for &a in self.coeffs.values() {
            writeln!(w, "{}", fmt(a))?;
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(buf)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut lines = ModelLines::new(r);

        let header = lines.next_content()?;
        if header.trim() != MODEL_HEADER {
            return Err(lines.err(format!("expected {MODEL_HEADER} header")));
        }
        let scheme = Scheme::from_token(&lines.field("scheme")?)?;
        let mut seed = None;
        let mut line = lines.next_content()?;
        if let Some(rest) = line.strip_prefix("seed ") {
            let s: u64 = rest
                .trim()
                .parse()
                .map_err(|_| lines.err("seed must be an unsigned integer"))?;
            seed = Some(s);
            line = lines.next_content()?;
        }
        let d: usize = parse_field(&lines, &line, "d")?;
        let n_thresholds: usize = lines.parse_field("l")?;
        let n_weights: usize = lines.parse_field("n")?;
        let scale: f64 = lines.parse_field("K")?;
        let lambda: f64 = lines.parse_field("lambda")?;
        let bound: f64 = lines.parse_field("M")?;
        let activation = ActivationKind::from_token(lines.field("activation")?.trim())?;

        let norm_dim: usize = lines.parse_field("normalizer")?;
        if norm_dim != d {
            return Err(lines.err("normalizer dimension differs from d"));
        }
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for _ in 0..d {
            let row = lines.real_row(2)?;
            lo.push(S::from_f64_lossy(row[0]));
            hi.push(S::from_f64_lossy(row[1]));
        }

        let shape = lines.field("weights")?;
        let dims: Vec<usize> = shape
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| lines.err("weights shape must be two integers"))?;
        if dims != [n_weights, d] {
            return Err(lines.err("weights shape differs from n and d"));
        }
        let mut weights = Array2::zeros((n_weights, d));
        for i in 0..n_weights {
            let row = lines.real_row(d)?;
            for (c, v) in row.into_iter().enumerate() {
                weights[[i, c]] = S::from_f64_lossy(v);
            }
        }

        let count: usize = lines.parse_field("thresholds")?;
        if count != n_thresholds {
            return Err(lines.err("threshold count differs from l"));
        }
        let mut thresholds = Vec::with_capacity(count);
        for _ in 0..count {
            thresholds.push(S::from_f64_lossy(lines.real_row(1)?[0]));
        }

        let n_coeffs: usize = lines.parse_field("coeffs")?;
        let mut coeffs = Vec::with_capacity(n_coeffs);
        for _ in 0..n_coeffs {
            coeffs.push(S::from_f64_lossy(lines.real_row(1)?[0]));
        }
        let tail = lines.next_content()?;
        if tail.trim() != "end" {
            return Err(lines.err("expected end marker"));
        }

        let layout = match scheme {
            Scheme::Ltdahp => FeatureLayout::Product,
            Scheme::Ltrahp => FeatureLayout::Paired,
        };
        let spec = HypothesisSpec::from_parts(
            layout,
            SphereConfig::new(weights)?,
            thresholds,
            ScaledActivation::new(activation, S::from_f64_lossy(scale))?,
        )?;
        Model::from_parts(
            spec,
            Coefficients::new(Array1::from_vec(coeffs))?,
            S::from_f64_lossy(bound),
            Normalizer::from_bounds(lo, hi)?,
            ModelMeta { scheme, lambda: S::from_f64_lossy(lambda), fitted_at: None, seed },
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(BufReader::new(file))
    }
}

fn parse_field<T: std::str::FromStr, R: Read>(
    lines: &ModelLines<R>,
    line: &str,
    key: &str,
) -> Result<T> {
    let rest = line
        .strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| lines.err(format!("expected field {key:?}")))?;
    rest.parse().map_err(|_| lines.err(format!("bad value for {key:?}: {rest:?}")))
}

/// Line reader that skips comments/blanks and tracks the line number for
/// error reporting.
struct ModelLines<R> {
    lines: std::io::Lines<BufReader<R>>,
    line_no: usize,
}

impl<R: Read> ModelLines<R> {
    fn new(r: R) -> Self {
        ModelLines { lines: BufReader::new(r).lines(), line_no: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line_no, msg: msg.into() }
    }

    fn next_content(&mut self) -> Result<String> {
        for line in self.lines.by_ref() {
            let line = line?;
            self.line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(trimmed.to_string());
        }
        Err(Error::Parse { line: self.line_no, msg: "unexpected end of model file".into() })
    }

    fn field(&mut self, key: &str) -> Result<String> {
        let line = self.next_content()?;
        line.strip_prefix(key)
            .map(|rest| rest.trim().to_string())
            .ok_or_else(|| self.err(format!("expected field {key:?}, got {line:?}")))
    }

    fn parse_field<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let rest = self.field(key)?;
        rest.parse().map_err(|_| self.err(format!("bad value for {key:?}: {rest:?}")))
    }

    fn real_row(&mut self, expected: usize) -> Result<Vec<f64>> {
        let line = self.next_content()?;
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("expected {expected} numbers, got {line:?}")))?;
        if row.len() != expected {
            return Err(self.err(format!("expected {expected} numbers, got {}", row.len())));
        }
        Ok(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench;
    use crate::solver;
    use ndarray::array;
    use rand::Rng;

    fn toy_data(m: usize, seed: u64) -> Dataset<f64> {
        bench::gen_toy(m, 0.1, seed, true).unwrap()
    }

    /// Targets that are exactly the first feature column of the spec the fit
    /// will build, evaluated on the same normalized inputs.
    fn representable_data(m: usize) -> (Dataset<f64>, usize) {
        let n_thresholds = 4usize;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let inputs = Array2::from_shape_fn((m, 3), |_| rng.random_range(-1.0..1.0));
        let (normalized, _) = normalize_inputs(inputs.view()).unwrap();
        let spec: HypothesisSpec<f64> =
            HypothesisSpec::build(3, n_thresholds, ActivationKind::Logistic, None, None).unwrap();
        let design = design_matrix(&spec, normalized.view()).unwrap();
        let targets = design.values().column(0).to_owned();
        (Dataset::new(inputs, targets, Provenance::InMemory).unwrap(), n_thresholds)
    }

    #[test]
    fn exact_representability_interpolates() {
        let (data, n_thresholds) = representable_data(64); // m = feature count
        let mut params = LtdahpParams::new(n_thresholds);
        params.lambda = 0.0;
        let model = fit_ltdahp(&data, &params).unwrap();
        let preds = predict(&model, data.inputs().view()).unwrap();
        let rmse = bench::rmse(preds.view(), data.targets().view()).unwrap();
        assert!(rmse < 1e-6, "training rmse {rmse}");
        for (p, y) in preds.iter().zip(data.targets().iter()) {
            assert!((p - y).abs() < 1e-6, "training point missed: {p} vs {y}");
        }
    }

    #[test]
    fn deterministic_fits_serialize_identically() {
        let data = toy_data(300, 5);
        let params = LtdahpParams::new(3);
        let a = fit_ltdahp(&data, &params).unwrap().to_bytes().unwrap();
        let b = fit_ltdahp(&data, &params).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_targets_match_single_column_projection() {
        // One weight, one threshold: the least-squares projection of a
        // constant onto the single feature column has a closed form.
        let c = 2.5f64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inputs = Array2::from_shape_fn((40, 2), |_| rng.random_range(-1.0..1.0));
        let targets = Array1::from_elem(40, c);
        let data = Dataset::new(inputs, targets, Provenance::InMemory).unwrap();
        let mut params = LtdahpParams::new(1);
        params.lambda = 0.0;
        // The raw projection can overshoot the targets' max, so lift the
        // truncation bound out of the way to observe the pure solve.
        params.bound_override = Some(1e6);
        let model = fit_ltdahp(&data, &params).unwrap();

        let (normalized, _) = normalize_inputs(data.inputs().view()).unwrap();
        let design = design_matrix(model.spec(), normalized.view()).unwrap();
        let col = design.values().column(0);
        let a = c * col.sum() / col.dot(&col);
        let preds = predict(&model, data.inputs().view()).unwrap();
        for (p, phi) in preds.iter().zip(col.iter()) {
            assert!((p - a * phi).abs() < 1e-6);
        }
    }

    #[test]
    fn ltrahp_same_seed_reproduces_bitwise() {
        let data = toy_data(120, 8);
        let params = LtrahpParams::new(24, 4.0, 42);
        let a = fit_ltrahp(&data, &params).unwrap().to_bytes().unwrap();
        let b = fit_ltrahp(&data, &params).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ltrahp_different_seeds_give_different_weights() {
        let data = toy_data(60, 8);
        let a = fit_ltrahp(&data, &LtrahpParams::new(10, 4.0, 0)).unwrap();
        let b = fit_ltrahp(&data, &LtrahpParams::new(10, 4.0, 1)).unwrap();
        let wa = a.spec().inner_weights().points();
        let wb = b.spec().inner_weights().points();
        let min_gap = wa
            .rows()
            .into_iter()
            .flat_map(|ra| {
                wb.rows().into_iter().map(move |rb| {
                    ra.iter().zip(rb.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>()
                })
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap > 0.0);
    }

    #[test]
    fn predictions_respect_truncation_bound() {
        let data = toy_data(200, 2);
        let model = fit_ltdahp(&data, &LtdahpParams::new(4)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        // Queries far outside the training box exercise the radial clamp.
        let queries = Array2::from_shape_fn((500, 3), |_| rng.random_range(-5.0..5.0));
        let preds = predict(&model, queries.view()).unwrap();
        for &p in preds.iter() {
            assert!(p.abs() <= model.bound());
        }
    }

    #[test]
    fn zero_coefficients_predict_zero() {
        let data = toy_data(50, 1);
        let fitted = fit_ltdahp(&data, &LtdahpParams::new(2)).unwrap();
        let zeros = Coefficients::new(Array1::zeros(fitted.coeffs().len())).unwrap();
        let model = Model::from_parts(
            fitted.spec().clone(),
            zeros,
            fitted.bound(),
            fitted.normalizer().clone(),
            fitted.meta().clone(),
        )
        .unwrap();
        let preds = predict(&model, data.inputs().view()).unwrap();
        assert!(preds.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let data = toy_data(50, 1);
        let model = fit_ltdahp(&data, &LtdahpParams::new(2)).unwrap();
        let queries = Array2::<f64>::zeros((3, 4));
        assert!(matches!(
            predict(&model, queries.view()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fitted_objective_not_above_zero_coefficients() {
        let data = toy_data(150, 4);
        let model = fit_ltdahp(&data, &LtdahpParams::new(3)).unwrap();
        let (normalized, _) = normalize_inputs(data.inputs().view()).unwrap();
        let design = design_matrix(model.spec(), normalized.view()).unwrap();
        let problem = RidgeProblem::new(
            design.into_values(),
            data.targets().clone(),
            model.meta().lambda,
        )
        .unwrap();
        let zero = Coefficients::new(Array1::zeros(model.coeffs().len())).unwrap();
        assert!(
            solver::objective(&problem, model.coeffs())
                <= solver::objective(&problem, &zero)
        );
    }

    #[test]
    fn save_load_round_trip_preserves_predictions_bitwise() {
        let data = toy_data(150, 11);
        for model in [
            fit_ltdahp(&data, &LtdahpParams::new(3)).unwrap(),
            fit_ltrahp(&data, &LtrahpParams::new(20, 8.0, 9)).unwrap(),
        ] {
            let bytes = model.to_bytes().unwrap();
            let loaded = Model::<f64>::read_from(&bytes[..]).unwrap();
            let before = predict(&model, data.inputs().view()).unwrap();
            let after = predict(&loaded, data.inputs().view()).unwrap();
            assert_eq!(before, after);
            assert_eq!(loaded.to_bytes().unwrap(), bytes);
        }
    }

    #[test]
    fn model_invariants_enforced() {
        let data = toy_data(50, 1);
        let model = fit_ltdahp(&data, &LtdahpParams::new(2)).unwrap();
        // Seed on a deterministic model is rejected.
        let mut meta = model.meta().clone();
        meta.seed = Some(1);
        assert!(Model::from_parts(
            model.spec().clone(),
            model.coeffs().clone(),
            model.bound(),
            model.normalizer().clone(),
            meta,
        )
        .is_err());
        // Wrong coefficient count is rejected.
        let short = Coefficients::new(array![1.0]).unwrap();
        assert!(Model::from_parts(
            model.spec().clone(),
            short,
            model.bound(),
            model.normalizer().clone(),
            model.meta().clone(),
        )
        .is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(Array2::<f64>::zeros((0, 3)), Array1::zeros(0), Provenance::InMemory)
            .is_err());
        assert!(Dataset::new(Array2::<f64>::zeros((3, 1)), Array1::zeros(3), Provenance::InMemory)
            .is_err());
        assert!(Dataset::new(array![[1.0, f64::NAN]], array![1.0], Provenance::InMemory).is_err());
        assert!(Dataset::new(array![[1.0, 2.0]], array![1.0, 2.0], Provenance::InMemory).is_err());
    }

    #[test]
    fn subset_picks_rows_in_order() {
        let data = Dataset::new(
            array![[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]],
            array![1.0, 2.0, 3.0],
            Provenance::InMemory,
        )
        .unwrap();
        let sub = data.subset(&[2, 0]).unwrap();
        assert_eq!(sub.targets(), &array![3.0, 1.0]);
        assert!(data.subset(&[5]).is_err());
        assert!(data.subset(&[]).is_err());
    }
}
