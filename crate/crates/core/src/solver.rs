//! Ridge-regularized linear least squares and the truncation operator.
//!
//! The objective is `(1/m) ||X a - y||^2 + lambda ||a||^2`; keeping the `1/m`
//! inside the data term gives `lambda` the same meaning at every sample size.
//! [`ridge_solve`] returns its exact minimizer:
//!
//! * `lambda = 0`: minimum-norm least-squares solution via SVD, so the
//!   rank-deficient case is well defined.
//! * `lambda > 0`: Cholesky solve of the regularized normal system with one
//!   step of iterative refinement. If the returned gradient misses the
//!   [`GRADIENT_TOL`] contract (or the factorization fails), the solve falls
//!   back to a symmetric eigendecomposition of the Gram matrix.
//!
//! Every returned solution is checked against the gradient-norm contract
//! below rather than trusted blindly.
//!
//! Factorizations run through LAPACK, whose internal parallelism makes
//! results deterministic only for a fixed thread count; the gradient
//! contract holds regardless.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, FactorizeC, LeastSquaresSvd, SolveC, UPLO};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{Real, SolverReal};

/// Contract on the returned minimizer: the objective gradient at the
/// solution has Euclidean norm at most `GRADIENT_TOL * max(1, ||X^T y|| / m)`
/// at `f64` precision. Coarser scalars widen the factor to `100 * epsilon`.
pub const GRADIENT_TOL: f64 = 1e-8;

/// A ridge least-squares problem.
#[derive(Debug, Clone)]
pub struct RidgeProblem<S> {
    design: Array2<S>,
    targets: Array1<S>,
    lambda: S,
}

impl<S: Real> RidgeProblem<S> {
    pub fn new(design: Array2<S>, targets: Array1<S>, lambda: S) -> Result<Self> {
        if design.nrows() != targets.len() {
            return Err(Error::DimensionMismatch { expected: design.nrows(), got: targets.len() });
        }
        if design.nrows() == 0 {
            return Err(Error::invalid("ridge problem needs at least one sample"));
        }
        if !lambda.is_finite() || lambda < S::zero() {
            return Err(Error::invalid(format!(
                "ridge weight must be finite and >= 0, got {}",
                lambda.to_f64_lossy()
            )));
        }
        if design.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix".into()));
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target vector".into()));
        }
        Ok(RidgeProblem { design, targets, lambda })
    }

    pub fn n_samples(&self) -> usize {
        self.design.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.design.ncols()
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn design(&self) -> &Array2<S> {
        &self.design
    }

    pub fn targets(&self) -> &Array1<S> {
        &self.targets
    }
}

/// Solution coefficients, ordered to match the design-matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<S> {
    values: Array1<S>,
}

impl<S: Real> Coefficients<S> {
    pub fn new(values: Array1<S>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("coefficients".into()));
        }
        Ok(Coefficients { values })
    }

    pub fn values(&self) -> &Array1<S> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> S {
        Float::sqrt(self.values.dot(&self.values))
    }
}

/// Value of the ridge objective `(1/m) ||X a - y||^2 + lambda ||a||^2`.
pub fn objective<S: Real>(problem: &RidgeProblem<S>, coeffs: &Coefficients<S>) -> S {
    let m = S::from_f64_lossy(problem.n_samples() as f64);
    let residual = &problem.design.dot(coeffs.values()) - &problem.targets;
    residual.dot(&residual) / m + problem.lambda * coeffs.values().dot(coeffs.values())
}

/// Gradient of the ridge objective: `(2/m) X^T (X a - y) + 2 lambda a`.
pub fn gradient<S: Real>(problem: &RidgeProblem<S>, coeffs: &Coefficients<S>) -> Array1<S> {
    let m = S::from_f64_lossy(problem.n_samples() as f64);
    let two = S::from_f64_lossy(2.0);
    let residual = &problem.design.dot(coeffs.values()) - &problem.targets;
    let mut g = problem.design.t().dot(&residual);
    g.iter_mut()
        .zip(coeffs.values().iter())
        .for_each(|(gi, &ai)| *gi = two * *gi / m + two * problem.lambda * ai);
    g
}

/// Minimizes the ridge objective; see the module docs for the method.
pub fn ridge_solve<S: SolverReal>(problem: &RidgeProblem<S>) -> Result<Coefficients<S>> {
    let tol = gradient_bound(problem);

    if problem.lambda == S::zero() {
        let result = problem
            .design
            .least_squares(&problem.targets)
            .map_err(|e| Error::Linalg(format!("svd least squares failed: {e}")))?;
        let coeffs = Coefficients::new(result.solution)?;
        return check_contract(problem, coeffs, tol, "svd least squares");
    }

    let m = S::from_f64_lossy(problem.n_samples() as f64);
    let gram = problem.design.t().dot(&problem.design);
    let rhs = problem.design.t().dot(&problem.targets).mapv(|v| v / m);
    let mut system = gram.mapv(|v| v / m);
    for i in 0..system.nrows() {
        system[[i, i]] += problem.lambda;
    }

    if let Ok(factor) = system.factorizec(UPLO::Lower) {
        if let Ok(mut solution) = factor.solvec(&rhs) {
            // One round of iterative refinement with the same factor.
            let residual = &rhs - &system.dot(&solution);
            if let Ok(correction) = factor.solvec(&residual) {
                solution += &correction;
            }
            if let Ok(coeffs) = Coefficients::new(solution) {
                if grad_norm(problem, &coeffs) <= tol {
                    return Ok(coeffs);
                }
            }
        }
    }

    // Spectral fallback: eigendecomposition of the Gram matrix.
    let (eigvals, eigvecs) = gram
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("eigendecomposition failed: {e}")))?;
    let projected = eigvecs.t().dot(&rhs);
    let scaled = Array1::from_iter(projected.iter().zip(eigvals.iter()).map(|(&p, &e)| {
        let e = if e > S::zero() { e } else { S::zero() };
        p / (e / m + problem.lambda)
    }));
    let mut solution = eigvecs.dot(&scaled);
    let residual = &rhs - &system.dot(&solution);
    let projected_r = eigvecs.t().dot(&residual);
    let scaled_r = Array1::from_iter(projected_r.iter().zip(eigvals.iter()).map(|(&p, &e)| {
        let e = if e > S::zero() { e } else { S::zero() };
        p / (e / m + problem.lambda)
    }));
    solution += &eigvecs.dot(&scaled_r);
    let coeffs = Coefficients::new(solution)?;
    check_contract(problem, coeffs, tol, "spectral solve")
}

fn gradient_bound<S: Real>(problem: &RidgeProblem<S>) -> S {
    let m = S::from_f64_lossy(problem.n_samples() as f64);
    let xty = problem.design.t().dot(&problem.targets);
    let scale = Float::max(S::one(), Float::sqrt(xty.dot(&xty)) / m);
    let factor = Float::max(
        S::from_f64_lossy(GRADIENT_TOL),
        S::epsilon() * S::from_f64_lossy(100.0),
    );
    factor * scale
}

fn grad_norm<S: Real>(problem: &RidgeProblem<S>, coeffs: &Coefficients<S>) -> S {
    let g = gradient(problem, coeffs);
    Float::sqrt(g.dot(&g))
}

fn check_contract<S: Real>(
    problem: &RidgeProblem<S>,
    coeffs: Coefficients<S>,
    tol: S,
    method: &str,
) -> Result<Coefficients<S>> {
    let norm = grad_norm(problem, &coeffs);
    if norm <= tol {
        Ok(coeffs)
    } else {
        Err(Error::Linalg(format!(
            "{method} violated the gradient contract: |grad| = {} > {}",
            norm.to_f64_lossy(),
            tol.to_f64_lossy()
        )))
    }
}

/// Sign-preserving clamp of `v` to `[-bound, bound]`; requires `bound > 0`.
pub fn truncate<S: Real>(v: S, bound: S) -> Result<S> {
    if !(bound > S::zero()) {
        return Err(Error::invalid(format!(
            "truncation bound must be > 0, got {}",
            bound.to_f64_lossy()
        )));
    }
    Ok(clamp_to(v, bound))
}

#[inline]
pub(crate) fn clamp_to<S: Real>(v: S, bound: S) -> S {
    v.signum() * Float::min(bound, v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_problem(seed: u64, m: usize, n: usize, lambda: f64) -> RidgeProblem<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let design = Array2::from_shape_fn((m, n), |_| rng.random_range(-1.0..1.0));
        let targets = Array1::from_shape_fn(m, |_| rng.random_range(-1.0..1.0));
        RidgeProblem::new(design, targets, lambda).unwrap()
    }

    /// Independent oracle: Gaussian elimination with partial pivoting on the
    /// explicitly formed normal equations (X^T X / m + lambda I) a = X^T y / m.
    fn normal_equation_oracle(problem: &RidgeProblem<f64>) -> Vec<f64> {
        let m = problem.n_samples() as f64;
        let n = problem.n_features();
        let x = problem.design();
        let y = problem.targets();
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for r in 0..problem.n_samples() {
                    acc += x[[r, i]] * x[[r, j]];
                }
                a[i][j] = acc / m + if i == j { problem.lambda() } else { 0.0 };
            }
            let mut acc = 0.0;
            for r in 0..problem.n_samples() {
                acc += x[[r, i]] * y[r];
            }
            a[i][n] = acc / m;
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs())).unwrap();
            a.swap(col, pivot);
            for row in (col + 1)..n {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        let mut sol = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = a[row][n];
            for k in (row + 1)..n {
                acc -= a[row][k] * sol[k];
            }
            sol[row] = acc / a[row][row];
        }
        sol
    }

    #[test]
    fn identity_design_interpolates_at_zero_ridge() {
        let design = Array2::<f64>::eye(5);
        let targets = array![1.0, -2.0, 0.5, 3.0, 0.0];
        let problem = RidgeProblem::new(design, targets.clone(), 0.0).unwrap();
        let coeffs = ridge_solve(&problem).unwrap();
        for (a, y) in coeffs.values().iter().zip(targets.iter()) {
            assert!((a - y).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_analytic_optimum() {
        // minimize (a - 2)^2 + a^2  =>  a = 1
        let problem = RidgeProblem::new(array![[1.0]], array![2.0], 1.0).unwrap();
        let coeffs = ridge_solve(&problem).unwrap();
        assert!((coeffs.values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_independent_normal_equation_oracle() {
        for seed in 0..20u64 {
            let problem = random_problem(seed, 50, 10, 1e-4);
            let coeffs = ridge_solve(&problem).unwrap();
            let oracle = normal_equation_oracle(&problem);
            let norm = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (got, want) in coeffs.values().iter().zip(&oracle) {
                assert!(
                    (got - want).abs() <= 1e-8 * norm.max(1.0),
                    "seed {seed}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn gradient_contract_holds_on_random_problems() {
        for seed in 0..20u64 {
            let problem = random_problem(seed + 100, 50, 10, 1e-4);
            let coeffs = ridge_solve(&problem).unwrap();
            let g = gradient(&problem, &coeffs);
            let gnorm = g.dot(&g).sqrt();
            let xty = problem.design().t().dot(problem.targets());
            let bound = GRADIENT_TOL * (xty.dot(&xty).sqrt() / 50.0).max(1.0);
            assert!(gnorm <= bound, "seed {seed}: |grad| {gnorm} > {bound}");
        }
    }

    #[test]
    fn rank_deficient_zero_ridge_returns_minimum_norm_solution() {
        // X = [1 1] has infinitely many interpolants; min-norm is [1, 1].
        let problem = RidgeProblem::new(array![[1.0, 1.0]], array![2.0], 0.0).unwrap();
        let coeffs = ridge_solve(&problem).unwrap();
        assert!((coeffs.values()[0] - 1.0).abs() < 1e-10);
        assert!((coeffs.values()[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn larger_ridge_shrinks_coefficients() {
        let mut prev = f64::INFINITY;
        for lambda in [1e-6, 1e-4, 1e-2, 1.0, 100.0] {
            let problem = random_problem(7, 40, 8, lambda);
            let coeffs = ridge_solve(&problem).unwrap();
            let norm = coeffs.norm();
            assert!(norm <= prev + 1e-12, "norm not shrinking at lambda={lambda}");
            prev = norm;
        }
    }

    #[test]
    fn solution_beats_random_perturbations() {
        let problem = random_problem(42, 30, 6, 1e-3);
        let coeffs = ridge_solve(&problem).unwrap();
        let base = objective(&problem, &coeffs);
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..100 {
            let delta = Array1::from_shape_fn(6, |_| rng.random_range(-1.0..1.0));
            let scale = 1e-3 / delta.dot(&delta).sqrt();
            let perturbed = Coefficients::new(coeffs.values() + &(delta * scale)).unwrap();
            assert!(objective(&problem, &perturbed) >= base - 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_problems() {
        assert!(RidgeProblem::new(array![[1.0], [2.0]], array![1.0], 0.0).is_err());
        assert!(RidgeProblem::new(array![[1.0]], array![1.0], -1.0).is_err());
        assert!(RidgeProblem::new(array![[f64::NAN]], array![1.0], 0.0).is_err());
        assert!(RidgeProblem::new(array![[1.0]], array![f64::INFINITY], 0.0).is_err());
    }

    #[test]
    fn truncate_examples() {
        assert_eq!(truncate(1.5, 1.0).unwrap(), 1.0);
        assert_eq!(truncate(-3.0, 2.0).unwrap(), -2.0);
        assert_eq!(truncate(0.3, 5.0).unwrap(), 0.3);
        assert!(truncate(1.0, 0.0).is_err());
        assert!(truncate(1.0, -2.0).is_err());
    }

    #[test]
    fn truncate_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v: f64 = rng.random_range(-10.0..10.0);
            let bound: f64 = rng.random_range(0.1..5.0);
            let once = truncate(v, bound).unwrap();
            assert_eq!(truncate(once, bound).unwrap(), once);
            assert!(once.abs() <= bound);
        }
    }

    #[test]
    fn objective_at_solution_not_above_zero_vector() {
        let problem = random_problem(9, 25, 5, 1e-4);
        let coeffs = ridge_solve(&problem).unwrap();
        let zero = Coefficients::new(Array1::zeros(5)).unwrap();
        assert!(objective(&problem, &coeffs) <= objective(&problem, &zero));
    }
}
