//! Riesz energy of a configuration and projected-gradient refinement.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{pair_distance_sq, RieszParams, SphereConfig};

/// Riesz energy over ordered pairs: `sum_{i != j} |x_i - x_j|^{-tau}` for
/// `tau > 0`, and `sum_{i != j} -log |x_i - x_j|` for `tau = 0`.
///
/// Errors on coincident points, where the energy would be infinite. The pair
/// sum runs in a fixed order, so the result is reproducible.
pub fn riesz_energy<S: Real>(config: &SphereConfig<S>, params: &RieszParams<S>) -> Result<S> {
    energy_of_points(config.points(), params)
}

fn energy_of_points<S: Real>(pts: &Array2<S>, params: &RieszParams<S>) -> Result<S> {
    let n = pts.nrows();
    let tau = params.tau();
    let log_case = tau == S::zero();
    let half_tau = tau / S::from_f64_lossy(2.0);
    let two = S::from_f64_lossy(2.0);
    let mut total = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = pair_distance_sq(pts, i, j);
            if d2 == S::zero() {
                return Err(Error::DegenerateConfiguration { i, j });
            }
            // Each unordered pair contributes twice.
            if log_case {
                total -= d2.ln(); // 2 * -log sqrt(d2)
            } else {
                total += two * d2.powf(-half_tau);
            }
        }
    }
    Ok(total)
}

/// Projected gradient descent on the Riesz energy with backtracking line
/// search; every trial step renormalizes each point to the sphere.
///
/// Monotone by construction: a step is only accepted if it does not increase
/// the energy. Stops when the relative per-step decrease falls below `tol`,
/// when no decreasing step can be found, or after `max_steps` steps.
/// `tau = 0` (the logarithmic potential) is not supported here.
pub fn refine_energy<S: Real>(
    config: &SphereConfig<S>,
    params: &RieszParams<S>,
    max_steps: usize,
    tol: S,
) -> Result<SphereConfig<S>> {
    refine_energy_traced(config, params, max_steps, tol).map(|(c, _)| c)
}

/// Like [`refine_energy`] but also returns the energy after every accepted
/// step (starting with the initial energy), for step-wise monotonicity
/// checks.
pub fn refine_energy_traced<S: Real>(
    config: &SphereConfig<S>,
    params: &RieszParams<S>,
    max_steps: usize,
    tol: S,
) -> Result<(SphereConfig<S>, Vec<S>)> {
    if params.tau() <= S::zero() {
        return Err(Error::Unsupported(
            "energy refinement requires tau > 0; the log potential is not refined".into(),
        ));
    }
    let mut pts = config.points().clone();
    let mut energy = energy_of_points(&pts, params)?;
    let mut trace = vec![energy];
    if max_steps == 0 {
        return Ok((SphereConfig::new(pts)?, trace));
    }

    let mut step = S::from_f64_lossy(0.1);
    let grow = S::from_f64_lossy(1.5);
    let shrink = S::from_f64_lossy(0.5);
    let min_step = S::from_f64_lossy(1e-18);

    for _ in 0..max_steps {
        let grad = tangent_gradient(&pts, params);
        let mut accepted = false;
        while step >= min_step {
            let candidate = stepped(&pts, &grad, step);
            // A step that makes points coincide is an infinitely bad trial.
            let cand_energy = match energy_of_points(&candidate, params) {
                Ok(e) => e,
                Err(Error::DegenerateConfiguration { .. }) => S::infinity(),
                Err(e) => return Err(e),
            };
            if cand_energy <= energy {
                let decrease = (energy - cand_energy) / energy.abs().max(S::min_positive_value());
                pts = candidate;
                energy = cand_energy;
                trace.push(energy);
                step = step * grow;
                accepted = true;
                if decrease < tol {
                    return Ok((SphereConfig::new(pts)?, trace));
                }
                break;
            }
            step = step * shrink;
        }
        if !accepted {
            break; // no decreasing step exists at representable step sizes
        }
    }
    Ok((SphereConfig::new(pts)?, trace))
}

/// Euclidean energy gradient projected onto each point's tangent space.
fn tangent_gradient<S: Real>(pts: &Array2<S>, params: &RieszParams<S>) -> Array2<S> {
    let (n, d) = pts.dim();
    let tau = params.tau();
    let two = S::from_f64_lossy(2.0);
    let mut grad = Array2::zeros((n, d));
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = pair_distance_sq(pts, i, j);
            // d/dx_i of 2 |x_i - x_j|^{-tau} = -2 tau |x_i - x_j|^{-tau-2} (x_i - x_j)
            let w = -two * tau * d2.powf(-(tau + two) / two);
            for c in 0..d {
                let diff = pts[[i, c]] - pts[[j, c]];
                grad[[i, c]] += w * diff;
                grad[[j, c]] -= w * diff;
            }
        }
    }
    for i in 0..n {
        let mut radial = S::zero();
        for c in 0..d {
            radial += grad[[i, c]] * pts[[i, c]];
        }
        for c in 0..d {
            grad[[i, c]] -= radial * pts[[i, c]];
        }
    }
    grad
}

fn stepped<S: Real>(pts: &Array2<S>, grad: &Array2<S>, step: S) -> Array2<S> {
    let (n, d) = pts.dim();
    let mut out = Array2::zeros((n, d));
    for i in 0..n {
        let mut norm2 = S::zero();
        for c in 0..d {
            let v = pts[[i, c]] - step * grad[[i, c]];
            out[[i, c]] = v;
            norm2 += v * v;
        }
        let norm = norm2.sqrt();
        for c in 0..d {
            out[[i, c]] /= norm;
        }
    }
    out
}
