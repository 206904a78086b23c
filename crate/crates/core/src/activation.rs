//! Sigmoid activations, their scaling, and the scale-selection rule.
//!
//! Features are built from a scaled sigmoid `t -> phi(K t)`. The scale `K`
//! controls how sharply the sigmoid transitions; [`logistic_min_scale`]
//! implements the smallest scale that saturates the logistic within one
//! threshold-grid cell, and [`tail_threshold`] the generic saturation point
//! for an arbitrary tolerance.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Supported sigmoid kinds. Both tend to 1 at `+inf` and 0 at `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    /// `1 / (1 + e^{-t})`
    Logistic,
    /// `1` for `t >= 0`, `0` for `t < 0`
    Heaviside,
}

impl ActivationKind {
    pub fn eval<S: Real>(self, t: S) -> S {
        match self {
            ActivationKind::Logistic => S::one() / (S::one() + (-t).exp()),
            ActivationKind::Heaviside => {
                if t >= S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
        }
    }

    /// Lowercase token used in model files and CLI flags.
    pub fn token(self) -> &'static str {
        match self {
            ActivationKind::Logistic => "logistic",
            ActivationKind::Heaviside => "heaviside",
        }
    }

    pub fn from_token(token: &str) -> Result<Self> {
        match token {
            "logistic" => Ok(ActivationKind::Logistic),
            "heaviside" => Ok(ActivationKind::Heaviside),
            other => Err(Error::invalid(format!("unknown activation {other:?}"))),
        }
    }
}

impl std::fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// A sigmoid composed with a positive scale: `t -> phi(scale * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledActivation<S> {
    pub kind: ActivationKind,
    scale: S,
}

impl<S: Real> ScaledActivation<S> {
    pub fn new(kind: ActivationKind, scale: S) -> Result<Self> {
        if !(scale > S::zero()) {
            return Err(Error::invalid(format!(
                "activation scale must be > 0, got {}",
                scale.to_f64_lossy()
            )));
        }
        Ok(ScaledActivation { kind, scale })
    }

    pub fn scale(&self) -> S {
        self.scale
    }

    #[inline]
    pub fn eval(&self, t: S) -> S {
        self.kind.eval(self.scale * t)
    }
}

/// Minimum scale for the logistic with a grid of `n_thresholds` thresholds:
/// `l * ln(l^2 - 1)` for `l >= 2` and `ln 2` for `l = 1`.
///
/// At this scale the scaled logistic moves from below `1/l^2` to above
/// `1 - 1/l^2` across a single grid cell of width `1/l`.
pub fn logistic_min_scale<S: Real>(n_thresholds: usize) -> Result<S> {
    if n_thresholds == 0 {
        return Err(Error::invalid("threshold count must be >= 1"));
    }
    let l = n_thresholds as f64;
    let scale = if n_thresholds == 1 {
        2.0f64.ln()
    } else {
        l * (l * l - 1.0).ln()
    };
    Ok(S::from_f64_lossy(scale))
}

/// Absolute tolerance of the bisection in [`tail_threshold`].
pub const TAIL_BISECTION_TOL: f64 = 1e-9;

/// Smallest `L` such that `|phi(u) - 1| < eps` for `u >= L` and
/// `|phi(u)| < eps` for `u <= -L`, located by bisection on the monotone
/// tails to within [`TAIL_BISECTION_TOL`].
///
/// The step function has exact tails, so it returns 0 for any tolerance.
/// Requires `0 < eps < 1/2` otherwise (the two tail conditions would meet).
pub fn tail_threshold<S: Real>(kind: ActivationKind, eps: S) -> Result<S> {
    if kind == ActivationKind::Heaviside {
        return Ok(S::zero());
    }
    let eps = eps.to_f64_lossy();
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("tolerance must be in (0, 1/2), got {eps}")));
    }
    let within = |u: f64| -> bool {
        let hi = (kind.eval(u) - 1.0f64).abs();
        let lo = kind.eval(-u).abs();
        hi < eps && lo < eps
    };
    // Grow the bracket until the condition holds at the right endpoint.
    let mut hi = 1.0f64;
    while !within(hi) {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::invalid("sigmoid tails never reach the tolerance"));
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > TAIL_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if within(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(S::from_f64_lossy(hi))
}
