//! Scalar abstraction: `f32` or `f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the core math is generic over.
///
/// Solver entry points additionally require `ndarray_linalg::Lapack` since
/// factorizations go through LAPACK.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossless-enough conversion from `f64` literals and intermediate math.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 converts to any Real")
    }

    /// Widen to `f64` for reporting and error messages.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar precision accepted by the LAPACK-backed solver entry points.
pub trait SolverReal: Real + ndarray_linalg::Lapack + ndarray_linalg::Scalar<Real = Self> {}

impl<T> SolverReal for T where T: Real + ndarray_linalg::Lapack + ndarray_linalg::Scalar<Real = T> {}
