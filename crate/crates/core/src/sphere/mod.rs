//! Point configurations on the unit sphere `S^{d-1}`.
//!
//! [`eq_points`] places `n` points deterministically as the region centers of
//! a recursive zonal equal-area partition; such configurations approximate
//! minimal Riesz-energy point sets and serve as the inner weights of the
//! deterministic scheme. [`riesz_energy`] and [`refine_energy`] evaluate and
//! locally improve the pairwise energy, and [`min_pairwise_distance`] is the
//! separation diagnostic.

mod energy;
mod partition;

pub use energy::{refine_energy, refine_energy_traced, riesz_energy};
pub use partition::eq_points;

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on the unit-norm invariant of stored points, at `f64`
/// precision. Coarser scalars widen it to a few machine epsilons.
pub const UNIT_NORM_TOL: f64 = 1e-12;

fn norm_tol<S: Real>() -> S {
    let eps4 = S::epsilon() * S::from_f64_lossy(4.0);
    let base = S::from_f64_lossy(UNIT_NORM_TOL);
    if eps4 > base {
        eps4
    } else {
        base
    }
}

/// An ordered set of `n` distinct unit vectors in `R^d`, i.e. a configuration
/// on `S^{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereConfig<S> {
    points: Array2<S>,
}

impl<S: Real> SphereConfig<S> {
    /// Validates and wraps an `n x d` matrix of points (one row per point).
    ///
    /// Requires `d >= 2`, `n >= 1`, every row unit-norm within
    /// [`UNIT_NORM_TOL`], and pairwise distinct rows.
    pub fn new(points: Array2<S>) -> Result<Self> {
        let (n, d) = points.dim();
        if d < 2 {
            return Err(Error::invalid(format!("ambient dimension must be >= 2, got {d}")));
        }
        if n < 1 {
            return Err(Error::invalid("configuration needs at least one point"));
        }
        let tol = norm_tol::<S>();
        for (i, row) in points.rows().into_iter().enumerate() {
            let norm = row.iter().map(|&v| v * v).fold(S::zero(), |a, b| a + b).sqrt();
            if !norm.is_finite() {
                return Err(Error::NonFinite(format!("point {i}")));
            }
            if (norm - S::one()).abs() > tol {
                return Err(Error::invalid(format!(
                    "point {i} has norm {} (off unit by {:.3e})",
                    norm.to_f64_lossy(),
                    (norm - S::one()).abs().to_f64_lossy()
                )));
            }
        }
        let config = SphereConfig { points };
        if let Some((i, j)) = config.coincident_pair() {
            return Err(Error::DegenerateConfiguration { i, j });
        }
        Ok(config)
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    /// Ambient dimension `d` (points live in `R^d`).
    pub fn ambient_dim(&self) -> usize {
        self.points.ncols()
    }

    /// Points as an `n x d` matrix, one row per point.
    pub fn points(&self) -> &Array2<S> {
        &self.points
    }

    pub fn into_points(self) -> Array2<S> {
        self.points
    }

    fn coincident_pair(&self) -> Option<(usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let d2 = pair_distance_sq(&self.points, i, j);
                if d2 == S::zero() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Writes the configuration as CSV: a `# sphere d=<d> n=<n>` header line
    /// followed by one row per point, 17 fractional digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# sphere d={} n={}", self.ambient_dim(), self.len())?;
        for row in self.points.rows() {
            let fields: Vec<String> = row.iter().map(|v| format!("{:.17e}", v)).collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a configuration written by [`Self::write_csv`]. Comment lines
    /// (starting with `#`) are skipped; the row/column shape is inferred.
    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut rows: Vec<Vec<S>> = Vec::new();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for (col, field) in trimmed.split(',').enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line: line_no + 1,
                    msg: format!("column {}: expected a number, got {field:?}", col + 1),
                })?;
                row.push(S::from_f64_lossy(v));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::invalid("no points in file"));
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("ragged rows in point file"));
        }
        let n = rows.len();
        let flat: Vec<S> = rows.into_iter().flatten().collect();
        let points = Array2::from_shape_vec((n, d), flat).expect("shape checked above");
        SphereConfig::new(points)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file)
    }
}

/// Riesz energy parameters: the potential exponent `tau >= 0`.
///
/// `tau = 0` denotes the logarithmic potential. The deterministic scheme's
/// Stage 1 expects `tau >= d - 1`; the default used for diagnostics and
/// refinement is `tau = d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszParams<S> {
    tau: S,
}

impl<S: Real> RieszParams<S> {
    pub fn new(tau: S) -> Result<Self> {
        if !(tau >= S::zero()) {
            return Err(Error::invalid(format!("tau must be >= 0, got {}", tau.to_f64_lossy())));
        }
        Ok(RieszParams { tau })
    }

    /// Default exponent for ambient dimension `d`: `tau = d`.
    pub fn default_for_dim(d: usize) -> Self {
        RieszParams { tau: S::from_f64_lossy(d as f64) }
    }

    pub fn tau(&self) -> S {
        self.tau
    }

    /// Whether this exponent meets the Stage 1 requirement `tau >= d - 1`.
    pub fn stage1_ok(&self, d: usize) -> bool {
        self.tau >= S::from_f64_lossy((d - 1) as f64)
    }
}

/// Minimum Euclidean distance over unordered pairs; `+inf` for a single point.
pub fn min_pairwise_distance<S: Real>(config: &SphereConfig<S>) -> S {
    let n = config.len();
    if n == 1 {
        return S::infinity();
    }
    let pts = config.points();
    let mut best = S::infinity();
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = pair_distance_sq(pts, i, j);
            if d2 < best {
                best = d2;
            }
        }
    }
    best.sqrt()
}

pub(crate) fn pair_distance_sq<S: Real>(pts: &Array2<S>, i: usize, j: usize) -> S {
    let (ri, rj) = (pts.row(i), pts.row(j));
    let mut acc = S::zero();
    for (&a, &b) in ri.iter().zip(rj.iter()) {
        let diff = a - b;
        acc += diff * diff;
    }
    acc
}
