//! Recursive zonal equal-area partitioning of `S^{d-1}`.
//!
//! The sphere is split into a north polar cap, a stack of collars, and a
//! south polar cap, all of equal area. Each collar is subdivided by
//! recursively partitioning the sphere one dimension down; the returned
//! points are the region centers. The construction is fully deterministic:
//! the first cap sits at the north pole `e_d` and every collar uses a zero
//! azimuthal offset, so identical inputs give bit-identical outputs.
//!
//! Internal angle computations run in `f64` regardless of the output scalar;
//! for `d = 2` the result is the exact equally spaced point set on the
//! circle, `(cos(2*pi*k/n), sin(2*pi*k/n))`.

use std::f64::consts::PI;

use ndarray::Array2;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SphereConfig;

/// Centers of an `n`-region equal-area partition of `S^{d-1}`, as unit
/// vectors in `R^d`.
pub fn eq_points<S: Real>(d: usize, n: usize) -> Result<SphereConfig<S>> {
    if d < 2 {
        return Err(Error::invalid(format!("need d >= 2, got {d}")));
    }
    if n < 1 {
        return Err(Error::invalid("need at least one point"));
    }
    let raw = point_set(d - 1, n);
    debug_assert_eq!(raw.len(), n);
    let mut points = Array2::zeros((n, d));
    for (i, p) in raw.iter().enumerate() {
        for (c, &v) in p.iter().enumerate() {
            points[[i, c]] = S::from_f64_lossy(v);
        }
    }
    SphereConfig::new(points)
}

/// Point set of the equal-area partition of `S^dim` (unit vectors in
/// `R^{dim+1}`), `dim >= 1`.
fn point_set(dim: usize, n: usize) -> Vec<Vec<f64>> {
    if dim == 1 {
        // Exact equally spaced points on the circle.
        return (0..n)
            .map(|k| {
                let angle = 2.0 * PI * (k as f64) / (n as f64);
                vec![angle.cos(), angle.sin()]
            })
            .collect();
    }
    if n == 1 {
        return vec![north_pole(dim)];
    }

    let (boundaries, counts) = zonal_caps(dim, n);
    let n_collars = counts.len() - 2;

    let mut pts = Vec::with_capacity(n);
    pts.push(north_pole(dim));
    for c in 0..n_collars {
        let top = boundaries[c];
        let bottom = boundaries[c + 1];
        let colatitude = 0.5 * (top + bottom);
        let (sin_t, cos_t) = (colatitude.sin(), colatitude.cos());
        for sub in point_set(dim - 1, counts[c + 1]) {
            let mut p = Vec::with_capacity(dim + 1);
            p.extend(sub.iter().map(|&v| sin_t * v));
            p.push(cos_t);
            pts.push(p);
        }
    }
    let mut south = north_pole(dim);
    south[dim] = -1.0;
    pts.push(south);
    pts
}

fn north_pole(dim: usize) -> Vec<f64> {
    let mut p = vec![0.0; dim + 1];
    p[dim] = 1.0;
    p
}

/// Cap boundary colatitudes and per-zone region counts for partitioning
/// `S^dim` into `n >= 2` regions.
///
/// Returns `(boundaries, counts)` where `counts = [1, m_1, ..., m_c, 1]`
/// (polar caps first and last) and `boundaries[i]` is the colatitude of the
/// boundary between zone `i` and zone `i+1`; `boundaries[0]` is the polar
/// cap angle and the implicit final boundary is `pi`.
fn zonal_caps(dim: usize, n: usize) -> (Vec<f64>, Vec<usize>) {
    debug_assert!(dim >= 2 && n >= 2);
    if n == 2 {
        return (vec![PI / 2.0], vec![1, 1]);
    }

    let ideal_area = sphere_area(dim) / (n as f64);
    let polar = cap_colatitude(dim, ideal_area);
    let ideal_angle = ideal_area.powf(1.0 / dim as f64);
    let n_collars = (((PI - 2.0 * polar) / ideal_angle).round() as usize).max(1);
    let fitting = (PI - 2.0 * polar) / (n_collars as f64);

    // Round ideal per-collar counts to naturals, carrying the discrepancy so
    // the total stays exactly n - 2.
    let mut counts = Vec::with_capacity(n_collars + 2);
    counts.push(1usize);
    let mut carry = 0.0;
    for i in 0..n_collars {
        let top = polar + (i as f64) * fitting;
        let bottom = polar + ((i + 1) as f64) * fitting;
        let ideal = (cap_area(dim, bottom) - cap_area(dim, top)) / ideal_area;
        let rounded = (ideal + carry).round().max(0.0);
        carry += ideal - rounded;
        counts.push(rounded as usize);
    }
    counts.push(1usize);
    debug_assert_eq!(counts.iter().sum::<usize>(), n);

    // Boundary colatitudes chosen so each zone holds exactly its share of
    // the area: boundary i subtends (regions above it) * ideal_area.
    let mut boundaries = Vec::with_capacity(n_collars + 1);
    boundaries.push(polar);
    let mut above = 1usize;
    for i in 0..n_collars {
        above += counts[i + 1];
        boundaries.push(cap_colatitude(dim, (above as f64) * ideal_area));
    }
    (boundaries, counts)
}

/// Surface area of `S^dim`: `2 pi^{(dim+1)/2} / Gamma((dim+1)/2)`.
fn sphere_area(dim: usize) -> f64 {
    let half = (dim as f64 + 1.0) / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Area of the spherical cap of `S^dim` with colatitude (spherical radius)
/// `theta`.
fn cap_area(dim: usize, theta: f64) -> f64 {
    match dim {
        1 => 2.0 * theta,
        2 => 4.0 * PI * (theta / 2.0).sin().powi(2),
        _ => {
            let x = (theta / 2.0).sin().powi(2);
            sphere_area(dim) * beta_reg(dim as f64 / 2.0, dim as f64 / 2.0, x.clamp(0.0, 1.0))
        }
    }
}

/// Colatitude of the cap of `S^dim` with the given area (inverse of
/// [`cap_area`]); bisection on the monotone map for `dim >= 3`.
fn cap_colatitude(dim: usize, area: f64) -> f64 {
    match dim {
        1 => area / 2.0,
        2 => 2.0 * (area / (4.0 * PI)).sqrt().clamp(0.0, 1.0).asin(),
        _ => {
            let (mut lo, mut hi) = (0.0f64, PI);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cap_area(dim, mid) < area {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            0.5 * (lo + hi)
        }
    }
}
