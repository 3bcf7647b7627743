//! The one-site marginal variance of the infinite-volume field.
//!
//! Two independent routes are provided: Richardson extrapolation of the
//! exact center-of-box variance c_L^2 (spectral Green function), and a
//! simple-random-walk visit-count Monte Carlo with the walk killed at the
//! box boundary. Under the edge convention used throughout, the covariance
//! equals (expected visit count) / (2d); both the "operational" value and
//! the raw walk normalization (2d times larger) are reported.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::field::GaussianSolve;
use crate::lattice::{BoxLattice, OriginMode};

#[derive(Debug, Error)]
pub enum SigmaError {
    #[error("no finite infinite-volume variance is claimed for d={0} (need d >= 3)")]
    LowDimension(usize),
    #[error("need at least two box sizes for extrapolation, got {0}")]
    TooFewSizes(usize),
    #[error("box sizes must be even and increasing: {0:?}")]
    BadSizes(Vec<i64>),
}

/// Variance of the zero-boundary free field at the center of a corner box
/// with side parameter `l` (even). This is the c_L^2 of the conditional
/// variance appearing in grid decompositions.
pub fn center_variance(d: usize, l: i64) -> f64 {
    assert!(l >= 2 && l % 2 == 0, "center variance needs even l >= 2");
    let lat = Arc::new(BoxLattice::new(d, l, OriginMode::Corner).unwrap());
    let solve = GaussianSolve::new(lat.clone());
    let center = lat.center();
    solve.marginal_variance(&center).unwrap()
}

/// Result of a sigma_d^2 determination.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SigmaEstimate {
    /// Extrapolated variance under the implemented Hamiltonian.
    pub value: f64,
    /// Error bar covering the finite-size gap between the two largest boxes.
    pub error: f64,
    /// Same quantity in walk-visit-count normalization (2d times larger).
    pub walk_normalized: f64,
    /// The per-size center variances that entered the extrapolation.
    pub c_values: Vec<(i64, f64)>,
}

/// Two-point Richardson step assuming a 1/L leading finite-size correction:
/// f(L) = f_inf - a/L  =>  f_inf = (L2 f2 - L1 f1) / (L2 - L1).
fn richardson(l1: f64, f1: f64, l2: f64, f2: f64) -> f64 {
    (l2 * f2 - l1 * f1) / (l2 - l1)
}

/// Estimate sigma_d^2 by extrapolating exact center variances over the given
/// even box sizes (increasing, at least two).
pub fn sigma_sq_spectral(d: usize, sizes: &[i64]) -> Result<SigmaEstimate, SigmaError> {
    if d < 3 {
        return Err(SigmaError::LowDimension(d));
    }
    if sizes.len() < 2 {
        return Err(SigmaError::TooFewSizes(sizes.len()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes.iter().any(|&l| l < 2 || l % 2 != 0) {
        return Err(SigmaError::BadSizes(sizes.to_vec()));
    }
    let c_values: Vec<(i64, f64)> = sizes.iter().map(|&l| (l, center_variance(d, l))).collect();
    let k = c_values.len();
    let (l1, f1) = c_values[k - 2];
    let (l2, f2) = c_values[k - 1];
    let value = richardson(l1 as f64, f1, l2 as f64, f2);
    // Covers both the raw finite-size gap at the two largest boxes and, when
    // available, the drift between consecutive extrapolants.
    let mut error = (f2 - f1).abs();
    if k >= 3 {
        let (l0, f0) = c_values[k - 3];
        let prev = richardson(l0 as f64, f0, l1 as f64, f1);
        error = error.max((value - prev).abs() * 2.0);
    }
    Ok(SigmaEstimate {
        value,
        error,
        walk_normalized: value * 2.0 * d as f64,
        c_values,
    })
}

/// Expected number of visits to the center by a simple random walk killed on
/// hitting the box boundary, estimated from `walks` independent walks.
/// Returns (mean, standard error).
pub fn killed_walk_visits_mc<R: Rng + ?Sized>(
    d: usize,
    l: i64,
    walks: u64,
    rng: &mut R,
) -> (f64, f64) {
    assert!(l >= 2 && l % 2 == 0);
    let start = vec![l / 2; d];
    let mut sum = 0.0_f64;
    let mut sumsq = 0.0_f64;
    let mut pos = vec![0i64; d];
    for _ in 0..walks {
        pos.copy_from_slice(&start);
        let mut visits = 1u32;
        'walk: loop {
            let r = rng.gen_range(0..2 * d);
            let axis = r >> 1;
            pos[axis] += if r & 1 == 0 { -1 } else { 1 };
            if pos[axis] == 0 || pos[axis] == l {
                break 'walk;
            }
            if pos == start {
                visits += 1;
            }
        }
        let v = visits as f64;
        sum += v;
        sumsq += v * v;
    }
    let n = walks as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo determination of sigma_d^2 from killed-walk visit counts on
/// two box sizes with the same 1/L Richardson step. Returns (value, se).
pub fn sigma_sq_walk_mc<R: Rng + ?Sized>(
    d: usize,
    sizes: (i64, i64),
    walks: u64,
    rng: &mut R,
) -> (f64, f64) {
    let (l1, l2) = sizes;
    assert!(l1 < l2);
    let (g1, se1) = killed_walk_visits_mc(d, l1, walks, rng);
    let (g2, se2) = killed_walk_visits_mc(d, l2, walks, rng);
    let two_d = 2.0 * d as f64;
    let value = richardson(l1 as f64, g1 / two_d, l2 as f64, g2 / two_d);
    let (w1, w2) = (
        l1 as f64 / (l2 - l1) as f64 / two_d,
        l2 as f64 / (l2 - l1) as f64 / two_d,
    );
    let se = ((w1 * se1).powi(2) + (w2 * se2).powi(2)).sqrt();
    (value, se)
}
