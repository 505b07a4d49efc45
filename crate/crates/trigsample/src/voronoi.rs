//! Voronoi weights for sample points in [0,1]^d and the weighted matrix
//! T^w = U*WU.
//!
//! The Voronoi cell of a sample point is the set of points of [0,1]^d that
//! are closer (plain Euclidean metric, no wraparound) to it than to any
//! other sample; its weight is the cell's Lebesgue measure. In one dimension
//! cells are intervals split at midpoints and weights are exact; in higher
//! dimensions weights are estimated by uniform Monte Carlo probing.

use crate::fourier::{FourierSystem, SampleSet};
use crate::hermitian::HermitianMatrix;
use crate::parallel;
use crate::rng;
use num_complex::Complex64;
use rand::Rng;
use std::fmt;

/// Minimum number of Monte Carlo probes accepted.
pub const MIN_PROBES: usize = 1000;
/// Cap applied by [`default_probes`].
pub const MAX_DEFAULT_PROBES: usize = 10_000_000;
/// Probes handled per parallel work item (integer counts per chunk are
/// summed afterwards, so chunking never changes the result).
const PROBE_CHUNK: usize = 8192;

/// Errors from weight computation.
#[derive(Debug, Clone, PartialEq)]
pub enum VoronoiError {
    /// No points supplied.
    EmptyPoints,
    /// A 1-d point lies outside [0,1].
    PointOutOfRange { index: usize, value: f64 },
    /// Two sample points coincide, so a Voronoi cell degenerates.
    DegenerateCell { value: f64 },
    /// Fewer than [`MIN_PROBES`] Monte Carlo probes requested.
    TooFewProbes { probes: usize },
    /// Weight vector length does not match the system's sample count.
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for VoronoiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VoronoiError::EmptyPoints => write!(f, "at least one point is required"),
            VoronoiError::PointOutOfRange { index, value } => {
                write!(f, "point {index} = {value} lies outside [0,1]")
            }
            VoronoiError::DegenerateCell { value } => {
                write!(f, "degenerate Voronoi cell: duplicate point {value}")
            }
            VoronoiError::TooFewProbes { probes } => {
                write!(f, "{probes} probes requested, minimum is {MIN_PROBES}")
            }
            VoronoiError::LengthMismatch { expected, found } => {
                write!(f, "weight vector has length {found}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for VoronoiError {}

/// How a weight vector was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightMethod {
    /// Exact interval lengths (one dimension only).
    Exact1d,
    /// Monte Carlo estimate with the recorded probe count.
    MonteCarlo { probes: usize },
}

/// Nonnegative weights w_t attached to sample points, with provenance and —
/// for Monte Carlo estimates — a standard-error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    method: WeightMethod,
    mc_std_error: Option<f64>,
}

impl WeightVector {
    /// The weights, in the input order of the points.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of weights.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Whether the vector is empty (never true for constructed vectors).
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Provenance of the weights.
    pub fn method(&self) -> &WeightMethod {
        &self.method
    }

    /// Estimated standard error `sqrt(max_t w_t(1−w_t)/probes)` for Monte
    /// Carlo weights; `None` for exact weights.
    pub fn mc_std_error(&self) -> Option<f64> {
        self.mc_std_error
    }
}

/// Exact Voronoi weights on [0,1]: cells are the intervals delimited by
/// midpoints of adjacent (sorted) points, and each weight is its cell's
/// length. Input order is preserved; the weights sum to 1 exactly.
pub fn voronoi_weights_1d(points: &[f64]) -> Result<WeightVector, VoronoiError> {
    if points.is_empty() {
        return Err(VoronoiError::EmptyPoints);
    }
    for (index, &value) in points.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(VoronoiError::PointOutOfRange { index, value });
        }
    }
    let n = points.len();
    if n == 1 {
        return Ok(WeightVector {
            weights: vec![1.0],
            method: WeightMethod::Exact1d,
            mc_std_error: None,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(VoronoiError::DegenerateCell { value: points[w[0]] });
        }
    }
    // Cell of the i-th sorted point runs from the midpoint below to the
    // midpoint above (domain edges at the extremes).
    let mut weights = vec![0.0f64; n];
    let mut lower = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        let upper = if rank + 1 < n {
            0.5 * (points[idx] + points[order[rank + 1]])
        } else {
            1.0
        };
        weights[idx] = upper - lower;
        lower = upper;
    }
    // The geometric lengths telescope to 1 exactly in real arithmetic;
    // absorb the floating-point residue into the largest cell so that the
    // plain left-to-right sum of the stored weights is exactly 1.
    let big = (0..n)
        .max_by(|&a, &b| weights[a].total_cmp(&weights[b]))
        .expect("nonempty");
    for _ in 0..64 {
        let total: f64 = weights.iter().sum();
        if total == 1.0 {
            break;
        }
        let adjusted = weights[big] + (1.0 - total);
        if adjusted == weights[big] {
            break;
        }
        weights[big] = adjusted;
    }
    debug_assert_eq!(weights.iter().sum::<f64>(), 1.0);
    Ok(WeightVector { weights, method: WeightMethod::Exact1d, mc_std_error: None })
}

/// Default probe count for [`voronoi_weights_mc`]: 200 per sample point,
/// at least [`MIN_PROBES`], at most [`MAX_DEFAULT_PROBES`].
pub fn default_probes(n: usize) -> usize {
    n.saturating_mul(200).clamp(MIN_PROBES, MAX_DEFAULT_PROBES)
}

/// Monte Carlo Voronoi weights in [0,1]^d: each weight estimates the
/// fraction of the cube whose nearest sample point (Euclidean distance,
/// ties to the smallest index) is the given one.
///
/// Probe `p` draws from stream `p` of the given seed (see the [`rng`]
/// module), so the result is independent of chunking and thread count:
/// per-probe nearest indices are aggregated as integer counts.
pub fn voronoi_weights_mc(
    points: &SampleSet,
    probes: usize,
    seed: u64,
) -> Result<WeightVector, VoronoiError> {
    if probes < MIN_PROBES {
        return Err(VoronoiError::TooFewProbes { probes });
    }
    let n = points.len();
    let dim = points.dim();
    let samples = points.points();
    let chunk_count = probes.div_ceil(PROBE_CHUNK);
    let chunk_counts: Vec<Vec<u64>> = parallel::map_indexed(chunk_count, |chunk| {
        let start = chunk * PROBE_CHUNK;
        let end = (start + PROBE_CHUNK).min(probes);
        let mut counts = vec![0u64; n];
        let mut probe_point = vec![0.0f64; dim];
        for p in start..end {
            let mut stream = rng::stream(seed, p as u64);
            for coord in probe_point.iter_mut() {
                *coord = stream.gen::<f64>();
            }
            let mut best = 0usize;
            let mut best_dist = f64::INFINITY;
            for (idx, site) in samples.iter().enumerate() {
                let dist: f64 = site
                    .iter()
                    .zip(&probe_point)
                    .map(|(&s, &q)| (s - q) * (s - q))
                    .sum();
                if dist < best_dist {
                    best_dist = dist;
                    best = idx;
                }
            }
            counts[best] += 1;
        }
        counts
    });
    let mut counts = vec![0u64; n];
    for chunk in chunk_counts {
        for (total, c) in counts.iter_mut().zip(chunk) {
            *total += c;
        }
    }
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / probes as f64).collect();
    let worst_var = weights
        .iter()
        .map(|&w| w * (1.0 - w))
        .fold(0.0f64, f64::max);
    let mc_std_error = (worst_var / probes as f64).sqrt();
    Ok(WeightVector {
        weights,
        method: WeightMethod::MonteCarlo { probes },
        mc_std_error: Some(mc_std_error),
    })
}

/// The weighted matrix T^w = U*WU, where W is the diagonal matrix of
/// weights. Note that T^w is not divided by n: the weights already sum
/// to (approximately) 1.
pub fn weighted_gram(fs: &FourierSystem, w: &WeightVector) -> Result<HermitianMatrix, VoronoiError> {
    if w.len() != fs.n() {
        return Err(VoronoiError::LengthMismatch { expected: fs.n(), found: w.len() });
    }
    let u = fs.matrix();
    let d_size = fs.basis_size();
    let weights = w.weights();
    let mut upper = vec![Complex64::new(0.0, 0.0); d_size * d_size];
    for k in 0..d_size {
        for j in k..d_size {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &wt) in weights.iter().enumerate() {
                acc += u[(t, k)].conj() * u[(t, j)] * wt;
            }
            upper[k * d_size + j] = acc;
        }
    }
    Ok(HermitianMatrix::from_fn(d_size, |k, j| upper[k * d_size + j])
        .expect("basis size is at least 1"))
}

/// The weighted right-hand side U*Wy used alongside T^w in weighted
/// least-squares reconstruction.
pub fn weighted_rhs(
    fs: &FourierSystem,
    w: &WeightVector,
    y: &[Complex64],
) -> Result<Vec<Complex64>, VoronoiError> {
    if w.len() != fs.n() {
        return Err(VoronoiError::LengthMismatch { expected: fs.n(), found: w.len() });
    }
    if y.len() != fs.n() {
        return Err(VoronoiError::LengthMismatch { expected: fs.n(), found: y.len() });
    }
    let u = fs.matrix();
    let weights = w.weights();
    Ok((0..fs.basis_size())
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &wt) in weights.iter().enumerate() {
                acc += u[(t, k)].conj() * y[t] * wt;
            }
            acc
        })
        .collect())
}
