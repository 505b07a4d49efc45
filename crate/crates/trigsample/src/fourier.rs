//! Random Fourier sample matrices and their normalized Gram matrices.
//!
//! Given a frequency set Γ (a [`Spectrum`](crate::spectrum::Spectrum)) and
//! sampling points x_1, …, x_n in [0,1]^d, the n×D matrix U has entries
//! u_tk = exp(2πi k·x_t). The central object of study is the normalized Gram
//! matrix n⁻¹U*U and its deviation (in operator norm) from its expectation.

use crate::hermitian::{HermitianError, HermitianMatrix};
use crate::parallel;
use crate::rng;
use crate::spectrum::Spectrum;
use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Condition numbers beyond this threshold make the normal equations
/// numerically untrustworthy; reconstruction is refused instead.
pub const RECONSTRUCT_COND_LIMIT: f64 = 1e12;

/// Errors from sample-set handling, matrix construction, and reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum FourierError {
    /// A sample set must contain at least one point.
    EmptySampleSet,
    /// A sample coordinate lies outside [0,1].
    CoordinateOutOfRange { point: usize, axis: usize, value: f64 },
    /// A point's length disagrees with the declared dimension.
    PointDimMismatch { expected: usize, point: usize, found: usize },
    /// Spectrum dimension and sample dimension disagree.
    SpectrumDimMismatch { spectrum_dim: usize, sample_dim: usize },
    /// An operand has the wrong order/length for this system.
    OrderMismatch { expected: usize, found: usize },
    /// Reconstruction needs at least as many samples as frequencies.
    Underdetermined { n: usize, basis_size: usize },
    /// The normal matrix is too ill-conditioned to solve reliably.
    SingularNormalMatrix { condition_number: f64 },
    /// A spectral routine failed.
    Eigen(HermitianError),
    /// Malformed JSON input.
    Parse(String),
}

impl fmt::Display for FourierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourierError::EmptySampleSet => write!(f, "sample set must contain at least one point"),
            FourierError::CoordinateOutOfRange { point, axis, value } => {
                write!(f, "point {point}, axis {axis}: coordinate {value} outside [0,1]")
            }
            FourierError::PointDimMismatch { expected, point, found } => {
                write!(f, "point {point} has {found} coordinates, expected {expected}")
            }
            FourierError::SpectrumDimMismatch { spectrum_dim, sample_dim } => {
                write!(f, "spectrum dimension {spectrum_dim} != sample dimension {sample_dim}")
            }
            FourierError::OrderMismatch { expected, found } => {
                write!(f, "operand size {found}, expected {expected}")
            }
            FourierError::Underdetermined { n, basis_size } => {
                write!(f, "{n} samples cannot determine {basis_size} coefficients")
            }
            FourierError::SingularNormalMatrix { condition_number } => {
                write!(f, "normal matrix condition number {condition_number:.3e} exceeds {RECONSTRUCT_COND_LIMIT:.0e}; reconstruction refused")
            }
            FourierError::Eigen(e) => write!(f, "spectral routine failed: {e}"),
            FourierError::Parse(msg) => write!(f, "sample-set parse error: {msg}"),
        }
    }
}

impl std::error::Error for FourierError {}

impl From<HermitianError> for FourierError {
    fn from(e: HermitianError) -> Self {
        FourierError::Eigen(e)
    }
}

/// How a sample set was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributionTag {
    /// I.i.d. uniform on [0,1]^d, drawn by this crate's seeded generator.
    Uniform,
    /// Externally supplied points (e.g. imported from JSON).
    Custom(String),
}

/// A set of n sampling points in [0,1]^d, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    seed: u64,
    distribution: DistributionTag,
}

/// On-disk JSON form: `{"dim": d, "seed": s, "points": [[…], …]}`.
#[derive(Serialize, Deserialize)]
struct RawSampleSet {
    dim: usize,
    seed: u64,
    points: Vec<Vec<f64>>,
}

impl SampleSet {
    /// Draws `n` i.i.d. uniform points on [0,1]^d from stream 0 of the
    /// given master seed (see the [`rng`] module for the derivation).
    pub fn uniform(dim: usize, n: usize, master_seed: u64) -> Result<Self, FourierError> {
        Self::uniform_with_stream(dim, n, master_seed, 0)
    }

    /// Draws `n` i.i.d. uniform points on [0,1]^d from the given stream of
    /// the master seed. Used by experiment drivers, where trial `i` draws
    /// from stream `i`; results are independent of execution order because
    /// all randomness is consumed here, before any parallel fan-out.
    pub fn uniform_with_stream(
        dim: usize,
        n: usize,
        master_seed: u64,
        stream: u64,
    ) -> Result<Self, FourierError> {
        if n == 0 {
            return Err(FourierError::EmptySampleSet);
        }
        assert!(dim >= 1, "dimension must be at least 1");
        let mut rng = rng::stream(master_seed, stream);
        let points = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
            .collect();
        Ok(SampleSet { dim, points, seed: master_seed, distribution: DistributionTag::Uniform })
    }

    /// Wraps externally supplied points after validating every coordinate.
    pub fn from_points(
        dim: usize,
        points: Vec<Vec<f64>>,
        seed: u64,
        distribution: DistributionTag,
    ) -> Result<Self, FourierError> {
        if points.is_empty() {
            return Err(FourierError::EmptySampleSet);
        }
        if dim == 0 {
            return Err(FourierError::PointDimMismatch { expected: 1, point: 0, found: 0 });
        }
        for (t, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(FourierError::PointDimMismatch { expected: dim, point: t, found: p.len() });
            }
            for (axis, &value) in p.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(FourierError::CoordinateOutOfRange { point: t, axis, value });
                }
            }
        }
        Ok(SampleSet { dim, points, seed, distribution })
    }

    /// Parses the JSON form `{"dim": d, "seed": s, "points": [[…], …]}`.
    /// Imported sets are tagged `custom("imported")`.
    pub fn from_json(text: &str) -> Result<Self, FourierError> {
        let raw: RawSampleSet =
            serde_json::from_str(text).map_err(|e| FourierError::Parse(e.to_string()))?;
        Self::from_points(raw.dim, raw.points, raw.seed, DistributionTag::Custom("imported".into()))
    }

    /// Serializes to the JSON form `{"dim": d, "seed": s, "points": [[…], …]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawSampleSet {
            dim: self.dim,
            seed: self.seed,
            points: self.points.clone(),
        })
        .expect("sample set serializes")
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points n.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: construction rejects empty sets.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The sampling points.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Master seed recorded at construction (informational for imports).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Provenance tag.
    pub fn distribution(&self) -> &DistributionTag {
        &self.distribution
    }
}

/// A coefficient vector aligned with a spectrum's canonical frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    values: Vec<Complex64>,
}

impl Coefficients {
    /// Wraps a coefficient vector (length must match the spectrum it is
    /// used with; enforced at the point of use).
    pub fn new(values: Vec<Complex64>) -> Self {
        Coefficients { values }
    }

    /// The coefficients, in canonical spectrum order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Number of coefficients.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the vector is empty.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The sampling matrix U of a trigonometric system: u_tk = exp(2πi k·x_t).
#[derive(Debug, Clone)]
pub struct FourierSystem {
    spectrum: Spectrum,
    samples: SampleSet,
    u: DMatrix<Complex64>,
}

/// exp(2πi·phase) with the phase reduced modulo 1 before evaluation, so
/// large frequency–point products do not lose accuracy in the exponential.
fn unit_phase(dot: f64) -> Complex64 {
    let frac = dot - dot.floor();
    let (sin, cos) = (2.0 * std::f64::consts::PI * frac).sin_cos();
    Complex64::new(cos, sin)
}

impl FourierSystem {
    /// Builds U from a spectrum and a sample set of matching dimension.
    pub fn build(spectrum: Spectrum, samples: SampleSet) -> Result<Self, FourierError> {
        if spectrum.dim() != samples.dim() {
            return Err(FourierError::SpectrumDimMismatch {
                spectrum_dim: spectrum.dim(),
                sample_dim: samples.dim(),
            });
        }
        let n = samples.len();
        let d_size = spectrum.len();
        // Rows are independent; computed in parallel and assembled in index
        // order, so the result does not depend on scheduling.
        let rows: Vec<Vec<Complex64>> = parallel::map_indexed(n, |t| {
            let x = &samples.points()[t];
            spectrum
                .freqs()
                .iter()
                .map(|k| {
                    let dot: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
                    unit_phase(dot)
                })
                .collect()
        });
        let mut u = DMatrix::zeros(n, d_size);
        for (t, row) in rows.iter().enumerate() {
            for (k, &value) in row.iter().enumerate() {
                u[(t, k)] = value;
            }
        }
        Ok(FourierSystem { spectrum, samples, u })
    }

    /// The frequency set Γ.
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// The sampling points.
    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    /// The n×D sampling matrix U.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// Number of samples n.
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    /// Number of frequencies D.
    pub fn basis_size(&self) -> usize {
        self.u.ncols()
    }

    /// The normalized Gram matrix n⁻¹U*U.
    ///
    /// Each diagonal entry of the exact Gram matrix is identically 1
    /// (every |u_tk| = 1), so the diagonal is set to 1 exactly rather than
    /// recomputed in floating point; the trace is therefore exactly D.
    pub fn gram(&self) -> HermitianMatrix {
        let upper = adjoint_product_upper(&self.u);
        let n = self.n() as f64;
        HermitianMatrix::from_fn(self.basis_size(), |k, j| {
            if k == j {
                Complex64::new(1.0, 0.0)
            } else {
                upper[(k, j)].unscale(n)
            }
        })
        .expect("basis size is at least 1")
    }

    /// Operator-norm deviation ‖n⁻¹U*U − Q‖ of the Gram matrix from a
    /// target Q (the identity, for uniform sampling).
    pub fn deviation(&self, q: &HermitianMatrix) -> Result<f64, FourierError> {
        if q.order() != self.basis_size() {
            return Err(FourierError::OrderMismatch {
                expected: self.basis_size(),
                found: q.order(),
            });
        }
        Ok(self.gram().sub(q)?.op_norm()?)
    }

    /// Evaluates the trigonometric polynomial with the given coefficients at
    /// every sample point: y = Ua.
    pub fn apply(&self, coeffs: &Coefficients) -> Result<Vec<Complex64>, FourierError> {
        if coeffs.len() != self.basis_size() {
            return Err(FourierError::OrderMismatch {
                expected: self.basis_size(),
                found: coeffs.len(),
            });
        }
        let a = DVector::from_column_slice(coeffs.values());
        Ok((&self.u * a).iter().copied().collect())
    }

    /// Recovers coefficients from sample values by solving the normal
    /// equations U*Ua = U*y (via the equivalent normalized system), using a
    /// Hermitian positive-definite factorization plus one step of iterative
    /// refinement.
    ///
    /// Refuses to solve when the normal matrix's condition number exceeds
    /// [`RECONSTRUCT_COND_LIMIT`].
    pub fn reconstruct(&self, y: &[Complex64]) -> Result<Coefficients, FourierError> {
        let n = self.n();
        let d_size = self.basis_size();
        if n < d_size {
            return Err(FourierError::Underdetermined { n, basis_size: d_size });
        }
        if y.len() != n {
            return Err(FourierError::OrderMismatch { expected: n, found: y.len() });
        }
        let gram = self.gram();
        let cond = gram.condition_number()?;
        if !(cond <= RECONSTRUCT_COND_LIMIT) {
            return Err(FourierError::SingularNormalMatrix { condition_number: cond });
        }
        // Right-hand side n⁻¹U*y, matching the normalization of the Gram matrix.
        let scale = 1.0 / n as f64;
        let b = DVector::from_fn(d_size, |k, _| {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                acc += self.u[(t, k)].conj() * y[t];
            }
            acc * scale
        });
        let chol = Cholesky::new(gram.as_matrix().clone()).ok_or(
            FourierError::SingularNormalMatrix { condition_number: cond },
        )?;
        let mut a = chol.solve(&b);
        // One refinement step removes most of the factorization's rounding.
        let residual = &b - gram.as_matrix() * &a;
        a += chol.solve(&residual);
        Ok(Coefficients::new(a.iter().copied().collect()))
    }
}

/// Upper triangle (including diagonal) of U*U, accumulated per entry in
/// ascending row order so results are bit-reproducible and independent of
/// any BLAS blocking strategy.
fn adjoint_product_upper(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = u.nrows();
    let d_size = u.ncols();
    let mut out = DMatrix::zeros(d_size, d_size);
    for k in 0..d_size {
        for j in k..d_size {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                acc += u[(t, k)].conj() * u[(t, j)];
            }
            out[(k, j)] = acc;
        }
    }
    out
}

/// The normalized Gram matrix n⁻¹A*A of a general complex matrix with n
/// rows (n ≥ 1, at least one column). The diagonal keeps its computed
/// floating-point value; Fourier systems instead use
/// [`FourierSystem::gram`], whose diagonal is exactly 1.
pub fn normalized_gram(a: &DMatrix<Complex64>) -> HermitianMatrix {
    assert!(a.nrows() >= 1 && a.ncols() >= 1, "matrix must be nonempty");
    let upper = adjoint_product_upper(a);
    let n = a.nrows() as f64;
    HermitianMatrix::from_fn(a.ncols(), |k, j| upper[(k, j)].unscale(n))
        .expect("order is at least 1")
}

/// Frobenius norm of the deviation n⁻¹A*A − Q as a dense matrix (used by
/// moment experiments, where powers of the deviation are formed).
pub fn deviation_matrix(a: &DMatrix<Complex64>, q: &HermitianMatrix) -> DMatrix<Complex64> {
    let gram = normalized_gram(a);
    gram.as_matrix() - q.as_matrix()
}
