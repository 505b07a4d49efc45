//! Random Fourier sample matrices of trigonometric polynomials and the
//! concentration bounds that govern them.
//!
//! The objects of study are n×D matrices U with entries
//! u_tk = exp(2πi k·x_t), built from a frequency set of size D and n random
//! sampling points, together with the normalized Gram matrix n⁻¹U*U. As n
//! grows the Gram matrix concentrates around its expectation Q, which pins
//! down the eigenvalues and condition number of the sampling problem.
//!
//! The crate provides:
//!
//! - [`spectrum`]: frequency sets (arbitrary or cube-shaped) in d dimensions;
//! - [`fourier`]: sample sets, matrix assembly, Gram/deviation computation,
//!   and least-squares reconstruction of coefficient vectors;
//! - [`hermitian`]: validated Hermitian matrices with extreme-eigenvalue and
//!   condition-number routines;
//! - [`stirling`]: associated Stirling numbers of the second kind and the
//!   generating-function sums driving the moment bounds;
//! - [`bounds`]: closed-form failure-probability bounds for the deviation
//!   ‖n⁻¹U*U − Q‖ ≥ ε and the matching minimal-sample-size formulas;
//! - [`voronoi`]: Voronoi sampling weights (exact in one dimension, Monte
//!   Carlo in general) and the weighted Gram matrix;
//! - [`montecarlo`]: seeded experiments that estimate the actual failure
//!   rates and check every applicable bound against them;
//! - [`rng`]: the stream-derivation rule that makes all randomness in the
//!   crate reproducible from a single master seed.
//!
//! # Reproducibility
//!
//! Every random computation takes a `u64` master seed and derives
//! independent substreams per trial (or per probe) via [`rng::stream`].
//! Results are bit-identical across runs and thread counts; the `parallel`
//! feature only changes how work is scheduled, never what is computed.

pub mod bounds;
pub mod fourier;
pub mod hermitian;
pub mod montecarlo;
pub(crate) mod parallel;
pub mod rng;
pub mod spectrum;
pub mod stirling;
pub mod voronoi;
