//! Seeded statistical experiments: estimate tail probabilities of the Gram
//! deviation, eigenvalue sandwich rates, and Frobenius moments, and compare
//! each against the closed-form bounds.
//!
//! Reproducibility contract: trial `i` of an experiment with master seed `s`
//! draws all of its randomness from stream `i` of `s` (see the [`rng`]
//! module). Trials run in parallel, but aggregation is a sequential fold
//! over the trial-ordered results, so reports are bit-identical across
//! thread counts and reruns.

use crate::bounds::{
    self, BoundsError, MomentProfile, MpParams, NonIidProfile, Part, MP_CAVEAT,
};
use crate::fourier::{normalized_gram, FourierError, FourierSystem, SampleSet};
use crate::hermitian::{HermitianError, HermitianMatrix};
use crate::parallel;
use crate::rng;
use crate::spectrum::Spectrum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use std::fmt;
use std::sync::Arc;

/// Minimum trial count for tail and sandwich experiments.
pub const MIN_TAIL_TRIALS: usize = 100;
/// Minimum trial count for Frobenius-moment experiments.
pub const MIN_FROBENIUS_TRIALS: usize = 500;
/// Report schema version emitted in every JSON document.
pub const REPORT_SCHEMA: u32 = 1;

/// Errors from experiment configuration and execution.
#[derive(Debug, Clone, PartialEq)]
pub enum MonteCarloError {
    /// Too few trials for statistically meaningful verdicts.
    TooFewTrials { trials: usize, minimum: usize },
    /// The scaled-sign scale sequence must have one entry per row.
    SigmaShapeMismatch { expected: usize, found: usize },
    /// Row scales must be positive and finite.
    SigmaOutOfRange { index: usize, value: f64 },
    /// This experiment supports a different family.
    WrongFamily { expected: &'static str },
    /// A custom sampler returned a matrix of the wrong shape.
    SamplerShape { expected_rows: usize, expected_cols: usize, rows: usize, cols: usize },
    /// Error from matrix construction.
    Fourier(FourierError),
    /// Error from a spectral routine.
    Hermitian(HermitianError),
    /// Error from bound evaluation.
    Bounds(BoundsError),
}

impl fmt::Display for MonteCarloError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonteCarloError::TooFewTrials { trials, minimum } => {
                write!(f, "{trials} trials requested, minimum is {minimum}")
            }
            MonteCarloError::SigmaShapeMismatch { expected, found } => {
                write!(f, "scale sequence has {found} entries, expected n = {expected}")
            }
            MonteCarloError::SigmaOutOfRange { index, value } => {
                write!(f, "scale sigma[{index}] = {value} must be positive and finite")
            }
            MonteCarloError::WrongFamily { expected } => {
                write!(f, "experiment requires the {expected} family")
            }
            MonteCarloError::SamplerShape { expected_rows, expected_cols, rows, cols } => {
                write!(f, "sampler returned {rows}×{cols}, expected {expected_rows}×{expected_cols}")
            }
            MonteCarloError::Fourier(e) => write!(f, "matrix construction failed: {e}"),
            MonteCarloError::Hermitian(e) => write!(f, "spectral routine failed: {e}"),
            MonteCarloError::Bounds(e) => write!(f, "bound evaluation failed: {e}"),
        }
    }
}

impl std::error::Error for MonteCarloError {}

impl From<FourierError> for MonteCarloError {
    fn from(e: FourierError) -> Self {
        MonteCarloError::Fourier(e)
    }
}

impl From<HermitianError> for MonteCarloError {
    fn from(e: HermitianError) -> Self {
        MonteCarloError::Hermitian(e)
    }
}

impl From<BoundsError> for MonteCarloError {
    fn from(e: BoundsError) -> Self {
        MonteCarloError::Bounds(e)
    }
}

/// A user-supplied row family: the sampler draws an n×D matrix from the
/// given generator; the caller vouches for Q and the moment profile, so
/// reports built from it are flagged as unaudited.
#[derive(Clone)]
pub struct CustomFamily {
    pub id: String,
    pub d: usize,
    pub sampler: Arc<dyn Fn(&mut ChaCha8Rng, usize) -> DMatrix<Complex64> + Send + Sync>,
    pub q: HermitianMatrix,
    pub profile: MomentProfile,
}

impl fmt::Debug for CustomFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFamily")
            .field("id", &self.id)
            .field("d", &self.d)
            .finish_non_exhaustive()
    }
}

/// Distribution of the random matrix rows.
#[derive(Debug, Clone)]
pub enum RowFamily {
    /// u_tk = exp(2πi k·x_t) with x_t i.i.d. uniform on [0,1]^d; Q = I.
    FourierUniform { spectrum: Spectrum },
    /// Row t has independent real entries ±σ_t (equiprobable);
    /// Q_n = (n⁻¹Σσ_t²)·I. Rows are independent but not identically
    /// distributed.
    ScaledSign { sigmas: Vec<f64>, d: usize },
    /// Caller-supplied family; see [`CustomFamily`].
    Custom(CustomFamily),
}

impl RowFamily {
    /// Number of columns D of the sampled matrices.
    pub fn basis_size(&self) -> usize {
        match self {
            RowFamily::FourierUniform { spectrum } => spectrum.len(),
            RowFamily::ScaledSign { d, .. } => *d,
            RowFamily::Custom(c) => c.d,
        }
    }

    /// Human-readable family descriptor for reports.
    pub fn descriptor(&self) -> String {
        match self {
            RowFamily::FourierUniform { spectrum } => {
                format!("fourier-uniform(D={}, d={})", spectrum.len(), spectrum.dim())
            }
            RowFamily::ScaledSign { sigmas, d } => {
                format!("scaled-sign(D={d}, rows={})", sigmas.len())
            }
            RowFamily::Custom(c) => format!("custom({})", c.id),
        }
    }

    /// Whether the family's Q and moment profile are derived internally
    /// (audited) rather than supplied by the caller.
    pub fn is_audited(&self) -> bool {
        !matches!(self, RowFamily::Custom(_))
    }

    /// The expected Gram matrix Q_n at row count n.
    pub fn q_n(&self, n: usize) -> Result<HermitianMatrix, MonteCarloError> {
        let d = self.basis_size();
        match self {
            RowFamily::FourierUniform { .. } => Ok(HermitianMatrix::identity(d)?),
            RowFamily::ScaledSign { sigmas, .. } => {
                self.validate_sigmas(n)?;
                // Left-to-right sum in row order matches the Gram matrix's
                // own diagonal accumulation, so the deviation's diagonal
                // vanishes exactly.
                let scalar = sigmas.iter().map(|s| s * s).sum::<f64>() / n as f64;
                Ok(HermitianMatrix::from_fn(d, |k, j| {
                    if k == j {
                        Complex64::new(scalar, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })?)
            }
            RowFamily::Custom(c) => Ok(c.q.clone()),
        }
    }

    /// The per-entry moment table of the family at row count n.
    pub fn moment_profile(&self, n: usize) -> Result<MomentProfile, MonteCarloError> {
        let d = self.basis_size();
        match self {
            RowFamily::FourierUniform { .. } => {
                // Off-diagonal products are unimodular with uniform phase:
                // both parts have variance constant 1/2 and M = 1/3; the
                // diagonal deviates by exactly zero.
                Ok(MomentProfile::NonIid(NonIidProfile::from_fn(d, |_, k, j| {
                    if k == j {
                        (0.0, 0.0)
                    } else {
                        (0.5, 1.0 / 3.0)
                    }
                })?))
            }
            RowFamily::ScaledSign { sigmas, .. } => {
                self.validate_sigmas(n)?;
                let v_mean = sigmas.iter().map(|s| (s * s) * (s * s)).sum::<f64>() / n as f64;
                let m_max = sigmas.iter().map(|s| s * s).fold(0.0f64, f64::max) / 3.0;
                Ok(MomentProfile::NonIid(NonIidProfile::from_fn(d, |part, k, j| {
                    if k == j || part == Part::Im {
                        (0.0, 0.0)
                    } else {
                        (v_mean, m_max)
                    }
                })?))
            }
            RowFamily::Custom(c) => Ok(c.profile.clone()),
        }
    }

    fn validate_sigmas(&self, n: usize) -> Result<(), MonteCarloError> {
        if let RowFamily::ScaledSign { sigmas, .. } = self {
            if sigmas.len() != n {
                return Err(MonteCarloError::SigmaShapeMismatch {
                    expected: n,
                    found: sigmas.len(),
                });
            }
            for (index, &value) in sigmas.iter().enumerate() {
                if !(value.is_finite() && value > 0.0) {
                    return Err(MonteCarloError::SigmaOutOfRange { index, value });
                }
            }
        }
        Ok(())
    }

    /// Draws the trial's n×D matrix from stream `trial` of `seed`.
    fn draw_matrix(&self, n: usize, seed: u64, trial: u64) -> Result<DMatrix<Complex64>, MonteCarloError> {
        match self {
            RowFamily::FourierUniform { spectrum } => {
                let samples =
                    SampleSet::uniform_with_stream(spectrum.dim(), n, seed, trial)?;
                let fs = FourierSystem::build(spectrum.clone(), samples)?;
                Ok(fs.matrix().clone())
            }
            RowFamily::ScaledSign { sigmas, d } => {
                let mut generator = rng::stream(seed, trial);
                let mut u = DMatrix::zeros(n, *d);
                for t in 0..n {
                    for k in 0..*d {
                        let sign = if generator.gen::<bool>() { 1.0 } else { -1.0 };
                        u[(t, k)] = Complex64::new(sign * sigmas[t], 0.0);
                    }
                }
                Ok(u)
            }
            RowFamily::Custom(c) => {
                let mut generator = rng::stream(seed, trial);
                let u = (c.sampler)(&mut generator, n);
                if u.nrows() != n || u.ncols() != c.d {
                    return Err(MonteCarloError::SamplerShape {
                        expected_rows: n,
                        expected_cols: c.d,
                        rows: u.nrows(),
                        cols: u.ncols(),
                    });
                }
                Ok(u)
            }
        }
    }

    /// The trial's normalized Gram matrix n⁻¹U*U. Fourier systems use the
    /// construction with an exactly-unit diagonal.
    fn draw_gram(&self, n: usize, seed: u64, trial: u64) -> Result<HermitianMatrix, MonteCarloError> {
        match self {
            RowFamily::FourierUniform { spectrum } => {
                let samples =
                    SampleSet::uniform_with_stream(spectrum.dim(), n, seed, trial)?;
                let fs = FourierSystem::build(spectrum.clone(), samples)?;
                Ok(fs.gram())
            }
            _ => {
                let u = self.draw_matrix(n, seed, trial)?;
                Ok(normalized_gram(&u))
            }
        }
    }
}

/// Consistency verdict of an empirical rate against a theoretical bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The 99% lower confidence limit does not exceed the bound.
    Consistent,
    /// The empirical rate is significantly above the bound.
    Violated,
}

/// One theoretical bound evaluated at the experiment's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    /// Formula identifier (e.g. "fourier", "main", "psi", "moment-best").
    pub name: String,
    /// The bound's value at (n, D, ε) with this family's moment profile.
    pub value: f64,
    /// Whether the bound is a verifiable certificate (the Orlicz-norm bound
    /// is not: its absolute constant is unspecified).
    pub certifiable: bool,
    /// Verdict of the empirical rate against this bound.
    pub verdict: Verdict,
    /// Caveats (e.g. [`MP_CAVEAT`]).
    pub caveats: Vec<String>,
}

/// Outcome of a tail or sandwich experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// Schema version of this document.
    pub schema: u32,
    /// "tail" or "sandwich".
    pub experiment: String,
    /// Family descriptor.
    pub family: String,
    pub n: usize,
    /// Basis size D.
    pub d: usize,
    pub eps: f64,
    pub trials: usize,
    /// Master seed; trial i draws from stream i.
    pub seed: u64,
    /// Number of trials where the monitored event failed (deviation ≥ ε,
    /// or the eigenvalue sandwich did not hold).
    pub failure_count: usize,
    /// failure_count / trials.
    pub empirical_rate: f64,
    /// Exact (Clopper–Pearson) 99% confidence limits for the failure rate.
    pub cp99_lower: f64,
    pub cp99_upper: f64,
    /// Every applicable theoretical bound with its verdict.
    pub bounds: Vec<BoundComparison>,
    /// Condition-number certificate (λ_max(Q)+ε)/(λ_min(Q)−ε) when the
    /// deviation certificate ε leaves the spectrum positive.
    pub certified_condition_number: Option<f64>,
    /// Set when the family's Q/profile were caller-supplied.
    pub unaudited: bool,
}

impl ExperimentReport {
    /// Serializes the report as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// True if any certifiable bound was violated.
    pub fn any_certifiable_violation(&self) -> bool {
        self.bounds
            .iter()
            .any(|b| b.certifiable && b.verdict == Verdict::Violated)
    }

    /// Fraction of trials where the monitored event held.
    pub fn held_fraction(&self) -> f64 {
        1.0 - self.empirical_rate
    }
}

/// Outcome of a Frobenius-moment experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusReport {
    pub schema: u32,
    /// Always "frobenius".
    pub experiment: String,
    pub family: String,
    pub n: usize,
    pub d: usize,
    /// Power m applied to the deviation matrix.
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Mean over trials of ‖(n⁻¹U*U − I)^m‖_F².
    pub empirical_mean: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// The moment bound D·G_{2m}(n/D).
    pub theoretical: f64,
    /// Violated iff empirical_mean > theoretical + 3·std_error.
    pub verdict: Verdict,
}

impl FrobeniusReport {
    /// Serializes the report as pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Exact two-sided 99% Clopper–Pearson confidence interval for a binomial
/// rate with `failures` successes out of `trials`.
pub fn clopper_pearson_99(failures: usize, trials: usize) -> (f64, f64) {
    assert!(trials >= 1 && failures <= trials, "invalid binomial sample");
    let k = failures as f64;
    let n = trials as f64;
    let lower = if failures == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid Beta shape")
            .inverse_cdf(0.005)
    };
    let upper = if failures == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid Beta shape")
            .inverse_cdf(0.995)
    };
    (lower, upper)
}

/// The bounds applicable to a family at (n, D, ε), each with its verdict
/// against the experiment's lower confidence limit.
fn applicable_bounds(
    family: &RowFamily,
    n: usize,
    eps: f64,
    cp_lower: f64,
) -> Result<Vec<BoundComparison>, MonteCarloError> {
    let d = family.basis_size();
    let nn = n as u64;
    let mut out: Vec<(String, f64, bool, Vec<String>)> = Vec::new();
    let profile = family.moment_profile(n)?;

    match family {
        RowFamily::FourierUniform { .. } => {
            out.push((
                "fourier".into(),
                bounds::fourier_failure_bound(nn, d, eps)?,
                true,
                vec![],
            ));
            let iid = MomentProfile::fourier();
            out.push((
                "main".into(),
                bounds::main_failure_bound(nn, d, eps, &iid, false)?,
                true,
                vec![],
            ));
            out.push((
                "bounded-improved".into(),
                bounds::bounded_failure_bound(nn, d, eps, 1.0, 0.5, true)?,
                true,
                vec![],
            ));
            out.push(("psi".into(), bounds::noniid_psi(nn, d, eps, &profile, false)?, true, vec![]));
            out.push((
                "psi-refined".into(),
                bounds::noniid_psi(nn, d, eps, &profile, true)?,
                true,
                vec![],
            ));
            let (best_m, moment) = bounds::moment_best_m(nn, d, eps)?;
            out.push((format!("moment-best(m={best_m})"), moment, true, vec![]));
            if n >= 2 {
                let params = MpParams::fourier(d, 2.0, 1.0)?;
                out.push((
                    "mp".into(),
                    bounds::mp_failure_bound(nn, d, &params, eps)?,
                    false,
                    vec![MP_CAVEAT.to_string()],
                ));
            }
        }
        RowFamily::ScaledSign { sigmas, .. } => {
            out.push(("psi".into(), bounds::noniid_psi(nn, d, eps, &profile, false)?, true, vec![]));
            out.push((
                "psi-refined".into(),
                bounds::noniid_psi(nn, d, eps, &profile, true)?,
                true,
                vec![],
            ));
            let uniform_sigma = sigmas.windows(2).all(|w| w[0] == w[1]);
            if uniform_sigma {
                let s2 = sigmas[0] * sigmas[0];
                let iid = MomentProfile::iid(s2 * s2, s2 / 3.0)?;
                out.push((
                    "main-real".into(),
                    bounds::main_failure_bound(nn, d, eps, &iid, true)?,
                    true,
                    vec![],
                ));
            }
        }
        RowFamily::Custom(_) => match &profile {
            MomentProfile::Iid { .. } => {
                out.push((
                    "main".into(),
                    bounds::main_failure_bound(nn, d, eps, &profile, false)?,
                    true,
                    vec!["unaudited: caller-supplied moment profile".into()],
                ));
            }
            MomentProfile::NonIid(_) => {
                out.push((
                    "psi".into(),
                    bounds::noniid_psi(nn, d, eps, &profile, false)?,
                    true,
                    vec!["unaudited: caller-supplied moment profile".into()],
                ));
            }
        },
    }

    Ok(out
        .into_iter()
        .map(|(name, value, certifiable, caveats)| BoundComparison {
            name,
            value,
            certifiable,
            verdict: if cp_lower > value { Verdict::Violated } else { Verdict::Consistent },
            caveats,
        })
        .collect())
}

fn check_trials(trials: usize, minimum: usize) -> Result<(), MonteCarloError> {
    if trials < minimum {
        return Err(MonteCarloError::TooFewTrials { trials, minimum });
    }
    Ok(())
}

/// Certificate for the condition number implied by the sandwich at ε:
/// all eigenvalues lie in [λ_min(Q)−ε, λ_max(Q)+ε].
fn condition_certificate(q: &HermitianMatrix, eps: f64) -> Result<Option<f64>, MonteCarloError> {
    let (q_lo, q_hi) = q.eig_extremes()?;
    if q_lo - eps > 0.0 {
        Ok(Some((q_hi + eps) / (q_lo - eps)))
    } else {
        Ok(None)
    }
}

fn assemble_report(
    experiment: &str,
    family: &RowFamily,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
    failure_count: usize,
) -> Result<ExperimentReport, MonteCarloError> {
    let (cp99_lower, cp99_upper) = clopper_pearson_99(failure_count, trials);
    let bounds = applicable_bounds(family, n, eps, cp99_lower)?;
    let q = family.q_n(n)?;
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA,
        experiment: experiment.to_string(),
        family: family.descriptor(),
        n,
        d: family.basis_size(),
        eps,
        trials,
        seed,
        failure_count,
        empirical_rate: failure_count as f64 / trials as f64,
        cp99_lower,
        cp99_upper,
        bounds,
        certified_condition_number: condition_certificate(&q, eps)?,
        unaudited: !family.is_audited(),
    })
}

/// Tail experiment: draws `trials` independent matrices, counts trials with
/// op-norm deviation ‖n⁻¹U*U − Q_n‖ ≥ ε, and compares the empirical rate
/// against every applicable bound.
pub fn run_tail_experiment(
    family: &RowFamily,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport, MonteCarloError> {
    check_trials(trials, MIN_TAIL_TRIALS)?;
    family.validate_sigmas(n)?;
    let q = family.q_n(n)?;
    let deviations: Vec<Result<f64, MonteCarloError>> = parallel::map_indexed(trials, |i| {
        let gram = family.draw_gram(n, seed, i as u64)?;
        Ok(gram.sub(&q)?.op_norm()?)
    });
    let deviations = deviations.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failure_count = deviations.iter().filter(|&&dev| dev >= eps).count();
    assemble_report("tail", family, n, eps, trials, seed, failure_count)
}

/// Sandwich experiment: counts trials where some eigenvalue of n⁻¹U*U
/// escapes (λ_min(Q_n)−ε, λ_max(Q_n)+ε). Since the operator-norm event
/// contains the escape event, each trial additionally asserts that
/// deviation < ε implies the sandwich holds.
pub fn run_eigen_sandwich(
    family: &RowFamily,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport, MonteCarloError> {
    check_trials(trials, MIN_TAIL_TRIALS)?;
    family.validate_sigmas(n)?;
    let q = family.q_n(n)?;
    let (q_lo, q_hi) = q.eig_extremes()?;
    let outcomes: Vec<Result<bool, MonteCarloError>> = parallel::map_indexed(trials, |i| {
        let gram = family.draw_gram(n, seed, i as u64)?;
        let (lo, hi) = gram.eig_extremes()?;
        let deviation = gram.sub(&q)?.op_norm()?;
        let sandwich_holds = lo > q_lo - eps && hi < q_hi + eps;
        assert!(
            deviation >= eps || sandwich_holds,
            "operator-norm deviation {deviation} < eps must force the eigenvalue sandwich"
        );
        Ok(!sandwich_holds)
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failure_count = outcomes.iter().filter(|&&failed| failed).count();
    assemble_report("sandwich", family, n, eps, trials, seed, failure_count)
}

/// Frobenius-moment experiment (Fourier family only): averages
/// ‖(n⁻¹U*U − I)^m‖_F² over trials and compares with D·G_{2m}(n/D).
pub fn run_frobenius_moment(
    family: &RowFamily,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<FrobeniusReport, MonteCarloError> {
    check_trials(trials, MIN_FROBENIUS_TRIALS)?;
    assert!(m >= 1, "power m must be at least 1");
    let spectrum = match family {
        RowFamily::FourierUniform { spectrum } => spectrum,
        _ => return Err(MonteCarloError::WrongFamily { expected: "fourier-uniform" }),
    };
    let d = spectrum.len();
    let identity = HermitianMatrix::identity(d)?;
    let values: Vec<Result<f64, MonteCarloError>> = parallel::map_indexed(trials, |i| {
        let gram = family.draw_gram(n, seed, i as u64)?;
        let dev = gram.as_matrix() - identity.as_matrix();
        let mut power = dev.clone();
        for _ in 1..m {
            power = &power * &dev;
        }
        Ok(power.norm_squared())
    });
    let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let variance =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials as f64 - 1.0);
    let std_error = (variance / trials as f64).sqrt();
    let theoretical = d as f64 * crate::stirling::g_eval(2 * m, n as f64 / d as f64);
    let verdict = if mean > theoretical + 3.0 * std_error {
        Verdict::Violated
    } else {
        Verdict::Consistent
    };
    Ok(FrobeniusReport {
        schema: REPORT_SCHEMA,
        experiment: "frobenius".to_string(),
        family: family.descriptor(),
        n,
        d,
        m,
        trials,
        seed,
        empirical_mean: mean,
        std_error,
        theoretical,
        verdict,
    })
}
