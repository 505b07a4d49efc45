//! Closed-form failure-probability bounds and sufficient sample sizes for
//! the deviation of the normalized Gram matrix n⁻¹U*U from its expected
//! matrix Q, plus a generic minimal-n solver.
//!
//! Every bound here answers the same question: given n sample points, how
//! likely is the operator-norm deviation to reach ε? The formulas differ in
//! the moment information they consume (bounded entries, per-row moment
//! tables, Fourier structure, Orlicz norms, or Frobenius moments). All
//! results are clamped into [0, 1], and all sample-size routines round up,
//! since the underlying inequalities are sufficient conditions.

use crate::stirling::{g_eval_ln_with, AssocStirlingTable};
use std::collections::BTreeMap;
use std::f64::consts::{E, SQRT_2};
use std::fmt;

/// Caveat attached to every Orlicz-norm bound output: its absolute constant
/// is not pinned down, so the numeric value cannot certify anything.
pub const MP_CAVEAT: &str =
    "non-verifiable: depends on an unspecified absolute constant c (default 1)";

/// Hard ceiling for [`solve_min_n`]'s exponential search.
pub const SOLVE_MIN_N_LIMIT: u64 = 1 << 62;

/// Cap on the exponent scanned by [`moment_best_m`].
const BEST_M_HARD_CAP: u64 = 256;

/// Errors from bound evaluation and sample-size solving.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    /// A numeric argument violates its stated domain.
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// The supplied moment profile has the wrong variant for this formula.
    ProfileVariant { expected: &'static str },
    /// A non-i.i.d. moment table was built for a different basis size.
    TableShape { expected_d: usize, found_d: usize },
    /// The improved bounded-entry bound needs C > 0 and b > 0.
    ImprovedUndefined,
    /// α must lie strictly between 0 and ε².
    AlphaOutOfRange { alpha: f64, eps_sq: f64 },
    /// No n up to 2⁶² satisfies the requested bound.
    Unsatisfiable,
    /// The bound handed to [`solve_min_n`] increased between samples.
    NotMonotone { at: u64 },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::InvalidParameter { name, value, requirement } => {
                write!(f, "parameter {name} = {value} out of range: must satisfy {requirement}")
            }
            BoundsError::ProfileVariant { expected } => {
                write!(f, "moment profile has the wrong variant: this formula needs {expected}")
            }
            BoundsError::TableShape { expected_d, found_d } => {
                write!(f, "moment table built for D = {found_d}, expected D = {expected_d}")
            }
            BoundsError::ImprovedUndefined => {
                write!(f, "improved bound undefined: requires C > 0 and b > 0")
            }
            BoundsError::AlphaOutOfRange { alpha, eps_sq } => {
                write!(f, "alpha out of range: {alpha} must lie in (0, eps^2) = (0, {eps_sq})")
            }
            BoundsError::Unsatisfiable => {
                write!(f, "unsatisfiable: no sample size up to 2^62 meets the target")
            }
            BoundsError::NotMonotone { at } => {
                write!(f, "bound is not nonincreasing in n (detected near n = {at})")
            }
        }
    }
}

impl std::error::Error for BoundsError {}

fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<(), BoundsError> {
    if ok {
        Ok(())
    } else {
        Err(BoundsError::InvalidParameter { name, value, requirement })
    }
}

/// Real or imaginary part selector for non-i.i.d. moment tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// Per-entry moment constants for matrices with independent, not
/// necessarily identically distributed rows.
///
/// For each matrix position (k, j) and each part (real/imaginary), the
/// table stores the across-rows *mean* variance constant
/// v̄ = n⁻¹·Σ_t v^(t) and the across-rows maximum M = max_t M^(t). Storing
/// the mean (rather than the sum) keeps the table independent of n and
/// makes a table with all entries equal reproduce the i.i.d. formula
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct NonIidProfile {
    d: usize,
    /// Indexed by part (0 = Re, 1 = Im), then row, then column.
    v_mean: Vec<f64>,
    m_max: Vec<f64>,
}

impl NonIidProfile {
    /// Builds a table by evaluating `f(part, k, j) -> (v_mean, m_max)` at
    /// every position. All constants must be nonnegative and finite.
    pub fn from_fn(
        d: usize,
        f: impl Fn(Part, usize, usize) -> (f64, f64),
    ) -> Result<Self, BoundsError> {
        ensure(d >= 1, "D", d as f64, "D >= 1")?;
        let mut v_mean = vec![0.0; 2 * d * d];
        let mut m_max = vec![0.0; 2 * d * d];
        for (p, part) in [Part::Re, Part::Im].into_iter().enumerate() {
            for k in 0..d {
                for j in 0..d {
                    let (v, m) = f(part, k, j);
                    ensure(v.is_finite() && v >= 0.0, "v", v, "v >= 0")?;
                    ensure(m.is_finite() && m >= 0.0, "M", m, "M >= 0")?;
                    let idx = (p * d + k) * d + j;
                    v_mean[idx] = v;
                    m_max[idx] = m;
                }
            }
        }
        Ok(NonIidProfile { d, v_mean, m_max })
    }

    /// A table with every entry equal to (v, m).
    pub fn uniform(d: usize, v: f64, m: f64) -> Result<Self, BoundsError> {
        Self::from_fn(d, |_, _, _| (v, m))
    }

    /// Basis size the table was built for.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Mean variance constant at (part, k, j).
    pub fn v_mean(&self, part: Part, k: usize, j: usize) -> f64 {
        self.v_mean[self.index(part, k, j)]
    }

    /// Maximum M constant at (part, k, j).
    pub fn m_max(&self, part: Part, k: usize, j: usize) -> f64 {
        self.m_max[self.index(part, k, j)]
    }

    /// Largest mean variance constant in the table.
    pub fn max_v_mean(&self) -> f64 {
        self.v_mean.iter().copied().fold(0.0, f64::max)
    }

    /// Largest M constant in the table.
    pub fn max_m(&self) -> f64 {
        self.m_max.iter().copied().fold(0.0, f64::max)
    }

    fn index(&self, part: Part, k: usize, j: usize) -> usize {
        let p = match part {
            Part::Re => 0,
            Part::Im => 1,
        };
        (p * self.d + k) * self.d + j
    }

    /// Number of columns j whose (k, j) entry carries any nonzero constant —
    /// the per-row effective dimension used by the refined union bound.
    fn row_support(&self, k: usize) -> usize {
        (0..self.d)
            .filter(|&j| {
                self.v_mean(Part::Re, k, j) != 0.0
                    || self.m_max(Part::Re, k, j) != 0.0
                    || self.v_mean(Part::Im, k, j) != 0.0
                    || self.m_max(Part::Im, k, j) != 0.0
            })
            .count()
    }
}

/// Moment constants of the matrix entries, in either the i.i.d. form
/// (single worst-case pair v, M) or the per-entry non-i.i.d. table form.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentProfile {
    /// Identically distributed rows: v bounds the per-entry variance
    /// constant, m the per-entry M constant (both maxima over positions).
    Iid { v: f64, m: f64 },
    /// Independent rows with per-entry constants.
    NonIid(NonIidProfile),
}

impl MomentProfile {
    /// I.i.d. profile with the given constants (both nonnegative).
    pub fn iid(v: f64, m: f64) -> Result<Self, BoundsError> {
        ensure(v.is_finite() && v >= 0.0, "v", v, "v >= 0")?;
        ensure(m.is_finite() && m >= 0.0, "M", m, "M >= 0")?;
        Ok(MomentProfile::Iid { v, m })
    }

    /// The i.i.d. profile of the uniform-sampling Fourier family:
    /// off-diagonal variance constant 1/2, M = 1/3 (entries bounded by 1).
    pub fn fourier() -> Self {
        MomentProfile::Iid { v: 0.5, m: 1.0 / 3.0 }
    }
}

/// min(1, 2·exp(−x²/(2(v_sum + M·x)))), the Bernstein-type tail for a sum
/// of centered variables with variance proxy v_sum and moment scale M.
/// Returns 0 when M = v_sum = 0 (the sum is then deterministically 0).
pub fn bennett_tail(x: f64, m_const: f64, v_sum: f64) -> f64 {
    assert!(x > 0.0, "x must be positive");
    assert!(m_const >= 0.0 && v_sum >= 0.0, "constants must be nonnegative");
    if m_const == 0.0 && v_sum == 0.0 {
        return 0.0;
    }
    (2.0 * (-(x * x) / (2.0 * (v_sum + m_const * x))).exp()).min(1.0)
}

/// Per-entry tail factor of the complex-case union bound:
/// exp(−nε²/(D²(4v + 2√2·M·ε/D))). Shared between the i.i.d. formula and
/// the per-entry union bound so that uniform tables reproduce the i.i.d.
/// result bit for bit. Zero constants give a zero factor.
fn complex_entry_term(n: f64, d: f64, eps: f64, v: f64, m: f64) -> f64 {
    if v == 0.0 && m == 0.0 {
        return 0.0;
    }
    let denom = d * d * (4.0 * v + 2.0 * SQRT_2 * m * eps / d);
    let exponent = -(n * eps * eps) / denom;
    // Flush the deep tail to zero before products can land in the
    // subnormal range, where scaling by the term count would stop
    // commuting with rounding.
    if exponent < -700.0 {
        return 0.0;
    }
    exponent.exp()
}

/// Real-case per-entry tail factor: exp(−nε²/(2D²(v + M·ε/D))).
fn real_entry_term(n: f64, d: f64, eps: f64, v: f64, m: f64) -> f64 {
    if v == 0.0 && m == 0.0 {
        return 0.0;
    }
    let denom = 2.0 * d * d * (v + m * eps / d);
    (-(n * eps * eps) / denom).exp()
}

/// Failure-probability bound for i.i.d. rows with moment constants (v, M):
/// complex case min(1, 4D²·exp(−nε²/(D²(4v + 2√2·M·ε/D)))); real case
/// min(1, 2D²·exp(−nε²/(2D²(v + M·ε/D)))).
pub fn main_failure_bound(
    n: u64,
    d: usize,
    eps: f64,
    profile: &MomentProfile,
    real_valued: bool,
) -> Result<f64, BoundsError> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    let (v, m) = match profile {
        MomentProfile::Iid { v, m } => (*v, *m),
        MomentProfile::NonIid(_) => {
            return Err(BoundsError::ProfileVariant { expected: "iid" });
        }
    };
    let term = if real_valued {
        real_entry_term(n as f64, d as f64, eps, v, m)
    } else {
        complex_entry_term(n as f64, d as f64, eps, v, m)
    };
    let coeff = if real_valued { (2 * d * d) as f64 } else { (4 * d * d) as f64 };
    Ok((coeff * term).min(1.0))
}

/// Failure-probability bound when |entries| ≤ C and per-entry variances are
/// bounded by b. The plain form is the i.i.d. bound with M = C/3, v = b;
/// the improved form applies the sharper Bennett exponent
/// 4D²·exp(−C⁻²·n·b·((1+u)ln(1+u) − u)) with u = Cε/(√2·D·b).
pub fn bounded_failure_bound(
    n: u64,
    d: usize,
    eps: f64,
    c: f64,
    b: f64,
    improved: bool,
) -> Result<f64, BoundsError> {
    ensure(c.is_finite() && c >= 0.0, "C", c, "C >= 0")?;
    ensure(b.is_finite() && b >= 0.0, "b", b, "b >= 0")?;
    if !improved {
        return main_failure_bound(n, d, eps, &MomentProfile::Iid { v: b, m: c / 3.0 }, false);
    }
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    if c == 0.0 || b == 0.0 {
        return Err(BoundsError::ImprovedUndefined);
    }
    let u = c * eps / (SQRT_2 * d as f64 * b);
    let h = (1.0 + u) * u.ln_1p() - u;
    let exponent = -(n as f64) * b * h / (c * c);
    Ok(((4 * d * d) as f64 * exponent.exp()).min(1.0))
}

/// Per-entry union bound Ψ for independent, non-identically distributed
/// rows: Ψ = min(1, 2·Σ_{part} Σ_{k,j} exp(−nε²/(D²(4v̄_kj + 2√2·M_kj·ε/D)))).
///
/// With `refine` set, the global D in each term is replaced by the support
/// count D_k of row k (positions whose constants are all zero cannot
/// contribute deviation), which can only tighten the bound. Entries with
/// zero constants contribute nothing either way.
pub fn noniid_psi(
    n: u64,
    d: usize,
    eps: f64,
    profile: &MomentProfile,
    refine: bool,
) -> Result<f64, BoundsError> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    let table = match profile {
        MomentProfile::NonIid(t) => t,
        MomentProfile::Iid { .. } => {
            return Err(BoundsError::ProfileVariant { expected: "non-iid" });
        }
    };
    if table.d() != d {
        return Err(BoundsError::TableShape { expected_d: d, found_d: table.d() });
    }
    // Group equal terms and sum count·value in ascending order: the result
    // is independent of iteration order, and a table with one distinct term
    // value collapses to a single product, matching the i.i.d. formula's
    // single rounding.
    let mut groups: BTreeMap<u64, u64> = BTreeMap::new();
    for part in [Part::Re, Part::Im] {
        for k in 0..d {
            let d_eff = if refine { table.row_support(k) as f64 } else { d as f64 };
            for j in 0..d {
                let term = complex_entry_term(
                    n as f64,
                    d_eff,
                    eps,
                    table.v_mean(part, k, j),
                    table.m_max(part, k, j),
                );
                *groups.entry(term.to_bits()).or_insert(0) += 1;
            }
        }
    }
    let sum: f64 = groups
        .iter()
        .map(|(&bits, &count)| count as f64 * f64::from_bits(bits))
        .sum();
    Ok((2.0 * sum).min(1.0))
}

/// Failure-probability bound specialized to the uniform-sampling Fourier
/// family: min(1, 4D(D−1)·exp(−nε²/(2((D−1)² + √2(D−1)ε/3)))). A single
/// frequency (D = 1) has deviation identically zero.
pub fn fourier_failure_bound(n: u64, d: usize, eps: f64) -> Result<f64, BoundsError> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    if d == 1 {
        return Ok(0.0);
    }
    let dm1 = (d - 1) as f64;
    let denom = 2.0 * (dm1 * dm1 + SQRT_2 * dm1 * eps / 3.0);
    let coeff = (4 * d * (d - 1)) as f64;
    Ok((coeff * (-(n as f64) * eps * eps / denom).exp()).min(1.0))
}

/// Smallest n for which the Fourier-family bound is at most δ:
/// n ≥ (2/ε²)((D−1)² + √2(D−1)ε/3)·ln(4D(D−1)/δ), adjusted so that the
/// returned n is exactly the threshold of [`fourier_failure_bound`].
pub fn fourier_min_n(d: usize, eps: f64, delta: f64) -> Result<u64, BoundsError> {
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps < 1.0, "eps", eps, "0 < eps < 1")?;
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    if d == 1 {
        return Ok(1);
    }
    let dm1 = (d - 1) as f64;
    let threshold = 2.0 / (eps * eps)
        * (dm1 * dm1 + SQRT_2 * dm1 * eps / 3.0)
        * ((4 * d * (d - 1)) as f64 / delta).ln();
    let mut n = threshold.ceil().max(1.0) as u64;
    // The closed form and the bound agree in exact arithmetic; nudge by a
    // step or two so the threshold property holds in floating point too.
    while fourier_failure_bound(n, d, eps)? > delta {
        n += 1;
    }
    while n > 1 && fourier_failure_bound(n - 1, d, eps)? <= delta {
        n -= 1;
    }
    Ok(n)
}

/// Parameters of the Orlicz-norm deviation bound: ρ is the fourth-moment
/// constant, `z_orlicz` the ψ_α norm of an entry, α ≥ 1 the Orlicz
/// exponent, `lambda_max_q` the largest eigenvalue of Q, and c the
/// unspecified absolute constant (default 1; see [`MP_CAVEAT`]).
#[derive(Debug, Clone, PartialEq)]
pub struct MpParams {
    pub rho: f64,
    pub z_orlicz: f64,
    pub alpha: f64,
    pub lambda_max_q: f64,
    pub c: f64,
}

impl MpParams {
    /// Validates all fields: positive, with α ≥ 1.
    pub fn validated(self) -> Result<Self, BoundsError> {
        ensure(self.rho > 0.0 && self.rho.is_finite(), "rho", self.rho, "rho > 0")?;
        ensure(
            self.z_orlicz > 0.0 && self.z_orlicz.is_finite(),
            "z_orlicz",
            self.z_orlicz,
            "z_orlicz > 0",
        )?;
        ensure(self.alpha >= 1.0 && self.alpha.is_finite(), "alpha", self.alpha, "alpha >= 1")?;
        ensure(
            self.lambda_max_q > 0.0 && self.lambda_max_q.is_finite(),
            "lambda_max_q",
            self.lambda_max_q,
            "lambda_max_q > 0",
        )?;
        ensure(self.c > 0.0 && self.c.is_finite(), "c", self.c, "c > 0")?;
        Ok(self)
    }

    /// The constants of the uniform-sampling Fourier family with a
    /// symmetric spectrum: ρ = D^{1/4}, ‖Z‖_{ψα} = D^{1/2}·(ln 2)^{−1/α},
    /// λ_max(Q) = 1.
    pub fn fourier(d: usize, alpha: f64, c: f64) -> Result<Self, BoundsError> {
        ensure(d >= 1, "D", d as f64, "D >= 1")?;
        MpParams {
            rho: (d as f64).powf(0.25),
            z_orlicz: (d as f64).sqrt() * std::f64::consts::LN_2.powf(-1.0 / alpha),
            alpha,
            lambda_max_q: 1.0,
            c,
        }
        .validated()
    }
}

/// Orlicz-norm failure bound min(1, 2·exp(−(cε/max(B_n, A_n²))^{α/(α+2)}))
/// with A_n = ‖Z‖_{ψα}·sqrt(ln min(D, n))·(ln n)^{1/α}/√n and
/// B_n = ρ²/√n + λ_max(Q)^{1/2}·A_n. See [`MP_CAVEAT`].
pub fn mp_failure_bound(n: u64, d: usize, params: &MpParams, eps: f64) -> Result<f64, BoundsError> {
    ensure(n >= 2, "n", n as f64, "n >= 2")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    let p = params.clone().validated()?;
    let nf = n as f64;
    let a_n = p.z_orlicz * (d.min(n as usize) as f64).ln().sqrt() * nf.ln().powf(1.0 / p.alpha)
        / nf.sqrt();
    let b_n = p.rho * p.rho / nf.sqrt() + p.lambda_max_q.sqrt() * a_n;
    let scale = b_n.max(a_n * a_n);
    let exponent = (p.c * eps / scale).powf(p.alpha / (p.alpha + 2.0));
    Ok((2.0 * (-exponent).exp()).min(1.0))
}

/// Smallest n from the closed-form sufficient condition
/// n ≥ max{D, c⁻¹ε⁻¹ln(2/δ)·D·ln D, [c⁻¹ε⁻¹ln(2/δ)]²·(√D + √(D ln D))²}.
/// Shares the unspecified constant c with [`mp_failure_bound`].
pub fn better_bound_min_n(d: usize, eps: f64, delta: f64, c: f64) -> Result<u64, BoundsError> {
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    ensure(c > 0.0 && c.is_finite(), "c", c, "c > 0")?;
    let df = d as f64;
    let t = (2.0 / delta).ln() / (c * eps);
    let ln_d = df.ln();
    let second = t * df * ln_d;
    let third = {
        let root = df.sqrt() + (df * ln_d).sqrt();
        t * t * root * root
    };
    let needed = df.max(second).max(third);
    Ok(needed.ceil().max(1.0) as u64)
}

/// Smallest n such that n ≥ K·ln(K/δ) with K = (2πdm/(γ·ln 2))^d — the
/// sample size at which the weighted matrix T^w built from the full cube
/// spectrum of degree m in dimension d has condition number at most
/// [`detprob_cond_bound`](detprob_cond_bound)(γ) with probability ≥ 1 − δ.
pub fn detprob_min_n(m: u32, dim: usize, gamma: f64, delta: f64) -> Result<u64, BoundsError> {
    ensure(m >= 1, "m", m as f64, "m >= 1")?;
    ensure(dim >= 1, "d", dim as f64, "d >= 1")?;
    ensure(gamma > 0.0 && gamma < 1.0, "gamma", gamma, "0 < gamma < 1")?;
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    let base = 2.0 * std::f64::consts::PI * dim as f64 * m as f64
        / (gamma * std::f64::consts::LN_2);
    let k = base.powi(dim as i32);
    let needed = k * (k / delta).ln();
    Ok(needed.ceil().max(1.0) as u64)
}

/// Condition-number guarantee (1 − 2^{γ−1})^{−2} that accompanies
/// [`detprob_min_n`].
pub fn detprob_cond_bound(gamma: f64) -> Result<f64, BoundsError> {
    ensure(gamma > 0.0 && gamma < 1.0, "gamma", gamma, "0 < gamma < 1")?;
    let p = 2f64.powf(gamma - 1.0);
    Ok(1.0 / ((1.0 - p) * (1.0 - p)))
}

/// Frobenius-moment failure bound min(1, ε^{−2m}·D·G_{2m}(n/D)), evaluated
/// in log space to survive extreme exponents.
pub fn moment_failure_bound(n: u64, d: usize, eps: f64, m: usize) -> Result<f64, BoundsError> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    ensure(m >= 1, "m", m as f64, "m >= 1")?;
    let table = AssocStirlingTable::new(2 * m);
    Ok(moment_failure_bound_with(&table, n, d, eps, m))
}

/// As [`moment_failure_bound`], reusing a Stirling table covering 2m.
fn moment_failure_bound_with(table: &AssocStirlingTable, n: u64, d: usize, eps: f64, m: usize) -> f64 {
    let theta = n as f64 / d as f64;
    let ln_bound = (d as f64).ln() - 2.0 * m as f64 * eps.ln() + g_eval_ln_with(table, 2 * m, theta);
    ln_bound.exp().min(1.0)
}

/// Scans m = 1, 2, … and returns the exponent minimizing the
/// Frobenius-moment bound, with the bound's value. Ties go to the smaller
/// m. The scan stops at ⌊n/(3D)⌋ + 5 (capped at 256), or earlier once the
/// bound has risen for three consecutive exponents — beyond the optimal m
/// the bound grows monotonically, so nothing further can win.
pub fn moment_best_m(n: u64, d: usize, eps: f64) -> Result<(usize, f64), BoundsError> {
    ensure(n >= 1, "n", n as f64, "n >= 1")?;
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps.is_finite(), "eps", eps, "eps > 0")?;
    let cap = (n / (3 * d as u64) + 5).min(BEST_M_HARD_CAP).max(1) as usize;
    let table = AssocStirlingTable::new(2 * cap);
    let mut best_m = 1;
    let mut best = moment_failure_bound_with(&table, n, d, eps, 1);
    let mut prev = best;
    let mut rises = 0;
    for m in 2..=cap {
        let bound = moment_failure_bound_with(&table, n, d, eps, m);
        if bound < best {
            best = bound;
            best_m = m;
        }
        if bound > prev {
            rises += 1;
            if rises >= 3 {
                break;
            }
        } else {
            rises = 0;
        }
        prev = bound;
    }
    Ok((best_m, best))
}

/// Smallest n such that ⌊αn/(3D)⌋ ≥ ln(D/(δ(1−α)))/ln(ε²/α) — the sample
/// size at which the Frobenius-moment machinery certifies deviation < ε
/// with probability ≥ 1 − δ, with tuning parameter 0 < α < ε².
pub fn uniform_min_n(d: usize, eps: f64, alpha: f64, delta: f64) -> Result<u64, BoundsError> {
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps < 1.0, "eps", eps, "0 < eps < 1")?;
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    if !(alpha > 0.0 && alpha < eps * eps) {
        return Err(BoundsError::AlphaOutOfRange { alpha, eps_sq: eps * eps });
    }
    let df = d as f64;
    let rhs = (df / (delta * (1.0 - alpha))).ln() / (eps * eps / alpha).ln();
    let req = rhs.ceil().max(0.0) as u64; // ⌊αn/(3D)⌋ ≥ rhs ⟺ ⌊αn/(3D)⌋ ≥ ⌈rhs⌉
    let satisfied = |n: u64| (alpha * n as f64 / (3.0 * df)).floor() as u64 >= req;
    let mut n = ((3.0 * df * req as f64 / alpha).ceil() as u64).max(1);
    while !satisfied(n) {
        n += 1;
    }
    while n > 1 && satisfied(n - 1) {
        n -= 1;
    }
    Ok(n)
}

/// The simple sufficient sample size ⌈(3De/ε²)·(ln(D/δ) + 2 − ln(e−1))⌉,
/// obtained from [`uniform_min_n`] by fixing α = ε²/e.
pub fn uniform_simple_min_n(d: usize, eps: f64, delta: f64) -> Result<u64, BoundsError> {
    ensure(d >= 1, "D", d as f64, "D >= 1")?;
    ensure(eps > 0.0 && eps < 1.0, "eps", eps, "0 < eps < 1")?;
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    let df = d as f64;
    let value = 3.0 * df * E / (eps * eps) * ((df / delta).ln() + 2.0 - (E - 1.0).ln());
    Ok(value.ceil().max(1.0) as u64)
}

/// Smallest n with bound(n) ≤ δ, for a bound nonincreasing in n, found by
/// exponential search followed by bisection. Guarantees bound(n) ≤ δ and,
/// when n > 1, bound(n − 1) > δ. Monotonicity is spot-checked along the
/// search path.
pub fn solve_min_n(bound: impl Fn(u64) -> f64, delta: f64) -> Result<u64, BoundsError> {
    ensure(delta > 0.0 && delta < 1.0, "delta", delta, "0 < delta < 1")?;
    // Tolerate rounding-level wiggle when spot-checking monotonicity.
    const SLACK: f64 = 1e-12;
    let mut prev_value = bound(1);
    if prev_value <= delta {
        return Ok(1);
    }
    let mut lo = 1u64; // bound(lo) > delta
    let mut hi = 2u64;
    loop {
        let value = bound(hi);
        if value > prev_value + SLACK {
            return Err(BoundsError::NotMonotone { at: hi });
        }
        prev_value = value;
        if value <= delta {
            break;
        }
        if hi >= SOLVE_MIN_N_LIMIT {
            return Err(BoundsError::Unsatisfiable);
        }
        lo = hi;
        hi = (hi * 2).min(SOLVE_MIN_N_LIMIT);
    }
    // Invariant: bound(lo) > delta >= bound(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The condition-number certificate implied by deviation < ε from the
/// identity: λ ∈ [1−ε, 1+ε] sandwiches every eigenvalue, so the condition
/// number is at most (1+ε)/(1−ε). `None` when ε ≥ 1 (no certificate).
pub fn certified_condition_number(eps: f64) -> Option<f64> {
    if eps > 0.0 && eps < 1.0 {
        Some((1.0 + eps) / (1.0 - eps))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bennett_tail_cases() {
        assert_eq!(bennett_tail(5.0, 0.0, 0.0), 0.0);
        assert_eq!(bennett_tail(10.0, 1.0, 100.0), 1.0);
        let b = bennett_tail(30.0, 1.0, 100.0);
        let expected = 2.0 * (-900.0f64 / 260.0).exp();
        assert_eq!(b, expected);
        assert!((b - 0.0627).abs() < 1e-3);
    }

    #[test]
    fn main_bound_worked_example() {
        // D=2, v=1/2, M=1/3, ε=1/2, n=1000, complex.
        let profile = MomentProfile::iid(0.5, 1.0 / 3.0).unwrap();
        let got = main_failure_bound(1000, 2, 0.5, &profile, false).unwrap();
        let denom = 4.0 * (2.0 + 2.0 * SQRT_2 * (1.0 / 3.0) * 0.5 / 2.0);
        assert!((denom - 8.9428).abs() < 1e-4);
        let expected = 16.0 * (-250.0 / denom).exp();
        assert!((got - expected).abs() <= 1e-12 * expected);
        assert!((got / 1.15e-11 - 1.0).abs() < 0.01);
    }

    #[test]
    fn main_bound_degenerate_and_monotone() {
        let zero = MomentProfile::iid(0.0, 0.0).unwrap();
        assert_eq!(main_failure_bound(50, 4, 0.3, &zero, false).unwrap(), 0.0);
        assert_eq!(main_failure_bound(50, 4, 0.3, &zero, true).unwrap(), 0.0);

        let p = MomentProfile::fourier();
        let b1 = main_failure_bound(1000, 4, 0.4, &p, false).unwrap();
        let b2 = main_failure_bound(2000, 4, 0.4, &p, false).unwrap();
        assert!(b2 < b1);
    }

    #[test]
    fn real_case_differs_from_complex() {
        let p = MomentProfile::iid(0.5, 0.2).unwrap();
        let re = main_failure_bound(5000, 3, 0.4, &p, true).unwrap();
        let co = main_failure_bound(5000, 3, 0.4, &p, false).unwrap();
        assert!(re != co && re > 0.0 && co > 0.0);
    }

    #[test]
    fn bounded_plain_is_exactly_the_main_bound() {
        let direct = bounded_failure_bound(500, 3, 0.4, 1.0, 0.5, false).unwrap();
        let profile = MomentProfile::iid(0.5, 1.0 / 3.0).unwrap();
        let via_main = main_failure_bound(500, 3, 0.4, &profile, false).unwrap();
        assert_eq!(direct, via_main);
    }

    #[test]
    fn improved_bounded_dominated_by_plain() {
        for d in [2usize, 8] {
            for eps in [0.1, 0.5] {
                for n in [100u64, 10_000] {
                    let plain = bounded_failure_bound(n, d, eps, 1.0, 0.5, false).unwrap();
                    let improved = bounded_failure_bound(n, d, eps, 1.0, 0.5, true).unwrap();
                    assert!(
                        improved <= plain,
                        "improved {improved} > plain {plain} at D={d}, eps={eps}, n={n}"
                    );
                }
            }
        }
        assert!(matches!(
            bounded_failure_bound(100, 2, 0.3, 0.0, 0.5, true),
            Err(BoundsError::ImprovedUndefined)
        ));
    }

    #[test]
    fn improved_bounded_small_u_limit() {
        // With u = Cε/(√2·D·b) = 1e−4 the Bennett exponent collapses to the
        // Gaussian regime nε²/(4D²b) within a relative whisker.
        let d = 2usize;
        let b = 0.5;
        let eps = SQRT_2 * d as f64 * b * 1e-4;
        let n = 4_000_000_000u64;
        let improved = bounded_failure_bound(n, d, eps, 1.0, b, true).unwrap();
        let gaussian = (4 * d * d) as f64
            * (-(n as f64) * eps * eps / (4.0 * (d * d) as f64 * b)).exp();
        assert!(gaussian < 1.0, "limit comparison needs an unclamped bound");
        assert!((improved / gaussian - 1.0).abs() < 0.01);
    }

    #[test]
    fn psi_zero_rows_contribute_nothing() {
        // Row 0 has zero constants everywhere; rows 1, 2 are generic.
        let d = 3usize;
        let table = NonIidProfile::from_fn(d, |part, k, j| {
            if k == 0 || k == j {
                (0.0, 0.0)
            } else {
                match part {
                    Part::Re => (0.4, 0.2),
                    Part::Im => (0.3, 0.1),
                }
            }
        })
        .unwrap();
        let profile = MomentProfile::NonIid(table);
        let plain = noniid_psi(400, d, 0.5, &profile, false).unwrap();
        let refined = noniid_psi(400, d, 0.5, &profile, true).unwrap();
        // A full-strength table of the same constants for comparison.
        let full = MomentProfile::NonIid(
            NonIidProfile::from_fn(d, |part, _, _| match part {
                Part::Re => (0.4, 0.2),
                Part::Im => (0.3, 0.1),
            })
            .unwrap(),
        );
        let full_psi = noniid_psi(400, d, 0.5, &full, false).unwrap();
        assert!(plain < full_psi, "zero entries must drop terms");
        // The refinement shrinks D to the row support (2 < 3) and can only help.
        assert!(refined <= plain);
        assert!(refined < plain, "row support 2 should strictly tighten");
    }

    #[test]
    fn psi_validates_shape_and_variant() {
        let table = NonIidProfile::uniform(3, 0.1, 0.1).unwrap();
        let profile = MomentProfile::NonIid(table);
        assert!(matches!(
            noniid_psi(10, 4, 0.5, &profile, false),
            Err(BoundsError::TableShape { .. })
        ));
        let iid = MomentProfile::fourier();
        assert!(matches!(
            noniid_psi(10, 4, 0.5, &iid, false),
            Err(BoundsError::ProfileVariant { .. })
        ));
        assert!(matches!(
            main_failure_bound(10, 4, 0.5, &profile, false),
            Err(BoundsError::ProfileVariant { .. })
        ));
    }

    #[test]
    fn fourier_bound_cases() {
        assert_eq!(fourier_failure_bound(100, 1, 0.3).unwrap(), 0.0);
        let b = fourier_failure_bound(5907, 10, 0.5).unwrap();
        assert!(b <= 0.05, "bound at the solved sample size: {b}");
    }

    #[test]
    fn fourier_min_n_worked_example() {
        // (2/ε²)((D−1)² + √2(D−1)ε/3)·ln(4D(D−1)/δ)
        //   = 8·(81 + 2.12132…)·ln 7200 = 5906.17… → 5907.
        let n = fourier_min_n(10, 0.5, 0.05).unwrap();
        assert_eq!(n, 5907);
        assert!(fourier_failure_bound(n, 10, 0.5).unwrap() <= 0.05);
        assert!(fourier_failure_bound(n - 1, 10, 0.5).unwrap() > 0.05);
    }

    #[test]
    fn fourier_min_n_matches_generic_solver() {
        for d in [4usize, 16] {
            for eps in [0.3, 0.6] {
                for delta in [0.1, 0.01] {
                    let closed = fourier_min_n(d, eps, delta).unwrap();
                    let solved =
                        solve_min_n(|n| fourier_failure_bound(n, d, eps).unwrap(), delta).unwrap();
                    assert_eq!(closed, solved, "D={d}, eps={eps}, delta={delta}");
                }
            }
        }
    }

    #[test]
    fn mp_bound_monotone_in_n() {
        let params = MpParams::fourier(100, 2.0, 1.0).unwrap();
        assert!((params.rho - 100f64.powf(0.25)).abs() < 1e-12);
        assert!((params.z_orlicz - 10.0 * std::f64::consts::LN_2.powf(-0.5)).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        let mut n = 100u64;
        while n <= 1_000_000 {
            let b = mp_failure_bound(n, 100, &params, 0.5).unwrap();
            assert!(b <= prev + 1e-15, "rose at n={n}");
            prev = b;
            n *= 2;
        }
    }

    #[test]
    fn better_bound_min_n_third_term_binds() {
        let d = 100usize;
        let (eps, delta, c) = (0.5, 0.05, 1.0);
        let got = better_bound_min_n(d, eps, delta, c).unwrap();
        let t = (2.0 / delta).ln() / (c * eps);
        let third = {
            let root = (d as f64).sqrt() + ((d as f64) * (d as f64).ln()).sqrt();
            t * t * root * root
        };
        assert_eq!(got, third.ceil() as u64);
        assert!(third > t * d as f64 * (d as f64).ln());
        assert!(third > d as f64);
    }

    #[test]
    fn detprob_cond_bound_cases() {
        let half = detprob_cond_bound(0.5).unwrap();
        assert!((half - 11.656854249492380).abs() < 1e-9);
        // Algebraic identity with the alternative 4(2 − 2^γ)^{−2} form.
        for gamma in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let a = detprob_cond_bound(gamma).unwrap();
            let b = 4.0 / ((2.0 - 2f64.powf(gamma)) * (2.0 - 2f64.powf(gamma)));
            assert!((a - b).abs() <= 1e-12 * a);
        }
        // γ → 1 blows up.
        assert!(detprob_cond_bound(0.999999).unwrap() > 1e10);
    }

    #[test]
    fn detprob_min_n_worked_example() {
        // d=1, m=10, γ=0.5, δ=0.05: K = 20π/(0.5·ln 2) = 181.2967…,
        // K·ln(K/δ) = 1485.88… → 1486.
        assert_eq!(detprob_min_n(10, 1, 0.5, 0.05).unwrap(), 1486);
        assert!(matches!(
            detprob_min_n(10, 1, 1.2, 0.05),
            Err(BoundsError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn moment_bound_m1_closed_form() {
        // m=1: G_2(θ) = 1/θ, so the bound is D²/(ε²n).
        for (n, d, eps) in [(64u64, 4usize, 0.5f64), (1000, 10, 0.3), (37, 2, 0.9)] {
            let got = moment_failure_bound(n, d, eps, 1).unwrap();
            let expected = ((d * d) as f64 / (eps * eps * n as f64)).min(1.0);
            assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300));
        }
    }

    #[test]
    fn moment_best_m_never_worse_than_m1() {
        for (n, d, eps) in [(500u64, 4usize, 0.5f64), (5000, 8, 0.4), (50, 4, 0.8)] {
            let (m_star, best) = moment_best_m(n, d, eps).unwrap();
            let at_one = moment_failure_bound(n, d, eps, 1).unwrap();
            assert!(best <= at_one, "best {best} > m=1 bound {at_one}");
            assert!(m_star >= 1);
        }
    }

    #[test]
    fn moment_bound_dominated_by_tail_form() {
        use crate::stirling::g_tail_bound;
        for m in [1usize, 3, 7] {
            for theta_mult in [7.0f64, 20.0] {
                let d = 5usize;
                let theta = theta_mult * m as f64;
                let n = (theta * d as f64).round() as u64;
                let eps = 0.5;
                let exact = moment_failure_bound(n, d, eps, m).unwrap();
                let tail = (eps.powi(-2 * m as i32) * d as f64
                    * g_tail_bound(m, n as f64 / d as f64).unwrap())
                .min(1.0);
                assert!(
                    exact <= tail * (1.0 + 1e-9),
                    "exact {exact} > tail {tail} at m={m}, theta={theta}"
                );
            }
        }
    }

    #[test]
    fn uniform_simple_min_n_worked_example() {
        assert_eq!(uniform_simple_min_n(10, 0.5, 0.05).unwrap(), 2205);
    }

    #[test]
    fn uniform_min_n_certificate_replay() {
        // At the returned n, the moment bound with m = ⌊αn/(3D)⌋ certifies δ.
        for (d, eps, delta) in [(4usize, 0.5f64, 0.05f64), (10, 0.5, 0.05), (8, 0.3, 0.01)] {
            let alpha = eps * eps / E;
            let n = uniform_min_n(d, eps, alpha, delta).unwrap();
            let m = (alpha * n as f64 / (3.0 * d as f64)).floor() as usize;
            assert!(m >= 1, "certificate needs m >= 1");
            let bound = moment_failure_bound(n, d, eps, m).unwrap();
            assert!(bound <= delta, "replay failed: bound {bound} > delta {delta}");
        }
    }

    #[test]
    fn uniform_min_n_validates_alpha() {
        assert!(matches!(
            uniform_min_n(4, 0.5, 0.3, 0.05),
            Err(BoundsError::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn simple_form_relaxes_tuned_form() {
        for (d, eps, delta) in [(10usize, 0.5f64, 0.05f64), (50, 0.3, 0.01), (4, 0.7, 0.1)] {
            let tuned = uniform_min_n(d, eps, eps * eps / E, delta).unwrap();
            let simple = uniform_simple_min_n(d, eps, delta).unwrap();
            assert!(simple >= tuned, "simple {simple} < tuned {tuned}");
        }
    }

    #[test]
    fn simple_min_n_grows_like_d_log_d() {
        for d in [50usize, 100, 200] {
            let a = uniform_simple_min_n(d, 0.5, 0.01).unwrap() as f64;
            let b = uniform_simple_min_n(2 * d, 0.5, 0.01).unwrap() as f64;
            let ratio = b / a;
            assert!(ratio > 2.0 && ratio < 2.6, "ratio {ratio} at D={d}");
        }
    }

    #[test]
    fn solve_min_n_cases() {
        assert_eq!(solve_min_n(|n| 1.0 / n as f64, 0.01).unwrap(), 100);
        assert_eq!(solve_min_n(|_| 0.0, 0.5).unwrap(), 1);
        assert!(matches!(solve_min_n(|_| 1.0, 0.5), Err(BoundsError::Unsatisfiable)));
        // Increasing bound (while staying above delta) is rejected once the
        // increase exceeds rounding noise along the search path.
        assert!(matches!(
            solve_min_n(|n| 0.6 + n as f64 / 1e18, 0.5),
            Err(BoundsError::NotMonotone { .. })
        ));
    }

    #[test]
    fn certificate_ratio() {
        assert_eq!(certified_condition_number(0.5), Some(3.0));
        assert!(certified_condition_number(1.0).is_none());
        assert!(certified_condition_number(-0.1).is_none());
        let c = certified_condition_number(0.25).unwrap();
        assert!((c - 5.0 / 3.0).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn uniform_table_reproduces_iid_bound_exactly(
            d in 1usize..12,
            v in 0.01f64..2.0,
            m in 0.0f64..1.0,
            eps in 0.05f64..0.9,
            n in 10u64..100_000,
        ) {
            let iid = MomentProfile::Iid { v, m };
            let coarse = main_failure_bound(n, d, eps, &iid, false).unwrap();
            let table = MomentProfile::NonIid(NonIidProfile::uniform(d, v, m).unwrap());
            let fine = noniid_psi(n, d, eps, &table, false).unwrap();
            prop_assert_eq!(coarse.to_bits(), fine.to_bits());
        }

        #[test]
        fn psi_dominated_by_uniform_majorant(
            d in 2usize..8,
            eps in 0.1f64..0.8,
            n in 50u64..20_000,
            seed in 0u64..1_000,
        ) {
            // A table majorized entrywise by (v_max, m_max) must give a
            // smaller-or-equal union bound than the uniform majorant.
            let mut state = seed;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let mut entries = vec![(0.0f64, 0.0f64); 2 * d * d];
            for e in entries.iter_mut() {
                *e = (next(), 0.5 * next());
            }
            let table = NonIidProfile::from_fn(d, |part, k, j| {
                let p = if part == Part::Re { 0 } else { 1 };
                entries[(p * d + k) * d + j]
            }).unwrap();
            let v_max = table.max_v_mean();
            let m_max = table.max_m();
            let fine = noniid_psi(n, d, eps, &MomentProfile::NonIid(table), false).unwrap();
            let coarse = main_failure_bound(
                n, d, eps, &MomentProfile::Iid { v: v_max, m: m_max }, false,
            ).unwrap();
            prop_assert!(fine <= coarse * (1.0 + 1e-12) || (fine == 1.0 && coarse == 1.0));
        }

        #[test]
        fn bounds_live_in_unit_interval_and_decrease(
            d in 1usize..10,
            eps in 0.05f64..0.95,
            n in 2u64..1_000_000,
            v in 0.0f64..2.0,
            m in 0.0f64..1.0,
        ) {
            let profile = MomentProfile::Iid { v, m };
            for real in [false, true] {
                let b = main_failure_bound(n, d, eps, &profile, real).unwrap();
                prop_assert!((0.0..=1.0).contains(&b));
                let larger_n = main_failure_bound(2 * n, d, eps, &profile, real).unwrap();
                prop_assert!(larger_n <= b);
                let larger_eps = main_failure_bound(n, d, (eps * 1.5).min(0.99), &profile, real).unwrap();
                prop_assert!(larger_eps <= b);
            }
            let fb = fourier_failure_bound(n, d, eps).unwrap();
            prop_assert!((0.0..=1.0).contains(&fb));
            prop_assert!(fourier_failure_bound(2 * n, d, eps).unwrap() <= fb);
            let mb = moment_failure_bound(n, d, eps, 2).unwrap();
            prop_assert!((0.0..=1.0).contains(&mb));
            prop_assert!(moment_failure_bound(2 * n, d, eps, 2).unwrap() <= mb + 1e-15);
            if let Ok(params) = MpParams::fourier(d, 2.0, 1.0) {
                let mp = mp_failure_bound(n.max(2), d, &params, eps).unwrap();
                prop_assert!((0.0..=1.0).contains(&mp));
            }
        }
    }
}
