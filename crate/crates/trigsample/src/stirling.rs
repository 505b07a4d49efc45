//! Exact 2-associated Stirling numbers of the second kind, the polynomials
//! `F_m` and `G_m` built from them, and the closed-form tail estimate for
//! `G_{2m}`.
//!
//! `S₂(m, k)` counts partitions of an `m`-element set into exactly `k`
//! blocks, each of size at least 2. The numbers grow superexponentially, so
//! the table stores exact big integers and all real-valued evaluation goes
//! through logarithms.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;

/// Errors from the tail-estimate routine.
#[derive(Debug, Clone, PartialEq)]
pub enum StirlingError {
    /// `g_tail_bound` requires `3m/θ < 1`.
    RatioOutOfRange { ratio: f64 },
}

impl fmt::Display for StirlingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StirlingError::RatioOutOfRange { ratio } => {
                write!(f, "ratio out of range: 3m/theta = {ratio} must be < 1")
            }
        }
    }
}

impl std::error::Error for StirlingError {}

/// Table of 2-associated Stirling numbers `S₂(m, k)` for `m ≤ max_m`.
///
/// Built once by dynamic programming on the block-structure recurrence
/// `S₂(m, k) = k·S₂(m−1, k) + (m−1)·S₂(m−2, k−1)`: element `m` either joins
/// one of the `k` existing blocks of a partition of `m−1` elements, or forms
/// a new pair with one of the other `m−1` elements on top of a partition of
/// the remaining `m−2`. The finished table is immutable.
#[derive(Debug, Clone)]
pub struct AssocStirlingTable {
    max_m: usize,
    /// `rows[m][k]` for `0 ≤ k ≤ ⌊m/2⌋`.
    rows: Vec<Vec<BigUint>>,
}

impl AssocStirlingTable {
    /// Builds the table for all `m ≤ max_m`.
    pub fn new(max_m: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_m + 1);
        rows.push(vec![BigUint::one()]); // S₂(0, 0) = 1 (empty partition)
        for m in 1..=max_m {
            let width = m / 2 + 1;
            let mut row = vec![BigUint::zero(); width];
            for k in 1..width {
                let mut val = BigUint::zero();
                if k < rows[m - 1].len() {
                    val += BigUint::from(k) * &rows[m - 1][k];
                }
                if m >= 2 && k - 1 < rows[m - 2].len() {
                    val += BigUint::from(m - 1) * &rows[m - 2][k - 1];
                }
                row[k] = val;
            }
            rows.push(row);
        }
        AssocStirlingTable { max_m, rows }
    }

    /// Largest `m` covered by this table.
    pub fn max_m(&self) -> usize {
        self.max_m
    }

    /// `S₂(m, k)`, exactly; zero outside the support `1 ≤ k ≤ ⌊m/2⌋`
    /// (and at `(0, 0)`, where the value is 1).
    ///
    /// Panics if `m > max_m`.
    pub fn get(&self, m: usize, k: usize) -> BigUint {
        assert!(m <= self.max_m, "m = {m} exceeds table bound {}", self.max_m);
        self.rows[m].get(k).cloned().unwrap_or_else(BigUint::zero)
    }
}

/// `S₂(m, k)`: the number of partitions of an `m`-element set into exactly
/// `k` blocks, each of size at least 2. Exact; zero outside the support.
pub fn assoc_stirling2(m: usize, k: usize) -> BigUint {
    AssocStirlingTable::new(m).get(m, k)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision.
fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 53 {
        let small = x.iter_u64_digits().next().unwrap_or(0);
        (small as f64).ln()
    } else {
        // Keep the top 53 bits as an f64 mantissa and account for the shift.
        let shift = bits - 53;
        let top = x >> shift;
        let mantissa = top.iter_u64_digits().next().unwrap_or(0);
        (mantissa as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Natural logarithm of `G_m(θ) = θ^{−m}·Σ_{k=1}^{⌊m/2⌋} S₂(m, k)·θ^k`,
/// evaluated via log-sum-exp so that arguments up to `m = 200`, `θ = 1e9`
/// neither overflow nor underflow prematurely.
///
/// Returns `−∞` when the sum is empty (`m = 1`, where `F_1 ≡ 0`).
pub fn g_eval_ln(m: usize, theta: f64) -> f64 {
    assert!(theta > 0.0, "theta must be positive");
    let table = AssocStirlingTable::new(m);
    g_eval_ln_with(&table, m, theta)
}

/// As [`g_eval_ln`], reusing a prebuilt table (which must cover `m`).
pub fn g_eval_ln_with(table: &AssocStirlingTable, m: usize, theta: f64) -> f64 {
    assert!(theta > 0.0, "theta must be positive");
    let ln_theta = theta.ln();
    let terms: Vec<f64> = (1..=m / 2)
        .map(|k| {
            let s = table.get(m, k);
            ln_biguint(&s) - (m - k) as f64 * ln_theta
        })
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `G_m(θ) = θ^{−m}·F_m(θ)` where `F_m(z) = Σ_{k=1}^{⌊m/2⌋} S₂(m, k)·z^k`.
pub fn g_eval(m: usize, theta: f64) -> f64 {
    g_eval_ln(m, theta).exp()
}

/// Closed-form tail estimate for `G_{2m}(θ)`:
/// `(3m/θ)^m·(1 − (3m/θ)^m)/(1 − 3m/θ)`, valid for `3m/θ < 1`.
pub fn g_tail_bound(m: usize, theta: f64) -> Result<f64, StirlingError> {
    assert!(m >= 1, "m must be positive");
    let ratio = 3.0 * m as f64 / theta;
    if !(ratio < 1.0) || ratio <= 0.0 {
        return Err(StirlingError::RatioOutOfRange { ratio });
    }
    let qm = ratio.powi(m as i32);
    Ok(qm * (1.0 - qm) / (1.0 - ratio))
}
