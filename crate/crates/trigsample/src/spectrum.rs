//! Frequency sets Γ ⊂ Z^d.
//!
//! A [`Spectrum`] is a finite set of distinct integer frequency vectors in a
//! fixed dimension `d`; its size `D` is the dimension of the trigonometric
//! polynomial space spanned by `x ↦ exp(2πi k·x)`, `k ∈ Γ`. Frequencies are
//! kept in lexicographic order so that matrix column indexing is
//! deterministic across runs.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// Hard cap on the number of frequencies in a spectrum. Guards against
/// accidental `(2m+1)^d` blow-ups at desk scale.
pub const MAX_SPECTRUM_SIZE: usize = 100_000;

/// Errors from spectrum construction or parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    /// The requested spectrum would exceed [`MAX_SPECTRUM_SIZE`].
    TooLarge { requested: u128, limit: usize },
    /// A spectrum must contain at least one frequency.
    Empty,
    /// The spatial dimension must be at least 1.
    ZeroDimension,
    /// A frequency vector's length differs from the spectrum dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// The same frequency vector appeared twice.
    DuplicateFrequency(Vec<i64>),
    /// The JSON input could not be parsed.
    Parse(String),
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::TooLarge { requested, limit } => {
                write!(f, "spectrum too large: {requested} frequencies exceeds the limit of {limit}")
            }
            SpectrumError::Empty => write!(f, "spectrum must contain at least one frequency"),
            SpectrumError::ZeroDimension => write!(f, "spectrum dimension must be at least 1"),
            SpectrumError::DimensionMismatch { expected, found } => {
                write!(f, "frequency vector of length {found} in a spectrum of dimension {expected}")
            }
            SpectrumError::DuplicateFrequency(k) => write!(f, "duplicate frequency vector {k:?}"),
            SpectrumError::Parse(msg) => write!(f, "invalid spectrum JSON: {msg}"),
        }
    }
}

impl std::error::Error for SpectrumError {}

/// A finite set of integer frequency vectors in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct Spectrum {
    dim: usize,
    freqs: Vec<Vec<i64>>,
}

/// Serde mirror of the on-disk format `{"dim": d, "freqs": [[k1,…,kd],…]}`.
#[derive(Deserialize)]
struct RawSpectrum {
    dim: usize,
    freqs: Vec<Vec<i64>>,
}

impl TryFrom<RawSpectrum> for Spectrum {
    type Error = SpectrumError;

    fn try_from(raw: RawSpectrum) -> Result<Self, Self::Error> {
        Spectrum::new(raw.dim, raw.freqs)
    }
}

impl Spectrum {
    /// Builds a spectrum from an explicit frequency list. The list is sorted
    /// into canonical lexicographic order; duplicates are rejected.
    pub fn new(dim: usize, mut freqs: Vec<Vec<i64>>) -> Result<Self, SpectrumError> {
        if dim == 0 {
            return Err(SpectrumError::ZeroDimension);
        }
        if freqs.is_empty() {
            return Err(SpectrumError::Empty);
        }
        if freqs.len() > MAX_SPECTRUM_SIZE {
            return Err(SpectrumError::TooLarge {
                requested: freqs.len() as u128,
                limit: MAX_SPECTRUM_SIZE,
            });
        }
        for k in &freqs {
            if k.len() != dim {
                return Err(SpectrumError::DimensionMismatch { expected: dim, found: k.len() });
            }
        }
        freqs.sort_unstable();
        if let Some(w) = freqs.windows(2).find(|w| w[0] == w[1]) {
            return Err(SpectrumError::DuplicateFrequency(w[0].clone()));
        }
        Ok(Spectrum { dim, freqs })
    }

    /// Parses the JSON format `{"dim": d, "freqs": [[…],…]}`.
    pub fn from_json(json: &str) -> Result<Self, SpectrumError> {
        serde_json::from_str(json).map_err(|e| SpectrumError::Parse(e.to_string()))
    }

    /// Serializes to the JSON format `{"dim": d, "freqs": [[…],…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serialization cannot fail")
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of frequencies `D`.
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    /// Always false: a spectrum holds at least one frequency.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The frequencies in canonical lexicographic order.
    pub fn freqs(&self) -> &[Vec<i64>] {
        &self.freqs
    }

    /// True iff `k ∈ Γ` implies `−k ∈ Γ`.
    pub fn is_symmetric(&self) -> bool {
        let set: HashSet<&[i64]> = self.freqs.iter().map(|k| k.as_slice()).collect();
        self.freqs.iter().all(|k| {
            let neg: Vec<i64> = k.iter().map(|c| -c).collect();
            set.contains(neg.as_slice())
        })
    }
}

/// Builds the full cube `Γ = {−m,…,m}^d` with `D = (2m+1)^d` frequencies in
/// lexicographic order.
pub fn cube_spectrum(m: u32, d: usize) -> Result<Spectrum, SpectrumError> {
    if d == 0 {
        return Err(SpectrumError::ZeroDimension);
    }
    let side = 2 * u128::from(m) + 1;
    let mut total: u128 = 1;
    for _ in 0..d {
        total = total.saturating_mul(side);
        if total > MAX_SPECTRUM_SIZE as u128 {
            return Err(SpectrumError::TooLarge { requested: total, limit: MAX_SPECTRUM_SIZE });
        }
    }
    let side = side as i64;
    let total = total as usize;
    let m = i64::from(m);
    // Digits of the index in base (2m+1), most significant digit first, give
    // the coordinates in lexicographic order directly.
    let mut freqs = Vec::with_capacity(total);
    for idx in 0..total {
        let mut k = vec![0i64; d];
        let mut rest = idx as i64;
        for j in (0..d).rev() {
            k[j] = rest % side - m;
            rest /= side;
        }
        freqs.push(k);
    }
    Ok(Spectrum { dim: d, freqs })
}
