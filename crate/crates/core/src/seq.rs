//! Complex sequences and the signal-level measurements built on them.
//!
//! A sequence `a = (a_0, ..., a_{L-1})` is identified with the polynomial
//! `A(z) = a_0 + a_1 z + ... + a_{L-1} z^{L-1}`. Mapping `a_i` onto OFDM
//! subcarrier `i` gives the baseband symbol `x(t) = A(exp(j 2 pi t / T_s))`,
//! so the instantaneous envelope power is `|A(z)|^2` on the unit circle.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default oversampling factor for envelope and PMEPR measurements.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Default tolerance for complementary-pair checks.
pub const DEFAULT_GCP_TOL: f64 = 1e-9;

/// A finite complex-valued sequence of length `L >= 1`.
///
/// Zero elements are stored explicitly; the support is whatever is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqRepr", into = "SeqRepr")]
pub struct ComplexSeq {
    elements: Vec<Complex64>,
}

/// JSON layout: `{"length": L, "elements": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct SeqRepr {
    length: usize,
    elements: Vec<[f64; 2]>,
}

impl TryFrom<SeqRepr> for ComplexSeq {
    type Error = Error;

    fn try_from(repr: SeqRepr) -> Result<Self> {
        if repr.length != repr.elements.len() {
            return Err(Error::LengthMismatch {
                left: repr.length,
                right: repr.elements.len(),
            });
        }
        ComplexSeq::new(
            repr.elements
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexSeq> for SeqRepr {
    fn from(seq: ComplexSeq) -> Self {
        SeqRepr {
            length: seq.len(),
            elements: seq.elements.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl ComplexSeq {
    pub fn new(elements: Vec<Complex64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParams(
                "sequence must have length >= 1".into(),
            ));
        }
        Ok(ComplexSeq { elements })
    }

    /// Builds a sequence from real values.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Complex64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Complex64> {
        self.elements
    }

    /// Sum of `|a_i|^2`.
    pub fn energy(&self) -> f64 {
        self.elements.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Positions of the nonzero elements, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Appends zeros up to `len`. Fails if the sequence is already longer.
    pub fn padded_to(&self, len: usize) -> Result<ComplexSeq> {
        if self.len() > len {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: len,
            });
        }
        let mut elements = self.elements.clone();
        elements.resize(len, Complex64::new(0.0, 0.0));
        Ok(ComplexSeq { elements })
    }

    /// Euclidean distance after zero-padding the shorter sequence.
    pub fn distance(&self, other: &ComplexSeq) -> f64 {
        let n = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| {
                let a = self.elements.get(i).copied().unwrap_or(zero);
                let b = other.elements.get(i).copied().unwrap_or(zero);
                (a - b).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Aperiodic autocorrelation values for lags `-(L-1) ..= L-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AacfVector {
    values: Vec<Complex64>,
}

impl AacfVector {
    /// Length of the underlying sequence.
    pub fn seq_len(&self) -> usize {
        self.values.len().div_ceil(2)
    }

    /// Value at lag `k`; zero outside `|k| < L`.
    pub fn at(&self, k: isize) -> Complex64 {
        let offset = self.seq_len() as isize - 1;
        let idx = k + offset;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    /// All lags in ascending order, starting at `-(L-1)`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn lags(&self) -> impl Iterator<Item = isize> {
        let l = self.seq_len() as isize;
        -(l - 1)..l
    }
}

/// `rho(k) = sum_i conj(a_i) a_{i+k}` for `k >= 0`, conjugate-mirrored for `k < 0`.
pub fn aacf(seq: &ComplexSeq) -> AacfVector {
    let a = seq.elements();
    let l = a.len();
    let mut values = vec![Complex64::new(0.0, 0.0); 2 * l - 1];
    for k in 0..l {
        let r: Complex64 = (0..l - k).map(|i| a[i].conj() * a[i + k]).sum();
        values[l - 1 + k] = r;
        values[l - 1 - k] = r.conj();
    }
    AacfVector { values }
}

/// True iff `|rho_a(k) + rho_b(k)| <= tol` for every `k != 0`.
pub fn is_complementary_pair(a: &ComplexSeq, b: &ComplexSeq, tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let ra = aacf(a);
    let rb = aacf(b);
    Ok(ra
        .lags()
        .filter(|&k| k != 0)
        .all(|k| (ra.at(k) + rb.at(k)).norm() <= tol))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Instantaneous envelope power `|x(t)|^2` at `oversample * L` uniform points
/// of `[0, T_s)`.
///
/// Sample `n` is `|A(exp(j 2 pi n / (oversample * L)))|^2`, computed as a
/// zero-padded inverse DFT.
pub fn envelope_samples(seq: &ComplexSeq, oversample: usize) -> Result<Vec<f64>> {
    if oversample == 0 {
        return Err(Error::InvalidParams("oversample must be >= 1".into()));
    }
    let n = oversample * seq.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..seq.len()].copy_from_slice(seq.elements());
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    Ok(buf.iter().map(|c| c.norm_sqr()).collect())
}

/// Peak-to-mean envelope power ratio in dB against a fixed reference power.
///
/// For partitioned complementary sequences the reference is `2^m`: every
/// codeword carries exactly `2^m` unit-magnitude elements, so the mean
/// symbol power is that constant.
pub fn pmepr_db(seq: &ComplexSeq, oversample: usize, p_ref: f64) -> Result<f64> {
    if !p_ref.is_finite() || p_ref <= 0.0 {
        return Err(Error::NonPositiveReference(p_ref.to_string()));
    }
    let peak = envelope_samples(seq, oversample)?
        .into_iter()
        .fold(0.0_f64, f64::max);
    Ok(10.0 * (peak / p_ref).log10())
}
