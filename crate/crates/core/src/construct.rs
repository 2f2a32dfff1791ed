//! Synthesis of partitioned complementary sequences.
//!
//! A codeword is described by [`CsParams`]: a permutation `pi` of `{1..m}`,
//! phase coefficients over `Z_H`, and non-negative Golay shifts. Element `i`
//! (for `i` in `[0, 2^m)`) is `xi^{f_i(i)}` with `xi = exp(j 2 pi / H)`, and it
//! is placed at position `f_s(i) + i`, where
//!
//! ```text
//! f_i(x) = (H/2) sum_{n<m} x_{pi_n} x_{pi_{n+1}} + sum_n c_n x_{pi_n} + k'
//! f_s(x) = sum_n s_n x_n + d'
//! ```
//!
//! and `x = (x_1, ..., x_m)` is the binary expansion of `i` with `x_1` the most
//! significant bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::seq::ComplexSeq;

/// Value of variable `x_j` (1-based) in the binary expansion of `i`.
#[inline]
pub fn var_bit(i: usize, j: usize, m: usize) -> usize {
    (i >> (m - j)) & 1
}

/// `exp(j 2 pi e / H)`, exact at multiples of a quarter turn.
pub fn unit_root(e: u32, h: u32) -> Complex64 {
    let e = e % h;
    if (4 * e).is_multiple_of(h) {
        match 4 * e / h {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / h as f64)
    }
}

/// Full parameter set of one partitioned complementary sequence.
///
/// JSON layout: `{"m":..,"H":..,"pi":[..],"c":[..],"k":..,"d":..,"s":[..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct CsParams {
    m: usize,
    h: u32,
    pi: Vec<usize>,
    c: Vec<u32>,
    k: u32,
    d: usize,
    s: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    m: usize,
    #[serde(rename = "H")]
    h: u32,
    pi: Vec<usize>,
    c: Vec<u32>,
    k: u32,
    d: usize,
    s: Vec<usize>,
}

impl TryFrom<ParamsRepr> for CsParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        CsParams::new(r.m, r.h, r.pi, r.c, r.k, r.d, r.s)
    }
}

impl From<CsParams> for ParamsRepr {
    fn from(p: CsParams) -> Self {
        ParamsRepr {
            m: p.m,
            h: p.h,
            pi: p.pi,
            c: p.c,
            k: p.k,
            d: p.d,
            s: p.s,
        }
    }
}

impl CsParams {
    /// Validates the permutation and alphabet and reduces all phases mod `H`.
    ///
    /// The shifts are not required to be non-squashing here; [`synthesize`]
    /// checks that.
    pub fn new(
        m: usize,
        h: u32,
        pi: Vec<usize>,
        c: Vec<u32>,
        k: u32,
        d: usize,
        s: Vec<usize>,
    ) -> Result<Self> {
        if m == 0 || m > 30 {
            return Err(out_of_range("m", m, "1..=30"));
        }
        if h < 2 || !h.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "H must be even and >= 2, got {h}"
            )));
        }
        if pi.len() != m || c.len() != m || s.len() != m {
            return Err(Error::InvalidParams(format!(
                "pi, c and s must have length m = {m} (got {}, {}, {})",
                pi.len(),
                c.len(),
                s.len()
            )));
        }
        let mut seen = vec![false; m + 1];
        for &p in &pi {
            if p == 0 || p > m || seen[p] {
                return Err(Error::InvalidParams(format!(
                    "pi = {pi:?} is not a permutation of 1..={m}"
                )));
            }
            seen[p] = true;
        }
        Ok(CsParams {
            m,
            h,
            pi,
            c: c.into_iter().map(|x| x % h).collect(),
            k: k % h,
            d,
            s,
        })
    }

    /// Non-partitioned (standard) sequence: all shifts zero.
    pub fn standard(m: usize, h: u32, pi: Vec<usize>, c: Vec<u32>, k: u32) -> Result<Self> {
        Self::new(m, h, pi, c, k, 0, vec![0; m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Alphabet size `H`.
    pub fn alphabet(&self) -> u32 {
        self.h
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn phases(&self) -> &[u32] {
        &self.c
    }

    pub fn offset_phase(&self) -> u32 {
        self.k
    }

    pub fn prepad(&self) -> usize {
        self.d
    }

    pub fn shifts(&self) -> &[usize] {
        &self.s
    }

    /// Replaces the shifts and prepad.
    pub fn with_shifts(mut self, s: Vec<usize>, d: usize) -> Result<Self> {
        if s.len() != self.m {
            return Err(Error::LengthMismatch {
                left: s.len(),
                right: self.m,
            });
        }
        self.s = s;
        self.d = d;
        Ok(self)
    }

    /// Sequence length `2^m + d' + sum s_n`.
    pub fn seq_len(&self) -> usize {
        (1usize << self.m) + self.d + self.s.iter().sum::<usize>()
    }

    /// Checks `s_l >= s_{l+1} + ... + s_m` for `1 <= l <= m-1`.
    pub fn check_non_squashing(&self) -> Result<()> {
        check_non_squashing(&self.s)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        let n = 1usize << self.m;
        if i >= n {
            return Err(out_of_range("sequence index", i, format!("0..{n}")));
        }
        Ok(())
    }
}

pub(crate) fn check_non_squashing(s: &[usize]) -> Result<()> {
    let mut tail = 0usize;
    for level in (0..s.len()).rev() {
        if s[level] < tail {
            return Err(Error::Squashing { level: level + 1 });
        }
        tail += s[level];
    }
    Ok(())
}

/// Phase exponent `f_i(i)` over `Z_H`.
pub fn f_i_eval(params: &CsParams, i: usize) -> Result<u32> {
    params.check_index(i)?;
    Ok(phase_exponent(params, i))
}

fn phase_exponent(p: &CsParams, i: usize) -> u32 {
    let x = |n: usize| var_bit(i, p.pi[n], p.m) as u64;
    let h = p.h as u64;
    let quad: u64 = (0..p.m - 1).map(|n| x(n) * x(n + 1)).sum();
    let lin: u64 = (0..p.m).map(|n| p.c[n] as u64 * x(n)).sum();
    ((h / 2 * quad + lin + p.k as u64) % h) as u32
}

/// Shift `f_s(i)`; element `i` lands at position `f_s(i) + i`.
pub fn f_s_eval(params: &CsParams, i: usize) -> Result<usize> {
    params.check_index(i)?;
    Ok(shift_value(params, i))
}

fn shift_value(p: &CsParams, i: usize) -> usize {
    p.d + (1..=p.m)
        .map(|n| p.s[n - 1] * var_bit(i, n, p.m))
        .sum::<usize>()
}

/// Placement positions `f_s(i) + i` in index order.
fn placements(p: &CsParams) -> Vec<usize> {
    (0..1usize << p.m).map(|i| shift_value(p, i) + i).collect()
}

/// Emits the partitioned complementary sequence of length `seq_len()`.
///
/// Fails if the shifts are not non-squashing or if two elements would be
/// superposed.
pub fn synthesize(params: &CsParams) -> Result<ComplexSeq> {
    params.check_non_squashing()?;
    let len = params.seq_len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut owner = vec![usize::MAX; len];
    for (i, pos) in placements(params).into_iter().enumerate() {
        if owner[pos] != usize::MAX {
            return Err(Error::Overlap {
                position: pos,
                first: owner[pos],
                second: i,
            });
        }
        owner[pos] = i;
        out[pos] = unit_root(phase_exponent(params, i), params.h);
    }
    ComplexSeq::new(out)
}

/// Golay mate: the linear coefficient of `x_{pi_1}` advanced by `H/2`.
pub fn mate(params: &CsParams) -> CsParams {
    let mut p = params.clone();
    p.c[0] = (p.c[0] + p.h / 2) % p.h;
    p
}

/// Support `{f_s(i) + i}`, ascending.
pub fn support(params: &CsParams) -> Vec<usize> {
    let mut pos = placements(params);
    pos.sort_unstable();
    pos
}

/// Prefix offset `s'` plus cluster gaps `(s^_1, ..., s^_m)`.
///
/// Gap `s^_n` separates clusters at partitioning level `n`, and it consumes
/// `2^{n-1}` zero subcarriers, so a vector fits `Z` zeros iff
/// `s' + sum_n s^_n 2^{n-1} <= Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeparationVector {
    pub offset: usize,
    pub gaps: Vec<usize>,
}

impl SeparationVector {
    pub fn new(offset: usize, gaps: Vec<usize>) -> Self {
        SeparationVector { offset, gaps }
    }

    pub fn zero(m: usize) -> Self {
        SeparationVector {
            offset: 0,
            gaps: vec![0; m],
        }
    }

    pub fn m(&self) -> usize {
        self.gaps.len()
    }

    /// Weighted gap sum `sum_n s^_n 2^{n-1}`.
    pub fn gap_zeros(&self) -> usize {
        self.gaps.iter().enumerate().map(|(n, &g)| g << n).sum()
    }

    /// Total zero subcarriers consumed, `s' + sum_n s^_n 2^{n-1}`.
    pub fn zeros_used(&self) -> usize {
        self.offset + self.gap_zeros()
    }

    pub fn is_feasible(&self, z: usize) -> bool {
        self.zeros_used() <= z
    }
}

/// Converts separations to Golay shifts: `s_m = s^_m`,
/// `s_n = s^_n + sum_{i>n} s_i`, `d' = s'`.
pub fn shifts_from_separations(sep: &SeparationVector) -> (Vec<usize>, usize) {
    let m = sep.m();
    let mut s = vec![0usize; m];
    let mut tail = 0usize;
    for n in (0..m).rev() {
        s[n] = sep.gaps[n] + tail;
        tail += s[n];
    }
    (s, sep.offset)
}

/// Inverse of [`shifts_from_separations`]; fails on squashing shifts.
pub fn separations_from_shifts(s: &[usize], d: usize) -> Result<SeparationVector> {
    check_non_squashing(s)?;
    let mut gaps = vec![0usize; s.len()];
    let mut tail = 0usize;
    for n in (0..s.len()).rev() {
        gaps[n] = s[n] - tail;
        tail += s[n];
    }
    Ok(SeparationVector { offset: d, gaps })
}
