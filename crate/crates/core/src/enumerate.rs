//! Counting and indexing separation vectors.
//!
//! For `Y >= 0`, `A_m(Y)` counts gap vectors `(s^_1..s^_m)` with
//! `sum_n s^_n 2^{n-1} <= Y`; it obeys `A_1(Y) = Y + 1` and
//! `A_m(Y) = sum_{i=0}^{Y} A_{m-1}(floor((Y-i)/2))`. Adding the prefix offset
//! gives `P_m(Z) = sum_{i=0}^{Z} A_m(i) = A_{m+1}(2Z+1) / 2` feasible vectors
//! for `Z` zero subcarriers. Restricting supports to be symmetric at `l`
//! nested levels gives `D_{m,l}(Z) = D_{m-1,l-1}(floor(Z/2))` with
//! `D_{m,0} = P_m`.
//!
//! The rank/unrank functions index these sets from 1 in lexicographic order
//! of `(s', s^_1, ..., s^_m)`, which is the order the recursions visit them.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::construct::SeparationVector;
use crate::error::{out_of_range, Error, Result};

/// Frozen table of `A_m(Y)` and its prefix sums `P_m(Y)`.
///
/// Built once for `m <= max_m + 1` and `Y <= 2 * max_arg + 1`, so every
/// `A`, `P` (both forms) and `D` query with `m <= max_m` and argument
/// `<= max_arg` is answered from memory.
#[derive(Debug, Clone)]
pub struct CardinalityTable {
    max_m: usize,
    max_arg: usize,
    // a[m - 1][y] = A_m(y); p[m - 1][y] = sum_{i<=y} A_m(i)
    a: Vec<Vec<BigUint>>,
    p: Vec<Vec<BigUint>>,
}

impl CardinalityTable {
    pub fn new(max_m: usize, max_arg: usize) -> Self {
        let rows = max_m + 1;
        let cols = 2 * max_arg + 2;
        let mut a: Vec<Vec<BigUint>> = Vec::with_capacity(rows);
        let mut p: Vec<Vec<BigUint>> = Vec::with_capacity(rows);
        for m in 1..=rows {
            let row: Vec<BigUint> = if m == 1 {
                (0..cols).map(|y| BigUint::from(y + 1)).collect()
            } else {
                let prev = &a[m - 2];
                let mut acc = BigUint::zero();
                (0..cols)
                    .map(|y| {
                        acc += &prev[y / 2];
                        acc.clone()
                    })
                    .collect()
            };
            let mut acc = BigUint::zero();
            let prefix = row
                .iter()
                .map(|v| {
                    acc += v;
                    acc.clone()
                })
                .collect();
            a.push(row);
            p.push(prefix);
        }
        CardinalityTable {
            max_m,
            max_arg,
            a,
            p,
        }
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    pub fn max_arg(&self) -> usize {
        self.max_arg
    }

    fn check(&self, m: usize, arg: usize, m_cap: usize, arg_cap: usize) -> Result<()> {
        if m == 0 || m > m_cap {
            return Err(out_of_range("m", m, format!("1..={m_cap}")));
        }
        if arg > arg_cap {
            return Err(out_of_range("argument", arg, format!("0..={arg_cap}")));
        }
        Ok(())
    }

    /// `A_m(Y)`.
    pub fn a(&self, m: usize, y: usize) -> Result<&BigUint> {
        self.check(m, y, self.max_m + 1, 2 * self.max_arg + 1)?;
        Ok(&self.a[m - 1][y])
    }

    /// `P_m(Z) = sum_{i=0}^{Z} A_m(i)`.
    pub fn p(&self, m: usize, z: usize) -> Result<&BigUint> {
        self.check(m, z, self.max_m, self.max_arg)?;
        Ok(&self.p[m - 1][z])
    }

    /// `P_m(Z)` through the closed form `A_{m+1}(2Z+1) / 2`.
    pub fn p_via_half(&self, m: usize, z: usize) -> Result<BigUint> {
        self.check(m, z, self.max_m, self.max_arg)?;
        Ok(&self.a[m][2 * z + 1] >> 1u32)
    }

    /// `D_{m,l}(Z) = P_{m-l}(floor(Z / 2^l))`.
    pub fn d(&self, m: usize, l: usize, z: usize) -> Result<&BigUint> {
        check_level(m, l)?;
        self.p(m - l, z >> l)
    }
}

fn check_level(m: usize, l: usize) -> Result<()> {
    if m == 0 || l >= m {
        return Err(out_of_range("l", l, format!("0..{m}")));
    }
    Ok(())
}

/// `A_m(Y)` from a table sized for this query.
pub fn card_a(m: usize, y: usize) -> Result<BigUint> {
    if m == 0 {
        return Err(out_of_range("m", 0, "1.."));
    }
    CardinalityTable::new(m, y).a(m, y).cloned()
}

/// `P_m(Z)`. Both forms are evaluated and must agree.
pub fn card_p(m: usize, z: usize) -> Result<BigUint> {
    if m == 0 {
        return Err(out_of_range("m", 0, "1.."));
    }
    let t = CardinalityTable::new(m, z);
    let sum = t.p(m, z)?.clone();
    let half = t.p_via_half(m, z)?;
    assert_eq!(sum, half, "P_{m}({z}) forms disagree");
    Ok(sum)
}

/// `D_{m,l}(Z)`.
pub fn card_d(m: usize, l: usize, z: usize) -> Result<BigUint> {
    check_level(m, l)?;
    card_p(m - l, z >> l)
}

/// Number of `H`-PSK sequences from the quadratic phase function:
/// `H^{m+1} m! / 2` for `m > 0`, `H` for `m = 0`.
///
/// For `m = 1` this is the literal formula value `H^2 / 2` (integral because
/// `H` is even), which is half the number of distinct length-2 sequences.
pub fn card_c(m: usize, h: u32) -> Result<BigUint> {
    if h == 0 || !h.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "H must be even and positive, got {h}"
        )));
    }
    if m == 0 {
        return Ok(BigUint::from(h));
    }
    let fact: BigUint = (1..=m).map(BigUint::from).product();
    Ok((BigUint::from(h).pow(m as u32 + 1) * fact) >> 1u32)
}

pub(crate) fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).log2()
    } else {
        // keep the top 64 bits
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

/// Cardinality and distance figures of one code instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeCard {
    pub subcarriers: usize,
    pub m: usize,
    pub alphabet: u32,
    pub level: usize,
    pub zeros: usize,
    /// `D_{m,l}(Z) * C^(m)(H)`, the number of codewords.
    pub codewords: BigUint,
    pub n_total: f64,
    pub n_supp: f64,
    pub n_nonzero: f64,
    /// `floor(log2 N)`.
    pub info_bits: u64,
    /// Spectral efficiency `floor(log2 N) / M` in bits per subcarrier.
    pub rho: f64,
    /// Guaranteed support distance `sqrt(M / 2^{m-l-1})`.
    pub d_lb: f64,
    /// Minimum distance among codewords sharing a support.
    pub d_nonzero: f64,
}

impl CodeCard {
    pub fn d_min_bound(&self) -> f64 {
        self.d_lb.min(self.d_nonzero)
    }
}

/// Minimum distance between distinct codewords on a common support, with
/// elements scaled to `r = sqrt(M / 2^m)`: `sqrt(M)` for `H = 2`,
/// `sqrt(2M) sin(pi / H)` otherwise.
pub fn d_nonzero(subcarriers: usize, h: u32) -> f64 {
    let m = subcarriers as f64;
    if h == 2 {
        m.sqrt()
    } else {
        (2.0 * m).sqrt() * (std::f64::consts::PI / h as f64).sin()
    }
}

/// `sqrt(M / 2^{m-l-1})`.
pub fn d_lb(subcarriers: usize, m: usize, l: usize) -> f64 {
    (subcarriers as f64 / (1u64 << (m - l - 1)) as f64).sqrt()
}

pub fn code_card(subcarriers: usize, m: usize, h: u32, l: usize) -> Result<CodeCard> {
    if m == 0 || m > 30 {
        return Err(out_of_range("m", m, "1..=30"));
    }
    check_level(m, l)?;
    let base = 1usize << m;
    if subcarriers < base {
        return Err(Error::InvalidConfig(format!(
            "M = {subcarriers} is smaller than 2^m = {base}"
        )));
    }
    let zeros = subcarriers - base;
    let d = card_d(m, l, zeros)?;
    let c = card_c(m, h)?;
    let n = &d * &c;
    let info_bits = n.bits() - 1;
    Ok(CodeCard {
        subcarriers,
        m,
        alphabet: h,
        level: l,
        zeros,
        n_total: log2_big(&n),
        n_supp: log2_big(&d),
        n_nonzero: log2_big(&c),
        info_bits,
        rho: info_bits as f64 / subcarriers as f64,
        d_lb: d_lb(subcarriers, m, l),
        d_nonzero: d_nonzero(subcarriers, h),
        codewords: n,
    })
}

fn check_rank(n: &BigUint, count: &BigUint) -> Result<()> {
    if n.is_zero() || n > count {
        return Err(out_of_range("rank", n, format!("1..={count}")));
    }
    Ok(())
}

/// The `n`-th gap vector with `sum_n s^_n 2^{n-1} <= Y`.
pub fn unrank_sep_core(
    t: &CardinalityTable,
    n: &BigUint,
    y: usize,
    m: usize,
) -> Result<Vec<usize>> {
    check_rank(n, t.a(m, y)?)?;
    let mut out = Vec::with_capacity(m);
    let mut n = n.clone();
    let mut y = y;
    for level in (1..=m).rev() {
        if level == 1 {
            // n <= Y + 1 by the range check above
            out.push(n.to_usize().unwrap() - 1);
            break;
        }
        // largest c with sum_{i<c} A_{level-1}(floor((y-i)/2)) < n
        let mut c = 0usize;
        loop {
            let block = t.a(level - 1, (y - c) / 2)?;
            if n <= *block {
                break;
            }
            n -= block;
            c += 1;
        }
        out.push(c);
        y = (y - c) / 2;
    }
    Ok(out)
}

/// Inverse of [`unrank_sep_core`].
pub fn rank_sep_core(t: &CardinalityTable, gaps: &[usize], y: usize, m: usize) -> Result<BigUint> {
    if gaps.len() != m {
        return Err(Error::LengthMismatch {
            left: gaps.len(),
            right: m,
        });
    }
    let zeros: usize = gaps.iter().enumerate().map(|(n, &g)| g << n).sum();
    if zeros > y {
        return Err(Error::Infeasible(format!(
            "gaps {gaps:?} need {zeros} > {y} zeros"
        )));
    }
    t.a(m, y)?;
    let mut rank = BigUint::zero();
    let mut y = y;
    for (idx, &g) in gaps.iter().enumerate() {
        let level = m - idx;
        if level == 1 {
            rank += BigUint::from(g + 1);
            break;
        }
        for i in 0..g {
            rank += t.a(level - 1, (y - i) / 2)?;
        }
        y = (y - g) / 2;
    }
    Ok(rank)
}

/// The `n`-th separation vector with `s' + sum_n s^_n 2^{n-1} <= Z`.
pub fn unrank_sep(
    t: &CardinalityTable,
    n: &BigUint,
    z: usize,
    m: usize,
) -> Result<SeparationVector> {
    check_rank(n, t.p(m, z)?)?;
    let mut n = n.clone();
    let mut offset = 0usize;
    loop {
        let block = t.a(m, z - offset)?;
        if n <= *block {
            break;
        }
        n -= block;
        offset += 1;
    }
    let gaps = unrank_sep_core(t, &n, z - offset, m)?;
    Ok(SeparationVector { offset, gaps })
}

/// Inverse of [`unrank_sep`].
pub fn rank_sep(
    t: &CardinalityTable,
    sep: &SeparationVector,
    z: usize,
    m: usize,
) -> Result<BigUint> {
    if sep.m() != m {
        return Err(Error::LengthMismatch {
            left: sep.m(),
            right: m,
        });
    }
    if !sep.is_feasible(z) {
        return Err(Error::Infeasible(format!(
            "{sep:?} uses {} > {z} zeros",
            sep.zeros_used()
        )));
    }
    t.p(m, z)?;
    let mut rank = BigUint::zero();
    for i in 0..sep.offset {
        rank += t.a(m, z - i)?;
    }
    Ok(rank + rank_sep_core(t, &sep.gaps, z - sep.offset, m)?)
}

/// The `n`-th separation vector of the level-`l` symmetric family.
///
/// For `l > 0` the vector for one half (`m - 1` levels, `floor(Z/2)` zeros)
/// is relabelled as the full gap vector, the outermost gap is doubled, and
/// the prefix is chosen so that both halves sit symmetrically around the
/// centre of the band.
pub fn unrank_sep_dist(
    t: &CardinalityTable,
    n: &BigUint,
    z: usize,
    m: usize,
    l: usize,
) -> Result<SeparationVector> {
    check_level(m, l)?;
    if l == 0 {
        return unrank_sep(t, n, z, m);
    }
    let half = unrank_sep_dist(t, n, z / 2, m - 1, l - 1)?;
    let mut gaps = Vec::with_capacity(m);
    gaps.push(2 * half.offset);
    gaps.extend_from_slice(&half.gaps);
    let weighted: usize = gaps.iter().enumerate().map(|(i, &g)| g << i).sum();
    let offset = z / 2 - weighted / 2;
    Ok(SeparationVector { offset, gaps })
}

/// Inverse of [`unrank_sep_dist`].
pub fn rank_sep_dist(
    t: &CardinalityTable,
    sep: &SeparationVector,
    z: usize,
    m: usize,
    l: usize,
) -> Result<BigUint> {
    check_level(m, l)?;
    if l == 0 {
        return rank_sep(t, sep, z, m);
    }
    if sep.m() != m {
        return Err(Error::LengthMismatch {
            left: sep.m(),
            right: m,
        });
    }
    if !sep.gaps[0].is_multiple_of(2) {
        return Err(Error::Infeasible(format!(
            "outer gap {} is odd at symmetry level {l}",
            sep.gaps[0]
        )));
    }
    let weighted = sep.gap_zeros();
    if weighted / 2 > z / 2 || sep.offset != z / 2 - weighted / 2 {
        return Err(Error::Infeasible(format!(
            "{sep:?} is not centred for Z = {z} at symmetry level {l}"
        )));
    }
    let half = SeparationVector {
        offset: sep.gaps[0] / 2,
        gaps: sep.gaps[1..].to_vec(),
    };
    rank_sep_dist(t, &half, z / 2, m - 1, l - 1)
}

/// Every gap vector with `sum_n s^_n 2^{n-1} <= Y`, in rank order.
pub fn all_gaps(y: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(y: usize, m: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 1 {
            for g in 0..=y {
                prefix.push(g);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for g in 0..=y {
            prefix.push(g);
            rec((y - g) / 2, m - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(y, m, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// Every separation vector of the level-`l` family, in rank order.
pub fn all_separations(z: usize, m: usize, l: usize) -> Result<Vec<SeparationVector>> {
    check_level(m, l)?;
    if l == 0 {
        let mut out = Vec::new();
        for offset in 0..=z {
            out.extend(
                all_gaps(z - offset, m)
                    .into_iter()
                    .map(|gaps| SeparationVector { offset, gaps }),
            );
        }
        return Ok(out);
    }
    Ok(all_separations(z / 2, m - 1, l - 1)?
        .into_iter()
        .map(|half| {
            let mut gaps = Vec::with_capacity(m);
            gaps.push(2 * half.offset);
            gaps.extend_from_slice(&half.gaps);
            let weighted: usize = gaps.iter().enumerate().map(|(i, &g)| g << i).sum();
            SeparationVector {
                offset: z / 2 - weighted / 2,
                gaps,
            }
        })
        .collect())
}
