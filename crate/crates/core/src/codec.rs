//! Bit-level encoder and recursive branch-and-prune decoder.
//!
//! A payload is split into `bits_nonzero` (`m+1` Gray-mapped phase symbols of
//! `h = log2 H` bits: `k'` first, then `c_1..c_m`) and `bits_index`, an
//! `n_index`-bit integer `i = i_supp * m!/2 + i_pi` selecting the separation
//! vector (by canonical rank) and the permutation (by restricted Lehmer rank).
//!
//! The decoder combines the received values two at a time along the
//! hypothesized permutation: at every level a candidate of length `2^r` is
//! folded on its current variable into `(m - 1 - level) * H` children of
//! length `2^{r-1}`, each scored by `sum_j max_c Re{xi^{-c} u_j} - E`. Only the
//! best `N_best` children survive globally. The last length-2 stage is solved
//! exhaustively over the final phase and `k'`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{
    separations_from_shifts, shifts_from_separations, synthesize, unit_root, CsParams,
    SeparationVector,
};
use crate::enumerate::{all_separations, rank_sep_dist, unrank_sep_dist, CardinalityTable};
use crate::error::{out_of_range, Error, Result};
use crate::perm::{rank_permutation, restricted_count, unrank_permutation};
use crate::seq::ComplexSeq;

pub const DEFAULT_N_MAX: usize = 10_000;
pub const DEFAULT_N_BEST: usize = 400;

/// Largest separation family the decoder will score exhaustively.
pub const MAX_SEPARATIONS: usize = 1 << 22;

/// One code instance plus decoder budgets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodecConfig {
    /// Number of subcarriers `M`.
    pub subcarriers: usize,
    pub m: usize,
    /// Alphabet size `H`, a power of two.
    pub alphabet: u32,
    /// Distance level `l`.
    pub level: usize,
    /// Separation hypotheses kept after preparation.
    pub n_max: usize,
    /// Survivors kept at every combining level.
    pub n_best: usize,
}

impl CodecConfig {
    /// Configuration with the default budgets.
    pub fn new(subcarriers: usize, m: usize, alphabet: u32, level: usize) -> Result<Self> {
        let cfg = CodecConfig {
            subcarriers,
            m,
            alphabet,
            level,
            n_max: DEFAULT_N_MAX,
            n_best: DEFAULT_N_BEST,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_budgets(mut self, n_max: usize, n_best: usize) -> Result<Self> {
        self.n_max = n_max;
        self.n_best = n_best;
        self.validate()?;
        Ok(self)
    }

    /// Budgets large enough that nothing is ever pruned (exact ML).
    pub fn unbounded(mut self) -> Self {
        self.n_max = usize::MAX;
        self.n_best = usize::MAX;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=20).contains(&self.m) {
            return Err(out_of_range("m", self.m, "2..=20"));
        }
        if self.subcarriers < 1 << self.m {
            return Err(Error::InvalidConfig(format!(
                "M = {} is smaller than 2^m = {}",
                self.subcarriers,
                1usize << self.m
            )));
        }
        if self.level >= self.m {
            return Err(out_of_range("l", self.level, format!("0..{}", self.m)));
        }
        if self.alphabet < 2 || !self.alphabet.is_power_of_two() || self.alphabet > 1 << 16 {
            return Err(Error::InvalidConfig(format!(
                "H must be a power of two in 2..=65536, got {}",
                self.alphabet
            )));
        }
        if self.n_max == 0 || self.n_best == 0 {
            return Err(Error::InvalidConfig("N_max and N_best must be >= 1".into()));
        }
        Ok(())
    }

    /// Zero subcarriers `Z = M - 2^m`.
    pub fn zeros(&self) -> usize {
        self.subcarriers - (1 << self.m)
    }

    /// Bits per phase symbol, `log2 H`.
    pub fn bits_per_symbol(&self) -> usize {
        self.alphabet.trailing_zeros() as usize
    }
}

/// Information bits of one block, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Payload {
    pub bits_nonzero: Vec<bool>,
    pub bits_index: Vec<bool>,
}

impl Payload {
    /// Builds a payload from the two integer values with the widths of `codec`.
    pub fn from_values(codec: &Codec, nonzero: &BigUint, index: &BigUint) -> Result<Self> {
        Ok(Payload {
            bits_nonzero: to_bits(nonzero, codec.n_nonzero_bits(), "nonzero payload")?,
            bits_index: to_bits(index, codec.n_index(), "index payload")?,
        })
    }

    /// Parses hexadecimal values (an optional `0x` prefix is accepted).
    pub fn from_hex(codec: &Codec, nonzero: &str, index: &str) -> Result<Self> {
        Self::from_values(codec, &parse_hex(nonzero)?, &parse_hex(index)?)
    }

    pub fn nonzero_value(&self) -> BigUint {
        from_bits(&self.bits_nonzero)
    }

    pub fn index_value(&self) -> BigUint {
        from_bits(&self.bits_index)
    }

    /// `(nonzero, index)` as lowercase hexadecimal.
    pub fn to_hex(&self) -> (String, String) {
        (
            self.nonzero_value().to_str_radix(16),
            self.index_value().to_str_radix(16),
        )
    }

    pub fn len(&self) -> usize {
        self.bits_nonzero.len() + self.bits_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_hex(text: &str) -> Result<BigUint> {
    let t = text.trim();
    let t = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    if t.is_empty() {
        return Err(Error::PayloadMismatch("empty hex string".into()));
    }
    BigUint::parse_bytes(t.as_bytes(), 16)
        .ok_or_else(|| Error::PayloadMismatch(format!("invalid hex string {text:?}")))
}

fn from_bits(bits: &[bool]) -> BigUint {
    bits.iter().fold(BigUint::zero(), |acc, &b| {
        (acc << 1u32) + if b { 1u32 } else { 0 }
    })
}

fn to_bits(v: &BigUint, width: usize, what: &'static str) -> Result<Vec<bool>> {
    if v.bits() as usize > width {
        return Err(out_of_range(what, v, format!("{width}-bit values")));
    }
    Ok((0..width).rev().map(|i| v.bit(i as u64)).collect())
}

/// Binary-reflected Gray code word for phase `c`.
pub fn gray_encode(c: u32) -> u32 {
    c ^ (c >> 1)
}

/// Phase carried by Gray code word `g`.
pub fn gray_decode(g: u32) -> u32 {
    let mut c = g;
    let mut s = g >> 1;
    while s > 0 {
        c ^= s;
        s >>= 1;
    }
    c
}

/// `max_c Re{xi^{-c} z}` over the `H`-PSK alphabet.
#[inline]
pub fn psk_projection(z: Complex64, h: u32) -> f64 {
    match h {
        2 => z.re.abs(),
        4 => z.re.abs().max(z.im.abs()),
        _ => {
            let step = std::f64::consts::TAU / h as f64;
            let c = (z.im.atan2(z.re) / step).round();
            let (s, co) = (c * step).sin_cos();
            z.re * co + z.im * s
        }
    }
}

/// Matched-filter values `v_i = conj(h_i) y_i` and energies `E_i = |h_i|^2 / 2`.
pub fn weigh(received: &[Complex64], gains: &[Complex64]) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if received.len() != gains.len() {
        return Err(Error::LengthMismatch {
            left: received.len(),
            right: gains.len(),
        });
    }
    Ok(received
        .iter()
        .zip(gains)
        .map(|(y, h)| (h.conj() * y, h.norm_sqr() / 2.0))
        .unzip())
}

/// Back-pointer entry of one candidate.
///
/// At level 0 `parent` is the separation rank (0-based) and `var` the
/// hypothesized `pi_1`; at level `k > 0` `parent` indexes the previous level,
/// `var = pi_{k+1}` and `phase = c_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label {
    pub parent: usize,
    pub var: usize,
    pub phase: u32,
}

/// Candidate lists of the decoder between combining levels.
#[derive(Debug, Clone)]
pub struct DecoderState {
    level: usize,
    len: usize,
    seqs: Vec<Complex64>,
    rows: Vec<usize>,
    energy: Vec<f64>,
    scores: Vec<f64>,
    remaining: Vec<u32>,
    labels: Vec<Vec<Label>>,
}

impl DecoderState {
    /// Number of combining steps applied so far.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Length of every candidate sequence.
    pub fn candidate_len(&self) -> usize {
        self.len
    }

    pub fn num_candidates(&self) -> usize {
        self.rows.len()
    }

    pub fn candidate(&self, i: usize) -> &[Complex64] {
        let r = self.rows[i];
        &self.seqs[r * self.len..(r + 1) * self.len]
    }

    /// Pruning metric of candidate `i`.
    pub fn score(&self, i: usize) -> f64 {
        self.scores[i]
    }

    /// Hypothesized energy `E_s` of candidate `i`.
    pub fn energy(&self, i: usize) -> f64 {
        self.energy[self.rows[i]]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[self.level][i]
    }

    /// Separation rank (0-based) at the root of candidate `i`.
    pub fn root_separation(&self, i: usize) -> usize {
        let mut idx = i;
        for lv in (1..=self.level).rev() {
            idx = self.labels[lv][idx].parent;
        }
        self.labels[0][idx].parent
    }

    /// Permutation entries and phases `(pi_1..pi_{k+1}, c_1..c_k)` of candidate `i`.
    pub fn partial_hypothesis(&self, i: usize) -> (Vec<usize>, Vec<u32>) {
        let mut pi = Vec::with_capacity(self.level + 1);
        let mut c = Vec::with_capacity(self.level);
        let mut idx = i;
        for lv in (0..=self.level).rev() {
            let lab = self.labels[lv][idx];
            pi.push(lab.var);
            if lv > 0 {
                c.push(lab.phase);
                idx = lab.parent;
            }
        }
        pi.reverse();
        c.reverse();
        (pi, c)
    }
}

/// Best hypothesis found by the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Detected parameters, normalized so that `pi_1 > pi_m`.
    pub params: CsParams,
    /// 0-based canonical rank of the detected separation vector.
    pub separation_rank: usize,
    /// `sum_i Re{conj(t_i) v_i} - E_s` of the detected codeword.
    pub metric: f64,
}

/// Encoder and decoder for one [`CodecConfig`].
#[derive(Debug, Clone)]
pub struct Codec {
    cfg: CodecConfig,
    table: CardinalityTable,
    // d' followed by s_1..s_m, one record per separation in rank order
    shifts: Vec<u32>,
    count: usize,
    perm_count: u64,
    index_limit: BigUint,
    n_index: usize,
}

impl Codec {
    pub fn new(cfg: CodecConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.m;
        let z = cfg.zeros();
        let table = CardinalityTable::new(m, z.max(1));
        let d = table.d(m, cfg.level, z)?.clone();
        let count = d
            .to_usize()
            .filter(|&c| c <= MAX_SEPARATIONS)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "{d} separation hypotheses exceed the decoder limit of {MAX_SEPARATIONS}"
                ))
            })?;
        let seps = all_separations(z, m, cfg.level)?;
        debug_assert_eq!(seps.len(), count);
        let mut shifts = Vec::with_capacity(count * (m + 1));
        for sep in &seps {
            let (s, off) = shifts_from_separations(sep);
            shifts.push(off as u32);
            shifts.extend(s.iter().map(|&x| x as u32));
        }
        let perm_count = restricted_count(m);
        let index_limit = d * BigUint::from(perm_count);
        let n_index = index_limit.bits() as usize - 1;
        Ok(Codec {
            cfg,
            table,
            shifts,
            count,
            perm_count,
            index_limit,
            n_index,
        })
    }

    pub fn config(&self) -> &CodecConfig {
        &self.cfg
    }

    /// Number of separation vectors `D_{m,l}(Z)`.
    pub fn num_separations(&self) -> usize {
        self.count
    }

    /// `D_{m,l}(Z) * m!/2`.
    pub fn index_limit(&self) -> &BigUint {
        &self.index_limit
    }

    /// `floor(log2(D_{m,l}(Z) * m!/2))`.
    pub fn n_index(&self) -> usize {
        self.n_index
    }

    /// `(m+1) log2 H`.
    pub fn n_nonzero_bits(&self) -> usize {
        (self.cfg.m + 1) * self.cfg.bits_per_symbol()
    }

    /// Information bits per block.
    pub fn n_bits(&self) -> usize {
        self.n_nonzero_bits() + self.n_index
    }

    /// Separation vector of 0-based rank `rank`.
    pub fn separation(&self, rank: usize) -> SeparationVector {
        let rec = self.shift_record(rank);
        let s: Vec<usize> = rec[1..].iter().map(|&x| x as usize).collect();
        separations_from_shifts(&s, rec[0] as usize).expect("stored shifts are non-squashing")
    }

    fn shift_record(&self, rank: usize) -> &[u32] {
        let w = self.cfg.m + 1;
        &self.shifts[rank * w..(rank + 1) * w]
    }

    /// Positions `f_s(i) + i` in index order for separation `rank`.
    fn fill_placements(&self, rank: usize, out: &mut [usize]) {
        let m = self.cfg.m;
        let rec = self.shift_record(rank);
        out[0] = rec[0] as usize;
        for (n, &s_n) in rec.iter().enumerate().skip(1) {
            let step = s_n as usize + (1 << (m - n));
            let filled = 1usize << (n - 1);
            for q in (0..filled).rev() {
                let p = out[q];
                out[2 * q] = p;
                out[2 * q + 1] = p + step;
            }
        }
    }

    /// A uniformly random payload.
    pub fn random_payload<R: Rng + ?Sized>(&self, rng: &mut R) -> Payload {
        Payload {
            bits_nonzero: (0..self.n_nonzero_bits()).map(|_| rng.random()).collect(),
            bits_index: (0..self.n_index).map(|_| rng.random()).collect(),
        }
    }

    /// Maps a payload to its codeword parameters and the length-`M` sequence.
    pub fn encode(&self, payload: &Payload) -> Result<(CsParams, ComplexSeq)> {
        let params = self.params_of(payload)?;
        let seq = synthesize(&params)?.padded_to(self.cfg.subcarriers)?;
        Ok((params, seq))
    }

    /// Codeword parameters selected by `payload`.
    pub fn params_of(&self, payload: &Payload) -> Result<CsParams> {
        let m = self.cfg.m;
        let hb = self.cfg.bits_per_symbol();
        if payload.bits_nonzero.len() != self.n_nonzero_bits() {
            return Err(Error::PayloadMismatch(format!(
                "expected {} nonzero bits, got {}",
                self.n_nonzero_bits(),
                payload.bits_nonzero.len()
            )));
        }
        if payload.bits_index.len() != self.n_index {
            return Err(Error::PayloadMismatch(format!(
                "expected {} index bits, got {}",
                self.n_index,
                payload.bits_index.len()
            )));
        }
        let symbols: Vec<u32> = payload
            .bits_nonzero
            .chunks(hb)
            .map(|ch| gray_decode(ch.iter().fold(0u32, |a, &b| (a << 1) | b as u32)))
            .collect();
        let index = payload.index_value();
        if index >= self.index_limit {
            return Err(out_of_range(
                "payload index",
                &index,
                format!("0..{}", self.index_limit),
            ));
        }
        let pc = BigUint::from(self.perm_count);
        let i_pi = (&index % &pc).to_u64().expect("below m!/2");
        let i_supp = &index / &pc;
        let pi = unrank_permutation(i_pi, m)?;
        let sep = unrank_sep_dist(
            &self.table,
            &(i_supp + 1u32),
            self.cfg.zeros(),
            m,
            self.cfg.level,
        )?;
        let (s, d) = shifts_from_separations(&sep);
        CsParams::new(
            m,
            self.cfg.alphabet,
            pi,
            symbols[1..].to_vec(),
            symbols[0],
            d,
            s,
        )
    }

    /// Payload index `i_supp * m!/2 + i_pi` of a codeword, reversing `pi` and
    /// the phases first when `pi_1 < pi_m`.
    pub fn index_of(&self, params: &CsParams) -> Result<BigUint> {
        let (pi, _) = normalized(params);
        let sep = separations_from_shifts(params.shifts(), params.prepad())?;
        let rank = rank_sep_dist(
            &self.table,
            &sep,
            self.cfg.zeros(),
            self.cfg.m,
            self.cfg.level,
        )?;
        let i_pi = rank_permutation(&pi)?;
        Ok((rank - 1u32) * BigUint::from(self.perm_count) + BigUint::from(i_pi))
    }

    /// Payload carried by `params`; indices at or above `2^{n_index}` are
    /// clamped to the largest representable one.
    pub fn payload_of(&self, params: &CsParams) -> Result<Payload> {
        if params.m() != self.cfg.m || params.alphabet() != self.cfg.alphabet {
            return Err(Error::PayloadMismatch(format!(
                "parameters for m = {}, H = {} do not match the codec",
                params.m(),
                params.alphabet()
            )));
        }
        let (_, c) = normalized(params);
        let hb = self.cfg.bits_per_symbol();
        let mut bits_nonzero = Vec::with_capacity(self.n_nonzero_bits());
        for sym in std::iter::once(params.offset_phase()).chain(c) {
            let g = gray_encode(sym);
            bits_nonzero.extend((0..hb).rev().map(|b| (g >> b) & 1 == 1));
        }
        let mut index = self.index_of(params)?;
        let cap = BigUint::one() << self.n_index;
        if index >= cap {
            index = cap - 1u32;
        }
        Ok(Payload {
            bits_nonzero,
            bits_index: to_bits(&index, self.n_index, "index payload")?,
        })
    }

    /// Scores every separation hypothesis and builds the `m * N_select` roots.
    pub fn prepare(&self, v: &[Complex64], e: &[f64]) -> Result<DecoderState> {
        let big_m = self.cfg.subcarriers;
        for len in [v.len(), e.len()] {
            if len != big_m {
                return Err(Error::LengthMismatch {
                    left: len,
                    right: big_m,
                });
            }
        }
        let h = self.cfg.alphabet;
        let m = self.cfg.m;
        let n = 1usize << m;
        let weight: Vec<f64> = v
            .iter()
            .zip(e)
            .map(|(&x, &en)| psk_projection(x, h) - en)
            .collect();
        let scores: Vec<f64> = (0..self.count)
            .into_par_iter()
            .map_init(
                || vec![0usize; n],
                |buf, r| {
                    self.fill_placements(r, buf);
                    buf.iter().map(|&p| weight[p]).sum()
                },
            )
            .collect();
        let mut selected = top_k(&scores, self.cfg.n_max);
        selected.sort_unstable();

        let mut seqs = Vec::with_capacity(selected.len() * n);
        let mut energy = Vec::with_capacity(selected.len());
        let mut buf = vec![0usize; n];
        for &r in &selected {
            self.fill_placements(r, &mut buf);
            seqs.extend(buf.iter().map(|&p| v[p]));
            energy.push(buf.iter().map(|&p| e[p]).sum());
        }
        let all_vars = (1u32 << m) - 1;
        let mut rows = Vec::with_capacity(selected.len() * m);
        let mut root_scores = Vec::with_capacity(selected.len() * m);
        let mut labels = Vec::with_capacity(selected.len() * m);
        for (row, &r) in selected.iter().enumerate() {
            for var in 1..=m {
                rows.push(row);
                root_scores.push(scores[r]);
                labels.push(Label {
                    parent: r,
                    var,
                    phase: 0,
                });
            }
        }
        Ok(DecoderState {
            level: 0,
            len: n,
            seqs,
            remaining: vec![all_vars; rows.len()],
            rows,
            energy,
            scores: root_scores,
            labels: vec![labels],
        })
    }

    /// Folds every candidate on its current variable, keeping the best
    /// `N_best` children over all branches.
    ///
    /// # Panics
    /// If the candidates already have length 2.
    pub fn decode_step(&self, state: DecoderState) -> DecoderState {
        let m = self.cfg.m;
        assert!(
            state.level + 1 < m,
            "no combining step left at level {}",
            state.level
        );
        let h = self.cfg.alphabet;
        let rot: Vec<Complex64> = (0..h).map(|c| unit_root(h - c, h)).collect();
        let half = state.len / 2;
        let n_next = m - 1 - state.level;
        let per_cand = n_next * h as usize;

        let child_scores: Vec<f64> = (0..state.num_candidates())
            .into_par_iter()
            .flat_map_iter(|i| Fold::new(&state, i, m).child_scores(&rot, state.energy(i)))
            .collect();

        let mut keep = top_k(&child_scores, self.cfg.n_best);
        keep.sort_unstable();

        let mut seqs = Vec::with_capacity(keep.len() * half);
        let mut energy = Vec::with_capacity(keep.len());
        let mut remaining = Vec::with_capacity(keep.len());
        let mut labels = Vec::with_capacity(keep.len());
        let mut scores = Vec::with_capacity(keep.len());
        for &k in &keep {
            let cand = k / per_cand;
            let within = k % per_cand;
            let c = (within % h as usize) as u32;
            let fold = Fold::new(&state, cand, m);
            let next = fold
                .nexts()
                .nth(within / h as usize)
                .expect("child index in range");
            let signs = fold.signs(next);
            let r = rot[c as usize];
            seqs.extend((0..half).map(|j| fold.a[j] + r * signs[j] * fold.b[j]));
            energy.push(state.energy(cand));
            remaining.push(fold.rem & !(1 << (fold.var - 1)));
            labels.push(Label {
                parent: cand,
                var: next,
                phase: c,
            });
            scores.push(child_scores[k]);
        }
        let mut all_labels = state.labels;
        all_labels.push(labels);
        DecoderState {
            level: state.level + 1,
            len: half,
            seqs,
            rows: (0..keep.len()).collect(),
            energy,
            scores,
            remaining,
            labels: all_labels,
        }
    }

    /// Solves the final length-2 stage and backtracks to the full hypothesis.
    pub fn finish(&self, state: &DecoderState) -> Detection {
        let m = self.cfg.m;
        assert_eq!(state.level + 1, m, "finish needs fully combined candidates");
        let h = self.cfg.alphabet;
        let rot: Vec<Complex64> = (0..h).map(|c| unit_root(h - c, h)).collect();
        let mut best = (f64::NEG_INFINITY, 0usize, 0u32, 0u32);
        for i in 0..state.num_candidates() {
            let u = state.candidate(i);
            let e = state.energy(i);
            for cm in 0..h {
                let z = u[0] + u[1] * rot[cm as usize];
                for k in 0..h {
                    let metric = (z * rot[k as usize]).re - e;
                    if metric > best.0 {
                        best = (metric, i, cm, k);
                    }
                }
            }
        }
        let (metric, cand, cm, k) = best;
        let (pi, mut c) = state.partial_hypothesis(cand);
        c.push(cm);
        let rank = state.root_separation(cand);
        let sep = self.separation(rank);
        let (s, d) = shifts_from_separations(&sep);
        let raw = CsParams::new(m, h, pi, c, k, d, s).expect("decoder hypotheses are valid");
        let (pi, c) = normalized(&raw);
        let params = CsParams::new(m, h, pi, c, k, raw.prepad(), raw.shifts().to_vec())
            .expect("reversal keeps validity");
        Detection {
            params,
            separation_rank: rank,
            metric,
        }
    }

    /// Best codeword hypothesis for received values `y` over gains `gains`.
    pub fn detect(&self, received: &[Complex64], gains: &[Complex64]) -> Result<Detection> {
        let (v, e) = weigh(received, gains)?;
        let mut state = self.prepare(&v, &e)?;
        while state.level + 1 < self.cfg.m {
            state = self.decode_step(state);
        }
        Ok(self.finish(&state))
    }

    pub fn decode(&self, received: &[Complex64], gains: &[Complex64]) -> Result<Payload> {
        let det = self.detect(received, gains)?;
        self.payload_of(&det.params)
    }
}

/// `(pi, c)` with `pi` and the phases reversed when `pi_1 < pi_m`.
fn normalized(p: &CsParams) -> (Vec<usize>, Vec<u32>) {
    let mut pi = p.pi().to_vec();
    let mut c = p.phases().to_vec();
    if pi[0] < pi[pi.len() - 1] {
        pi.reverse();
        c.reverse();
    }
    (pi, c)
}

/// Indices of the `k` largest scores; ties go to the lower index.
fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    let by_rank = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    if k < idx.len() {
        idx.select_nth_unstable_by(k, by_rank);
        idx.truncate(k);
    }
    idx
}

/// Even/odd halves of one candidate with respect to its current variable.
struct Fold {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    mu: Vec<usize>,
    rem: u32,
    var: usize,
    m: usize,
}

impl Fold {
    fn new(state: &DecoderState, i: usize, m: usize) -> Self {
        let u = state.candidate(i);
        let rem = state.remaining[i];
        let var = state.labels[state.level][i].var;
        let w = var_weight(rem, var);
        let half = u.len() / 2;
        let mu: Vec<usize> = (0..half).map(|j| (j / w) * 2 * w + j % w).collect();
        Fold {
            a: mu.iter().map(|&p| u[p]).collect(),
            b: mu.iter().map(|&p| u[p + w]).collect(),
            mu,
            rem,
            var,
            m,
        }
    }

    fn nexts(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.m).filter(move |&n| n != self.var && self.rem & (1 << (n - 1)) != 0)
    }

    /// Scores of all children in `(next, c)` order.
    fn child_scores(&self, rot: &[Complex64], energy: f64) -> Vec<f64> {
        let h = rot.len() as u32;
        let mut out = Vec::new();
        for next in self.nexts() {
            let signs = self.signs(next);
            for r in rot {
                let s: f64 = (0..self.a.len())
                    .map(|j| psk_projection(self.a[j] + r * signs[j] * self.b[j], h))
                    .sum();
                out.push(s - energy);
            }
        }
        out
    }

    /// `(-1)^{x_next}` at every folded position.
    fn signs(&self, next: usize) -> Vec<f64> {
        let wn = var_weight(self.rem, next);
        self.mu
            .iter()
            .map(|&p| if (p / wn) & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    }
}

/// Stride of variable `n` in a sequence indexed by the variables in `rem`.
fn var_weight(rem: u32, n: usize) -> usize {
    let above = rem & !((1u32 << n) - 1);
    1 << above.count_ones()
}
