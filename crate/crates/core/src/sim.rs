//! Monte Carlo harnesses: PMEPR distributions and block error rates.
//!
//! Trial `t` of a run draws everything (payload, channel, noise) from
//! [`trial_rng`]`(seed, t)`, so results do not depend on thread scheduling and
//! every Eb/N0 point of a sweep sees the same payloads, gains and normalized
//! noise.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{
    n0_from_ebn0, realize, transmit, trial_rng, ChannelProfile, ChannelRealization,
};
use crate::codec::Codec;
use crate::error::{Error, Result};
use crate::seq::{pmepr_db, ComplexSeq};

/// Trials evaluated in parallel before the stopping rule is checked.
const CHUNK: usize = 256;

/// PMEPR (dB, reference power `2^m`) of `count` random codewords.
pub fn codeword_pmepr(
    codec: &Codec,
    count: usize,
    seed: u64,
    oversample: usize,
) -> Result<Vec<f64>> {
    let p_ref = (1u64 << codec.config().m) as f64;
    (0..count as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let (_, seq) = codec.encode(&codec.random_payload(&mut rng))?;
            pmepr_db(&seq, oversample, p_ref)
        })
        .collect()
}

/// PMEPR (dB, reference power `M`) of uncoded random QPSK on all `M` subcarriers.
pub fn random_qpsk_pmepr(
    subcarriers: usize,
    count: usize,
    seed: u64,
    oversample: usize,
) -> Result<Vec<f64>> {
    let qpsk = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    (0..count as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let v = (0..subcarriers)
                .map(|_| qpsk[rng.random_range(0..4)])
                .collect();
            pmepr_db(&ComplexSeq::new(v)?, oversample, subcarriers as f64)
        })
        .collect()
}

/// Empirical `P(X >= x)` at every distinct sample value, ascending in `x`.
pub fn ccdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        if out.last().is_none_or(|&(last, _)| last != x) {
            out.push((x, (v.len() - i) as f64 / n));
        }
    }
    out
}

/// One point of a block-error-rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub n0: f64,
    pub trials: usize,
    pub block_errors: usize,
    pub bler: f64,
}

/// Stopping rule of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub max_trials: usize,
    /// The point ends at the trial that produces this many block errors.
    pub max_errors: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            max_trials: 10_000,
            max_errors: 200,
        }
    }
}

/// Whether trial `trial` ends in a block error.
pub fn run_trial(
    codec: &Codec,
    profile: &ChannelProfile,
    n0: f64,
    seed: u64,
    trial: u64,
) -> Result<bool> {
    let mut rng = trial_rng(seed, trial);
    let payload = codec.random_payload(&mut rng);
    let (_, seq) = codec.encode(&payload)?;
    let gains = realize(profile, codec.config().subcarriers, &mut rng)?;
    let ch = ChannelRealization {
        gains,
        noise_var: n0,
    };
    let y = transmit(seq.elements(), &ch, &mut rng)?;
    Ok(codec.decode(&y, &ch.gains)? != payload)
}

/// Block error rate at one Eb/N0.
pub fn bler_point(
    codec: &Codec,
    profile: &ChannelProfile,
    ebn0_db: f64,
    stop: StopRule,
    seed: u64,
) -> Result<BlerPoint> {
    if stop.max_trials == 0 || stop.max_errors == 0 {
        return Err(Error::InvalidConfig(
            "trial and error limits must be >= 1".into(),
        ));
    }
    profile.validate()?;
    let n0 = n0_from_ebn0(ebn0_db, codec);
    let mut trials = 0usize;
    let mut errors = 0usize;
    'outer: while trials < stop.max_trials {
        let end = (trials + CHUNK).min(stop.max_trials);
        let outcomes: Vec<bool> = (trials..end)
            .into_par_iter()
            .map(|t| run_trial(codec, profile, n0, seed, t as u64))
            .collect::<Result<_>>()?;
        for failed in outcomes {
            trials += 1;
            errors += failed as usize;
            if errors >= stop.max_errors {
                break 'outer;
            }
        }
    }
    Ok(BlerPoint {
        ebn0_db,
        n0,
        trials,
        block_errors: errors,
        bler: errors as f64 / trials as f64,
    })
}

/// Sweep over `ebn0_db`, each point seeded identically.
pub fn bler_curve(
    codec: &Codec,
    profile: &ChannelProfile,
    ebn0_db: &[f64],
    stop: StopRule,
    seed: u64,
) -> Result<Vec<BlerPoint>> {
    if ebn0_db.is_empty() {
        return Err(Error::InvalidConfig("empty Eb/N0 list".into()));
    }
    ebn0_db
        .iter()
        .map(|&x| bler_point(codec, profile, x, stop, seed))
        .collect()
}
