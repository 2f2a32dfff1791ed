//! Per-subcarrier link model `y_i = h_i t_i + w_i`.
//!
//! The cyclic prefix is assumed to exceed the channel delay spread, so a
//! multipath channel acts multiplicatively on each subcarrier. All random
//! draws come from an explicit generator; [`trial_rng`] derives independent
//! ChaCha streams from `(seed, trial)`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codec::Codec;
use crate::error::{Error, Result};

/// Fading model, serialized as `{"kind": "flat" | "iid-rayleigh" | "tapped-delay", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelProfile {
    /// `h_i = 1`.
    Flat,
    /// Independent `CN(0, 1)` gain per subcarrier.
    IidRayleigh,
    /// Frequency response of independent `CN(0, p)` taps at integer delays.
    TappedDelay {
        delays: Vec<usize>,
        powers_db: Vec<f64>,
    },
}

impl ChannelProfile {
    pub fn validate(&self) -> Result<()> {
        if let ChannelProfile::TappedDelay { delays, powers_db } = self {
            if delays.is_empty() || delays.len() != powers_db.len() {
                return Err(Error::Profile(format!(
                    "need matching non-empty delays and powers (got {} and {})",
                    delays.len(),
                    powers_db.len()
                )));
            }
            if let Some(p) = powers_db.iter().find(|p| !p.is_finite()) {
                return Err(Error::Profile(format!("tap power {p} dB is not finite")));
            }
        }
        Ok(())
    }

    /// Linear tap powers normalized to unit sum.
    pub fn tap_powers(&self) -> Vec<f64> {
        match self {
            ChannelProfile::TappedDelay { powers_db, .. } => {
                let lin: Vec<f64> = powers_db.iter().map(|p| 10f64.powf(p / 10.0)).collect();
                let total: f64 = lin.iter().sum();
                lin.into_iter().map(|p| p / total).collect()
            }
            _ => vec![1.0],
        }
    }
}

/// Gains known to the receiver plus the noise variance per complex subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Complex64>,
    pub noise_var: f64,
}

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Circularly symmetric complex Gaussian sample of unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws subcarrier gains `h_0..h_{M-1}`.
pub fn realize<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    subcarriers: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    profile.validate()?;
    Ok(match profile {
        ChannelProfile::Flat => vec![Complex64::new(1.0, 0.0); subcarriers],
        ChannelProfile::IidRayleigh => (0..subcarriers).map(|_| complex_normal(rng)).collect(),
        ChannelProfile::TappedDelay { delays, .. } => {
            let taps: Vec<Complex64> = profile
                .tap_powers()
                .iter()
                .map(|p| complex_normal(rng) * p.sqrt())
                .collect();
            let step = -std::f64::consts::TAU / subcarriers as f64;
            (0..subcarriers)
                .map(|i| {
                    taps.iter()
                        .zip(delays)
                        .map(|(g, &d)| {
                            g * Complex64::from_polar(1.0, step * ((i * d) % subcarriers) as f64)
                        })
                        .sum()
                })
                .collect()
        }
    })
}

/// `y_i = h_i t_i + w_i` with `w_i ~ CN(0, N0)`.
///
/// Noise samples are drawn even when `N0 = 0`, so one generator state yields
/// the same normalized noise at every noise level.
pub fn transmit<R: Rng + ?Sized>(
    tx: &[Complex64],
    ch: &ChannelRealization,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if tx.len() != ch.gains.len() {
        return Err(Error::LengthMismatch {
            left: tx.len(),
            right: ch.gains.len(),
        });
    }
    let sigma = ch.noise_var.sqrt();
    Ok(tx
        .iter()
        .zip(&ch.gains)
        .map(|(t, h)| h * t + complex_normal(rng) * sigma)
        .collect())
}

/// Noise variance for a block of `2^m` unit-energy elements carrying
/// `n_bits` information bits: `N0 = (2^m / n_bits) / 10^{ebn0/10}`.
pub fn n0_for_bits(ebn0_db: f64, m: usize, n_bits: usize) -> f64 {
    if ebn0_db == f64::INFINITY {
        return 0.0;
    }
    let eb = (1u64 << m) as f64 / n_bits as f64;
    eb / 10f64.powf(ebn0_db / 10.0)
}

pub fn n0_from_ebn0(ebn0_db: f64, codec: &Codec) -> f64 {
    n0_for_bits(ebn0_db, codec.config().m, codec.n_bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: impl Iterator<Item = f64>, n: usize) -> f64 {
        v.sum::<f64>() / n as f64
    }

    #[test]
    fn flat_is_unity() {
        let mut rng = trial_rng(0, 0);
        let h = realize(&ChannelProfile::Flat, 12, &mut rng).unwrap();
        assert!(h.iter().all(|&g| g == Complex64::new(1.0, 0.0)));
        let t: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, -1.0)).collect();
        let ch = ChannelRealization {
            gains: h,
            noise_var: 0.0,
        };
        assert_eq!(transmit(&t, &ch, &mut rng).unwrap(), t);
    }

    #[test]
    fn rayleigh_has_unit_mean_power() {
        let mut rng = trial_rng(11, 0);
        let h = realize(&ChannelProfile::IidRayleigh, 100_000, &mut rng).unwrap();
        let p = mean(h.iter().map(|g| g.norm_sqr()), h.len());
        assert!((p - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn noise_variance() {
        let mut rng = trial_rng(12, 0);
        let n = 100_000;
        let ch = ChannelRealization {
            gains: vec![Complex64::new(1.0, 0.0); n],
            noise_var: 1.0,
        };
        let y = transmit(&vec![Complex64::new(0.0, 0.0); n], &ch, &mut rng).unwrap();
        let mu: Complex64 = y.iter().sum::<Complex64>() / n as f64;
        let var = mean(y.iter().map(|v| (v - mu).norm_sqr()), n);
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn two_tap_response_is_periodic() {
        let big_m = 64;
        let profile = ChannelProfile::TappedDelay {
            delays: vec![0, big_m / 4],
            powers_db: vec![0.0, 0.0],
        };
        assert_eq!(profile.tap_powers(), vec![0.5, 0.5]);
        for trial in 0..5 {
            let h = realize(&profile, big_m, &mut trial_rng(3, trial)).unwrap();
            for i in 0..big_m - 4 {
                assert!((h[i].norm_sqr() - h[i + 4].norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tapped_delay_has_unit_mean_power() {
        let text = include_str!("../../../profiles/exponential6.toml");
        let profile: ChannelProfile = toml::from_str(text).unwrap();
        assert!((profile.tap_powers().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let n = 20_000;
        let p = mean(
            (0..n as u64)
                .map(|t| realize(&profile, 16, &mut trial_rng(4, t)).unwrap()[5].norm_sqr()),
            n,
        );
        assert!((p - 1.0).abs() < 0.03, "{p}");
    }

    #[test]
    fn seeded_determinism() {
        let a = realize(&ChannelProfile::IidRayleigh, 32, &mut trial_rng(9, 4)).unwrap();
        let b = realize(&ChannelProfile::IidRayleigh, 32, &mut trial_rng(9, 4)).unwrap();
        let c = realize(&ChannelProfile::IidRayleigh, 32, &mut trial_rng(9, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ebn0_conversion() {
        assert!((n0_for_bits(0.0, 4, 20) - 0.8).abs() < 1e-15);
        assert_eq!(n0_for_bits(f64::INFINITY, 4, 20), 0.0);
        assert!((n0_for_bits(3.0, 4, 40) * 2.0 - n0_for_bits(3.0, 4, 20)).abs() < 1e-15);
    }

    #[test]
    fn profile_formats() {
        let p: ChannelProfile =
            serde_json::from_str(r#"{"kind":"tapped-delay","delays":[0,2],"powers_db":[0,-3]}"#)
                .unwrap();
        assert!(matches!(p, ChannelProfile::TappedDelay { .. }));
        let f: ChannelProfile = serde_json::from_str(r#"{"kind":"iid-rayleigh"}"#).unwrap();
        assert_eq!(f, ChannelProfile::IidRayleigh);
        assert!(serde_json::from_str::<ChannelProfile>(r#"{"kind":"vehicular"}"#).is_err());
        let bad = ChannelProfile::TappedDelay {
            delays: vec![0, 1],
            powers_db: vec![0.0],
        };
        assert!(realize(&bad, 8, &mut trial_rng(0, 0)).is_err());
    }
}
