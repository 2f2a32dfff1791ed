//! Randomized invariants of the sequence layer and the construction.

use num_complex::Complex64;
use pcs_core::construct::{
    mate, separations_from_shifts, shifts_from_separations, synthesize, CsParams, SeparationVector,
};
use pcs_core::seq::{aacf, envelope_samples, is_complementary_pair, pmepr_db, ComplexSeq};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(seed: u64, max_m: usize) -> CsParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=max_m);
    let h = [2u32, 4, 8][rng.random_range(0..3)];
    let mut pi: Vec<usize> = (1..=m).collect();
    pi.shuffle(&mut rng);
    let c = (0..m).map(|_| rng.random_range(0..h)).collect();
    let sep = SeparationVector::new(
        rng.random_range(0..4),
        (0..m)
            .map(|_| {
                if rng.random_bool(0.4) {
                    rng.random_range(0..4)
                } else {
                    0
                }
            })
            .collect(),
    );
    let (s, d) = shifts_from_separations(&sep);
    CsParams::new(m, h, pi, c, rng.random_range(0..h), d, s).unwrap()
}

fn seq_strategy() -> impl Strategy<Value = ComplexSeq> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..40).prop_map(|v| {
        ComplexSeq::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn aacf_is_conjugate_symmetric(s in seq_strategy()) {
        let r = aacf(&s);
        for k in r.lags() {
            prop_assert!((r.at(k) - r.at(-k).conj()).norm() < 1e-12);
        }
        prop_assert!((r.at(0).re - s.energy()).abs() < 1e-9);
    }

    #[test]
    fn envelope_refines_with_oversampling(s in seq_strategy(), o in 1usize..6) {
        let coarse = envelope_samples(&s, o).unwrap();
        let fine = envelope_samples(&s, 2 * o).unwrap();
        for (n, v) in coarse.iter().enumerate() {
            prop_assert!((fine[2 * n] - v).abs() < 1e-9 * (1.0 + v));
        }
        let mean = fine.iter().sum::<f64>() / fine.len() as f64;
        prop_assert!((mean - s.energy()).abs() < 1e-9 * (1.0 + mean));
        let peak = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
        prop_assert!(peak(&fine) >= peak(&coarse) - 1e-12);
    }

    #[test]
    fn separations_and_shifts_round_trip(offset in 0usize..50, gaps in prop::collection::vec(0usize..20, 1..=8)) {
        let sep = SeparationVector::new(offset, gaps);
        let (s, d) = shifts_from_separations(&sep);
        let back = separations_from_shifts(&s, d).unwrap();
        prop_assert_eq!(back, sep);
    }

    #[test]
    fn random_codewords_form_pairs(seed in any::<u64>()) {
        let p = random_params(seed, 6);
        let a = synthesize(&p).unwrap();
        let b = synthesize(&mate(&p)).unwrap();
        prop_assert!(is_complementary_pair(&a, &b, 1e-9).unwrap());
        prop_assert_eq!(a.support(), pcs_core::construct::support(&p));
        let ea = envelope_samples(&a, 4).unwrap();
        let eb = envelope_samples(&b, 4).unwrap();
        let total = 2.0 * (1u64 << p.m()) as f64;
        for (x, y) in ea.iter().zip(&eb) {
            prop_assert!((x + y - total).abs() < 1e-8);
        }
        prop_assert!(pmepr_db(&a, 8, (1u64 << p.m()) as f64).unwrap() <= 3.0103 + 1e-3);
    }
}
