//! Brute-force oracles for the counting recursions and rank/unrank maps.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use pcs_core::construct::{shifts_from_separations, support, CsParams, SeparationVector};
use pcs_core::enumerate::*;
use proptest::prelude::*;

/// All tuples `(t_0, .., t_{k-1})` with `t_j <= bound[j]`, lexicographic.
fn boxes(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

fn weighted(gaps: &[usize]) -> usize {
    gaps.iter().enumerate().map(|(n, &g)| g * (1 << n)).sum()
}

/// Gap vectors with weighted sum `<= y`, sorted lexicographically.
fn brute_gaps(y: usize, m: usize) -> Vec<Vec<usize>> {
    let bounds: Vec<usize> = (0..m).map(|n| y >> n).collect();
    let mut v: Vec<_> = boxes(&bounds)
        .into_iter()
        .filter(|g| weighted(g) <= y)
        .collect();
    v.sort();
    v
}

/// `(s', gaps)` with `s' + weighted(gaps) <= z`, sorted lexicographically.
fn brute_separations(z: usize, m: usize) -> Vec<SeparationVector> {
    let mut bounds = vec![z];
    bounds.extend((0..m).map(|n| z >> n));
    let mut v: Vec<_> = boxes(&bounds)
        .into_iter()
        .filter(|t| t[0] + weighted(&t[1..]) <= z)
        .map(|t| SeparationVector::new(t[0], t[1..].to_vec()))
        .collect();
    v.sort();
    v
}

fn n(x: usize) -> BigUint {
    BigUint::from(x)
}

#[test]
fn counts_match_brute_force() {
    let t = CardinalityTable::new(4, 32);
    for m in 1..=4 {
        for y in 0..=32 {
            assert_eq!(t.a(m, y).unwrap(), &n(brute_gaps(y, m).len()), "A_{m}({y})");
            assert_eq!(
                t.p(m, y).unwrap(),
                &n(brute_separations(y, m).len()),
                "P_{m}({y})"
            );
            for l in 0..m {
                let unrolled = brute_separations(y >> l, m - l).len();
                assert_eq!(t.d(m, l, y).unwrap(), &n(unrolled), "D_{m},{l}({y})");
            }
        }
    }
}

#[test]
fn sum_and_half_forms_agree() {
    let t = CardinalityTable::new(10, 512);
    for m in 1..=10 {
        for z in 0..=512 {
            assert_eq!(
                t.p(m, z).unwrap(),
                &t.p_via_half(m, z).unwrap(),
                "m={m} z={z}"
            );
        }
    }
}

#[test]
fn large_arguments_are_exact() {
    let t = CardinalityTable::new(16, 4096);
    let p = t.p(16, 4096).unwrap();
    assert_eq!(p, &t.p_via_half(16, 4096).unwrap());
    assert!(p > &BigUint::from(u32::MAX));
}

#[test]
fn rank_order_matches_sorted_enumeration() {
    let t = CardinalityTable::new(4, 16);
    for m in 1..=4 {
        for y in 0..=16 {
            for (idx, g) in brute_gaps(y, m).iter().enumerate() {
                assert_eq!(unrank_sep_core(&t, &n(idx + 1), y, m).unwrap(), *g);
                assert_eq!(rank_sep_core(&t, g, y, m).unwrap(), n(idx + 1));
            }
            for (idx, s) in brute_separations(y, m).iter().enumerate() {
                assert_eq!(unrank_sep(&t, &n(idx + 1), y, m).unwrap(), *s);
                assert_eq!(rank_sep(&t, s, y, m).unwrap(), n(idx + 1));
            }
            assert_eq!(all_gaps(y, m), brute_gaps(y, m));
        }
    }
    // the last of the six vectors with s^_1 + 2 s^_2 <= 3
    assert_eq!(unrank_sep_core(&t, &n(6), 3, 2).unwrap(), vec![3, 0]);
    // the single-gap pattern is second of the P_3(1) = 3 patterns
    let sep = SeparationVector::new(0, vec![1, 0, 0]);
    assert_eq!(rank_sep_dist(&t, &sep, 1, 3, 0).unwrap(), n(2));
    assert_eq!(t.p(3, 1).unwrap(), &n(3));
}

#[test]
fn dist_family_round_trips_over_full_range() {
    let t = CardinalityTable::new(4, 32);
    for m in 1..=4 {
        for z in 0..=32 {
            for l in 0..m {
                let count = t.d(m, l, z).unwrap().to_usize().unwrap();
                let all = all_separations(z, m, l).unwrap();
                assert_eq!(all.len(), count);
                let mut seen = BTreeSet::new();
                for (idx, expect) in all.iter().enumerate() {
                    let sep = unrank_sep_dist(&t, &n(idx + 1), z, m, l).unwrap();
                    assert_eq!(&sep, expect);
                    assert!(sep.is_feasible(z));
                    assert_eq!(rank_sep_dist(&t, &sep, z, m, l).unwrap(), n(idx + 1));
                    assert!(seen.insert(sep));
                }
                assert!(unrank_sep_dist(&t, &n(count + 1), z, m, l).is_err());
            }
        }
    }
}

fn support_of(sep: &SeparationVector) -> BTreeSet<usize> {
    let m = sep.m();
    let (s, d) = shifts_from_separations(sep);
    let pi: Vec<usize> = (1..=m).collect();
    let p = CsParams::new(m, 4, pi, vec![0; m], 0, d, s).unwrap();
    support(&p).into_iter().collect()
}

#[test]
fn symmetric_supports_keep_distance() {
    for m in [3usize, 4] {
        for z in 0..=8 {
            let big_m = (1 << m) + z;
            for l in 0..m {
                let supports: Vec<_> = all_separations(z, m, l)
                    .unwrap()
                    .iter()
                    .map(support_of)
                    .collect();
                for s in &supports {
                    assert!(*s.iter().last().unwrap() < big_m);
                }
                let bound = d_lb(big_m, m, l);
                let r2 = big_m as f64 / (1 << m) as f64;
                for i in 0..supports.len() {
                    for j in i + 1..supports.len() {
                        let diff = supports[i].symmetric_difference(&supports[j]).count();
                        let d = (r2 * diff as f64).sqrt();
                        assert!(d >= bound - 1e-12, "m={m} z={z} l={l}: {d} < {bound}");
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn random_ranks_round_trip(m in 1usize..=8, z in 0usize..200, l_frac in 0.0f64..1.0, r in any::<u64>()) {
        let l = ((m as f64) * l_frac) as usize;
        let t = CardinalityTable::new(8, 200);
        let count = t.d(m, l, z).unwrap().clone();
        let rank = BigUint::from(r) % &count + 1u32;
        let sep = unrank_sep_dist(&t, &rank, z, m, l).unwrap();
        prop_assert!(sep.is_feasible(z));
        prop_assert_eq!(rank_sep_dist(&t, &sep, z, m, l).unwrap(), rank);
    }
}
