//! Lexicographic ranking of permutations `pi` of `{1..m}` with `pi_1 > pi_m`.
//!
//! Exactly one of `pi` and its reversal satisfies the constraint, so there
//! are `m!/2` such permutations for `m >= 2`. Ranks are 0-based and follow
//! lexicographic order of the restricted set (Lehmer-style counting of the
//! completions of each prefix).

use crate::error::{out_of_range, Error, Result};

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of ranked permutations, `m!/2`.
pub fn restricted_count(m: usize) -> u64 {
    assert!((2..=20).contains(&m), "m = {m} outside 2..=20");
    factorial(m) / 2
}

// number of ways to finish `prefix` using `remaining` with first > last
fn completions(prefix: &[usize], remaining: &[usize], m: usize) -> u64 {
    match (prefix.first(), remaining.len()) {
        (None, _) => factorial(m) / 2,
        (Some(&first), 0) => (first > prefix[m - 1]) as u64,
        (Some(&first), r) => {
            remaining.iter().filter(|&&x| x < first).count() as u64 * factorial(r - 1)
        }
    }
}

/// The permutation of 0-based restricted rank `rank`.
pub fn unrank_permutation(rank: u64, m: usize) -> Result<Vec<usize>> {
    if !(2..=20).contains(&m) {
        return Err(out_of_range("m", m, "2..=20"));
    }
    let total = restricted_count(m);
    if rank >= total {
        return Err(out_of_range(
            "permutation rank",
            rank,
            format!("0..{total}"),
        ));
    }
    let mut rank = rank;
    let mut prefix = Vec::with_capacity(m);
    let mut remaining: Vec<usize> = (1..=m).collect();
    while !remaining.is_empty() {
        let mut chosen = None;
        for (pos, &x) in remaining.iter().enumerate() {
            prefix.push(x);
            let rest: Vec<usize> = remaining.iter().copied().filter(|&y| y != x).collect();
            let c = completions(&prefix, &rest, m);
            prefix.pop();
            if rank < c {
                chosen = Some(pos);
                break;
            }
            rank -= c;
        }
        let pos = chosen.expect("rank within range always selects a candidate");
        prefix.push(remaining.remove(pos));
    }
    Ok(prefix)
}

/// 0-based restricted rank of `pi`; fails unless `pi` is a permutation of
/// `1..=m` with `pi_1 > pi_m`.
pub fn rank_permutation(pi: &[usize]) -> Result<u64> {
    let m = pi.len();
    if !(2..=20).contains(&m) {
        return Err(out_of_range("m", m, "2..=20"));
    }
    let mut sorted = pi.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=m).collect::<Vec<_>>() {
        return Err(Error::InvalidParams(format!("{pi:?} is not a permutation")));
    }
    if pi[0] < pi[m - 1] {
        return Err(Error::InvalidParams(format!(
            "{pi:?} has pi_1 < pi_m; rank its reversal instead"
        )));
    }
    let mut rank = 0u64;
    let mut remaining: Vec<usize> = (1..=m).collect();
    let mut prefix = Vec::with_capacity(m);
    for &p in pi {
        for &x in remaining.iter().filter(|&&x| x < p) {
            prefix.push(x);
            let rest: Vec<usize> = remaining.iter().copied().filter(|&y| y != x).collect();
            rank += completions(&prefix, &rest, m);
            prefix.pop();
        }
        remaining.retain(|&y| y != p);
        prefix.push(p);
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn next_permutation(a: &mut [usize]) -> bool {
        let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
            return false;
        };
        let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
        a.swap(i - 1, j);
        a[i..].reverse();
        true
    }

    #[test]
    fn bijection_against_filtered_lexicographic_list() {
        for m in 2..=7 {
            let mut p: Vec<usize> = (1..=m).collect();
            let mut listed = Vec::new();
            loop {
                if p[0] > p[m - 1] {
                    listed.push(p.clone());
                }
                if !next_permutation(&mut p) {
                    break;
                }
            }
            assert_eq!(listed.len() as u64, restricted_count(m));
            for (r, q) in listed.iter().enumerate() {
                assert_eq!(unrank_permutation(r as u64, m).unwrap(), *q);
                assert_eq!(rank_permutation(q).unwrap(), r as u64);
            }
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(unrank_permutation(0, 3).unwrap(), vec![2, 3, 1]);
        assert_eq!(rank_permutation(&[3, 2, 1]).unwrap(), 2);
        assert_eq!(unrank_permutation(0, 2).unwrap(), vec![2, 1]);
        assert!(unrank_permutation(3, 3).is_err());
        assert!(rank_permutation(&[1, 2, 3]).is_err());
        assert!(rank_permutation(&[3, 3, 1]).is_err());
    }
}
