//! Binomial coefficients and lexicographic subset enumeration.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// C(n, k) as an arbitrary-precision integer; zero outside `0 <= k <= n`.
pub fn binom(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// C(n, k) for indexing purposes. Panics if the value does not fit a `usize`.
pub fn binom_usize(n: usize, k: isize) -> usize {
    binom(n as u64, k as i64)
        .to_usize()
        .expect("binomial coefficient exceeds usize")
}

/// All `size`-subsets of `{0, .., ground-1}` in lexicographic order.
///
/// Members are 0-based; human-facing output adds one.
pub fn subsets(ground: usize, size: usize) -> Vec<Vec<usize>> {
    if size > ground {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binom_usize(ground, size as isize));
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        // advance the rightmost position that still has room
        let Some(i) = (0..size).rev().find(|&i| cur[i] < ground - size + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Position of a sorted subset inside `subsets(ground, subset.len())`.
pub fn subset_rank(ground: usize, subset: &[usize]) -> usize {
    let k = subset.len();
    let mut rank = 0usize;
    let mut prev: isize = -1;
    for (i, &s) in subset.iter().enumerate() {
        for skipped in (prev + 1) as usize..s {
            rank += binom_usize(ground - skipped - 1, (k - i - 1) as isize);
        }
        prev = s as isize;
    }
    rank
}

/// Renders a 0-based subset as `{1,2}`.
pub fn subset_label(subset: &[usize]) -> String {
    let inner: Vec<String> = subset.iter().map(|s| (s + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize, k: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for j in 1..row.len() {
                next[j] = row[j - 1] + row[j];
            }
            row = next;
        }
        row.get(k).copied().unwrap_or(0)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(4, 2), BigUint::from(6u32));
        assert_eq!(binom(2, 3), BigUint::zero());
        assert_eq!(binom(8, 3), BigUint::from(56u32));
        assert_eq!(binom(5, -1), BigUint::zero());
        assert_eq!(binom(0, 0), BigUint::one());
    }

    #[test]
    fn binom_matches_pascal() {
        for n in 0..60usize {
            for k in 0..=n + 1 {
                assert_eq!(binom(n as u64, k as i64), BigUint::from(pascal(n, k)));
            }
        }
    }

    #[test]
    fn subsets_examples() {
        assert_eq!(subsets(2, 1), vec![vec![0], vec![1]]);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }

    #[test]
    fn subsets_count_order_and_rank() {
        for k in 0..=7 {
            for t in 0..=k {
                let all = subsets(k, t);
                assert_eq!(all.len(), binom_usize(k, t as isize));
                for w in all.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for (i, s) in all.iter().enumerate() {
                    assert_eq!(subset_rank(k, s), i);
                }
            }
        }
    }
}
