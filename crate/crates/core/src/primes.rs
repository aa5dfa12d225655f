//! Prime sieves, factorization and squarefree flags.

use crate::par;
use std::sync::{Arc, RwLock};

const SEGMENT: u64 = 1 << 18;

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All primes `≤ limit`, in ascending order, via a segmented sieve whose
/// segments are processed in parallel and concatenated in order.
pub fn sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let nseg = (limit + 1).div_ceil(SEGMENT) as usize;
    let segments = par::map_collect(nseg, |s| {
        let lo = s as u64 * SEGMENT;
        let hi = (lo + SEGMENT).min(limit + 1);
        let mut composite = vec![false; (hi - lo) as usize];
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut m = (p * p).max(lo.div_ceil(p) * p);
            while m < hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        (lo.max(2)..hi)
            .filter(|&n| !composite[(n - lo) as usize])
            .collect::<Vec<_>>()
    });
    segments.concat()
}

static CACHE: RwLock<Option<(u64, Arc<Vec<u64>>)>> = RwLock::new(None);

/// Shared view of the cached prime list, truncated to the requested bound.
#[derive(Clone, Debug)]
pub struct Primes {
    all: Arc<Vec<u64>>,
    len: usize,
}

impl std::ops::Deref for Primes {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.all[..self.len]
    }
}

/// Primes `≤ limit` from a process-wide cache that grows on demand.
pub fn primes_up_to(limit: u64) -> Primes {
    {
        let guard = CACHE.read().unwrap_or_else(|e| e.into_inner());
        if let Some((bound, all)) = guard.as_ref() {
            if *bound >= limit {
                let len = all.partition_point(|&p| p <= limit);
                return Primes { all: all.clone(), len };
            }
        }
    }
    let mut guard = CACHE.write().unwrap_or_else(|e| e.into_inner());
    let current = guard.as_ref().map_or(0, |(b, _)| *b);
    if current < limit {
        let bound = limit.max(current.saturating_mul(2)).max(1 << 16);
        *guard = Some((bound, Arc::new(sieve(bound))));
    }
    let all = guard.as_ref().unwrap().1.clone();
    let len = all.partition_point(|&p| p <= limit);
    Primes { all, len }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let root = (n as f64).sqrt() as u64 + 1;
    primes_up_to(root)
        .iter()
        .take_while(|&&p| p * p <= n)
        .all(|&p| !n.is_multiple_of(p) || n == p)
}

/// Prime factorization by trial division against the cached table.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "cannot factor 0");
    let mut out = Vec::new();
    let root = (n as f64).sqrt() as u64 + 1;
    for &p in primes_up_to(root).iter() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, k)| k as u64 + 1).product()
}

/// Smallest-prime-factor table for bulk factorization of `1..=limit`.
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m > limit {
                    break;
                }
                spf[m] = p;
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    /// Calls `f(p, k)` for each prime power `p^k ∥ n`, in ascending `p`.
    #[inline]
    pub fn for_each_factor(&self, mut n: usize, mut f: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            f(p as u64, k);
        }
    }

    pub fn factorize(&self, n: usize) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        self.for_each_factor(n, |p, k| out.push((p, k)));
        out
    }
}

/// `flags[n]` is true when `n` is squarefree, for `0 ≤ n ≤ limit` (`flags[0]` is false).
pub fn squarefree_flags(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    for &p in primes_up_to((limit as f64).sqrt() as u64 + 1).iter() {
        let sq = (p * p) as usize;
        if sq > n {
            break;
        }
        let mut m = sq;
        while m <= n {
            flags[m] = false;
            m += sq;
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_is_prime(n: u64) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn segmented_sieve_matches_simple_sieve() {
        let limit = 3 * SEGMENT + 17;
        assert_eq!(sieve(limit), simple_sieve(limit));
    }

    #[test]
    fn known_prime_counts() {
        assert_eq!(sieve(100).len(), 25);
        assert_eq!(sieve(1_000_000).len(), 78_498);
        assert_eq!(primes_up_to(10_000_000).len(), 664_579);
        assert_eq!(primes_up_to(10).to_vec(), vec![2, 3, 5, 7]);
    }

    #[test]
    fn spf_matches_trial_division() {
        let t = SpfTable::new(20_000);
        for n in 1..=20_000u64 {
            assert_eq!(t.factorize(n as usize), factorize(n), "n = {n}");
        }
    }

    #[test]
    fn squarefree_density() {
        let flags = squarefree_flags(1_000_000);
        let count = flags.iter().filter(|&&b| b).count() as f64;
        assert!((count / 1e6 - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-3);
        assert!(flags[1] && flags[30] && !flags[12] && !flags[49]);
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(36), 9);
        assert_eq!(divisor_count(100), 9);
    }

    proptest! {
        #[test]
        fn primality_agrees_with_naive(n in 0u64..200_000) {
            prop_assert_eq!(is_prime(n), naive_is_prime(n));
        }

        #[test]
        fn factorization_multiplies_back(n in 1u64..1_000_000_000) {
            let f = factorize(n);
            let prod: u64 = f.iter().map(|&(p, k)| p.pow(k)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.iter().all(|&(p, _)| naive_is_prime(p) || p > 40_000 && is_prime(p)));
        }
    }
}
