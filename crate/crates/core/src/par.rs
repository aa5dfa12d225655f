//! Data-parallel helpers with a fixed reduction tree.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it
//! they run sequentially. Reductions always split the index range into
//! blocks of [`BLOCK`] items, sum each block in index order and combine the
//! block sums in block order, so the result does not depend on the number of
//! threads or on the feature.

use crate::summation::{ComplexSum, NeumaierSum};
use num_complex::Complex64;

pub const BLOCK: usize = 4096;

#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Maps over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_collect(items.len(), |i| f(&items[i]))
}

/// Maps each block `[start, end)` of `0..n` to a value, in block order.
pub fn map_blocks<T, F>(n: usize, block: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync + Send,
{
    let nb = n.div_ceil(block);
    map_collect(nb, |b| {
        let start = b * block;
        f(start, (start + block).min(n))
    })
}

/// Deterministic compensated sum of `f(0) + … + f(n-1)`.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let partial = map_blocks(n, BLOCK, |a, b| {
        let mut acc = NeumaierSum::new();
        for i in a..b {
            acc.add(f(i));
        }
        acc.total()
    });
    crate::summation::sum(partial)
}

/// Complex counterpart of [`sum_indexed`].
pub fn sum_indexed_complex<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let partial = map_blocks(n, BLOCK, |a, b| {
        let mut acc = ComplexSum::new();
        for i in a..b {
            acc.add(f(i));
        }
        acc.total()
    });
    crate::summation::sum_complex(partial)
}

/// Sums several complex statistics per index at once.
pub fn sum_indexed_vec<F>(n: usize, width: usize, f: F) -> Vec<Complex64>
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    let partial = map_blocks(n, BLOCK, |a, b| {
        let mut acc = vec![ComplexSum::new(); width];
        let mut buf = vec![Complex64::new(0.0, 0.0); width];
        for i in a..b {
            f(i, &mut buf);
            for (s, v) in acc.iter_mut().zip(&buf) {
                s.add(*v);
            }
        }
        acc.iter().map(ComplexSum::total).collect::<Vec<_>>()
    });
    let mut out = vec![ComplexSum::new(); width];
    for block in partial {
        for (s, v) in out.iter_mut().zip(block) {
            s.add(v);
        }
    }
    out.iter().map(ComplexSum::total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v = map_collect(10_000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn blocks_cover_range_exactly() {
        let spans = map_blocks(10_001, BLOCK, |a, b| (a, b));
        assert_eq!(spans.first(), Some(&(0, BLOCK)));
        assert_eq!(spans.last(), Some(&(2 * BLOCK, 10_001)));
        assert_eq!(spans.len(), 3);
    }

    #[test]
    fn indexed_sum_is_exact_for_integers() {
        let s = sum_indexed(100_000, |i| i as f64);
        assert_eq!(s, 99_999.0 * 100_000.0 / 2.0);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn reduction_independent_of_pool_size() {
        let f = |i: usize| Complex64::from_polar(1.0, (i as f64).sqrt());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sum_indexed_complex(50_000, f));
        let b = four.install(|| sum_indexed_complex(50_000, f));
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
