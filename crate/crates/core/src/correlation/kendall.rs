//! Kendall tau-b in O(n log n).
//!
//! Pairs are sorted by (x, y); tied-x and joint ties are counted from runs in
//! that order. A bottom-up merge sort over the y column then counts
//! discordant pairs as inversions, and tied-y runs are counted on the sorted
//! result. With `n0 = n(n-1)/2`, `n1` tied-x pairs, `n2` tied-y pairs, `n3`
//! pairs tied in both and `d` discordant pairs:
//!
//! `tau_b = (n0 - n1 - n2 + n3 - 2d) / sqrt((n0 - n1)(n0 - n2))`

use super::rank::cmp;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
fn pairs_in_run(len: u64) -> u64 {
    len * (len - 1) / 2
}

/// Sums `len * (len - 1) / 2` over maximal runs where `same(i - 1, i)` holds.
fn tied_pairs(n: usize, same: impl Fn(usize) -> bool) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for i in 1..n {
        if same(i) {
            run += 1;
        } else {
            total += pairs_in_run(run);
            run = 1;
        }
    }
    total + pairs_in_run(run)
}

/// Sorts `values` ascending and returns the number of inversions
/// (`i < j` with `values[i] > values[j]`). Equal values never count.
pub(crate) fn sort_counting_inversions<T: Scalar>(values: &mut Vec<T>) -> u64 {
    let n = values.len();
    let mut buf = values.clone();
    let mut swaps = 0u64;
    let mut width = 1;
    // Small runs are sorted by insertion first.
    const RUN: usize = 16;
    for chunk in values.chunks_mut(RUN) {
        for i in 1..chunk.len() {
            let mut j = i;
            while j > 0 && chunk[j - 1] > chunk[j] {
                chunk.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        width = RUN;
    }
    let (mut src, mut dst) = (values, &mut buf);
    let mut flipped = false;
    while width < n {
        for lo in (0..n).step_by(2 * width) {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if src[j] < src[i] {
                    dst[k] = src[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    dst[k] = src[i];
                    i += 1;
                }
                k += 1;
            }
            dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
            k += mid - i;
            dst[k..k + (hi - j)].copy_from_slice(&src[j..hi]);
        }
        std::mem::swap(&mut src, &mut dst);
        flipped = !flipped;
        width *= 2;
    }
    if flipped {
        dst.copy_from_slice(src);
    }
    swaps
}

/// Kendall's tau-b over complete, finite observations.
pub fn kendall_tau_b<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    super::check_dense(x, y)?;
    let n = x.len();
    let mut pairs: Vec<(T, T)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_unstable_by(|a, b| cmp(&a.0, &b.0).then_with(|| cmp(&a.1, &b.1)));

    let tied_x = tied_pairs(n, |i| pairs[i].0 == pairs[i - 1].0);
    let tied_xy = tied_pairs(n, |i| pairs[i] == pairs[i - 1]);

    let mut ys: Vec<T> = pairs.into_iter().map(|p| p.1).collect();
    let discordant = sort_counting_inversions(&mut ys);
    let tied_y = tied_pairs(n, |i| ys[i] == ys[i - 1]);

    let n0 = pairs_in_run(n as u64);
    let untied_x = n0 - tied_x;
    let untied_y = n0 - tied_y;
    if untied_x == 0 || untied_y == 0 {
        return Err(Error::UndefinedCoefficient(
            "kendall tau-b: every value on one side is tied".into(),
        ));
    }
    let numerator = n0 as i64 - tied_x as i64 - tied_y as i64 + tied_xy as i64 - 2 * discordant as i64;
    let denominator = (untied_x as f64 * untied_y as f64).sqrt();
    let tau = (numerator as f64 / denominator).clamp(-1.0, 1.0);
    Ok(T::lit(tau))
}
