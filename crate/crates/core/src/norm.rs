// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scaled partial sums and multiresolution sup-norms of sign vectors.
//!
//! For a sequence `x` and a closed interval `[s, e]` the scaled partial sum is
//! `U_{s,e}(x) = (x_s + ... + x_e) / sqrt(e - s + 1)`. The multiresolution
//! sup-norm of `x` over a family of intervals is the largest `|U_{s,e}(x)|`
//! in the family. Two families are provided: every sub-interval (singletons
//! included), and the reduced left/right family made of the intervals anchored
//! at either end of the sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RnspError};

/// A sequence over `{-1, 0, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(RnspError::TooShort { len: 0, min: 1 });
        }
        if let Some(bad) = entries.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(RnspError::Domain(format!(
                "sign vector entries must be -1, 0 or 1; got {bad}"
            )));
        }
        Ok(Self(entries))
    }

    /// Signs of `values`, with `sign(0) = 0`.
    pub fn signs_of(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| sign(v)).collect())
    }

    pub(crate) fn from_raw(entries: Vec<i8>) -> Self {
        debug_assert!(!entries.is_empty());
        Self(entries)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }
}

/// Three-valued sign: `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Cumulative sums `c_0 = 0, c_k = x_1 + ... + x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSums {
    cumulative: Vec<f64>,
}

impl PrefixSums {
    pub fn new(x: &[i8]) -> Self {
        let mut cumulative = Vec::with_capacity(x.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for &v in x {
            acc += f64::from(v);
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    /// Number of summed entries `n`.
    pub fn len(&self) -> usize {
        self.cumulative.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `c_k` for `k = 0..=n`.
    pub fn at(&self, k: usize) -> f64 {
        self.cumulative[k]
    }

    /// Sum of `x_s..=x_e` (1-based), unchecked apart from slice bounds.
    #[inline]
    fn sum(&self, s: usize, e: usize) -> f64 {
        self.cumulative[e] - self.cumulative[s - 1]
    }
}

#[inline]
fn scaled(sum: f64, len: usize) -> f64 {
    sum / (len as f64).sqrt()
}

/// `U_{s,e}` for 1-based `1 <= s <= e <= n`.
pub fn scaled_partial_sum(p: &PrefixSums, s: usize, e: usize) -> Result<f64> {
    if s == 0 || s > e || e > p.len() {
        return Err(RnspError::IndexOutOfRange { s, e, n: p.len() });
    }
    Ok(scaled(p.sum(s, e), e - s + 1))
}

/// Sup-norm over all sub-intervals of `[1, n]`, singletons included. O(n^2).
pub fn msup_norm_all(x: &SignVector) -> f64 {
    norm_all_raw(x.entries())
}

pub(crate) fn norm_all_raw(x: &[i8]) -> f64 {
    let n = x.len();
    let p = PrefixSums::new(x);
    let roots: Vec<f64> = (0..=n).map(|k| (k as f64).sqrt()).collect();
    let mut best = 0.0f64;
    for s in 1..=n {
        let base = p.cumulative[s - 1];
        for e in s..=n {
            let v = (p.cumulative[e] - base).abs() / roots[e - s + 1];
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// Sup-norm over the left-anchored intervals `[1, k]` and right-anchored
/// intervals `[k, n]` of length at least 2. O(n).
pub fn msup_norm_lr(x: &SignVector) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(RnspError::TooShort { len: n, min: 2 });
    }
    let p = PrefixSums::new(x.entries());
    let total = p.at(n);
    let mut best = 0.0f64;
    for k in 2..=n {
        let left = scaled(p.at(k), k).abs();
        let right = scaled(total - p.at(n - k), k).abs();
        best = best.max(left).max(right);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sv(v: &[i8]) -> SignVector {
        SignVector::new(v.to_vec()).unwrap()
    }

    /// Direct summation over every interval, no prefix sums.
    fn brute_all(x: &[i8]) -> f64 {
        let mut best = 0.0f64;
        for s in 0..x.len() {
            for e in s..x.len() {
                let sum: i32 = x[s..=e].iter().map(|&v| i32::from(v)).sum();
                best = best.max(f64::from(sum).abs() / ((e - s + 1) as f64).sqrt());
            }
        }
        best
    }

    fn brute_lr(x: &[i8]) -> f64 {
        let n = x.len();
        let mut best = 0.0f64;
        for k in 2..=n {
            for (lo, hi) in [(0, k), (n - k, n)] {
                let sum: i32 = x[lo..hi].iter().map(|&v| i32::from(v)).sum();
                best = best.max(f64::from(sum).abs() / (k as f64).sqrt());
            }
        }
        best
    }

    fn signs(max_len: usize) -> impl Strategy<Value = Vec<i8>> {
        prop::collection::vec(-1i8..=1, 1..max_len)
    }

    #[test]
    fn scaled_partial_sum_examples() {
        let p = PrefixSums::new(&[1, 1, 1, 1]);
        assert_eq!(scaled_partial_sum(&p, 1, 4).unwrap(), 2.0);
        let p = PrefixSums::new(&[1, -1, 1, -1]);
        assert_eq!(scaled_partial_sum(&p, 1, 2).unwrap(), 0.0);
        let p = PrefixSums::new(&[-1, -1, -1]);
        assert_abs_diff_eq!(scaled_partial_sum(&p, 1, 3).unwrap(), -(3f64.sqrt()));
    }

    #[test]
    fn scaled_partial_sum_rejects_bad_indices() {
        let p = PrefixSums::new(&[1, 1, 1]);
        assert!(matches!(
            scaled_partial_sum(&p, 0, 2),
            Err(RnspError::IndexOutOfRange { .. })
        ));
        assert!(scaled_partial_sum(&p, 3, 2).is_err());
        assert!(scaled_partial_sum(&p, 1, 4).is_err());
    }

    #[test]
    fn prefix_sums_difference_recovers_entries() {
        let x = [1i8, 0, -1, -1, 1, 0];
        let p = PrefixSums::new(&x);
        assert_eq!(p.at(0), 0.0);
        for k in 1..=x.len() {
            assert_eq!(p.at(k) - p.at(k - 1), f64::from(x[k - 1]));
        }
    }

    #[test]
    fn norm_all_examples() {
        assert_eq!(msup_norm_all(&sv(&[1, 1, 1, 1])), 2.0);
        assert_eq!(msup_norm_all(&sv(&[1, -1])), 1.0);
        let mut step = vec![-1i8; 50];
        step.extend(vec![1i8; 50]);
        assert_abs_diff_eq!(msup_norm_all(&sv(&step)), 50f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn norm_lr_examples() {
        let mut step = vec![-1i8; 50];
        step.extend(vec![1i8; 50]);
        assert_abs_diff_eq!(
            msup_norm_lr(&sv(&step)).unwrap(),
            50f64.sqrt(),
            epsilon = 1e-12
        );
        assert_eq!(msup_norm_lr(&sv(&[0, 0, 0, 0])).unwrap(), 0.0);
        assert_abs_diff_eq!(msup_norm_lr(&sv(&[1, 1, -1])).unwrap(), 2f64.sqrt());
        assert!(matches!(
            msup_norm_lr(&sv(&[1])),
            Err(RnspError::TooShort { len: 1, min: 2 })
        ));
    }

    #[test]
    fn sign_vector_rejects_out_of_range_entries() {
        assert!(SignVector::new(vec![0, 2]).is_err());
        assert!(SignVector::new(vec![]).is_err());
        assert_eq!(
            SignVector::signs_of(&[-0.5, 0.0, 3.0]).entries(),
            &[-1, 0, 1]
        );
    }

    /// Every {-1,0,1} vector of length <= 8: deleting zeros never decreases
    /// the full sup-norm.
    #[test]
    fn zero_removal_never_decreases_norm_exhaustive() {
        let mut checked = 0usize;
        for n in 1..=8u32 {
            for code in 0..3usize.pow(n) {
                let mut c = code;
                let x: Vec<i8> = (0..n)
                    .map(|_| {
                        let v = (c % 3) as i8 - 1;
                        c /= 3;
                        v
                    })
                    .collect();
                let nonzero: Vec<i8> = x.iter().copied().filter(|&v| v != 0).collect();
                if nonzero.is_empty() {
                    continue;
                }
                let with = msup_norm_all(&sv(&x));
                let without = msup_norm_all(&sv(&nonzero));
                assert!(with <= without + 1e-12, "{x:?}: {with} > {without}");
                checked += 1;
            }
        }
        assert_eq!(checked, 9_832);
    }

    proptest! {
        #[test]
        fn norm_all_matches_direct_summation(x in signs(40)) {
            prop_assert!((msup_norm_all(&sv(&x)) - brute_all(&x)).abs() < 1e-12);
        }

        #[test]
        fn norm_lr_matches_direct_summation(x in signs(40).prop_filter("len>=2", |x| x.len() >= 2)) {
            prop_assert!((msup_norm_lr(&sv(&x)).unwrap() - brute_lr(&x)).abs() < 1e-12);
        }

        #[test]
        fn lr_is_dominated_by_all(x in signs(60).prop_filter("len>=2", |x| x.len() >= 2)) {
            let v = sv(&x);
            prop_assert!(msup_norm_lr(&v).unwrap() <= msup_norm_all(&v));
        }

        #[test]
        fn restriction_does_not_increase_norm(x in signs(50), a in 0usize..50, b in 0usize..50) {
            let n = x.len();
            let (lo, hi) = (a.min(b) % n, a.max(b) % n);
            let (lo, hi) = (lo.min(hi), lo.max(hi));
            let full = msup_norm_all(&sv(&x));
            let part = msup_norm_all(&sv(&x[lo..=hi]));
            prop_assert!(part <= full);
        }

        #[test]
        fn norms_are_sign_flip_symmetric(x in signs(50).prop_filter("len>=2", |x| x.len() >= 2)) {
            let v = sv(&x);
            let flipped = v.negated();
            prop_assert_eq!(msup_norm_all(&v), msup_norm_all(&flipped));
            prop_assert_eq!(msup_norm_lr(&v).unwrap(), msup_norm_lr(&flipped).unwrap());
        }

        #[test]
        fn norm_bounded_by_root_length(x in signs(50)) {
            let n = x.len();
            let norm = msup_norm_all(&sv(&x));
            let root = (n as f64).sqrt();
            prop_assert!(norm >= 0.0);
            prop_assert!(norm <= root + 1e-12);
            let constant = x.iter().all(|&v| v == 1) || x.iter().all(|&v| v == -1);
            prop_assert_eq!((norm - root).abs() < 1e-12, constant);
        }
    }
}
