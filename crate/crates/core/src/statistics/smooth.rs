//! Neyman smooth test with Schwarz-rule order selection.
//!
//! Components are `b_j = n^{-1/2} sum_i phi_j(y_i)` for the orthonormal
//! Legendre polynomials `phi_j(u) = sqrt(2j + 1) P_j(2u - 1)` on `[0, 1]`.
//! `T_k = sum_{j<=k} b_j^2` and the chosen order `k*` is the smallest
//! maximizer of `T_k - k log n` over `1..=max_order`.

use crate::scalar::Scalar;

pub const DEFAULT_MAX_ORDER: usize = 10;

/// Write `phi_1(u) ..= phi_d(u)` into `out[0..d]`.
pub fn legendre_orthonormal<T: Scalar>(u: T, out: &mut [T]) {
    let t = T::of(2.0) * u - T::one();
    let (mut p_prev, mut p) = (T::one(), t);
    for (j, slot) in out.iter_mut().enumerate() {
        let deg = j + 1;
        *slot = T::of_usize(2 * deg + 1).sqrt() * p;
        // (k + 1) P_{k+1} = (2k + 1) t P_k - k P_{k-1}
        let k = T::of_usize(deg);
        let next = (T::of_usize(2 * deg + 1) * t * p - k * p_prev) / (k + T::one());
        p_prev = p;
        p = next;
    }
}

/// Result of the order selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothFit<T> {
    pub components: Vec<T>,
    pub order: usize,
    pub statistic: T,
}

pub fn smooth_fit<T: Scalar>(y: &[T], max_order: usize) -> SmoothFit<T> {
    assert!(max_order >= 1, "smooth test needs max_order >= 1");
    let n = y.len();
    let mut sums = vec![T::zero(); max_order];
    let mut phi = vec![T::zero(); max_order];
    for &v in y {
        legendre_orthonormal(v, &mut phi);
        for (s, p) in sums.iter_mut().zip(&phi) {
            *s = *s + *p;
        }
    }
    let root_n = T::of_usize(n).sqrt();
    let components: Vec<T> = sums.into_iter().map(|s| s / root_n).collect();
    let log_n = T::of_usize(n.max(1)).ln();
    let mut t = T::zero();
    let mut best = (1usize, T::neg_infinity(), T::zero());
    for (j, b) in components.iter().enumerate() {
        t = t + *b * *b;
        let k = j + 1;
        let score = t - T::of_usize(k) * log_n;
        if score > best.1 {
            best = (k, score, t);
        }
    }
    SmoothFit {
        components,
        order: best.0,
        statistic: best.2,
    }
}

/// Data-driven smooth statistic `T_{k*}`.
pub fn smooth<T: Scalar>(y: &[T], max_order: usize) -> T {
    smooth_fit(y, max_order).statistic
}
