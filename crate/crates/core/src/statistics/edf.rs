//! Statistics built from the probability integral transform of the sorted
//! sample, `y_i = F(x_(i))`. All of them take `y` sorted ascending.
//!
//! The log-based statistics (AD, ZK, ZA, ZC) clamp `y` into
//! `[eps, 1 - eps]` first, see [`Scalar::log_clamp`].

use crate::scalar::{clamp_unit, Scalar};

/// Kolmogorov-Smirnov distance `max_i max(i/n - y_i, y_i - (i-1)/n)`.
pub fn ks<T: Scalar>(y: &[T]) -> T {
    let n = T::of_usize(y.len());
    y.iter()
        .enumerate()
        .map(|(i, &v)| {
            let i = T::of_usize(i);
            ((i + T::one()) / n - v).max(v - i / n)
        })
        .fold(T::zero(), T::max)
}

/// Anderson-Darling.
pub fn ad<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    let nt = T::of_usize(n);
    let mut s = T::zero();
    for i in 0..n {
        let lo = clamp_unit(y[i]);
        let hi = clamp_unit(y[n - 1 - i]);
        let w = T::of_usize(2 * i + 1);
        s = s + w * (lo.ln() + (T::one() - hi).ln());
    }
    -nt - s / nt
}

/// Cramér-von Mises.
pub fn cdm<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    let two_n = T::of_usize(2 * n);
    let s = y
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let d = T::of_usize(2 * i + 1) / two_n - v;
            d * d
        })
        .fold(T::zero(), |a, b| a + b);
    T::one() / T::of_usize(12 * n) + s
}

/// Watson's U²: Cramér-von Mises minus `n (mean(y) - 1/2)^2`.
pub fn watson<T: Scalar>(y: &[T]) -> T {
    let n = T::of_usize(y.len());
    let mean = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let half = T::of(0.5);
    cdm(y) - n * (mean - half) * (mean - half)
}

/// Zhang's likelihood-ratio statistic Z_K.
pub fn zk<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    let nt = T::of_usize(n);
    let half = T::of(0.5);
    let mut best = T::neg_infinity();
    for (i, &v) in y.iter().enumerate() {
        let v = clamp_unit(v);
        let m = T::of_usize(i + 1) - half;
        let r = nt - m;
        let term = m * (m / (nt * v)).ln() + r * (r / (nt * (T::one() - v))).ln();
        best = best.max(term);
    }
    best
}

/// Zhang's Z_A.
pub fn za<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    let nt = T::of_usize(n);
    let half = T::of(0.5);
    let mut s = T::zero();
    for (i, &v) in y.iter().enumerate() {
        let v = clamp_unit(v);
        let m = T::of_usize(i + 1) - half;
        s = s + v.ln() / (nt - m) + (T::one() - v).ln() / m;
    }
    -s
}

/// Zhang's Z_C, `sum_i log((1/y_i - 1) / ((n - 0.5)/(i - 0.75) - 1))^2`.
pub fn zc<T: Scalar>(y: &[T]) -> T {
    let n = y.len();
    let a = T::of_usize(n) - T::of(0.5);
    let q = T::of(0.75);
    let mut s = T::zero();
    for (i, &v) in y.iter().enumerate() {
        let v = clamp_unit(v);
        let denom = a / (T::of_usize(i + 1) - q) - T::one();
        let l = ((T::one() / v - T::one()) / denom).ln();
        s = s + l * l;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const Y3: [f64; 3] = [0.25, 0.5, 0.75];

    #[test]
    fn ks_hand_values() {
        assert_relative_eq!(ks(&Y3), 0.25, epsilon = 1e-15);
        assert_relative_eq!(ks(&[1.0 / 6.0, 0.5, 5.0 / 6.0]), 1.0 / 6.0, epsilon = 1e-15);
        assert_eq!(ks(&[0.5]), 0.5);
    }

    #[test]
    fn ad_hand_value() {
        // -3 - (2 ln .25 + 6 ln .5 + 10 ln .75) / 3
        let expect = -3.0 - (2.0 * 0.25f64.ln() + 6.0 * 0.5f64.ln() + 10.0 * 0.75f64.ln()) / 3.0;
        assert_relative_eq!(ad(&Y3), expect, max_relative = 1e-14);
        assert_relative_eq!(ad(&Y3), 0.269_430_843_372_420_2, max_relative = 1e-12);
    }

    #[test]
    fn cdm_and_watson_hand_values() {
        assert_relative_eq!(cdm(&Y3), 1.0 / 24.0, max_relative = 1e-14);
        assert_eq!(watson(&Y3), cdm(&Y3));
    }

    #[test]
    fn zhang_hand_values() {
        let expect_za = -(0.25f64.ln() / 2.5
            + 0.75f64.ln() / 0.5
            + 0.5f64.ln() / 1.5
            + 0.5f64.ln() / 1.5
            + 0.75f64.ln() / 0.5
            + 0.25f64.ln() / 2.5);
        assert_relative_eq!(za(&Y3), expect_za, max_relative = 1e-14);
        assert_relative_eq!(za(&Y3), 3.183_960_019_449_63, max_relative = 1e-12);
        assert_relative_eq!(zk(&Y3), 0.060_668_735_090_483_68, max_relative = 1e-10);
        assert_relative_eq!(zc(&Y3), 2.413_897_921_625_163, max_relative = 1e-12);
    }

    #[test]
    fn zc_vanishes_at_its_centre() {
        for n in [1usize, 4, 17, 200] {
            let y: Vec<f64> = (1..=n)
                .map(|i| 1.0 / (1.0 + (n as f64 - 0.5) / (i as f64 - 0.75) - 1.0))
                .collect();
            assert!(zc(&y) < 1e-20, "n={n} zc={}", zc(&y));
        }
    }

    #[test]
    fn f32_kernels_agree_with_f64() {
        let y32: Vec<f32> = Y3.iter().map(|&v| v as f32).collect();
        assert!((ks(&y32) as f64 - ks(&Y3)).abs() < 1e-6);
        assert!((ad(&y32) as f64 - ad(&Y3)).abs() < 1e-5);
        assert!((zc(&y32) as f64 - zc(&Y3)).abs() < 1e-5);
    }

    #[test]
    fn clamping_keeps_values_finite() {
        let y = [0.0f64, 0.3, 1.0];
        for v in [ad(&y), zk(&y), za(&y), zc(&y)] {
            assert!(v.is_finite());
        }
    }

    fn sorted_unit(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..max).prop_map(|mut v| {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        })
    }

    proptest! {
        #[test]
        fn ad_reflection_symmetry(y in sorted_unit(40)) {
            let reflected: Vec<f64> = y.iter().rev().map(|v| 1.0 - v).collect();
            let (a, b) = (ad(&y), ad(&reflected));
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn watson_never_exceeds_cdm(y in sorted_unit(60)) {
            prop_assert!(watson(&y) <= cdm(&y));
        }

        #[test]
        fn zk_nonnegative(y in sorted_unit(60)) {
            prop_assert!(zk(&y) >= -1e-12);
        }

        #[test]
        fn ks_bounded(y in sorted_unit(60)) {
            let d = ks(&y);
            prop_assert!(d > 0.0 && d <= 1.0);
        }
    }
}
