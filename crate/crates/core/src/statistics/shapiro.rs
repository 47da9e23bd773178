//! Shapiro-Wilk W via Royston's polynomial approximation to the
//! coefficients (algorithm AS R94), the same approximation R's
//! `shapiro.test` uses.

use crate::error::{Error, Result};
use crate::model::std_normal_quantile;
use crate::scalar::Scalar;

pub const SW_MIN_N: usize = 3;
pub const SW_MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// The `n / 2` positive coefficients, weighting `x_(n+1-i) - x_(i)`.
pub fn sw_coefficients(n: usize) -> Result<Vec<f64>> {
    if !(SW_MIN_N..=SW_MAX_N).contains(&n) {
        return Err(Error::InsufficientSampleSize {
            given: n,
            needed: SW_MIN_N,
        });
    }
    let half = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an25 = n as f64 + 0.25;
    let mut m: Vec<f64> = (1..=half)
        .map(|i| std_normal_quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        m[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    m[0] = a1;
    for v in m.iter_mut().skip(first) {
        *v = -*v / fac;
    }
    Ok(m)
}

/// `1 - W` for sorted `x` given precomputed coefficients.
pub fn sw_with<T: Scalar>(x: &[T], coef: &[f64]) -> Result<T> {
    let n = x.len();
    debug_assert_eq!(coef.len(), n / 2);
    let range = x[n - 1] - x[0];
    if !(range > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let nt = T::of_usize(n);
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / nt;
    let ss = x
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .fold(T::zero(), |a, b| a + b);
    let num = coef
        .iter()
        .enumerate()
        .map(|(i, &a)| T::of(a) * (x[n - 1 - i] - x[i]))
        .fold(T::zero(), |a, b| a + b);
    let w = (num * num / ss).min(T::one());
    Ok(T::one() - w)
}

/// `1 - W` for sorted `x`, `3 <= n <= 5000`.
pub fn sw<T: Scalar>(x: &[T]) -> Result<T> {
    let coef = sw_coefficients(x.len())?;
    sw_with(x, &coef)
}
