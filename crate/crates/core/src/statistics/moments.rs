//! Data-space statistics: Jarque-Bera and the probability plot correlation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Jarque-Bera `n/6 (S^2 + (K - 3)^2 / 4)` with biased central moments.
pub fn jb<T: Scalar>(x: &[T]) -> Result<T> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientSampleSize {
            given: n,
            needed: 2,
        });
    }
    let nt = T::of_usize(n);
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / nt;
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
    }
    m2 = m2 / nt;
    m3 = m3 / nt;
    m4 = m4 / nt;
    if !(m2 > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let s = m3 / m2.powf(T::of(1.5));
    let k = m4 / (m2 * m2);
    let k3 = k - T::of(3.0);
    Ok(nt / T::of(6.0) * (s * s + k3 * k3 / T::of(4.0)))
}

/// Plotting positions `(i - a) / (n + 1 - 2a)` with `a = 3/8` for `n <= 10`
/// and `1/2` otherwise.
pub fn ppoints(n: usize) -> Vec<f64> {
    let a = if n <= 10 { 0.375 } else { 0.5 };
    let denom = n as f64 + 1.0 - 2.0 * a;
    (1..=n).map(|i| (i as f64 - a) / denom).collect()
}

/// Pearson correlation; errors when either side has zero variance.
pub fn correlation<T: Scalar>(x: &[T], q: &[T]) -> Result<T> {
    assert_eq!(x.len(), q.len(), "correlation needs equal lengths");
    let n = T::of_usize(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mq = q.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(q) {
        let (dx, dq) = (a - mx, b - mq);
        sxy = sxy + dx * dq;
        sxx = sxx + dx * dx;
        syy = syy + dq * dq;
    }
    if !(sxx > T::zero() && syy > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// `1 - cor(x, q)` where `q` are the model quantiles at the plotting
/// positions. `x` is used in the order given.
pub fn ppcc<T: Scalar>(x: &[T], q: &[T]) -> Result<T> {
    if x.len() < 3 {
        return Err(Error::InsufficientSampleSize {
            given: x.len(),
            needed: 3,
        });
    }
    Ok(T::one() - correlation(x, q)?)
}
