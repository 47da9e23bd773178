//! Direct transcriptions of the statistic formulas, written without the
//! library's kernels, used as an independent reference.

#![allow(dead_code)]

use multigof::model::std_normal_quantile;
use multigof::NullModel;

const EPS: f64 = 1e-12;

fn clamp(y: f64) -> f64 {
    y.clamp(EPS, 1.0 - EPS)
}

pub fn ks(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mut d_plus = f64::NEG_INFINITY;
    let mut d_minus = f64::NEG_INFINITY;
    for (k, &v) in y.iter().enumerate() {
        let i = (k + 1) as f64;
        d_plus = d_plus.max(i / n - v);
        d_minus = d_minus.max(v - (i - 1.0) / n);
    }
    d_plus.max(d_minus)
}

pub fn ad(y: &[f64]) -> f64 {
    let n = y.len();
    let mut s = 0.0;
    for i in 1..=n {
        let a = clamp(y[i - 1]).ln();
        let b = (1.0 - clamp(y[n - i])).ln();
        s += (2 * i - 1) as f64 * (a + b);
    }
    -(n as f64) - s / n as f64
}

pub fn cdm(y: &[f64]) -> f64 {
    let n = y.len();
    let mut s = 1.0 / (12.0 * n as f64);
    for i in 1..=n {
        s += (y[i - 1] - (2 * i - 1) as f64 / (2 * n) as f64).powi(2);
    }
    s
}

pub fn watson(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    cdm(y) - n * (ybar - 0.5).powi(2)
}

pub fn zk(y: &[f64]) -> f64 {
    let n = y.len();
    let nf = n as f64;
    (1..=n)
        .map(|i| {
            let v = clamp(y[i - 1]);
            let a = i as f64 - 0.5;
            let b = nf - i as f64 + 0.5;
            a * (a / (nf * v)).ln() + b * (b / (nf * (1.0 - v))).ln()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn za(y: &[f64]) -> f64 {
    let n = y.len();
    let nf = n as f64;
    let mut s = 0.0;
    for i in 1..=n {
        let v = clamp(y[i - 1]);
        s += v.ln() / (nf - i as f64 + 0.5) + (1.0 - v).ln() / (i as f64 - 0.5);
    }
    -s
}

pub fn zc(y: &[f64]) -> f64 {
    let n = y.len();
    let nf = n as f64;
    let mut s = 0.0;
    for i in 1..=n {
        let v = clamp(y[i - 1]);
        let r = (1.0 / v - 1.0) / ((nf - 0.5) / (i as f64 - 0.75) - 1.0);
        s += r.ln().powi(2);
    }
    s
}

pub fn jb(x: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let m = |k: i32| x.iter().map(|v| (v - mean).powi(k)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    if m2 <= 0.0 {
        return None;
    }
    let skew = m3 / m2.powf(1.5);
    let kurt = m4 / (m2 * m2);
    Some(n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0))
}

fn pearson_correlation(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va <= 0.0 || vb <= 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// `1 - cor(x_(i), Q(p_i))` with R's `ppoints`.
pub fn ppcc(sorted: &[f64], fitted: &NullModel) -> Option<f64> {
    let n = sorted.len();
    let a = if n <= 10 { 3.0 / 8.0 } else { 0.5 };
    let q: Vec<f64> = (1..=n)
        .map(|i| {
            fitted
                .quantile((i as f64 - a) / (n as f64 + 1.0 - 2.0 * a))
                .unwrap()
        })
        .collect();
    pearson_correlation(sorted, &q).map(|r| 1.0 - r)
}

/// Legendre polynomial from its explicit power series.
fn legendre(j: usize, x: f64) -> f64 {
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut s = 0.0;
    for k in 0..=j / 2 {
        let c =
            fact(2 * j - 2 * k) / (2f64.powi(j as i32) * fact(k) * fact(j - k) * fact(j - 2 * k));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * c * x.powi((j - 2 * k) as i32);
    }
    s
}

/// Data-driven smooth statistic with the Schwarz rule over orders 1..=10.
pub fn smooth(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mut best_score = f64::NEG_INFINITY;
    let mut best_t = 0.0;
    let mut t = 0.0;
    for j in 1..=10 {
        let b: f64 = y
            .iter()
            .map(|&u| ((2 * j + 1) as f64).sqrt() * legendre(j, 2.0 * u - 1.0))
            .sum::<f64>()
            / n.sqrt();
        t += b * b;
        let score = t - j as f64 * n.ln();
        if score > best_score {
            best_score = score;
            best_t = t;
        }
    }
    best_t
}

/// `1 - W` with Royston's coefficient approximation written over the full
/// coefficient vector.
pub fn sw(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    if !(3..=5000).contains(&n) {
        return None;
    }
    let mut a = vec![0.0; n];
    if n == 3 {
        a[0] = -(0.5f64).sqrt();
        a[2] = (0.5f64).sqrt();
    } else {
        let m: Vec<f64> = (1..=n)
            .map(|i| std_normal_quantile((i as f64 - 3.0 / 8.0) / (n as f64 + 0.25)))
            .collect();
        let mm: f64 = m.iter().map(|v| v * v).sum();
        let u = 1.0 / (n as f64).sqrt();
        let an = -2.706056 * u.powi(5) + 4.434685 * u.powi(4)
            - 2.07119 * u.powi(3)
            - 0.147981 * u.powi(2)
            + 0.221157 * u
            + m[n - 1] / mm.sqrt();
        if n > 5 {
            let an1 = -3.582633 * u.powi(5) + 5.682633 * u.powi(4)
                - 1.752461 * u.powi(3)
                - 0.293762 * u.powi(2)
                + 0.042981 * u
                + m[n - 2] / mm.sqrt();
            let phi = (mm - 2.0 * m[n - 1].powi(2) - 2.0 * m[n - 2].powi(2))
                / (1.0 - 2.0 * an.powi(2) - 2.0 * an1.powi(2));
            for i in 2..n - 2 {
                a[i] = m[i] / phi.sqrt();
            }
            a[n - 1] = an;
            a[n - 2] = an1;
            a[0] = -an;
            a[1] = -an1;
        } else {
            let phi = (mm - 2.0 * m[n - 1].powi(2)) / (1.0 - 2.0 * an.powi(2));
            for i in 1..n - 1 {
                a[i] = m[i] / phi.sqrt();
            }
            a[n - 1] = an;
            a[0] = -an;
        }
    }
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let ss: f64 = sorted.iter().map(|x| (x - mean).powi(2)).sum();
    if ss <= 0.0 {
        return None;
    }
    let num: f64 = a.iter().zip(sorted).map(|(a, x)| a * x).sum();
    Some(1.0 - (num * num / ss).min(1.0))
}

/// Pearson chi-square with the blended bins, computed edge by edge without
/// the library. Returns `None` when no valid binning exists.
pub fn chisquare(sorted: &[f64], fitted: &NullModel, k: usize, kappa: f64) -> Option<f64> {
    let n = sorted.len();
    let q = |p: f64| fitted.quantile(p).unwrap();
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let mut bins0 = vec![lo];
    for j in 1..k {
        bins0.push(q(j as f64 / k as f64));
    }
    bins0.push(hi);
    let bins1: Vec<f64> = if k == 2 {
        vec![lo, q(0.5), hi]
    } else {
        // the observed range is always finite
        (0..=k)
            .map(|j| {
                if j == k {
                    hi
                } else {
                    lo + (hi - lo) * (j as f64 / k as f64)
                }
            })
            .collect()
    };
    let blended: Vec<f64> = bins0
        .iter()
        .zip(&bins1)
        .map(|(&a, &b)| {
            if a == b {
                a
            } else {
                (1.0 - kappa) * a + kappa * b
            }
        })
        .collect();
    // keep only interior edges that continue a strictly increasing sequence
    let mut bins = vec![blended[0]];
    for &e in &blended[1..k] {
        if e > *bins.last().unwrap() && e < blended[k] {
            bins.push(e);
        }
    }
    bins.push(blended[k]);

    let cdf: Vec<f64> = bins.iter().map(|&b| fitted.cdf(b)).collect();
    let mut e: Vec<f64> = cdf.windows(2).map(|w| n as f64 * (w[1] - w[0])).collect();
    if e.iter().sum::<f64>() <= 5.0 {
        return None;
    }
    while e.len() > 1 && !e.iter().all(|&v| v > 5.0) {
        let nb = e.len();
        let mut k = 0;
        for i in 1..nb {
            if e[i] < e[k] {
                k = i;
            }
        }
        if k == 0 {
            bins.remove(1);
            e[0] += e[1];
            e.remove(1);
        } else if k == nb - 1 {
            bins.remove(nb - 1);
            e[nb - 2] += e[nb - 1];
            e.remove(nb - 1);
        } else if e[k - 1] < e[k + 1] {
            bins.remove(k);
            e[k - 1] += e[k];
            e.remove(k);
        } else {
            bins.remove(k + 1);
            e[k] += e[k + 1];
            e.remove(k + 1);
        }
    }

    let nb = bins.len() - 1;
    let mut edges = bins.clone();
    edges[0] = f64::NEG_INFINITY;
    edges[nb] = f64::INFINITY;
    let mut stat = 0.0;
    for j in 0..nb {
        let (a, b) = (edges[j], edges[j + 1]);
        let observed = sorted.iter().filter(|&&x| x > a && x <= b).count() as f64;
        let expected = n as f64 * (fitted.cdf(b) - fitted.cdf(a));
        if expected <= 0.0 {
            return None;
        }
        stat += (observed - expected).powi(2) / expected;
    }
    Some(stat)
}
