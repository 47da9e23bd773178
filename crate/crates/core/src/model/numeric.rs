//! Root finding and quantile helpers shared by the families.

use statrs::function::erf;

use super::NullModel;

pub fn std_normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p)
}

/// Safeguarded Newton iteration for `cdf(x) = p` inside the bracket
/// `[lo, hi]`, starting at `start`.
pub(crate) fn refine_quantile(model: &NullModel, p: f64, start: f64, lo: f64, hi: f64) -> f64 {
    invert_monotone(|x| model.cdf(x), |x| model.pdf(x), p, start, lo, hi)
}

/// Solve `f(x) = target` for nondecreasing `f` on `[lo, hi]` (both finite,
/// `f(lo) <= target <= f(hi)`), using Newton steps that fall back to
/// bisection whenever they leave the bracket.
pub(crate) fn invert_monotone<F, D>(f: F, df: D, target: f64, start: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut x = if start > lo && start < hi && start.is_finite() {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let fx = f(x) - target;
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let next = if d > 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300)
            || hi - lo <= 1e-15 * hi.abs().max(1e-300)
        {
            return next;
        }
        x = next;
    }
    x
}

pub(crate) fn gamma_quantile(model: &NullModel, p: f64) -> f64 {
    let (shape, rate) = (model.params()[0], model.params()[1]);
    // Wilson-Hilferty starting point
    let z = std_normal_quantile(p);
    let c = 1.0 / (9.0 * shape);
    let wh = shape * (1.0 - c + z * c.sqrt()).powi(3) / rate;
    let mut hi = if wh > 0.0 { 2.0 * wh } else { shape / rate };
    while model.cdf(hi) < p {
        hi *= 2.0;
    }
    let start = if wh > 0.0 { wh } else { 0.5 * hi };
    refine_quantile(model, p, start, 0.0, hi)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
