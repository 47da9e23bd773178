//! Random models and data for the randomized checks.

#![allow(dead_code)]

use multigof::{Family, NullModel};
use rand::Rng;

/// A random null model with a quantile function; the estimation flag is
/// random where the family supports it.
pub fn null_model<R: Rng>(rng: &mut R) -> NullModel {
    let family = [
        Family::Normal,
        Family::Uniform,
        Family::Exponential,
        Family::TruncatedExponential,
        Family::Beta,
        Family::Gamma,
        Family::Erlang,
    ][rng.random_range(0..7)];
    let estimate = family.estimated_count().is_some() && rng.random_bool(0.5);
    let params = match family {
        Family::Normal => vec![rng.random_range(-5.0..5.0), rng.random_range(0.1..5.0)],
        Family::Uniform => {
            let a = rng.random_range(-3.0..3.0);
            vec![a, a + rng.random_range(0.1..5.0)]
        }
        Family::Exponential => vec![rng.random_range(0.2..5.0)],
        Family::TruncatedExponential => {
            let l = rng.random_range(-1.0..1.0);
            vec![
                rng.random_range(0.1..3.0),
                l,
                l + rng.random_range(0.5..3.0),
            ]
        }
        Family::Beta if estimate => vec![1.0, rng.random_range(0.5..5.0)],
        Family::Beta => vec![rng.random_range(0.5..5.0), rng.random_range(0.5..5.0)],
        Family::Gamma => vec![rng.random_range(0.5..8.0), rng.random_range(0.2..4.0)],
        Family::Erlang => vec![rng.random_range(1..=8) as f64, rng.random_range(0.2..4.0)],
    };
    NullModel::new(family, params, estimate).expect("valid random model")
}

/// Data from the model's family with parameters jittered by up to 20%.
pub fn data_near<R: Rng>(model: &NullModel, n: usize, rng: &mut R) -> Vec<f64> {
    let jittered: Vec<f64> = model
        .params()
        .iter()
        .map(|&p| {
            if p == 0.0 {
                p
            } else {
                p * rng.random_range(0.8..1.2)
            }
        })
        .collect();
    let source = match model.family() {
        Family::Erlang | Family::Uniform | Family::TruncatedExponential => model.clone(),
        _ => model
            .with_params(jittered)
            .unwrap_or_else(|_| model.clone()),
    };
    source.sample(n, rng)
}

/// Kolmogorov-Smirnov distance of `values` from U[0, 1].
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &p)| ((i + 1) as f64 / n - p).max(p - i as f64 / n))
        .fold(0.0, f64::max)
}
