//! Null-hypothesis distribution families and the alternatives used in power
//! studies.
//!
//! A [`NullModel`] bundles a family, its current parameters and whether the
//! parameters are re-estimated from each sample. Every family supports the
//! CDF, a sampler and (unless explicitly disabled) a quantile function.

mod alternative;
mod numeric;

pub use alternative::{AltFamily, AlternativeSpec};
pub use numeric::std_normal_quantile;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Exp, Gamma as GammaDist, Normal as NormalDist};
use serde::{Deserialize, Serialize};
use statrs::function::{beta, erf, gamma};

use crate::error::{Error, Result};

/// Upper bound of the rate search for the truncated exponential MLE.
const TRUNC_EXP_RATE_MAX: f64 = 1e3;
const TRUNC_EXP_RATE_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `[mean, sd]`
    Normal,
    /// `[lower, upper]`
    Uniform,
    /// `[rate]`
    Exponential,
    /// `[rate, lower, upper]`; only the rate is estimated.
    TruncatedExponential,
    /// `[a, b]`; estimation fixes `a = 1` and fits `b`.
    Beta,
    /// `[shape, rate]`
    Gamma,
    /// `[shape, rate]` with integer shape; fitted by the method of moments.
    Erlang,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Normal,
        Family::Uniform,
        Family::Exponential,
        Family::TruncatedExponential,
        Family::Beta,
        Family::Gamma,
        Family::Erlang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Uniform => "uniform",
            Family::Exponential => "exponential",
            Family::TruncatedExponential => "truncated_exponential",
            Family::Beta => "beta",
            Family::Gamma => "gamma",
            Family::Erlang => "erlang",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Family::Exponential => 1,
            Family::TruncatedExponential => 3,
            _ => 2,
        }
    }

    /// Number of parameters fitted when estimation is on; `None` when the
    /// family has no estimator.
    pub fn estimated_count(self) -> Option<usize> {
        match self {
            Family::Normal | Family::Erlang => Some(2),
            Family::Exponential | Family::TruncatedExponential | Family::Beta => Some(1),
            Family::Uniform | Family::Gamma => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('-', "_");
        match lower.as_str() {
            "normal" | "norm" | "gaussian" => Ok(Family::Normal),
            "uniform" | "unif" => Ok(Family::Uniform),
            "exponential" | "exp" => Ok(Family::Exponential),
            "truncated_exponential" | "truncexp" | "trunc_exp" => Ok(Family::TruncatedExponential),
            "beta" => Ok(Family::Beta),
            "gamma" => Ok(Family::Gamma),
            "erlang" => Ok(Family::Erlang),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// The null hypothesis: a family, its parameters and an estimation flag.
///
/// Values are immutable; estimation returns a new model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    family: Family,
    params: Vec<f64>,
    estimate: bool,
    #[serde(default = "default_true")]
    quantile_enabled: bool,
}

fn default_true() -> bool {
    true
}

fn invalid(family: Family, reason: impl Into<String>) -> Error {
    Error::InvalidParams {
        family: family.name().to_string(),
        reason: reason.into(),
    }
}

fn validate(family: Family, p: &[f64]) -> Result<()> {
    if p.len() != family.arity() {
        return Err(invalid(
            family,
            format!("expected {} parameters, got {}", family.arity(), p.len()),
        ));
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(invalid(family, "parameters must be finite"));
    }
    let ok = match family {
        Family::Normal => p[1] > 0.0,
        Family::Uniform => p[0] < p[1],
        Family::Exponential => p[0] > 0.0,
        Family::TruncatedExponential => p[0] > 0.0 && p[1] < p[2],
        Family::Beta => p[0] > 0.0 && p[1] > 0.0,
        Family::Gamma => p[0] > 0.0 && p[1] > 0.0,
        Family::Erlang => p[0] >= 1.0 && p[0].fract() == 0.0 && p[1] > 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(family, format!("out of range: {p:?}")))
    }
}

impl NullModel {
    pub fn new(family: Family, params: Vec<f64>, estimate: bool) -> Result<Self> {
        validate(family, &params)?;
        if estimate {
            if family.estimated_count().is_none() {
                return Err(invalid(family, "family has no parameter estimator"));
            }
            if family == Family::Beta && params[0] != 1.0 {
                return Err(invalid(
                    family,
                    "estimation fits Beta(1, b); first shape must be 1",
                ));
            }
        }
        Ok(NullModel {
            family,
            params,
            estimate,
            quantile_enabled: true,
        })
    }

    /// Parse a family name and build the model.
    pub fn from_name(family: &str, params: Vec<f64>, estimate: bool) -> Result<Self> {
        Self::new(family.parse()?, params, estimate)
    }

    /// Same model with the quantile function switched off, as if the caller
    /// could only supply a CDF and a sampler.
    pub fn without_quantile(mut self) -> Self {
        self.quantile_enabled = false;
        self
    }

    /// Same model and flags with different parameters.
    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        validate(self.family, &params)?;
        Ok(NullModel {
            params,
            ..self.clone()
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn estimates_params(&self) -> bool {
        self.estimate
    }

    pub fn has_quantile(&self) -> bool {
        self.quantile_enabled
    }

    /// Number of parameters estimated from the data (0 when fixed).
    pub fn n_estimated(&self) -> usize {
        if self.estimate {
            self.family.estimated_count().unwrap_or(0)
        } else {
            0
        }
    }

    pub fn support(&self) -> (f64, f64) {
        let p = &self.params;
        match self.family {
            Family::Normal => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Uniform => (p[0], p[1]),
            Family::Exponential | Family::Gamma | Family::Erlang => (0.0, f64::INFINITY),
            Family::TruncatedExponential => (p[1], p[2]),
            Family::Beta => (0.0, 1.0),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let p = &self.params;
        if x.is_nan() {
            return f64::NAN;
        }
        match self.family {
            Family::Normal => 0.5 * erf::erfc(-(x - p[0]) / (p[1] * std::f64::consts::SQRT_2)),
            Family::Uniform => ((x - p[0]) / (p[1] - p[0])).clamp(0.0, 1.0),
            Family::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-p[0] * x).exp_m1()
                }
            }
            Family::TruncatedExponential => {
                let (rate, lo, hi) = (p[0], p[1], p[2]);
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (-rate * (x - lo)).exp_m1() / (-rate * (hi - lo)).exp_m1()
                }
            }
            Family::Beta => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else if p[0] == 1.0 {
                    -(p[1] * (-x).ln_1p()).exp_m1()
                } else {
                    beta::beta_reg(p[0], p[1], x)
                }
            }
            Family::Gamma | Family::Erlang => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma::gamma_lr(p[0], p[1] * x)
                }
            }
        }
    }

    /// Density, used by the quantile refinement.
    pub fn pdf(&self, x: f64) -> f64 {
        let p = &self.params;
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        match self.family {
            Family::Normal => {
                let z = (x - p[0]) / p[1];
                (-0.5 * z * z).exp() / (p[1] * (2.0 * std::f64::consts::PI).sqrt())
            }
            Family::Uniform => 1.0 / (p[1] - p[0]),
            Family::Exponential => p[0] * (-p[0] * x).exp(),
            Family::TruncatedExponential => {
                let (rate, lo, hi) = (p[0], p[1], p[2]);
                rate * (-rate * (x - lo)).exp() / -(-rate * (hi - lo)).exp_m1()
            }
            Family::Beta => {
                if x <= 0.0 || x >= 1.0 {
                    return 0.0;
                }
                ((p[0] - 1.0) * x.ln() + (p[1] - 1.0) * (-x).ln_1p() - beta::ln_beta(p[0], p[1]))
                    .exp()
            }
            Family::Gamma | Family::Erlang => {
                if x <= 0.0 {
                    return 0.0;
                }
                ((p[0] - 1.0) * x.ln() - p[1] * x + p[0] * p[1].ln() - gamma::ln_gamma(p[0])).exp()
            }
        }
    }

    /// Quantile function, `None` when disabled via [`Self::without_quantile`].
    pub fn quantile(&self, prob: f64) -> Option<f64> {
        if !self.quantile_enabled {
            return None;
        }
        Some(self.quantile_unchecked(prob))
    }

    pub(crate) fn quantile_unchecked(&self, prob: f64) -> f64 {
        let p = &self.params;
        if prob.is_nan() {
            return f64::NAN;
        }
        let (lo, hi) = self.support();
        if prob <= 0.0 {
            return lo;
        }
        if prob >= 1.0 {
            return hi;
        }
        match self.family {
            Family::Normal => p[0] + p[1] * numeric::std_normal_quantile(prob),
            Family::Uniform => p[0] + (p[1] - p[0]) * prob,
            Family::Exponential => -(-prob).ln_1p() / p[0],
            Family::TruncatedExponential => {
                let (rate, lo, hi) = (p[0], p[1], p[2]);
                lo - (prob * (-rate * (hi - lo)).exp_m1()).ln_1p() / rate
            }
            Family::Beta if p[0] == 1.0 => -((-prob).ln_1p() / p[1]).exp_m1(),
            Family::Beta => {
                let start = beta::inv_beta_reg(p[0], p[1], prob);
                numeric::refine_quantile(self, prob, start, 0.0, 1.0)
            }
            Family::Gamma | Family::Erlang => numeric::gamma_quantile(self, prob),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let p = &self.params;
        match self.family {
            Family::Normal => {
                let d = NormalDist::new(p[0], p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Family::Uniform => (0..n)
                .map(|_| p[0] + (p[1] - p[0]) * rng.random::<f64>())
                .collect(),
            Family::Exponential => {
                let d = Exp::new(p[0]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Family::TruncatedExponential => (0..n)
                .map(|_| self.quantile_unchecked(rng.random::<f64>()))
                .collect(),
            Family::Beta => {
                let d = BetaDist::new(p[0], p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Family::Gamma | Family::Erlang => {
                let d = GammaDist::new(p[0], 1.0 / p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }

    /// Fit the family's parameters to `data`.
    pub fn estimate(&self, data: &[f64]) -> Result<Vec<f64>> {
        if !self.estimate {
            return Err(Error::InvalidConfig(
                "estimation requested on a model with fixed parameters".into(),
            ));
        }
        if data.len() < 2 {
            return Err(Error::InsufficientSampleSize {
                given: data.len(),
                needed: 2,
            });
        }
        let failed = |why: &str| Error::EstimationFailed(format!("{}: {why}", self.family));
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(failed("all observations are equal"));
        }
        let out = match self.family {
            Family::Normal => vec![mean, var.sqrt()],
            Family::Exponential => {
                if mean <= 0.0 {
                    return Err(failed("nonpositive mean"));
                }
                vec![1.0 / mean]
            }
            Family::Beta => {
                let mut s = 0.0;
                for &x in data {
                    if !(x > 0.0 && x < 1.0) {
                        return Err(failed("observation outside (0, 1)"));
                    }
                    s += (-x).ln_1p();
                }
                vec![1.0, -n / s]
            }
            Family::TruncatedExponential => {
                let (lo, hi) = (self.params[1], self.params[2]);
                if data.iter().any(|&x| x < lo || x > hi) {
                    return Err(failed("observation outside truncation range"));
                }
                vec![truncated_exp_mle(data, lo, hi), lo, hi]
            }
            Family::Erlang => {
                let shape = (mean * mean / var).round().max(1.0);
                if mean <= 0.0 {
                    return Err(failed("nonpositive mean"));
                }
                vec![shape, shape / mean]
            }
            Family::Uniform | Family::Gamma => return Err(failed("no estimator")),
        };
        if out.iter().any(|v| !v.is_finite()) {
            return Err(failed("non-finite estimate"));
        }
        Ok(out)
    }

    /// The model to test `data` against: re-estimated when estimation is on,
    /// otherwise unchanged.
    pub fn fit(&self, data: &[f64]) -> Result<NullModel> {
        if self.estimate {
            let params = self.estimate(data)?;
            self.with_params(params)
                .map_err(|e| Error::EstimationFailed(e.to_string()))
        } else {
            Ok(self.clone())
        }
    }

    /// Shape parameters the Q-Q correlation depends on, after removing any
    /// location and scale. `None` means the quantiles have a cheap closed
    /// form and are not worth caching.
    pub(crate) fn correlation_shape(&self) -> Option<Vec<f64>> {
        match self.family {
            Family::Normal | Family::Uniform | Family::Exponential => Some(Vec::new()),
            Family::Gamma | Family::Erlang => Some(vec![self.params[0]]),
            Family::Beta if self.params[0] == 1.0 => None,
            Family::Beta => Some(self.params.clone()),
            Family::TruncatedExponential => None,
        }
    }

    /// Model with the same correlation shape but standard location/scale.
    pub(crate) fn correlation_canonical(&self) -> NullModel {
        let params = match self.family {
            Family::Normal => vec![0.0, 1.0],
            Family::Uniform => vec![0.0, 1.0],
            Family::Exponential => vec![1.0],
            Family::Gamma | Family::Erlang => vec![self.params[0], 1.0],
            _ => self.params.clone(),
        };
        NullModel {
            params,
            ..self.clone()
        }
    }
}

/// Maximize the truncated exponential log-likelihood over the rate with a
/// golden-section search on `[1e-6, 1e3]`.
fn truncated_exp_mle(data: &[f64], lo: f64, hi: f64) -> f64 {
    let n = data.len() as f64;
    let s: f64 = data.iter().map(|x| x - lo).sum();
    let w = hi - lo;
    let loglik = |rate: f64| n * rate.ln() - rate * s - n * (-(-rate * w).exp_m1()).ln();
    // search in log-rate; the bracket spans nine decades
    let neg = |t: f64| -loglik(t.exp());
    let t =
        numeric::golden_section_min(neg, TRUNC_EXP_RATE_MIN.ln(), TRUNC_EXP_RATE_MAX.ln(), 1e-9);
    t.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn ks_distance_uniform(mut u: Vec<f64>) -> f64 {
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = u.len() as f64;
        u.iter()
            .enumerate()
            .map(|(i, &v)| ((i as f64 + 1.0) / n - v).max(v - i as f64 / n))
            .fold(0.0, f64::max)
    }

    fn all_models() -> Vec<NullModel> {
        vec![
            NullModel::new(Family::Normal, vec![1.5, 2.0], false).unwrap(),
            NullModel::new(Family::Uniform, vec![-1.0, 3.0], false).unwrap(),
            NullModel::new(Family::Exponential, vec![2.0], false).unwrap(),
            NullModel::new(Family::TruncatedExponential, vec![0.5, 0.0, 1.0], false).unwrap(),
            NullModel::new(Family::Beta, vec![2.0, 2.0], false).unwrap(),
            NullModel::new(Family::Beta, vec![1.0, 1.7], false).unwrap(),
            NullModel::new(Family::Gamma, vec![2.5, 1.0], false).unwrap(),
            NullModel::new(Family::Gamma, vec![0.7, 3.0], false).unwrap(),
            NullModel::new(Family::Erlang, vec![3.0, 5.0], false).unwrap(),
        ]
    }

    #[test]
    fn trivial_cdf_values() {
        let u = NullModel::new(Family::Uniform, vec![0.0, 1.0], false).unwrap();
        for x in [0.0, 0.1, 0.37, 1.0] {
            assert_eq!(u.cdf(x), x);
        }
        let z = NullModel::new(Family::Normal, vec![0.0, 1.0], false).unwrap();
        assert_eq!(z.cdf(0.0), 0.5);
        let e = NullModel::new(Family::Exponential, vec![2.0], false).unwrap();
        let q = e.quantile(1.0 - (-2.0f64).exp()).unwrap();
        assert!((q - 1.0).abs() < 1e-12, "{q}");
    }

    #[test]
    fn rejects_bad_params() {
        assert!(NullModel::new(Family::Normal, vec![0.0, 0.0], false).is_err());
        assert!(NullModel::new(Family::Normal, vec![0.0], false).is_err());
        assert!(NullModel::new(Family::Exponential, vec![-1.0], false).is_err());
        assert!(NullModel::new(Family::Beta, vec![0.0, 1.0], false).is_err());
        assert!(NullModel::new(Family::Erlang, vec![2.5, 1.0], false).is_err());
        assert!(NullModel::new(Family::Gamma, vec![2.0, 1.0], true).is_err());
        assert!(NullModel::new(Family::Beta, vec![2.0, 1.0], true).is_err());
        assert!(matches!(
            "weibull".parse::<Family>(),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn quantile_inverts_cdf() {
        for m in all_models() {
            for i in 1..=99 {
                let p = 0.001 + (0.998) * i as f64 / 100.0;
                let q = m.quantile(p).unwrap();
                assert!(
                    (m.cdf(q) - p).abs() < 1e-9,
                    "{:?} p={p} cdf(q)={}",
                    m,
                    m.cdf(q)
                );
            }
        }
    }

    #[test]
    fn quantile_of_cdf_is_identity_on_grid() {
        for m in all_models() {
            for i in 1..=99 {
                let x = m.quantile(i as f64 / 100.0).unwrap();
                let back = m.quantile(m.cdf(x)).unwrap();
                assert!(
                    (back - x).abs() <= 1e-8 * (1.0 + x.abs()),
                    "{m:?} x={x} back={back}"
                );
            }
        }
    }

    #[test]
    fn probability_integral_transform_is_uniform() {
        let n = 10_000;
        for (k, m) in all_models().into_iter().enumerate() {
            let mut s = rng::stream(11, &[k as u64]);
            let u: Vec<f64> = m.sample(n, &mut s).iter().map(|&x| m.cdf(x)).collect();
            let d = ks_distance_uniform(u);
            assert!(d < 1.63 / (n as f64).sqrt(), "{m:?}: D={d}");
        }
    }

    #[test]
    fn cdf_is_monotone() {
        for m in all_models() {
            let (lo, hi) = (m.quantile(1e-4).unwrap(), m.quantile(1.0 - 1e-4).unwrap());
            let mut prev = -1.0;
            for i in 0..=500 {
                let x = lo + (hi - lo) * i as f64 / 500.0;
                let c = m.cdf(x);
                assert!(c >= prev && (0.0..=1.0).contains(&c));
                prev = c;
            }
        }
    }

    #[test]
    fn normal_mle_uses_biased_variance() {
        let m = NullModel::new(Family::Normal, vec![0.0, 1.0], true).unwrap();
        let p = m.estimate(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[1] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exponential_mle_and_errors() {
        let m = NullModel::new(Family::Exponential, vec![1.0], true).unwrap();
        assert_eq!(m.estimate(&[1.0, 3.0, 2.0]).unwrap(), vec![0.5]);
        assert!(matches!(
            m.estimate(&[2.0, 2.0]),
            Err(Error::EstimationFailed(_))
        ));
        let b = NullModel::new(Family::Beta, vec![1.0, 1.0], true).unwrap();
        assert!(matches!(
            b.estimate(&[0.5]),
            Err(Error::InsufficientSampleSize {
                given: 1,
                needed: 2
            })
        ));
        let fixed = NullModel::new(Family::Normal, vec![0.0, 1.0], false).unwrap();
        assert!(fixed.estimate(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn estimators_are_consistent() {
        let n = 10_000;
        let cases: Vec<(NullModel, Vec<f64>, Vec<f64>)> = vec![
            // (model, truth, standard errors)
            (
                NullModel::new(Family::Normal, vec![2.0, 3.0], true).unwrap(),
                vec![2.0, 3.0],
                vec![3.0 / 100.0, 3.0 / (2.0f64 * n as f64).sqrt()],
            ),
            (
                NullModel::new(Family::Exponential, vec![0.5], true).unwrap(),
                vec![0.5],
                vec![0.5 / 100.0],
            ),
            (
                NullModel::new(Family::Beta, vec![1.0, 2.5], true).unwrap(),
                vec![1.0, 2.5],
                vec![0.0, 2.5 / 100.0],
            ),
            (
                NullModel::new(Family::TruncatedExponential, vec![2.0, 0.0, 1.0], true).unwrap(),
                vec![2.0, 0.0, 1.0],
                vec![0.05, 0.0, 0.0],
            ),
        ];
        for (k, (m, truth, se)) in cases.into_iter().enumerate() {
            let data = m.sample(n, &mut rng::stream(5, &[k as u64]));
            let est = m.estimate(&data).unwrap();
            for j in 0..truth.len() {
                assert!(
                    (est[j] - truth[j]).abs() <= 3.0 * se[j] + 1e-12,
                    "{m:?}: est {est:?}"
                );
            }
        }
        let erl = NullModel::new(Family::Erlang, vec![4.0, 2.0], true).unwrap();
        let data = erl.sample(n, &mut rng::stream(5, &[99]));
        let est = erl.estimate(&data).unwrap();
        assert_eq!(est[0], 4.0);
        assert!((est[1] - 2.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn truncated_exp_mle_hits_stationary_point() {
        let data = [0.1, 0.2, 0.3, 0.5, 0.05];
        let r = truncated_exp_mle(&data, 0.0, 1.0);
        // d/dλ loglik = n/λ - Σx - n e^{-λ}/(1-e^{-λ}) = 0
        let n = 5.0;
        let s: f64 = data.iter().sum();
        let grad = n / r - s - n * (-r).exp() / (1.0 - (-r).exp());
        assert!(grad.abs() < 1e-6, "rate {r} grad {grad}");
    }
}
