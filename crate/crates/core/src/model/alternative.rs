use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp, Gamma, Poisson, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::erf;

use super::numeric::{invert_monotone, std_normal_quantile};
use crate::error::{Error, Result};

/// Default mixture weight of the normal bump in [`AltFamily::ExpNormalBump`].
pub const DEFAULT_BUMP_WEIGHT: f64 = 0.1;
/// Location of the normal bump.
pub const BUMP_MEAN: f64 = 1.5;

/// Families the power studies draw their data from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltFamily {
    /// `[df]`
    StudentT,
    /// `[a, b]`
    Beta,
    /// `[a, b, ncp]`
    NoncentralBeta,
    /// `[shape, rate]`
    Gamma,
    /// `[slope]`, density `2 s x + 1 - s` on `[0, 1]`
    Linear,
    /// `[a]`, density `3 a (x - 0.5)^2 + 1 - a / 4` on `[0, 1]`
    Quadratic,
    /// `[sigma]` or `[sigma, bump_weight]`: Exponential(1) mixed with a
    /// Normal(1.5, sigma) truncated to `x > 0`.
    ExpNormalBump,
    /// `[a]`, density `a / (1 + x)^(a + 1)` on `x > 0`
    InversePower,
    /// `[rate, lower, upper]`
    TruncatedExponential,
    /// `[mean, sd]`; lets a sweep include the null itself.
    Normal,
    /// `[lower, upper]`
    Uniform,
    /// `[rate]`
    Exponential,
}

impl AltFamily {
    pub fn name(self) -> &'static str {
        match self {
            AltFamily::StudentT => "t",
            AltFamily::Beta => "beta",
            AltFamily::NoncentralBeta => "noncentral_beta",
            AltFamily::Gamma => "gamma",
            AltFamily::Linear => "linear",
            AltFamily::Quadratic => "quadratic",
            AltFamily::ExpNormalBump => "exp_normal_bump",
            AltFamily::InversePower => "inverse_power",
            AltFamily::TruncatedExponential => "truncated_exponential",
            AltFamily::Normal => "normal",
            AltFamily::Uniform => "uniform",
            AltFamily::Exponential => "exponential",
        }
    }
}

impl fmt::Display for AltFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AltFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match lower.as_str() {
            "t" | "student_t" | "studentt" => AltFamily::StudentT,
            "beta" => AltFamily::Beta,
            "noncentral_beta" | "ncbeta" => AltFamily::NoncentralBeta,
            "gamma" => AltFamily::Gamma,
            "linear" => AltFamily::Linear,
            "quadratic" => AltFamily::Quadratic,
            "exp_normal_bump" | "bump" => AltFamily::ExpNormalBump,
            "inverse_power" | "inverse" => AltFamily::InversePower,
            "truncated_exponential" | "truncexp" => AltFamily::TruncatedExponential,
            "normal" => AltFamily::Normal,
            "uniform" => AltFamily::Uniform,
            "exponential" | "exp" => AltFamily::Exponential,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        })
    }
}

/// A validated alternative distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlternative", into = "RawAlternative")]
pub struct AlternativeSpec {
    family: AltFamily,
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawAlternative {
    family: AltFamily,
    params: Vec<f64>,
}

impl TryFrom<RawAlternative> for AlternativeSpec {
    type Error = Error;
    fn try_from(r: RawAlternative) -> Result<Self> {
        AlternativeSpec::new(r.family, r.params)
    }
}

impl From<AlternativeSpec> for RawAlternative {
    fn from(a: AlternativeSpec) -> Self {
        RawAlternative {
            family: a.family,
            params: a.params,
        }
    }
}

impl AlternativeSpec {
    pub fn new(family: AltFamily, params: Vec<f64>) -> Result<Self> {
        let bad = |why: String| Error::InvalidParams {
            family: family.name().to_string(),
            reason: why,
        };
        let arity_ok = match family {
            AltFamily::StudentT
            | AltFamily::Linear
            | AltFamily::Quadratic
            | AltFamily::InversePower
            | AltFamily::Exponential => params.len() == 1,
            AltFamily::ExpNormalBump => params.len() == 1 || params.len() == 2,
            AltFamily::Beta | AltFamily::Gamma | AltFamily::Normal | AltFamily::Uniform => {
                params.len() == 2
            }
            AltFamily::NoncentralBeta | AltFamily::TruncatedExponential => params.len() == 3,
        };
        if !arity_ok {
            return Err(bad(format!("wrong number of parameters: {params:?}")));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(bad("parameters must be finite".into()));
        }
        let p = &params;
        let ok = match family {
            AltFamily::StudentT => p[0] > 0.0,
            AltFamily::Beta | AltFamily::Gamma => p[0] > 0.0 && p[1] > 0.0,
            AltFamily::NoncentralBeta => p[0] > 0.0 && p[1] > 0.0 && p[2] >= 0.0,
            AltFamily::Linear => p[0].abs() <= 1.0,
            AltFamily::Quadratic => (-2.0..=4.0).contains(&p[0]),
            AltFamily::ExpNormalBump => {
                p[0] > 0.0 && p.get(1).is_none_or(|w| (0.0..=1.0).contains(w))
            }
            AltFamily::InversePower => p[0] > 0.0,
            AltFamily::TruncatedExponential => p[0] > 0.0 && p[1] < p[2],
            AltFamily::Normal => p[1] > 0.0,
            AltFamily::Uniform => p[0] < p[1],
            AltFamily::Exponential => p[0] > 0.0,
        };
        if !ok {
            return Err(bad(format!("out of range: {params:?}")));
        }
        Ok(AlternativeSpec { family, params })
    }

    pub fn family(&self) -> AltFamily {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Copy with parameter `index` replaced, as used by parameter sweeps.
    pub fn with_param(&self, index: usize, value: f64) -> Result<Self> {
        let mut params = self.params.clone();
        if index >= params.len() {
            return Err(Error::InvalidConfig(format!(
                "{} has no parameter index {index}",
                self.family
            )));
        }
        params[index] = value;
        AlternativeSpec::new(self.family, params)
    }

    /// CDF for the families with a closed form; used by tests and by the
    /// inverse-CDF samplers.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        let p = &self.params;
        let unit = |v: f64| v.clamp(0.0, 1.0);
        Some(match self.family {
            AltFamily::Linear => {
                let x = unit(x);
                p[0] * x * x + (1.0 - p[0]) * x
            }
            AltFamily::Quadratic => {
                let x = unit(x);
                p[0] * ((x - 0.5).powi(3) + 0.125) + (1.0 - p[0] / 4.0) * x
            }
            AltFamily::InversePower => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-p[0] * x.ln_1p()).exp_m1()
                }
            }
            AltFamily::Uniform => ((x - p[0]) / (p[1] - p[0])).clamp(0.0, 1.0),
            AltFamily::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-p[0] * x).exp_m1()
                }
            }
            _ => return None,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let p = &self.params;
        match self.family {
            AltFamily::StudentT => {
                let d = StudentT::new(p[0]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            AltFamily::Beta => {
                let d = Beta::new(p[0], p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            AltFamily::NoncentralBeta => (0..n)
                .map(|_| noncentral_beta(p[0], p[1], p[2], rng))
                .collect(),
            AltFamily::Gamma => {
                let d = Gamma::new(p[0], 1.0 / p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            AltFamily::Linear => {
                let s = p[0];
                (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        // root of s x^2 + (1 - s) x = u, written without cancellation
                        2.0 * u / ((1.0 - s) + ((1.0 - s).powi(2) + 4.0 * s * u).sqrt())
                    })
                    .collect()
            }
            AltFamily::Quadratic => {
                let a = p[0];
                let f = |x: f64| a * ((x - 0.5).powi(3) + 0.125) + (1.0 - a / 4.0) * x;
                let df = |x: f64| 3.0 * a * (x - 0.5).powi(2) + 1.0 - a / 4.0;
                (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        invert_monotone(f, df, u, u, 0.0, 1.0)
                    })
                    .collect()
            }
            AltFamily::ExpNormalBump => {
                let sigma = p[0];
                let weight = p.get(1).copied().unwrap_or(DEFAULT_BUMP_WEIGHT);
                let exp = Exp::new(1.0).expect("rate 1");
                // truncated to x > 0 by inverse CDF on [Phi(-mean/sigma), 1)
                let lower = 0.5 * erf::erfc(BUMP_MEAN / (sigma * std::f64::consts::SQRT_2));
                (0..n)
                    .map(|_| {
                        if rng.random::<f64>() < weight {
                            let u: f64 = rng.random();
                            let v = lower + (1.0 - lower) * u;
                            (BUMP_MEAN + sigma * std_normal_quantile(v)).max(f64::MIN_POSITIVE)
                        } else {
                            exp.sample(rng)
                        }
                    })
                    .collect()
            }
            AltFamily::InversePower => (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    ((-u).ln_1p() * (-1.0 / p[0])).exp_m1()
                })
                .collect(),
            AltFamily::TruncatedExponential => {
                let (rate, lo, hi) = (p[0], p[1], p[2]);
                (0..n)
                    .map(|_| {
                        let u: f64 = rng.random();
                        lo - (u * (-rate * (hi - lo)).exp_m1()).ln_1p() / rate
                    })
                    .collect()
            }
            AltFamily::Normal => {
                let d = rand_distr::Normal::new(p[0], p[1]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            AltFamily::Uniform => (0..n)
                .map(|_| p[0] + (p[1] - p[0]) * rng.random::<f64>())
                .collect(),
            AltFamily::Exponential => {
                let d = Exp::new(p[0]).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }
}

/// `Y / (Y + Z)` with `Y` a noncentral chi-square on `2a` degrees of
/// freedom (a Poisson mixture of central ones) and `Z` central on `2b`.
fn noncentral_beta<R: Rng + ?Sized>(a: f64, b: f64, ncp: f64, rng: &mut R) -> f64 {
    let k = if ncp > 0.0 {
        Poisson::new(ncp / 2.0).expect("positive").sample(rng)
    } else {
        0.0
    };
    let y = Gamma::new(a + k, 1.0).expect("positive").sample(rng);
    let z = Gamma::new(b, 1.0).expect("positive").sample(rng);
    y / (y + z)
}
