//! The full vector of goodness-of-fit statistics for one sample.
//!
//! Every statistic is oriented so that large values are evidence against
//! the null. When the null model estimates its parameters they are refitted
//! on each sample before the PIT values `y_i = F(x_(i); theta_hat)` are
//! formed; the parametric bootstrap depends on this.

pub mod edf;
pub mod moments;
pub mod shapiro;
pub mod smooth;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::adjust::unbin;
use crate::chisquare::{self, BinningSpec, BinningVariant, DEFAULT_NBINS};
use crate::error::{Error, Result, Stage, StageExt};
use crate::model::{Family, NullModel};
use crate::sample::Sample;
use crate::scalar::Scalar;

/// Identifier of one test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    KS,
    AD,
    CdM,
    W,
    ZA,
    ZK,
    ZC,
    RGd,
    EqualSize,
    EqualProb,
    Ppcc,
    JB,
    SW,
    SNor,
    SUnif,
    SExp,
}

impl MethodId {
    pub const ALL: [MethodId; 16] = [
        MethodId::KS,
        MethodId::AD,
        MethodId::CdM,
        MethodId::W,
        MethodId::ZA,
        MethodId::ZK,
        MethodId::ZC,
        MethodId::RGd,
        MethodId::EqualSize,
        MethodId::EqualProb,
        MethodId::Ppcc,
        MethodId::JB,
        MethodId::SW,
        MethodId::SNor,
        MethodId::SUnif,
        MethodId::SExp,
    ];

    /// The EDF statistics; the default method set.
    pub const EDF: [MethodId; 7] = [
        MethodId::KS,
        MethodId::AD,
        MethodId::CdM,
        MethodId::W,
        MethodId::ZA,
        MethodId::ZK,
        MethodId::ZC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodId::KS => "KS",
            MethodId::AD => "AD",
            MethodId::CdM => "CdM",
            MethodId::W => "W",
            MethodId::ZA => "ZA",
            MethodId::ZK => "ZK",
            MethodId::ZC => "ZC",
            MethodId::RGd => "RGd",
            MethodId::EqualSize => "EqualSize",
            MethodId::EqualProb => "EqualProb",
            MethodId::Ppcc => "ppcc",
            MethodId::JB => "JB",
            MethodId::SW => "SW",
            MethodId::SNor => "sNor",
            MethodId::SUnif => "sUnif",
            MethodId::SExp => "sExp",
        }
    }

    pub fn binning(self) -> Option<BinningVariant> {
        match self {
            MethodId::RGd => Some(BinningVariant::RGd),
            MethodId::EqualSize => Some(BinningVariant::EqualSize),
            MethodId::EqualProb => Some(BinningVariant::EqualProb),
            _ => None,
        }
    }

    /// Why `self` cannot run against `model` at sample size `n`, if it can't.
    pub fn unavailable_reason(self, model: &NullModel, n: usize) -> Option<String> {
        let family = model.family();
        let needs_quantile = matches!(
            self,
            MethodId::Ppcc | MethodId::RGd | MethodId::EqualSize | MethodId::EqualProb
        );
        if needs_quantile && !model.has_quantile() {
            return Some("requires a quantile function".into());
        }
        match self {
            MethodId::SW if family != Family::Normal => Some("normal nulls only".into()),
            MethodId::SW if !(shapiro::SW_MIN_N..=shapiro::SW_MAX_N).contains(&n) => {
                Some(format!("sample size {n} outside 3..=5000"))
            }
            MethodId::SNor if family != Family::Normal => Some("normal nulls only".into()),
            MethodId::SUnif if family != Family::Uniform => Some("uniform nulls only".into()),
            MethodId::SExp if family != Family::Exponential => {
                Some("exponential nulls only".into())
            }
            MethodId::Ppcc if n < 3 => Some("needs at least 3 observations".into()),
            _ => None,
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match key.as_str() {
            "ks" => MethodId::KS,
            "ad" => MethodId::AD,
            "cdm" | "cm" | "cvm" => MethodId::CdM,
            "w" | "watson" => MethodId::W,
            "za" => MethodId::ZA,
            "zk" => MethodId::ZK,
            "zc" => MethodId::ZC,
            "rgd" => MethodId::RGd,
            "equalsize" => MethodId::EqualSize,
            "equalprob" => MethodId::EqualProb,
            "ppcc" => MethodId::Ppcc,
            "jb" => MethodId::JB,
            "sw" => MethodId::SW,
            "snor" => MethodId::SNor,
            "sunif" => MethodId::SUnif,
            "sexp" => MethodId::SExp,
            _ => return Err(Error::UnknownMethod(s.to_string())),
        })
    }
}

impl Serialize for MethodId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MethodId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<MethodId>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

/// Methods that will run, and the ones dropped with the reason.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MethodPlan {
    pub enabled: Vec<MethodId>,
    pub disabled: Vec<(MethodId, String)>,
}

/// Split `requested` into runnable and inapplicable methods. Duplicates are
/// removed; the canonical method order is kept.
pub fn resolve_methods(model: &NullModel, requested: &[MethodId], n: usize) -> MethodPlan {
    let mut wanted: Vec<MethodId> = requested.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut plan = MethodPlan::default();
    for m in wanted {
        match m.unavailable_reason(model, n) {
            None => plan.enabled.push(m),
            Some(r) => plan.disabled.push((m, r)),
        }
    }
    plan
}

/// Named statistic values, one per enabled method, in method order.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVector<T> {
    entries: Vec<(MethodId, T)>,
}

impl<T: Copy> StatVector<T> {
    pub fn new(entries: Vec<(MethodId, T)>) -> Self {
        StatVector { entries }
    }

    pub fn get(&self, m: MethodId) -> Option<T> {
        self.entries.iter().find(|(k, _)| *k == m).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (MethodId, T)> + '_ {
        self.entries.iter().copied()
    }

    pub fn methods(&self) -> Vec<MethodId> {
        self.entries.iter().map(|(m, _)| *m).collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tunables shared by all statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatConfig {
    /// Bin count for EqualSize / EqualProb.
    pub nbins: usize,
    pub smooth_max_order: usize,
}

impl Default for StatConfig {
    fn default() -> Self {
        StatConfig {
            nbins: DEFAULT_NBINS,
            smooth_max_order: smooth::DEFAULT_MAX_ORDER,
        }
    }
}

/// Reusable state for computing many statistic vectors: caches the
/// Shapiro-Wilk coefficients and the standardized Q-Q quantiles per sample
/// size. One workspace per worker thread.
#[derive(Debug, Default)]
pub struct Workspace {
    config: StatConfig,
    sw_coef: HashMap<usize, Arc<Vec<f64>>>,
    qq: HashMap<(usize, Vec<u64>), Arc<Vec<f64>>>,
    y: Vec<f64>,
}

impl Workspace {
    pub fn new(config: StatConfig) -> Self {
        Workspace {
            config,
            ..Default::default()
        }
    }

    pub fn config(&self) -> &StatConfig {
        &self.config
    }

    fn sw_coefficients(&mut self, n: usize) -> Result<Arc<Vec<f64>>> {
        if let Some(c) = self.sw_coef.get(&n) {
            return Ok(c.clone());
        }
        let c = Arc::new(shapiro::sw_coefficients(n)?);
        self.sw_coef.insert(n, c.clone());
        Ok(c)
    }

    /// Model quantiles at the plotting positions, possibly up to an affine
    /// map (which the correlation ignores).
    fn qq_quantiles(&mut self, fitted: &NullModel, n: usize) -> Result<Arc<Vec<f64>>> {
        if !fitted.has_quantile() {
            return Err(Error::InvalidConfig(
                "ppcc requires a quantile function".into(),
            ));
        }
        match fitted.correlation_shape() {
            Some(shape) => {
                let key = (n, shape.iter().map(|v| v.to_bits()).collect());
                if let Some(q) = self.qq.get(&key) {
                    return Ok(q.clone());
                }
                let canon = fitted.correlation_canonical();
                let q: Vec<f64> = moments::ppoints(n)
                    .into_iter()
                    .map(|p| canon.quantile_unchecked(p))
                    .collect();
                let q = Arc::new(q);
                self.qq.insert(key, q.clone());
                Ok(q)
            }
            None => Ok(Arc::new(
                moments::ppoints(n)
                    .into_iter()
                    .map(|p| fitted.quantile_unchecked(p))
                    .collect(),
            )),
        }
    }

    /// Statistics for already sorted raw data.
    pub fn compute_sorted(
        &mut self,
        sorted: &[f64],
        model: &NullModel,
        methods: &[MethodId],
    ) -> Result<StatVector<f64>> {
        if methods.is_empty() {
            return Ok(StatVector::new(Vec::new()));
        }
        let n = sorted.len();
        if n == 0 {
            return Err(Error::InsufficientSampleSize {
                given: 0,
                needed: 1,
            }
            .at(Stage::Statistics));
        }
        let fitted = model.fit(sorted).stage(Stage::Estimation)?;
        let mut y = std::mem::take(&mut self.y);
        y.clear();
        y.extend(sorted.iter().map(|&x| fitted.cdf(x)));
        let out = self.dispatch(sorted, &y, &fitted, methods);
        self.y = y;
        out
    }

    fn dispatch(
        &mut self,
        x: &[f64],
        y: &[f64],
        fitted: &NullModel,
        methods: &[MethodId],
    ) -> Result<StatVector<f64>> {
        let n = x.len();
        let mut entries = Vec::with_capacity(methods.len());
        for &m in methods {
            let v = match m {
                MethodId::KS => edf::ks(y),
                MethodId::AD => edf::ad(y),
                MethodId::CdM => edf::cdm(y),
                MethodId::W => edf::watson(y),
                MethodId::ZA => edf::za(y),
                MethodId::ZK => edf::zk(y),
                MethodId::ZC => edf::zc(y),
                MethodId::RGd | MethodId::EqualSize | MethodId::EqualProb => {
                    let variant = m.binning().expect("binned method");
                    let spec = BinningSpec::for_variant(variant, fitted, self.config.nbins);
                    chisquare::chisq_stat(x, fitted, &spec).stage(Stage::Binning)?
                }
                MethodId::Ppcc => {
                    let q = self.qq_quantiles(fitted, n).stage(Stage::Statistics)?;
                    moments::ppcc(x, &q).stage(Stage::Statistics)?
                }
                MethodId::JB => moments::jb(x).stage(Stage::Statistics)?,
                MethodId::SW => {
                    let c = self.sw_coefficients(n).stage(Stage::Statistics)?;
                    shapiro::sw_with(x, &c).stage(Stage::Statistics)?
                }
                MethodId::SNor | MethodId::SUnif | MethodId::SExp => {
                    smooth::smooth(y, self.config.smooth_max_order)
                }
            };
            if !v.is_finite() {
                return Err(Error::Degenerate(format!("{m} is not finite")).at(Stage::Statistics));
            }
            entries.push((m, v));
        }
        Ok(StatVector::new(entries))
    }

    /// Statistics for a raw or binned sample. Binned samples are spread out
    /// within their bins first.
    pub fn compute(
        &mut self,
        sample: &Sample,
        model: &NullModel,
        methods: &[MethodId],
    ) -> Result<StatVector<f64>> {
        let mut x = match sample {
            Sample::Raw(x) => x.clone(),
            Sample::Binned(h) => unbin(h, model)?,
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite observation".into()).at(Stage::Statistics));
        }
        x.sort_by(f64::total_cmp);
        self.compute_sorted(&x, model, methods)
    }
}

/// One-shot statistic vector; use a [`Workspace`] in loops.
pub fn compute_stat_vector(
    sample: &Sample,
    model: &NullModel,
    methods: &[MethodId],
) -> Result<StatVector<f64>> {
    Workspace::default().compute(sample, model, methods)
}

/// Generic-scalar statistic vector from PIT values and sorted data, for
/// the statistics that need nothing beyond `x` and `y`.
pub fn pit_statistics<T: Scalar>(x: &[T], y: &[T], methods: &[MethodId]) -> Result<StatVector<T>> {
    let mut entries = Vec::with_capacity(methods.len());
    for &m in methods {
        let v = match m {
            MethodId::KS => edf::ks(y),
            MethodId::AD => edf::ad(y),
            MethodId::CdM => edf::cdm(y),
            MethodId::W => edf::watson(y),
            MethodId::ZA => edf::za(y),
            MethodId::ZK => edf::zk(y),
            MethodId::ZC => edf::zc(y),
            MethodId::JB => moments::jb(x)?,
            MethodId::SW => shapiro::sw(x)?,
            MethodId::SNor | MethodId::SUnif | MethodId::SExp => {
                smooth::smooth(y, smooth::DEFAULT_MAX_ORDER)
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "{other} needs the null model; use Workspace::compute"
                )))
            }
        };
        entries.push((m, v));
    }
    Ok(StatVector::new(entries))
}
