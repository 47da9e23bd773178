//! Monte Carlo studies: type I error, power sweeps, summaries across cases
//! and the pairwise-comparison demonstration of the min-p adjustment.

mod anova;
pub mod cases;
mod summary;

pub use anova::{anova_demo, welch_t_test, AnovaDemo};
pub use summary::{summarize, CaseSummary, GapEntry, Summary};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjust::{
    build_adjustment_curve, run_test, simulate_null_table, SampleSize, Simulation, TestConfig,
};
use crate::error::{Error, Result, Stage, StageExt};
use crate::model::{AltFamily, AlternativeSpec, Family, NullModel};
use crate::rng::{self, derive_seed, tag};
use crate::sample::{Histogram, Sample};
use crate::statistics::{resolve_methods, MethodId, StatConfig, Workspace};

/// Label of the combined test in study outputs.
pub const RC_LABEL: &str = "RC";
/// Smallest replication count accepted by the type I error study.
pub const MIN_TYPE1_REPS: usize = 200;
/// Default nominal levels.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.01, 0.05, 0.10];

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() || alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
        return Err(Error::InvalidConfig(format!(
            "alpha levels must be in (0, 1], got {alphas:?}"
        )));
    }
    Ok(())
}

/// One null model and sample size of a type I error study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Cell {
    pub model: NullModel,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Config {
    pub cells: Vec<Type1Cell>,
    pub alphas: Vec<f64>,
    pub b: usize,
    pub reps: usize,
    pub methods: Vec<MethodId>,
    pub seed: u64,
    #[serde(default)]
    pub stat: StatConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Row {
    pub family: Family,
    pub estimated: bool,
    pub n: usize,
    /// Rejection rate at each alpha level.
    pub rates: Vec<f64>,
    /// Adjusted p-value of every replication.
    pub rc_pvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Table {
    pub alphas: Vec<f64>,
    pub rows: Vec<Type1Row>,
}

/// Fraction of `pvalues` at or below `alpha`.
pub fn rejection_rate(pvalues: &[f64], alpha: f64) -> f64 {
    pvalues.iter().filter(|&&p| p <= alpha).count() as f64 / pvalues.len() as f64
}

/// Draw data from each cell's null model and run the full test on it,
/// `reps` times per cell.
pub fn type1_study(config: &Type1Config) -> Result<Type1Table> {
    check_alphas(&config.alphas)?;
    if config.reps < MIN_TYPE1_REPS {
        return Err(Error::InvalidConfig(format!(
            "type I error study needs at least {MIN_TYPE1_REPS} replications, got {}",
            config.reps
        ))
        .at(Stage::Study));
    }
    let mut rows = Vec::with_capacity(config.cells.len());
    for (ci, cell) in config.cells.iter().enumerate() {
        let rc_pvalues = (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let path = [tag::REPLICATE, ci as u64, rep as u64];
                let mut s = rng::stream(config.seed, &[tag::DATA, ci as u64, rep as u64]);
                let x = cell.model.sample(cell.n, &mut s);
                let cfg = TestConfig {
                    b: config.b,
                    lambda: None,
                    seed: derive_seed(config.seed, &path),
                    stat: config.stat,
                    fresh_minp_batch: false,
                };
                run_test(&Sample::Raw(x), &cell.model, &config.methods, &cfg).map(|r| r.rc)
            })
            .collect::<Result<Vec<f64>>>()
            .stage(Stage::Study)?;
        rows.push(Type1Row {
            family: cell.model.family(),
            estimated: cell.model.estimates_params(),
            n: cell.n,
            rates: config
                .alphas
                .iter()
                .map(|&a| rejection_rate(&rc_pvalues, a))
                .collect(),
            rc_pvalues,
        });
    }
    Ok(Type1Table {
        alphas: config.alphas.clone(),
        rows,
    })
}

/// Equal-width binning applied to every data set of a case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataBinning {
    pub lo: f64,
    pub hi: f64,
    pub nbins: usize,
}

impl DataBinning {
    pub fn edges(&self) -> Result<Vec<f64>> {
        if self.nbins == 0 || !(self.lo < self.hi) {
            return Err(Error::InvalidConfig(format!("bad data binning {self:?}")));
        }
        let step = (self.hi - self.lo) / self.nbins as f64;
        Ok((0..=self.nbins)
            .map(|j| {
                if j == self.nbins {
                    self.hi
                } else {
                    self.lo + step * j as f64
                }
            })
            .collect())
    }
}

/// How the null parameters relate to the grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullSchedule {
    /// The null stays as configured.
    #[default]
    Fixed,
    /// A normal null takes the alternative's mean and standard deviation at
    /// each grid point.
    MatchMoments,
}

/// One power sweep: a null model, an alternative with one parameter moved
/// along a grid, and the sampling setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCase {
    pub name: String,
    pub null: NullModel,
    pub alternative: AlternativeSpec,
    /// Alternative parameters the grid value is written into.
    pub grid_params: Vec<usize>,
    pub grid: Vec<f64>,
    pub n: usize,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub binning: Option<DataBinning>,
    #[serde(default)]
    pub null_schedule: NullSchedule,
    /// Requested methods; ones that do not apply to the null are dropped.
    pub methods: Vec<MethodId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub b: usize,
    pub reps: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub stat: StatConfig,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            b: crate::adjust::DEFAULT_B,
            reps: 1000,
            alphas: vec![0.05],
            seed: 0,
            stat: StatConfig::default(),
        }
    }
}

/// Rejection proportions of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    pub case: String,
    /// Method labels: the enabled methods followed by [`RC_LABEL`].
    pub labels: Vec<String>,
    pub disabled: Vec<(MethodId, String)>,
    pub grid: Vec<f64>,
    pub alphas: Vec<f64>,
    /// `power[alpha][grid point][label]`.
    pub power: Vec<Vec<Vec<f64>>>,
    pub reps: usize,
}

impl PowerResult {
    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Power curve of one label at one alpha index.
    pub fn curve(&self, alpha_idx: usize, label: &str) -> Option<Vec<f64>> {
        let j = self.label_index(label)?;
        Some(self.power[alpha_idx].iter().map(|row| row[j]).collect())
    }

    pub fn alpha_index(&self, alpha: f64) -> Option<usize> {
        self.alphas.iter().position(|&a| (a - alpha).abs() < 1e-12)
    }
}

impl PowerCase {
    /// The alternative at grid value `g`.
    pub fn alternative_at(&self, g: f64) -> Result<AlternativeSpec> {
        let mut params = self.alternative.params().to_vec();
        for &i in &self.grid_params {
            let slot = params.get_mut(i).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "{} has no parameter {i}",
                    self.alternative.family()
                ))
            })?;
            *slot = g;
        }
        AlternativeSpec::new(self.alternative.family(), params)
    }
}

fn null_at(case: &PowerCase, alt: &AlternativeSpec) -> Result<NullModel> {
    match case.null_schedule {
        NullSchedule::Fixed => Ok(case.null.clone()),
        NullSchedule::MatchMoments => {
            if case.null.family() != Family::Normal {
                return Err(Error::InvalidConfig(
                    "moment matching needs a normal null".into(),
                ));
            }
            let (mean, var) = alternative_moments(alt)
                .ok_or_else(|| Error::InvalidConfig(format!("no moments for {}", alt.family())))?;
            case.null.with_params(vec![mean, var.sqrt()])
        }
    }
}

/// Mean and variance of the alternatives where they have a closed form.
pub fn alternative_moments(alt: &AlternativeSpec) -> Option<(f64, f64)> {
    let p = alt.params();
    match alt.family() {
        AltFamily::Gamma => Some((p[0] / p[1], p[0] / (p[1] * p[1]))),
        AltFamily::Beta => {
            let s = p[0] + p[1];
            Some((p[0] / s, p[0] * p[1] / (s * s * (s + 1.0))))
        }
        AltFamily::Normal => Some((p[0], p[1] * p[1])),
        AltFamily::Uniform => Some(((p[0] + p[1]) / 2.0, (p[1] - p[0]).powi(2) / 12.0)),
        AltFamily::Exponential => Some((1.0 / p[0], 1.0 / (p[0] * p[0]))),
        AltFamily::StudentT if p[0] > 2.0 => Some((0.0, p[0] / (p[0] - 2.0))),
        _ => None,
    }
}

/// Rejection proportions of every method and of the combined test along
/// the case's grid. The null distribution comes from one table per null
/// model, simulated at the configured parameters; each method rejects on
/// its own p-value, the combined test on the adjusted minimum.
pub fn power_study(case_idx: usize, case: &PowerCase, config: &PowerConfig) -> Result<PowerResult> {
    check_alphas(&config.alphas)?;
    if case.grid.is_empty() {
        return Err(
            Error::InvalidConfig(format!("case {} has an empty grid", case.name)).at(Stage::Study),
        );
    }
    if config.reps == 0 {
        return Err(Error::InvalidConfig("power study needs replications".into()).at(Stage::Study));
    }
    let size = SampleSize::from_parts(case.n, case.lambda);
    size.validate().stage(Stage::Study)?;
    let plan = resolve_methods(&case.null, &case.methods, size.nominal());
    if plan.enabled.is_empty() {
        return Err(Error::InvalidConfig("no applicable methods".into()).at(Stage::Study));
    }
    let methods = &plan.enabled;
    let edges = case.binning.map(|b| b.edges()).transpose()?;

    let mut labels: Vec<String> = methods.iter().map(|m| m.name().to_string()).collect();
    labels.push(RC_LABEL.to_string());
    let nl = labels.len();
    let mut power = vec![vec![vec![0.0; nl]; case.grid.len()]; config.alphas.len()];

    let mut cached: Option<(
        NullModel,
        crate::adjust::NullReference<f64>,
        crate::adjust::AdjustmentCurve<f64>,
    )> = None;
    for (gi, &g) in case.grid.iter().enumerate() {
        let alt = case.alternative_at(g).stage(Stage::Study)?;
        let null = null_at(case, &alt)?;
        if cached.as_ref().is_none_or(|(m, _, _)| *m != null) {
            let table_seed =
                derive_seed(config.seed, &[tag::NULL_TABLE, case_idx as u64, gi as u64]);
            let table = simulate_null_table(&Simulation {
                model: &null,
                methods,
                rows: config.b,
                size,
                binning: edges.as_deref(),
                stat: config.stat,
                seed: table_seed,
                stream_tag: tag::NULL_TABLE,
            })?;
            let curve = build_adjustment_curve(&table).stage(Stage::Adjustment)?;
            cached = Some((null.clone(), table.reference(), curve));
        }
        let (_, reference, curve) = cached.as_ref().expect("table built");

        let pvals: Vec<Vec<f64>> = (0..config.reps)
            .into_par_iter()
            .map_init(
                || Workspace::new(config.stat),
                |ws, rep| -> Result<Vec<f64>> {
                    let path = [tag::REPLICATE, case_idx as u64, gi as u64, rep as u64];
                    let mut s = rng::stream(config.seed, &path);
                    let n = size.draw(&mut s);
                    let x = alt.sample(n, &mut s);
                    let sample = match &edges {
                        Some(e) => Sample::Binned(Histogram::from_data(e.clone(), &x)?),
                        None => Sample::Raw(x),
                    };
                    let observed = ws.compute(&sample, &null, methods)?;
                    let mut p: Vec<f64> = reference
                        .pvalues(&observed)?
                        .into_iter()
                        .map(|(_, p)| p)
                        .collect();
                    let min_p = p.iter().copied().fold(1.0, f64::min);
                    p.push(curve.eval(min_p));
                    Ok(p)
                },
            )
            .filter_map(|r| r.ok())
            .collect();
        if pvals.len() * 100 < config.reps * 99 {
            return Err(Error::TooManyFailures {
                failed: config.reps - pvals.len(),
                rows: config.reps,
                limit: config.reps / 100,
                last: Box::new(Error::EstimationFailed(format!(
                    "{} at grid point {g}",
                    case.name
                ))),
            }
            .at(Stage::Study));
        }
        let done = pvals.len() as f64;
        for (ai, &alpha) in config.alphas.iter().enumerate() {
            for j in 0..nl {
                let hits = pvals.iter().filter(|p| p[j] <= alpha).count();
                power[ai][gi][j] = hits as f64 / done;
            }
        }
    }
    Ok(PowerResult {
        case: case.name.clone(),
        labels,
        disabled: plan.disabled,
        grid: case.grid.clone(),
        alphas: config.alphas.clone(),
        power,
        reps: config.reps,
    })
}
