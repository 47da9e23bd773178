//! Simultaneous testing: simulate the null distribution of all statistics,
//! turn each observed statistic into a p-value, and adjust the smallest
//! p-value with the simulated null distribution of the minimum.

mod binned;
mod curve;
mod table;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use binned::{spread_out, unbin};
pub use curve::{
    build_adjustment_curve, build_adjustment_curve_from_batch, leave_one_out_minima,
    reference_minima, AdjustmentCurve, GRID_POINTS,
};
pub use table::{
    per_method_pvalues, simulate_null_table, NullReference, NullTable, SampleSize, Simulation,
    MIN_ROWS, MIN_SAMPLE,
};

use crate::error::{Error, Result, Stage, StageExt};
use crate::model::{Family, NullModel};
use crate::rng::tag;
use crate::sample::Sample;
use crate::statistics::{resolve_methods, MethodId, StatConfig, Workspace};

/// Default number of simulation rows.
pub const DEFAULT_B: usize = 1000;

/// Settings for one simultaneous test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub b: usize,
    /// Simulate data sets with Poisson(lambda) sizes instead of the
    /// observed size.
    pub lambda: Option<f64>,
    pub seed: u64,
    pub stat: StatConfig,
    /// Build the adjustment curve from a second, independent batch of B
    /// null rows rather than from the table itself.
    pub fresh_minp_batch: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            b: DEFAULT_B,
            lambda: None,
            seed: 0,
            stat: StatConfig::default(),
            fresh_minp_batch: false,
        }
    }
}

/// Null model summary in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub family: Family,
    pub params: Vec<f64>,
    pub estimated: bool,
    /// Parameters the null table was simulated with.
    pub fitted_params: Vec<f64>,
}

/// Result of a simultaneous test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// Adjusted p-value of the combined test.
    pub rc: f64,
    pub pvalues: BTreeMap<String, f64>,
    pub statistics: BTreeMap<String, f64>,
    #[serde(rename = "B")]
    pub b: usize,
    pub seed: u64,
    pub n: usize,
    pub lambda: Option<f64>,
    pub model: ModelSummary,
    pub methods: Vec<MethodId>,
    /// Requested methods that do not apply, with the reason.
    pub disabled: BTreeMap<String, String>,
    pub min_pvalue: f64,
    pub failed_rows: usize,
}

impl TestReport {
    pub fn pvalue(&self, m: MethodId) -> Option<f64> {
        self.pvalues.get(m.name()).copied()
    }
}

/// Everything computed by [`run_test_detailed`].
#[derive(Debug, Clone)]
pub struct TestRun {
    pub report: TestReport,
    pub table: NullTable<f64>,
    pub curve: AdjustmentCurve<f64>,
}

/// Run the simultaneous test of `sample` against `model`.
pub fn run_test(
    sample: &Sample,
    model: &NullModel,
    methods: &[MethodId],
    config: &TestConfig,
) -> Result<TestReport> {
    run_test_detailed(sample, model, methods, config).map(|r| r.report)
}

/// [`run_test`], also returning the null table and the adjustment curve.
pub fn run_test_detailed(
    sample: &Sample,
    model: &NullModel,
    methods: &[MethodId],
    config: &TestConfig,
) -> Result<TestRun> {
    let x = match sample {
        Sample::Raw(x) => x.clone(),
        Sample::Binned(h) => unbin(h, model)?,
    };
    let n = x.len();
    if n < MIN_SAMPLE {
        return Err(Error::InsufficientSampleSize {
            given: n,
            needed: MIN_SAMPLE,
        }
        .at(Stage::Setup));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite observation".into()).at(Stage::Setup));
    }
    let size = SampleSize::from_parts(n, config.lambda);
    let plan = resolve_methods(model, methods, size.nominal());
    if plan.enabled.is_empty() {
        return Err(Error::InvalidConfig("no applicable methods".into()).at(Stage::Setup));
    }

    let fitted = model.fit(&x).stage(Stage::Estimation)?;
    let binning = sample.histogram().map(|h| h.edges());
    let sim = Simulation {
        model: &fitted,
        methods: &plan.enabled,
        rows: config.b,
        size,
        binning,
        stat: config.stat,
        seed: config.seed,
        stream_tag: tag::NULL_TABLE,
    };
    let table = simulate_null_table(&sim)?;
    let curve = if config.fresh_minp_batch {
        let batch = simulate_null_table(&Simulation {
            stream_tag: tag::MINP_BATCH,
            ..sim.clone()
        })?;
        build_adjustment_curve_from_batch(&table, &batch)
    } else {
        build_adjustment_curve(&table)
    }
    .stage(Stage::Adjustment)?;

    let mut ws = Workspace::new(config.stat);
    let mut sorted = x;
    sorted.sort_by(f64::total_cmp);
    let observed = ws.compute_sorted(&sorted, model, &plan.enabled)?;
    let pvals = table
        .reference()
        .pvalues(&observed)
        .stage(Stage::Adjustment)?;
    let min_p = pvals.iter().map(|&(_, p)| p).fold(1.0, f64::min);
    let rc = curve.eval(min_p);

    let report = TestReport {
        rc,
        pvalues: pvals
            .iter()
            .map(|&(m, p)| (m.name().to_string(), p))
            .collect(),
        statistics: observed
            .iter()
            .map(|(m, v)| (m.name().to_string(), v))
            .collect(),
        b: config.b,
        seed: config.seed,
        n,
        lambda: config.lambda,
        model: ModelSummary {
            family: model.family(),
            params: model.params().to_vec(),
            estimated: model.estimates_params(),
            fitted_params: fitted.params().to_vec(),
        },
        methods: plan.enabled.clone(),
        disabled: plan
            .disabled
            .iter()
            .map(|(m, r)| (m.name().to_string(), r.clone()))
            .collect(),
        min_pvalue: min_p,
        failed_rows: table.failures(),
    };
    Ok(TestRun {
        report,
        table,
        curve,
    })
}
