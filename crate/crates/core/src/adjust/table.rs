use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage, StageExt};
use crate::model::NullModel;
use crate::rng::{self, tag};
use crate::sample::Histogram;
use crate::scalar::Scalar;
use crate::statistics::{MethodId, StatConfig, StatVector, Workspace};

use super::binned::unbin;

/// Smallest simulation size accepted.
pub const MIN_ROWS: usize = 100;
/// Smallest sample size a simulated row may have.
pub const MIN_SAMPLE: usize = 3;
const MAX_ATTEMPTS_PER_ROW: u64 = 20;

/// Sample size of simulated data sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSize {
    Fixed(usize),
    /// Drawn per data set from Poisson(lambda).
    Poisson(f64),
}

impl SampleSize {
    pub fn from_parts(n: usize, lambda: Option<f64>) -> Self {
        match lambda {
            Some(l) => SampleSize::Poisson(l),
            None => SampleSize::Fixed(n),
        }
    }

    pub(crate) fn validate(self) -> Result<()> {
        match self {
            SampleSize::Fixed(n) if n < MIN_SAMPLE => Err(Error::InsufficientSampleSize {
                given: n,
                needed: MIN_SAMPLE,
            }),
            SampleSize::Poisson(l) if !(l.is_finite() && l >= MIN_SAMPLE as f64) => Err(
                Error::InvalidConfig(format!("Poisson rate {l} must be at least {MIN_SAMPLE}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> usize {
        match self {
            SampleSize::Fixed(n) => n,
            SampleSize::Poisson(l) => {
                let d = Poisson::new(l).expect("validated rate");
                loop {
                    let n = d.sample(rng) as usize;
                    if n >= MIN_SAMPLE {
                        return n;
                    }
                }
            }
        }
    }

    /// Representative size for method applicability checks.
    pub fn nominal(self) -> usize {
        match self {
            SampleSize::Fixed(n) => n,
            SampleSize::Poisson(l) => l.round() as usize,
        }
    }
}

/// B x M matrix of statistics simulated under the null, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NullTable<T> {
    methods: Vec<MethodId>,
    values: Vec<T>,
    rows: usize,
    sample_sizes: Vec<usize>,
    failures: usize,
}

impl<T: Scalar> NullTable<T> {
    pub fn from_rows(methods: Vec<MethodId>, rows: Vec<Vec<T>>) -> Result<Self> {
        let m = methods.len();
        if rows.len() < MIN_ROWS {
            return Err(Error::InvalidConfig(format!(
                "null table needs at least {MIN_ROWS} rows, got {}",
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * m);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidConfig(format!(
                    "row {r} has {} values for {m} methods",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Degenerate(format!(
                    "row {r} has non-finite value {v:?}"
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(NullTable {
            methods,
            rows: rows.len(),
            sample_sizes: Vec::new(),
            values,
            failures: 0,
        })
    }

    pub fn methods(&self) -> &[MethodId] {
        &self.methods
    }

    /// Number of simulated rows, B.
    pub fn b(&self) -> usize {
        self.rows
    }

    pub fn n_methods(&self) -> usize {
        self.methods.len()
    }

    pub fn row(&self, r: usize) -> &[T] {
        let m = self.methods.len();
        &self.values[r * m..(r + 1) * m]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.row(r)[j]).collect()
    }

    /// Sample sizes of the simulated data sets (empty for synthetic tables).
    pub fn sample_sizes(&self) -> &[usize] {
        &self.sample_sizes
    }

    /// Rows that had to be redrawn because estimation failed.
    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn reference(&self) -> NullReference<T> {
        let sorted = (0..self.methods.len())
            .map(|j| {
                let mut c = self.column(j);
                c.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                c
            })
            .collect();
        NullReference {
            methods: self.methods.clone(),
            sorted,
        }
    }
}

/// Sorted columns of a null table, for fast p-value lookups.
#[derive(Debug, Clone)]
pub struct NullReference<T> {
    methods: Vec<MethodId>,
    sorted: Vec<Vec<T>>,
}

impl<T: Scalar> NullReference<T> {
    pub fn b(&self) -> usize {
        self.sorted.first().map_or(0, Vec::len)
    }

    pub fn methods(&self) -> &[MethodId] {
        &self.methods
    }

    /// Number of rows of column `j` strictly greater than `v`.
    pub fn count_greater(&self, j: usize, v: T) -> usize {
        let col = &self.sorted[j];
        col.len() - col.partition_point(|&x| x <= v)
    }

    /// `#{rows > v} / B` for column `j`.
    pub fn pvalue(&self, j: usize, v: T) -> T {
        T::of_usize(self.count_greater(j, v)) / T::of_usize(self.b())
    }

    pub fn pvalues(&self, stats: &StatVector<T>) -> Result<Vec<(MethodId, T)>> {
        if stats.methods() != self.methods {
            return Err(Error::InvalidConfig(format!(
                "statistic methods {:?} do not match table columns {:?}",
                stats.methods(),
                self.methods
            )));
        }
        Ok(stats
            .iter()
            .enumerate()
            .map(|(j, (m, v))| (m, self.pvalue(j, v)))
            .collect())
    }
}

/// Per-method p-values: the fraction of null rows with a strictly larger
/// statistic.
pub fn per_method_pvalues<T: Scalar>(
    stats: &StatVector<T>,
    table: &NullTable<T>,
) -> Result<Vec<(MethodId, T)>> {
    table.reference().pvalues(stats)
}

/// What to simulate and how.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    /// Model data sets are drawn from; its estimation flag decides whether
    /// each row is refitted.
    pub model: &'a NullModel,
    pub methods: &'a [MethodId],
    pub rows: usize,
    pub size: SampleSize,
    /// Bin every simulated data set with these edges and spread it out
    /// again, mirroring binned observed data.
    pub binning: Option<&'a [f64]>,
    pub stat: StatConfig,
    pub seed: u64,
    /// Stream tag, so several batches can come from one seed.
    pub stream_tag: u64,
}

struct RowOutcome {
    values: Vec<f64>,
    n: usize,
    failures: usize,
    last_error: Option<Error>,
}

fn simulate_row(sim: &Simulation<'_>, ws: &mut Workspace, row: usize) -> Result<RowOutcome> {
    let mut failures = 0;
    let mut last_error = None;
    for attempt in 0..MAX_ATTEMPTS_PER_ROW {
        let mut s = if attempt == 0 {
            rng::stream(sim.seed, &[sim.stream_tag, row as u64])
        } else {
            rng::stream(sim.seed, &[sim.stream_tag, row as u64, tag::RETRY, attempt])
        };
        let n = sim.size.draw(&mut s);
        let mut x = sim.model.sample(n, &mut s);
        let result = match sim.binning {
            Some(edges) => Histogram::from_data(edges.to_vec(), &x)
                .and_then(|h| unbin(&h, sim.model))
                .and_then(|mut u| {
                    u.sort_by(f64::total_cmp);
                    ws.compute_sorted(&u, sim.model, sim.methods)
                }),
            None => {
                x.sort_by(f64::total_cmp);
                ws.compute_sorted(&x, sim.model, sim.methods)
            }
        };
        match result {
            Ok(v) => {
                return Ok(RowOutcome {
                    values: v.values(),
                    n,
                    failures,
                    last_error,
                })
            }
            Err(e) if e.is_estimation_failure() || matches!(e.root(), Error::Degenerate(_)) => {
                failures += 1;
                last_error = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_error.expect("at least one attempt failed"))
}

/// Simulate the null distribution of every statistic. Rows are computed in
/// parallel, each from its own stream, so the table is independent of the
/// thread count.
pub fn simulate_null_table(sim: &Simulation<'_>) -> Result<NullTable<f64>> {
    if sim.rows < MIN_ROWS {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_ROWS} simulation rows, got {}",
            sim.rows
        ))
        .at(Stage::Simulation));
    }
    sim.size.validate().stage(Stage::Simulation)?;
    let outcomes: Vec<Result<RowOutcome>> = (0..sim.rows)
        .into_par_iter()
        .map_init(
            || Workspace::new(sim.stat),
            |ws, row| simulate_row(sim, ws, row),
        )
        .collect();

    let limit = sim.rows / 100;
    let mut rows = Vec::with_capacity(sim.rows);
    let mut sizes = Vec::with_capacity(sim.rows);
    let mut failures = 0;
    let mut last = None;
    for o in outcomes {
        match o {
            Ok(r) => {
                failures += r.failures;
                if r.last_error.is_some() {
                    last = r.last_error;
                }
                rows.push(r.values);
                sizes.push(r.n);
            }
            Err(e) => {
                failures += MAX_ATTEMPTS_PER_ROW as usize;
                last = Some(e);
            }
        }
    }
    if failures > limit {
        return Err(Error::TooManyFailures {
            failed: failures,
            rows: sim.rows,
            limit,
            last: Box::new(last.unwrap_or(Error::Degenerate("unknown".into()))),
        }
        .at(Stage::Simulation));
    }
    let mut table = NullTable::from_rows(sim.methods.to_vec(), rows).stage(Stage::Simulation)?;
    table.sample_sizes = sizes;
    table.failures = failures;
    Ok(table)
}
