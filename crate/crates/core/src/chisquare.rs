//! Pearson chi-square test with blended binning.
//!
//! Bin edges are a convex blend of equal-probability edges (model quantiles
//! at `j/k`) and equal-width edges over the data range:
//! `edges = (1 - kappa) * equal_prob + kappa * equal_width`. Bins whose
//! expected count is 5 or less are then merged into a neighbour.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NullModel;
use crate::scalar::Scalar;

/// Expected count a bin must exceed after merging.
pub const MIN_EXPECTED: f64 = 5.0;
/// Default bin count for the equal-size and equal-probability variants.
pub const DEFAULT_NBINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinningVariant {
    RGd,
    EqualSize,
    EqualProb,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub variant: BinningVariant,
    pub k: usize,
    pub kappa: f64,
}

impl BinningSpec {
    /// `k = 5 + m` bins, `kappa = 0.5`, where `m` counts estimated parameters.
    pub fn rgd(n_estimated: usize) -> Self {
        BinningSpec {
            variant: BinningVariant::RGd,
            k: 5 + n_estimated,
            kappa: 0.5,
        }
    }

    pub fn equal_size(nbins: usize) -> Self {
        BinningSpec {
            variant: BinningVariant::EqualSize,
            k: nbins,
            kappa: 1.0,
        }
    }

    pub fn equal_prob(nbins: usize) -> Self {
        BinningSpec {
            variant: BinningVariant::EqualProb,
            k: nbins,
            kappa: 0.0,
        }
    }

    pub fn for_variant(variant: BinningVariant, model: &NullModel, nbins: usize) -> Self {
        match variant {
            BinningVariant::RGd => Self::rgd(model.n_estimated()),
            BinningVariant::EqualSize => Self::equal_size(nbins),
            BinningVariant::EqualProb => Self::equal_prob(nbins),
        }
    }
}

/// Strictly increasing bin edges; the ends may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BinSet {
    edges: Vec<f64>,
}

impl BinSet {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::Degenerate(
                "a bin set needs at least two edges".into(),
            ));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Degenerate(format!(
                "bin edges are not strictly increasing: {edges:?}"
            )));
        }
        Ok(BinSet { edges })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn expected(&self, model: &NullModel, n: usize) -> Vec<f64> {
        expected_counts(model, &self.edges, n)
    }
}

fn expected_counts(model: &NullModel, edges: &[f64], n: usize) -> Vec<f64> {
    let cdf: Vec<f64> = edges.iter().map(|&e| model.cdf(e)).collect();
    cdf.windows(2).map(|w| n as f64 * (w[1] - w[0])).collect()
}

/// `k + 1` equally spaced points from `lo` to `hi`, endpoints exact.
fn grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    let steps = (len - 1) as f64;
    (0..len)
        .map(|j| {
            if j == 0 {
                lo
            } else if j == len - 1 {
                hi
            } else {
                lo + (hi - lo) * (j as f64 / steps)
            }
        })
        .collect()
}

/// Blend equal-probability and equal-width edges over `[lo, hi]` before any
/// merging. Infinite ends use the model quantiles at `5/n` and `1 - 5/n`
/// for the equal-width grid.
pub fn blended_edges(
    model: &NullModel,
    lo: f64,
    hi: f64,
    spec: &BinningSpec,
    n: usize,
) -> Result<Vec<f64>> {
    let k = spec.k;
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 bins, got {k}"
        )));
    }
    if !(0.0..=1.0).contains(&spec.kappa) {
        return Err(Error::InvalidConfig(format!(
            "kappa {} outside [0, 1]",
            spec.kappa
        )));
    }
    let q = |p: f64| {
        model.quantile(p).ok_or_else(|| {
            Error::InvalidConfig("chi-square binning needs a quantile function".into())
        })
    };
    let mut equal_prob = Vec::with_capacity(k + 1);
    equal_prob.push(lo);
    for j in 1..k {
        equal_prob.push(q(j as f64 / k as f64)?);
    }
    equal_prob.push(hi);

    let tail = (5.0 / n as f64).min(0.5);
    let equal_width = if k == 2 {
        vec![lo, q(0.5)?, hi]
    } else {
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => grid(lo, hi, k + 1),
            (true, false) => {
                let mut g = grid(lo, q(1.0 - tail)?, k);
                g.push(f64::INFINITY);
                g
            }
            (false, true) => {
                let mut g = vec![f64::NEG_INFINITY];
                g.extend(grid(q(tail)?, hi, k));
                g
            }
            (false, false) => {
                let mut g = vec![f64::NEG_INFINITY];
                g.extend(grid(q(tail)?, q(1.0 - tail)?, k - 1));
                g.push(f64::INFINITY);
                g
            }
        }
    };
    debug_assert_eq!(equal_width.len(), k + 1);

    let kappa = spec.kappa;
    let mut edges: Vec<f64> = equal_prob
        .iter()
        .zip(&equal_width)
        .map(|(&a, &b)| if a == b { a } else { a + kappa * (b - a) })
        .collect();
    if edges[0].is_nan() {
        edges[0] = f64::NEG_INFINITY;
    }
    if edges[k].is_nan() {
        edges[k] = f64::INFINITY;
    }
    Ok(edges)
}

/// Drop interior edges that would break strict monotonicity, e.g. model
/// quantiles falling outside a narrow data range.
fn enforce_increasing(edges: Vec<f64>) -> Vec<f64> {
    let (first, last) = (edges[0], edges[edges.len() - 1]);
    let mut out = Vec::with_capacity(edges.len());
    out.push(first);
    for &e in &edges[1..edges.len() - 1] {
        if e > *out.last().unwrap() && e < last {
            out.push(e);
        }
    }
    out.push(last);
    out
}

/// Merge bins until every expected count exceeds [`MIN_EXPECTED`] or a single
/// bin is left. The smallest bin joins its smaller neighbour; end bins merge
/// inward. Operates on expected counts directly and returns the indices of
/// the edges that survive.
pub fn merge_plan(expected: &[f64]) -> Vec<usize> {
    let mut keep: Vec<usize> = (0..=expected.len()).collect();
    let mut e = expected.to_vec();
    while e.len() > 1 && e.iter().any(|&v| v <= MIN_EXPECTED) {
        let nb = e.len();
        let mut k = 0;
        for (i, &v) in e.iter().enumerate() {
            if v < e[k] {
                k = i;
            }
        }
        // merge bin `left` with bin `left + 1`, removing edge `left + 1`
        let left = if k == 0 {
            0
        } else if k == nb - 1 {
            nb - 2
        } else if e[k - 1] < e[k + 1] {
            k - 1
        } else {
            k
        };
        e[left] += e[left + 1];
        e.remove(left + 1);
        keep.remove(left + 1);
    }
    keep
}

/// Merge small-expectation bins of `edges` under `model` for sample size `n`.
pub fn merge_small_bins(model: &NullModel, edges: &[f64], n: usize) -> Result<BinSet> {
    if edges.len() < 2 {
        return BinSet::new(edges.to_vec());
    }
    let e = expected_counts(model, edges, n);
    let total: f64 = e.iter().sum();
    if !(total > MIN_EXPECTED) {
        return Err(Error::Degenerate(format!(
            "total expected count {total:.3} is not above {MIN_EXPECTED}"
        )));
    }
    let keep = merge_plan(&e);
    BinSet::new(keep.into_iter().map(|i| edges[i]).collect())
}

/// Edges for `data` (any order) under `model`, merged.
pub fn build_bins(model: &NullModel, data: &[f64], spec: &BinningSpec) -> Result<BinSet> {
    if data.is_empty() {
        return Err(Error::Degenerate("no data to bin".into()));
    }
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    build_bins_over(model, lo, hi, spec, data.len())
}

/// Edges over an explicit range `[lo, hi]`, which may be infinite.
pub fn build_bins_over(
    model: &NullModel,
    lo: f64,
    hi: f64,
    spec: &BinningSpec,
    n: usize,
) -> Result<BinSet> {
    if !(lo < hi) {
        return Err(Error::Degenerate(format!("empty data range [{lo}, {hi}]")));
    }
    let edges = enforce_increasing(blended_edges(model, lo, hi, spec, n)?);
    merge_small_bins(model, &edges, n)
}

/// Pearson's `sum (O - E)^2 / E`.
pub fn pearson<T: Scalar>(observed: &[T], expected: &[T]) -> Result<T> {
    if observed.len() != expected.len() {
        return Err(Error::Degenerate(
            "observed/expected length mismatch".into(),
        ));
    }
    let mut s = T::zero();
    for (&o, &e) in observed.iter().zip(expected) {
        if !(e > T::zero()) {
            return Err(Error::Degenerate("zero expected count".into()));
        }
        s = s + (o - e) * (o - e) / e;
    }
    Ok(s)
}

/// Chi-square statistic of sorted `data` against the (already fitted)
/// `model`. Counting replaces the outer edges by `-inf`/`inf` and uses
/// half-open bins `(a, b]`.
pub fn chisq_stat(sorted: &[f64], model: &NullModel, spec: &BinningSpec) -> Result<f64> {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let bins = build_bins(model, sorted, spec)?;
    let e = bins.edges();
    let mut counting = Vec::with_capacity(e.len());
    counting.push(f64::NEG_INFINITY);
    counting.extend_from_slice(&e[1..e.len() - 1]);
    counting.push(f64::INFINITY);
    let observed = counts_half_open(sorted, &counting);
    let expected = expected_counts(model, &counting, sorted.len());
    pearson(&observed, &expected)
}

/// Counts of sorted data in `(edge[j], edge[j+1]]`.
pub fn counts_half_open(sorted: &[f64], edges: &[f64]) -> Vec<f64> {
    let pos: Vec<usize> = edges
        .iter()
        .map(|&b| sorted.partition_point(|&x| x <= b))
        .collect();
    pos.windows(2).map(|w| (w[1] - w[0]) as f64).collect()
}
