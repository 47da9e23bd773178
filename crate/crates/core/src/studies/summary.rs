use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PowerResult;
use crate::error::{Error, Result};

/// Power level that defines a case's comparison point.
pub const GAP_POWER: f64 = 0.9;

/// Power gaps at the first grid point where some method exceeds
/// [`GAP_POWER`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub grid_index: usize,
    pub grid_value: f64,
    pub best: String,
    pub best_power: f64,
    /// `best_power - power` per label.
    pub gaps: BTreeMap<String, f64>,
    pub power: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: String,
    /// Mean power over the grid, per label.
    pub mean_power: BTreeMap<String, f64>,
    /// Rank 1 = highest mean power.
    pub rank_best_first: BTreeMap<String, usize>,
    /// Rank 1 = lowest mean power.
    pub rank_worst_first: BTreeMap<String, usize>,
    pub gap: Option<GapEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub alpha: f64,
    /// Mean over every grid point of every case where the label appears.
    pub mean_power: BTreeMap<String, f64>,
    pub cases: Vec<CaseSummary>,
}

/// Labels ordered by decreasing `score`, ties by name.
fn order_desc(scores: &BTreeMap<String, f64>) -> Vec<String> {
    let mut v: Vec<(&String, f64)> = scores.iter().map(|(k, &s)| (k, s)).collect();
    v.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    v.into_iter().map(|(k, _)| k.clone()).collect()
}

fn summarize_case(r: &PowerResult, ai: usize) -> CaseSummary {
    let g = r.grid.len() as f64;
    let mean_power: BTreeMap<String, f64> = r
        .labels
        .iter()
        .enumerate()
        .map(|(j, l)| {
            (
                l.clone(),
                r.power[ai].iter().map(|row| row[j]).sum::<f64>() / g,
            )
        })
        .collect();
    let order = order_desc(&mean_power);
    let m = order.len();
    let rank_best_first = order
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i + 1))
        .collect();
    let rank_worst_first = order
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), m - i))
        .collect();

    let gap = r.power[ai]
        .iter()
        .position(|row| row.iter().any(|&p| p > GAP_POWER))
        .map(|gi| {
            let row = &r.power[ai][gi];
            let power: BTreeMap<String, f64> =
                r.labels.iter().cloned().zip(row.iter().copied()).collect();
            let best = order_desc(&power)[0].clone();
            let best_power = power[&best];
            GapEntry {
                grid_index: gi,
                grid_value: r.grid[gi],
                gaps: power
                    .iter()
                    .map(|(l, p)| (l.clone(), best_power - p))
                    .collect(),
                best,
                best_power,
                power,
            }
        });
    CaseSummary {
        case: r.case.clone(),
        mean_power,
        rank_best_first,
        rank_worst_first,
        gap,
    }
}

/// Mean power, per-case rankings and gap-to-best at level `alpha`.
pub fn summarize(results: &[PowerResult], alpha: f64) -> Result<Summary> {
    if results.is_empty() {
        return Err(Error::InvalidConfig("nothing to summarize".into()));
    }
    let mut cases = Vec::with_capacity(results.len());
    let mut totals: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in results {
        let ai = r.alpha_index(alpha).ok_or_else(|| {
            Error::InvalidConfig(format!("case {} has no results at alpha {alpha}", r.case))
        })?;
        for (j, l) in r.labels.iter().enumerate() {
            let e = totals.entry(l.clone()).or_insert((0.0, 0));
            for row in &r.power[ai] {
                e.0 += row[j];
                e.1 += 1;
            }
        }
        cases.push(summarize_case(r, ai));
    }
    Ok(Summary {
        alpha,
        mean_power: totals
            .into_iter()
            .map(|(l, (s, c))| (l, s / c as f64))
            .collect(),
        cases,
    })
}
