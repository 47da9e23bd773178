use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binned data: `edges.len() == counts.len() + 1`, edges strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(edges: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if edges.len() != counts.len() + 1 || counts.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "histogram needs one more edge than counts (got {} edges, {} counts)",
                edges.len(),
                counts.len()
            )));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "histogram edges must be strictly increasing".into(),
            ));
        }
        Ok(Histogram { edges, counts })
    }

    /// Bin `data` with the given edges. Values outside the range go to the
    /// nearest end bin; interior bins are half-open `[a, b)`, the last one
    /// closed.
    pub fn from_data(edges: Vec<f64>, data: &[f64]) -> Result<Self> {
        let nb = edges.len().saturating_sub(1);
        let mut counts = vec![0u64; nb];
        if nb == 0 {
            return Err(Error::InvalidConfig(
                "histogram needs at least one bin".into(),
            ));
        }
        for &x in data {
            let j = edges[1..nb].partition_point(|&e| e <= x);
            counts[j] += 1;
        }
        Histogram::new(edges, counts)
    }

    /// `nbins` equal-width bins over `[lo, hi]`.
    pub fn equal_width(lo: f64, hi: f64, nbins: usize, data: &[f64]) -> Result<Self> {
        if nbins == 0 || !(lo < hi) {
            return Err(Error::InvalidConfig(format!(
                "bad binning [{lo}, {hi}] x {nbins}"
            )));
        }
        let edges = (0..=nbins)
            .map(|j| {
                if j == nbins {
                    hi
                } else {
                    lo + (hi - lo) * (j as f64 / nbins as f64)
                }
            })
            .collect();
        Histogram::from_data(edges, data)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Observed data, raw or binned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Sample {
    Raw(Vec<f64>),
    Binned(Histogram),
}

impl Sample {
    pub fn len(&self) -> usize {
        match self {
            Sample::Raw(x) => x.len(),
            Sample::Binned(h) => h.total() as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn histogram(&self) -> Option<&Histogram> {
        match self {
            Sample::Binned(h) => Some(h),
            Sample::Raw(_) => None,
        }
    }
}

impl From<Vec<f64>> for Sample {
    fn from(x: Vec<f64>) -> Self {
        Sample::Raw(x)
    }
}

impl From<Histogram> for Sample {
    fn from(h: Histogram) -> Self {
        Sample::Binned(h)
    }
}
