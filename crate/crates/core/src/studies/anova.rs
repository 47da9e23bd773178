use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::adjust::AdjustmentCurve;
use crate::error::{Error, Result};
use crate::rng::{self, tag};

/// Two-sided Welch two-sample t-test p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientSampleSize {
            given: a.len().min(b.len()),
            needed: 2,
        });
    }
    let mv = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        (m, v / n, n)
    };
    let (ma, sa, na) = mv(a);
    let (mb, sb, nb) = mv(b);
    let se2 = sa + sb;
    if !(se2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(beta_reg(df / 2.0, 0.5, df / (df + t * t)))
}

/// Raw and adjusted minimum p-values of all pairwise group comparisons
/// under the global null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaDemo {
    pub n_obs: usize,
    pub n_groups: usize,
    pub raw: Vec<f64>,
    pub adjusted: Vec<f64>,
    /// Built from an independent batch of replications.
    pub curve: AdjustmentCurve<f64>,
    /// Number of pairwise comparisons.
    pub comparisons: usize,
}

impl AnovaDemo {
    /// The curve if the comparisons were independent: `1 - (1 - p)^C`.
    pub fn independent_overlay(&self) -> Vec<f64> {
        let c = self.comparisons as i32;
        self.curve
            .grid()
            .into_iter()
            .map(|p| 1.0 - (1.0 - p).powi(c))
            .collect()
    }
}

fn min_pairwise_p<R: Rng>(n_obs: usize, n_groups: usize, rng: &mut R) -> Result<f64> {
    let mut groups: Vec<Vec<f64>> = loop {
        let labels: Vec<usize> = (0..n_obs).map(|_| rng.random_range(0..n_groups)).collect();
        let mut sizes = vec![0usize; n_groups];
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes.iter().all(|&s| s >= 2) {
            let mut g: Vec<Vec<f64>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
            for l in labels {
                g[l].push(0.0);
            }
            break g;
        }
    };
    for g in groups.iter_mut() {
        for v in g.iter_mut() {
            *v = rng.sample(rand_distr::StandardNormal);
        }
    }
    let mut best = 1.0f64;
    for i in 0..n_groups {
        for j in i + 1..n_groups {
            best = best.min(welch_t_test(&groups[i], &groups[j])?);
        }
    }
    Ok(best)
}

fn minima(n_obs: usize, n_groups: usize, reps: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| min_pairwise_p(n_obs, n_groups, &mut rng::stream(seed, &[stream, r as u64])))
        .collect()
}

/// Assign `n_obs` standard normal draws to `n_groups` groups at random
/// (redrawing assignments that leave a group with fewer than two members),
/// take the smallest pairwise Welch p-value, and adjust it with the curve
/// of an independent batch of the same size.
pub fn anova_demo(n_obs: usize, n_groups: usize, reps: usize, seed: u64) -> Result<AnovaDemo> {
    if n_groups < 2 {
        return Err(Error::InvalidConfig("need at least two groups".into()));
    }
    if n_obs < 2 * n_groups {
        return Err(Error::InvalidConfig(format!(
            "{n_obs} observations cannot fill {n_groups} groups of two"
        )));
    }
    if reps == 0 {
        return Err(Error::InvalidConfig("need at least one replication".into()));
    }
    let raw = minima(n_obs, n_groups, reps, seed, tag::DEMO_RAW)?;
    let batch = minima(n_obs, n_groups, reps, seed, tag::DEMO_CURVE)?;
    let curve = AdjustmentCurve::from_minima(&batch)?;
    let adjusted = raw.iter().map(|&p| curve.eval(p)).collect();
    Ok(AnovaDemo {
        n_obs,
        n_groups,
        raw,
        adjusted,
        curve,
        comparisons: n_groups * (n_groups - 1) / 2,
    })
}
