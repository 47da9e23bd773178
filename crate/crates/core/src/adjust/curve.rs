use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::table::{NullReference, NullTable};

/// Number of grid points on [0, 1].
pub const GRID_POINTS: usize = 250;

/// Null CDF of the minimum per-method p-value, tabulated on an equally
/// spaced grid and linearly interpolated. Evaluating it at an observed
/// minimum p-value gives the adjusted p-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentCurve<T> {
    values: Vec<T>,
}

impl<T: Scalar> AdjustmentCurve<T> {
    /// Empirical CDF of `minima` on the grid.
    pub fn from_minima(minima: &[T]) -> Result<Self> {
        if minima.is_empty() {
            return Err(Error::InvalidConfig("no minimum p-values".into()));
        }
        if minima.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite minimum p-value".into()));
        }
        let mut sorted = minima.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let total = T::of_usize(sorted.len());
        let values = grid::<T>()
            .map(|g| T::of_usize(sorted.partition_point(|&v| v <= g)) / total)
            .collect();
        Ok(AdjustmentCurve { values })
    }

    /// Curve from tabulated CDF values on the grid.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.len() != GRID_POINTS {
            return Err(Error::InvalidConfig(format!(
                "curve needs {GRID_POINTS} values, got {}",
                values.len()
            )));
        }
        let ok = values.iter().all(|&v| v >= T::zero() && v <= T::one())
            && values.windows(2).all(|w| w[0] <= w[1]);
        if !ok {
            return Err(Error::InvalidConfig(
                "curve values must be nondecreasing in [0, 1]".into(),
            ));
        }
        Ok(AdjustmentCurve { values })
    }

    pub fn grid(&self) -> Vec<T> {
        grid::<T>().collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Linear interpolation, clamped to the end values outside [0, 1].
    pub fn eval(&self, p: T) -> T {
        let last = GRID_POINTS - 1;
        if !(p > T::zero()) {
            return self.values[0];
        }
        if p >= T::one() {
            return self.values[last];
        }
        let pos = p * T::of_usize(last);
        let i = pos.floor().to_usize().unwrap_or(0).min(last - 1);
        let t = pos - T::of_usize(i);
        let (a, b) = (self.values[i], self.values[i + 1]);
        a + t * (b - a)
    }

    /// Largest `p` in [0, 1] with `eval(p) <= alpha`, or `None` when even
    /// `eval(0)` exceeds `alpha`.
    pub fn threshold(&self, alpha: T) -> Option<T> {
        let v = &self.values;
        if v[0] > alpha {
            return None;
        }
        let last = GRID_POINTS - 1;
        // first grid index whose value exceeds alpha
        let k = v.partition_point(|&x| x <= alpha);
        if k > last {
            return Some(T::one());
        }
        let (a, b) = (v[k - 1], v[k]);
        let t = (alpha - a) / (b - a);
        Some((T::of_usize(k - 1) + t) / T::of_usize(last))
    }
}

fn grid<T: Scalar>() -> impl Iterator<Item = T> {
    let last = GRID_POINTS - 1;
    (0..GRID_POINTS).map(move |i| {
        if i == last {
            T::one()
        } else {
            T::of_usize(i) / T::of_usize(last)
        }
    })
}

/// Leave-one-out minimum p-values: each row is scored against the other
/// `B - 1` rows, `#{other rows > v} / (B - 1)`.
pub fn leave_one_out_minima<T: Scalar>(table: &NullTable<T>) -> Vec<T> {
    let reference = table.reference();
    let denom = T::of_usize(table.b() - 1);
    (0..table.b())
        .into_par_iter()
        .map(|r| {
            table
                .row(r)
                .iter()
                .enumerate()
                .map(|(j, &v)| T::of_usize(reference.count_greater(j, v)) / denom)
                .fold(T::one(), T::min)
        })
        .collect()
}

/// Minimum p-values of the rows of `batch`, each scored against `reference`.
pub fn reference_minima<T: Scalar>(reference: &NullReference<T>, batch: &NullTable<T>) -> Vec<T> {
    (0..batch.b())
        .into_par_iter()
        .map(|r| {
            batch
                .row(r)
                .iter()
                .enumerate()
                .map(|(j, &v)| reference.pvalue(j, v))
                .fold(T::one(), T::min)
        })
        .collect()
}

/// Adjustment curve from the null table itself, scoring each row against
/// the rest.
pub fn build_adjustment_curve<T: Scalar>(table: &NullTable<T>) -> Result<AdjustmentCurve<T>> {
    if table.n_methods() == 0 {
        return Err(Error::InvalidConfig("null table has no methods".into()));
    }
    AdjustmentCurve::from_minima(&leave_one_out_minima(table))
}

/// Adjustment curve from an independent batch of null rows scored against
/// `table`.
pub fn build_adjustment_curve_from_batch<T: Scalar>(
    table: &NullTable<T>,
    batch: &NullTable<T>,
) -> Result<AdjustmentCurve<T>> {
    if table.methods() != batch.methods() {
        return Err(Error::InvalidConfig(
            "batch methods differ from table".into(),
        ));
    }
    if table.n_methods() == 0 {
        return Err(Error::InvalidConfig("null table has no methods".into()));
    }
    AdjustmentCurve::from_minima(&reference_minima(&table.reference(), batch))
}
