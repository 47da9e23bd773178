use crate::error::{Error, Result, Stage, StageExt};
use crate::model::NullModel;
use crate::sample::Histogram;

/// Recreate observations from a histogram by spreading each bin's count
/// over the bin. With a quantile function the points sit at the quantiles
/// of equally spaced CDF fractions `(j - 0.5) / c` of the bin's mass;
/// without one they are placed uniformly. Deterministic.
pub fn spread_out(hist: &Histogram, model: &NullModel) -> Result<Vec<f64>> {
    let total = hist.total();
    if total == 0 {
        return Err(Error::Degenerate("histogram has no counts".into()));
    }
    let mut out = Vec::with_capacity(total as usize);
    for (w, &c) in hist.edges().windows(2).zip(hist.counts()) {
        let (a, b) = (w[0], w[1]);
        if c == 0 {
            continue;
        }
        let frac = |j: u64| (j as f64 + 0.5) / c as f64;
        let (fa, fb) = (model.cdf(a), model.cdf(b));
        if model.has_quantile() && fb > fa {
            for j in 0..c {
                let u = fa + (fb - fa) * frac(j);
                let x = model.quantile_unchecked(u).clamp(a, b);
                out.push(x);
            }
        } else if a.is_finite() && b.is_finite() {
            for j in 0..c {
                out.push(a + (b - a) * frac(j));
            }
        } else {
            return Err(Error::Degenerate(format!(
                "cannot spread {c} counts over the unbounded bin [{a}, {b}] without a quantile function"
            )));
        }
    }
    Ok(out)
}

/// Spread a histogram for testing against `model`. When the model
/// estimates its parameters, the counts are first spread with the model as
/// configured, the parameters are fitted to that, and the counts are spread
/// again under the fitted model.
pub fn unbin(hist: &Histogram, model: &NullModel) -> Result<Vec<f64>> {
    let first = spread_out(hist, model).stage(Stage::Statistics)?;
    if !model.estimates_params() {
        return Ok(first);
    }
    let fitted = model.fit(&first).stage(Stage::Estimation)?;
    spread_out(hist, &fitted).stage(Stage::Statistics)
}
