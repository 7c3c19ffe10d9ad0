use serde::{Deserialize, Serialize};

use super::Field;
use crate::error::{LipError, Result};
use crate::metric_space::MetricSpace;

/// Largest difference quotient seen over a finite pair set.
///
/// `unbounded` is raised when the witnessed ratio is not finite, which on a
/// finite sample only happens when a value is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipEstimate {
    pub value: f64,
    pub unbounded: bool,
    pub witness: Option<(usize, usize)>,
}

impl LipEstimate {
    fn zero() -> Self {
        Self {
            value: 0.0,
            unbounded: false,
            witness: None,
        }
    }

    fn offer(&mut self, space: &MetricSpace, vals: &[f64], p: usize, q: usize) {
        let d = space.d(p, q);
        if d <= 0.0 {
            return;
        }
        let diff = (vals[p] - vals[q]).abs();
        let ratio = if diff.is_nan() {
            f64::INFINITY
        } else {
            diff / d
        };
        // strict comparison keeps the first witness in scan order
        if ratio > self.value || (self.witness.is_none() && ratio > 0.0) {
            self.value = ratio;
            self.witness = Some((p.min(q), p.max(q)));
            self.unbounded = !ratio.is_finite();
        }
    }
}

/// Max of `|f(p) − f(q)| / d(p, q)` over all pairs of a fully tabulated
/// field.
pub fn global_lip_values(space: &MetricSpace, vals: &[f64]) -> LipEstimate {
    let mut est = LipEstimate::zero();
    for p in 0..vals.len() {
        for q in p + 1..vals.len() {
            est.offer(space, vals, p, q);
        }
    }
    est
}

/// Max of the difference quotient over an explicit pair set.
pub fn global_lip_over(
    space: &MetricSpace,
    vals: &[f64],
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> LipEstimate {
    let mut est = LipEstimate::zero();
    for (p, q) in pairs {
        if p != q {
            est.offer(space, vals, p, q);
        }
    }
    est
}

pub fn global_lip(space: &MetricSpace, f: &Field) -> Result<LipEstimate> {
    let vals = f.tabulate(space)?;
    Ok(global_lip_values(space, &vals))
}

/// Max over `x ≠ p` of `|f(x) − f(p)| / d(x, p)`.
pub fn pointwise_lip(space: &MetricSpace, f: &Field, p: usize) -> Result<LipEstimate> {
    space.check_point(p)?;
    let vals = f.tabulate(space)?;
    Ok(global_lip_over(
        space,
        &vals,
        space.points().map(|x| (p, x)),
    ))
}

/// `min_t [max_{d(x,p) < t} |f(x) − f(p)|] / t` over the given radii.
pub fn scaled_oscillation(space: &MetricSpace, f: &Field, p: usize, radii: &[f64]) -> Result<f64> {
    space.check_point(p)?;
    if radii.is_empty() {
        return Err(LipError::InvalidParameter("no radii given".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] > w[0]) {
        return Err(LipError::InvalidParameter(
            "radii must be positive, finite and decreasing".into(),
        ));
    }
    let fp = f.eval(space, p)?;
    let mut best = f64::INFINITY;
    for &t in radii {
        let mut osc: f64 = 0.0;
        for x in space.points() {
            if x != p && space.d(p, x) < t {
                osc = osc.max((f.eval(space, x)? - fp).abs());
            }
        }
        best = best.min(osc / t);
    }
    Ok(best)
}
