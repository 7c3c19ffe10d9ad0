//! Lipschitz extension from a subset: lower and upper envelopes with a
//! global constant or per-point constants, and extensions valued in a
//! prescribed interval.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{LipError, Result};
use crate::metric_space::{MetricSpace, Subset};
use crate::scalar_field::{global_lip_over, Anchor, Field, Interval, Side, Transport};

/// Relative slack allowed when checking Lipschitz hypotheses on input data.
const INPUT_TOL: f64 = 1e-12;

fn exceeds(diff: f64, bound: f64) -> bool {
    diff - bound > INPUT_TOL * (1.0 + bound.abs())
}

/// Values of `phi` at the points of `a`, in id order.
pub fn values_on(space: &MetricSpace, a: &Subset, phi: &Field) -> Result<Vec<f64>> {
    a.ids().iter().map(|&x| phi.eval(space, x)).collect()
}

/// The envelopes of a function on a subset.
#[derive(Debug, Clone)]
pub struct EnvelopePair {
    pub lower: Field,
    pub upper: Field,
    pub subset: Subset,
    /// `(x, φ(x), L_x)` for every `x` in the subset.
    pub anchors: Vec<Anchor>,
}

impl EnvelopePair {
    /// `λ·lower + (1 − λ)·upper`.
    pub fn convex(&self, lambda: f64) -> Field {
        self.lower
            .scale(lambda)
            .add(&self.upper.scale(1.0 - lambda))
    }

    fn build(a: &Subset, anchors: Vec<Anchor>) -> Self {
        Self {
            lower: Field::envelope(Side::Lower, anchors.clone()),
            upper: Field::envelope(Side::Upper, anchors.clone()),
            subset: a.clone(),
            anchors,
        }
    }
}

/// Checks `|φ(x) − φ(y)| ≤ K d(x, y)` on all pairs of `a`.
pub fn check_lipschitz_on(space: &MetricSpace, a: &Subset, vals: &[f64], k: f64) -> Result<()> {
    let ids = a.ids();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let (p, q) = (ids[i], ids[j]);
            let diff = (vals[i] - vals[j]).abs();
            let bound = k * space.d(p, q);
            if exceeds(diff, bound) || diff.is_nan() {
                return Err(LipError::NotLipschitz {
                    k,
                    p,
                    q,
                    diff,
                    bound,
                });
            }
        }
    }
    Ok(())
}

/// `Φ−(p) = sup_{x∈A} [φ(x) − K d(x,p)]`, `Φ+(p) = inf_{x∈A} [φ(x) + K d(x,p)]`.
pub fn mcshane_envelopes(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    k: f64,
) -> Result<EnvelopePair> {
    a.require_nonempty()?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(LipError::InvalidParameter(format!(
            "Lipschitz constant must be finite and nonnegative, got {k}"
        )));
    }
    let vals = values_on(space, a, phi)?;
    check_lipschitz_on(space, a, &vals, k)?;
    let anchors = a
        .ids()
        .iter()
        .zip(&vals)
        .map(|(&point, &value)| Anchor {
            point,
            value,
            slope: k,
        })
        .collect();
    Ok(EnvelopePair::build(a, anchors))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub points: usize,
    /// Points where `Φ−[φ] ≠ −Φ+[−φ]` bitwise.
    pub mismatches: Vec<usize>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `Φ−[φ]` with `−Φ+[−φ]` at every point.
pub fn duality_check(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    k: f64,
) -> Result<DualityReport> {
    let direct = mcshane_envelopes(space, a, phi, k)?;
    let mirrored = mcshane_envelopes(space, a, &phi.neg(), k)?;
    let mut mismatches = Vec::new();
    for p in space.points() {
        let lhs = direct.lower.eval(space, p)?;
        let rhs = -mirrored.upper.eval(space, p)?;
        if lhs.to_bits() != rhs.to_bits() && !(lhs == 0.0 && rhs == 0.0) {
            mismatches.push(p);
        }
    }
    Ok(DualityReport {
        points: space.len(),
        mismatches,
    })
}

fn require_in_interval(a: &Subset, vals: &[f64], delta: &Interval) -> Result<()> {
    delta.require_nondegenerate()?;
    for (&point, &value) in a.ids().iter().zip(vals) {
        if !delta.contains(value) {
            return Err(LipError::OutOfInterval {
                point,
                value,
                interval: delta.to_string(),
            });
        }
    }
    Ok(())
}

/// `(max(Φ−, a) + min(Φ+, b)) / 2`.
fn clipped_mean(env: &EnvelopePair, lo: f64, hi: f64) -> Field {
    env.lower
        .max(&Field::constant(lo))
        .add(&env.upper.min(&Field::constant(hi)))
        .scale(0.5)
}

/// A K-Lipschitz extension of `φ` with values in `Δ`.
///
/// Bounded `Δ` gives the clipped mean of the envelopes, which lies strictly
/// inside `Δ` off `A`; a half-line bounded below gives `Φ+`, one bounded
/// above gives `Φ−`; the whole line gives `Φ−`.
pub fn extend_to_interval(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    k: f64,
    delta: &Interval,
) -> Result<Field> {
    a.require_nonempty()?;
    let vals = values_on(space, a, phi)?;
    require_in_interval(a, &vals, delta)?;
    let env = mcshane_envelopes(space, a, phi, k)?;
    Ok(match (delta.lo.is_finite(), delta.hi.is_finite()) {
        (true, true) => clipped_mean(&env, delta.lo, delta.hi),
        (true, false) => env.upper,
        (false, _) => env.lower,
    })
}

/// Per-point constants `L_x ≥ 1` on a subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseWitness {
    constants: BTreeMap<usize, f64>,
    lifted: Vec<usize>,
}

impl PointwiseWitness {
    /// Constants below 1 are raised to 1; the affected points are recorded.
    pub fn new(constants: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut lifted = Vec::new();
        for (p, l) in constants {
            if l.is_nan() || l == f64::INFINITY {
                return Err(LipError::InfiniteConstant(format!(
                    "pointwise constant at {p} is {l}"
                )));
            }
            if l < 1.0 {
                lifted.push(p);
            }
            map.insert(p, l.max(1.0));
        }
        lifted.sort_unstable();
        lifted.dedup();
        Ok(Self {
            constants: map,
            lifted,
        })
    }

    pub fn constant(&self, p: usize) -> Option<f64> {
        self.constants.get(&p).copied()
    }

    pub fn constants(&self) -> &BTreeMap<usize, f64> {
        &self.constants
    }

    /// Points whose given constant was below 1.
    pub fn lifted(&self) -> &[usize] {
        &self.lifted
    }

    fn on(&self, a: &Subset) -> Result<Vec<f64>> {
        a.ids()
            .iter()
            .map(|&p| {
                self.constant(p).ok_or_else(|| {
                    LipError::WitnessFailure(format!("no pointwise constant given for point {p}"))
                })
            })
            .collect()
    }
}

/// Checks `|φ(x) − φ(y)| ≤ min(L_x, L_y) d(x, y)` on all pairs of `a`.
pub fn check_compatibility(
    space: &MetricSpace,
    a: &Subset,
    vals: &[f64],
    ls: &[f64],
) -> Result<()> {
    let ids = a.ids();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let (p, q) = (ids[i], ids[j]);
            let diff = (vals[i] - vals[j]).abs();
            let bound = ls[i].min(ls[j]) * space.d(p, q);
            if exceeds(diff, bound) || diff.is_nan() {
                return Err(LipError::IncompatibleWitness { p, q, diff, bound });
            }
        }
    }
    Ok(())
}

/// Envelopes with slope `L_x` at each anchor.
pub fn pointwise_envelopes(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    w: &PointwiseWitness,
) -> Result<EnvelopePair> {
    a.require_nonempty()?;
    let vals = values_on(space, a, phi)?;
    let ls = w.on(a)?;
    check_compatibility(space, a, &vals, &ls)?;
    let anchors = a
        .ids()
        .iter()
        .zip(vals.iter().zip(&ls))
        .map(|(&point, (&value, &slope))| Anchor {
            point,
            value,
            slope,
        })
        .collect();
    Ok(EnvelopePair::build(a, anchors))
}

fn bounded_pointwise(
    space: &MetricSpace,
    a: &Subset,
    psi: &Field,
    w: &PointwiseWitness,
    lo: f64,
    hi: f64,
) -> Result<Field> {
    let env = pointwise_envelopes(space, a, psi, w)?;
    Ok(clipped_mean(&env, lo, hi))
}

/// A pointwise-Lipschitz extension of `φ` with values in `Δ`.
///
/// Bounded `Δ` uses the clipped mean of the pointwise envelopes. The real
/// line is reduced to `(−π/2, π/2)` by arctan; a half-line is moved onto
/// `[1, ∞)` by a translation (or reflection) and then onto `(0, 1]` by the
/// reciprocal. These maps are 1-Lipschitz on the relevant ranges, so the
/// witness carries over unchanged. The result reproduces `φ` exactly on `A`.
pub fn pointwise_extend_to_interval(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    w: &PointwiseWitness,
    delta: &Interval,
) -> Result<Field> {
    a.require_nonempty()?;
    let vals = values_on(space, a, phi)?;
    require_in_interval(a, &vals, delta)?;
    let n = space.len();
    let exact = a.ids().iter().copied().zip(vals.iter().copied());

    // forward map into a bounded interval and its inverse
    let (forward, back, lo, hi): (Vec<Transport>, Vec<Transport>, f64, f64) =
        match (delta.lo.is_finite(), delta.hi.is_finite()) {
            (true, true) => return bounded_pointwise(space, a, phi, w, delta.lo, delta.hi),
            (false, false) => (
                vec![Transport::Arctan],
                vec![Transport::Tan],
                -FRAC_PI_2,
                FRAC_PI_2,
            ),
            (true, false) => {
                let shift = Transport::Affine {
                    scale: 1.0,
                    shift: 1.0 - delta.lo,
                };
                (
                    vec![shift, Transport::Reciprocal],
                    vec![Transport::Reciprocal, shift.inverse()],
                    0.0,
                    1.0,
                )
            }
            (false, true) => {
                let flip = Transport::Affine {
                    scale: -1.0,
                    shift: delta.hi + 1.0,
                };
                (
                    vec![flip, Transport::Reciprocal],
                    vec![Transport::Reciprocal, flip],
                    0.0,
                    1.0,
                )
            }
        };
    let psi_vals = vals
        .iter()
        .map(|&v| forward.iter().try_fold(v, |t, m| m.apply(t)))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| LipError::InvalidParameter("value outside the transport domain".into()))?;
    let psi = Field::partial(n, a.ids().iter().copied().zip(psi_vals))?;
    let g = bounded_pointwise(space, a, &psi, w, lo, hi)?;
    let f = back.iter().fold(g, |acc, m| acc.transport(*m));
    f.patched(n, exact)
}

/// Smallest per-point constants that make `f` pointwise Lipschitz on the
/// sample: `L_p = max_{x≠p} |f(x) − f(p)| / d(x, p)`, lifted to at least 1.
pub fn generate_pointwise_witness(space: &MetricSpace, f: &Field) -> Result<PointwiseWitness> {
    let vals = f.tabulate(space)?;
    PointwiseWitness::new(space.points().map(|p| {
        (
            p,
            global_lip_over(space, &vals, space.points().map(|x| (p, x))).value,
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> MetricSpace {
        MetricSpace::grid(0.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn envelope_example() {
        let s = grid();
        let a = s.subset([0, 2]).unwrap(); // t = 0 and t = 1
        let env = mcshane_envelopes(&s, &a, &Field::coordinate(0), 1.0).unwrap();
        assert_eq!(env.lower.eval(&s, 3).unwrap(), 0.5);
        assert_eq!(env.upper.eval(&s, 3).unwrap(), 1.5);
        assert_eq!(env.lower.eval(&s, 4).unwrap(), 0.0);
        assert_eq!(env.upper.eval(&s, 4).unwrap(), 2.0);
    }

    #[test]
    fn full_subset_reproduces_phi() {
        let s = grid();
        let phi = Field::tabulated(vec![0.0, 0.3, 0.1, 0.4, 0.2]);
        let env = mcshane_envelopes(&s, &s.full_subset(), &phi, 1.0).unwrap();
        assert_eq!(env.lower.tabulate(&s).unwrap(), phi.tabulate(&s).unwrap());
        assert_eq!(env.upper.tabulate(&s).unwrap(), phi.tabulate(&s).unwrap());
        let f = extend_to_interval(&s, &s.full_subset(), &phi, 1.0, &Interval::closed(0.0, 0.4))
            .unwrap();
        assert_eq!(f.tabulate(&s).unwrap(), phi.tabulate(&s).unwrap());
    }

    #[test]
    fn rejects_non_lipschitz_data() {
        let s = grid();
        let a = s.subset([0, 1]).unwrap();
        let phi = Field::tabulated(vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        let err = mcshane_envelopes(&s, &a, &phi, 1.0).unwrap_err();
        assert!(matches!(err, LipError::NotLipschitz { p: 0, q: 1, .. }));
        let empty = s.subset([]).unwrap();
        assert_eq!(
            mcshane_envelopes(&s, &empty, &phi, 1.0).unwrap_err(),
            LipError::EmptySubset
        );
    }

    #[test]
    fn duality_on_grid_example() {
        let s = grid();
        let a = s.subset([0, 2]).unwrap();
        assert!(duality_check(&s, &a, &Field::coordinate(0), 1.0)
            .unwrap()
            .holds());
        assert!(duality_check(&s, &a, &Field::constant(0.0), 1.0)
            .unwrap()
            .holds());
    }

    #[test]
    fn bounded_interval_example() {
        let s = grid();
        let a = s.subset([0, 4]).unwrap();
        let phi = Field::tabulated(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let f = extend_to_interval(&s, &a, &phi, 1.0, &Interval::closed(0.0, 1.0)).unwrap();
        assert_eq!(f.eval(&s, 2).unwrap(), 0.5);
        assert_eq!(f.eval(&s, 0).unwrap(), 0.0);
        assert_eq!(f.eval(&s, 4).unwrap(), 1.0);
        for p in 1..4 {
            let v = f.eval(&s, p).unwrap();
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn half_lines_choose_the_right_envelope() {
        let s = grid();
        let a = s.subset([1, 3]).unwrap();
        let phi = Field::tabulated(vec![0.0, 0.5, 0.0, 0.75, 0.0]);
        let pos =
            extend_to_interval(&s, &a, &phi, 1.0, &Interval::open(0.0, f64::INFINITY)).unwrap();
        for p in s.points() {
            assert!(pos.eval(&s, p).unwrap() > 0.0);
        }
        let env = mcshane_envelopes(&s, &a, &phi, 1.0).unwrap();
        assert_eq!(pos.tabulate(&s).unwrap(), env.upper.tabulate(&s).unwrap());
        let whole = extend_to_interval(&s, &a, &phi, 1.0, &Interval::real_line()).unwrap();
        assert_eq!(whole.tabulate(&s).unwrap(), env.lower.tabulate(&s).unwrap());
        assert!(extend_to_interval(&s, &a, &phi, 1.0, &Interval::closed(0.6, 1.0)).is_err());
        assert!(extend_to_interval(&s, &a, &phi, 1.0, &Interval::closed(1.0, 1.0)).is_err());
    }

    #[test]
    fn pointwise_envelope_example() {
        let s = MetricSpace::grid(0.0, 2.0, 1.0).unwrap();
        let a = s.subset([0, 2]).unwrap();
        let phi = Field::tabulated(vec![0.0, 0.0, 1.0]);
        let w = PointwiseWitness::new([(0, 1.0), (2, 2.0)]).unwrap();
        let env = pointwise_envelopes(&s, &a, &phi, &w).unwrap();
        assert_eq!(env.lower.eval(&s, 1).unwrap(), -1.0);
        assert_eq!(env.upper.eval(&s, 1).unwrap(), 1.0);
        let f =
            pointwise_extend_to_interval(&s, &a, &phi, &w, &Interval::closed(0.0, 1.0)).unwrap();
        assert_eq!(f.eval(&s, 1).unwrap(), 0.5);
    }

    #[test]
    fn witness_lifting_and_incompatibility() {
        let w = PointwiseWitness::new([(0, 0.25), (1, 3.0)]).unwrap();
        assert_eq!(w.constant(0), Some(1.0));
        assert_eq!(w.lifted(), &[0]);
        let s = MetricSpace::grid(0.0, 1.0, 1.0).unwrap();
        let a = s.full_subset();
        let phi = Field::tabulated(vec![0.0, 2.0]);
        assert!(matches!(
            pointwise_envelopes(&s, &a, &phi, &w).unwrap_err(),
            LipError::IncompatibleWitness { p: 0, q: 1, .. }
        ));
    }

    #[test]
    fn unbounded_pointwise_extensions_hit_phi_exactly() {
        let s = MetricSpace::grid(0.0, 4.0, 0.25).unwrap();
        let a = s.subset([0, 5, 16]).unwrap();
        let phi = Field::partial(s.len(), [(0, 3.0), (5, 4.0), (16, 1.5)]).unwrap();
        let w = PointwiseWitness::new([(0, 1.0), (5, 1.0), (16, 1.0)]).unwrap();
        for (delta, check) in [
            (
                Interval::real_line(),
                Box::new(|_: f64| true) as Box<dyn Fn(f64) -> bool>,
            ),
            (
                Interval::closed(1.0, f64::INFINITY),
                Box::new(|v: f64| v > 1.0),
            ),
            (
                Interval::new(f64::NEG_INFINITY, 5.0, true, true),
                Box::new(|v: f64| v < 5.0),
            ),
        ] {
            let f = pointwise_extend_to_interval(&s, &a, &phi, &w, &delta).unwrap();
            for p in s.points() {
                let v = f.eval(&s, p).unwrap();
                if a.contains(p) {
                    assert_eq!(v, phi.eval(&s, p).unwrap());
                } else {
                    assert!(check(v), "{delta} at {p}: {v}");
                }
            }
            let gen = generate_pointwise_witness(&s, &f).unwrap();
            assert!(gen.constants().values().all(|l| l.is_finite()));
        }
    }
}
