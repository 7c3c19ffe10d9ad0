//! Selections for open-interval-valued mappings `Ω(x) = (g(x), h(x))`,
//! insertion between semicontinuous bounds, and decreasing approximation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LipError, Result};
use crate::local_lipschitz::{generate_local_witness, local_extend, LocalWitness};
use crate::metric_space::{MetricSpace, Subset};
use crate::partition_of_unity::{frolik_grouped, CozeroCover, PartitionOfUnity};
use crate::scalar_field::{Field, Interval};

pub const START_DEPTH: u32 = 3;
pub const MAX_DEPTH: u32 = 20;

/// `Ω(x) = (g(x), h(x))`; a missing bound stands for `∓∞`.
#[derive(Debug, Clone)]
pub struct IntervalMapping {
    pub lower: Option<Field>,
    pub upper: Option<Field>,
}

/// Sampled bounds with infinite sides replaced by finite sentinels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// The bounds as given, possibly infinite.
    pub raw_lower: Vec<f64>,
    pub raw_upper: Vec<f64>,
}

impl IntervalMapping {
    pub fn new(lower: Option<Field>, upper: Option<Field>) -> Self {
        Self { lower, upper }
    }

    pub fn between(lower: Field, upper: Field) -> Self {
        Self::new(Some(lower), Some(upper))
    }

    /// Tabulates `g` and `h`, checks `g < h`, and replaces infinite values by
    /// `min h − s` and `max g + s` with `s` the larger of 1 and the finite
    /// spread of the data.
    pub fn sample(&self, space: &MetricSpace) -> Result<SampledBounds> {
        let tab = |f: &Option<Field>, fill: f64| -> Result<Vec<f64>> {
            match f {
                Some(f) => f.tabulate(space),
                None => Ok(vec![fill; space.len()]),
            }
        };
        let raw_lower = tab(&self.lower, f64::NEG_INFINITY)?;
        let raw_upper = tab(&self.upper, f64::INFINITY)?;
        for p in space.points() {
            let (g, h) = (raw_lower[p], raw_upper[p]);
            if g.is_nan() || h.is_nan() || !(g < h) || g == f64::INFINITY || h == f64::NEG_INFINITY
            {
                return Err(LipError::EnvelopeOrder {
                    point: p,
                    lower: g,
                    upper: h,
                });
            }
        }
        let finite: Vec<f64> = raw_lower
            .iter()
            .chain(&raw_upper)
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        let (lo, hi) = finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let spread = if finite.is_empty() {
            1.0
        } else {
            (hi - lo).max(1.0)
        };
        let min_h = raw_upper
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        let max_g = raw_lower
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let g_fill = if min_h.is_finite() {
            min_h - spread
        } else if max_g.is_finite() {
            max_g - spread
        } else {
            -spread
        };
        let h_fill = if max_g.is_finite() {
            max_g + spread
        } else if min_h.is_finite() {
            min_h + spread
        } else {
            spread
        };
        let lower = raw_lower
            .iter()
            .map(|&g| if g.is_finite() { g } else { g_fill })
            .collect();
        let upper = raw_upper
            .iter()
            .map(|&h| if h.is_finite() { h } else { h_fill })
            .collect();
        Ok(SampledBounds {
            lower,
            upper,
            raw_lower,
            raw_upper,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphOpenReport {
    /// Every sampled `x′` with `d(x, x′) < radius` has `[s, t] ⊂ Ω(x′)`.
    pub radius: f64,
    /// Nearest sample failing the inclusion, when it is a nearest neighbor
    /// of `x` (so no sampled neighborhood works).
    pub counterexample: Option<usize>,
    /// First failing sample in distance order, if any.
    pub first_failure: Option<usize>,
    pub checked: usize,
}

impl GraphOpenReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Searches the sample for a ball around `x` on which `[s, t] ⊂ Ω`.
pub fn graph_open_check(
    space: &MetricSpace,
    omega: &IntervalMapping,
    x: usize,
    s: f64,
    t: f64,
) -> Result<GraphOpenReport> {
    space.check_point(x)?;
    let b = omega.sample(space)?;
    let inside = |p: usize| b.raw_lower[p] < s && t < b.raw_upper[p];
    if !(s < t) || !inside(x) {
        return Err(LipError::InvalidParameter(format!(
            "probe [{s}, {t}] is not inside Ω({x}) = ({}, {})",
            b.raw_lower[x], b.raw_upper[x]
        )));
    }
    let mut order: Vec<usize> = space.points().filter(|&p| p != x).collect();
    order.sort_by(|&p, &q| space.d(x, p).total_cmp(&space.d(x, q)).then(p.cmp(&q)));
    let nearest = order.first().map(|&p| space.d(x, p));
    let mut checked = 0;
    for &p in &order {
        checked += 1;
        if !inside(p) {
            let r = space.d(x, p);
            return Ok(GraphOpenReport {
                radius: r,
                counterexample: nearest
                    .is_some_and(|d0| r <= d0 * (1.0 + 1e-9))
                    .then_some(p),
                first_failure: Some(p),
                checked,
            });
        }
    }
    Ok(GraphOpenReport {
        radius: space.diameter(),
        counterexample: None,
        first_failure: None,
        checked,
    })
}

/// Dyadic level `k / 2^depth` nearest the midpoint of `(g, h)` at the
/// smallest depth that has one.
fn simplest_dyadic(g: f64, h: f64, max_depth: u32) -> Option<(u32, f64)> {
    for m in 0..=max_depth {
        let scale = 2f64.powi(m as i32);
        let lo = (g * scale).floor() + 1.0;
        let hi = (h * scale).ceil() - 1.0;
        if lo <= hi {
            let mid = (0.5 * (g + h) * scale).round().clamp(lo, hi);
            let r = mid / scale;
            if g < r && r < h {
                return Some((m, r));
            }
        }
    }
    None
}

/// Denominator exponent of a dyadic rational.
fn dyadic_depth(r: f64) -> u32 {
    let mut m = 0;
    while (r * 2f64.powi(m as i32)).fract() != 0.0 && m < 1100 {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicGrid {
    /// Grid depth `m`: levels are multiples of `2^-m`.
    pub depth: u32,
    /// Levels kept, in the order they index the cover.
    pub levels: Vec<f64>,
}

/// Picks dyadic levels so that every sample has one inside `(g, h)`.
///
/// Each point proposes its simplest admissible dyadic; a greedy set cover
/// keeps few of them (ties go to the shallower level, then the smaller one),
/// which keeps the geometric weights of the partition of unity well above
/// underflow.
pub fn dyadic_grid(bounds: &SampledBounds, start_depth: u32, max_depth: u32) -> Result<DyadicGrid> {
    let n = bounds.lower.len();
    let mut candidates = Vec::with_capacity(n);
    let mut depth = start_depth;
    for p in 0..n {
        let (g, h) = (bounds.lower[p], bounds.upper[p]);
        match simplest_dyadic(g, h, max_depth) {
            Some((m, r)) => {
                depth = depth.max(m);
                candidates.push(r);
            }
            None => {
                return Err(LipError::GridTooCoarse {
                    point: p,
                    depth: max_depth,
                })
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let admits = |r: f64, p: usize| bounds.lower[p] < r && r < bounds.upper[p];
    let mut uncovered: Vec<usize> = (0..n).collect();
    let mut levels = Vec::new();
    while !uncovered.is_empty() {
        let best = candidates
            .iter()
            .copied()
            .map(|r| (uncovered.iter().filter(|&&p| admits(r, p)).count(), r))
            .max_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(dyadic_depth(b.1).cmp(&dyadic_depth(a.1)))
                    .then(b.1.total_cmp(&a.1))
            })
            .map(|(_, r)| r)
            .expect("every point proposed a candidate");
        uncovered.retain(|&p| !admits(best, p));
        levels.push(best);
    }
    Ok(DyadicGrid { depth, levels })
}

/// `η_r = min(1, min(r − g, h − r)₊)`, positive exactly where `g < r < h`.
fn level_witness(bounds: &SampledBounds, r: f64) -> Vec<f64> {
    bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(&g, &h)| (r - g).min(h - r).clamp(0.0, 1.0))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub field: Field,
    pub grid: DyadicGrid,
    pub pou: PartitionOfUnity,
    pub values: Vec<f64>,
    /// `min_x min(f(x) − g(x), h(x) − f(x))` over the raw bounds.
    pub min_margin: f64,
}

fn margin(bounds: &SampledBounds, vals: &[f64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (p, &v) in vals.iter().enumerate() {
        let (g, h) = (bounds.raw_lower[p], bounds.raw_upper[p]);
        if !(g < v && v < h) {
            return Err(LipError::NotASelection {
                point: p,
                value: v,
                lower: g,
                upper: h,
            });
        }
        best = best.min((v - g).min(h - v));
    }
    Ok(best)
}

/// A locally Lipschitz `f` with `g < f < h` at every sample:
/// `f = Σ ξ_r · r` over dyadic levels `r`, `ξ` a partition of unity
/// subordinated to `U_r = {g < r < h}`.
pub fn select(space: &MetricSpace, omega: &IntervalMapping) -> Result<Selection> {
    select_with(space, omega, START_DEPTH, MAX_DEPTH)
}

pub fn select_with(
    space: &MetricSpace,
    omega: &IntervalMapping,
    start_depth: u32,
    max_depth: u32,
) -> Result<Selection> {
    let bounds = omega.sample(space)?;
    let grid = dyadic_grid(&bounds, start_depth, max_depth)?;
    let witnesses = grid
        .levels
        .iter()
        .map(|&r| Field::tabulated(level_witness(&bounds, r)))
        .collect();
    let cover = CozeroCover::from_witnesses(space, witnesses)?;
    let frolik = frolik_grouped(space, &cover)?;
    let values: Vec<Field> = grid.levels.iter().map(|&r| Field::constant(r)).collect();
    let field = Field::convex_combination(
        frolik.pou.members().to_vec(),
        values,
        frolik.pou.activity().clone(),
    );
    let vals = field.tabulate(space)?;
    let min_margin = margin(&bounds, &vals)?;
    Ok(Selection {
        field: Field::tabulated(vals.clone()),
        grid,
        pou: frolik.pou,
        values: vals,
        min_margin,
    })
}

/// Witness generated for output values at the default radius.
pub fn output_witness(space: &MetricSpace, vals: &[f64]) -> Result<LocalWitness> {
    generate_local_witness(space, vals, &vec![default_radius(space); space.len()])
}

/// Radius used for witnesses generated on outputs: an eighth of the
/// diameter, but never below one and a half sample spacings.
pub fn default_radius(space: &MetricSpace) -> f64 {
    let sep = space.min_separation();
    let diam = space.diameter();
    if !sep.is_finite() || diam <= 0.0 {
        return 1.0;
    }
    (diam / 8.0).max(1.5 * sep)
}

#[derive(Debug, Clone)]
pub struct SelectionExtension {
    pub field: Field,
    pub values: Vec<f64>,
    /// Points where the plain extension left `Ω`.
    pub blended: Vec<usize>,
    pub witness: LocalWitness,
    pub min_margin: f64,
}

/// Extends a locally Lipschitz selection `φ` of `Ω|A` to a selection of `Ω`.
///
/// `φ` is first extended to `G` with values in ℝ. Where `G` leaves `Ω`
/// (the set `B`), it is blended with a global selection `H` using weights
/// `d(x, B)` and `d(x, A)`.
pub fn select_extend(
    space: &MetricSpace,
    omega: &IntervalMapping,
    a: &Subset,
    phi: &Field,
    w: &LocalWitness,
) -> Result<SelectionExtension> {
    let bounds = omega.sample(space)?;
    for &x in a.ids() {
        let v = phi.eval(space, x)?;
        if !(bounds.raw_lower[x] < v && v < bounds.raw_upper[x]) {
            return Err(LipError::NotASelection {
                point: x,
                value: v,
                lower: bounds.raw_lower[x],
                upper: bounds.raw_upper[x],
            });
        }
    }
    let ext = local_extend(space, a, phi, w, &Interval::real_line())?;
    let g_vals = ext.field.tabulate(space)?;
    let bad: Vec<usize> = space
        .points()
        .filter(|&x| !(bounds.raw_lower[x] < g_vals[x] && g_vals[x] < bounds.raw_upper[x]))
        .collect();
    let field = if bad.is_empty() {
        ext.field.clone()
    } else {
        let h = select(space, omega)?;
        let weights = vec![Field::dist_to_set(&bad)?, Field::dist_to_set(a.ids())?];
        Field::convex_combination(
            weights,
            vec![ext.field.clone(), h.field],
            Arc::new(vec![vec![0, 1]; space.len()]),
        )
    };
    let values = field.tabulate(space)?;
    let min_margin = margin(&bounds, &values)?;
    let witness = output_witness(space, &values)?;
    Ok(SelectionExtension {
        field: Field::tabulated(values.clone()),
        values,
        blended: bad,
        witness,
        min_margin,
    })
}

/// Data to reproduce on a subset when inserting.
#[derive(Debug, Clone)]
pub struct Prescribed<'a> {
    pub subset: &'a Subset,
    pub values: &'a Field,
    pub witness: &'a LocalWitness,
}

/// A locally Lipschitz `f` with `g < f < h`, agreeing with the prescribed
/// data when given.
pub fn insert(
    space: &MetricSpace,
    lower: Option<Field>,
    upper: Option<Field>,
    prescribed: Option<Prescribed<'_>>,
) -> Result<SelectionExtension> {
    let omega = IntervalMapping::new(lower, upper);
    match prescribed {
        Some(pre) if !pre.subset.is_empty() => {
            select_extend(space, &omega, pre.subset, pre.values, pre.witness)
        }
        _ => {
            let sel = select(space, &omega)?;
            let witness = output_witness(space, &sel.values)?;
            Ok(SelectionExtension {
                field: sel.field,
                values: sel.values,
                blended: Vec::new(),
                witness,
                min_margin: sel.min_margin,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproxStep {
    pub field: Field,
    pub values: Vec<f64>,
    /// `max_x f_n(x) − φ(x)`.
    pub residual: f64,
    pub witness: LocalWitness,
    pub depth: u32,
}

/// `φ < f_1 < φ + 1` and `φ < f_{n+1} < (φ + f_n)/2`: a strictly
/// decreasing sequence of locally Lipschitz fields converging uniformly to
/// `φ` with `f_n − φ < 2^{1−n}`.
pub fn decreasing_approx(
    space: &MetricSpace,
    phi: &Field,
    n_max: usize,
) -> Result<Vec<ApproxStep>> {
    if n_max == 0 {
        return Err(LipError::InvalidParameter(
            "n_max must be at least 1".into(),
        ));
    }
    let base = phi.tabulate(space)?;
    let lower = Field::tabulated(base.clone());
    let mut upper = lower.add(&Field::constant(1.0)).materialize(space)?;
    let mut steps = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let sel = select(
            space,
            &IntervalMapping::between(lower.clone(), upper.clone()),
        )?;
        let residual = sel
            .values
            .iter()
            .zip(&base)
            .map(|(f, p)| f - p)
            .fold(f64::NEG_INFINITY, f64::max);
        let witness = generate_local_witness(
            space,
            &sel.values,
            &vec![default_radius(space); space.len()],
        )?;
        upper = Field::tabulated(
            base.iter()
                .zip(&sel.values)
                .map(|(p, f)| 0.5 * (p + f))
                .collect(),
        );
        steps.push(ApproxStep {
            field: sel.field,
            values: sel.values,
            residual,
            witness,
            depth: sel.grid.depth,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_bounds(s: &MetricSpace) -> IntervalMapping {
        let g: Vec<f64> = s
            .points()
            .map(|p| {
                if s.coordinate(p, 0).unwrap() >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let h: Vec<f64> = s
            .points()
            .map(|p| {
                if s.coordinate(p, 0).unwrap() > 0.0 {
                    2.0
                } else {
                    1.2
                }
            })
            .collect();
        IntervalMapping::between(Field::tabulated(g), Field::tabulated(h))
    }

    #[test]
    fn constant_bounds_select_one_half() {
        let s = MetricSpace::grid(0.0, 1.0, 0.1).unwrap();
        let omega = IntervalMapping::between(Field::constant(0.0), Field::constant(1.0));
        let sel = select(&s, &omega).unwrap();
        assert_eq!(sel.grid.levels, vec![0.5]);
        assert!(sel.values.iter().all(|&v| v == 0.5));
        let probe = graph_open_check(&s, &omega, 3, 0.25, 0.75).unwrap();
        assert!(probe.passed());
        assert_eq!(probe.radius, s.diameter());
    }

    #[test]
    fn step_selection_is_strict() {
        let s = MetricSpace::grid(-2.0, 2.0, 0.05).unwrap();
        let omega = step_bounds(&s);
        let sel = select(&s, &omega).unwrap();
        assert!(sel.min_margin > 0.0);
        let zero = s.grid_index(0.0).unwrap();
        assert!(sel.values[zero] > 1.0 && sel.values[zero] < 1.2);
        let probe = graph_open_check(&s, &omega, zero, 1.05, 1.15).unwrap();
        assert!(probe.passed());
    }

    #[test]
    fn non_usc_lower_bound_gives_counterexample() {
        let s = MetricSpace::grid(-1.0, 1.0, 0.1).unwrap();
        let g: Vec<f64> = s
            .points()
            .map(|p| {
                if s.coordinate(p, 0).unwrap() > 1e-9 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let omega = IntervalMapping::between(Field::tabulated(g), Field::constant(2.0));
        let zero = s.grid_index(0.0).unwrap();
        let probe = graph_open_check(&s, &omega, zero, 0.5, 1.5).unwrap();
        assert!(!probe.passed());
        assert_eq!(probe.counterexample, Some(zero + 1));
        assert!(graph_open_check(&s, &omega, zero, 1.5, 0.5).is_err());
    }

    #[test]
    fn infinite_lower_bound() {
        let s = MetricSpace::grid(-1.0, 1.0, 0.1).unwrap();
        let omega = IntervalMapping::new(None, Some(Field::coordinate(0).abs()));
        let sel = select(&s, &omega).unwrap();
        for p in s.points() {
            assert!(sel.values[p] < s.coordinate(p, 0).unwrap().abs());
        }
    }

    #[test]
    fn order_violation_rejected() {
        let s = MetricSpace::grid(0.0, 1.0, 0.5).unwrap();
        let omega = IntervalMapping::between(Field::constant(1.0), Field::constant(1.0));
        assert!(matches!(
            select(&s, &omega).unwrap_err(),
            LipError::EnvelopeOrder { point: 0, .. }
        ));
    }

    #[test]
    fn too_thin_gap_is_reported() {
        let s = MetricSpace::grid(0.0, 1.0, 0.5).unwrap();
        let omega = IntervalMapping::between(Field::constant(0.1), Field::constant(0.1 + 1e-9));
        assert!(matches!(
            select(&s, &omega).unwrap_err(),
            LipError::GridTooCoarse {
                depth: MAX_DEPTH,
                ..
            }
        ));
    }

    #[test]
    fn insert_with_prescribed_point() {
        let s = MetricSpace::grid(0.0, 2.0, 0.1).unwrap();
        let one = s.grid_index(1.0).unwrap();
        let a = s.subset([one]).unwrap();
        let phi = Field::partial(s.len(), [(one, 0.9)]).unwrap();
        let w = LocalWitness::uniform([one], 0.5, 0.0).unwrap();
        let out = insert(
            &s,
            Some(Field::constant(0.0)),
            Some(Field::constant(1.0)),
            Some(Prescribed {
                subset: &a,
                values: &phi,
                witness: &w,
            }),
        )
        .unwrap();
        assert_eq!(out.values[one], 0.9);
        assert!(out.values.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn select_extend_blends_outside_omega() {
        let s = MetricSpace::grid(0.0, 3.0, 0.05).unwrap();
        let a = s
            .subset(s.points().filter(|&p| {
                let t = s.coordinate(p, 0).unwrap();
                (1.0 - 1e-9..=2.0 + 1e-9).contains(&t)
            }))
            .unwrap();
        let phi = Field::coordinate(0).transport(crate::scalar_field::Transport::Reciprocal);
        let w = LocalWitness::uniform(a.ids().iter().copied(), 0.2, 1.0 / 0.36).unwrap();
        let omega = IntervalMapping::between(Field::constant(0.0), Field::constant(2.0));
        let out = select_extend(&s, &omega, &a, &phi, &w).unwrap();
        for p in s.points() {
            assert!(out.values[p] > 0.0 && out.values[p] < 2.0);
            if a.contains(p) {
                assert_eq!(out.values[p], phi.eval(&s, p).unwrap());
            }
        }
        out.witness
            .verify(&s, &s.full_subset(), &out.values)
            .unwrap();
    }

    #[test]
    fn decreasing_approximation_of_abs() {
        let s = MetricSpace::grid(-1.0, 1.0, 0.05).unwrap();
        let phi = Field::coordinate(0).abs();
        let base = phi.tabulate(&s).unwrap();
        let steps = decreasing_approx(&s, &phi, 10).unwrap();
        for (i, st) in steps.iter().enumerate() {
            let n = i as i32 + 1;
            assert!(st.residual < 2f64.powi(1 - n));
            for p in s.points() {
                assert!(st.values[p] > base[p]);
                if i > 0 {
                    assert!(st.values[p] < steps[i - 1].values[p]);
                }
            }
        }
        assert!(steps[9].residual < 2f64.powi(-9));
    }
}
