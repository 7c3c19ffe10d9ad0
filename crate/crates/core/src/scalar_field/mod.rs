//! Real-valued functions on a finite metric space.
//!
//! A [`Field`] is an immutable evaluation tree. Leaves are constants, tables,
//! coordinate projections and distance-to-set functions; inner nodes are the
//! usual pointwise combinators plus the few structured nodes the
//! constructions need (envelopes, staircase compositions, locally finite
//! series and convex combinations). Cloning is cheap: subtrees are shared.

mod expr;
mod interval;
mod lip;
mod transport;

use std::fmt;
use std::sync::Arc;

pub use expr::{field_from_json, parse_field_json};
pub use interval::Interval;
pub use lip::{
    global_lip, global_lip_over, global_lip_values, pointwise_lip, scaled_oscillation, LipEstimate,
};
pub use transport::Transport;

use crate::error::{LipError, Result};
use crate::metric_space::MetricSpace;
use crate::partition_of_unity::{staircase, staircase_partial_sum};

/// Per-point list of term indices that may be nonzero there.
pub type Activity = Arc<Vec<Vec<usize>>>;

/// Data point of an envelope: `value ∓ slope·d(point, ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub point: usize,
    pub value: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `sup_x [v_x − L_x d(x, p)]`
    Lower,
    /// `inf_x [v_x + L_x d(x, p)]`
    Upper,
}

#[derive(Debug)]
enum Node {
    Constant(f64),
    Table(Vec<Option<f64>>),
    Coordinate(usize),
    DistToSet(Vec<usize>),
    Scale(f64, Field),
    Sum(Vec<Field>),
    Difference(Field, Field),
    Product(Field, Field),
    Min(Vec<Field>),
    Max(Vec<Field>),
    Clamp(Field, f64, f64),
    Transport(Transport, Field),
    Staircase(usize, Field),
    StaircaseSum(Field),
    Envelope(Side, Arc<[Anchor]>),
    Series(Vec<Field>, Activity),
    Convex {
        weights: Vec<Field>,
        values: Vec<Field>,
        activity: Activity,
    },
    Patch(Field, Vec<Option<f64>>),
}

#[derive(Clone)]
pub struct Field(Arc<Node>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // envelopes and tables can be large; print the shape only
        match &*self.0 {
            Node::Constant(c) => write!(f, "Const({c})"),
            Node::Table(v) => write!(f, "Table[{}]", v.len()),
            Node::Coordinate(a) => write!(f, "Coord({a})"),
            Node::DistToSet(s) => write!(f, "DistToSet{s:?}"),
            Node::Scale(c, g) => write!(f, "Scale({c}, {g:?})"),
            Node::Sum(t) => write!(f, "Sum{t:?}"),
            Node::Difference(a, b) => write!(f, "Diff({a:?}, {b:?})"),
            Node::Product(a, b) => write!(f, "Mul({a:?}, {b:?})"),
            Node::Min(t) => write!(f, "Min{t:?}"),
            Node::Max(t) => write!(f, "Max{t:?}"),
            Node::Clamp(g, lo, hi) => write!(f, "Clamp({g:?}, {lo}, {hi})"),
            Node::Transport(t, g) => write!(f, "{}({g:?})", t.name()),
            Node::Staircase(k, g) => write!(f, "Staircase{k}({g:?})"),
            Node::StaircaseSum(g) => write!(f, "StaircaseSum({g:?})"),
            Node::Envelope(side, a) => write!(f, "{side:?}Envelope[{}]", a.len()),
            Node::Series(t, _) => write!(f, "Series[{}]", t.len()),
            Node::Convex { values, .. } => write!(f, "Convex[{}]", values.len()),
            Node::Patch(g, _) => write!(f, "Patch({g:?})"),
        }
    }
}

impl Field {
    fn node(node: Node) -> Self {
        Field(Arc::new(node))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Constant(c))
    }

    /// Total table: `values[p]` at point `p`.
    pub fn tabulated(values: Vec<f64>) -> Self {
        Self::node(Node::Table(values.into_iter().map(Some).collect()))
    }

    /// Table defined only at the listed points of a space with `n` points.
    pub fn partial(n: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut table = vec![None; n];
        for (p, v) in entries {
            *table
                .get_mut(p)
                .ok_or(LipError::PointOutOfRange { id: p, n })? = Some(v);
        }
        Ok(Self::node(Node::Table(table)))
    }

    pub fn coordinate(axis: usize) -> Self {
        Self::node(Node::Coordinate(axis))
    }

    /// `d(·, S)`; `S` must be nonempty.
    pub fn dist_to_set(ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(LipError::EmptySubset);
        }
        Ok(Self::node(Node::DistToSet(ids.to_vec())))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::node(Node::Scale(c, self.clone()))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn add(&self, other: &Field) -> Self {
        Self::sum(vec![self.clone(), other.clone()])
    }

    pub fn sum(terms: Vec<Field>) -> Self {
        Self::node(Node::Sum(terms))
    }

    pub fn sub(&self, other: &Field) -> Self {
        Self::node(Node::Difference(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Field) -> Self {
        Self::node(Node::Product(self.clone(), other.clone()))
    }

    pub fn min_of(terms: Vec<Field>) -> Self {
        Self::node(Node::Min(terms))
    }

    pub fn max_of(terms: Vec<Field>) -> Self {
        Self::node(Node::Max(terms))
    }

    pub fn min(&self, other: &Field) -> Self {
        Self::min_of(vec![self.clone(), other.clone()])
    }

    pub fn max(&self, other: &Field) -> Self {
        Self::max_of(vec![self.clone(), other.clone()])
    }

    pub fn abs(&self) -> Self {
        self.max(&self.neg())
    }

    pub fn clamp(&self, lo: f64, hi: f64) -> Self {
        Self::node(Node::Clamp(self.clone(), lo, hi))
    }

    pub fn transport(&self, t: Transport) -> Self {
        Self::node(Node::Transport(t, self.clone()))
    }

    /// `ℓ_k ∘ self`.
    pub fn staircase(&self, k: usize) -> Self {
        Self::node(Node::Staircase(k, self.clone()))
    }

    /// `Σ_{k ≤ ⌈1/t⌉} ℓ_k(t)` with `t = self(p)`: the staircase series
    /// truncated at its activity bound, summed in telescoped form.
    pub fn staircase_sum(&self) -> Self {
        Self::node(Node::StaircaseSum(self.clone()))
    }

    pub fn envelope(side: Side, anchors: Vec<Anchor>) -> Self {
        Self::node(Node::Envelope(side, anchors.into()))
    }

    /// Locally finite series: at `p` only `terms[i]` with `i ∈ activity[p]`
    /// are summed.
    pub fn series(terms: Vec<Field>, activity: Activity) -> Self {
        Self::node(Node::Series(terms, activity))
    }

    /// `Σ w_i v_i / Σ w_i` over the active indices with positive weight,
    /// evaluated as `v_b + Σ w_i (v_i − v_b) / Σ w_i` around the first such
    /// index `b`, so that equal values are reproduced exactly.
    pub fn convex_combination(weights: Vec<Field>, values: Vec<Field>, activity: Activity) -> Self {
        assert_eq!(weights.len(), values.len());
        Self::node(Node::Convex {
            weights,
            values,
            activity,
        })
    }

    /// `self` with its values replaced at the listed points.
    pub fn patched(
        &self,
        n: usize,
        entries: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        let mut table = vec![None; n];
        for (p, v) in entries {
            *table
                .get_mut(p)
                .ok_or(LipError::PointOutOfRange { id: p, n })? = Some(v);
        }
        Ok(Self::node(Node::Patch(self.clone(), table)))
    }

    /// Anchors of an envelope node.
    pub fn anchors(&self) -> Option<(Side, &[Anchor])> {
        match &*self.0 {
            Node::Envelope(side, a) => Some((*side, a)),
            _ => None,
        }
    }

    pub fn eval(&self, space: &MetricSpace, p: usize) -> Result<f64> {
        space.check_point(p)?;
        self.eval_at(space, p)
    }

    fn eval_at(&self, space: &MetricSpace, p: usize) -> Result<f64> {
        Ok(match &*self.0 {
            Node::Constant(c) => *c,
            Node::Table(t) => t
                .get(p)
                .copied()
                .flatten()
                .ok_or(LipError::Undefined { point: p })?,
            Node::Coordinate(axis) => space.coordinate(p, *axis)?,
            Node::DistToSet(ids) => {
                if let Some(&bad) = ids.iter().find(|&&i| i >= space.len()) {
                    return Err(LipError::PointOutOfRange {
                        id: bad,
                        n: space.len(),
                    });
                }
                space.d_set(p, ids)
            }
            Node::Scale(c, g) => c * g.eval_at(space, p)?,
            Node::Sum(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval_at(space, p)?;
                }
                acc
            }
            Node::Difference(a, b) => a.eval_at(space, p)? - b.eval_at(space, p)?,
            Node::Product(a, b) => {
                let x = a.eval_at(space, p)?;
                if x == 0.0 {
                    // zero factors annihilate, even where the other side is undefined
                    0.0
                } else {
                    x * b.eval_at(space, p)?
                }
            }
            Node::Min(terms) => {
                let mut acc = f64::INFINITY;
                for t in terms {
                    acc = acc.min(t.eval_at(space, p)?);
                }
                acc
            }
            Node::Max(terms) => {
                let mut acc = f64::NEG_INFINITY;
                for t in terms {
                    acc = acc.max(t.eval_at(space, p)?);
                }
                acc
            }
            Node::Clamp(g, lo, hi) => g.eval_at(space, p)?.max(*lo).min(*hi),
            Node::Transport(t, g) => {
                let v = g.eval_at(space, p)?;
                t.apply(v).ok_or(LipError::TransportDomain {
                    transport: t.name(),
                    point: p,
                    value: v,
                })?
            }
            Node::Staircase(k, g) => {
                let t = g.eval_at(space, p)?;
                staircase(*k, t).map_err(|_| LipError::TransportDomain {
                    transport: "staircase",
                    point: p,
                    value: t,
                })?
            }
            Node::StaircaseSum(g) => {
                let t = g.eval_at(space, p)?;
                if !(t > 0.0) {
                    return Err(LipError::TransportDomain {
                        transport: "staircase",
                        point: p,
                        value: t,
                    });
                }
                staircase_partial_sum((1.0 / t).ceil() as usize, t)
            }
            Node::Envelope(side, anchors) => eval_envelope(space, *side, anchors, p),
            Node::Series(terms, activity) => {
                let mut acc = 0.0;
                if let Some(active) = activity.get(p) {
                    for &i in active {
                        acc += terms[i].eval_at(space, p)?;
                    }
                }
                acc
            }
            Node::Convex {
                weights,
                values,
                activity,
            } => {
                let mut picked: Vec<(f64, f64)> = Vec::new();
                for &i in activity.get(p).map(Vec::as_slice).unwrap_or(&[]) {
                    let w = weights[i].eval_at(space, p)?;
                    if w > 0.0 {
                        picked.push((w, values[i].eval_at(space, p)?));
                    }
                }
                let Some(&(_, base)) = picked.first() else {
                    return Err(LipError::Undefined { point: p });
                };
                let total: f64 = picked.iter().map(|(w, _)| w).sum();
                let shift: f64 = picked.iter().map(|(w, v)| w * (v - base)).sum();
                base + shift / total
            }
            Node::Patch(g, table) => match table.get(p).copied().flatten() {
                Some(v) => v,
                None => g.eval_at(space, p)?,
            },
        })
    }

    /// Values at every point of the space.
    pub fn tabulate(&self, space: &MetricSpace) -> Result<Vec<f64>> {
        space.points().map(|p| self.eval_at(space, p)).collect()
    }

    /// Replace the tree by its table on `space`.
    pub fn materialize(&self, space: &MetricSpace) -> Result<Field> {
        if let Node::Table(t) = &*self.0 {
            if t.len() == space.len() && t.iter().all(Option::is_some) {
                return Ok(self.clone());
            }
        }
        Ok(Field::tabulated(self.tabulate(space)?))
    }
}

/// Points that are anchors evaluate to their own value; elsewhere the
/// sup/inf runs over all anchors.
fn eval_envelope(space: &MetricSpace, side: Side, anchors: &[Anchor], p: usize) -> f64 {
    if let Some(a) = anchors.iter().find(|a| a.point == p) {
        return a.value;
    }
    match side {
        Side::Lower => anchors
            .iter()
            .map(|a| a.value - a.slope * space.d(a.point, p))
            .fold(f64::NEG_INFINITY, f64::max),
        Side::Upper => anchors
            .iter()
            .map(|a| a.value + a.slope * space.d(a.point, p))
            .fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> MetricSpace {
        MetricSpace::grid(0.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn constant_and_dist_to_set() {
        let s = grid();
        assert_eq!(Field::constant(3.0).eval(&s, 2).unwrap(), 3.0);
        let d0 = Field::dist_to_set(&[0]).unwrap();
        assert_eq!(d0.eval(&s, 4).unwrap(), 2.0);
    }

    #[test]
    fn reciprocal_domain_error() {
        let s = grid();
        let f = Field::dist_to_set(&[0])
            .unwrap()
            .transport(Transport::Reciprocal);
        assert!(matches!(
            f.eval(&s, 0),
            Err(LipError::TransportDomain { point: 0, .. })
        ));
        assert_eq!(f.eval(&s, 4).unwrap(), 0.5);
    }

    #[test]
    fn combinators() {
        let s = grid();
        let x = Field::coordinate(0);
        let f = x.mul(&x).sub(&Field::constant(1.0)).abs().clamp(0.0, 2.0);
        let vals = f.tabulate(&s).unwrap();
        assert_eq!(vals, vec![1.0, 0.75, 0.0, 1.25, 2.0]);
        assert_eq!(x.scale(2.0).add(&x).eval(&s, 2).unwrap(), 3.0);
        assert_eq!(
            Field::min_of(vec![x.clone(), Field::constant(0.7)])
                .eval(&s, 4)
                .unwrap(),
            0.7
        );
    }

    #[test]
    fn partial_table_is_undefined_off_domain() {
        let s = grid();
        let f = Field::partial(5, [(1, 4.0)]).unwrap();
        assert_eq!(f.eval(&s, 1).unwrap(), 4.0);
        assert_eq!(f.eval(&s, 2).unwrap_err(), LipError::Undefined { point: 2 });
        assert!(Field::partial(5, [(9, 1.0)]).is_err());
    }

    #[test]
    fn series_sums_only_active_terms() {
        let s = grid();
        let terms = vec![
            Field::constant(1.0),
            Field::constant(10.0),
            Field::constant(100.0),
        ];
        let activity = Arc::new(vec![vec![0], vec![0, 1], vec![], vec![2], vec![0, 1, 2]]);
        let f = Field::series(terms, activity);
        assert_eq!(f.tabulate(&s).unwrap(), vec![1.0, 11.0, 0.0, 100.0, 111.0]);
    }

    #[test]
    fn convex_combination_reproduces_equal_values_exactly() {
        let s = grid();
        let v = 0.1 + 0.2;
        let weights = vec![Field::constant(1.0 / 3.0), Field::constant(2.0 / 3.0)];
        let values = vec![Field::constant(v), Field::constant(v)];
        let f = Field::convex_combination(weights, values, Arc::new(vec![vec![0, 1]; 5]));
        assert_eq!(f.eval(&s, 0).unwrap(), v);

        let weights = vec![Field::constant(1.0), Field::constant(3.0)];
        let values = vec![Field::constant(0.0), Field::constant(4.0)];
        let g = Field::convex_combination(weights, values, Arc::new(vec![vec![0, 1]; 5]));
        assert_eq!(g.eval(&s, 0).unwrap(), 3.0);
    }

    #[test]
    fn envelope_evaluation() {
        let s = grid();
        let anchors = vec![
            Anchor {
                point: 0,
                value: 0.0,
                slope: 1.0,
            },
            Anchor {
                point: 2,
                value: 1.0,
                slope: 1.0,
            },
        ];
        let lower = Field::envelope(Side::Lower, anchors.clone());
        let upper = Field::envelope(Side::Upper, anchors);
        assert_eq!(lower.eval(&s, 3).unwrap(), 0.5);
        assert_eq!(upper.eval(&s, 3).unwrap(), 1.5);
        assert_eq!(lower.eval(&s, 2).unwrap(), 1.0);
    }

    #[test]
    fn materialize_matches_tree() {
        let s = grid();
        let f = Field::coordinate(0).transport(Transport::Arctan);
        let m = f.materialize(&s).unwrap();
        assert_eq!(f.tabulate(&s).unwrap(), m.tabulate(&s).unwrap());
    }
}
