//! Lipschitz partitions of unity subordinated to countable open covers.
//!
//! An open set is represented by a nonnegative witness field whose cozero
//! set is the open set. The pipeline is: normalize the witnesses, refine
//! them into a locally finite cover ([`mather_refine`]), rebuild witnesses
//! with geometric budgets, and multiply by the staircase family
//! [`staircase`] composed with the total witness ([`frolik_pou`]).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LipError, Result};
use crate::metric_space::MetricSpace;
use crate::scalar_field::{global_lip_values, Activity, Field};

/// Refuses explicit families larger than this; use the grouped form instead.
pub const MAX_EXPLICIT_MEMBERS: usize = 200_000;

/// `ℓ_k(t) = min(k, 1/t) − min(k − 1, 1/t)`.
pub fn staircase(k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(LipError::InvalidParameter(
            "staircase index starts at 1".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(LipError::InvalidParameter(format!(
            "staircase argument must be positive, got {t}"
        )));
    }
    let r = 1.0 / t;
    Ok((k as f64).min(r) - ((k - 1) as f64).min(r))
}

/// `Σ_{k ≤ K} ℓ_k(t)`, which telescopes to `min(K, 1/t)`.
pub fn staircase_partial_sum(k_max: usize, t: f64) -> f64 {
    (k_max as f64).min(1.0 / t)
}

/// Number of staircase terms that can be nonzero at `t`.
pub fn staircase_activity(t: f64) -> usize {
    (1.0 / t).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

/// Open cover given by witness fields `η_n ≥ 0` with `V_n = coz(η_n)`,
/// together with their sup bounds `b_n` and Lipschitz budgets `c_n`.
#[derive(Debug, Clone)]
pub struct CozeroCover {
    witnesses: Vec<Field>,
    tables: Vec<Vec<f64>>,
    bounds: Vec<f64>,
    budgets: Vec<f64>,
}

impl CozeroCover {
    /// Bounds and budgets are measured on the sample.
    pub fn from_witnesses(space: &MetricSpace, witnesses: Vec<Field>) -> Result<Self> {
        let mut tables = Vec::with_capacity(witnesses.len());
        let mut bounds = Vec::with_capacity(witnesses.len());
        let mut budgets = Vec::with_capacity(witnesses.len());
        for (n, w) in witnesses.iter().enumerate() {
            let t = w.tabulate(space)?;
            check_witness(n, &t)?;
            bounds.push(t.iter().copied().fold(0.0, f64::max));
            budgets.push(global_lip_values(space, &t).value);
            tables.push(t);
        }
        Ok(Self {
            witnesses,
            tables,
            bounds,
            budgets,
        })
    }

    /// Declared bounds and budgets; the sample must respect them.
    pub fn with_budgets(
        space: &MetricSpace,
        witnesses: Vec<Field>,
        bounds: Vec<f64>,
        budgets: Vec<f64>,
    ) -> Result<Self> {
        if bounds.len() != witnesses.len() || budgets.len() != witnesses.len() {
            return Err(LipError::InvalidParameter(
                "one bound and one budget per witness".into(),
            ));
        }
        let measured = Self::from_witnesses(space, witnesses)?;
        for n in 0..measured.len() {
            if measured.bounds[n] > bounds[n] {
                return Err(LipError::InvalidParameter(format!(
                    "witness {n} reaches {} above its bound {}",
                    measured.bounds[n], bounds[n]
                )));
            }
            if measured.budgets[n] > budgets[n] * (1.0 + 1e-9) + 1e-12 {
                return Err(LipError::InvalidParameter(format!(
                    "witness {n} has Lipschitz constant {} above its budget {}",
                    measured.budgets[n], budgets[n]
                )));
            }
        }
        Ok(Self {
            bounds,
            budgets,
            ..measured
        })
    }

    /// `V_n = ⋃ O(p_i, r_i)` with witness `min(cap, max_i (r_i − d(·, p_i))₊)`,
    /// which is 1-Lipschitz and bounded by `cap`.
    pub fn from_balls(space: &MetricSpace, unions: &[Vec<Ball>], cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(LipError::InvalidParameter(format!(
                "cap must be positive, got {cap}"
            )));
        }
        let mut witnesses = Vec::with_capacity(unions.len());
        for union in unions {
            let mut t = vec![0.0; space.len()];
            for b in union {
                space.check_point(b.center)?;
                for (x, v) in t.iter_mut().enumerate() {
                    *v = f64::max(*v, b.radius - space.d(b.center, x));
                }
            }
            witnesses.push(Field::tabulated(
                t.into_iter().map(|v| v.min(cap)).collect(),
            ));
        }
        let n = witnesses.len();
        Self::with_budgets(space, witnesses, vec![cap; n], vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn witness(&self, n: usize) -> &Field {
        &self.witnesses[n]
    }

    pub fn table(&self, n: usize) -> &[f64] {
        &self.tables[n]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn bound(&self, n: usize) -> f64 {
        self.bounds[n]
    }

    pub fn budget(&self, n: usize) -> f64 {
        self.budgets[n]
    }

    /// First sample point where no witness is positive.
    pub fn uncovered_point(&self, points: usize) -> Option<usize> {
        (0..points).find(|&p| self.tables.iter().all(|t| !(t[p] > 0.0)))
    }

    fn require_cover(&self, space: &MetricSpace) -> Result<()> {
        match self.uncovered_point(space.len()) {
            Some(point) => Err(LipError::NotACover { point }),
            None => Ok(()),
        }
    }
}

fn check_witness(n: usize, t: &[f64]) -> Result<()> {
    if let Some((p, v)) = t
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(LipError::InvalidParameter(format!(
            "witness {n} takes the value {v} at point {p}; witnesses must be finite and nonnegative"
        )));
    }
    Ok(())
}

fn pow2(n: usize) -> f64 {
    0.5f64.powi(n as i32)
}

/// Locally finite refinement `γ_n = max(η_n − η/2, 0)` with
/// `η = Σ η_n / 2ⁿ` (1-based `n`), after scaling each `η_n` into `[0, 2⁻ⁿ]`
/// with Lipschitz constant at most 1.
#[derive(Debug, Clone)]
pub struct MatherRefinement {
    /// Scaled input witnesses.
    pub normalized: Vec<Vec<f64>>,
    /// `η` at each point.
    pub total: Vec<f64>,
    /// Refined witnesses `γ_n`.
    pub refined: Vec<Vec<f64>>,
    /// Smallest `k` with `η(p) > 2⁻ᵏ`: every `γ_n` with `n > k` vanishes
    /// at `p`.
    pub activity_bound: Vec<usize>,
}

impl MatherRefinement {
    /// 0-based indices `n` with `γ_n(p) > 0`.
    pub fn active(&self, p: usize) -> Vec<usize> {
        (0..self.refined.len())
            .filter(|&n| self.refined[n][p] > 0.0)
            .collect()
    }
}

pub fn mather_refine(space: &MetricSpace, cover: &CozeroCover) -> Result<MatherRefinement> {
    if cover.is_empty() {
        return Err(LipError::NotACover { point: 0 });
    }
    cover.require_cover(space)?;
    let npts = space.len();
    let mut normalized = Vec::with_capacity(cover.len());
    for n in 0..cover.len() {
        let target = pow2(n + 1);
        let mut s: f64 = 1.0;
        if cover.bound(n) > 0.0 {
            s = s.min(target / cover.bound(n));
        }
        if cover.budget(n) > 0.0 {
            s = s.min(1.0 / cover.budget(n));
        }
        normalized.push(
            cover
                .table(n)
                .iter()
                .map(|v| (s * v).min(target))
                .collect::<Vec<_>>(),
        );
    }
    let mut total = vec![0.0; npts];
    for (n, t) in normalized.iter().enumerate() {
        let w = pow2(n + 1);
        for p in 0..npts {
            total[p] += t[p] * w;
        }
    }
    if let Some(point) = total.iter().position(|&e| !(e > 0.0)) {
        // positive witnesses lost to underflow
        return Err(LipError::NotACover { point });
    }
    let refined: Vec<Vec<f64>> = normalized
        .iter()
        .map(|t| {
            (0..npts)
                .map(|p| (t[p] - 0.5 * total[p]).max(0.0))
                .collect()
        })
        .collect();
    if let Some(point) = (0..npts).find(|&p| refined.iter().all(|g| g[p] <= 0.0)) {
        return Err(LipError::NotACover { point });
    }
    let activity_bound = total
        .iter()
        .map(|&e| {
            let mut k = 1;
            while !(e > pow2(k)) {
                k += 1;
            }
            k
        })
        .collect();
    Ok(MatherRefinement {
        normalized,
        total,
        refined,
        activity_bound,
    })
}

/// Which member of a partition of unity this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MemberLabel {
    /// `ξ_{nk} = η_n · ℓ_k(η)`, 1-based.
    Product { n: usize, k: usize },
    /// All members subordinated to cover set `n` (1-based), summed.
    Group { n: usize },
}

/// A locally finite family of nonnegative fields summing to one.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    members: Vec<Field>,
    labels: Vec<MemberLabel>,
    subordination: Vec<usize>,
    activity: Activity,
    cover_size: usize,
    truncation: Option<usize>,
}

impl PartitionOfUnity {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Field] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Field {
        &self.members[i]
    }

    pub fn labels(&self) -> &[MemberLabel] {
        &self.labels
    }

    /// 0-based cover index of each member.
    pub fn subordination(&self) -> &[usize] {
        &self.subordination
    }

    pub fn cover_size(&self) -> usize {
        self.cover_size
    }

    /// Largest staircase index kept, for families built from the staircase.
    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// Members that may be positive at `p`.
    pub fn active(&self, p: usize) -> &[usize] {
        self.activity.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn activity(&self) -> &Activity {
        &self.activity
    }

    /// Member values at `p`, zero off the activity set.
    pub fn values_at(&self, space: &MetricSpace, p: usize) -> Result<Vec<(usize, f64)>> {
        self.active(p)
            .iter()
            .map(|&i| Ok((i, self.members[i].eval(space, p)?)))
            .collect()
    }

    pub fn sum_at(&self, space: &MetricSpace, p: usize) -> Result<f64> {
        Ok(self.values_at(space, p)?.iter().map(|(_, v)| v).sum())
    }

    /// `tables[i][p]` for every member, evaluating only active entries.
    pub fn tabulate(&self, space: &MetricSpace) -> Result<Vec<Vec<f64>>> {
        let mut tables = vec![vec![0.0; space.len()]; self.len()];
        for p in space.points() {
            for (i, v) in self.values_at(space, p)? {
                tables[i][p] = v;
            }
        }
        Ok(tables)
    }
}

/// Output of [`frolik_pou`] and [`frolik_grouped`].
#[derive(Debug, Clone)]
pub struct FrolikPartition {
    pub refinement: MatherRefinement,
    /// Rebuilt witnesses `2⁻ⁿ · min(1, γ_n / β_n)`.
    pub witnesses: Vec<Vec<f64>>,
    /// `η = Σ η_n` over the rebuilt witnesses.
    pub total: Vec<f64>,
    pub pou: PartitionOfUnity,
}

fn rebuild(
    space: &MetricSpace,
    cover: &CozeroCover,
) -> Result<(MatherRefinement, Vec<Vec<f64>>, Vec<f64>)> {
    let refinement = mather_refine(space, cover)?;
    let witnesses: Vec<Vec<f64>> = refinement
        .refined
        .iter()
        .enumerate()
        .map(|(n, g)| {
            let beta = g.iter().copied().fold(0.0, f64::max);
            let scale = pow2(n + 1);
            g.iter()
                .map(|&v| {
                    if beta > 0.0 {
                        scale * (v / beta).min(1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut total = vec![0.0; space.len()];
    for w in &witnesses {
        for (t, v) in total.iter_mut().zip(w) {
            *t += v;
        }
    }
    if let Some(point) = total.iter().position(|&e| !(e > 0.0)) {
        return Err(LipError::NotACover { point });
    }
    Ok((refinement, witnesses, total))
}

fn live_sets(witnesses: &[Vec<f64>]) -> Vec<usize> {
    (0..witnesses.len())
        .filter(|&n| witnesses[n].iter().any(|&v| v > 0.0))
        .collect()
}

/// The product family `ξ_{nk} = η_n · (ℓ_k ∘ η)` for `k` up to the largest
/// staircase activity on the sample.
pub fn frolik_pou(space: &MetricSpace, cover: &CozeroCover) -> Result<FrolikPartition> {
    let (refinement, witnesses, total) = rebuild(space, cover)?;
    let k_max = total
        .iter()
        .map(|&e| staircase_activity(e))
        .max()
        .unwrap_or(1);
    let live = live_sets(&witnesses);
    if live.len().saturating_mul(k_max) > MAX_EXPLICIT_MEMBERS {
        return Err(LipError::InvalidParameter(format!(
            "{} cover sets times {k_max} staircase terms exceeds {MAX_EXPLICIT_MEMBERS} members; use the grouped partition",
            live.len()
        )));
    }
    let eta = Field::tabulated(total.clone());
    let mut members = Vec::new();
    let mut labels = Vec::new();
    let mut subordination = Vec::new();
    let mut slot = vec![usize::MAX; witnesses.len()];
    for &n in &live {
        slot[n] = members.len();
        let w = Field::tabulated(witnesses[n].clone());
        for k in 1..=k_max {
            members.push(w.mul(&eta.staircase(k)));
            labels.push(MemberLabel::Product { n: n + 1, k });
            subordination.push(n);
        }
    }
    let activity = space
        .points()
        .map(|p| {
            let kp = staircase_activity(total[p]);
            live.iter()
                .filter(|&&n| n < refinement.activity_bound[p])
                .flat_map(|&n| (0..kp).map(move |k| (n, k)))
                .map(|(n, k)| slot[n] + k)
                .collect()
        })
        .collect();
    let pou = PartitionOfUnity {
        members,
        labels,
        subordination,
        activity: Arc::new(activity),
        cover_size: cover.len(),
        truncation: Some(k_max),
    };
    Ok(FrolikPartition {
        refinement,
        witnesses,
        total,
        pou,
    })
}

/// Same construction with the staircase index summed out in closed form:
/// one member `η_n · Σ_{k ≤ ⌈1/η⌉} ℓ_k(η)` per cover set, equal to the
/// index-subordinated regrouping of [`frolik_pou`].
pub fn frolik_grouped(space: &MetricSpace, cover: &CozeroCover) -> Result<FrolikPartition> {
    let (refinement, witnesses, total) = rebuild(space, cover)?;
    let eta = Field::tabulated(total.clone()).staircase_sum();
    let members = witnesses
        .iter()
        .map(|w| Field::tabulated(w.clone()).mul(&eta))
        .collect();
    let live = live_sets(&witnesses);
    let activity = space
        .points()
        .map(|p| {
            live.iter()
                .copied()
                .filter(|&n| n < refinement.activity_bound[p])
                .collect()
        })
        .collect();
    let k_max = total
        .iter()
        .map(|&e| staircase_activity(e))
        .max()
        .unwrap_or(1);
    let pou = PartitionOfUnity {
        members,
        labels: (1..=cover.len())
            .map(|n| MemberLabel::Group { n })
            .collect(),
        subordination: (0..cover.len()).collect(),
        activity: Arc::new(activity),
        cover_size: cover.len(),
        truncation: Some(k_max),
    };
    Ok(FrolikPartition {
        refinement,
        witnesses,
        total,
        pou,
    })
}

/// Regroups members by cover index: `ξ_n = Σ_{α ↦ n} ξ_α`, with `ξ_n ≡ 0`
/// for indices nothing maps to.
pub fn index_subordinate(pou: &PartitionOfUnity, targets: usize) -> Result<PartitionOfUnity> {
    if let Some(&bad) = pou.subordination.iter().find(|&&n| n >= targets) {
        return Err(LipError::InvalidParameter(format!(
            "member subordinated to cover set {} of only {targets}",
            bad + 1
        )));
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); targets];
    for (alpha, &n) in pou.subordination.iter().enumerate() {
        groups[n].push(alpha);
    }
    // position of each member inside its group
    let mut local = vec![0; pou.len()];
    for g in &groups {
        for (i, &alpha) in g.iter().enumerate() {
            local[alpha] = i;
        }
    }
    let points = pou.activity.len();
    let mut group_activity: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); points]; targets];
    let mut activity = vec![Vec::new(); points];
    for p in 0..points {
        for &alpha in pou.active(p) {
            let n = pou.subordination[alpha];
            if group_activity[n][p].is_empty() {
                activity[p].push(n);
            }
            group_activity[n][p].push(local[alpha]);
        }
        activity[p].sort_unstable();
    }
    let members = groups
        .into_iter()
        .zip(group_activity)
        .map(|(g, act)| {
            let terms = g.iter().map(|&alpha| pou.members[alpha].clone()).collect();
            Field::series(terms, Arc::new(act))
        })
        .collect();
    Ok(PartitionOfUnity {
        members,
        labels: (1..=targets).map(|n| MemberLabel::Group { n }).collect(),
        subordination: (0..targets).collect(),
        activity: Arc::new(activity),
        cover_size: targets,
        truncation: pou.truncation,
    })
}

/// Writes a field with Lipschitz constant `k` as `m = max(1, ⌈k⌉)` copies of
/// `f / m`, each with constant at most 1.
pub fn nonexpansive_split(f: &Field, k: f64) -> Result<Vec<Field>> {
    if !k.is_finite() || k < 0.0 {
        return Err(LipError::InfiniteConstant(format!(
            "cannot split a field with Lipschitz constant {k}"
        )));
    }
    let m = (k.ceil() as usize).max(1);
    if m == 1 {
        return Ok(vec![f.clone()]);
    }
    let part = f.scale(1.0 / m as f64);
    Ok(vec![part; m])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MetricSpace {
        MetricSpace::grid(0.0, 2.0, 1.0).unwrap()
    }

    /// `η_1 = min(½, d(·,{2}))`, `η_2 = min(¼, d(·,{0}))` on {0, 1, 2}.
    fn two_set_cover(s: &MetricSpace) -> CozeroCover {
        let w1 = Field::dist_to_set(&[2]).unwrap().min(&Field::constant(0.5));
        let w2 = Field::dist_to_set(&[0])
            .unwrap()
            .min(&Field::constant(0.25));
        CozeroCover::from_witnesses(s, vec![w1, w2]).unwrap()
    }

    /// `ℓ_{k+1} = min(k + 1, 1/t) − Σ_{n ≤ k} ℓ_n`.
    fn staircase_by_recursion(k_max: usize, t: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for k in 1..=k_max {
            let prev: f64 = out.iter().sum();
            out.push((k as f64).min(1.0 / t) - prev);
        }
        out
    }

    #[test]
    fn staircase_examples() {
        assert_eq!(staircase(1, 2.0).unwrap(), 0.5);
        let s: f64 = (1..=3).map(|k| staircase(k, 0.4).unwrap()).sum();
        assert!((s - 2.5).abs() < 1e-15);
        assert_eq!(staircase(3, 1.0).unwrap(), 0.0);
        assert!(staircase(1, 0.0).is_err());
        assert!(staircase(0, 1.0).is_err());
    }

    #[test]
    fn staircase_matches_recursion() {
        for i in 0..200 {
            let t = 10f64.powf(-4.0 + 5.0 * i as f64 / 199.0);
            let rec = staircase_by_recursion(50, t);
            for k in 1..=50 {
                assert!(
                    (staircase(k, t).unwrap() - rec[k - 1]).abs() < 1e-12,
                    "k={k} t={t}"
                );
            }
        }
    }

    #[test]
    fn partial_sums_exact() {
        for t in [0.013, 0.25, 0.4, 0.7, 1.0, 3.0, 9.5] {
            for kk in 1..=80 {
                let s: f64 = (1..=kk).map(|k| staircase(k, t).unwrap()).sum();
                assert_eq!(s, staircase_partial_sum(kk, t), "K={kk} t={t}");
            }
        }
    }

    #[test]
    fn mather_single_set() {
        let s = line3();
        let cover = CozeroCover::from_witnesses(&s, vec![Field::constant(0.5)]).unwrap();
        let m = mather_refine(&s, &cover).unwrap();
        assert_eq!(m.total, vec![0.25; 3]);
        assert_eq!(m.refined[0], vec![0.375; 3]);
    }

    #[test]
    fn mather_two_set_example() {
        let s = line3();
        let m = mather_refine(&s, &two_set_cover(&s)).unwrap();
        assert_eq!(m.total, vec![0.25, 0.3125, 0.0625]);
        assert_eq!(m.refined[0], vec![0.375, 0.34375, 0.0]);
        assert_eq!(m.refined[1], vec![0.0, 0.09375, 0.21875]);
        assert_eq!(m.active(0), vec![0]);
        assert_eq!(m.active(2), vec![1]);
        // η(0) = ¼ > 2⁻³
        assert_eq!(m.activity_bound[0], 3);
    }

    #[test]
    fn uncovered_point_reported() {
        let s = line3();
        let w = Field::dist_to_set(&[2]).unwrap();
        let cover = CozeroCover::from_witnesses(&s, vec![w]).unwrap();
        assert_eq!(
            mather_refine(&s, &cover).unwrap_err(),
            LipError::NotACover { point: 2 }
        );
    }

    #[test]
    fn frolik_single_set() {
        let s = line3();
        let cover = CozeroCover::from_witnesses(&s, vec![Field::constant(0.5)]).unwrap();
        let fp = frolik_pou(&s, &cover).unwrap();
        assert_eq!(fp.total, vec![0.5; 3]);
        assert_eq!(fp.pou.len(), 2);
        for p in 0..3 {
            assert_eq!(fp.pou.values_at(&s, p).unwrap(), vec![(0, 0.5), (1, 0.5)]);
        }
        let grouped = index_subordinate(&fp.pou, 1).unwrap();
        assert_eq!(grouped.member(0).tabulate(&s).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn frolik_two_set_sums_and_supports() {
        let s = line3();
        let cover = two_set_cover(&s);
        let fp = frolik_pou(&s, &cover).unwrap();
        let tables = fp.pou.tabulate(&s).unwrap();
        for p in 0..3 {
            let full: f64 = tables.iter().map(|t| t[p]).sum();
            assert!((full - 1.0).abs() < 1e-9);
            assert!((fp.pou.sum_at(&s, p).unwrap() - 1.0).abs() < 1e-9);
        }
        for (i, t) in tables.iter().enumerate() {
            let n = fp.pou.subordination()[i];
            for p in 0..3 {
                if t[p] > 0.0 {
                    assert!(cover.table(n)[p] > 0.0);
                }
            }
            assert!(global_lip_values(&s, t).value.is_finite());
        }
        let g = index_subordinate(&fp.pou, 3).unwrap();
        assert_eq!(g.member(0).eval(&s, 0).unwrap(), 1.0);
        assert!((g.member(1).eval(&s, 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(g.member(2).tabulate(&s).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn grouped_matches_regrouped_explicit() {
        let s = MetricSpace::grid(0.0, 3.0, 0.25).unwrap();
        let unions = vec![
            vec![Ball {
                center: 0,
                radius: 1.1,
            }],
            vec![
                Ball {
                    center: 4,
                    radius: 0.8,
                },
                Ball {
                    center: 8,
                    radius: 0.6,
                },
            ],
            vec![Ball {
                center: 12,
                radius: 1.3,
            }],
        ];
        let cover = CozeroCover::from_balls(&s, &unions, 1.0).unwrap();
        let explicit = frolik_pou(&s, &cover).unwrap();
        let regrouped = index_subordinate(&explicit.pou, 3).unwrap();
        let grouped = frolik_grouped(&s, &cover).unwrap();
        for n in 0..3 {
            let a = regrouped.member(n).tabulate(&s).unwrap();
            let b = grouped.pou.member(n).tabulate(&s).unwrap();
            for p in s.points() {
                assert!((a[p] - b[p]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_examples() {
        let s = MetricSpace::grid(0.0, 1.0, 0.25).unwrap();
        let f = Field::coordinate(0).scale(2.5);
        let parts = nonexpansive_split(&f, 2.5).unwrap();
        assert_eq!(parts.len(), 3);
        for part in &parts {
            assert!(crate::scalar_field::global_lip(&s, part).unwrap().value <= 2.5 / 3.0 + 1e-12);
        }
        let rebuilt = Field::sum(parts).tabulate(&s).unwrap();
        let orig = f.tabulate(&s).unwrap();
        for p in s.points() {
            assert!((rebuilt[p] - orig[p]).abs() < 1e-12);
        }
        assert_eq!(
            nonexpansive_split(&Field::constant(1.0), 0.0)
                .unwrap()
                .len(),
            1
        );
        assert_eq!(nonexpansive_split(&f, 1.0).unwrap().len(), 1);
        assert!(nonexpansive_split(&f, f64::INFINITY).is_err());
    }
}
