//! Locally Lipschitz functions: increasing covers built from local
//! witnesses, decomposition into locally finite sums of bounded Lipschitz
//! pieces, a continuous modulus `L(x, y)`, and extension from a subset.

use serde::{Deserialize, Serialize};

use crate::error::{LipError, Result};
use crate::extension::extend_to_interval;
use crate::metric_space::{MetricSpace, Subset};
use crate::partition_of_unity::{frolik_grouped, CozeroCover, PartitionOfUnity};
use crate::scalar_field::{global_lip_over, Field, Interval};

const WITNESS_TOL: f64 = 1e-9;

/// Largest slice exponent tried by [`decompose`].
pub const MAX_SLICES: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalEntry {
    pub p: usize,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// Balls `O(p, δ_p)` with constants `K_p` valid on the doubled balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalWitness {
    entries: Vec<LocalEntry>,
}

impl LocalWitness {
    pub fn new(entries: Vec<LocalEntry>) -> Result<Self> {
        for e in &entries {
            if !(e.delta > 0.0 && e.delta.is_finite()) {
                return Err(LipError::WitnessFailure(format!(
                    "radius at {} must be positive and finite, got {}",
                    e.p, e.delta
                )));
            }
            if !(e.k >= 0.0 && e.k.is_finite()) {
                return Err(LipError::WitnessFailure(format!(
                    "constant at {} must be finite and nonnegative, got {}",
                    e.p, e.k
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Same radius and constant at every listed center.
    pub fn uniform(centers: impl IntoIterator<Item = usize>, delta: f64, k: f64) -> Result<Self> {
        Self::new(
            centers
                .into_iter()
                .map(|p| LocalEntry { p, delta, k })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[LocalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// First point of `domain` lying in no ball.
    pub fn uncovered(&self, space: &MetricSpace, domain: &Subset) -> Option<usize> {
        domain
            .ids()
            .iter()
            .copied()
            .find(|&x| !self.entries.iter().any(|e| space.d(e.p, x) < e.delta))
    }

    /// Checks centers, the cover property on `domain`, and
    /// `|f(x) − f(y)| ≤ K_p d(x, y)` for sampled `x, y ∈ O(p, 2δ_p) ∩ domain`.
    /// `vals` is indexed by point id.
    pub fn verify(&self, space: &MetricSpace, domain: &Subset, vals: &[f64]) -> Result<()> {
        for e in &self.entries {
            space.check_point(e.p)?;
            if !domain.contains(e.p) {
                return Err(LipError::WitnessFailure(format!(
                    "center {} lies outside the domain",
                    e.p
                )));
            }
        }
        if let Some(x) = self.uncovered(space, domain) {
            return Err(LipError::WitnessFailure(format!(
                "point {x} lies in no witness ball"
            )));
        }
        for e in &self.entries {
            let ball: Vec<usize> = domain
                .ids()
                .iter()
                .copied()
                .filter(|&x| space.d(e.p, x) < 2.0 * e.delta)
                .collect();
            for (i, &x) in ball.iter().enumerate() {
                for &y in &ball[i + 1..] {
                    let diff = (vals[x] - vals[y]).abs();
                    let bound = e.k * space.d(x, y);
                    if diff > bound * (1.0 + WITNESS_TOL) + WITNESS_TOL * 1e-3 || diff.is_nan() {
                        return Err(LipError::WitnessFailure(format!(
                            "pair ({x}, {y}) in the doubled ball at {} has |Δf| = {diff} > K·d = {bound}",
                            e.p
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Levels `U_n = ⋃ {O(p, δ_p) : L_p ≤ n}` with `L_p = max(K_p, K/δ_p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncreasingCover {
    /// `L_p` per witness entry.
    pub entry_levels: Vec<f64>,
    /// `η(x) = min {n : x ∈ U_n}` per domain point (0 off the domain).
    pub level_of: Vec<usize>,
    pub domain: Vec<usize>,
    pub max_level: usize,
}

impl IncreasingCover {
    /// Sample points of `U_n`.
    pub fn level(&self, n: usize) -> Vec<usize> {
        self.domain
            .iter()
            .copied()
            .filter(|&x| self.level_of[x] <= n)
            .collect()
    }

    /// Distinct nonempty levels in increasing order.
    pub fn levels(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.domain.iter().map(|&x| self.level_of[x]).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// First pair `(x, y)` in the domain with
    /// `|f(x) − f(y)| > max(η(x), η(y)) · d(x, y)`. Since the levels are
    /// nested, this one pass checks every `f|U_n` against `n`.
    pub fn violation(&self, space: &MetricSpace, vals: &[f64]) -> Option<(usize, usize)> {
        for (i, &x) in self.domain.iter().enumerate() {
            for &y in &self.domain[i + 1..] {
                let n = self.level_of[x].max(self.level_of[y]) as f64;
                let diff = (vals[x] - vals[y]).abs();
                if diff > n * space.d(x, y) * (1.0 + WITNESS_TOL) {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

fn oscillation(vals: &[f64], domain: &[usize]) -> f64 {
    let (lo, hi) = domain
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(vals[x]), hi.max(vals[x]))
        });
    if domain.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

fn levels_from(
    space: &MetricSpace,
    domain: &Subset,
    w: &LocalWitness,
    bound: f64,
) -> IncreasingCover {
    let entry_levels: Vec<f64> = w.entries.iter().map(|e| e.k.max(bound / e.delta)).collect();
    let mut level_of = vec![0usize; space.len()];
    for &x in domain.ids() {
        let best = w
            .entries
            .iter()
            .zip(&entry_levels)
            .filter(|(e, _)| space.d(e.p, x) < e.delta)
            .map(|(_, l)| l.ceil().max(1.0) as usize)
            .min()
            .unwrap_or(usize::MAX);
        level_of[x] = best;
    }
    let max_level = domain.ids().iter().map(|&x| level_of[x]).max().unwrap_or(1);
    IncreasingCover {
        entry_levels,
        level_of,
        domain: domain.ids().to_vec(),
        max_level,
    }
}

/// Builds the increasing cover of `f` on `domain` from a verified witness.
/// `bound` must dominate `|f(x) − f(y)|` on the domain.
pub fn increasing_cover_on(
    space: &MetricSpace,
    domain: &Subset,
    vals: &[f64],
    w: &LocalWitness,
    bound: f64,
) -> Result<IncreasingCover> {
    domain.require_nonempty()?;
    w.verify(space, domain, vals)?;
    let osc = oscillation(vals, domain.ids());
    if !(bound >= osc) {
        return Err(LipError::InvalidParameter(format!(
            "bound {bound} is below the oscillation {osc} of the field"
        )));
    }
    Ok(levels_from(space, domain, w, bound))
}

pub fn increasing_cover(
    space: &MetricSpace,
    f: &Field,
    w: &LocalWitness,
    bound: f64,
) -> Result<IncreasingCover> {
    let vals = f.tabulate(space)?;
    increasing_cover_on(space, &space.full_subset(), &vals, w, bound)
}

/// One bounded Lipschitz slice of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    /// `|f| < 2^j` on the slice.
    pub exponent: u32,
    /// Lipschitz level `4^j` certified for `f` on the slice.
    pub level: f64,
    pub points: usize,
}

/// `f = Σ φ_n` with `φ_n = ψ_n · ξ_n` bounded and Lipschitz.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub members: Vec<Field>,
    /// The locally finite sum of the members.
    pub series: Field,
    pub pou: PartitionOfUnity,
    pub slices: Vec<Slice>,
    /// Bounded Lipschitz extensions `ψ_n` of `f` restricted to the support
    /// of `ξ_n`.
    pub pieces: Vec<Field>,
}

/// Writes `f` as a locally finite sum of bounded Lipschitz fields.
///
/// Slice `j` is the part of `f⁻¹((−2^j, 2^j))` covered by witness balls with
/// `max(K_p, 2^{j+1}/δ_p) ≤ 4^j`; on it `f` is bounded by `2^j` and
/// `4^j`-Lipschitz. Slices are taken until one covers the space. A
/// partition of unity subordinated to the slices glues bounded Lipschitz
/// extensions of the restrictions of `f`.
pub fn decompose(space: &MetricSpace, f: &Field, w: &LocalWitness) -> Result<Decomposition> {
    let full = space.full_subset();
    let vals = f.tabulate(space)?;
    w.verify(space, &full, &vals)?;
    let mut witnesses = Vec::new();
    let mut slices = Vec::new();
    for j in 0..=MAX_SLICES {
        let cap = 2f64.powi(j as i32);
        let level = cap * cap;
        let balls: Vec<_> = w
            .entries
            .iter()
            .filter(|e| e.k.max(2.0 * cap / e.delta) <= level)
            .collect();
        let table: Vec<f64> = space
            .points()
            .map(|x| {
                let inside = balls
                    .iter()
                    .map(|e| e.delta - space.d(e.p, x))
                    .fold(0.0, f64::max);
                inside.min((cap - vals[x].abs()).max(0.0))
            })
            .collect();
        let count = table.iter().filter(|&&v| v > 0.0).count();
        if count == 0 {
            continue;
        }
        witnesses.push(Field::tabulated(table));
        slices.push(Slice {
            exponent: j,
            level,
            points: count,
        });
        if count == space.len() {
            break;
        }
    }
    if slices.last().map(|s| s.points) != Some(space.len()) {
        return Err(LipError::WitnessFailure(format!(
            "no slice up to 2^{MAX_SLICES} covers the space"
        )));
    }
    let cover = CozeroCover::from_witnesses(space, witnesses)?;
    let frolik = frolik_grouped(space, &cover)?;
    let mut pieces = Vec::with_capacity(slices.len());
    let mut members = Vec::with_capacity(slices.len());
    for (n, slice) in slices.iter().enumerate() {
        let support: Vec<usize> = space
            .points()
            .filter(|&x| frolik.witnesses[n][x] > 0.0)
            .collect();
        let piece = if support.is_empty() {
            Field::constant(0.0)
        } else {
            let a = space.subset(support.iter().copied())?;
            let k = global_lip_over(
                space,
                &vals,
                support
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &x)| support[i + 1..].iter().map(move |&y| (x, y))),
            )
            .value;
            let cap = 2f64.powi(slice.exponent as i32);
            extend_to_interval(space, &a, f, k, &Interval::closed(-cap, cap))?
        };
        members.push(piece.mul(frolik.pou.member(n)));
        pieces.push(piece);
    }
    let series = Field::series(members.clone(), frolik.pou.activity().clone());
    Ok(Decomposition {
        members,
        series,
        pou: frolik.pou,
        slices,
        pieces,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMode {
    /// Levels of `f` itself; needs `f` bounded on the sample.
    Bounded,
    /// Levels of `f` under `ρ*(s, t) = |s − t| / (1 + |s − t|)`, then
    /// `L = (1 + |f(x) − f(y)|) · L*`.
    Transported,
}

/// `L(x, y) = max(ℓ(x), ℓ(y))` with `ℓ(x) = max_y [η(y) − M d(x, y)]`.
#[derive(Debug, Clone)]
pub struct ModulusWitness {
    pub mode: ModulusMode,
    /// Level function `η`.
    pub levels: Vec<usize>,
    /// Continuous majorant `ℓ ≥ η`, `M`-Lipschitz.
    pub ell: Field,
    pub ell_values: Vec<f64>,
    pub slope: f64,
    values: Vec<f64>,
}

impl ModulusWitness {
    /// `L(x, y)`.
    pub fn modulus(&self, x: usize, y: usize) -> f64 {
        let base = self.ell_values[x].max(self.ell_values[y]);
        match self.mode {
            ModulusMode::Bounded => base,
            ModulusMode::Transported => (1.0 + (self.values[x] - self.values[y]).abs()) * base,
        }
    }

    /// First pair with `|f(x) − f(y)| > L(x, y) d(x, y) (1 + 1e-9)`.
    pub fn violation(&self, space: &MetricSpace) -> Option<(usize, usize)> {
        for x in space.points() {
            for y in x + 1..space.len() {
                let diff = (self.values[x] - self.values[y]).abs();
                if diff > self.modulus(x, y) * space.d(x, y) * (1.0 + WITNESS_TOL) {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

pub fn modulus_witness(
    space: &MetricSpace,
    f: &Field,
    w: &LocalWitness,
    mode: ModulusMode,
) -> Result<ModulusWitness> {
    let vals = f.tabulate(space)?;
    let full = space.full_subset();
    w.verify(space, &full, &vals)?;
    let cover = match mode {
        ModulusMode::Bounded => levels_from(space, &full, w, oscillation(&vals, full.ids())),
        // ρ* ≤ |Δf| so the same constants work, and ρ* < 1
        ModulusMode::Transported => levels_from(space, &full, w, 1.0),
    };
    let levels = cover.level_of.clone();
    let max_eta = levels.iter().copied().max().unwrap_or(1) as f64;
    let sep = space.min_separation();
    let slope = if sep.is_finite() && sep > 0.0 {
        max_eta / sep
    } else {
        0.0
    };
    let ell_values: Vec<f64> = space
        .points()
        .map(|x| {
            space
                .points()
                .map(|y| levels[y] as f64 - slope * space.d(x, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(ModulusWitness {
        mode,
        levels,
        ell: Field::tabulated(ell_values.clone()),
        ell_values,
        slope,
        values: vals,
    })
}

/// Local witness read off a modulus: radius `delta` everywhere and
/// `K_p = max L(x, y)` over sampled pairs in `O(p, 2δ)`, the ball enlarged
/// by a relative `1e-9` as in [`generate_local_witness`].
pub fn witness_from_modulus(
    space: &MetricSpace,
    modulus: impl Fn(usize, usize) -> f64,
    delta: f64,
) -> Result<LocalWitness> {
    let mut entries = Vec::with_capacity(space.len());
    for p in space.points() {
        let reach = 2.0 * delta * (1.0 + WITNESS_TOL);
        let ball: Vec<usize> = space.points().filter(|&x| space.d(p, x) <= reach).collect();
        let mut k: f64 = 0.0;
        for (i, &x) in ball.iter().enumerate() {
            for &y in &ball[i + 1..] {
                k = k.max(modulus(x, y));
            }
        }
        entries.push(LocalEntry { p, delta, k });
    }
    LocalWitness::new(entries)
}

/// Witness with radius `deltas[p]` at each point and the smallest constant
/// valid on the doubled ball. The constant is taken over a ball enlarged by
/// a relative `1e-9`, so points on the boundary up to rounding are covered
/// and the witness survives a text round trip.
pub fn generate_local_witness(
    space: &MetricSpace,
    vals: &[f64],
    deltas: &[f64],
) -> Result<LocalWitness> {
    let mut entries = Vec::with_capacity(space.len());
    for p in space.points() {
        let delta = deltas[p];
        let reach = 2.0 * delta * (1.0 + WITNESS_TOL);
        let ball: Vec<usize> = space.points().filter(|&x| space.d(p, x) <= reach).collect();
        let pairs = ball
            .iter()
            .enumerate()
            .flat_map(|(i, &x)| ball[i + 1..].iter().map(move |&y| (x, y)));
        let k = global_lip_over(space, vals, pairs).value;
        entries.push(LocalEntry { p, delta, k });
    }
    LocalWitness::new(entries)
}

/// Result of [`local_extend`].
#[derive(Debug, Clone)]
pub struct LocalExtension {
    pub field: Field,
    pub pou: PartitionOfUnity,
    /// Extensions `f_n` glued by the partition.
    pub pieces: Vec<Field>,
    /// Lipschitz level of each ball-union cover set; `None` for `X ∖ A`.
    pub cover_levels: Vec<Option<usize>>,
    /// Witness for the output on the whole space.
    pub witness: LocalWitness,
}

/// Extends a locally Lipschitz `φ: A → Δ` to a locally Lipschitz
/// `f: X → Δ` with `f|A = φ`.
///
/// The witness balls are grouped by dyadic level (`L_p ≤ 2^i`), each group's
/// union taken in the whole space, and `X ∖ A` added as a further set. On
/// every cover set meeting `A` the data is Lipschitz, so it extends into
/// `Δ`; the pieces are glued by a partition of unity as a convex
/// combination anchored so that agreement on `A` is exact.
pub fn local_extend(
    space: &MetricSpace,
    a: &Subset,
    phi: &Field,
    w: &LocalWitness,
    delta: &Interval,
) -> Result<LocalExtension> {
    a.require_nonempty()?;
    delta.require_nondegenerate()?;
    let mut vals = vec![0.0; space.len()];
    for &x in a.ids() {
        let v = phi.eval(space, x)?;
        if !delta.contains(v) {
            return Err(LipError::OutOfInterval {
                point: x,
                value: v,
                interval: delta.to_string(),
            });
        }
        vals[x] = v;
    }
    let levels = increasing_cover_on(space, a, &vals, w, oscillation(&vals, a.ids()))?;

    let mut dyadic: Vec<usize> = levels
        .entry_levels
        .iter()
        .map(|l| l.ceil().max(1.0) as usize)
        .map(|n| n.next_power_of_two())
        .collect();
    dyadic.sort_unstable();
    dyadic.dedup();

    let mut witnesses = Vec::new();
    let mut cover_levels = Vec::new();
    for &n in &dyadic {
        let table: Vec<f64> = space
            .points()
            .map(|x| {
                w.entries
                    .iter()
                    .zip(&levels.entry_levels)
                    .filter(|(_, l)| l.ceil().max(1.0) as usize <= n)
                    .map(|(e, _)| e.delta - space.d(e.p, x))
                    .fold(0.0, f64::max)
            })
            .collect();
        witnesses.push(Field::tabulated(table));
        cover_levels.push(Some(n));
    }
    if !a.is_full() {
        witnesses.push(Field::dist_to_set(a.ids())?);
        cover_levels.push(None);
    }
    let cover = CozeroCover::from_witnesses(space, witnesses)?;
    let frolik = frolik_grouped(space, &cover)?;

    let phi_table = Field::partial(space.len(), a.ids().iter().map(|&x| (x, vals[x])))?;
    let mut pieces = Vec::with_capacity(cover.len());
    for n in 0..cover.len() {
        let support: Vec<usize> = a
            .ids()
            .iter()
            .copied()
            .filter(|&x| frolik.witnesses[n][x] > 0.0)
            .collect();
        let piece = if support.is_empty() {
            Field::constant(delta.representative())
        } else {
            let an = space.subset(support.iter().copied())?;
            let k = global_lip_over(
                space,
                &vals,
                support
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &x)| support[i + 1..].iter().map(move |&y| (x, y))),
            )
            .value;
            extend_to_interval(space, &an, &phi_table, k, delta)?
        };
        pieces.push(piece);
    }
    let field = Field::convex_combination(
        frolik.pou.members().to_vec(),
        pieces.clone(),
        frolik.pou.activity().clone(),
    );

    let out = field.tabulate(space)?;
    let radii = output_radii(space, a, w);
    let witness = generate_local_witness(space, &out, &radii)?;
    Ok(LocalExtension {
        field,
        pou: frolik.pou,
        pieces,
        cover_levels,
        witness,
    })
}

/// `d(x, A)/2` off `A`; on `A` the largest radius of a witness ball around
/// `x` that fits inside one of the given balls.
fn output_radii(space: &MetricSpace, a: &Subset, w: &LocalWitness) -> Vec<f64> {
    space
        .points()
        .map(|x| {
            if a.contains(x) {
                w.entries
                    .iter()
                    .map(|e| e.delta - space.d(e.p, x))
                    .fold(0.0, f64::max)
            } else {
                0.5 * space.d_set(x, a.ids())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition_of_unity::staircase;

    fn square_setup() -> (MetricSpace, Field, LocalWitness) {
        let s = MetricSpace::grid(-3.0, 3.0, 0.1).unwrap();
        let x = Field::coordinate(0);
        let f = x.mul(&x);
        let entries = s
            .points()
            .map(|p| LocalEntry {
                p,
                delta: 1.0,
                k: 2.0 * s.coordinate(p, 0).unwrap().abs() + 4.0,
            })
            .collect();
        (s, f, LocalWitness::new(entries).unwrap())
    }

    fn pair_lip(s: &MetricSpace, vals: &[f64], pts: &[usize]) -> f64 {
        let mut best: f64 = 0.0;
        for (i, &x) in pts.iter().enumerate() {
            for &y in &pts[i + 1..] {
                best = best.max((vals[x] - vals[y]).abs() / s.dist(x, y).unwrap());
            }
        }
        best
    }

    #[test]
    fn square_increasing_cover() {
        let (s, f, w) = square_setup();
        let cover = increasing_cover(&s, &f, &w, 9.0).unwrap();
        let vals = f.tabulate(&s).unwrap();
        let u10 = cover.level(10);
        assert_eq!(u10.len(), s.len());
        let lip = pair_lip(&s, &vals, &u10);
        assert!(lip > 5.9 && lip <= 10.0, "{lip}");
        for n in cover.levels() {
            let un = cover.level(n);
            assert!(pair_lip(&s, &vals, &un) <= n as f64 * (1.0 + 1e-12));
            assert!(cover.level(n + 1).len() >= un.len());
        }
        assert_eq!(cover.violation(&s, &vals), None);
    }

    #[test]
    fn constant_field_cover_is_everything() {
        let s = MetricSpace::grid(0.0, 1.0, 0.25).unwrap();
        let w = LocalWitness::uniform(s.points(), 0.5, 0.0).unwrap();
        let cover = increasing_cover(&s, &Field::constant(2.0), &w, 0.0).unwrap();
        assert_eq!(cover.level(1).len(), s.len());
    }

    #[test]
    fn bad_witness_is_reported() {
        let s = MetricSpace::grid(0.0, 1.0, 0.25).unwrap();
        let w = LocalWitness::uniform(s.points(), 0.5, 0.5).unwrap();
        let err = increasing_cover(&s, &Field::coordinate(0), &w, 1.0).unwrap_err();
        assert!(matches!(err, LipError::WitnessFailure(_)));
        let sparse = LocalWitness::uniform([0], 0.3, 1.0).unwrap();
        assert!(increasing_cover(&s, &Field::coordinate(0), &sparse, 1.0).is_err());
    }

    #[test]
    fn square_decomposition_reconstructs() {
        let (s, f, w) = square_setup();
        let dec = decompose(&s, &f, &w).unwrap();
        let vals = f.tabulate(&s).unwrap();
        for p in s.points() {
            assert!((dec.series.eval(&s, p).unwrap() - vals[p]).abs() <= 1e-9);
        }
        for m in &dec.members {
            let t = m.tabulate(&s).unwrap();
            assert!(t.iter().all(|v| v.is_finite()));
            assert!(pair_lip(&s, &t, &s.points().collect::<Vec<_>>()).is_finite());
        }
    }

    #[test]
    fn reciprocal_decomposition_reconstructs() {
        let s = MetricSpace::grid(0.01, 3.0, 0.01).unwrap();
        let f = Field::coordinate(0).transport(crate::scalar_field::Transport::Reciprocal);
        let entries = s
            .points()
            .map(|p| {
                let t = s.coordinate(p, 0).unwrap();
                // on O(t, t) ∩ (0, ∞) the slope of 1/t is at most 1/(t − t/2)²
                LocalEntry {
                    p,
                    delta: t / 4.0,
                    k: 4.0 / (t * t),
                }
            })
            .collect();
        let w = LocalWitness::new(entries).unwrap();
        let dec = decompose(&s, &f, &w).unwrap();
        for p in s.points() {
            let t = s.coordinate(p, 0).unwrap();
            let staircase_total: f64 = (1..=((1.0 / t).ceil() as usize))
                .map(|k| staircase(k, t).unwrap())
                .sum();
            let v = dec.series.eval(&s, p).unwrap();
            assert!((v - staircase_total).abs() <= 1e-9, "t={t}: {v}");
        }
    }

    #[test]
    fn bounded_lipschitz_field_is_one_piece() {
        let s = MetricSpace::grid(-1.0, 1.0, 0.1).unwrap();
        let f = Field::coordinate(0).scale(0.25);
        let w = LocalWitness::uniform(s.points(), 2.0, 0.25).unwrap();
        let dec = decompose(&s, &f, &w).unwrap();
        assert_eq!(dec.members.len(), 1);
        let a = dec.members[0].tabulate(&s).unwrap();
        let b = f.tabulate(&s).unwrap();
        for p in s.points() {
            assert!((a[p] - b[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn square_modulus() {
        let (s, f, w) = square_setup();
        for mode in [ModulusMode::Bounded, ModulusMode::Transported] {
            let m = modulus_witness(&s, &f, &w, mode).unwrap();
            assert_eq!(m.violation(&s), None);
            for p in s.points() {
                assert!(m.ell_values[p] >= m.levels[p] as f64);
            }
            let ell_lip = pair_lip(&s, &m.ell_values, &s.points().collect::<Vec<_>>());
            assert!(ell_lip <= m.slope * (1.0 + 1e-12));
            // converse: a witness read off L certifies f again
            let back = witness_from_modulus(&s, |x, y| m.modulus(x, y), 0.5).unwrap();
            back.verify(&s, &s.full_subset(), &f.tabulate(&s).unwrap())
                .unwrap();
        }
    }

    #[test]
    fn local_extend_reciprocal_into_positive_half_line() {
        let s = MetricSpace::grid(0.05, 3.0, 0.05).unwrap();
        let a = s
            .subset(s.points().filter(|&p| {
                let t = s.coordinate(p, 0).unwrap();
                (1.0 - 1e-9..=2.0 + 1e-9).contains(&t)
            }))
            .unwrap();
        let phi = Field::coordinate(0).transport(crate::scalar_field::Transport::Reciprocal);
        let w = LocalWitness::uniform(a.ids().iter().copied(), 0.2, 1.0 / 0.6f64.powi(2)).unwrap();
        let ext = local_extend(&s, &a, &phi, &w, &Interval::open(0.0, f64::INFINITY)).unwrap();
        let out = ext.field.tabulate(&s).unwrap();
        for p in s.points() {
            assert!(out[p] > 0.0);
            if a.contains(p) {
                assert_eq!(out[p], phi.eval(&s, p).unwrap());
            }
        }
        ext.witness.verify(&s, &s.full_subset(), &out).unwrap();
    }

    #[test]
    fn local_extend_full_subset_is_identity() {
        let s = MetricSpace::grid(0.0, 1.0, 0.1).unwrap();
        let phi = Field::coordinate(0).mul(&Field::coordinate(0));
        let w = LocalWitness::uniform(s.points(), 0.3, 2.0).unwrap();
        let ext = local_extend(&s, &s.full_subset(), &phi, &w, &Interval::real_line()).unwrap();
        assert_eq!(ext.field.tabulate(&s).unwrap(), phi.tabulate(&s).unwrap());
    }

    #[test]
    fn local_extend_range_precondition() {
        let s = MetricSpace::grid(0.0, 2.0, 0.5).unwrap();
        let a = s.subset([0, 2, 3, 4]).unwrap();
        let phi = Field::partial(5, [(0, 0.0), (2, 1.0), (3, 1.0 / 1.5), (4, 0.5)]).unwrap();
        let w = LocalWitness::uniform([0, 2, 3, 4], 0.3, 1.0).unwrap();
        assert!(matches!(
            local_extend(&s, &a, &phi, &w, &Interval::open(0.0, f64::INFINITY)).unwrap_err(),
            LipError::OutOfInterval { point: 0, .. }
        ));
    }
}
