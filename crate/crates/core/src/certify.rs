//! Brute-force checks over finite samples.
//!
//! These deliberately recompute everything from point distances and
//! tabulated values instead of reusing the construction code, so that a
//! construction and its certificate fail independently.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{LipError, Result};
use crate::local_lipschitz::{witness_from_modulus, Decomposition, LocalWitness, ModulusWitness};
use crate::metric_space::{validate_metric, MetricSpace, Subset, Violation};
use crate::partition_of_unity::PartitionOfUnity;
use crate::scalar_field::{global_lip_values, Field, Interval};
use crate::selection::{default_radius, ApproxStep};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Metric,
    KLipschitz,
    Sandwich,
    Duality,
    PouSum,
    Activity,
    Subordination,
    Range,
    Reconstruction,
    Strictness,
    Witness,
}

/// Outcome of one check.
///
/// `worst_violation` is the largest excess over the checked constraint
/// (negative when every constraint holds with room to spare); `pass` is
/// `worst_violation ≤ tolerance`, or `< tolerance` for strict checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub pass: bool,
    pub worst_violation: f64,
    pub tolerance: f64,
    pub strict: bool,
    /// Points achieving the worst violation.
    pub witness: Vec<usize>,
    /// Number of constraints checked.
    pub checked: usize,
    pub detail: BTreeMap<String, Value>,
}

impl Certificate {
    fn new(kind: CertificateKind, tolerance: f64, strict: bool) -> Self {
        Self {
            kind,
            pass: true,
            worst_violation: f64::NEG_INFINITY,
            tolerance,
            strict,
            witness: Vec::new(),
            checked: 0,
            detail: BTreeMap::new(),
        }
    }

    /// Records one constraint; ties keep the earliest witness.
    fn offer(&mut self, excess: f64, witness: &[usize]) {
        self.checked += 1;
        let excess = if excess.is_nan() {
            f64::INFINITY
        } else {
            excess + 0.0
        };
        if excess > self.worst_violation || self.witness.is_empty() {
            self.worst_violation = excess;
            self.witness = witness.to_vec();
        }
    }

    fn finish(mut self) -> Self {
        if self.checked == 0 {
            self.worst_violation = 0.0;
        }
        self.pass = if self.strict {
            self.worst_violation < self.tolerance
        } else {
            self.worst_violation <= self.tolerance
        };
        self
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.detail.insert(key.to_string(), value);
        self
    }

    /// Error carrying the certificate summary when it failed.
    pub fn require(&self) -> Result<()> {
        if self.pass {
            Ok(())
        } else {
            Err(LipError::WitnessFailure(format!(
                "{:?} check failed: worst violation {} at {:?}",
                self.kind, self.worst_violation, self.witness
            )))
        }
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |p| (p + 1..n).map(move |q| (p, q)))
}

/// Metric axioms on all points and triples.
pub fn check_metric(space: &MetricSpace) -> Certificate {
    let report = validate_metric(space);
    let mut cert = Certificate::new(CertificateKind::Metric, 0.0, false);
    cert.checked = report.points.pow(3);
    cert.worst_violation = 0.0;
    if let Some(v) = report.violations.first() {
        cert.worst_violation = match v {
            Violation::Triangle { excess, .. } => *excess,
            _ => f64::INFINITY,
        };
        cert.witness = match v {
            Violation::NonZeroDiagonal { p, .. } => vec![*p],
            Violation::NotFinite { p, q }
            | Violation::Negative { p, q, .. }
            | Violation::ZeroOffDiagonal { p, q }
            | Violation::Asymmetry { p, q, .. } => vec![*p, *q],
            Violation::Triangle { p, q, r, .. } => vec![*p, *q, *r],
        };
    }
    let violations = serde_json::to_value(&report.violations).unwrap_or(Value::Null);
    Certificate {
        pass: report.is_valid(),
        ..cert
    }
    .with("violations", violations)
}

/// `|f(p) − f(q)| ≤ K d(p, q)` on the given pairs; the excess is
/// `|Δf| − K d`.
pub fn check_k_lipschitz_over(
    space: &MetricSpace,
    vals: &[f64],
    k: f64,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    tol: f64,
) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::KLipschitz, tol, false);
    let mut worst_ratio: f64 = 0.0;
    let mut ratio_pair = Vec::new();
    for (p, q) in pairs {
        let d = space.dist(p, q).unwrap_or(f64::NAN);
        let diff = (vals[p] - vals[q]).abs();
        cert.offer(diff - k * d, &[p, q]);
        if d > 0.0 && diff / d > worst_ratio {
            worst_ratio = diff / d;
            ratio_pair = vec![p, q];
        }
    }
    cert.finish()
        .with("K", json!(k))
        .with("worst_ratio", json!(worst_ratio))
        .with("worst_ratio_pair", json!(ratio_pair))
}

pub fn check_k_lipschitz(space: &MetricSpace, vals: &[f64], k: f64, tol: f64) -> Certificate {
    check_k_lipschitz_over(space, vals, k, all_pairs(vals.len()), tol)
}

pub fn check_field_k_lipschitz(
    space: &MetricSpace,
    f: &Field,
    k: f64,
    tol: f64,
) -> Result<Certificate> {
    Ok(check_k_lipschitz(space, &f.tabulate(space)?, k, tol))
}

/// `lower − tol ≤ f ≤ upper + tol` pointwise.
pub fn check_sandwich(lower: &[f64], f: &[f64], upper: &[f64], tol: f64) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Sandwich, tol, false);
    for p in 0..f.len() {
        cert.offer((lower[p] - f[p]).max(f[p] - upper[p]), &[p]);
    }
    cert.finish()
}

/// Bitwise `Φ−[φ] = −Φ+[−φ]` given both tables.
pub fn check_duality(lower: &[f64], mirrored_upper: &[f64]) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Duality, 0.0, false);
    for p in 0..lower.len() {
        let rhs = -mirrored_upper[p];
        let excess = if lower[p] == rhs {
            0.0
        } else {
            (lower[p] - rhs).abs().max(f64::MIN_POSITIVE)
        };
        cert.offer(excess, &[p]);
    }
    cert.finish()
}

/// Values inside `Δ` (closed endpoints within `tol`, open ones strictly).
pub fn check_range(vals: &[f64], points: &[usize], delta: &Interval, tol: f64) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Range, tol, false);
    for &p in points {
        let v = vals[p];
        let mut excess = (delta.lo - v).max(v - delta.hi);
        if (delta.lo_open && v <= delta.lo) || (delta.hi_open && v >= delta.hi) {
            excess = excess.max(f64::MIN_POSITIVE).max(tol * 2.0);
        }
        cert.offer(excess, &[p]);
    }
    cert.finish().with("interval", json!(delta.to_string()))
}

/// `f(p) − a ≥ m_p − tol` and `b − f(p) ≥ m_p − tol` for given margins.
pub fn check_margins(
    vals: &[f64],
    points: &[usize],
    lo: f64,
    hi: f64,
    margins: &[f64],
    tol: f64,
) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Range, tol, false);
    for &p in points {
        let room = (vals[p] - lo).min(hi - vals[p]);
        cert.offer(margins[p] - room, &[p]);
    }
    cert.finish().with("bounds", json!([lo, hi]))
}

/// `g(p) < f(p) < h(p)` at every point.
pub fn check_strictly_between(lower: &[f64], f: &[f64], upper: &[f64]) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Strictness, 0.0, true);
    for p in 0..f.len() {
        cert.offer((lower[p] - f[p]).max(f[p] - upper[p]), &[p]);
    }
    let margin = -cert.worst_violation;
    cert.finish().with("min_margin", json!(margin))
}

/// `|f(p) − expected(p)| ≤ tol` at the listed points.
pub fn check_reconstruction(
    f: &[f64],
    expected: &[f64],
    points: &[usize],
    tol: f64,
) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::Reconstruction, tol, false);
    for &p in points {
        cert.offer((f[p] - expected[p]).abs(), &[p]);
    }
    cert.finish()
}

/// `|Σ_α ξ_α(p) − 1| ≤ tol` from full member tables.
pub fn check_partition_sum(tables: &[Vec<f64>], points: usize, tol: f64) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::PouSum, tol, false);
    for p in 0..points {
        let s: f64 = tables.iter().map(|t| t[p]).sum();
        cert.offer((s - 1.0).abs(), &[p]);
    }
    cert.finish()
}

/// Checks of a partition of unity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PouReport {
    pub sum: Certificate,
    /// No member is nonzero at a point outside its activity list.
    pub activity: Certificate,
    /// No member is negative.
    pub nonnegative: Certificate,
    /// Member positive ⇒ its cover witness positive (when witnesses given).
    pub subordination: Option<Certificate>,
    /// Exhaustive-pair Lipschitz constant of each member.
    pub member_lip: Vec<f64>,
    /// Every member constant is finite.
    pub finite_lip: Certificate,
    pub members: usize,
    /// Histogram: number of active members → number of points.
    pub activity_histogram: BTreeMap<usize, usize>,
}

impl PouReport {
    pub fn pass(&self) -> bool {
        self.sum.pass
            && self.activity.pass
            && self.nonnegative.pass
            && self.subordination.as_ref().is_none_or(|c| c.pass)
            && self.finite_lip.pass
    }

    pub fn certificates(&self) -> Vec<Certificate> {
        let mut out = vec![
            self.sum.clone(),
            self.activity.clone(),
            self.nonnegative.clone(),
            self.finite_lip.clone(),
        ];
        out.extend(self.subordination.clone());
        out
    }
}

/// Evaluates every member at every point, activity lists notwithstanding.
pub fn pou_report(
    space: &MetricSpace,
    pou: &PartitionOfUnity,
    cover_witnesses: Option<&[Vec<f64>]>,
    tol: f64,
) -> Result<PouReport> {
    let n = space.len();
    let tables: Vec<Vec<f64>> = pou
        .members()
        .iter()
        .map(|m| m.tabulate(space))
        .collect::<Result<_>>()?;
    let sum = check_partition_sum(&tables, n, tol);

    let mut activity = Certificate::new(CertificateKind::Activity, 0.0, false);
    let mut nonnegative = Certificate::new(CertificateKind::Range, 0.0, false);
    let mut histogram = BTreeMap::new();
    for p in 0..n {
        let active = pou.active(p);
        *histogram.entry(active.len()).or_insert(0) += 1;
        let mut is_active = vec![false; tables.len()];
        for &a in active {
            is_active[a] = true;
        }
        for (a, t) in tables.iter().enumerate() {
            if !is_active[a] {
                activity.offer(t[p].abs(), &[p, a]);
            }
            nonnegative.offer(-t[p], &[p, a]);
        }
    }
    let subordination = cover_witnesses.map(|ws| {
        let mut cert = Certificate::new(CertificateKind::Subordination, 0.0, false);
        for (a, t) in tables.iter().enumerate() {
            let host = &ws[pou.subordination()[a]];
            for p in 0..n {
                let bad = t[p] > 0.0 && !(host[p] > 0.0);
                cert.offer(if bad { t[p] } else { 0.0 }, &[p, a]);
            }
        }
        cert.finish()
    });
    let member_lip: Vec<f64> = tables.iter().map(|t| support_lip(space, t)).collect();
    let mut finite_lip = Certificate::new(CertificateKind::KLipschitz, 0.0, false);
    for (a, l) in member_lip.iter().enumerate() {
        finite_lip.offer(if l.is_finite() { 0.0 } else { f64::INFINITY }, &[a]);
    }
    let max_lip = member_lip.iter().copied().fold(0.0, f64::max);
    Ok(PouReport {
        finite_lip: finite_lip.finish().with("max_member_lip", json!(max_lip)),
        sum,
        activity: activity.finish(),
        nonnegative: nonnegative.finish(),
        subordination,
        member_lip,
        members: tables.len(),
        activity_histogram: histogram,
    })
}

/// Exhaustive-pair Lipschitz constant; pairs where both values vanish are
/// skipped since they contribute nothing.
pub fn support_lip(space: &MetricSpace, t: &[f64]) -> f64 {
    let support: Vec<usize> = (0..t.len()).filter(|&p| t[p] != 0.0).collect();
    let mut best: f64 = 0.0;
    for &p in &support {
        for q in 0..t.len() {
            if q != p && !(t[q] != 0.0 && q < p) {
                let d = space.dist(p, q).unwrap_or(f64::NAN);
                let r = (t[p] - t[q]).abs() / d;
                best = if r.is_nan() {
                    f64::INFINITY
                } else {
                    best.max(r)
                };
            }
        }
    }
    best
}

/// Checks of a Mather refinement from its tables: every sample lies in
/// some refined set, and the 0-based `γ_n(p)` vanishes both for `n ≥ k`,
/// `k` the smallest with `η(p) > 2^{−k}` recomputed here, and beyond the
/// reported bound.
pub fn check_mather(
    refined: &[Vec<f64>],
    total: &[f64],
    activity_bound: &[usize],
) -> Vec<Certificate> {
    let mut cover = Certificate::new(CertificateKind::Activity, 0.0, false);
    let mut activity = Certificate::new(CertificateKind::Activity, 0.0, false);
    for p in 0..total.len() {
        let covered = refined.iter().any(|g| g[p] > 0.0);
        cover.offer(if covered { 0.0 } else { f64::INFINITY }, &[p]);
        let mut k = 0usize;
        while !(total[p] > 2f64.powi(-(k as i32))) && k < 1100 {
            k += 1;
        }
        for (n, g) in refined.iter().enumerate().skip(k.min(activity_bound[p])) {
            activity.offer(g[p].abs(), &[p, n]);
        }
    }
    vec![
        cover
            .finish()
            .with("check", json!("refined sets cover the samples")),
        activity.finish().with(
            "check",
            json!("refined sets vanish beyond the activity bound"),
        ),
    ]
}

/// `|f(x) − f(y)| ≤ L(x, y) d(x, y) (1 + rel_tol)` on all pairs.
pub fn check_modulus(
    space: &MetricSpace,
    vals: &[f64],
    modulus: impl Fn(usize, usize) -> f64,
    rel_tol: f64,
) -> Certificate {
    let mut cert = Certificate::new(CertificateKind::KLipschitz, 0.0, false);
    for (p, q) in all_pairs(vals.len()) {
        let d = space.dist(p, q).unwrap_or(f64::NAN);
        let bound = modulus(p, q) * d * (1.0 + rel_tol);
        cert.offer((vals[p] - vals[q]).abs() - bound, &[p, q]);
    }
    cert.finish().with("relative_tolerance", json!(rel_tol))
}

/// For each entry, `|f(x) − f(y)| ≤ K_p d(x, y)` over sampled pairs in
/// `O(p, 2δ_p)`, plus the cover check: every point of the domain lies in
/// some `O(p, δ_p)`. An uncovered point is an infinite violation.
pub fn certify_local_witness(
    space: &MetricSpace,
    vals: &[f64],
    w: &LocalWitness,
    domain: Option<&Subset>,
    tol: f64,
) -> Certificate {
    let pts: Vec<usize> = match domain {
        Some(d) => d.ids().to_vec(),
        None => space.points().collect(),
    };
    let mut cert = Certificate::new(CertificateKind::Witness, tol, false);
    let mut uncovered = Vec::new();
    for &x in &pts {
        let covered = w
            .entries()
            .iter()
            .any(|e| space.dist(e.p, x).is_ok_and(|d| d < e.delta));
        if !covered {
            uncovered.push(x);
            cert.offer(f64::INFINITY, &[x]);
        }
    }
    for e in w.entries() {
        let ball: Vec<usize> = pts
            .iter()
            .copied()
            .filter(|&x| space.dist(e.p, x).is_ok_and(|d| d < 2.0 * e.delta))
            .collect();
        for (i, &x) in ball.iter().enumerate() {
            for &y in &ball[i + 1..] {
                let d = space.dist(x, y).unwrap_or(f64::NAN);
                cert.offer((vals[x] - vals[y]).abs() - e.k * d, &[x, y]);
            }
        }
    }
    cert.finish()
        .with("uncovered", json!(uncovered))
        .with("entries", json!(w.len()))
}

/// Each member `ψ_n ξ_n` is bounded by `2^j` and Lipschitz with the
/// product-rule constant `2^j lip(ξ_n) + lip(ψ_n)`, both measured.
pub fn member_certificates(
    space: &MetricSpace,
    dec: &Decomposition,
    tables: &[Vec<f64>],
    tol: f64,
) -> Result<Vec<Certificate>> {
    let mut out = Vec::new();
    for (n, t) in tables.iter().enumerate() {
        let cap = 2f64.powi(dec.slices[n].exponent as i32);
        out.push(check_range(
            t,
            &space.points().collect::<Vec<_>>(),
            &Interval::closed(-cap, cap),
            tol,
        ));
        let xi = dec.pou.member(n).tabulate(space)?;
        let psi = dec.pieces[n].tabulate(space)?;
        let k = cap * support_lip(space, &xi) + global_lip_values(space, &psi).value;
        out.push(check_k_lipschitz(space, t, k, tol));
    }
    Ok(out)
}

/// Modulus bound on all pairs, `ℓ ≥ η`, `ℓ` `M`-Lipschitz, and a local
/// witness regenerated from the modulus.
pub fn modulus_certificates(
    space: &MetricSpace,
    vals: &[f64],
    mw: &ModulusWitness,
    tol: f64,
) -> Result<Vec<Certificate>> {
    let levels: Vec<f64> = mw.levels.iter().map(|&l| l as f64).collect();
    let back = witness_from_modulus(space, |x, y| mw.modulus(x, y), default_radius(space))?;
    Ok(vec![
        check_modulus(space, vals, |x, y| mw.modulus(x, y), tol),
        check_sandwich(
            &levels,
            &mw.ell_values,
            &vec![f64::INFINITY; vals.len()],
            tol,
        ),
        check_k_lipschitz(space, &mw.ell_values, mw.slope, tol),
        certify_local_witness(space, vals, &back, None, tol),
    ])
}

/// `φ < f_{n+1} < f_n` and `f_n < φ + 2^{1−n}` at every sample.
pub fn approx_certificates(base: &[f64], steps: &[ApproxStep]) -> Vec<Certificate> {
    let mut out = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let n = i as i32 + 1;
        let cap: Vec<f64> = base.iter().map(|v| v + 2f64.powi(1 - n)).collect();
        let upper: Vec<f64> = if i == 0 {
            cap
        } else {
            cap.iter()
                .zip(&steps[i - 1].values)
                .map(|(c, f)| c.min(*f))
                .collect()
        };
        out.push(check_strictly_between(base, &s.values, &upper));
    }
    out
}

/// A K-Lipschitz extension of `φ` built one point at a time: each new point
/// takes a seeded uniform value in the interval allowed by the points
/// already assigned.
pub fn random_k_extension(
    space: &MetricSpace,
    a: &Subset,
    phi: &[f64],
    k: f64,
    order: Option<&[usize]>,
    seed: u64,
) -> Result<Vec<f64>> {
    a.require_nonempty()?;
    if phi.len() != a.len() {
        return Err(LipError::InvalidParameter(format!(
            "{} values for a subset of {} points",
            phi.len(),
            a.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = vec![f64::NAN; space.len()];
    let mut assigned: Vec<usize> = a.ids().to_vec();
    for (&p, &v) in a.ids().iter().zip(phi) {
        vals[p] = v;
    }
    let default: Vec<usize> = space.points().collect();
    for &p in order.unwrap_or(&default) {
        space.check_point(p)?;
        if !vals[p].is_nan() {
            continue;
        }
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &q in &assigned {
            let d = space.dist(p, q)?;
            lo = lo.max(vals[q] - k * d);
            hi = hi.min(vals[q] + k * d);
        }
        if lo > hi {
            return Err(LipError::Infeasible { point: p, lo, hi });
        }
        let u: f64 = rng.gen();
        vals[p] = (lo + u * (hi - lo)).clamp(lo, hi);
        assigned.push(p);
    }
    if let Some(p) = vals.iter().position(|v| v.is_nan()) {
        return Err(LipError::InvalidParameter(format!("order omits point {p}")));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::mcshane_envelopes;

    fn grid() -> MetricSpace {
        MetricSpace::grid(0.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn identity_is_one_lipschitz() {
        let s = grid();
        let cert = check_field_k_lipschitz(&s, &Field::coordinate(0), 1.0, DEFAULT_TOL).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.detail["worst_ratio"], json!(1.0));
        let tight = check_field_k_lipschitz(&s, &Field::coordinate(0), 0.5, DEFAULT_TOL).unwrap();
        assert!(!tight.pass);
        assert_eq!(tight.witness, vec![0, 4]);
    }

    #[test]
    fn random_extensions_are_sandwiched() {
        let s = grid();
        let a = s.subset([0, 2]).unwrap();
        let env = mcshane_envelopes(&s, &a, &Field::coordinate(0), 1.0).unwrap();
        let lo = env.lower.tabulate(&s).unwrap();
        let hi = env.upper.tabulate(&s).unwrap();
        for seed in 0..100 {
            let f = random_k_extension(&s, &a, &[0.0, 1.0], 1.0, None, seed).unwrap();
            assert!(check_k_lipschitz(&s, &f, 1.0, DEFAULT_TOL).pass);
            assert!(check_sandwich(&lo, &f, &hi, DEFAULT_TOL).pass);
        }
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let c = env.convex(lambda).tabulate(&s).unwrap();
            assert!(check_k_lipschitz(&s, &c, 1.0, DEFAULT_TOL).pass);
        }
    }

    #[test]
    fn random_extension_of_everything_is_phi() {
        let s = grid();
        let phi = [0.0, 0.2, 0.1, 0.3, 0.2];
        let f = random_k_extension(&s, &s.full_subset(), &phi, 1.0, None, 7).unwrap();
        assert_eq!(f, phi.to_vec());
    }

    #[test]
    fn infeasible_data_detected() {
        let s = grid();
        let a = s.subset([0, 4]).unwrap();
        assert!(matches!(
            random_k_extension(&s, &a, &[0.0, 10.0], 1.0, None, 0).unwrap_err(),
            LipError::Infeasible { .. }
        ));
    }

    #[test]
    fn constant_witness_passes_and_tight_one_fails() {
        let s = grid();
        let w = LocalWitness::uniform(s.points(), 0.6, 0.0).unwrap();
        assert!(certify_local_witness(&s, &[1.0; 5], &w, None, DEFAULT_TOL).pass);
        let vals = Field::coordinate(0).tabulate(&s).unwrap();
        let c = certify_local_witness(&s, &vals, &w, None, DEFAULT_TOL);
        assert!(!c.pass);
        assert_eq!(c.witness, vec![0, 4]);
        let sparse = LocalWitness::uniform([0], 0.6, 5.0).unwrap();
        let c = certify_local_witness(&s, &vals, &sparse, None, DEFAULT_TOL);
        assert_eq!(c.worst_violation, f64::INFINITY);
        assert_eq!(c.witness, vec![2]);
    }

    #[test]
    fn strictness_requires_room() {
        let c = check_strictly_between(&[0.0, 0.0], &[0.5, 0.0], &[1.0, 1.0]);
        assert!(!c.pass);
        assert_eq!(c.witness, vec![1]);
        assert!(check_strictly_between(&[0.0], &[0.5], &[1.0]).pass);
    }

    #[test]
    fn metric_certificate_carries_triangle_witness() {
        let s = MetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        let c = check_metric(&s);
        assert!(!c.pass);
        assert_eq!(c.witness.len(), 3);
        assert!(check_metric(&grid()).pass);
    }
}
