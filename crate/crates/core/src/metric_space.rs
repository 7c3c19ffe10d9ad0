//! Finite metric spaces.
//!
//! A [`MetricSpace`] is a finite point set with ids `0..n` and a distance
//! function supplied by one of four backends. Every construction in the crate
//! reads distances through [`MetricSpace::dist`], so the backends only have to
//! agree on that one query.

use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use crate::error::{LipError, Result};

/// Absolute tolerance for metric-axiom checks on floating backends.
pub const METRIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
enum Backend {
    /// Row-major `n × n` matrix.
    Matrix(Vec<f64>),
    Euclidean {
        coords: Vec<Vec<f64>>,
    },
    /// All-pairs shortest paths, precomputed at construction.
    Graph {
        apsp: Vec<f64>,
    },
    Grid {
        lo: f64,
        step: f64,
    },
}

/// Weighted undirected edge for the graph backend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    backend: Backend,
    n: usize,
}

impl MetricSpace {
    /// Explicit distance matrix. Only the shape is checked here; run
    /// [`validate_metric`] to check the axioms.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(LipError::InvalidSpace("empty distance matrix".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(LipError::InvalidSpace(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            flat.extend(row);
        }
        Ok(Self {
            backend: Backend::Matrix(flat),
            n,
        })
    }

    pub fn euclidean(coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(LipError::InvalidSpace("empty point cloud".into()));
        }
        let dim = coords[0].len();
        if dim == 0 || coords.iter().any(|c| c.len() != dim) {
            return Err(LipError::InvalidSpace(
                "point cloud coordinates must share a positive dimension".into(),
            ));
        }
        if coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(LipError::InvalidSpace("non-finite coordinate".into()));
        }
        Ok(Self {
            backend: Backend::Euclidean { coords },
            n,
        })
    }

    /// Uniform 1-D grid `lo, lo + step, …` up to `hi` (inclusive when `hi`
    /// lands on the grid up to rounding).
    pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
            return Err(LipError::InvalidSpace(format!(
                "bad grid lo={lo} hi={hi} step={step}"
            )));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok(Self {
            backend: Backend::Grid { lo, step },
            n,
        })
    }

    /// Shortest-path metric of a connected weighted graph.
    pub fn graph(nodes: usize, edges: &[Edge]) -> Result<Self> {
        if nodes == 0 {
            return Err(LipError::InvalidSpace("graph without nodes".into()));
        }
        let mut g = UnGraph::<(), f64>::with_capacity(nodes, edges.len());
        let ids: Vec<_> = (0..nodes).map(|_| g.add_node(())).collect();
        for e in edges {
            if e.u >= nodes || e.v >= nodes {
                return Err(LipError::InvalidSpace(format!(
                    "edge ({}, {}) references a missing node",
                    e.u, e.v
                )));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(LipError::InvalidSpace(format!(
                    "edge ({}, {}) has non-positive weight {}",
                    e.u, e.v, e.w
                )));
            }
            g.add_edge(ids[e.u], ids[e.v], e.w);
        }
        let table = petgraph::algo::floyd_warshall(&g, |e| *e.weight())
            .map_err(|_| LipError::InvalidSpace("negative cycle".into()))?;
        let mut apsp = vec![0.0; nodes * nodes];
        for i in 0..nodes {
            for j in i + 1..nodes {
                let d = table[&(ids[i], ids[j])];
                // unreachable pairs come back as f64::MAX
                if !d.is_finite() || d == f64::MAX {
                    return Err(LipError::InvalidSpace(format!(
                        "graph is disconnected: no path between {i} and {j}"
                    )));
                }
                // stored symmetrically so that d(p,q) and d(q,p) are the same float
                apsp[i * nodes + j] = d;
                apsp[j * nodes + i] = d;
            }
        }
        Ok(Self {
            backend: Backend::Graph { apsp },
            n: nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn backend_name(&self) -> &'static str {
        match self.backend {
            Backend::Matrix(_) => "matrix",
            Backend::Euclidean { .. } => "euclidean",
            Backend::Graph { .. } => "graph",
            Backend::Grid { .. } => "grid",
        }
    }

    pub fn check_point(&self, id: usize) -> Result<()> {
        if id < self.n {
            Ok(())
        } else {
            Err(LipError::PointOutOfRange { id, n: self.n })
        }
    }

    /// Distance between two points.
    pub fn dist(&self, p: usize, q: usize) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.d(p, q))
    }

    /// Unchecked distance; callers guarantee `p, q < n`.
    ///
    /// Computed on the ordered pair so that `d(p,q)` and `d(q,p)` are
    /// bitwise equal on every backend.
    #[inline]
    pub(crate) fn d(&self, p: usize, q: usize) -> f64 {
        if p == q {
            return 0.0;
        }
        let (a, b) = if p < q { (p, q) } else { (q, p) };
        match &self.backend {
            Backend::Matrix(m) => m[p * self.n + q],
            Backend::Graph { apsp } => apsp[a * self.n + b],
            Backend::Euclidean { coords } => coords[a]
                .iter()
                .zip(&coords[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Backend::Grid { lo, step } => {
                let xa = lo + a as f64 * step;
                let xb = lo + b as f64 * step;
                xb - xa
            }
        }
    }

    /// Coordinate `axis` of point `p`, for the Euclidean and grid backends.
    pub fn coordinate(&self, p: usize, axis: usize) -> Result<f64> {
        self.check_point(p)?;
        match &self.backend {
            Backend::Euclidean { coords } => coords[p].get(axis).copied().ok_or_else(|| {
                LipError::NoCoordinates(format!(
                    "axis {axis} out of range for dimension {}",
                    coords[p].len()
                ))
            }),
            Backend::Grid { lo, step } if axis == 0 => Ok(lo + p as f64 * step),
            Backend::Grid { .. } => Err(LipError::NoCoordinates(format!(
                "grid spaces are one-dimensional, got axis {axis}"
            ))),
            _ => Err(LipError::NoCoordinates(format!(
                "{} backend has no coordinates",
                self.backend_name()
            ))),
        }
    }

    pub fn has_coordinates(&self) -> bool {
        matches!(
            self.backend,
            Backend::Euclidean { .. } | Backend::Grid { .. }
        )
    }

    /// Grid id nearest to the coordinate `x` (grid backend only).
    pub fn grid_index(&self, x: f64) -> Option<usize> {
        match self.backend {
            Backend::Grid { lo, step } => {
                let i = ((x - lo) / step).round();
                (i >= 0.0 && (i as usize) < self.n).then_some(i as usize)
            }
            _ => None,
        }
    }

    /// `d(p, S) = min_{s ∈ S} d(p, s)`.
    pub fn dist_to_set(&self, p: usize, set: &Subset) -> Result<f64> {
        self.check_point(p)?;
        if set.is_empty() {
            return Err(LipError::EmptySubset);
        }
        if set.host_len() != self.n {
            return Err(LipError::InvalidParameter(
                "subset belongs to a different space".into(),
            ));
        }
        Ok(self.d_set(p, set.ids()))
    }

    #[inline]
    pub(crate) fn d_set(&self, p: usize, ids: &[usize]) -> f64 {
        ids.iter()
            .map(|&s| self.d(p, s))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sample points of the open ball `O(p, r)`.
    pub fn ball(&self, p: usize, r: f64) -> Vec<usize> {
        self.points().filter(|&x| self.d(p, x) < r).collect()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for p in self.points() {
            for q in p + 1..self.n {
                best = best.max(self.d(p, q));
            }
        }
        best
    }

    /// Smallest distance between distinct points (`+∞` for a single point).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for p in self.points() {
            for q in p + 1..self.n {
                best = best.min(self.d(p, q));
            }
        }
        best
    }

    pub fn full_subset(&self) -> Subset {
        Subset {
            ids: self.points().collect(),
            host_len: self.n,
        }
    }

    pub fn subset(&self, ids: impl IntoIterator<Item = usize>) -> Result<Subset> {
        Subset::new(self.n, ids)
    }
}

/// Sorted, deduplicated set of point ids of a host space with `host_len`
/// points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    ids: Vec<usize>,
    host_len: usize,
}

impl Subset {
    pub fn new(host_len: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut ids: Vec<usize> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        if let Some(&bad) = ids.iter().find(|&&id| id >= host_len) {
            return Err(LipError::PointOutOfRange {
                id: bad,
                n: host_len,
            });
        }
        Ok(Self { ids, host_len })
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn host_len(&self) -> usize {
        self.host_len
    }

    pub fn contains(&self, id: usize) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// Position of `id` inside the sorted member list.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn complement(&self) -> Subset {
        Subset {
            ids: (0..self.host_len)
                .filter(|id| !self.contains(*id))
                .collect(),
            host_len: self.host_len,
        }
    }

    pub fn is_full(&self) -> bool {
        self.ids.len() == self.host_len
    }

    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(LipError::EmptySubset)
        } else {
            Ok(())
        }
    }
}

/// A single metric-axiom violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonZeroDiagonal {
        p: usize,
        value: f64,
    },
    NotFinite {
        p: usize,
        q: usize,
    },
    Negative {
        p: usize,
        q: usize,
        value: f64,
    },
    ZeroOffDiagonal {
        p: usize,
        q: usize,
    },
    Asymmetry {
        p: usize,
        q: usize,
        d_pq: f64,
        d_qp: f64,
    },
    /// `d(p,r) > d(p,q) + d(q,r)` by `excess`.
    Triangle {
        p: usize,
        q: usize,
        r: usize,
        excess: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub points: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every metric axiom over all pairs and triples. Violations are
/// reported as data; the function itself never fails.
pub fn validate_metric(space: &MetricSpace) -> ValidationReport {
    let n = space.len();
    // raw reads so that asymmetric matrices are seen as they are
    let raw = |p: usize, q: usize| match &space.backend {
        Backend::Matrix(m) => m[p * n + q],
        _ => space.d(p, q),
    };
    let mut violations = Vec::new();
    for p in 0..n {
        let v = raw(p, p);
        if v != 0.0 {
            violations.push(Violation::NonZeroDiagonal { p, value: v });
        }
    }
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            let d = raw(p, q);
            if !d.is_finite() {
                violations.push(Violation::NotFinite { p, q });
                continue;
            }
            if d < 0.0 {
                violations.push(Violation::Negative { p, q, value: d });
            } else if d == 0.0 && p < q {
                violations.push(Violation::ZeroOffDiagonal { p, q });
            }
            if p < q {
                let back = raw(q, p);
                if (d - back).abs() > METRIC_TOL {
                    violations.push(Violation::Asymmetry {
                        p,
                        q,
                        d_pq: d,
                        d_qp: back,
                    });
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            if q == p {
                continue;
            }
            for r in 0..n {
                if r == p || r == q {
                    continue;
                }
                let excess = raw(p, r) - (raw(p, q) + raw(q, r));
                if excess > METRIC_TOL {
                    violations.push(Violation::Triangle { p, q, r, excess });
                }
            }
        }
    }
    ValidationReport {
        points: n,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent shortest-path oracle (Bellman–Ford relaxation).
    fn bellman_ford(nodes: usize, edges: &[Edge], src: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            for e in edges {
                let (a, b) = (dist[e.u], dist[e.v]);
                if a + e.w < dist[e.v] {
                    dist[e.v] = a + e.w;
                }
                if b + e.w < dist[e.u] {
                    dist[e.u] = b + e.w;
                }
            }
        }
        dist
    }

    fn path_graph() -> (usize, Vec<Edge>) {
        (
            3,
            vec![Edge { u: 0, v: 1, w: 2.0 }, Edge { u: 1, v: 2, w: 3.0 }],
        )
    }

    #[test]
    fn uniform_metric_is_valid() {
        let s = MetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(validate_metric(&s).is_valid());
    }

    #[test]
    fn triangle_violation_reports_witness() {
        let s = MetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        let report = validate_metric(&s);
        // brute force over all ordered triples: only (0,1,2) and (2,1,0) break
        let triangles: Vec<_> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::Triangle { p, q, r, excess } => Some((*p, *q, *r, *excess)),
                _ => None,
            })
            .collect();
        assert_eq!(triangles, vec![(0, 1, 2, 3.0), (2, 1, 0, 3.0)]);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn asymmetry_is_reported() {
        let s = MetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let report = validate_metric(&s);
        assert!(report.violations.contains(&Violation::Asymmetry {
            p: 0,
            q: 1,
            d_pq: 1.0,
            d_qp: 2.0
        }));
    }

    #[test]
    fn zero_and_negative_entries_are_reported() {
        let s = MetricSpace::from_matrix(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
            vec![1.0, -1.0, 0.0],
        ])
        .unwrap();
        let report = validate_metric(&s);
        assert!(report
            .violations
            .contains(&Violation::ZeroOffDiagonal { p: 0, q: 1 }));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Negative { p: 1, q: 2, .. })));
    }

    #[test]
    fn grid_distance() {
        let s = MetricSpace::grid(0.0, 2.0, 0.5).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.dist(0, 3).unwrap(), 1.5);
        assert_eq!(s.coordinate(3, 0).unwrap(), 1.5);
        assert!(validate_metric(&s).is_valid());
    }

    #[test]
    fn euclidean_distance() {
        let s = MetricSpace::euclidean(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.dist(0, 1).unwrap(), 5.0);
        assert_eq!(s.dist(1, 0).unwrap(), 5.0);
    }

    #[test]
    fn graph_distance_matches_shortest_path_oracle() {
        let (n, edges) = path_graph();
        let s = MetricSpace::graph(n, &edges).unwrap();
        let oracle = bellman_ford(n, &edges, 0);
        assert_eq!(oracle[2], 5.0);
        assert_eq!(s.dist(0, 2).unwrap(), oracle[2]);
        for p in 0..n {
            let row = bellman_ford(n, &edges, p);
            for q in 0..n {
                assert_eq!(s.dist(p, q).unwrap(), row[q]);
            }
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let err = MetricSpace::graph(3, &[Edge { u: 0, v: 1, w: 1.0 }]).unwrap_err();
        assert!(matches!(err, LipError::InvalidSpace(_)));
    }

    #[test]
    fn out_of_range_ids() {
        let s = MetricSpace::grid(0.0, 1.0, 0.5).unwrap();
        assert_eq!(
            s.dist(0, 7).unwrap_err(),
            LipError::PointOutOfRange { id: 7, n: 3 }
        );
        assert!(s.subset([0, 9]).is_err());
    }

    #[test]
    fn dist_to_set_examples() {
        let s = MetricSpace::grid(0.0, 2.0, 0.5).unwrap();
        let set = s.subset([0, 2]).unwrap(); // {0, 1}
        assert_eq!(s.dist_to_set(3, &set).unwrap(), 0.5);
        assert_eq!(s.dist_to_set(2, &set).unwrap(), 0.0);

        let (n, edges) = path_graph();
        let g = MetricSpace::graph(n, &edges).unwrap();
        let target = g.subset([2]).unwrap();
        assert_eq!(g.dist_to_set(0, &target).unwrap(), 5.0);

        let empty = s.subset([]).unwrap();
        assert_eq!(s.dist_to_set(0, &empty).unwrap_err(), LipError::EmptySubset);
    }

    #[test]
    fn subset_complement_and_ball() {
        let s = MetricSpace::grid(0.0, 2.0, 0.5).unwrap();
        let a = s.subset([4, 0, 0]).unwrap();
        assert_eq!(a.ids(), &[0, 4]);
        assert_eq!(a.complement().ids(), &[1, 2, 3]);
        assert_eq!(s.ball(2, 0.6), vec![1, 2, 3]);
        assert_eq!(s.diameter(), 2.0);
        assert_eq!(s.min_separation(), 0.5);
    }
}
