//! Sample spaces and functions with known behaviour, used by the demos and
//! the test suites.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::random_k_extension;
use crate::error::Result;
use crate::local_lipschitz::{LocalEntry, LocalWitness};
use crate::metric_space::{Edge, MetricSpace, Subset};
use crate::scalar_field::{Field, Transport};
use crate::selection::IntervalMapping;

/// A sampled function together with the space it lives on.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub name: &'static str,
    pub space: MetricSpace,
    pub field: Field,
    pub values: Vec<f64>,
}

/// `sin(1/t)` on the points `s_n = 2/((4n+1)π)` and `t_n = 2/((4n+3)π)`
/// for `n = 1..=n_max`, where it takes the values `1` and `−1`.
/// Returns the sample and the `(s_n, t_n)` id pairs.
pub fn sin_inv_t_peaks(n_max: usize) -> Result<(Sampled, Vec<(usize, usize)>)> {
    let mut coords = Vec::with_capacity(2 * n_max);
    let mut pairs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let n = n as f64;
        coords.push(vec![2.0 / ((4.0 * n + 1.0) * PI)]);
        coords.push(vec![2.0 / ((4.0 * n + 3.0) * PI)]);
        pairs.push((coords.len() - 2, coords.len() - 1));
    }
    let space = MetricSpace::euclidean(coords)?;
    let (field, values) = sin_inv_t_values(&space)?;
    Ok((
        Sampled {
            name: "sin(1/t) peaks",
            space,
            field,
            values,
        },
        pairs,
    ))
}

/// Sine is not one of the transports, so the values are tabulated.
fn sin_inv_t_values(space: &MetricSpace) -> Result<(Field, Vec<f64>)> {
    let values = space
        .points()
        .map(|p| Ok((1.0 / space.coordinate(p, 0)?).sin()))
        .collect::<Result<Vec<f64>>>()?;
    Ok((Field::tabulated(values.clone()), values))
}

/// `sin(1/t)` on `count` geometrically spaced points of `[lo, hi]`.
pub fn sin_inv_t_grid(lo: f64, hi: f64, count: usize) -> Result<Sampled> {
    let space = MetricSpace::euclidean(
        geometric(lo, hi, count)
            .into_iter()
            .map(|t| vec![t])
            .collect(),
    )?;
    let (field, values) = sin_inv_t_values(&space)?;
    Ok(Sampled {
        name: "sin(1/t)",
        space,
        field,
        values,
    })
}

/// `count ≥ 2` points from `lo` to `hi` with constant ratio.
pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * (r * i as f64).exp()
            }
        })
        .collect()
}

/// Witness `(p, p/4, 4/p²)` for a function on `(0, ∞)` whose derivative
/// is bounded by `1/t²`, such as `sin(1/t)` and `1/t`: every sample of
/// `O(p, p/2)` exceeds `p/2`. Centres must have positive coordinate.
pub fn inverse_square_witness(
    space: &MetricSpace,
    centers: impl IntoIterator<Item = usize>,
) -> Result<LocalWitness> {
    let entries = centers
        .into_iter()
        .map(|p| {
            let t = space.coordinate(p, 0)?;
            Ok(LocalEntry {
                p,
                delta: t / 4.0,
                k: 4.0 / (t * t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LocalWitness::new(entries)
}

/// Squares `t²` on the uniform grid `[−3, 3]` with the witness
/// `(p, 1, 2|p| + 4)`.
pub fn square(step: f64) -> Result<(Sampled, LocalWitness)> {
    let space = MetricSpace::grid(-3.0, 3.0, step)?;
    let field = Field::coordinate(0).mul(&Field::coordinate(0));
    let values = field.tabulate(&space)?;
    let entries = space
        .points()
        .map(|p| {
            let t = space.coordinate(p, 0)?;
            Ok(LocalEntry {
                p,
                delta: 1.0,
                k: 2.0 * t.abs() + 4.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        Sampled {
            name: "t^2",
            space,
            field,
            values,
        },
        LocalWitness::new(entries)?,
    ))
}

/// `1/t` on `count` geometric samples of `[lo, hi]`.
pub fn reciprocal(lo: f64, hi: f64, count: usize) -> Result<(Sampled, LocalWitness)> {
    let space = MetricSpace::euclidean(
        geometric(lo, hi, count)
            .into_iter()
            .map(|t| vec![t])
            .collect(),
    )?;
    let field = Field::coordinate(0).transport(Transport::Reciprocal);
    let values = field.tabulate(&space)?;
    let w = inverse_square_witness(&space, space.points())?;
    Ok((
        Sampled {
            name: "1/t",
            space,
            field,
            values,
        },
        w,
    ))
}

/// The cusp curve `u_t = (t³, t²)` for `t = ±ratio^k`, `k = 0..count`,
/// with `f(u_t) = t²` for `t > 0` and `−t²` for `t < 0`. Returns the sample
/// and the `(u_t, u_{−t})` id pairs, innermost last.
pub fn cusp_curve(count: usize, ratio: f64) -> Result<(Sampled, Vec<(usize, usize)>)> {
    let mut coords = Vec::with_capacity(2 * count);
    let mut values = Vec::with_capacity(2 * count);
    let mut pairs = Vec::with_capacity(count);
    for k in 0..count {
        let t = ratio.powi(k as i32);
        for s in [t, -t] {
            coords.push(vec![s * s * s, s * s]);
            values.push(s.signum() * s * s);
        }
        pairs.push((coords.len() - 2, coords.len() - 1));
    }
    let space = MetricSpace::euclidean(coords)?;
    Ok((
        Sampled {
            name: "cusp curve",
            space,
            field: Field::tabulated(values.clone()),
            values,
        },
        pairs,
    ))
}

/// Staircase values `ℓ_k(t)` for `k = 1..=k_max` as rows `(t, [ℓ_1..])`.
pub fn staircase_table(ts: &[f64], k_max: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    ts.iter()
        .map(|&t| {
            let row = (1..=k_max)
                .map(|k| crate::partition_of_unity::staircase(k, t))
                .collect::<Result<Vec<_>>>()?;
            Ok((t, row))
        })
        .collect()
}

/// Step bounds on a grid: `g = 1` on `[0, ∞)` and `0` before, `h = 2` on
/// `(0, ∞)` and `1.2` elsewhere. `g` is u.s.c., `h` is l.s.c., `g < h`.
pub fn step_bounds(space: &MetricSpace) -> Result<IntervalMapping> {
    let mut g = Vec::with_capacity(space.len());
    let mut h = Vec::with_capacity(space.len());
    for p in space.points() {
        let t = space.coordinate(p, 0)?;
        g.push(if t >= 0.0 { 1.0 } else { 0.0 });
        h.push(if t > 0.0 { 2.0 } else { 1.2 });
    }
    Ok(IntervalMapping::between(
        Field::tabulated(g),
        Field::tabulated(h),
    ))
}

/// `g ≡ −∞`, `h(t) = |t|` with `h` vanishing at the origin only.
pub fn dowker_step() -> IntervalMapping {
    IntervalMapping::new(None, Some(Field::coordinate(0).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Matrix,
    Euclidean,
    Graph,
    Grid,
}

impl Backend {
    pub const ALL: [Backend; 4] = [
        Backend::Matrix,
        Backend::Euclidean,
        Backend::Graph,
        Backend::Grid,
    ];
}

/// A seeded random space with `n` points. The matrix backend holds ℓ¹
/// distances of random points in the unit cube; the graph backend a random
/// connected weighted graph.
pub fn random_space(backend: Backend, n: usize, rng: &mut ChaCha8Rng) -> Result<MetricSpace> {
    match backend {
        Backend::Matrix => {
            let pts: Vec<[f64; 3]> = (0..n).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
            let rows = pts
                .iter()
                .map(|a| {
                    pts.iter()
                        .map(|b| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
                        .collect()
                })
                .collect();
            MetricSpace::from_matrix(rows)
        }
        Backend::Euclidean => MetricSpace::euclidean(
            (0..n)
                .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
                .collect(),
        ),
        Backend::Graph => {
            let mut edges: Vec<Edge> = (1..n)
                .map(|v| Edge {
                    u: rng.gen_range(0..v),
                    v,
                    w: rng.gen_range(0.1..1.0),
                })
                .collect();
            for _ in 0..n {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    edges.push(Edge {
                        u,
                        v,
                        w: rng.gen_range(0.1..1.0),
                    });
                }
            }
            MetricSpace::graph(n, &edges)
        }
        Backend::Grid => {
            let lo = rng.gen_range(-2.0..0.0);
            let step = rng.gen_range(0.05..0.5);
            MetricSpace::grid(lo, lo + step * (n as f64 - 0.5), step)
        }
    }
}

/// An extension problem: a space, a nonempty subset, a constant and data
/// that is `K`-Lipschitz on the subset.
#[derive(Debug, Clone)]
pub struct ExtensionInstance {
    pub backend: Backend,
    pub space: MetricSpace,
    pub subset: Subset,
    pub k: f64,
    pub phi: Vec<f64>,
}

/// Random instance: `φ` is a seeded random `K`-Lipschitz function on the
/// whole space restricted to a random nonempty subset.
pub fn random_instance(backend: Backend, seed: u64) -> Result<ExtensionInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=40);
    let space = random_space(backend, n, &mut rng)?;
    let k = rng.gen_range(0.1..5.0);
    let mut ids: Vec<usize> = space.points().collect();
    ids.shuffle(&mut rng);
    let m = rng.gen_range(1..=n);
    let subset = space.subset(ids[..m].iter().copied())?;
    let start = space.subset([ids[0]])?;
    let full = random_k_extension(
        &space,
        &start,
        &[rng.gen_range(-1.0..1.0)],
        k,
        Some(&ids),
        rng.gen(),
    )?;
    let phi = subset.ids().iter().map(|&p| full[p]).collect();
    Ok(ExtensionInstance {
        backend,
        space,
        subset,
        k,
        phi,
    })
}
