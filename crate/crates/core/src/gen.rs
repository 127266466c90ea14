//! Deterministic seeded graph generators for tests and benchmarks.
//!
//! The same [`GenSpec`] always produces the same graph: random families draw
//! from a ChaCha stream derived from the seed, and weights come from an
//! independently salted stream so changing the weight model never perturbs
//! the topology.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId, Weight};
use crate::seeding::stream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("edge probability {0} is not in [0, 1]")]
    BadProbability(f64),
    #[error("geometric radius {0} must be finite and nonnegative")]
    BadRadius(f64),
    #[error("weight range is empty: lo {lo} > hi {hi}")]
    EmptyWeightRange { lo: Weight, hi: Weight },
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),
    #[error("theta with {paths} paths of {hops} hops needs n = {expected}, got {given}")]
    ThetaVertexCount {
        paths: usize,
        hops: usize,
        expected: usize,
        given: usize,
    },
    #[error("theta needs paths >= 1 and hops >= 1, and hops >= 2 once paths >= 2")]
    ThetaShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Complete,
    Cycle,
    Path,
    Star,
    /// Near-square grid: `floor(sqrt(n))` rows filled row-major, the last row
    /// possibly partial.
    Grid,
    ErdosRenyi {
        p: f64,
    },
    RandomGeometric {
        radius: f64,
    },
    /// Two terminals (vertices 0 and 1) joined by `paths` internally disjoint
    /// paths of `hops` edges each.
    Theta {
        paths: usize,
        hops: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightModel {
    Unit,
    /// Uniform integer weights in `lo..=hi`.
    UniformInt { lo: Weight, hi: Weight },
}

impl Default for WeightModel {
    fn default() -> WeightModel {
        WeightModel::Unit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weights: WeightModel,
    /// Restrict the output to its largest connected component (relabeled to
    /// keep vertex ids contiguous), so the result may have fewer than `n`
    /// vertices.
    #[serde(default)]
    pub largest_component: bool,
}

impl GenSpec {
    pub fn unit(family: Family, n: usize, seed: u64) -> GenSpec {
        GenSpec {
            family,
            n,
            seed,
            weights: WeightModel::Unit,
            largest_component: false,
        }
    }
}

/// Vertex count a theta family requires.
pub fn theta_vertex_count(paths: usize, hops: usize) -> usize {
    2 + paths * hops.saturating_sub(1)
}

const SALT_TOPOLOGY: u64 = 0x01;
const SALT_WEIGHTS: u64 = 0x02;

pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    let n = spec.n;
    let pairs: Vec<(VertexId, VertexId)> = match spec.family {
        Family::Complete => (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect(),
        Family::Cycle => {
            if n < 3 {
                return Err(GenError::CycleTooSmall(n));
            }
            (0..n).map(|u| (u, (u + 1) % n)).collect()
        }
        Family::Path => (1..n).map(|v| (v - 1, v)).collect(),
        Family::Star => (1..n).map(|v| (0, v)).collect(),
        Family::Grid => grid_pairs(n),
        Family::ErdosRenyi { p } => {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(GenError::BadProbability(p));
            }
            let mut rng = stream(spec.seed, SALT_TOPOLOGY);
            (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.random::<f64>() < p)
                .collect()
        }
        Family::RandomGeometric { radius } => {
            if !radius.is_finite() || radius < 0.0 {
                return Err(GenError::BadRadius(radius));
            }
            let mut rng = stream(spec.seed, SALT_TOPOLOGY);
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let r2 = radius * radius;
            (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|&(u, v)| {
                    let dx = points[u].0 - points[v].0;
                    let dy = points[u].1 - points[v].1;
                    dx * dx + dy * dy <= r2
                })
                .collect()
        }
        Family::Theta { paths, hops } => {
            if paths < 1 || hops < 1 || (paths >= 2 && hops < 2) {
                return Err(GenError::ThetaShape);
            }
            let expected = theta_vertex_count(paths, hops);
            if n != expected {
                return Err(GenError::ThetaVertexCount {
                    paths,
                    hops,
                    expected,
                    given: n,
                });
            }
            let mut pairs = Vec::with_capacity(paths * hops);
            for j in 0..paths {
                let base = 2 + j * (hops - 1);
                let mut prev = 0;
                for step in 0..hops - 1 {
                    pairs.push((prev, base + step));
                    prev = base + step;
                }
                pairs.push((prev, 1));
            }
            pairs
        }
    };

    let pairs = if spec.largest_component {
        restrict_to_largest_component(n, pairs)
    } else {
        (n, pairs)
    };
    let (n, pairs) = pairs;

    let weighted: Vec<(VertexId, VertexId, Weight)> = match spec.weights {
        WeightModel::Unit => pairs.into_iter().map(|(u, v)| (u, v, 1)).collect(),
        WeightModel::UniformInt { lo, hi } => {
            if lo > hi {
                return Err(GenError::EmptyWeightRange { lo, hi });
            }
            let mut rng = stream(spec.seed, SALT_WEIGHTS);
            pairs
                .into_iter()
                .map(|(u, v)| (u, v, rng.random_range(lo..=hi)))
                .collect()
        }
    };
    Ok(Graph::new(n, weighted).expect("generators emit simple in-range edges"))
}

fn grid_pairs(n: usize) -> Vec<(VertexId, VertexId)> {
    if n == 0 {
        return Vec::new();
    }
    let rows = (n as f64).sqrt().floor() as usize;
    let rows = rows.max(1);
    let cols = n.div_ceil(rows);
    let mut pairs = Vec::new();
    for v in 0..n {
        let c = v % cols;
        if c + 1 < cols && v + 1 < n {
            pairs.push((v, v + 1));
        }
        if v + cols < n {
            pairs.push((v, v + cols));
        }
    }
    pairs
}

/// Keeps the largest connected component (ties broken toward the component
/// containing the smallest vertex), relabeling vertices in ascending order.
fn restrict_to_largest_component(
    n: usize,
    pairs: Vec<(VertexId, VertexId)>,
) -> (usize, Vec<(VertexId, VertexId)>) {
    if n == 0 {
        return (0, pairs);
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &pairs {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut queue = vec![start];
        comp[start] = id;
        let mut size = 0;
        while let Some(x) = queue.pop() {
            size += 1;
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    queue.push(y);
                }
            }
        }
        sizes.push(size);
    }
    let best = (0..sizes.len())
        .max_by_key(|&i| (sizes[i], std::cmp::Reverse(i)))
        .expect("n > 0 implies at least one component");
    let mut relabel = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if comp[v] == best {
            relabel[v] = next;
            next += 1;
        }
    }
    let kept = pairs
        .into_iter()
        .filter(|&(u, v)| comp[u] == best && comp[v] == best)
        .map(|(u, v)| (relabel[u], relabel[v]))
        .collect();
    (next, kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_families_have_expected_shapes() {
        let complete = generate(&GenSpec::unit(Family::Complete, 4, 0)).unwrap();
        assert_eq!(complete.m(), 6);
        let cycle = generate(&GenSpec::unit(Family::Cycle, 5, 0)).unwrap();
        assert_eq!(cycle.m(), 5);
        let path = generate(&GenSpec::unit(Family::Path, 6, 0)).unwrap();
        assert_eq!(path.m(), 5);
        let star = generate(&GenSpec::unit(Family::Star, 7, 0)).unwrap();
        assert_eq!(star.m(), 6);
        assert_eq!(star.degree(0), 6);
        let grid = generate(&GenSpec::unit(Family::Grid, 9, 0)).unwrap();
        assert_eq!(grid.m(), 12);
    }

    #[test]
    fn theta_three_by_two() {
        let g = generate(&GenSpec::unit(Family::Theta { paths: 3, hops: 2 }, 5, 0)).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 6);
        assert_eq!(g.degree(0), 3);
        assert_eq!(g.degree(1), 3);
        assert!(matches!(
            generate(&GenSpec::unit(Family::Theta { paths: 3, hops: 2 }, 6, 0)),
            Err(GenError::ThetaVertexCount { expected: 5, .. })
        ));
        assert!(matches!(
            generate(&GenSpec::unit(Family::Theta { paths: 2, hops: 1 }, 2, 0)),
            Err(GenError::ThetaShape)
        ));
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        assert_eq!(
            generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.0 }, 10, 1))
                .unwrap()
                .m(),
            0
        );
        assert_eq!(
            generate(&GenSpec::unit(Family::ErdosRenyi { p: 1.0 }, 10, 1))
                .unwrap()
                .m(),
            45
        );
        let spec = GenSpec::unit(Family::ErdosRenyi { p: 0.3 }, 20, 7);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.3 }, 20, 8)).unwrap();
        assert_ne!(generate(&spec).unwrap(), other);
        assert!(matches!(
            generate(&GenSpec::unit(Family::ErdosRenyi { p: 1.5 }, 5, 0)),
            Err(GenError::BadProbability(_))
        ));
    }

    #[test]
    fn weights_are_in_range_and_independent_of_model() {
        let base = GenSpec::unit(Family::ErdosRenyi { p: 0.5 }, 15, 3);
        let unit = generate(&base).unwrap();
        let weighted = generate(&GenSpec {
            weights: WeightModel::UniformInt { lo: 2, hi: 9 },
            ..base
        })
        .unwrap();
        assert_eq!(unit.m(), weighted.m());
        for (a, b) in unit.edges().iter().zip(weighted.edges()) {
            assert_eq!((a.u, a.v), (b.u, b.v));
            assert!((2..=9).contains(&b.w));
        }
    }

    #[test]
    fn largest_component_is_connected_and_relabeled() {
        let spec = GenSpec {
            largest_component: true,
            ..GenSpec::unit(Family::ErdosRenyi { p: 0.08 }, 40, 11)
        };
        let g = generate(&spec).unwrap();
        assert!(g.n() >= 1 && g.n() <= 40);
        if g.n() > 1 {
            let none = crate::graph::FaultSet::empty(crate::graph::FaultMode::Vertex);
            for v in 1..g.n() {
                assert!(crate::graph::distance(&g, 0, v, &none).unwrap().is_some());
            }
        }
    }

    #[test]
    fn geometric_radius_one_is_complete() {
        let g = generate(&GenSpec::unit(
            Family::RandomGeometric { radius: 1.5 },
            8,
            5,
        ))
        .unwrap();
        assert_eq!(g.m(), 28);
    }
}
