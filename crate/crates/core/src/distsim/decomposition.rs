//! Low-diameter graph decomposition by exponentially shifted starts.
//!
//! Each of `ceil(partitions_per_log * log2 n)` independent partitions is
//! built the same way: every vertex draws an exponential shift `delta_v`
//! (rate `beta`, redrawn until below the cap `shift_cap_per_log * log2 n`),
//! and every vertex joins the vertex `c` minimizing `hopdist(c, v) -
//! delta_c`, ties to the smaller id. The winner for `v` is found by a
//! Bellman-Ford-style relaxation that mirrors a lock-step broadcast where
//! vertex `c` starts at simulated time `-delta_c`: this yields connected
//! clusters whose hop radius stays below the cap, and any fixed edge has
//! its endpoints co-clustered with constant probability per partition, so
//! across all partitions every edge is covered with high probability.

use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::seeding::{mix_seed3, stream};

use super::{log2_ceil, log2f, SimConfig, SimError, SimTrace, SALT_SHIFT};

/// One cluster of one partition: the shift-owning center, its members
/// (sorted ascending, center included), and the maximum hop distance from
/// the center to a member along intra-cluster paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub center: VertexId,
    pub members: Vec<VertexId>,
    pub hop_radius: u32,
}

/// One partition of the vertex set. `cluster_of[v]` indexes into
/// `clusters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub cluster_of: Vec<usize>,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterDecomposition {
    pub partitions: Vec<Partition>,
    /// Every cluster's `hop_radius` is at most this.
    pub radius_bound: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("partition {partition} does not assign vertex {vertex} consistently")]
    NotPartitioned { partition: usize, vertex: VertexId },
    #[error("cluster {cluster} of partition {partition} is not connected")]
    Disconnected { partition: usize, cluster: usize },
    #[error(
        "cluster {cluster} of partition {partition} has measured radius {measured}, recorded {recorded}"
    )]
    RadiusMismatch {
        partition: usize,
        cluster: usize,
        measured: u32,
        recorded: u32,
    },
    #[error(
        "cluster {cluster} of partition {partition} has radius {radius} above the bound {bound}"
    )]
    RadiusBound {
        partition: usize,
        cluster: usize,
        radius: u32,
        bound: u32,
    },
}

impl ClusterDecomposition {
    /// Checks the structural invariants directly against `g`: each
    /// partition covers every vertex exactly once, members agree with the
    /// assignment map, every cluster is connected, and measured radii match
    /// the recorded ones and respect the global bound.
    pub fn validate(&self, g: &Graph) -> Result<(), DecompositionError> {
        for (pi, part) in self.partitions.iter().enumerate() {
            let bad = |vertex: VertexId| DecompositionError::NotPartitioned {
                partition: pi,
                vertex,
            };
            if part.cluster_of.len() != g.n() {
                return Err(bad(part.cluster_of.len().min(g.n())));
            }
            let mut seen = vec![false; g.n()];
            for (ci, cluster) in part.clusters.iter().enumerate() {
                for &v in &cluster.members {
                    if v >= g.n() || seen[v] || part.cluster_of[v] != ci {
                        return Err(bad(v.min(g.n().saturating_sub(1))));
                    }
                    seen[v] = true;
                }
                if !cluster.members.contains(&cluster.center) {
                    return Err(bad(cluster.center));
                }
            }
            if let Some(v) = seen.iter().position(|&s| !s) {
                return Err(bad(v));
            }
            for (ci, cluster) in part.clusters.iter().enumerate() {
                let measured = cluster_radius(g, part, ci, cluster).ok_or(
                    DecompositionError::Disconnected {
                        partition: pi,
                        cluster: ci,
                    },
                )?;
                if measured != cluster.hop_radius {
                    return Err(DecompositionError::RadiusMismatch {
                        partition: pi,
                        cluster: ci,
                        measured,
                        recorded: cluster.hop_radius,
                    });
                }
                if cluster.hop_radius > self.radius_bound {
                    return Err(DecompositionError::RadiusBound {
                        partition: pi,
                        cluster: ci,
                        radius: cluster.hop_radius,
                        bound: self.radius_bound,
                    });
                }
            }
        }
        Ok(())
    }

    /// Edges whose endpoints share a cluster in no partition; empty means
    /// the coverage event holds.
    pub fn uncovered_edges(&self, g: &Graph) -> Vec<EdgeId> {
        (0..g.m())
            .filter(|&id| {
                let e = g.edge(id);
                !self
                    .partitions
                    .iter()
                    .any(|p| p.cluster_of[e.u] == p.cluster_of[e.v])
            })
            .collect()
    }
}

/// BFS from the center within the cluster's member set; `None` if some
/// member is unreachable that way.
fn cluster_radius(g: &Graph, part: &Partition, ci: usize, cluster: &Cluster) -> Option<u32> {
    let mut dist: std::collections::BTreeMap<VertexId, u32> = std::collections::BTreeMap::new();
    dist.insert(cluster.center, 0);
    let mut queue = std::collections::VecDeque::from([cluster.center]);
    let mut radius = 0;
    while let Some(x) = queue.pop_front() {
        let dx = dist[&x];
        radius = radius.max(dx);
        for &(y, _) in g.neighbors(x) {
            if part.cluster_of.get(y) == Some(&ci) && !dist.contains_key(&y) {
                dist.insert(y, dx + 1);
                queue.push_back(y);
            }
        }
    }
    (dist.len() == cluster.members.len()).then_some(radius)
}

/// Runs the decomposition with the configured seed. The trace counts the
/// lock-step relaxation rounds; all partitions run simultaneously (LOCAL
/// messages can carry one state tuple per partition).
pub fn padded_decomposition(
    g: &Graph,
    cfg: &SimConfig,
) -> Result<(ClusterDecomposition, SimTrace), SimError> {
    decompose_with_seed(g, cfg, cfg.seed)
}

pub(crate) fn decompose_with_seed(
    g: &Graph,
    cfg: &SimConfig,
    seed: u64,
) -> Result<(ClusterDecomposition, SimTrace), SimError> {
    cfg.validate()?;
    let n = g.n();
    let logn = log2f(n);
    let ell = ((cfg.decomp.partitions_per_log * logn).ceil() as usize).max(1);
    let cap = cfg.decomp.shift_cap_per_log * logn;
    // A vertex at hop distance d from its winning center has d < cap, so
    // cap rounds of relaxation reach everyone; one more settles ties.
    let relax_rounds = cap.ceil() as u64 + 1;

    let mut partitions = Vec::with_capacity(ell);
    for pi in 0..ell {
        let shifts: Vec<f64> = (0..n)
            .map(|v| {
                let mut rng = stream(mix_seed3(seed, SALT_SHIFT, pi as u64), v as u64);
                draw_capped_exponential(&mut rng, cfg.decomp.beta, cap)
            })
            .collect();
        partitions.push(relax_partition(g, &shifts, relax_rounds));
    }

    let mut trace = SimTrace::new(cfg.model, None);
    let vid_bits = log2_ceil(n) as u64;
    // Per relaxation round each vertex sends its per-partition
    // (value, center, hop count) tuples to every neighbor.
    let bundle_bits = ell as u64 * (64 + vid_bits + 32);
    trace.add_phase(
        "decompose",
        relax_rounds,
        relax_rounds * 2 * g.m() as u64,
        if g.m() == 0 { 0 } else { bundle_bits },
    );
    trace.check_round_limit(cfg)?;

    Ok((
        ClusterDecomposition {
            partitions,
            radius_bound: cap.ceil() as u32,
        },
        trace,
    ))
}

/// Exponential draw redrawn until it lands below `cap`, keeping the
/// distribution continuous so distinct vertices never tie and the cluster
/// connectivity argument stays intact (truncating at the cap would pile
/// probability mass onto a single value).
fn draw_capped_exponential(rng: &mut impl rand::Rng, beta: f64, cap: f64) -> f64 {
    loop {
        let u = 1.0 - rng.random::<f64>();
        let d = -u.ln() / beta;
        if d < cap {
            return d;
        }
    }
}

fn relax_partition(g: &Graph, shifts: &[f64], rounds: u64) -> Partition {
    let n = g.n();
    // state[v] = (best value, center, hops); value = hopdist - shift.
    let mut state: Vec<(f64, VertexId, u32)> = (0..n).map(|v| (-shifts[v], v, 0)).collect();
    let better = |a: &(f64, VertexId, u32), b: &(f64, VertexId, u32)| match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Equal => a.1 < b.1,
        std::cmp::Ordering::Greater => false,
    };
    for _ in 0..rounds {
        let mut next = state.clone();
        for e in g.edges() {
            for (x, y) in [(e.u, e.v), (e.v, e.u)] {
                let candidate = (state[x].0 + 1.0, state[x].1, state[x].2 + 1);
                if better(&candidate, &next[y]) {
                    next[y] = candidate;
                }
            }
        }
        state = next;
    }

    // Clusters are indexed by ascending center id.
    let centers: std::collections::BTreeSet<VertexId> = state.iter().map(|s| s.1).collect();
    let cluster_index: std::collections::BTreeMap<VertexId, usize> = centers
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut clusters: Vec<Cluster> = centers
        .iter()
        .map(|&center| Cluster {
            center,
            members: Vec::new(),
            hop_radius: 0,
        })
        .collect();
    let mut cluster_of = vec![0usize; n];
    for (v, &(_, center, hops)) in state.iter().enumerate() {
        let ci = cluster_index[&center];
        cluster_of[v] = ci;
        clusters[ci].members.push(v);
        clusters[ci].hop_radius = clusters[ci].hop_radius.max(hops);
    }
    Partition {
        cluster_of,
        clusters,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Family, GenSpec};

    #[test]
    fn single_vertex_graph_gets_one_cluster_per_partition() {
        let g = Graph::unit(1, []).unwrap();
        let cfg = SimConfig::local(3);
        let (d, trace) = padded_decomposition(&g, &cfg).unwrap();
        assert_eq!(d.partitions.len(), 8);
        for p in &d.partitions {
            assert_eq!(p.clusters.len(), 1);
            assert_eq!(p.clusters[0].members, vec![0]);
            assert_eq!(p.clusters[0].hop_radius, 0);
        }
        d.validate(&g).unwrap();
        assert!(trace.rounds_used > 0);
        assert_eq!(trace.messages_total, 0);
    }

    #[test]
    fn two_vertex_edge_is_covered_across_partitions() {
        let g = Graph::unit(2, [(0, 1)]).unwrap();
        for seed in 0..20 {
            let cfg = SimConfig::local(seed);
            let (d, _) = padded_decomposition(&g, &cfg).unwrap();
            d.validate(&g).unwrap();
            assert_eq!(
                d.uncovered_edges(&g),
                Vec::<EdgeId>::new(),
                "seed {seed} left the only edge uncovered in all {} partitions",
                d.partitions.len()
            );
        }
    }

    #[test]
    fn path_graph_is_fully_covered_with_small_radii() {
        let g = generate(&GenSpec::unit(Family::Path, 64, 5)).unwrap();
        let cfg = SimConfig::local(11);
        let (d, trace) = padded_decomposition(&g, &cfg).unwrap();
        d.validate(&g).unwrap();
        assert_eq!(d.radius_bound, 12);
        assert!(d.uncovered_edges(&g).is_empty());
        assert_eq!(d.partitions.len(), 48);
        assert!(trace.rounds_used <= 13 + 1);
    }

    #[test]
    fn random_graph_decomposition_is_deterministic() {
        let g = generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.1 }, 48, 9)).unwrap();
        let cfg = SimConfig::local(21);
        let (d1, t1) = padded_decomposition(&g, &cfg).unwrap();
        let (d2, t2) = padded_decomposition(&g, &cfg).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(t1, t2);
        d1.validate(&g).unwrap();
        let other = padded_decomposition(&g, &SimConfig::local(22)).unwrap().0;
        assert_ne!(d1, other, "different seeds should move cluster boundaries");
    }

    #[test]
    fn validate_flags_a_doctored_radius() {
        let g = Graph::unit(3, [(0, 1), (1, 2)]).unwrap();
        let (mut d, _) = padded_decomposition(&g, &SimConfig::local(4)).unwrap();
        d.validate(&g).unwrap();
        // Find a cluster with more than one member and corrupt its radius.
        let target = d
            .partitions
            .iter_mut()
            .flat_map(|p| p.clusters.iter_mut())
            .find(|c| c.members.len() > 1);
        if let Some(c) = target {
            c.hop_radius += 1;
            assert!(matches!(
                d.validate(&g),
                Err(DecompositionError::RadiusMismatch { .. })
            ));
        }
    }

    #[test]
    fn shift_draws_stay_below_cap() {
        let mut rng = stream(7, 1);
        for _ in 0..1000 {
            let d = draw_capped_exponential(&mut rng, 0.25, 3.0);
            assert!((0.0..3.0).contains(&d));
        }
    }
}
