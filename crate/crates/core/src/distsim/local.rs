//! Fault-tolerant spanners in the LOCAL model.
//!
//! Pipeline: build a low-diameter decomposition into `O(log n)` partitions
//! whose clusters have `O(log n)` hop radius and which together co-cluster
//! every edge with high probability; then, for every cluster of every
//! partition, gather the cluster's induced subgraph at its center (LOCAL
//! messages may be arbitrarily large), run a sequential fault-tolerant
//! construction there, broadcast the chosen edges back, and return the
//! union over all clusters.
//!
//! Why the union works: for any fault set `F` (within the budget `f`), any
//! edge `{u, v}` that is a shortest surviving link lies inside some cluster
//! `C`, the cluster's spanner preserves `u`-`v` within stretch inside
//! `C \ F`, and longer pairs follow by composing along shortest paths. Each
//! partition contributes at most its own size bound, so the union pays an
//! extra `log n` factor. If some edge is co-clustered nowhere, the run is
//! retried with fresh shifts up to the configured retry cap.

use std::collections::BTreeSet;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::greedy::{
    exact_greedy_guarded, modified_greedy_weighted, ExactGuard, SpannerParams, SpannerResult,
    SpannerStats,
};

use super::decomposition::{decompose_with_seed, ClusterDecomposition};
use super::{attempt_seed, log2_ceil, ClusterAlgo, SimConfig, SimError, SimModel, SimTrace};

/// The subgraph of `g` induced by `members` (which must be sorted,
/// deduplicated, and in range), with vertices renumbered to
/// `0..members.len()`, plus the map from new edge ids back to `g`'s.
pub fn induced_subgraph(g: &Graph, members: &[VertexId]) -> (Graph, Vec<EdgeId>) {
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    let local_of = |v: VertexId| members.binary_search(&v).ok();
    let mut edges = Vec::new();
    let mut back = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if let (Some(lu), Some(lv)) = (local_of(e.u), local_of(e.v)) {
            edges.push((lu, lv, e.w));
            back.push(id);
        }
    }
    let sub = Graph::new(members.len(), edges)
        .expect("an induced subgraph of a valid graph is valid");
    (sub, back)
}

pub fn local_ft_spanner(
    g: &Graph,
    p: &SpannerParams,
    cfg: &SimConfig,
) -> Result<(SpannerResult, SimTrace), SimError> {
    if cfg.model != SimModel::Local {
        return Err(SimError::WrongModel {
            expected: SimModel::Local,
            got: cfg.model,
        });
    }
    cfg.validate()?;
    SpannerParams::new(p.k, p.f, p.mode)?;

    let mut trace = SimTrace::new(SimModel::Local, None);
    for attempt in 0..=cfg.retries {
        let (decomp, decomp_trace) =
            decompose_with_seed(g, cfg, attempt_seed(cfg.seed, attempt))?;
        trace.absorb(&decomp_trace);
        trace.check_round_limit(cfg)?;
        if !decomp.uncovered_edges(g).is_empty() {
            trace.retries_used += 1;
            continue;
        }
        let result = solve_on_clusters(g, p, cfg, &decomp, &mut trace)?;
        trace.check_round_limit(cfg)?;
        return Ok((result, trace));
    }
    Err(SimError::CoverageFailure {
        attempts: cfg.retries + 1,
    })
}

fn solve_on_clusters(
    g: &Graph,
    p: &SpannerParams,
    cfg: &SimConfig,
    decomp: &ClusterDecomposition,
    trace: &mut SimTrace,
) -> Result<SpannerResult, SimError> {
    let n = g.n();
    let vid_bits = log2_ceil(n) as u64;
    let eid_bits = log2_ceil(g.m().max(1)) as u64;

    // Group g's edges by (partition, cluster).
    let mut cluster_edges: Vec<Vec<Vec<EdgeId>>> = decomp
        .partitions
        .iter()
        .map(|part| vec![Vec::new(); part.clusters.len()])
        .collect();
    for (pi, part) in decomp.partitions.iter().enumerate() {
        for (id, e) in g.edges().iter().enumerate() {
            if part.cluster_of[e.u] == part.cluster_of[e.v] {
                cluster_edges[pi][part.cluster_of[e.u]].push(id);
            }
        }
    }

    // All partitions and clusters work simultaneously; round counts are the
    // maxima over clusters, message counts the totals.
    let max_radius = decomp
        .partitions
        .iter()
        .flat_map(|p| p.clusters.iter().map(|c| c.hop_radius))
        .max()
        .unwrap_or(0) as u64;
    let non_centers: u64 = decomp
        .partitions
        .iter()
        .flat_map(|p| p.clusters.iter())
        .map(|c| (c.members.len() - 1) as u64)
        .sum();
    let max_cluster_edges = cluster_edges
        .iter()
        .flatten()
        .map(|ids| ids.len() as u64)
        .max()
        .unwrap_or(0);

    // Each member reports to its tree parent so the center-rooted BFS tree
    // is known, then bundles flow up (convergecast) and the kept-edge list
    // flows back down, each in at most max_radius rounds.
    trace.add_phase("cluster-tree", 1, non_centers, vid_bits);
    trace.add_phase(
        "gather",
        max_radius,
        non_centers,
        max_cluster_edges * (2 * vid_bits + 64) + 32,
    );

    let mut union: BTreeSet<EdgeId> = BTreeSet::new();
    let mut lbc_calls = 0u64;
    let mut bfs_runs = 0u64;
    let mut max_kept = 0u64;
    for (pi, part) in decomp.partitions.iter().enumerate() {
        for (ci, cluster) in part.clusters.iter().enumerate() {
            let ids = &cluster_edges[pi][ci];
            if ids.is_empty() {
                continue;
            }
            let (sub, back) = induced_subgraph(g, &cluster.members);
            let solved = match cfg.cluster_algo {
                ClusterAlgo::Greedy => modified_greedy_weighted(&sub, p)?,
                ClusterAlgo::Exact => exact_greedy_guarded(&sub, p, ExactGuard::default())?,
            };
            lbc_calls += solved.stats.lbc_calls;
            bfs_runs += solved.stats.bfs_runs;
            max_kept = max_kept.max(solved.spanner_edge_ids.len() as u64);
            union.extend(solved.spanner_edge_ids.iter().map(|&local| back[local]));
        }
    }

    trace.add_phase("broadcast", max_radius, non_centers, max_kept * eid_bits);

    Ok(SpannerResult {
        stats: SpannerStats {
            edges_kept: union.len(),
            lbc_calls,
            bfs_runs,
            // No single global consideration order exists; clusters scan
            // their own induced subgraphs independently.
            edge_order: Vec::new(),
        },
        spanner_edge_ids: union,
    })
}
