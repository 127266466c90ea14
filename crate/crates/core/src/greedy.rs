//! Greedy fault-tolerant spanner constructions.
//!
//! All constructions scan edges one at a time and keep an edge exactly when
//! the current partial spanner lacks enough short, robust connectivity
//! between its endpoints:
//!
//! * [`exact_greedy`] enumerates every fault set of size at most `f` and
//!   keeps the edge if some set stretches its endpoints beyond `(2k-1) * w`.
//!   Exponential in `f` over the whole graph, so it is guarded to small
//!   inputs and serves as ground truth.
//! * [`greedy_with_order`] replaces the enumeration with a single
//!   length-bounded cut gap decision per edge (`t = 2k-1`, `alpha = f`):
//!   the edge is kept exactly when some cut of at most `f` vertices or edges
//!   could still separate its endpoints at hop scale `t`. Weights are
//!   ignored while scanning, so the edge order carries all weight
//!   sensitivity.
//! * [`modified_greedy_unweighted`] is the same scan restricted to
//!   unit-weight graphs with a caller-chosen order, and
//!   [`modified_greedy_weighted`] fixes the order to nondecreasing weight,
//!   which is what makes the hop-based test sound on weighted graphs.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    dijkstra, BlockMask, EdgeId, FaultMode, Graph, Topology, VertexId, Weight,
};
use crate::lbc::{lbc_gap_decide_with, LbcAnswer, LbcError, LbcInstance, LbcScratch};
use crate::seeding::stream;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GreedyError {
    #[error("stretch parameter k must be at least 1")]
    ZeroK,
    #[error("graph has an edge of weight {weight} but only unit weights are supported here")]
    NonUnitWeight { edge: EdgeId, weight: Weight },
    #[error("edge order must be a permutation of 0..{m}: {reason}")]
    BadOrder { m: usize, reason: String },
    #[error(
        "instance exceeds the exact enumeration guard (n = {n} > {max_n} or f = {f} > {max_f})"
    )]
    GuardExceeded {
        n: usize,
        f: u32,
        max_n: usize,
        max_f: u32,
    },
    #[error(transparent)]
    Lbc(#[from] LbcError),
}

/// Construction parameters: stretch `2k - 1`, resilience `f`, and whether
/// faults hit vertices or edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpannerParams {
    pub k: u32,
    pub f: u32,
    pub mode: FaultMode,
}

impl SpannerParams {
    pub fn new(k: u32, f: u32, mode: FaultMode) -> Result<SpannerParams, GreedyError> {
        if k == 0 {
            return Err(GreedyError::ZeroK);
        }
        Ok(SpannerParams { k, f, mode })
    }

    pub fn stretch(&self) -> u32 {
        2 * self.k - 1
    }

    fn validate(&self) -> Result<(), GreedyError> {
        if self.k == 0 {
            return Err(GreedyError::ZeroK);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpannerStats {
    pub edges_kept: usize,
    /// Gap decisions issued (zero for the exact construction).
    pub lbc_calls: u64,
    /// Shortest-path searches: hop-bounded searches inside gap decisions, or
    /// weighted searches inside the exact enumeration.
    pub bfs_runs: u64,
    /// The order edges were considered in.
    pub edge_order: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpannerResult {
    pub spanner_edge_ids: BTreeSet<EdgeId>,
    pub stats: SpannerStats,
}

/// Size limits for [`exact_greedy`], whose fault enumeration is
/// exponential in `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactGuard {
    pub max_n: usize,
    pub max_f: u32,
}

impl Default for ExactGuard {
    fn default() -> ExactGuard {
        ExactGuard { max_n: 14, max_f: 2 }
    }
}

/// Edge ids in ascending order, the default scan order on unit graphs.
pub fn ascending_order(g: &Graph) -> Vec<EdgeId> {
    (0..g.m()).collect()
}

/// Edge ids in nondecreasing weight order, ties by id.
pub fn weight_sorted_order(g: &Graph) -> Vec<EdgeId> {
    let mut order = ascending_order(g);
    order.sort_by_key(|&e| (g.edge(e).w, e));
    order
}

/// A seeded shuffle of the edge ids.
pub fn random_order(g: &Graph, seed: u64) -> Vec<EdgeId> {
    let mut order = ascending_order(g);
    order.shuffle(&mut stream(seed, 0x0e0e));
    order
}

fn validate_order(m: usize, order: &[EdgeId]) -> Result<(), GreedyError> {
    if order.len() != m {
        return Err(GreedyError::BadOrder {
            m,
            reason: format!("length {} != {}", order.len(), m),
        });
    }
    let mut seen = vec![false; m];
    for &e in order {
        if e >= m {
            return Err(GreedyError::BadOrder {
                m,
                reason: format!("id {e} out of range"),
            });
        }
        if seen[e] {
            return Err(GreedyError::BadOrder {
                m,
                reason: format!("id {e} repeated"),
            });
        }
        seen[e] = true;
    }
    Ok(())
}

/// Incrementally grown subgraph of a fixed host graph. Adjacency keeps the
/// host's edge ids so fault masks transfer, and lists stay sorted by
/// neighbor so searches stay deterministic.
struct PartialSpanner {
    n: usize,
    edge_bound: usize,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl PartialSpanner {
    fn new(n: usize, edge_bound: usize) -> PartialSpanner {
        PartialSpanner {
            n,
            edge_bound,
            adj: vec![Vec::new(); n],
        }
    }

    fn insert(&mut self, u: VertexId, v: VertexId, e: EdgeId) {
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a]
                .binary_search_by_key(&b, |&(x, _)| x)
                .expect_err("no parallel edges");
            self.adj[a].insert(pos, (b, e));
        }
    }
}

impl Topology for PartialSpanner {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn edge_bound(&self) -> usize {
        self.edge_bound
    }

    fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }
}

/// The polynomial greedy scan over an explicit edge order. Weights do not
/// influence the per-edge decision; unweighted and weighted front ends
/// differ only in which orders they admit.
pub fn greedy_with_order(
    g: &Graph,
    p: &SpannerParams,
    order: &[EdgeId],
) -> Result<SpannerResult, GreedyError> {
    p.validate()?;
    validate_order(g.m(), order)?;
    let t = p.stretch();
    let mut h = PartialSpanner::new(g.n(), g.m());
    let mut scratch = LbcScratch::new(g.n(), g.m());
    let mut kept = BTreeSet::new();
    let mut lbc_calls = 0u64;
    let mut bfs_runs = 0u64;
    for &e in order {
        let edge = g.edge(e);
        let inst = LbcInstance {
            graph: &h,
            u: edge.u,
            v: edge.v,
            t,
            alpha: p.f,
            mode: p.mode,
        };
        let verdict = lbc_gap_decide_with(&inst, &mut scratch)?;
        lbc_calls += 1;
        bfs_runs += verdict.iterations_used as u64;
        if verdict.answer == LbcAnswer::Yes {
            h.insert(edge.u, edge.v, e);
            kept.insert(e);
        }
    }
    Ok(SpannerResult {
        stats: SpannerStats {
            edges_kept: kept.len(),
            lbc_calls,
            bfs_runs,
            edge_order: order.to_vec(),
        },
        spanner_edge_ids: kept,
    })
}

/// Greedy scan for unit-weight graphs in a caller-chosen order.
pub fn modified_greedy_unweighted(
    g: &Graph,
    p: &SpannerParams,
    order: &[EdgeId],
) -> Result<SpannerResult, GreedyError> {
    for (e, edge) in g.edges().iter().enumerate() {
        if edge.w != 1 {
            return Err(GreedyError::NonUnitWeight {
                edge: e,
                weight: edge.w,
            });
        }
    }
    greedy_with_order(g, p, order)
}

/// Greedy scan for weighted graphs in nondecreasing weight order (ties by
/// id). Scanning light edges first is what lets the hop-based keep test
/// stand in for the weighted stretch condition.
pub fn modified_greedy_weighted(g: &Graph, p: &SpannerParams) -> Result<SpannerResult, GreedyError> {
    greedy_with_order(g, p, &weight_sorted_order(g))
}

/// Ground-truth greedy: keeps an edge exactly when some fault set of size at
/// most `f` forces the detour between its endpoints in the current partial
/// spanner above `(2k - 1) * w`. Unreachable counts as stretched.
pub fn exact_greedy(g: &Graph, p: &SpannerParams) -> Result<SpannerResult, GreedyError> {
    exact_greedy_guarded(g, p, ExactGuard::default())
}

pub fn exact_greedy_guarded(
    g: &Graph,
    p: &SpannerParams,
    guard: ExactGuard,
) -> Result<SpannerResult, GreedyError> {
    p.validate()?;
    if g.n() > guard.max_n || p.f > guard.max_f {
        return Err(GreedyError::GuardExceeded {
            n: g.n(),
            f: p.f,
            max_n: guard.max_n,
            max_f: guard.max_f,
        });
    }
    let t = p.stretch() as u128;
    let order = weight_sorted_order(g);
    let mut in_h = vec![false; g.m()];
    let mut kept = BTreeSet::new();
    let mut mask = BlockMask::new(g.n(), g.m());
    let mut searches = 0u64;
    for &e in &order {
        let edge = g.edge(e);
        let bound = t * edge.w as u128;
        let candidates: Vec<usize> = match p.mode {
            FaultMode::Vertex => (0..g.n()).filter(|&x| x != edge.u && x != edge.v).collect(),
            FaultMode::Edge => kept.iter().copied().collect(),
        };
        let mut stretched = false;
        'outer: for size in 0..=(p.f as usize).min(candidates.len()) {
            for combo in candidates.iter().combinations(size) {
                mask.clear();
                for (id, present) in in_h.iter().enumerate() {
                    if !present {
                        mask.block_edge(id);
                    }
                }
                for &&x in &combo {
                    match p.mode {
                        FaultMode::Vertex => mask.block_vertex(x),
                        FaultMode::Edge => mask.block_edge(x),
                    }
                }
                searches += 1;
                let d = dijkstra(g, &mask, edge.u, Some(edge.v))[edge.v];
                if d.map_or(true, |d| d > bound) {
                    stretched = true;
                    break 'outer;
                }
            }
        }
        if stretched {
            in_h[e] = true;
            kept.insert(e);
        }
    }
    Ok(SpannerResult {
        stats: SpannerStats {
            edges_kept: kept.len(),
            lbc_calls: 0,
            bfs_runs: searches,
            edge_order: order,
        },
        spanner_edge_ids: kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::FaultSet;

    fn params(k: u32, f: u32, mode: FaultMode) -> SpannerParams {
        SpannerParams::new(k, f, mode).unwrap()
    }

    fn kept(result: &SpannerResult) -> Vec<EdgeId> {
        result.spanner_edge_ids.iter().copied().collect()
    }

    #[test]
    fn exact_keeps_triangle_under_one_vertex_fault() {
        let g = Graph::unit(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = exact_greedy(&g, &params(1, 1, FaultMode::Vertex)).unwrap();
        assert_eq!(kept(&r), vec![0, 1, 2]);
    }

    #[test]
    fn exact_keeps_all_of_c4_under_one_fault() {
        let g = Graph::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        for mode in [FaultMode::Vertex, FaultMode::Edge] {
            let r = exact_greedy(&g, &params(2, 1, mode)).unwrap();
            assert_eq!(kept(&r).len(), 4, "mode {mode:?}");
        }
    }

    #[test]
    fn exact_guard_trips() {
        let g = Graph::unit(3, [(0, 1)]).unwrap();
        assert!(matches!(
            exact_greedy(&g, &params(2, 3, FaultMode::Vertex)),
            Err(GreedyError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn modified_scan_keeps_cycle_edges() {
        let g = Graph::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let r = modified_greedy_unweighted(&g, &params(2, 1, FaultMode::Vertex), &ascending_order(&g))
            .unwrap();
        assert_eq!(kept(&r).len(), 4);
        assert_eq!(r.stats.lbc_calls, 4);
        assert!(r.stats.bfs_runs <= 4 * 2);
    }

    #[test]
    fn edgeless_graph_yields_empty_spanner() {
        let g = Graph::unit(5, []).unwrap();
        let r = modified_greedy_unweighted(&g, &params(2, 1, FaultMode::Vertex), &[]).unwrap();
        assert!(r.spanner_edge_ids.is_empty());
        assert_eq!(r.stats.lbc_calls, 0);
    }

    #[test]
    fn star_survives_any_parameters() {
        let g = Graph::unit(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        for f in 0..3 {
            let r = modified_greedy_unweighted(
                &g,
                &params(3, f, FaultMode::Vertex),
                &ascending_order(&g),
            )
            .unwrap();
            assert_eq!(kept(&r).len(), 4);
        }
    }

    #[test]
    fn unweighted_front_end_rejects_weights() {
        let g = Graph::new(3, [(0, 1, 2)]).unwrap();
        assert!(matches!(
            modified_greedy_unweighted(&g, &params(2, 0, FaultMode::Vertex), &[0]),
            Err(GreedyError::NonUnitWeight { edge: 0, weight: 2 })
        ));
    }

    #[test]
    fn order_validation() {
        let g = Graph::unit(3, [(0, 1), (1, 2)]).unwrap();
        let p = params(2, 0, FaultMode::Vertex);
        assert!(matches!(
            greedy_with_order(&g, &p, &[0]),
            Err(GreedyError::BadOrder { .. })
        ));
        assert!(matches!(
            greedy_with_order(&g, &p, &[0, 0]),
            Err(GreedyError::BadOrder { .. })
        ));
        assert!(matches!(
            greedy_with_order(&g, &p, &[0, 2]),
            Err(GreedyError::BadOrder { .. })
        ));
    }

    /// Triangle with unit legs and one weight-3 edge: with f = 0 the weighted
    /// scan keeps only the two light edges, while one vertex of resilience
    /// forces all three to stay.
    #[test]
    fn weighted_triangle_examples() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)]).unwrap();
        let r = modified_greedy_weighted(&g, &params(2, 0, FaultMode::Vertex)).unwrap();
        assert_eq!(kept(&r), vec![0, 1]);
        // The dropped edge is covered: d_H(0, 2) = 2 <= 3 * 3.
        let d = crate::graph::distance(
            &g.edge_subgraph(&r.spanner_edge_ids).unwrap(),
            0,
            2,
            &FaultSet::empty(FaultMode::Vertex),
        )
        .unwrap();
        assert_eq!(d, Some(2));

        let r = modified_greedy_weighted(&g, &params(2, 1, FaultMode::Vertex)).unwrap();
        assert_eq!(kept(&r), vec![0, 1, 2]);
        let r = exact_greedy(&g, &params(2, 1, FaultMode::Vertex)).unwrap();
        assert_eq!(kept(&r), vec![0, 1, 2]);
    }

    #[test]
    fn weighted_order_is_nondecreasing() {
        let g = Graph::new(4, [(0, 1, 5), (1, 2, 1), (2, 3, 5), (3, 0, 2)]).unwrap();
        let r = modified_greedy_weighted(&g, &params(2, 0, FaultMode::Vertex)).unwrap();
        let ws: Vec<u64> = r.stats.edge_order.iter().map(|&e| g.edge(e).w).collect();
        assert!(ws.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trees_are_kept_whole() {
        let g = Graph::new(5, [(0, 1, 4), (1, 2, 1), (1, 3, 9), (3, 4, 2)]).unwrap();
        let r = modified_greedy_weighted(&g, &params(3, 2, FaultMode::Edge)).unwrap();
        assert_eq!(kept(&r).len(), 4);
        let r = exact_greedy(&g, &params(3, 2, FaultMode::Edge)).unwrap();
        assert_eq!(kept(&r).len(), 4);
    }
}
