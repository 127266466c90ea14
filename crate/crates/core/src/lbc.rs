//! Length-bounded cut gap decisions.
//!
//! A length-`t` cut for a pair `u, v` is a set of vertices (excluding the
//! endpoints) or edges whose removal leaves no `u`-`v` path of at most `t`
//! hops. [`lbc_gap_decide`] answers a relaxed membership question without
//! searching for an optimal cut: it must say YES when some cut of size at
//! most `alpha` exists and NO when every cut needs more than `alpha * t`
//! elements; between those thresholds either answer is allowed. It runs at
//! most `alpha + 1` hop-bounded searches: each search that finds a path
//! deletes that path's interior (or edges) and retries, so `alpha + 1`
//! disjoint-ish failures certify that small cuts cannot exist.
//!
//! [`lbc_exact`] finds a true minimum cut by subset enumeration and exists to
//! cross-check the gap contract on small instances.

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    bfs_hop_path, BlockMask, EdgeId, FaultMode, FaultSet, Graph, Topology, TraversalBuffers,
    VertexId,
};

/// Largest candidate set (non-terminal vertices or edges) the exact
/// enumeration accepts.
pub const EXACT_CANDIDATE_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LbcError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("terminals must be distinct, got {0} twice")]
    EqualTerminals(VertexId),
    #[error("hop bound must be at least 1")]
    ZeroHopBound,
    #[error("{candidates} cut candidates exceed the exact enumeration limit {limit}")]
    TooManyCandidates { candidates: usize, limit: usize },
}

/// One gap decision problem: does `graph` have a small length-`t` cut
/// separating `u` from `v`?
#[derive(Debug, Clone, Copy)]
pub struct LbcInstance<'a, T: Topology + ?Sized> {
    pub graph: &'a T,
    pub u: VertexId,
    pub v: VertexId,
    pub t: u32,
    pub alpha: u32,
    pub mode: FaultMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LbcAnswer {
    Yes,
    No,
}

/// Outcome of a gap decision. YES answers carry a witness cut of at most
/// `alpha * t` members that kills every `u`-`v` path of at most `t` hops;
/// NO answers carry no witness. `iterations_used` counts hop-bounded
/// searches and never exceeds `alpha + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LbcVerdict {
    pub answer: LbcAnswer,
    pub witness_cut: Option<FaultSet>,
    pub iterations_used: u32,
}

/// Reusable search state for gap decisions in a hot loop.
#[derive(Debug, Clone)]
pub(crate) struct LbcScratch {
    mask: BlockMask,
    bufs: TraversalBuffers,
}

impl LbcScratch {
    pub(crate) fn new(n: usize, edge_bound: usize) -> LbcScratch {
        LbcScratch {
            mask: BlockMask::new(n, edge_bound),
            bufs: TraversalBuffers::new(n),
        }
    }
}

fn validate_instance<T: Topology + ?Sized>(inst: &LbcInstance<'_, T>) -> Result<(), LbcError> {
    let n = inst.graph.vertex_count();
    for x in [inst.u, inst.v] {
        if x >= n {
            return Err(LbcError::VertexOutOfRange { vertex: x, n });
        }
    }
    if inst.u == inst.v {
        return Err(LbcError::EqualTerminals(inst.u));
    }
    if inst.t == 0 {
        return Err(LbcError::ZeroHopBound);
    }
    Ok(())
}

pub fn lbc_gap_decide<T: Topology + ?Sized>(
    inst: &LbcInstance<'_, T>,
) -> Result<LbcVerdict, LbcError> {
    let mut scratch = LbcScratch::new(inst.graph.vertex_count(), inst.graph.edge_bound());
    lbc_gap_decide_with(inst, &mut scratch)
}

pub(crate) fn lbc_gap_decide_with<T: Topology + ?Sized>(
    inst: &LbcInstance<'_, T>,
    scratch: &mut LbcScratch,
) -> Result<LbcVerdict, LbcError> {
    validate_instance(inst)?;
    scratch.mask.clear();
    let mut cut = FaultSet::empty(inst.mode);
    for iteration in 1..=inst.alpha + 1 {
        match bfs_hop_path(
            inst.graph,
            &mut scratch.bufs,
            &scratch.mask,
            inst.u,
            inst.v,
            inst.t,
        ) {
            None => {
                return Ok(LbcVerdict {
                    answer: LbcAnswer::Yes,
                    witness_cut: Some(cut),
                    iterations_used: iteration,
                });
            }
            Some((vertices, edges)) => match inst.mode {
                FaultMode::Vertex => {
                    for &x in &vertices[1..vertices.len() - 1] {
                        scratch.mask.block_vertex(x);
                        cut.insert(x);
                    }
                }
                FaultMode::Edge => {
                    for &e in &edges {
                        scratch.mask.block_edge(e);
                        cut.insert(e);
                    }
                }
            },
        }
    }
    Ok(LbcVerdict {
        answer: LbcAnswer::No,
        witness_cut: None,
        iterations_used: inst.alpha + 1,
    })
}

/// Result of exact minimum-cut search. `Uncuttable` means no cut of any size
/// works, which happens exactly when the edge `{u, v}` itself is present and
/// cuts are restricted to vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactCut {
    Cut { size: usize, witness: FaultSet },
    Uncuttable,
}

impl ExactCut {
    /// Minimum cut size, `None` standing for infinity.
    pub fn size(&self) -> Option<usize> {
        match self {
            ExactCut::Cut { size, .. } => Some(*size),
            ExactCut::Uncuttable => None,
        }
    }
}

/// Minimum length-`t` cut by exhaustive enumeration, smallest size first and
/// lexicographically first within a size. Guarded to small candidate sets.
pub fn lbc_exact(
    g: &Graph,
    u: VertexId,
    v: VertexId,
    t: u32,
    mode: FaultMode,
) -> Result<ExactCut, LbcError> {
    let inst = LbcInstance {
        graph: g,
        u,
        v,
        t,
        alpha: 0,
        mode,
    };
    validate_instance(&inst)?;
    let candidates: Vec<usize> = match mode {
        FaultMode::Vertex => (0..g.n()).filter(|&x| x != u && x != v).collect(),
        FaultMode::Edge => (0..g.m()).collect(),
    };
    if candidates.len() > EXACT_CANDIDATE_LIMIT {
        return Err(LbcError::TooManyCandidates {
            candidates: candidates.len(),
            limit: EXACT_CANDIDATE_LIMIT,
        });
    }
    let mut mask = BlockMask::new(g.n(), g.m());
    let mut bufs = TraversalBuffers::new(g.n());
    let mut survives = |blocked: &[&usize]| {
        mask.clear();
        for &&id in blocked {
            match mode {
                FaultMode::Vertex => mask.block_vertex(id),
                FaultMode::Edge => mask.block_edge(id),
            }
        }
        bfs_hop_path(g, &mut bufs, &mask, u, v, t).is_some()
    };
    let all: Vec<&usize> = candidates.iter().collect();
    if survives(&all) {
        return Ok(ExactCut::Uncuttable);
    }
    for size in 0..=candidates.len() {
        for combo in candidates.iter().combinations(size) {
            if !survives(&combo) {
                let members = combo.into_iter().copied();
                let witness = match mode {
                    FaultMode::Vertex => FaultSet::vertices(members),
                    FaultMode::Edge => FaultSet::edges(members),
                };
                return Ok(ExactCut::Cut { size, witness });
            }
        }
    }
    unreachable!("the full candidate set was verified to be a cut")
}

/// True when `cut` destroys every `u`-`v` path of at most `t` hops.
pub fn cut_kills_all_short_paths(
    g: &Graph,
    u: VertexId,
    v: VertexId,
    t: u32,
    cut: &FaultSet,
) -> bool {
    let mut mask = BlockMask::new(g.n(), g.m());
    mask.block_faults(cut);
    let mut bufs = TraversalBuffers::new(g.n());
    bfs_hop_path(g, &mut bufs, &mask, u, v, t).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decide(g: &Graph, u: usize, v: usize, t: u32, alpha: u32, mode: FaultMode) -> LbcVerdict {
        lbc_gap_decide(&LbcInstance {
            graph: g,
            u,
            v,
            t,
            alpha,
            mode,
        })
        .unwrap()
    }

    /// Two terminals joined by `paths` vertex-disjoint 2-hop paths.
    fn theta(paths: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..paths {
            edges.push((0, 2 + i));
            edges.push((2 + i, 1));
        }
        Graph::unit(2 + paths, edges).unwrap()
    }

    #[test]
    fn single_midpoint_is_a_yes_with_witness() {
        let g = Graph::unit(3, [(0, 2), (2, 1)]).unwrap();
        let verdict = decide(&g, 0, 1, 2, 1, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::Yes);
        assert_eq!(verdict.witness_cut.unwrap(), FaultSet::vertices([2]));
        assert_eq!(verdict.iterations_used, 2);
    }

    #[test]
    fn direct_edge_forces_no_in_vertex_mode() {
        let g = Graph::unit(2, [(0, 1)]).unwrap();
        let verdict = decide(&g, 0, 1, 3, 5, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::No);
        assert_eq!(verdict.witness_cut, None);
        assert_eq!(verdict.iterations_used, 6);
        assert_eq!(
            lbc_exact(&g, 0, 1, 3, FaultMode::Vertex).unwrap(),
            ExactCut::Uncuttable
        );
    }

    #[test]
    fn theta_graph_sits_above_the_gap() {
        // Min vertex cut is 3 (one midpoint per path), alpha*t = 2, so the
        // decision must be NO.
        let g = theta(3);
        assert_eq!(
            lbc_exact(&g, 0, 1, 2, FaultMode::Vertex).unwrap().size(),
            Some(3)
        );
        let verdict = decide(&g, 0, 1, 2, 1, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::No);
    }

    #[test]
    fn alpha_zero_is_a_single_reachability_probe() {
        let g = theta(2);
        let verdict = decide(&g, 0, 1, 2, 0, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::No);
        assert_eq!(verdict.iterations_used, 1);
        let verdict = decide(&g, 0, 1, 1, 0, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::Yes);
        assert!(verdict.witness_cut.unwrap().is_empty());
    }

    #[test]
    fn edge_mode_blocks_path_edges() {
        let g = Graph::unit(3, [(0, 2), (2, 1)]).unwrap();
        let verdict = decide(&g, 0, 1, 2, 1, FaultMode::Edge);
        assert_eq!(verdict.answer, LbcAnswer::Yes);
        // The first search walks 0-2-1 and both its edges are consumed.
        assert_eq!(verdict.witness_cut.unwrap(), FaultSet::edges([0, 1]));
    }

    #[test]
    fn exact_cut_on_single_edge_in_edge_mode() {
        let g = Graph::unit(2, [(0, 1)]).unwrap();
        let got = lbc_exact(&g, 0, 1, 1, FaultMode::Edge).unwrap();
        assert_eq!(
            got,
            ExactCut::Cut {
                size: 1,
                witness: FaultSet::edges([0])
            }
        );
    }

    #[test]
    fn exact_finds_empty_cut_when_already_separated() {
        let g = Graph::unit(4, [(0, 1), (2, 3)]).unwrap();
        let got = lbc_exact(&g, 0, 3, 3, FaultMode::Vertex).unwrap();
        assert_eq!(got.size(), Some(0));
    }

    #[test]
    fn validation_errors() {
        let g = theta(2);
        let bad = LbcInstance {
            graph: &g,
            u: 0,
            v: 0,
            t: 2,
            alpha: 1,
            mode: FaultMode::Vertex,
        };
        assert_eq!(lbc_gap_decide(&bad).unwrap_err(), LbcError::EqualTerminals(0));
        let bad = LbcInstance {
            graph: &g,
            u: 0,
            v: 1,
            t: 0,
            alpha: 1,
            mode: FaultMode::Vertex,
        };
        assert_eq!(lbc_gap_decide(&bad).unwrap_err(), LbcError::ZeroHopBound);
    }

    #[test]
    fn enumeration_guard_trips() {
        let g = theta(30);
        assert!(matches!(
            lbc_exact(&g, 0, 1, 2, FaultMode::Vertex),
            Err(LbcError::TooManyCandidates { .. })
        ));
    }

    #[test]
    fn yes_witnesses_stay_within_alpha_t_and_kill_paths() {
        let g = theta(2);
        let verdict = decide(&g, 0, 1, 2, 2, FaultMode::Vertex);
        assert_eq!(verdict.answer, LbcAnswer::Yes);
        let cut = verdict.witness_cut.unwrap();
        assert!(cut.len() <= 2 * 2);
        assert!(cut_kills_all_short_paths(&g, 0, 1, 2, &cut));
    }
}
