//! Simple undirected weighted graphs with stable edge ids, fault sets, and
//! the traversal primitives (hop-bounded BFS, masked Dijkstra) the rest of
//! the crate is built on.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type Weight = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge id {id} out of range for a graph with {m} edges")]
    EdgeOutOfRange { id: usize, m: usize },
    #[error("terminal vertex {vertex} is in the fault set")]
    FaultedTerminal { vertex: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    /// The endpoint opposite to `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

/// An undirected graph with `n` vertices, no self-loops, no parallel edges,
/// and nonnegative integer weights. Edge ids are assigned in construction
/// order, `0..m`, and never change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// `adj[v]` holds `(neighbor, edge id)` sorted by neighbor id, so every
    /// traversal scans neighbors in ascending vertex order.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Weight)>,
    ) -> Result<Graph, GraphError> {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        };
        let mut seen = BTreeSet::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u: key.0, v: key.1 });
            }
            let id = g.edges.len();
            g.edges.push(Edge { u, v, w });
            g.adj[u].push((v, id));
            g.adj[v].push((u, id));
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    /// Builds a unit-weight graph from vertex pairs.
    pub fn unit(
        n: usize,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Graph, GraphError> {
        Graph::new(n, pairs.into_iter().map(|(u, v)| (u, v, 1)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, edge id)` pairs of `v`, in ascending neighbor order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adj[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1)
    }

    pub fn total_weight(&self) -> u128 {
        self.edges.iter().map(|e| e.w as u128).sum()
    }

    /// A standalone graph on the same vertex set containing exactly the given
    /// edges, re-identified in ascending order of their ids here. Used when a
    /// subgraph leaves the library (serialization, CLI output).
    pub fn edge_subgraph(&self, ids: &BTreeSet<EdgeId>) -> Result<Graph, GraphError> {
        let mut picked = Vec::with_capacity(ids.len());
        for &id in ids {
            if id >= self.edges.len() {
                return Err(GraphError::EdgeOutOfRange {
                    id,
                    m: self.edges.len(),
                });
            }
            let e = &self.edges[id];
            picked.push((e.u, e.v, e.w));
        }
        Graph::new(self.n, picked)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Read-only adjacency access shared by [`Graph`] and the incremental
/// partial-spanner structure the greedy loop maintains. Edge ids always refer
/// to ids of the underlying input graph, which keeps fault masks meaningful
/// across both.
pub trait Topology {
    fn vertex_count(&self) -> usize;
    /// Exclusive upper bound on edge ids appearing in adjacency lists.
    fn edge_bound(&self) -> usize;
    /// `(neighbor, edge id)` pairs sorted by ascending neighbor id.
    fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)];
}

impl Topology for Graph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn edge_bound(&self) -> usize {
        self.edges.len()
    }

    fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultMode {
    Vertex,
    Edge,
}

impl FaultMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            FaultMode::Vertex => "vertex",
            FaultMode::Edge => "edge",
        }
    }
}

/// A set of failed vertices or failed edges, interpreted per `mode`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSet {
    mode: FaultMode,
    members: BTreeSet<usize>,
}

impl FaultSet {
    pub fn empty(mode: FaultMode) -> FaultSet {
        FaultSet {
            mode,
            members: BTreeSet::new(),
        }
    }

    pub fn vertices(ids: impl IntoIterator<Item = VertexId>) -> FaultSet {
        FaultSet {
            mode: FaultMode::Vertex,
            members: ids.into_iter().collect(),
        }
    }

    pub fn edges(ids: impl IntoIterator<Item = EdgeId>) -> FaultSet {
        FaultSet {
            mode: FaultMode::Edge,
            members: ids.into_iter().collect(),
        }
    }

    pub fn mode(&self) -> FaultMode {
        self.mode
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(&id)
    }

    pub fn insert(&mut self, id: usize) -> bool {
        self.members.insert(id)
    }

    /// Checks that every member id is in range for `g`.
    pub fn validate_for(&self, g: &Graph) -> Result<(), GraphError> {
        let bound = match self.mode {
            FaultMode::Vertex => g.n(),
            FaultMode::Edge => g.m(),
        };
        for &id in &self.members {
            if id >= bound {
                return match self.mode {
                    FaultMode::Vertex => Err(GraphError::VertexOutOfRange { vertex: id, n: bound }),
                    FaultMode::Edge => Err(GraphError::EdgeOutOfRange { id, m: bound }),
                };
            }
        }
        Ok(())
    }
}

/// A simple path. `vertices` has one more entry than `edges`; `weight` is the
/// sum of edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub weight: u128,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    /// Vertices strictly between the endpoints.
    pub fn interior(&self) -> &[VertexId] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }
}

/// Blocked-vertex/blocked-edge view used to delete faults without copying the
/// graph. Clearing is O(1) via an epoch counter.
#[derive(Debug, Clone)]
pub(crate) struct BlockMask {
    v_mark: Vec<u64>,
    e_mark: Vec<u64>,
    epoch: u64,
}

impl BlockMask {
    pub(crate) fn new(n: usize, m: usize) -> BlockMask {
        BlockMask {
            v_mark: vec![0; n],
            e_mark: vec![0; m],
            epoch: 1,
        }
    }

    pub(crate) fn clear(&mut self) {
        self.epoch += 1;
    }

    pub(crate) fn block_vertex(&mut self, v: VertexId) {
        self.v_mark[v] = self.epoch;
    }

    pub(crate) fn block_edge(&mut self, e: EdgeId) {
        self.e_mark[e] = self.epoch;
    }

    pub(crate) fn vertex_blocked(&self, v: VertexId) -> bool {
        self.v_mark[v] == self.epoch
    }

    pub(crate) fn edge_blocked(&self, e: EdgeId) -> bool {
        self.e_mark[e] == self.epoch
    }

    pub(crate) fn block_faults(&mut self, faults: &FaultSet) {
        match faults.mode() {
            FaultMode::Vertex => faults.members().iter().for_each(|&v| self.block_vertex(v)),
            FaultMode::Edge => faults.members().iter().for_each(|&e| self.block_edge(e)),
        }
    }
}

/// Reusable BFS state, also epoch-cleared so repeated searches in a hot loop
/// do not re-zero arrays.
#[derive(Debug, Clone)]
pub(crate) struct TraversalBuffers {
    seen: Vec<u64>,
    dist: Vec<u32>,
    parent_v: Vec<u32>,
    parent_e: Vec<u32>,
    queue: VecDeque<u32>,
    epoch: u64,
}

impl TraversalBuffers {
    pub(crate) fn new(n: usize) -> TraversalBuffers {
        TraversalBuffers {
            seen: vec![0; n],
            dist: vec![0; n],
            parent_v: vec![0; n],
            parent_e: vec![0; n],
            queue: VecDeque::new(),
            epoch: 1,
        }
    }
}

/// Shortest-hop search from `u` to `v` restricted to `t` hops, skipping
/// blocked vertices and edges. Neighbors are scanned in ascending vertex
/// order from a FIFO queue, which makes the returned path the
/// lexicographically first among all shortest-hop paths.
pub(crate) fn bfs_hop_path<T: Topology + ?Sized>(
    topo: &T,
    bufs: &mut TraversalBuffers,
    mask: &BlockMask,
    u: VertexId,
    v: VertexId,
    t: u32,
) -> Option<(Vec<VertexId>, Vec<EdgeId>)> {
    if mask.vertex_blocked(u) || mask.vertex_blocked(v) {
        return None;
    }
    if u == v {
        return Some((vec![u], Vec::new()));
    }
    bufs.epoch += 1;
    let epoch = bufs.epoch;
    bufs.queue.clear();
    bufs.seen[u] = epoch;
    bufs.dist[u] = 0;
    bufs.queue.push_back(u as u32);
    let mut found = false;
    'search: while let Some(x) = bufs.queue.pop_front() {
        let x = x as usize;
        let d = bufs.dist[x];
        if d >= t {
            break;
        }
        for &(y, e) in topo.neighbors(x) {
            if bufs.seen[y] == epoch || mask.edge_blocked(e) || mask.vertex_blocked(y) {
                continue;
            }
            bufs.seen[y] = epoch;
            bufs.dist[y] = d + 1;
            bufs.parent_v[y] = x as u32;
            bufs.parent_e[y] = e as u32;
            if y == v {
                found = true;
                break 'search;
            }
            bufs.queue.push_back(y as u32);
        }
    }
    if !found {
        return None;
    }
    let hops = bufs.dist[v] as usize;
    let mut vertices = vec![0; hops + 1];
    let mut edges = vec![0; hops];
    let mut cur = v;
    for i in (0..hops).rev() {
        vertices[i + 1] = cur;
        edges[i] = bufs.parent_e[cur] as usize;
        cur = bufs.parent_v[cur] as usize;
    }
    vertices[0] = cur;
    debug_assert_eq!(cur, u);
    Some((vertices, edges))
}

/// Dijkstra from `src` under the mask. Returns per-vertex distances, `None`
/// meaning unreachable. Stops early once `target` is settled.
pub(crate) fn dijkstra(
    g: &Graph,
    mask: &BlockMask,
    src: VertexId,
    target: Option<VertexId>,
) -> Vec<Option<u128>> {
    let mut dist: Vec<Option<u128>> = vec![None; g.n()];
    if mask.vertex_blocked(src) {
        return dist;
    }
    let mut heap: BinaryHeap<std::cmp::Reverse<(u128, u32)>> = BinaryHeap::new();
    dist[src] = Some(0);
    heap.push(std::cmp::Reverse((0, src as u32)));
    while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
        let x = x as usize;
        if dist[x] != Some(d) {
            continue;
        }
        if target == Some(x) {
            break;
        }
        for &(y, e) in g.neighbors(x) {
            if mask.edge_blocked(e) || mask.vertex_blocked(y) {
                continue;
            }
            let nd = d + g.edge(e).w as u128;
            if dist[y].map_or(true, |old| nd < old) {
                dist[y] = Some(nd);
                heap.push(std::cmp::Reverse((nd, y as u32)));
            }
        }
    }
    dist
}

fn check_terminals(g: &Graph, faults: &FaultSet, terminals: &[VertexId]) -> Result<(), GraphError> {
    for &x in terminals {
        g.check_vertex(x)?;
    }
    faults.validate_for(g)?;
    if faults.mode() == FaultMode::Vertex {
        for &x in terminals {
            if faults.contains(x) {
                return Err(GraphError::FaultedTerminal { vertex: x });
            }
        }
    }
    Ok(())
}

/// A `u`-`v` path with at most `t` hops in `g` with `faults` deleted, if one
/// exists. Hops ignore weights; the result is the lexicographically first
/// shortest-hop path, with edge weights summed into `Path::weight`.
pub fn hop_bounded_path(
    g: &Graph,
    u: VertexId,
    v: VertexId,
    t: u32,
    faults: &FaultSet,
) -> Result<Option<Path>, GraphError> {
    check_terminals(g, faults, &[u, v])?;
    let mut mask = BlockMask::new(g.n(), g.m());
    mask.block_faults(faults);
    let mut bufs = TraversalBuffers::new(g.n());
    Ok(bfs_hop_path(g, &mut bufs, &mask, u, v, t).map(|(vertices, edges)| {
        let weight = edges.iter().map(|&e| g.edge(e).w as u128).sum();
        Path {
            vertices,
            edges,
            weight,
        }
    }))
}

/// Weighted shortest-path distance between `u` and `v` with `faults`
/// deleted; `None` means no surviving path.
pub fn distance(
    g: &Graph,
    u: VertexId,
    v: VertexId,
    faults: &FaultSet,
) -> Result<Option<u128>, GraphError> {
    check_terminals(g, faults, &[u, v])?;
    if u == v {
        return Ok(Some(0));
    }
    let mut mask = BlockMask::new(g.n(), g.m());
    mask.block_faults(faults);
    Ok(dijkstra(g, &mask, u, Some(v))[v])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Graph {
        Graph::unit(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::unit(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert_eq!(
            Graph::unit(3, [(0, 0)]).unwrap_err(),
            GraphError::SelfLoop { vertex: 0 }
        );
        assert_eq!(
            Graph::unit(3, [(0, 1), (1, 0)]).unwrap_err(),
            GraphError::DuplicateEdge { u: 0, v: 1 }
        );
        assert_eq!(
            Graph::unit(3, [(0, 3)]).unwrap_err(),
            GraphError::VertexOutOfRange { vertex: 3, n: 3 }
        );
    }

    #[test]
    fn edge_ids_follow_construction_order() {
        let g = path4();
        assert_eq!(g.m(), 3);
        assert_eq!(g.edge(1).u, 1);
        assert_eq!(g.edge(1).v, 2);
        assert_eq!(g.find_edge(2, 1), Some(1));
        assert_eq!(g.find_edge(0, 3), None);
    }

    #[test]
    fn hop_path_on_a_path_graph() {
        let g = path4();
        let none = FaultSet::empty(FaultMode::Vertex);
        let p = hop_bounded_path(&g, 0, 3, 3, &none).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2, 3]);
        assert_eq!(p.hops(), 3);
        assert_eq!(hop_bounded_path(&g, 0, 3, 2, &none).unwrap(), None);
    }

    #[test]
    fn hop_path_respects_vertex_faults() {
        let g = triangle();
        let f = FaultSet::vertices([1]);
        let p = hop_bounded_path(&g, 0, 2, 2, &f).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 2]);
        assert_eq!(p.hops(), 1);
    }

    #[test]
    fn hop_path_respects_edge_faults() {
        let g = triangle();
        let f = FaultSet::edges([g.find_edge(0, 2).unwrap()]);
        let p = hop_bounded_path(&g, 0, 2, 2, &f).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(hop_bounded_path(&g, 0, 2, 1, &f).unwrap(), None);
    }

    #[test]
    fn hop_path_is_lexicographically_first() {
        // Two shortest 0-3 paths: 0-1-3 and 0-2-3. The first must win.
        let g = Graph::unit(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let none = FaultSet::empty(FaultMode::Vertex);
        let p = hop_bounded_path(&g, 0, 3, 3, &none).unwrap().unwrap();
        assert_eq!(p.vertices, vec![0, 1, 3]);
    }

    #[test]
    fn distance_examples() {
        let g = Graph::new(3, [(0, 1, 2), (1, 2, 3)]).unwrap();
        let none = FaultSet::empty(FaultMode::Vertex);
        assert_eq!(distance(&g, 0, 2, &none).unwrap(), Some(5));
        assert_eq!(distance(&g, 1, 1, &none).unwrap(), Some(0));
        let f = FaultSet::vertices([1]);
        assert_eq!(distance(&g, 0, 2, &f).unwrap(), None);
    }

    #[test]
    fn faulted_terminal_is_an_error() {
        let g = triangle();
        let f = FaultSet::vertices([0]);
        assert_eq!(
            distance(&g, 0, 2, &f).unwrap_err(),
            GraphError::FaultedTerminal { vertex: 0 }
        );
    }

    #[test]
    fn edge_subgraph_reindexes_edges() {
        let g = triangle();
        let sub = g.edge_subgraph(&BTreeSet::from([0, 2])).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.m(), 2);
        assert_eq!(sub.edge(0).v, 1);
        assert_eq!(sub.edge(1).v, 2);
        assert!(g.edge_subgraph(&BTreeSet::from([9])).is_err());
    }
}
