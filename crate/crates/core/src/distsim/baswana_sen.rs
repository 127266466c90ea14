//! The randomized k-phase clustering spanner in the CONGEST model.
//!
//! Vertices start as singleton clusters. In each of `k - 1` phases, every
//! cluster survives independently with probability `p_sample`; a vertex of
//! a non-surviving cluster re-homes to a surviving neighbor cluster through
//! its lightest connecting edge (which joins the spanner), or, with no
//! sampled neighbor, adds its lightest edge toward every adjacent cluster
//! and leaves the clustering for good. A final phase connects every
//! still-clustered vertex to each adjacent cluster. Edge comparisons use
//! the strict `(weight, edge id)` order, so runs are deterministic given
//! the sampling outcomes.
//!
//! The protocol is expressed as a fixed schedule of logical steps (known
//! from `k` alone), each sending at most one message per edge direction:
//! that makes the same state machine reusable both standalone — one step
//! per round — and time-multiplexed across many tagged instances sharing
//! the word budget.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgeId, Graph, VertexId, Weight};
use crate::greedy::{GreedyError, SpannerResult, SpannerStats};
use crate::seeding::{mix_seed, stream};

use super::engine::Network;
use super::{log2_ceil, SimConfig, SimError, SimModel, SimTrace, SALT_BS_SAMPLE};

/// One logical protocol step. The full schedule for stretch parameter `k`
/// is produced by [`bs_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BsStep {
    /// Propagate the phase's sampling bit one hop further through each
    /// cluster (`round` counts from 0; phase `i` needs `i - 1` of these).
    Flood { phase: u32, round: u32 },
    /// Every vertex tells its neighbors its cluster, tree depth, and the
    /// cluster's sampling bit.
    Exchange { phase: u32 },
    /// Vertices of unsampled clusters join through their lightest sampled
    /// link or add one edge per adjacent cluster and drop out.
    Decide { phase: u32 },
    FinalExchange,
    FinalAdd,
}

impl BsStep {
    pub(crate) fn label(&self, prefix: &str) -> String {
        let kind = match self {
            BsStep::Flood { .. } => "flood",
            BsStep::Exchange { .. } => "exchange",
            BsStep::Decide { .. } => "decide",
            BsStep::FinalExchange => "final-exchange",
            BsStep::FinalAdd => "final-add",
        };
        format!("{prefix}-{kind}")
    }
}

pub(crate) fn bs_schedule(k: u32) -> Vec<BsStep> {
    let mut steps = Vec::new();
    for phase in 1..k {
        for round in 0..phase - 1 {
            steps.push(BsStep::Flood { phase, round });
        }
        steps.push(BsStep::Exchange { phase });
        steps.push(BsStep::Decide { phase });
    }
    steps.push(BsStep::FinalExchange);
    steps.push(BsStep::FinalAdd);
    steps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NeighborState {
    center: VertexId,
    dist: u32,
    sampled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum BsMsg {
    Flood { center: VertexId, sampled: bool },
    State { cluster: Option<NeighborState> },
    Join,
    Connect,
    Add,
}

/// Wire size of a message: a 3-bit variant tag plus the payload fields.
pub(crate) fn bs_msg_bits(msg: &BsMsg, vid_bits: u32, dist_bits: u32) -> u32 {
    3 + match msg {
        BsMsg::Flood { .. } => vid_bits + 1,
        BsMsg::State { cluster: Some(_) } => 1 + vid_bits + dist_bits + 1,
        BsMsg::State { cluster: None } => 1,
        BsMsg::Join | BsMsg::Connect | BsMsg::Add => 0,
    }
}

/// Largest message the protocol can emit on an `n`-vertex graph.
pub(crate) fn bs_max_message_bits(n: usize, k: u32) -> u32 {
    log2_ceil(n) + dist_bits_for(k) + 5
}

/// Tree depths stay below `k`, so this many bits carry them.
pub(crate) fn dist_bits_for(k: u32) -> u32 {
    log2_ceil(k as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VertexState {
    center: VertexId,
    dist: u32,
}

/// One run of the protocol over a participant subset of `g`. All fields
/// describe what the participants collectively know; `emit` reads the
/// pre-step snapshot and `absorb` applies the step's effects, so within a
/// step every vertex acts on the same consistent state.
#[derive(Debug, Clone)]
pub(crate) struct BsInstance {
    k: u32,
    p_sample: f64,
    salt: u64,
    participant: Vec<bool>,
    cluster: Vec<Option<VertexState>>,
    /// The current phase's sampling bit for each vertex's cluster, once
    /// flooding has delivered it.
    sampled_bit: Vec<Option<bool>>,
    flood_sent: Vec<bool>,
    drawn_phase: u32,
    /// Latest exchanged state of each edge's endpoints:
    /// `view[e][0]` describes `e.u`, `view[e][1]` describes `e.v`.
    view: Vec<[Option<NeighborState>; 2]>,
    /// Permanently deactivated edges: resolved, or internal to a cluster.
    discarded: Vec<bool>,
    kept: BTreeSet<EdgeId>,
    pending_cluster: Vec<(VertexId, Option<VertexState>)>,
    pending_kept: Vec<EdgeId>,
}

impl BsInstance {
    pub(crate) fn new(
        g: &Graph,
        k: u32,
        participant: Vec<bool>,
        p_sample: f64,
        salt: u64,
    ) -> BsInstance {
        debug_assert_eq!(participant.len(), g.n());
        let cluster = participant
            .iter()
            .enumerate()
            .map(|(v, &active)| active.then_some(VertexState { center: v, dist: 0 }))
            .collect();
        BsInstance {
            k,
            p_sample,
            salt,
            participant,
            cluster,
            sampled_bit: vec![None; g.n()],
            flood_sent: vec![false; g.n()],
            drawn_phase: 0,
            view: vec![[None, None]; g.m()],
            discarded: vec![false; g.m()],
            kept: BTreeSet::new(),
            pending_cluster: Vec::new(),
            pending_kept: Vec::new(),
        }
    }

    pub(crate) fn into_kept(self) -> BTreeSet<EdgeId> {
        self.kept
    }

    /// An edge can still carry protocol decisions: both endpoints carry
    /// clusters with different centers and nothing has resolved it yet.
    fn edge_active(&self, g: &Graph, e: EdgeId) -> bool {
        if self.discarded[e] {
            return false;
        }
        let edge = g.edge(e);
        match (&self.cluster[edge.u], &self.cluster[edge.v]) {
            (Some(a), Some(b)) => a.center != b.center,
            _ => false,
        }
    }

    fn neighbor_state(&self, g: &Graph, e: EdgeId, me: VertexId) -> Option<NeighborState> {
        let side = usize::from(g.edge(e).u == me);
        self.view[e][side]
    }

    /// Centers draw this phase's sampling bit; everyone else forgets the
    /// previous one and waits for the flood.
    fn ensure_drawn(&mut self, phase: u32) {
        if self.drawn_phase >= phase {
            return;
        }
        self.drawn_phase = phase;
        for v in 0..self.cluster.len() {
            self.sampled_bit[v] = None;
            self.flood_sent[v] = false;
            if let Some(state) = self.cluster[v] {
                if state.center == v {
                    let mut rng = stream(mix_seed(self.salt, phase as u64), v as u64);
                    self.sampled_bit[v] = Some(rng.random_bool(self.p_sample));
                }
            }
        }
    }

    /// Stages this step's messages as `(from, via, msg)` triples, at most
    /// one per edge direction, in ascending `(from, via)` order.
    pub(crate) fn emit(&mut self, g: &Graph, step: &BsStep, out: &mut Vec<(VertexId, EdgeId, BsMsg)>) {
        match *step {
            BsStep::Flood { phase, round } => {
                if round == 0 {
                    self.ensure_drawn(phase);
                }
                for v in 0..g.n() {
                    let (Some(state), Some(bit)) = (self.cluster[v], self.sampled_bit[v]) else {
                        continue;
                    };
                    if self.flood_sent[v] {
                        continue;
                    }
                    self.flood_sent[v] = true;
                    for &(u, e) in g.neighbors(v) {
                        if self.participant[u] {
                            out.push((
                                v,
                                e,
                                BsMsg::Flood {
                                    center: state.center,
                                    sampled: bit,
                                },
                            ));
                        }
                    }
                }
            }
            BsStep::Exchange { phase } => {
                self.ensure_drawn(phase);
                self.emit_states(g, out);
            }
            BsStep::FinalExchange => self.emit_states(g, out),
            BsStep::Decide { .. } => self.emit_decisions(g, out),
            BsStep::FinalAdd => self.emit_final_adds(g, out),
        }
    }

    fn emit_states(&self, g: &Graph, out: &mut Vec<(VertexId, EdgeId, BsMsg)>) {
        for v in 0..g.n() {
            if !self.participant[v] {
                continue;
            }
            let cluster = self.cluster[v].map(|state| {
                debug_assert!(
                    self.drawn_phase == 0 || self.sampled_bit[v].is_some(),
                    "flooding must finish before states are exchanged"
                );
                NeighborState {
                    center: state.center,
                    dist: state.dist,
                    sampled: self.sampled_bit[v].unwrap_or(false),
                }
            });
            for &(u, e) in g.neighbors(v) {
                if self.participant[u] && !self.discarded[e] {
                    out.push((v, e, BsMsg::State { cluster }));
                }
            }
        }
    }

    fn emit_decisions(&mut self, g: &Graph, out: &mut Vec<(VertexId, EdgeId, BsMsg)>) {
        debug_assert!(self.pending_cluster.is_empty() && self.pending_kept.is_empty());
        for v in 0..g.n() {
            if self.cluster[v].is_none() || self.sampled_bit[v] != Some(false) {
                continue; // unclustered, or resident of a sampled cluster
            }
            // Lightest active edge into a sampled cluster, if any.
            let mut join: Option<(Weight, EdgeId, NeighborState)> = None;
            for &(_, e) in g.neighbors(v) {
                if !self.edge_active(g, e) {
                    continue;
                }
                let Some(ns) = self.neighbor_state(g, e, v) else { continue };
                if !ns.sampled {
                    continue;
                }
                let key = (g.edge(e).w, e);
                if join.map_or(true, |(w, id, _)| key < (w, id)) {
                    join = Some((key.0, key.1, ns));
                }
            }
            if let Some((_, e, ns)) = join {
                out.push((v, e, BsMsg::Join));
                self.pending_kept.push(e);
                self.pending_cluster.push((
                    v,
                    Some(VertexState {
                        center: ns.center,
                        dist: ns.dist + 1,
                    }),
                ));
                continue;
            }
            // No sampled neighbor: connect once per adjacent cluster, then
            // leave the clustering. All incident edges get resolved when
            // the drop is applied.
            for (_, e) in self.lightest_per_adjacent_cluster(g, v, None) {
                out.push((v, e, BsMsg::Connect));
                self.pending_kept.push(e);
            }
            self.pending_cluster.push((v, None));
        }
    }

    fn emit_final_adds(&mut self, g: &Graph, out: &mut Vec<(VertexId, EdgeId, BsMsg)>) {
        debug_assert!(self.pending_cluster.is_empty());
        for v in 0..g.n() {
            let Some(state) = self.cluster[v] else { continue };
            for (_, e) in self.lightest_per_adjacent_cluster(g, v, Some(state.center)) {
                out.push((v, e, BsMsg::Add));
                self.pending_kept.push(e);
            }
        }
    }

    /// The lightest active edge from `v` into each adjacent cluster,
    /// keyed and ordered by the neighbor cluster's center.
    fn lightest_per_adjacent_cluster(
        &self,
        g: &Graph,
        v: VertexId,
        skip_center: Option<VertexId>,
    ) -> BTreeMap<VertexId, EdgeId> {
        let mut best: BTreeMap<VertexId, (Weight, EdgeId)> = BTreeMap::new();
        for &(_, e) in g.neighbors(v) {
            if !self.edge_active(g, e) {
                continue;
            }
            let Some(ns) = self.neighbor_state(g, e, v) else { continue };
            if skip_center == Some(ns.center) {
                continue;
            }
            let key = (g.edge(e).w, e);
            best.entry(ns.center)
                .and_modify(|cur| {
                    if key < *cur {
                        *cur = key;
                    }
                })
                .or_insert(key);
        }
        best.into_iter().map(|(c, (_, e))| (c, e)).collect()
    }

    /// Applies the step: incorporates deliveries (`(to, from, via, msg)`)
    /// and, for decision steps, the staged local effects.
    pub(crate) fn absorb(
        &mut self,
        g: &Graph,
        step: &BsStep,
        deliveries: &[(VertexId, VertexId, EdgeId, BsMsg)],
    ) {
        for &(to, from, via, ref msg) in deliveries {
            match *msg {
                BsMsg::Flood { center, sampled } => {
                    if self.sampled_bit[to].is_none()
                        && self.cluster[to].is_some_and(|s| s.center == center)
                    {
                        self.sampled_bit[to] = Some(sampled);
                    }
                }
                BsMsg::State { cluster } => {
                    let side = usize::from(g.edge(via).v == from);
                    self.view[via][side] = cluster;
                }
                BsMsg::Join | BsMsg::Connect | BsMsg::Add => {
                    self.kept.insert(via);
                }
            }
        }
        if matches!(step, BsStep::Decide { .. } | BsStep::FinalAdd) {
            self.kept.extend(self.pending_kept.drain(..));
            let dropped: Vec<VertexId> = self
                .pending_cluster
                .iter()
                .filter(|(_, c)| c.is_none())
                .map(|&(v, _)| v)
                .collect();
            for (v, new_cluster) in self.pending_cluster.drain(..) {
                self.cluster[v] = new_cluster;
            }
            // A vertex that left the clustering resolved all its edges.
            for v in dropped {
                for &(_, e) in g.neighbors(v) {
                    self.discarded[e] = true;
                }
            }
            // Edges now internal to one cluster never carry decisions
            // again, even if their endpoints later scatter.
            for e in 0..g.m() {
                if self.discarded[e] {
                    continue;
                }
                let edge = g.edge(e);
                if let (Some(a), Some(b)) = (&self.cluster[edge.u], &self.cluster[edge.v]) {
                    if a.center == b.center {
                        self.discarded[e] = true;
                    }
                }
            }
        }
    }
}

/// Builds a `(2k - 1)`-spanner of `g` in the CONGEST model. No fault
/// tolerance: this is the non-resilient black box that the fault-tolerant
/// construction replicates.
pub fn baswana_sen(
    g: &Graph,
    k: u32,
    cfg: &SimConfig,
) -> Result<(SpannerResult, SimTrace), SimError> {
    if cfg.model != SimModel::Congest {
        return Err(SimError::WrongModel {
            expected: SimModel::Congest,
            got: cfg.model,
        });
    }
    cfg.validate()?;
    if k == 0 {
        return Err(SimError::Greedy(GreedyError::ZeroK));
    }
    let n = g.n();
    let word = cfg.effective_word_bits(n);
    let needed = bs_max_message_bits(n, k).max(log2_ceil(n));
    if word < needed {
        return Err(SimError::WordTooSmall {
            word_bits: word,
            needed,
        });
    }

    let p_sample = if n == 0 {
        1.0
    } else {
        (n as f64).powf(-1.0 / k as f64).min(1.0)
    };
    let mut inst = BsInstance::new(
        g,
        k,
        vec![true; n],
        p_sample,
        mix_seed(cfg.seed, SALT_BS_SAMPLE),
    );
    let vid_bits = log2_ceil(n);
    let dist_bits = dist_bits_for(k);
    let mut net: Network<BsMsg> = Network::new(g, Some(word), cfg.max_rounds);
    for step in bs_schedule(k) {
        let mut out = Vec::new();
        inst.emit(g, &step, &mut out);
        let mut flat = Vec::new();
        if !out.is_empty() {
            for (from, via, msg) in out {
                let bits = bs_msg_bits(&msg, vid_bits, dist_bits);
                net.send(from, via, bits, msg)?;
            }
            let inboxes = net.finish_round(&step.label("bs"))?;
            for (to, inbox) in inboxes.into_iter().enumerate() {
                for d in inbox {
                    flat.push((to, d.from, d.via, d.msg));
                }
            }
        }
        inst.absorb(g, &step, &flat);
    }

    let kept = inst.into_kept();
    Ok((
        SpannerResult {
            stats: SpannerStats {
                edges_kept: kept.len(),
                lbc_calls: 0,
                bfs_runs: 0,
                edge_order: Vec::new(),
            },
            spanner_edge_ids: kept,
        },
        net.into_trace(SimModel::Congest),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, Family, GenSpec, WeightModel};
    use crate::graph::FaultMode;
    use crate::greedy::SpannerParams;
    use crate::verify::verify_ft_spanner;

    fn all_edges(g: &Graph) -> BTreeSet<EdgeId> {
        (0..g.m()).collect()
    }

    #[test]
    fn schedule_shape() {
        assert_eq!(bs_schedule(1).len(), 2);
        assert_eq!(bs_schedule(2).len(), 4);
        // k = 3 adds a one-round flood for phase 2.
        assert_eq!(bs_schedule(3).len(), 7);
        assert!(matches!(bs_schedule(3)[2], BsStep::Flood { phase: 2, round: 0 }));
    }

    #[test]
    fn stretch_one_returns_the_whole_graph() {
        let g = generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.4 }, 12, 3)).unwrap();
        let (result, trace) = baswana_sen(&g, 1, &SimConfig::congest(9)).unwrap();
        assert_eq!(result.spanner_edge_ids, all_edges(&g));
        assert_eq!(trace.rounds_used, 2);
    }

    #[test]
    fn trees_come_back_whole() {
        let path = generate(&GenSpec::unit(Family::Path, 9, 0)).unwrap();
        let star = generate(&GenSpec::unit(Family::Star, 7, 0)).unwrap();
        for (g, k) in [(&path, 3), (&star, 2)] {
            let (result, _) = baswana_sen(g, k, &SimConfig::congest(4)).unwrap();
            assert_eq!(result.spanner_edge_ids, all_edges(g));
        }
    }

    #[test]
    fn random_graph_spanner_verifies_with_bounded_size() {
        let g = generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.2 }, 128, 11)).unwrap();
        let cfg = SimConfig::congest(31);
        let (result, trace) = baswana_sen(&g, 3, &cfg).unwrap();
        let p = SpannerParams::new(3, 0, FaultMode::Vertex).unwrap();
        let report = verify_ft_spanner(&g, &result.spanner_edge_ids, &p).unwrap();
        assert!(report.valid, "{:?}", report.counterexample);
        let bound = 10.0 * 3.0 * (128f64).powf(4.0 / 3.0);
        assert!((result.stats.edges_kept as f64) <= bound);
        assert!(trace.max_bits_on_edge_per_round <= trace.word_bits.unwrap() as u64);
        assert!(trace.rounds_used <= 3 * 3 * 3, "rounds {}", trace.rounds_used);
    }

    #[test]
    fn weighted_graphs_verify() {
        let spec = GenSpec {
            weights: WeightModel::UniformInt { lo: 1, hi: 100 },
            ..GenSpec::unit(Family::Complete, 10, 2)
        };
        let g = generate(&spec).unwrap();
        let (result, _) = baswana_sen(&g, 2, &SimConfig::congest(5)).unwrap();
        let p = SpannerParams::new(2, 0, FaultMode::Vertex).unwrap();
        let report = verify_ft_spanner(&g, &result.spanner_edge_ids, &p).unwrap();
        assert!(report.valid, "{:?}", report.counterexample);
    }

    #[test]
    fn identical_seeds_reproduce_everything() {
        let g = generate(&GenSpec::unit(Family::ErdosRenyi { p: 0.25 }, 64, 8)).unwrap();
        let cfg = SimConfig::congest(123);
        let a = baswana_sen(&g, 2, &cfg).unwrap();
        let b = baswana_sen(&g, 2, &cfg).unwrap();
        assert_eq!(a, b);
        let c = baswana_sen(&g, 2, &SimConfig::congest(124)).unwrap();
        assert_ne!(
            a.0.spanner_edge_ids, c.0.spanner_edge_ids,
            "different seeds should sample different clusters"
        );
    }

    #[test]
    fn tiny_word_is_rejected_up_front() {
        let g = generate(&GenSpec::unit(Family::Cycle, 16, 0)).unwrap();
        let cfg = SimConfig {
            word_bits: Some(3),
            ..SimConfig::congest(1)
        };
        assert!(matches!(
            baswana_sen(&g, 2, &cfg),
            Err(SimError::WordTooSmall { word_bits: 3, .. })
        ));
    }

    #[test]
    fn empty_graph_needs_no_rounds() {
        let g = Graph::unit(4, []).unwrap();
        let (result, trace) = baswana_sen(&g, 2, &SimConfig::congest(2)).unwrap();
        assert!(result.spanner_edge_ids.is_empty());
        assert_eq!(trace.rounds_used, 0);
        assert_eq!(trace.messages_total, 0);
    }
}
