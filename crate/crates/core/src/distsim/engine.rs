//! The round-synchronous message engine.
//!
//! A [`Network`] wraps one graph and moves opaque messages across its
//! edges in lock-step rounds: algorithms stage sends with [`Network::send`]
//! and then call [`Network::finish_round`], which delivers every staged
//! message to the far endpoint of its edge. Budgets are enforced at send
//! time — in CONGEST mode the bits staged on one (edge, direction) within
//! a round must fit the word, and exceeding it is an error, not a log
//! entry. Deliveries are handed to each receiver sorted by (sender, edge),
//! with ties kept in send order, so runs are reproducible.

use std::collections::BTreeMap;

use crate::graph::{EdgeId, Graph, VertexId};

use super::{SimError, SimModel, SimTrace};

/// Diagnostic cap on a single (edge, direction, round) bit total in LOCAL
/// mode, where messages are conceptually unbounded; tripping it indicates a
/// runaway encoding rather than a model violation.
pub(crate) const LOCAL_MESSAGE_GUARD_BITS: u64 = 1 << 30;

/// One received message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Delivery<M> {
    pub from: VertexId,
    pub via: EdgeId,
    pub msg: M,
}

pub(crate) struct Network<'g, M> {
    g: &'g Graph,
    word_bits: Option<u32>,
    max_rounds: u64,
    rounds_used: u64,
    messages_total: u64,
    max_bits: u64,
    per_phase_rounds: BTreeMap<String, u64>,
    staged: Vec<(VertexId, EdgeId, M)>,
    dir_bits: Vec<[u64; 2]>,
    touched: Vec<EdgeId>,
}

impl<'g, M> Network<'g, M> {
    /// `word_bits: None` simulates LOCAL (no budget beyond the diagnostic
    /// guard); `Some(w)` enforces the CONGEST word.
    pub(crate) fn new(g: &'g Graph, word_bits: Option<u32>, max_rounds: u64) -> Network<'g, M> {
        Network {
            g,
            word_bits,
            max_rounds,
            rounds_used: 0,
            messages_total: 0,
            max_bits: 0,
            per_phase_rounds: BTreeMap::new(),
            staged: Vec::new(),
            dir_bits: vec![[0, 0]; g.m()],
            touched: Vec::new(),
        }
    }

    pub(crate) fn rounds_used(&self) -> u64 {
        self.rounds_used
    }

    /// Stages a `bits`-bit message from `from` across edge `via`, to be
    /// delivered to the opposite endpoint when the round finishes.
    pub(crate) fn send(
        &mut self,
        from: VertexId,
        via: EdgeId,
        bits: u32,
        msg: M,
    ) -> Result<(), SimError> {
        let edge = self.g.edge(via);
        assert!(
            from == edge.u || from == edge.v,
            "vertex {from} is not an endpoint of edge {via}"
        );
        let dir = usize::from(from == edge.v);
        if self.dir_bits[via] == [0, 0] {
            self.touched.push(via);
        }
        let total = self.dir_bits[via][dir] + bits as u64;
        self.dir_bits[via][dir] = total;
        match self.word_bits {
            Some(w) if total > w as u64 => {
                return Err(SimError::BudgetExceeded {
                    round: self.rounds_used + 1,
                    edge: via,
                    bits: total,
                    word_bits: w,
                })
            }
            None if total > LOCAL_MESSAGE_GUARD_BITS => {
                return Err(SimError::MessageGuard { bits: total })
            }
            _ => {}
        }
        self.staged.push((from, via, msg));
        Ok(())
    }

    /// Closes the round under the given phase label and returns each
    /// vertex's inbox.
    pub(crate) fn finish_round(&mut self, phase: &str) -> Result<Vec<Vec<Delivery<M>>>, SimError> {
        self.rounds_used += 1;
        if self.rounds_used > self.max_rounds {
            return Err(SimError::RoundLimit {
                max_rounds: self.max_rounds,
            });
        }
        *self.per_phase_rounds.entry(phase.to_string()).or_insert(0) += 1;
        self.messages_total += self.staged.len() as u64;
        for &e in &self.touched {
            self.max_bits = self.max_bits.max(self.dir_bits[e][0]).max(self.dir_bits[e][1]);
            self.dir_bits[e] = [0, 0];
        }
        self.touched.clear();

        let mut order: Vec<usize> = (0..self.staged.len()).collect();
        order.sort_by_key(|&i| {
            let (from, via, _) = &self.staged[i];
            (*from, *via)
        });
        let mut inboxes: Vec<Vec<Delivery<M>>> = (0..self.g.n()).map(|_| Vec::new()).collect();
        // Move messages out by original index so the sorted walk can take
        // ownership without cloning.
        let mut slots: Vec<Option<(VertexId, EdgeId, M)>> =
            std::mem::take(&mut self.staged).into_iter().map(Some).collect();
        for i in order {
            let (from, via, msg) = slots[i].take().expect("each staged message moves once");
            let to = self.g.edge(via).other(from);
            inboxes[to].push(Delivery { from, via, msg });
        }
        Ok(inboxes)
    }

    pub(crate) fn into_trace(self, model: SimModel) -> SimTrace {
        SimTrace {
            model,
            rounds_used: self.rounds_used,
            messages_total: self.messages_total,
            max_bits_on_edge_per_round: self.max_bits,
            word_bits: self.word_bits,
            per_phase_rounds: self.per_phase_rounds,
            retries_used: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::unit(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn deliveries_cross_the_edge_and_sort_by_sender() {
        let g = path3();
        let mut net: Network<&str> = Network::new(&g, Some(32), 100);
        net.send(2, 1, 4, "from-two").unwrap();
        net.send(0, 0, 4, "from-zero").unwrap();
        let inboxes = net.finish_round("test").unwrap();
        assert!(inboxes[0].is_empty());
        assert_eq!(inboxes[1].len(), 2);
        assert_eq!(inboxes[1][0].from, 0);
        assert_eq!(inboxes[1][0].msg, "from-zero");
        assert_eq!(inboxes[1][1].from, 2);
        assert!(inboxes[2].is_empty());
        let trace = net.into_trace(SimModel::Congest);
        assert_eq!(trace.rounds_used, 1);
        assert_eq!(trace.messages_total, 2);
        assert_eq!(trace.max_bits_on_edge_per_round, 4);
        assert_eq!(trace.per_phase_rounds["test"], 1);
    }

    #[test]
    fn budget_is_enforced_per_direction() {
        let g = path3();
        let mut net: Network<u8> = Network::new(&g, Some(8), 100);
        net.send(0, 0, 5, 1).unwrap();
        // Opposite direction has its own budget.
        net.send(1, 0, 5, 2).unwrap();
        // Same direction again: 5 + 5 > 8.
        let err = net.send(0, 0, 5, 3).unwrap_err();
        assert!(matches!(
            err,
            SimError::BudgetExceeded { edge: 0, bits: 10, word_bits: 8, .. }
        ));
    }

    #[test]
    fn budget_resets_between_rounds() {
        let g = path3();
        let mut net: Network<u8> = Network::new(&g, Some(8), 100);
        net.send(0, 0, 6, 1).unwrap();
        net.finish_round("a").unwrap();
        net.send(0, 0, 6, 2).unwrap();
        let inboxes = net.finish_round("a").unwrap();
        assert_eq!(inboxes[1].len(), 1);
        let trace = net.into_trace(SimModel::Congest);
        assert_eq!(trace.rounds_used, 2);
        assert_eq!(trace.per_phase_rounds["a"], 2);
    }

    #[test]
    fn round_cap_stops_the_run() {
        let g = path3();
        let mut net: Network<u8> = Network::new(&g, None, 2);
        net.finish_round("x").unwrap();
        net.finish_round("x").unwrap();
        assert!(matches!(
            net.finish_round("x"),
            Err(SimError::RoundLimit { max_rounds: 2 })
        ));
    }

    #[test]
    fn local_mode_guards_runaway_encodings() {
        let g = path3();
        let mut net: Network<u8> = Network::new(&g, None, 10);
        net.send(0, 0, u32::MAX, 1).unwrap();
        assert!(matches!(
            net.send(0, 0, u32::MAX, 2),
            Err(SimError::MessageGuard { .. })
        ));
    }
}
