//! Round-synchronous simulation of distributed spanner constructions.
//!
//! Two message-passing models are simulated: `LOCAL` (unbounded message
//! size per edge per round) and `CONGEST` (a per-edge, per-direction,
//! per-round bit budget). The simulator advances all vertices in lock
//! step; given the same graph, parameters, and seed it produces
//! bit-identical traces and spanners.
//!
//! Three constructions are provided:
//!
//! * [`local_ft_spanner`] — low-diameter clustering, gather each cluster's
//!   induced subgraph at its center, solve there with a sequential
//!   construction, and union the results (LOCAL),
//! * [`baswana_sen`] — the randomized k-phase clustering spanner (CONGEST,
//!   no fault tolerance),
//! * [`dk_congest_ft_spanner`] — many subsampled [`baswana_sen`] instances
//!   run in parallel and unioned into a fault-tolerant spanner (CONGEST).

mod baswana_sen;
mod decomposition;
mod dk;
mod engine;
mod local;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, GraphError};
use crate::greedy::GreedyError;

pub use baswana_sen::baswana_sen;
pub use decomposition::{
    padded_decomposition, Cluster, ClusterDecomposition, DecompositionError, Partition,
};
pub use dk::dk_congest_ft_spanner;
pub use local::{induced_subgraph, local_ft_spanner};

/// Message-passing model being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimModel {
    Local,
    Congest,
}

impl SimModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SimModel::Local => "local",
            SimModel::Congest => "congest",
        }
    }
}

impl std::fmt::Display for SimModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which sequential construction each cluster center runs in the LOCAL
/// pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterAlgo {
    /// The polynomial greedy driven by gap decisions (default). Its size
    /// guarantee carries an extra factor of `k` over the exact one.
    #[default]
    Greedy,
    /// The exponential exact greedy; refuses clusters beyond its guard.
    Exact,
}

/// Knobs for the low-diameter decomposition: `partitions_per_log` scales
/// the number of partitions (`ceil(partitions_per_log * log2 n)`), `beta`
/// is the exponential rate of the start-time shifts, and
/// `shift_cap_per_log` scales the shift cap (`shift_cap_per_log * log2 n`
/// hops), which also bounds every cluster radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompParams {
    pub partitions_per_log: f64,
    pub beta: f64,
    pub shift_cap_per_log: f64,
}

impl Default for DecompParams {
    fn default() -> DecompParams {
        DecompParams {
            partitions_per_log: 8.0,
            beta: 0.25,
            shift_cap_per_log: 2.0,
        }
    }
}

/// Simulation parameters shared by every construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: SimModel,
    /// CONGEST bit budget per edge, per direction, per round. `None`
    /// selects `4 * ceil(log2 n)`. Ignored in LOCAL mode.
    pub word_bits: Option<u32>,
    pub seed: u64,
    /// Safety cap on total rounds across retries.
    pub max_rounds: u64,
    /// Extra attempts with remixed seeds when a probabilistic coverage
    /// property fails.
    pub retries: u32,
    pub decomp: DecompParams,
    pub cluster_algo: ClusterAlgo,
    /// Scales the iteration count of [`dk_congest_ft_spanner`]:
    /// `T = ceil(dk_iteration_factor * f^3 * log2 n)`.
    pub dk_iteration_factor: f64,
}

impl SimConfig {
    pub fn new(model: SimModel, seed: u64) -> SimConfig {
        SimConfig {
            model,
            word_bits: None,
            seed,
            max_rounds: 1_000_000,
            retries: 3,
            decomp: DecompParams::default(),
            cluster_algo: ClusterAlgo::default(),
            dk_iteration_factor: 4.0,
        }
    }

    pub fn local(seed: u64) -> SimConfig {
        SimConfig::new(SimModel::Local, seed)
    }

    pub fn congest(seed: u64) -> SimConfig {
        SimConfig::new(SimModel::Congest, seed)
    }

    /// The CONGEST word size in force for an `n`-vertex graph.
    pub fn effective_word_bits(&self, n: usize) -> u32 {
        self.word_bits.unwrap_or(4 * log2_ceil(n))
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.max_rounds == 0 {
            return Err(SimError::Config {
                field: "max_rounds",
                requirement: "must be positive",
            });
        }
        for (field, value) in [
            ("decomp.partitions_per_log", self.decomp.partitions_per_log),
            ("decomp.beta", self.decomp.beta),
            ("decomp.shift_cap_per_log", self.decomp.shift_cap_per_log),
            ("dk_iteration_factor", self.dk_iteration_factor),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::Config {
                    field,
                    requirement: "must be finite and positive",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("operation requires the {expected} model but the config selects {got}")]
    WrongModel { expected: SimModel, got: SimModel },
    #[error("config field {field} {requirement}")]
    Config {
        field: &'static str,
        requirement: &'static str,
    },
    #[error("word budget of {word_bits} bits is too small: this run needs {needed}")]
    WordTooSmall { word_bits: u32, needed: u32 },
    #[error("round {round}: {bits} bits staged on edge {edge} exceed the {word_bits}-bit word")]
    BudgetExceeded {
        round: u64,
        edge: EdgeId,
        bits: u64,
        word_bits: u32,
    },
    #[error("a message of {bits} bits trips the runaway-encoding guard")]
    MessageGuard { bits: u64 },
    #[error("simulation exceeded the round cap of {max_rounds}")]
    RoundLimit { max_rounds: u64 },
    #[error("random coverage failed in all {attempts} attempts")]
    CoverageFailure { attempts: u32 },
    #[error("fault-tolerant construction needs f >= 1 (got f = 0)")]
    NeedsFaults,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
}

/// Round, message, and bandwidth accounting for one simulation, including
/// any internal retries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimTrace {
    pub model: SimModel,
    pub rounds_used: u64,
    pub messages_total: u64,
    /// Largest bit total observed on any (edge, direction) within one
    /// round. In CONGEST this never exceeds `word_bits`.
    pub max_bits_on_edge_per_round: u64,
    /// The enforced budget (`None` in LOCAL mode).
    pub word_bits: Option<u32>,
    pub per_phase_rounds: BTreeMap<String, u64>,
    pub retries_used: u32,
}

impl SimTrace {
    pub(crate) fn new(model: SimModel, word_bits: Option<u32>) -> SimTrace {
        SimTrace {
            model,
            rounds_used: 0,
            messages_total: 0,
            max_bits_on_edge_per_round: 0,
            word_bits,
            per_phase_rounds: BTreeMap::new(),
            retries_used: 0,
        }
    }

    /// Accounts a block of rounds computed analytically rather than through
    /// the message engine (used where payloads would be whole subgraphs).
    pub(crate) fn add_phase(&mut self, phase: &str, rounds: u64, messages: u64, max_bits: u64) {
        if rounds > 0 {
            *self.per_phase_rounds.entry(phase.to_string()).or_insert(0) += rounds;
        }
        self.rounds_used += rounds;
        self.messages_total += messages;
        self.max_bits_on_edge_per_round = self.max_bits_on_edge_per_round.max(max_bits);
    }

    pub(crate) fn absorb(&mut self, other: &SimTrace) {
        debug_assert_eq!(self.model, other.model);
        self.rounds_used += other.rounds_used;
        self.messages_total += other.messages_total;
        self.max_bits_on_edge_per_round = self
            .max_bits_on_edge_per_round
            .max(other.max_bits_on_edge_per_round);
        for (phase, rounds) in &other.per_phase_rounds {
            *self.per_phase_rounds.entry(phase.clone()).or_insert(0) += rounds;
        }
        self.retries_used += other.retries_used;
    }

    pub(crate) fn check_round_limit(&self, cfg: &SimConfig) -> Result<(), SimError> {
        if self.rounds_used > cfg.max_rounds {
            return Err(SimError::RoundLimit {
                max_rounds: cfg.max_rounds,
            });
        }
        Ok(())
    }
}

/// Bits needed to address `x` distinct values on the wire (at least 1).
pub(crate) fn log2_ceil(x: usize) -> u32 {
    let x = x.max(2);
    usize::BITS - (x - 1).leading_zeros()
}

/// `log2 n` as used in round and size envelopes, floored at 1 so tiny
/// inputs still get nontrivial budgets.
pub(crate) fn log2f(n: usize) -> f64 {
    (n.max(2) as f64).log2().max(1.0)
}

/// Seed for retry `attempt`; attempt 0 uses the configured seed unchanged
/// so single-shot runs and first attempts coincide.
pub(crate) fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        seed
    } else {
        crate::seeding::mix_seed3(seed, SALT_RETRY, attempt as u64)
    }
}

pub(crate) const SALT_SHIFT: u64 = 0x6c6f_6361;
pub(crate) const SALT_RETRY: u64 = 0x7265_7472;
pub(crate) const SALT_BS_SAMPLE: u64 = 0x6273_7370;
pub(crate) const SALT_DK_SELECT: u64 = 0x646b_7365;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_ceil_small_values() {
        assert_eq!(log2_ceil(0), 1);
        assert_eq!(log2_ceil(1), 1);
        assert_eq!(log2_ceil(2), 1);
        assert_eq!(log2_ceil(3), 2);
        assert_eq!(log2_ceil(8), 3);
        assert_eq!(log2_ceil(9), 4);
        assert_eq!(log2_ceil(1024), 10);
    }

    #[test]
    fn default_word_tracks_graph_size() {
        let cfg = SimConfig::congest(7);
        assert_eq!(cfg.effective_word_bits(256), 32);
        assert_eq!(cfg.effective_word_bits(1000), 40);
        let fixed = SimConfig {
            word_bits: Some(17),
            ..cfg
        };
        assert_eq!(fixed.effective_word_bits(256), 17);
    }

    #[test]
    fn config_rejects_bad_knobs() {
        let mut cfg = SimConfig::local(1);
        cfg.decomp.beta = 0.0;
        assert!(matches!(
            cfg.validate(),
            Err(SimError::Config { field: "decomp.beta", .. })
        ));
        let mut cfg = SimConfig::local(1);
        cfg.max_rounds = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn trace_absorb_merges_phases() {
        let mut a = SimTrace::new(SimModel::Local, None);
        a.add_phase("decompose", 10, 100, 64);
        let mut b = SimTrace::new(SimModel::Local, None);
        b.add_phase("decompose", 3, 30, 128);
        b.add_phase("gather", 5, 50, 32);
        b.retries_used = 1;
        a.absorb(&b);
        assert_eq!(a.rounds_used, 18);
        assert_eq!(a.messages_total, 180);
        assert_eq!(a.max_bits_on_edge_per_round, 128);
        assert_eq!(a.per_phase_rounds["decompose"], 13);
        assert_eq!(a.per_phase_rounds["gather"], 5);
        assert_eq!(a.retries_used, 1);
    }

    #[test]
    fn attempt_zero_keeps_the_seed() {
        assert_eq!(attempt_seed(42, 0), 42);
        assert_ne!(attempt_seed(42, 1), 42);
        assert_ne!(attempt_seed(42, 1), attempt_seed(42, 2));
    }
}
