//! Fault-tolerant spanners in the CONGEST model via subsampled
//! replication.
//!
//! Phase 1: every vertex independently opts into each of
//! `T = ceil(dk_iteration_factor * f^3 * log2 n)` iterations with
//! probability `1/f` and transmits its selection list to its neighbors in
//! word-sized chunks. Phase 2 runs one [`baswana_sen`] instance per
//! iteration over the participant-induced subgraph, all instances in lock
//! step: within each logical protocol step, every edge direction queues its
//! tagged messages (iteration number attached) and drains them over as many
//! physical rounds as the word budget requires, so the budget is respected
//! by construction and congestion directly becomes round count. The result
//! is the union of all instance spanners.
//!
//! Why the union tolerates faults: for a vertex fault set `F` (`|F| <= f`)
//! and a surviving shortest link `{u, v}`, some iteration includes both
//! endpoints and misses all of `F` with constant probability over
//! `f^2`-ish trials, so across `T` iterations such an iteration exists with
//! high probability; that instance's spanner then detours `{u, v}` inside
//! the fault-free participant subgraph. The guarantee is probabilistic and
//! is stated for vertex faults (for `f = 1` every vertex participates
//! everywhere, so only the replication diversity helps); callers should
//! certify desk-scale outputs with the brute-force verifier.
//!
//! [`baswana_sen`]: super::baswana_sen::baswana_sen

use std::collections::BTreeSet;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::greedy::{SpannerParams, SpannerResult, SpannerStats};
use crate::seeding::{mix_seed, mix_seed3, stream};

use super::baswana_sen::{
    bs_max_message_bits, bs_msg_bits, bs_schedule, dist_bits_for, BsInstance, BsMsg,
};
use super::engine::Network;
use super::{
    attempt_seed, log2_ceil, log2f, SimConfig, SimError, SimModel, SimTrace, SALT_BS_SAMPLE,
    SALT_DK_SELECT,
};

#[derive(Debug, Clone, PartialEq)]
enum DkMsg {
    /// One chunk of the sender's selected iteration numbers.
    Selection { indices: Vec<u32>, done: bool },
    /// A protocol message of instance `tag`.
    Bs { tag: u32, inner: BsMsg },
}

/// `T`, the number of replicated instances.
fn iteration_count(cfg: &SimConfig, f: u32, n: usize) -> usize {
    let t = (cfg.dk_iteration_factor * (f as f64).powi(3) * log2f(n)).ceil();
    (t as usize).max(1)
}

pub fn dk_congest_ft_spanner(
    g: &Graph,
    p: &SpannerParams,
    cfg: &SimConfig,
) -> Result<(SpannerResult, SimTrace), SimError> {
    if cfg.model != SimModel::Congest {
        return Err(SimError::WrongModel {
            expected: SimModel::Congest,
            got: cfg.model,
        });
    }
    cfg.validate()?;
    SpannerParams::new(p.k, p.f, p.mode)?;
    if p.f == 0 {
        return Err(SimError::NeedsFaults);
    }

    let n = g.n();
    let word = cfg.effective_word_bits(n);
    let t_count = iteration_count(cfg, p.f, n);
    let idx_bits = log2_ceil(t_count);
    let tag_bits = idx_bits;
    let vid_bits = log2_ceil(n);
    let dist_bits = dist_bits_for(p.k);
    // Everything that ever crosses an edge must fit the word: a selection
    // chunk with at least one index, and any tagged protocol message.
    let needed = log2_ceil(n)
        .max(1 + idx_bits)
        .max(bs_max_message_bits(n, p.k) + tag_bits);
    if word < needed {
        return Err(SimError::WordTooSmall {
            word_bits: word,
            needed,
        });
    }
    let sel_capacity = (((word - 1) / idx_bits) as usize).max(1);
    let p_participate = 1.0 / p.f as f64;
    let p_sample = if n == 0 {
        1.0
    } else {
        ((2.0 * n as f64) / p.f as f64)
            .powf(-1.0 / p.k as f64)
            .min(1.0)
    };

    let mut trace = SimTrace::new(SimModel::Congest, Some(word));
    for attempt in 0..=cfg.retries {
        let seed = attempt_seed(cfg.seed, attempt);
        let mut net: Network<DkMsg> = Network::new(
            g,
            Some(word),
            cfg.max_rounds.saturating_sub(trace.rounds_used),
        );

        // Phase 1: draw and exchange selections.
        let selected: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let mut rng = stream(mix_seed(seed, SALT_DK_SELECT), v as u64);
                (0..t_count as u32)
                    .filter(|_| rng.random_bool(p_participate))
                    .collect()
            })
            .collect();
        let sel_rounds = selected
            .iter()
            .map(|s| s.len().div_ceil(sel_capacity).max(1))
            .max()
            .unwrap_or(0);
        for r in 0..sel_rounds {
            for v in 0..n {
                let list = &selected[v];
                let total_chunks = list.len().div_ceil(sel_capacity).max(1);
                if r >= total_chunks {
                    continue;
                }
                let lo = r * sel_capacity;
                let hi = (lo + sel_capacity).min(list.len());
                let indices = list[lo..hi].to_vec();
                let done = r + 1 == total_chunks;
                let bits = 1 + indices.len() as u32 * idx_bits;
                for &(_, e) in g.neighbors(v) {
                    net.send(
                        v,
                        e,
                        bits,
                        DkMsg::Selection {
                            indices: indices.clone(),
                            done,
                        },
                    )?;
                }
            }
            net.finish_round("dk-select")?;
        }

        // Every edge needs an iteration where both endpoints participate;
        // otherwise no instance can even consider it. Retry with fresh
        // randomness when the event fails.
        let bitmap_words = t_count.div_ceil(64);
        let mut bitmap = vec![vec![0u64; bitmap_words]; n];
        for (v, list) in selected.iter().enumerate() {
            for &t in list {
                bitmap[v][t as usize / 64] |= 1 << (t % 64);
            }
        }
        let covered = g.edges().iter().all(|e| {
            (0..bitmap_words).any(|w| bitmap[e.u][w] & bitmap[e.v][w] != 0)
        });
        if !covered {
            trace.absorb(&net.into_trace(SimModel::Congest));
            trace.retries_used += 1;
            continue;
        }

        // Phase 2: all instances advance through the shared schedule.
        let mut instances: Vec<BsInstance> = (0..t_count)
            .map(|tag| {
                let participant: Vec<bool> = (0..n)
                    .map(|v| bitmap[v][tag / 64] >> (tag % 64) & 1 == 1)
                    .collect();
                BsInstance::new(
                    g,
                    p.k,
                    participant,
                    p_sample,
                    mix_seed3(seed, SALT_BS_SAMPLE, tag as u64),
                )
            })
            .collect();
        for step in bs_schedule(p.k) {
            let mut queues: Vec<Vec<(u32, VertexId, BsMsg)>> = vec![Vec::new(); 2 * g.m()];
            let mut remaining = 0usize;
            let mut out = Vec::new();
            for (tag, inst) in instances.iter_mut().enumerate() {
                out.clear();
                inst.emit(g, &step, &mut out);
                for (from, via, msg) in out.drain(..) {
                    let dir = usize::from(g.edge(via).v == from);
                    queues[2 * via + dir].push((tag as u32, from, msg));
                    remaining += 1;
                }
            }
            let mut cursors = vec![0usize; queues.len()];
            let mut buffers: Vec<Vec<(VertexId, VertexId, EdgeId, BsMsg)>> =
                vec![Vec::new(); t_count];
            let label = step.label("dk-bs");
            while remaining > 0 {
                for (qi, q) in queues.iter().enumerate() {
                    let via = qi / 2;
                    let mut used = 0u32;
                    while cursors[qi] < q.len() {
                        let (tag, from, msg) = &q[cursors[qi]];
                        let bits = bs_msg_bits(msg, vid_bits, dist_bits) + tag_bits;
                        debug_assert!(bits <= word, "validated before the run");
                        if used + bits > word {
                            break;
                        }
                        used += bits;
                        net.send(
                            *from,
                            via,
                            bits,
                            DkMsg::Bs {
                                tag: *tag,
                                inner: msg.clone(),
                            },
                        )?;
                        cursors[qi] += 1;
                        remaining -= 1;
                    }
                }
                let inboxes = net.finish_round(&label)?;
                for (to, inbox) in inboxes.into_iter().enumerate() {
                    for d in inbox {
                        if let DkMsg::Bs { tag, inner } = d.msg {
                            buffers[tag as usize].push((to, d.from, d.via, inner));
                        }
                    }
                }
            }
            for (tag, inst) in instances.iter_mut().enumerate() {
                inst.absorb(g, &step, &buffers[tag]);
            }
        }

        let mut union: BTreeSet<EdgeId> = BTreeSet::new();
        for inst in instances {
            union.extend(inst.into_kept());
        }
        trace.absorb(&net.into_trace(SimModel::Congest));
        return Ok((
            SpannerResult {
                stats: SpannerStats {
                    edges_kept: union.len(),
                    lbc_calls: 0,
                    bfs_runs: 0,
                    edge_order: Vec::new(),
                },
                spanner_edge_ids: union,
            },
            trace,
        ));
    }
    Err(SimError::CoverageFailure {
        attempts: cfg.retries + 1,
    })
}
