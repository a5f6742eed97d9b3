//! Schedulers (daemons): the adversary that picks which activable nodes
//! execute each step.
//!
//! The synchronous daemon selects every activable node; the distributed
//! unfair daemon has no constraint beyond nonempty selection, which is why
//! the model checker quantifies over every nonempty subset rather than
//! sampling. The strategies here drive single executions; exhaustive
//! quantification goes through [`enumerate_choices`].

use thiserror::Error;

use crate::engine::{activable_set, Configuration, ExecutionTrace, NodeId, ProtocolDef};
use crate::rng::SplitMix64;
use crate::topology::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DaemonError {
    #[error("scripted selection {step} shares no node with the activable set")]
    ScriptDisjoint { step: usize },
    #[error("activable set of size {m} exceeds the subset-drawing limit of 63")]
    SubsetTooLarge { m: usize },
    #[error("cannot enumerate choices for {m} activable nodes (limit {limit})")]
    EnumerationLimit { m: usize, limit: usize },
    #[error("choice enumeration requires a nonempty activable set")]
    EmptyActivable,
}

/// Tie-breaking heuristic for the single-node daemon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinMax {
    /// Lowest register value, then lowest id.
    Min,
    /// Highest register value, then lowest id.
    Max,
}

/// A selection strategy. Each execution owns its strategy since the PRNG
/// and script cursor are mutable per-execution state.
#[derive(Debug, Clone)]
pub enum DaemonStrategy {
    /// Selects the full activable set every step.
    Synchronous,
    /// Selects a uniformly random nonempty subset of the activable set.
    ///
    /// Scheme, fixed for cross-platform reproducibility: sort the activable
    /// set, draw a uniform nonzero mask of `m = |activable|` bits from
    /// splitmix64 (mask to `m` bits, redraw on zero), and include node `i`
    /// of the sorted set when bit `i` is set.
    RandomSubset { seed: u64, rng: SplitMix64 },
    /// Selects exactly one activable node by register-value heuristic.
    SingleMinMax(MinMax),
    /// Replays a fixed list of selections, intersected with the activable
    /// set; declares a stop when the script runs out.
    Scripted {
        script: Vec<Vec<NodeId>>,
        pos: usize,
    },
}

impl DaemonStrategy {
    pub fn random_subset(seed: u64) -> Self {
        DaemonStrategy::RandomSubset {
            seed,
            rng: SplitMix64::new(seed),
        }
    }

    pub fn scripted(script: Vec<Vec<NodeId>>) -> Self {
        DaemonStrategy::Scripted { script, pos: 0 }
    }

    /// True when the selection depends only on the current configuration
    /// and involves no evolving state, so a repeated configuration implies
    /// the execution has entered its cycle.
    pub fn memoryless_deterministic(&self) -> bool {
        matches!(
            self,
            DaemonStrategy::Synchronous | DaemonStrategy::SingleMinMax(_)
        )
    }

    pub fn label(&self) -> String {
        match self {
            DaemonStrategy::Synchronous => "sync".to_string(),
            DaemonStrategy::RandomSubset { seed, .. } => format!("random:{seed}"),
            DaemonStrategy::SingleMinMax(MinMax::Min) => "single:min".to_string(),
            DaemonStrategy::SingleMinMax(MinMax::Max) => "single:max".to_string(),
            DaemonStrategy::Scripted { .. } => "scripted".to_string(),
        }
    }

    /// Picks the next selection: a nonempty subset of `activable`, or
    /// `None` when the strategy declares the run over.
    ///
    /// `activable` must be nonempty and sorted ascending.
    pub fn select(
        &mut self,
        gamma: &Configuration,
        activable: &[NodeId],
    ) -> Result<Option<Vec<NodeId>>, DaemonError> {
        debug_assert!(!activable.is_empty());
        debug_assert!(activable.windows(2).all(|w| w[0] < w[1]));
        match self {
            DaemonStrategy::Synchronous => Ok(Some(activable.to_vec())),
            DaemonStrategy::RandomSubset { rng, .. } => {
                let m = activable.len();
                if m > 63 {
                    return Err(DaemonError::SubsetTooLarge { m });
                }
                if m == 1 {
                    return Ok(Some(activable.to_vec()));
                }
                let mask = rng.next_nonzero_mask(m as u32);
                Ok(Some(nodes_from_mask(activable, mask)))
            }
            DaemonStrategy::SingleMinMax(heuristic) => {
                let pick = match heuristic {
                    MinMax::Min => activable
                        .iter()
                        .copied()
                        .min_by_key(|&v| (gamma.0[v], v))
                        .unwrap(),
                    MinMax::Max => activable
                        .iter()
                        .copied()
                        .max_by_key(|&v| (gamma.0[v], std::cmp::Reverse(v)))
                        .unwrap(),
                };
                Ok(Some(vec![pick]))
            }
            DaemonStrategy::Scripted { script, pos } => {
                let Some(choice) = script.get(*pos) else {
                    return Ok(None);
                };
                let step = *pos;
                *pos += 1;
                let selected: Vec<NodeId> = activable
                    .iter()
                    .copied()
                    .filter(|v| choice.contains(v))
                    .collect();
                if selected.is_empty() {
                    return Err(DaemonError::ScriptDisjoint { step });
                }
                Ok(Some(selected))
            }
        }
    }
}

fn nodes_from_mask(activable: &[NodeId], mask: u64) -> Vec<NodeId> {
    activable
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Every nonempty subset of `activable`, in mask order: subset `j` contains
/// node `i` of the sorted activable list when bit `i` of `j` is set.
pub fn enumerate_choices(
    activable: &[NodeId],
    limit: usize,
) -> Result<Vec<Vec<NodeId>>, DaemonError> {
    let m = activable.len();
    if m == 0 {
        return Err(DaemonError::EmptyActivable);
    }
    if m > limit || m >= usize::BITS as usize - 1 {
        return Err(DaemonError::EnumerationLimit { m, limit });
    }
    Ok((1u64..(1 << m)).map(|mask| nodes_from_mask(activable, mask)).collect())
}

/// The execution-set constraint a daemon imposes, for the inclusion check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DaemonConstraint {
    /// Every step selects exactly the activable set.
    Synchronous,
    /// Every step selects some nonempty subset of the activable set.
    DistributedUnfair,
}

/// Checks that every sampled execution is producible under `constraint`:
/// the empirical side of the daemon partial order (a daemon is weaker than
/// another when its executions are a subset of the other's).
///
/// Vacuously true on an empty sample.
pub fn traces_allowed_under(
    p: &ProtocolDef,
    g: &Graph,
    sample: &[ExecutionTrace],
    constraint: DaemonConstraint,
) -> bool {
    sample.iter().all(|trace| {
        trace.steps.iter().all(|record| {
            let gamma = Configuration(record.config.clone());
            let activable = activable_set(p, g, &gamma);
            let subset = !record.selected.is_empty()
                && record.selected.iter().all(|v| activable.contains(v));
            match constraint {
                DaemonConstraint::DistributedUnfair => subset,
                DaemonConstraint::Synchronous => subset && record.selected == activable,
            }
        })
    })
}
