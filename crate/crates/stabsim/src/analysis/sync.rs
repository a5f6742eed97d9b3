//! Synchronous-daemon stabilization measurement.
//!
//! A synchronous execution is deterministic, so from any initial
//! configuration the orbit is a tail followed by a cycle, found by exact
//! state memoization. The stabilization time is one past the last
//! safety-violating index in the tail; a violation on the cycle, a node
//! that never acts on the cycle, or a deadlock all mean the execution never
//! stabilizes.
//!
//! The exhaustive sweep shares work across initial configurations: the
//! synchronous successor function makes the space a functional graph, so a
//! single memoized pass computes every configuration's violation horizon in
//! `O(|domain|^n)` steps total.

use std::collections::HashMap;

use crate::engine::{run, Configuration, ProtocolDef, RunStatus, Stepper};
use crate::rng::SplitMix64;
use crate::topology::Graph;

use super::{
    AnalysisError, Lasso, LassoStep, Method, StabTime, StabilizationReport, Witness,
};

/// Default cap on exhaustively enumerated initial configurations.
pub const DEFAULT_SYNC_BUDGET: u64 = 2_000_000;

/// Node-count cap imposed by the per-step bitmask bookkeeping.
const NODE_LIMIT: usize = 64;

/// Cap on stored witness prefixes; replaying the witness regenerates the
/// full execution when needed.
const PREFIX_CAP: usize = 64;

/// Outcome of measuring a single initial configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncOutcome {
    pub stab: StabTime,
    /// Whether every node acts (or executes its critical section, for
    /// mutual-exclusion protocols) at least once per period of the eventual
    /// cycle. Meaningless when `stab` is `Unknown`.
    pub liveness_ok: bool,
}

/// Sweep strategy over initial configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive { max_states: u64 },
    Sampled { count: u64, seed: u64, max_steps: u64 },
}

fn check_node_limit(p: &ProtocolDef) -> Result<(), AnalysisError> {
    if p.n > NODE_LIMIT {
        Err(AnalysisError::TooManyNodes {
            n: p.n,
            limit: NODE_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// One synchronous step; returns whether safety was violated in `gamma`
/// (two or more privileged nodes) and the mask of nodes that acted.
fn observe_step(
    stepper: &mut Stepper,
    mutex: bool,
    gamma: &Configuration,
    next: &mut Configuration,
) -> (bool, u64) {
    let mut privileged = 0u32;
    let mut events = 0u64;
    stepper.sync_step_observe(gamma, next, |v, activable, is_privileged| {
        if is_privileged {
            privileged += 1;
        }
        let acted = if mutex {
            is_privileged && activable
        } else {
            activable
        };
        if acted {
            events |= 1 << v;
        }
    });
    (privileged >= 2, events)
}

/// Measures the stabilization time of the synchronous execution from
/// `gamma0` by orbit analysis, giving up with `Unknown` if the orbit does
/// not close within `max_steps`.
pub fn sync_stab_time(
    p: &ProtocolDef,
    g: &Graph,
    gamma0: &Configuration,
    max_steps: u64,
) -> Result<SyncOutcome, AnalysisError> {
    check_node_limit(p)?;
    p.validate_config(gamma0)?;
    let mutex = p.mutex_liveness();
    let everyone = full_mask(p.n);
    let mut stepper = Stepper::new(p, g);
    let mut seen: HashMap<Vec<i32>, u32> = HashMap::new();
    let mut records: Vec<(bool, u64)> = Vec::new();
    let mut cur = gamma0.clone();
    let mut next = gamma0.clone();
    let cycle_start = loop {
        if let Some(&j) = seen.get(&cur.0) {
            break j as usize;
        }
        if records.len() as u64 >= max_steps {
            return Ok(SyncOutcome {
                stab: StabTime::Unknown,
                liveness_ok: true,
            });
        }
        seen.insert(cur.0.clone(), records.len() as u32);
        let record = observe_step(&mut stepper, mutex, &cur, &mut next);
        records.push(record);
        std::mem::swap(&mut cur, &mut next);
    };
    let cycle_violation = records[cycle_start..].iter().any(|r| r.0);
    let cycle_events = records[cycle_start..].iter().fold(0u64, |m, r| m | r.1);
    let live = cycle_events == everyone;
    let stab = if cycle_violation || !live {
        StabTime::Infinite
    } else {
        match records[..cycle_start].iter().rposition(|r| r.0) {
            Some(i) => StabTime::Finite(i as u64 + 1),
            None => StabTime::Finite(0),
        }
    };
    Ok(SyncOutcome {
        stab,
        liveness_ok: live,
    })
}

/// Worst-case synchronous stabilization over initial configurations.
pub fn sync_worst_case(
    p: &ProtocolDef,
    g: &Graph,
    graph_label: &str,
    mode: SweepMode,
) -> Result<StabilizationReport, AnalysisError> {
    check_node_limit(p)?;
    let (stab_time, liveness_ok, witness_initial, method) = match mode {
        SweepMode::Exhaustive { max_states } => {
            let (stab, live, witness) = exhaustive_sweep(p, g, max_states)?;
            (stab, live, Some(witness), Method::Exhaustive)
        }
        SweepMode::Sampled {
            count,
            seed,
            max_steps,
        } => {
            let (stab, live, witness) = sampled_sweep(p, g, count, seed, max_steps)?;
            (stab, live, witness, Method::Sampled { count, seed })
        }
    };
    let witness = witness_initial.map(|initial| build_sync_witness(p, g, initial, stab_time));
    Ok(StabilizationReport {
        protocol: p.name.clone(),
        graph: graph_label.to_string(),
        n: p.n,
        diam: g.diameter(),
        daemon: "sync".to_string(),
        method,
        stab_time,
        liveness_ok,
        witness,
    })
}

/// Horizon sentinel values for the memoized sweep.
const H_UNSET: i64 = i64::MIN;
const H_INF: i64 = i64::MAX;

/// Memoized pass over the whole space.
///
/// `horizon[s]` is the index of the last safety violation on the orbit of
/// `s` (`-1` when none, `H_INF` when the orbit's cycle violates safety or
/// liveness), so the stabilization time of `s` is `horizon[s] + 1`.
fn exhaustive_sweep(
    p: &ProtocolDef,
    g: &Graph,
    max_states: u64,
) -> Result<(StabTime, bool, Configuration), AnalysisError> {
    let space = super::ConfigSpace::new(p);
    let size = space.size_within(max_states)? as usize;
    let mutex = p.mutex_liveness();
    let everyone = full_mask(p.n);
    let mut stepper = Stepper::new(p, g);
    let mut horizon = vec![H_UNSET; size];
    let mut walk_stamp = vec![u32::MAX; size];
    let mut path_pos = vec![0u32; size];
    let mut liveness_failed = false;
    let mut path: Vec<u32> = Vec::new();
    let mut path_viol: Vec<bool> = Vec::new();
    let mut path_events: Vec<u64> = Vec::new();
    let mut cur_cfg = Configuration(vec![0; p.n]);
    let mut next_cfg = cur_cfg.clone();

    for start in 0..size {
        if horizon[start] != H_UNSET {
            continue;
        }
        let walk_id = start as u32;
        path.clear();
        path_viol.clear();
        path_events.clear();
        let mut cur = start;
        let mut carry = loop {
            if horizon[cur] != H_UNSET {
                break horizon[cur];
            }
            if walk_stamp[cur] == walk_id {
                // Closed a new cycle: every configuration on it shares the
                // same horizon.
                let cpos = path_pos[cur] as usize;
                let violated = path_viol[cpos..].iter().any(|&v| v);
                let events = path_events[cpos..].iter().fold(0u64, |m, &e| m | e);
                let live = events == everyone;
                if !live {
                    liveness_failed = true;
                }
                let value = if violated || !live { H_INF } else { -1 };
                for &s in &path[cpos..] {
                    horizon[s as usize] = value;
                }
                path.truncate(cpos);
                path_viol.truncate(cpos);
                path_events.truncate(cpos);
                break value;
            }
            walk_stamp[cur] = walk_id;
            path_pos[cur] = path.len() as u32;
            path.push(cur as u32);
            space.config_at(cur as u64, &mut cur_cfg);
            let (viol, events) = observe_step(&mut stepper, mutex, &cur_cfg, &mut next_cfg);
            path_viol.push(viol);
            path_events.push(events);
            cur = space.index_of(&next_cfg) as usize;
        };
        for i in (0..path.len()).rev() {
            carry = if carry == H_INF {
                H_INF
            } else if carry >= 0 {
                carry + 1
            } else if path_viol[i] {
                0
            } else {
                -1
            };
            horizon[path[i] as usize] = carry;
        }
    }

    let mut worst_index = 0usize;
    let mut worst = horizon[0];
    for (i, &h) in horizon.iter().enumerate() {
        debug_assert_ne!(h, H_UNSET);
        if h > worst {
            worst = h;
            worst_index = i;
        }
    }
    let stab = if worst == H_INF {
        StabTime::Infinite
    } else {
        StabTime::Finite((worst + 1) as u64)
    };
    let mut witness = Configuration(vec![0; p.n]);
    space.config_at(worst_index as u64, &mut witness);
    Ok((stab, !liveness_failed, witness))
}

fn sampled_sweep(
    p: &ProtocolDef,
    g: &Graph,
    count: u64,
    seed: u64,
    max_steps: u64,
) -> Result<(StabTime, bool, Option<Configuration>), AnalysisError> {
    let d = p.domain.len() as u64;
    let mut worst = StabTime::Finite(0);
    let mut witness: Option<Configuration> = None;
    let mut liveness_ok = true;
    let mut gamma = Configuration(vec![0; p.n]);
    for i in 0..count {
        let mut rng = SplitMix64::derive(seed, i);
        for v in 0..p.n {
            gamma.0[v] = p.domain[rng.next_below(d) as usize];
        }
        let outcome = sync_stab_time(p, g, &gamma, max_steps)?;
        liveness_ok &= outcome.liveness_ok;
        if outcome.stab.worse_than(worst) || witness.is_none() {
            worst = worst.merge_worst(outcome.stab);
            witness = Some(gamma.clone());
        }
    }
    Ok((worst, liveness_ok, witness))
}

/// Replays the synchronous execution from the witness to capture a trace
/// prefix (and, for non-stabilizing witnesses, the offending lasso).
fn build_sync_witness(
    p: &ProtocolDef,
    g: &Graph,
    initial: Configuration,
    stab: StabTime,
) -> Witness {
    let mut daemon = crate::daemons::DaemonStrategy::Synchronous;
    let budget = match stab {
        StabTime::Finite(t) => t + 2,
        _ => 4 * (p.domain.len() as u64 + p.n as u64) + 16,
    };
    let trace = run(p, g, &initial, &mut daemon, budget.max(8)).expect("witness replays");
    let prefix_len = match stab {
        StabTime::Finite(t) => ((t as usize) + 1).min(PREFIX_CAP),
        _ => PREFIX_CAP,
    };
    let mut trace_prefix: Vec<Vec<i32>> =
        trace.steps.iter().map(|s| s.config.clone()).collect();
    trace_prefix.push(trace.final_config.0.clone());
    trace_prefix.truncate(prefix_len);
    let lasso = match (stab, trace.status) {
        (StabTime::Infinite, RunStatus::Stabilized) => {
            // The run stopped at the first repeated configuration; split the
            // recorded steps there.
            let repeat = &trace.final_config.0;
            let entry = trace
                .steps
                .iter()
                .position(|s| &s.config == repeat)
                .expect("repeated configuration is in the trace");
            let to_step = |s: &crate::engine::StepRecord| LassoStep {
                config: s.config.clone(),
                selected: s.selected.clone(),
            };
            Some(Lasso {
                stem: trace.steps[..entry].iter().map(to_step).collect(),
                cycle: trace.steps[entry..].iter().map(to_step).collect(),
            })
        }
        _ => None,
    };
    Witness {
        initial: initial.0,
        trace_prefix,
        lasso,
    }
}
