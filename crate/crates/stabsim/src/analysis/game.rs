//! Exact worst-case analysis under the distributed unfair daemon.
//!
//! The daemon's only constraint is picking a nonempty activable subset, so
//! the reachable behavior is a graph whose edges are all such choices. The
//! target set is the largest predicate-closed set (greatest fixpoint);
//! backward induction over the out-of-target subgraph gives the worst number
//! of steps the daemon can keep the system out, and any out-of-target cycle
//! is a constructive refutation of stabilization, reported as a lasso.

use crate::daemons::DaemonError;
use crate::engine::{Configuration, NodeId, ProtocolDef, Stepper};
use crate::topology::Graph;

use super::{
    AnalysisError, ConfigSpace, Lasso, LassoStep, Method, StabTime, StabilizationReport, Witness,
};

/// Size guards for the game construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameBudget {
    pub max_states: u64,
    pub max_edges: u64,
}

impl Default for GameBudget {
    fn default() -> Self {
        GameBudget {
            max_states: 200_000,
            max_edges: 5_000_000,
        }
    }
}

/// Outcome of the closure verification of a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureOutcome {
    Closed,
    Counterexample {
        config: Vec<i32>,
        selected: Vec<NodeId>,
        successor: Vec<i32>,
    },
}

impl ClosureOutcome {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosureOutcome::Closed)
    }
}

/// Outcome of the starvation search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarvationOutcome {
    Ok,
    Starvation { node: NodeId, lasso: Lasso },
}

impl StarvationOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, StarvationOutcome::Ok)
    }
}

/// Full result of the unfair-daemon game search.
#[derive(Debug, Clone)]
pub struct GameAnalysis {
    pub report: StabilizationReport,
    /// Size of the greatest predicate-closed set.
    pub target_size: u64,
    pub states: u64,
    /// Starvation check restricted to the target set.
    pub starvation: StarvationOutcome,
}

/// The per-configuration move table: each edge is one daemon choice, stored
/// in mask order so edge slot `i` of a configuration corresponds to choice
/// mask `i + 1` over its sorted activable set.
struct MoveTable {
    offsets: Vec<u64>,
    targets: Vec<u32>,
}

impl MoveTable {
    fn successors(&self, state: usize) -> &[u32] {
        &self.targets[self.offsets[state] as usize..self.offsets[state + 1] as usize]
    }
}

fn build_moves(
    p: &ProtocolDef,
    g: &Graph,
    space: &ConfigSpace,
    size: u64,
    budget: &GameBudget,
) -> Result<MoveTable, AnalysisError> {
    let mut stepper = Stepper::new(p, g);
    let mut offsets = Vec::with_capacity(size as usize + 1);
    let mut targets: Vec<u32> = Vec::new();
    offsets.push(0u64);
    let mut cfg = Configuration(vec![0; p.n]);
    let mut actions: Vec<(usize, i32)> = Vec::new();
    let mut succ = Configuration(vec![0; p.n]);
    for idx in 0..size {
        space.config_at(idx, &mut cfg);
        actions.clear();
        for v in 0..p.n {
            if let Some(rule) = stepper.first_enabled(&cfg, v) {
                actions.push((v, stepper.action_value(&cfg, v, rule)));
            }
        }
        let m = actions.len();
        if m > 0 {
            if m > 63 {
                return Err(AnalysisError::Daemon(DaemonError::SubsetTooLarge { m }));
            }
            let choices = (1u64 << m) - 1;
            if targets.len() as u64 + choices > budget.max_edges {
                return Err(AnalysisError::EdgeBudget {
                    budget: budget.max_edges,
                });
            }
            for mask in 1..=choices {
                succ.0.copy_from_slice(&cfg.0);
                for (bit, &(v, value)) in actions.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        succ.0[v] = value;
                    }
                }
                targets.push(space.index_of(&succ) as u32);
            }
        }
        offsets.push(targets.len() as u64);
    }
    Ok(MoveTable { offsets, targets })
}

/// Greatest fixpoint of `pred /\ all-successors-in-set`, via a removal
/// worklist over reverse edges.
fn greatest_closed_set(size: usize, moves: &MoveTable, pred: &[bool]) -> Vec<bool> {
    let mut in_degree_offsets = vec![0u64; size + 1];
    for &t in &moves.targets {
        in_degree_offsets[t as usize + 1] += 1;
    }
    for i in 0..size {
        in_degree_offsets[i + 1] += in_degree_offsets[i];
    }
    let mut rev = vec![0u32; moves.targets.len()];
    let mut cursor = in_degree_offsets.clone();
    for s in 0..size {
        for &t in moves.successors(s) {
            rev[cursor[t as usize] as usize] = s as u32;
            cursor[t as usize] += 1;
        }
    }
    let mut in_set = pred.to_vec();
    let mut queue: Vec<u32> = (0..size as u32).filter(|&s| !in_set[s as usize]).collect();
    while let Some(removed) = queue.pop() {
        let lo = in_degree_offsets[removed as usize] as usize;
        let hi = in_degree_offsets[removed as usize + 1] as usize;
        for &parent in &rev[lo..hi] {
            if in_set[parent as usize] {
                in_set[parent as usize] = false;
                queue.push(parent);
            }
        }
    }
    in_set
}

/// Selection of choice-mask `mask` over the activable set of `cfg`.
fn selection_for(stepper: &mut Stepper, cfg: &Configuration, n: usize, mask: u64) -> Vec<NodeId> {
    let activable: Vec<NodeId> = (0..n)
        .filter(|&v| stepper.first_enabled(cfg, v).is_some())
        .collect();
    activable
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask >> bit & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Verifies the closure of `pred`: every configuration satisfying it has all
/// daemon-choice successors satisfying it too. Returns the first
/// counterexample in enumeration order.
pub fn closure_check(
    p: &ProtocolDef,
    g: &Graph,
    pred: &dyn Fn(&Configuration) -> bool,
    max_states: u64,
) -> Result<ClosureOutcome, AnalysisError> {
    let space = ConfigSpace::new(p);
    let size = space.size_within(max_states)?;
    let mut stepper = Stepper::new(p, g);
    let mut cfg = Configuration(vec![0; p.n]);
    let mut succ = Configuration(vec![0; p.n]);
    let mut actions: Vec<(usize, i32)> = Vec::new();
    for idx in 0..size {
        space.config_at(idx, &mut cfg);
        if !pred(&cfg) {
            continue;
        }
        actions.clear();
        for v in 0..p.n {
            if let Some(rule) = stepper.first_enabled(&cfg, v) {
                actions.push((v, stepper.action_value(&cfg, v, rule)));
            }
        }
        let m = actions.len();
        if m == 0 {
            continue;
        }
        if m > 63 {
            return Err(AnalysisError::Daemon(DaemonError::SubsetTooLarge { m }));
        }
        for mask in 1..(1u64 << m) {
            succ.0.copy_from_slice(&cfg.0);
            for (bit, &(v, value)) in actions.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    succ.0[v] = value;
                }
            }
            if !pred(&succ) {
                let selected = actions
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| mask >> bit & 1 == 1)
                    .map(|(_, &(v, _))| v)
                    .collect();
                return Ok(ClosureOutcome::Counterexample {
                    config: cfg.0.clone(),
                    selected,
                    successor: succ.0.clone(),
                });
            }
        }
    }
    Ok(ClosureOutcome::Closed)
}

/// DFS colors for the longest-path pass.
const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

struct LongestPath {
    color: Vec<u8>,
    /// Worst steps to reach the target from each out-of-target state.
    w: Vec<u64>,
}

enum PathResult {
    Acyclic,
    /// DFS stack at the moment a gray state was re-entered: pairs of
    /// (state, edge slot taken).
    CycleFound {
        stack: Vec<(u32, u64)>,
        entry: u32,
    },
}

/// Longest-path-to-target over the out-of-target subgraph; detects cycles.
fn longest_paths(size: usize, moves: &MoveTable, in_target: &[bool]) -> (LongestPath, PathResult) {
    let mut state = LongestPath {
        color: vec![WHITE; size],
        w: vec![0; size],
    };
    // frames: (state, next edge slot to examine, best successor value)
    let mut frames: Vec<(u32, u64, u64)> = Vec::new();
    for root in 0..size {
        if in_target[root] || state.color[root] != WHITE {
            continue;
        }
        frames.clear();
        state.color[root] = GRAY;
        frames.push((root as u32, 0, 0));
        while !frames.is_empty() {
            let top = frames.len() - 1;
            let (s, slot) = (frames[top].0, frames[top].1);
            let succs = moves.successors(s as usize);
            if slot as usize == succs.len() {
                let w = frames[top].2 + 1;
                state.w[s as usize] = w;
                state.color[s as usize] = BLACK;
                frames.pop();
                if let Some(parent) = frames.last_mut() {
                    parent.2 = parent.2.max(w);
                }
                continue;
            }
            frames[top].1 += 1;
            let t = succs[slot as usize] as usize;
            if in_target[t] {
                // reaching the target contributes 0
                continue;
            }
            match state.color[t] {
                BLACK => {
                    let w = state.w[t];
                    frames[top].2 = frames[top].2.max(w);
                }
                GRAY => {
                    // every frame's slot was advanced past the edge it took
                    let stack = frames
                        .iter()
                        .map(|&(fs, fslot, _)| (fs, fslot - 1))
                        .collect();
                    return (
                        state,
                        PathResult::CycleFound {
                            stack,
                            entry: t as u32,
                        },
                    );
                }
                _ => {
                    state.color[t] = GRAY;
                    frames.push((t as u32, 0, 0));
                }
            }
        }
    }
    (state, PathResult::Acyclic)
}

fn lasso_from_stack(
    p: &ProtocolDef,
    g: &Graph,
    space: &ConfigSpace,
    stack: &[(u32, u64)],
    entry: u32,
) -> Lasso {
    let mut stepper = Stepper::new(p, g);
    let entry_pos = stack
        .iter()
        .position(|&(s, _)| s == entry)
        .expect("cycle entry is on the DFS stack");
    let mut step_of = |&(s, slot): &(u32, u64)| {
        let mut cfg = Configuration(vec![0; p.n]);
        space.config_at(s as u64, &mut cfg);
        let selected = selection_for(&mut stepper, &cfg, p.n, slot + 1);
        LassoStep {
            config: cfg.0,
            selected,
        }
    };
    Lasso {
        stem: stack[..entry_pos].iter().map(&mut step_of).collect(),
        cycle: stack[entry_pos..].iter().map(&mut step_of).collect(),
    }
}

/// Exact worst-case stabilization under the distributed unfair daemon.
///
/// Builds the full game graph, takes the greatest `pred`-closed set as the
/// target, and computes the worst number of steps to enter it. Any cycle
/// (or deadlock) outside the target refutes stabilization: the result is
/// `Infinite` with a lasso witness. The returned liveness flag comes from a
/// starvation search inside the target.
pub fn did_worst_case(
    p: &ProtocolDef,
    g: &Graph,
    graph_label: &str,
    pred: &dyn Fn(&Configuration) -> bool,
    budget: &GameBudget,
) -> Result<GameAnalysis, AnalysisError> {
    let space = ConfigSpace::new(p);
    let size = space.size_within(budget.max_states)?;
    let moves = build_moves(p, g, &space, size, budget)?;
    let mut cfg = Configuration(vec![0; p.n]);
    let pred_bits: Vec<bool> = (0..size)
        .map(|idx| {
            space.config_at(idx, &mut cfg);
            pred(&cfg)
        })
        .collect();
    let in_target = greatest_closed_set(size as usize, &moves, &pred_bits);
    let target_size = in_target.iter().filter(|&&b| b).count() as u64;

    // A deadlock outside the target can never re-enter it.
    let deadlock_outside = (0..size as usize)
        .find(|&s| !in_target[s] && moves.successors(s).is_empty());

    let (stab_time, witness) = if let Some(dead) = deadlock_outside {
        let mut dead_cfg = Configuration(vec![0; p.n]);
        space.config_at(dead as u64, &mut dead_cfg);
        (
            StabTime::Infinite,
            Some(Witness {
                initial: dead_cfg.0,
                trace_prefix: Vec::new(),
                lasso: None,
            }),
        )
    } else {
        let (paths, result) = longest_paths(size as usize, &moves, &in_target);
        match result {
            PathResult::CycleFound { stack, entry } => {
                let lasso = lasso_from_stack(p, g, &space, &stack, entry);
                let initial = lasso
                    .stem
                    .first()
                    .unwrap_or_else(|| &lasso.cycle[0])
                    .config
                    .clone();
                (
                    StabTime::Infinite,
                    Some(Witness {
                        initial,
                        trace_prefix: Vec::new(),
                        lasso: Some(lasso),
                    }),
                )
            }
            PathResult::Acyclic => {
                let mut worst = 0u64;
                let mut worst_index: Option<usize> = None;
                for s in 0..size as usize {
                    if !in_target[s] && paths.w[s] > worst {
                        worst = paths.w[s];
                        worst_index = Some(s);
                    }
                }
                let witness = worst_index.map(|s| {
                    let mut w_cfg = Configuration(vec![0; p.n]);
                    space.config_at(s as u64, &mut w_cfg);
                    Witness {
                        initial: w_cfg.0,
                        trace_prefix: Vec::new(),
                        lasso: None,
                    }
                });
                (StabTime::Finite(worst), witness)
            }
        }
    };

    let starvation = starvation_in_members(p, g, &space, &in_target)?;
    let report = StabilizationReport {
        protocol: p.name.clone(),
        graph: graph_label.to_string(),
        n: p.n,
        diam: g.diameter(),
        daemon: "did".to_string(),
        method: Method::GameSearch,
        stab_time,
        liveness_ok: starvation.is_ok(),
        witness,
    };
    Ok(GameAnalysis {
        report,
        target_size,
        states: size,
        starvation,
    })
}

/// Searches, for each node, for a cycle inside `within` along which the node
/// never acts (never executes its critical section, for mutual-exclusion
/// protocols). Such a cycle is a starvation witness: an infinite execution
/// that stays in the set while the node makes no progress.
pub fn starvation_check(
    p: &ProtocolDef,
    g: &Graph,
    within: &dyn Fn(&Configuration) -> bool,
    max_states: u64,
) -> Result<StarvationOutcome, AnalysisError> {
    let space = ConfigSpace::new(p);
    let size = space.size_within(max_states)?;
    let mut cfg = Configuration(vec![0; p.n]);
    let members: Vec<bool> = (0..size)
        .map(|idx| {
            space.config_at(idx, &mut cfg);
            within(&cfg)
        })
        .collect();
    starvation_in_members(p, g, &space, &members)
}

fn starvation_in_members(
    p: &ProtocolDef,
    g: &Graph,
    space: &ConfigSpace,
    members: &[bool],
) -> Result<StarvationOutcome, AnalysisError> {
    let size = members.len();
    let mutex = p.mutex_liveness();
    let mut stepper = Stepper::new(p, g);
    // Per-state move expansion, recomputed per visit: the subgraph differs
    // per node, so precomputing all of them would multiply memory by n.
    let expand = |idx: usize, skip_node: usize, stepper: &mut Stepper| {
        let mut cfg = Configuration(vec![0; p.n]);
        space.config_at(idx as u64, &mut cfg);
        let mut actions: Vec<(usize, i32)> = Vec::new();
        for v in 0..p.n {
            if let Some(rule) = stepper.first_enabled(&cfg, v) {
                actions.push((v, stepper.action_value(&cfg, v, rule)));
            }
        }
        let privileged_skip = mutex && stepper.is_privileged(&cfg, skip_node);
        let mut out: Vec<(u64, u32)> = Vec::new(); // (mask, successor)
        let m = actions.len();
        if m == 0 || m > 63 {
            return (out, m > 63);
        }
        let mut succ = Configuration(vec![0; p.n]);
        for mask in 1..(1u64 << m) {
            let fires = actions
                .iter()
                .enumerate()
                .any(|(bit, &(v, _))| v == skip_node && mask >> bit & 1 == 1);
            let event = if mutex { fires && privileged_skip } else { fires };
            if event {
                continue;
            }
            succ.0.copy_from_slice(&cfg.0);
            for (bit, &(v, value)) in actions.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    succ.0[v] = value;
                }
            }
            let t = space.index_of(&succ) as usize;
            if members[t] {
                out.push((mask, t as u32));
            }
        }
        (out, false)
    };

    for starved in 0..p.n {
        let mut color = vec![WHITE; size];
        // frames: (state, expanded edges, cursor)
        let mut frames: Vec<(u32, Vec<(u64, u32)>, usize)> = Vec::new();
        for root in 0..size {
            if !members[root] || color[root] != WHITE {
                continue;
            }
            let (edges, overflow) = expand(root, starved, &mut stepper);
            if overflow {
                return Err(AnalysisError::Daemon(DaemonError::SubsetTooLarge {
                    m: p.n,
                }));
            }
            color[root] = GRAY;
            frames.push((root as u32, edges, 0));
            while !frames.is_empty() {
                let top = frames.len() - 1;
                let (s, cursor) = (frames[top].0, frames[top].2);
                if cursor == frames[top].1.len() {
                    color[s as usize] = BLACK;
                    frames.pop();
                    continue;
                }
                frames[top].2 += 1;
                let (_, t) = frames[top].1[cursor];
                match color[t as usize] {
                    GRAY => {
                        // starvation lasso: cut the stack at the cycle entry
                        let entry_pos = frames
                            .iter()
                            .position(|f| f.0 == t)
                            .expect("gray state is on the stack");
                        let mut step_of = |frame: &(u32, Vec<(u64, u32)>, usize)| {
                            let mut cfg = Configuration(vec![0; p.n]);
                            space.config_at(frame.0 as u64, &mut cfg);
                            let mask = frame.1[frame.2 - 1].0;
                            let selected = selection_for(&mut stepper, &cfg, p.n, mask);
                            LassoStep {
                                config: cfg.0,
                                selected,
                            }
                        };
                        let lasso = Lasso {
                            stem: frames[..entry_pos].iter().map(&mut step_of).collect(),
                            cycle: frames[entry_pos..].iter().map(&mut step_of).collect(),
                        };
                        return Ok(StarvationOutcome::Starvation {
                            node: starved,
                            lasso,
                        });
                    }
                    WHITE => {
                        let (next_edges, overflow) = expand(t as usize, starved, &mut stepper);
                        if overflow {
                            return Err(AnalysisError::Daemon(DaemonError::SubsetTooLarge {
                                m: p.n,
                            }));
                        }
                        color[t as usize] = GRAY;
                        frames.push((t, next_edges, 0));
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(StarvationOutcome::Ok)
}
