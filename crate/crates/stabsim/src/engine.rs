//! State-model execution semantics.
//!
//! A protocol is a list of guarded rules evaluated on a node's local view:
//! its own register, its neighbors' registers, its id. A step selects a
//! nonempty set of activable nodes and executes all their actions against
//! the configuration as it stood at the start of the step, so simultaneous
//! activations never observe each other's writes.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::ClockDomain;
use crate::daemons::{DaemonError, DaemonStrategy};
use crate::topology::Graph;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("configuration has {got} registers, protocol expects {want}")]
    WrongLength { got: usize, want: usize },
    #[error("register {node} holds {value}, outside the protocol domain")]
    ValueOutOfDomain { node: NodeId, value: i32 },
    #[error("selection is empty")]
    EmptySelection,
    #[error("selected node {0} is not activable")]
    NotActivable(NodeId),
    #[error("selected node {id} out of range for n={n}")]
    NodeOutOfRange { id: NodeId, n: usize },
    #[error(transparent)]
    Daemon(#[from] DaemonError),
}

/// The vector of per-node register values; the full system state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<i32>);

impl Configuration {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// What a rule may read: the node's own register, its id, and its neighbors'
/// registers. `neighbor_values[i]` is the register of `neighbor_ids[i]`;
/// ids are sorted ascending.
pub struct LocalView<'a> {
    pub node: NodeId,
    pub own: i32,
    pub neighbor_ids: &'a [NodeId],
    pub neighbor_values: &'a [i32],
}

impl LocalView<'_> {
    /// Register value of a specific neighbor, if adjacent.
    pub fn value_of(&self, u: NodeId) -> Option<i32> {
        self.neighbor_ids
            .binary_search(&u)
            .ok()
            .map(|i| self.neighbor_values[i])
    }
}

pub type GuardFn = Box<dyn Fn(&LocalView) -> bool + Send + Sync>;
pub type ActionFn = Box<dyn Fn(&LocalView) -> i32 + Send + Sync>;

/// One guarded rule: when the guard holds on a node's local view, the action
/// computes the node's next register value.
pub struct Rule {
    pub name: &'static str,
    pub guard: GuardFn,
    pub action: ActionFn,
}

impl Rule {
    pub fn new(
        name: &'static str,
        guard: impl Fn(&LocalView) -> bool + Send + Sync + 'static,
        action: impl Fn(&LocalView) -> i32 + Send + Sync + 'static,
    ) -> Self {
        Rule {
            name,
            guard: Box::new(guard),
            action: Box::new(action),
        }
    }
}

/// Parameter metadata carried alongside the rules, for reports and for the
/// analyses that need to reconstruct the register domain structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolParams {
    Unison {
        alpha: i32,
        k: i32,
    },
    Emss {
        alpha: i32,
        k: i32,
        diam: usize,
        targets: Vec<i32>,
    },
    DijkstraRing {
        k: i32,
    },
    Custom,
}

/// A concrete protocol: rules shared by every node (guards may branch on the
/// node id), a per-node privilege predicate, the register domain, and
/// parameter metadata.
///
/// Guards are expected to be mutually exclusive per node; the engine fires
/// the first enabled rule in list order, and the sweeps assert empirically
/// that at most one is ever enabled.
pub struct ProtocolDef {
    pub name: String,
    pub n: usize,
    /// Sorted list of admissible register values.
    pub domain: Vec<i32>,
    pub rules: Vec<Rule>,
    pub privilege: GuardFn,
    pub params: ProtocolParams,
}

impl ProtocolDef {
    pub fn clock_domain(&self) -> Option<ClockDomain> {
        match self.params {
            ProtocolParams::Unison { alpha, k } | ProtocolParams::Emss { alpha, k, .. } => {
                Some(ClockDomain::new(alpha, k).expect("validated at construction"))
            }
            _ => None,
        }
    }

    /// Whether liveness events are critical-section executions (mutual
    /// exclusion protocols) as opposed to plain rule executions.
    pub fn mutex_liveness(&self) -> bool {
        matches!(
            self.params,
            ProtocolParams::Emss { .. } | ProtocolParams::DijkstraRing { .. }
        )
    }

    pub fn domain_contains(&self, value: i32) -> bool {
        self.domain.binary_search(&value).is_ok()
    }

    pub fn validate_config(&self, gamma: &Configuration) -> Result<(), EngineError> {
        if gamma.len() != self.n {
            return Err(EngineError::WrongLength {
                got: gamma.len(),
                want: self.n,
            });
        }
        for (node, &value) in gamma.0.iter().enumerate() {
            if !self.domain_contains(value) {
                return Err(EngineError::ValueOutOfDomain { node, value });
            }
        }
        Ok(())
    }
}

/// Reusable evaluation context: owns the scratch buffer for neighbor values
/// so per-node guard evaluation allocates nothing.
pub struct Stepper<'a> {
    protocol: &'a ProtocolDef,
    graph: &'a Graph,
    buf: Vec<i32>,
}

impl<'a> Stepper<'a> {
    pub fn new(protocol: &'a ProtocolDef, graph: &'a Graph) -> Self {
        debug_assert_eq!(protocol.n, graph.n());
        Stepper {
            protocol,
            graph,
            buf: Vec::with_capacity(8),
        }
    }

    fn with_view<R>(&mut self, gamma: &Configuration, v: NodeId, f: impl FnOnce(&LocalView) -> R) -> R {
        let ids = self.graph.neighbors(v);
        self.buf.clear();
        self.buf.extend(ids.iter().map(|&u| gamma.0[u]));
        let view = LocalView {
            node: v,
            own: gamma.0[v],
            neighbor_ids: ids,
            neighbor_values: &self.buf,
        };
        f(&view)
    }

    /// Index of the first enabled rule for `v`, in rule list order.
    pub fn first_enabled(&mut self, gamma: &Configuration, v: NodeId) -> Option<usize> {
        let rules = &self.protocol.rules;
        self.with_view(gamma, v, |view| rules.iter().position(|r| (r.guard)(view)))
    }

    /// Indices of every enabled rule for `v`; used by the exclusivity sweeps.
    pub fn enabled_rules(&mut self, gamma: &Configuration, v: NodeId) -> Vec<usize> {
        let rules = &self.protocol.rules;
        self.with_view(gamma, v, |view| {
            rules
                .iter()
                .enumerate()
                .filter(|(_, r)| (r.guard)(view))
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// The value `v`'s rule would write, evaluated against `gamma`.
    pub fn action_value(&mut self, gamma: &Configuration, v: NodeId, rule: usize) -> i32 {
        let rules = &self.protocol.rules;
        self.with_view(gamma, v, |view| (rules[rule].action)(view))
    }

    pub fn is_privileged(&mut self, gamma: &Configuration, v: NodeId) -> bool {
        let privilege = &self.protocol.privilege;
        self.with_view(gamma, v, |view| privilege(view))
    }

    /// One synchronous step into `next`, invoking `observe(v, activable,
    /// privileged)` for every node. The caller guarantees `next` has the
    /// right length.
    pub fn sync_step_observe(
        &mut self,
        gamma: &Configuration,
        next: &mut Configuration,
        mut observe: impl FnMut(NodeId, bool, bool),
    ) {
        debug_assert_eq!(next.len(), self.protocol.n);
        for v in 0..self.protocol.n {
            let (new_value, activable, privileged) = {
                let ids = self.graph.neighbors(v);
                self.buf.clear();
                self.buf.extend(ids.iter().map(|&u| gamma.0[u]));
                let view = LocalView {
                    node: v,
                    own: gamma.0[v],
                    neighbor_ids: ids,
                    neighbor_values: &self.buf,
                };
                let fired = self.protocol.rules.iter().find(|r| (r.guard)(&view));
                let privileged = (self.protocol.privilege)(&view);
                match fired {
                    Some(rule) => ((rule.action)(&view), true, privileged),
                    None => (view.own, false, privileged),
                }
            };
            next.0[v] = new_value;
            observe(v, activable, privileged);
        }
    }
}

/// The set of nodes with at least one true guard, ascending.
pub fn activable_set(p: &ProtocolDef, g: &Graph, gamma: &Configuration) -> Vec<NodeId> {
    let mut stepper = Stepper::new(p, g);
    (0..p.n)
        .filter(|&v| stepper.first_enabled(gamma, v).is_some())
        .collect()
}

/// The set of privileged nodes, ascending.
pub fn privileged_set(p: &ProtocolDef, g: &Graph, gamma: &Configuration) -> Vec<NodeId> {
    let mut stepper = Stepper::new(p, g);
    (0..p.n)
        .filter(|&v| stepper.is_privileged(gamma, v))
        .collect()
}

/// Executes one atomic step: every selected node's action is evaluated
/// against `gamma` (start-of-step snapshot), unselected nodes keep their
/// registers.
pub fn apply_step(
    p: &ProtocolDef,
    g: &Graph,
    gamma: &Configuration,
    selected: &[NodeId],
) -> Result<Configuration, EngineError> {
    if selected.is_empty() {
        return Err(EngineError::EmptySelection);
    }
    let mut stepper = Stepper::new(p, g);
    let mut next = gamma.clone();
    for &v in selected {
        if v >= p.n {
            return Err(EngineError::NodeOutOfRange { id: v, n: p.n });
        }
        let rule = stepper
            .first_enabled(gamma, v)
            .ok_or(EngineError::NotActivable(v))?;
        next.0[v] = stepper.action_value(gamma, v, rule);
    }
    Ok(next)
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// A configuration repeated under a deterministic memoryless daemon:
    /// the whole future of the execution is determined, nothing new can
    /// be observed.
    Stabilized,
    /// The step budget ran out.
    Budget,
    /// No node was activable.
    Deadlock,
    /// The daemon declared a stop (e.g. a script ran out).
    Stopped,
}

/// One recorded step: the pre-step configuration, who was selected, who was
/// privileged, and who executed its critical section (privileged and
/// selected).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub selected: Vec<NodeId>,
    pub config: Vec<i32>,
    pub privileged: Vec<NodeId>,
    pub cs: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub steps: Vec<StepRecord>,
    pub final_config: Configuration,
    pub status: RunStatus,
}

impl ExecutionTrace {
    /// JSON Lines rendering: one record per step, then a terminal record
    /// carrying the status.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.steps {
            out.push_str(&serde_json::to_string(record).expect("trace serializes"));
            out.push('\n');
        }
        #[derive(Serialize)]
        struct Terminal<'a> {
            status: &'a RunStatus,
        }
        out.push_str(&serde_json::to_string(&Terminal { status: &self.status }).expect("status serializes"));
        out.push('\n');
        out
    }
}

/// Runs `p` from `gamma0`, querying `daemon` each step, for at most
/// `max_steps` steps.
///
/// Deadlock is a reported outcome, not an error: detecting that it cannot
/// happen is itself a verification result. Under a deterministic memoryless
/// daemon the run also stops as soon as a configuration repeats.
pub fn run(
    p: &ProtocolDef,
    g: &Graph,
    gamma0: &Configuration,
    daemon: &mut DaemonStrategy,
    max_steps: u64,
) -> Result<ExecutionTrace, EngineError> {
    p.validate_config(gamma0)?;
    let mut gamma = gamma0.clone();
    let mut seen: Option<HashSet<Vec<i32>>> = daemon
        .memoryless_deterministic()
        .then(HashSet::new);
    let mut steps: Vec<StepRecord> = Vec::new();
    let status = loop {
        if let Some(seen) = seen.as_mut() {
            if !seen.insert(gamma.0.clone()) {
                break RunStatus::Stabilized;
            }
        }
        if steps.len() as u64 >= max_steps {
            break RunStatus::Budget;
        }
        let activable = activable_set(p, g, &gamma);
        if activable.is_empty() {
            break RunStatus::Deadlock;
        }
        let selected = match daemon.select(&gamma, &activable)? {
            Some(s) => s,
            None => break RunStatus::Stopped,
        };
        debug_assert!(!selected.is_empty());
        debug_assert!(selected.iter().all(|v| activable.contains(v)));
        let privileged = privileged_set(p, g, &gamma);
        let cs: Vec<NodeId> = privileged
            .iter()
            .copied()
            .filter(|v| selected.contains(v))
            .collect();
        let next = apply_step(p, g, &gamma, &selected)?;
        steps.push(StepRecord {
            step: steps.len() as u64,
            selected,
            config: gamma.0.clone(),
            privileged,
            cs,
        });
        gamma = next;
    };
    Ok(ExecutionTrace {
        steps,
        final_config: gamma,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{make_emss, make_unison, UnisonParams};
    use crate::topology::GraphKind;
    use proptest::prelude::*;

    fn line2() -> (ProtocolDef, Graph) {
        let g = Graph::generate(GraphKind::Line(2)).unwrap();
        let p = make_emss(&g).unwrap();
        (p, g)
    }

    #[test]
    fn conv_step_enables_both_nodes_from_deep_tail() {
        let (p, g) = line2();
        // alpha = 2 here, so (-2,-2) is the deepest tail configuration.
        let gamma = Configuration(vec![-2, -2]);
        assert_eq!(activable_set(&p, &g, &gamma), vec![0, 1]);
        let mut stepper = Stepper::new(&p, &g);
        for v in 0..2 {
            let rule = stepper.first_enabled(&gamma, v).unwrap();
            assert_eq!(p.rules[rule].name, "CA");
        }
    }

    #[test]
    fn all_equal_correct_clocks_enable_every_node_normally() {
        let (p, g) = line2();
        for value in [0, 3, 7] {
            let gamma = Configuration(vec![value, value]);
            assert_eq!(activable_set(&p, &g, &gamma), vec![0, 1]);
            let mut stepper = Stepper::new(&p, &g);
            for v in 0..2 {
                let rule = stepper.first_enabled(&gamma, v).unwrap();
                assert_eq!(p.rules[rule].name, "NA");
            }
        }
    }

    #[test]
    fn incoherent_neighbor_triggers_reset_rule() {
        let (p, g) = line2();
        // Node 0 in the correct range but not locally comparable to node 1.
        let gamma = Configuration(vec![5, 2]);
        let mut stepper = Stepper::new(&p, &g);
        let rule = stepper.first_enabled(&gamma, 0).unwrap();
        assert_eq!(p.rules[rule].name, "RA");
        assert!(activable_set(&p, &g, &gamma).contains(&0));
    }

    #[test]
    fn apply_step_snapshot_semantics() {
        let (p, g) = line2();
        let gamma = Configuration(vec![-2, -2]);
        assert_eq!(
            apply_step(&p, &g, &gamma, &[0, 1]).unwrap(),
            Configuration(vec![-1, -1])
        );
        assert_eq!(
            apply_step(&p, &g, &gamma, &[0]).unwrap(),
            Configuration(vec![-1, -2])
        );
    }

    #[test]
    fn apply_step_rejects_bad_selections() {
        let (p, g) = line2();
        let gamma = Configuration(vec![-2, -2]);
        assert_eq!(
            apply_step(&p, &g, &gamma, &[]),
            Err(EngineError::EmptySelection)
        );
        // A node with no enabled guard: node 1 at value 3 next to -2 is in
        // the correct range next to an incomparable neighbor, so RA fires;
        // pick a frozen node instead: value 0 next to 3.
        let frozen = Configuration(vec![0, 3]);
        let mut stepper = Stepper::new(&p, &g);
        assert!(stepper.first_enabled(&frozen, 0).is_none());
        assert_eq!(
            apply_step(&p, &g, &frozen, &[0]),
            Err(EngineError::NotActivable(0))
        );
    }

    #[test]
    fn validate_config_errors() {
        let (p, _g) = line2();
        assert_eq!(
            p.validate_config(&Configuration(vec![0])),
            Err(EngineError::WrongLength { got: 1, want: 2 })
        );
        assert_eq!(
            p.validate_config(&Configuration(vec![0, 99])),
            Err(EngineError::ValueOutOfDomain { node: 1, value: 99 })
        );
    }

    #[test]
    fn sync_run_advances_lockstep_and_stabilizes() {
        let (p, g) = line2();
        let mut daemon = DaemonStrategy::Synchronous;
        let trace = run(&p, &g, &Configuration(vec![-2, -2]), &mut daemon, 1000).unwrap();
        assert_eq!(trace.status, RunStatus::Stabilized);
        let configs: Vec<Vec<i32>> = trace.steps.iter().map(|s| s.config.clone()).collect();
        assert_eq!(&configs[0..4], &[vec![-2, -2], vec![-1, -1], vec![0, 0], vec![1, 1]]);
        // After entering the cycle the orbit closes at the first repeat.
        assert_eq!(trace.final_config, Configuration(vec![0, 0]));
    }

    #[test]
    fn zero_budget_yields_empty_trace() {
        let (p, g) = line2();
        let mut daemon = DaemonStrategy::Synchronous;
        let trace = run(&p, &g, &Configuration(vec![0, 0]), &mut daemon, 0).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.status, RunStatus::Budget);
    }

    #[test]
    fn cs_recorded_when_privileged_node_selected() {
        let (p, g) = line2();
        // Targets on line(2) are 4 and 6; start both at their targets.
        let mut daemon = DaemonStrategy::Synchronous;
        let trace = run(&p, &g, &Configuration(vec![4, 6]), &mut daemon, 100).unwrap();
        assert_eq!(trace.steps[0].privileged, vec![0, 1]);
        assert_eq!(trace.steps[0].cs, vec![0, 1]);
        assert_eq!(trace.steps[1].config, vec![-2, -2]);
    }

    #[test]
    fn jsonl_format_is_pinned() {
        let trace = ExecutionTrace {
            steps: vec![StepRecord {
                step: 0,
                selected: vec![0, 1],
                config: vec![4, 6],
                privileged: vec![0, 1],
                cs: vec![0, 1],
            }],
            final_config: Configuration(vec![-2, -2]),
            status: RunStatus::Budget,
        };
        assert_eq!(
            trace.to_jsonl(),
            "{\"step\":0,\"selected\":[0,1],\"config\":[4,6],\"privileged\":[0,1],\"cs\":[0,1]}\n{\"status\":\"budget\"}\n"
        );
    }

    #[test]
    fn exhaustive_guard_exclusivity_and_no_deadlock_on_tiny_instances() {
        let cases: Vec<(ProtocolDef, Graph)> = vec![
            line2(),
            {
                let g = Graph::generate(GraphKind::Ring(3)).unwrap();
                let p = make_unison(&g, UnisonParams { alpha: 1, k: 4 }).unwrap();
                (p, g)
            },
        ];
        for (p, g) in cases {
            let mut stepper = Stepper::new(&p, &g);
            let mut gamma = Configuration(vec![0; p.n]);
            let domain = p.domain.clone();
            let mut idx = vec![0usize; p.n];
            loop {
                for v in 0..p.n {
                    gamma.0[v] = domain[idx[v]];
                }
                let mut any = false;
                for v in 0..p.n {
                    let enabled = stepper.enabled_rules(&gamma, v);
                    assert!(enabled.len() <= 1, "{} guards at {:?} node {v}", enabled.len(), gamma);
                    any |= !enabled.is_empty();
                }
                assert!(any, "deadlock at {:?} under {}", gamma, p.name);
                // next configuration in mixed-radix order
                let mut pos = 0;
                loop {
                    if pos == p.n {
                        return;
                    }
                    idx[pos] += 1;
                    if idx[pos] < domain.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn frame_rule_and_merge_property(
            seed in 0u64..5000,
            raw in proptest::collection::vec(-2i32..=7, 2),
        ) {
            let (p, g) = line2();
            let gamma = Configuration(raw);
            prop_assume!(p.validate_config(&gamma).is_ok());
            let activable = activable_set(&p, &g, &gamma);
            prop_assume!(!activable.is_empty());
            // pick a nonempty subset from the seed
            let mask = (seed % ((1 << activable.len()) - 1)) + 1;
            let selected: Vec<NodeId> = activable
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            let next = apply_step(&p, &g, &gamma, &selected).unwrap();
            // frame rule: unselected registers unchanged
            for v in 0..p.n {
                if !selected.contains(&v) {
                    prop_assert_eq!(next.0[v], gamma.0[v]);
                }
            }
            // merge property: the joint step equals merged single-node steps
            for &v in &selected {
                let single = apply_step(&p, &g, &gamma, &[v]).unwrap();
                prop_assert_eq!(single.0[v], next.0[v]);
            }
        }
    }

    #[test]
    fn sync_runs_are_bit_identical() {
        let (p, g) = line2();
        let gamma = Configuration(vec![5, 2]);
        let mut d1 = DaemonStrategy::Synchronous;
        let mut d2 = DaemonStrategy::Synchronous;
        let t1 = run(&p, &g, &gamma, &mut d1, 500).unwrap();
        let t2 = run(&p, &g, &gamma, &mut d2, 500).unwrap();
        assert_eq!(t1.to_jsonl(), t2.to_jsonl());
    }
}
