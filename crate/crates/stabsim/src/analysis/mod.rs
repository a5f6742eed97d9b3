//! Stabilization measurement and exhaustive verification.
//!
//! Two exact procedures, both at desk scale:
//!
//! * under the synchronous daemon executions are deterministic, so the
//!   stabilization time of an initial configuration is read off its orbit
//!   (tail plus cycle, found by exact-state memoization);
//! * under the distributed unfair daemon the adversary picks any nonempty
//!   activable subset each step, so worst cases come from a game search
//!   over the full configuration space: the target set is the largest
//!   predicate-closed set, and backward induction yields the worst number
//!   of steps the adversary can keep the system outside it.

mod game;
mod sync;

pub use game::{
    closure_check, did_worst_case, starvation_check, ClosureOutcome, GameAnalysis, GameBudget,
    StarvationOutcome,
};
pub use sync::{sync_stab_time, sync_worst_case, SweepMode, SyncOutcome, DEFAULT_SYNC_BUDGET};

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::daemons::DaemonError;
use crate::engine::{privileged_set, Configuration, EngineError, NodeId, ProtocolDef};
use crate::topology::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("configuration space of {size} states exceeds the budget of {budget}")]
    StateBudget { size: u128, budget: u64 },
    #[error("game graph exceeds the edge budget of {budget}")]
    EdgeBudget { budget: u64 },
    #[error("analysis supports at most {limit} nodes, graph has {n}")]
    TooManyNodes { n: usize, limit: usize },
    #[error("predicate requires a clock-based protocol")]
    NeedsClock,
    #[error("reports compare different protocol/graph instances")]
    MismatchedReports,
    #[error(transparent)]
    Daemon(#[from] DaemonError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A measured stabilization time: an exact step count, provably never
/// (a violating or starving cycle exists), or out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabTime {
    Finite(u64),
    Infinite,
    Unknown,
}

impl StabTime {
    /// Worst-case merge: infinity dominates, an exhausted budget poisons
    /// any finite value.
    pub fn merge_worst(self, other: StabTime) -> StabTime {
        if self.rank() >= other.rank() {
            self
        } else {
            other
        }
    }

    fn rank(self) -> (u8, u64) {
        match self {
            StabTime::Finite(x) => (0, x),
            StabTime::Unknown => (1, 0),
            StabTime::Infinite => (2, 0),
        }
    }

    /// Strict worst-case order; `Unknown` compares above every finite value
    /// (the truth could be anything at least as large).
    pub fn worse_than(self, other: StabTime) -> bool {
        self.rank() > other.rank()
    }

    pub fn is_finite(self) -> bool {
        matches!(self, StabTime::Finite(_))
    }

    pub fn as_finite(self) -> Option<u64> {
        match self {
            StabTime::Finite(x) => Some(x),
            _ => None,
        }
    }
}

impl Serialize for StabTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StabTime::Finite(x) => serializer.serialize_u64(*x),
            StabTime::Infinite => serializer.serialize_str("inf"),
            StabTime::Unknown => serializer.serialize_str("unknown"),
        }
    }
}

impl fmt::Display for StabTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabTime::Finite(x) => write!(f, "{x}"),
            StabTime::Infinite => write!(f, "inf"),
            StabTime::Unknown => write!(f, "unknown"),
        }
    }
}

/// How a report was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
    GameSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exhaustive => write!(f, "exhaustive"),
            Method::Sampled { count, seed } => write!(f, "sampled({count},{seed})"),
            Method::GameSearch => write!(f, "game_search"),
        }
    }
}

/// One step of a lasso witness: the configuration and the daemon's choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LassoStep {
    pub config: Vec<i32>,
    pub selected: Vec<NodeId>,
}

/// A reachable cycle witnessing an infinite execution: `stem` leads from an
/// initial configuration to the cycle, `cycle` loops back to its own first
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lasso {
    pub stem: Vec<LassoStep>,
    pub cycle: Vec<LassoStep>,
}

/// The worst initial configuration found, with enough of its execution to
/// replay the measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub initial: Vec<i32>,
    /// Synchronous configurations from the witness up to the measured
    /// stabilization step (capped for very long prefixes).
    pub trace_prefix: Vec<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso: Option<Lasso>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizationReport {
    pub protocol: String,
    pub graph: String,
    pub n: usize,
    pub diam: usize,
    pub daemon: String,
    pub method: Method,
    pub stab_time: StabTime,
    pub liveness_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Comparison of the same protocol's worst cases under a strong and a weak
/// daemon; the ratio is the speculation quality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeculationReport {
    pub protocol: String,
    pub graph: String,
    pub strong_daemon: String,
    pub weak_daemon: String,
    pub stab_time_strong: StabTime,
    pub stab_time_weak: StabTime,
    /// `strong / weak` when both are finite; `None` renders as "undefined".
    pub ratio: Option<f64>,
    /// Expected asymptotic shape of the ratio for this protocol family.
    pub claimed_f: String,
    /// `ceil(diam/2)`, the tight synchronous bound.
    pub sync_bound: u64,
    pub sync_matches_bound: Option<bool>,
    /// `strong / (diam * n^3)` when finite: the implied constant of the
    /// unfair-daemon bound.
    pub did_constant: Option<f64>,
}

/// Builds the speculation comparison from two reports of the same instance.
///
/// `weak` must be the weaker daemon's report (its executions are a subset
/// of the strong daemon's), so `ratio >= 1` is the expected shape.
pub fn speculation_report(
    strong: &StabilizationReport,
    weak: &StabilizationReport,
) -> Result<SpeculationReport, AnalysisError> {
    if strong.protocol != weak.protocol || strong.graph != weak.graph || strong.n != weak.n {
        return Err(AnalysisError::MismatchedReports);
    }
    let ratio = match (strong.stab_time, weak.stab_time) {
        (StabTime::Finite(s), StabTime::Finite(w)) => {
            if w == 0 {
                if s == 0 {
                    Some(1.0)
                } else {
                    None
                }
            } else {
                Some(s as f64 / w as f64)
            }
        }
        _ => None,
    };
    let sync_bound = (strong.diam as u64).div_ceil(2);
    let sync_matches_bound = weak.stab_time.as_finite().map(|w| w == sync_bound);
    let did_constant = strong.stab_time.as_finite().map(|s| {
        let scale = (strong.diam as f64) * (strong.n as f64).powi(3);
        s as f64 / scale
    });
    Ok(SpeculationReport {
        protocol: strong.protocol.clone(),
        graph: strong.graph.clone(),
        strong_daemon: strong.daemon.clone(),
        weak_daemon: weak.daemon.clone(),
        stab_time_strong: strong.stab_time,
        stab_time_weak: weak.stab_time,
        ratio,
        claimed_f: "n^3".to_string(),
        sync_bound,
        sync_matches_bound,
        did_constant,
    })
}

/// The two specification predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegitimacyPredicate {
    /// Every clock correct and neighboring clocks within circular distance 1.
    Gamma1,
    /// At most one privileged node.
    EmSafety,
}

impl LegitimacyPredicate {
    /// Compiles the predicate into a configuration test for one instance.
    pub fn compile<'a>(
        &self,
        p: &'a ProtocolDef,
        g: &'a Graph,
    ) -> Result<Box<dyn Fn(&Configuration) -> bool + Send + Sync + 'a>, AnalysisError> {
        match self {
            LegitimacyPredicate::Gamma1 => {
                let dom = p.clock_domain().ok_or(AnalysisError::NeedsClock)?;
                Ok(Box::new(move |gamma: &Configuration| {
                    gamma.0.iter().all(|&c| dom.in_stab(c))
                        && g.edges()
                            .iter()
                            .all(|&(u, w)| dom.distance(gamma.0[u], gamma.0[w]) <= 1)
                }))
            }
            LegitimacyPredicate::EmSafety => Ok(Box::new(move |gamma: &Configuration| {
                privileged_set(p, g, gamma).len() <= 1
            })),
        }
    }
}

/// Dense indexing of the full configuration space `domain^n`, with node 0 as
/// the least significant digit.
pub struct ConfigSpace {
    n: usize,
    domain: Vec<i32>,
}

impl ConfigSpace {
    pub fn new(p: &ProtocolDef) -> Self {
        ConfigSpace {
            n: p.n,
            domain: p.domain.clone(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u128 {
        (self.domain.len() as u128).pow(self.n as u32)
    }

    /// Checks the space fits the budget and returns its size.
    pub fn size_within(&self, budget: u64) -> Result<u64, AnalysisError> {
        let size = self.size();
        if size > budget as u128 {
            Err(AnalysisError::StateBudget { size, budget })
        } else {
            Ok(size as u64)
        }
    }

    pub fn config_at(&self, mut index: u64, out: &mut Configuration) {
        debug_assert_eq!(out.len(), self.n);
        let d = self.domain.len() as u64;
        for v in 0..self.n {
            out.0[v] = self.domain[(index % d) as usize];
            index /= d;
        }
        debug_assert_eq!(index, 0);
    }

    pub fn index_of(&self, gamma: &Configuration) -> u64 {
        let d = self.domain.len() as u64;
        let mut index = 0u64;
        for v in (0..self.n).rev() {
            let pos = self
                .domain
                .binary_search(&gamma.0[v])
                .expect("value inside protocol domain") as u64;
            index = index * d + pos;
        }
        index
    }
}
