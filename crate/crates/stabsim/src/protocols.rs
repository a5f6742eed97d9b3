//! Concrete protocol constructors.
//!
//! `make_unison` builds the self-stabilizing bounded-clock unison: a node
//! resets on any local incoherence, and otherwise increments only when its
//! clock is locally minimal. `make_emss` is the same protocol with a
//! specific clock size and a privilege predicate on top: the clock cycle is
//! made long enough that distinct nodes' privilege targets are further apart
//! than any two clocks can drift once the unison has converged, so at most
//! one node is ever privileged in a legitimate configuration. The privilege
//! predicate reads only the node's own register and never interferes with
//! the rules. `make_dijkstra` is the classic token ring used as the
//! speculation baseline.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{ClockDomain, ClockError, ClockValue};
use crate::engine::{LocalView, ProtocolDef, ProtocolParams, Rule};
use crate::topology::{Graph, TopologyError, DEFAULT_ENUMERATION_LIMIT};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("protocol requires at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("alpha >= trou - 2 violated: alpha={alpha}, trou={trou}")]
    AlphaTooSmall { alpha: i32, trou: usize },
    #[error("k > cyclo violated: k={k}, cyclo={cyclo}")]
    CycleTooSmall { k: i32, cyclo: usize },
    #[error("ring protocol requires size >= 3, got {0}")]
    RingTooSmall(usize),
    #[error("graph is not the labeled ring 0-1-…-(n-1)-0")]
    NotARing,
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// User-supplied unison clock parameters, validated against the topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnisonParams {
    pub alpha: i32,
    pub k: i32,
}

/// The derived mutual-exclusion parameters for a graph: `alpha = n`,
/// `k = (2n-1)(diam+1)+2`, and one privilege target per node at
/// `2n + 2*diam*id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmssParams {
    pub n: usize,
    pub diam: usize,
    pub alpha: i32,
    pub k: i32,
    pub targets: Vec<i32>,
}

impl EmssParams {
    pub fn for_graph(g: &Graph) -> Self {
        let n = g.n();
        let diam = g.diameter();
        let k = (2 * n as i64 - 1) * (diam as i64 + 1) + 2;
        let targets = (0..n)
            .map(|id| (2 * n + 2 * diam * id) as i32)
            .collect();
        EmssParams {
            n,
            diam,
            alpha: n as i32,
            k: i32::try_from(k).expect("clock size fits i32 at desk scale"),
            targets,
        }
    }
}

// ---------------------------------------------------------------------------
// Clock-protocol predicates (shared by unison and the mutex layer on top)
// ---------------------------------------------------------------------------

fn correct(dom: ClockDomain, rv: i32, ru: i32) -> bool {
    dom.in_stab(rv) && dom.in_stab(ru) && dom.distance(rv, ru) <= 1
}

fn all_correct(dom: ClockDomain, view: &LocalView) -> bool {
    view.neighbor_values
        .iter()
        .all(|&ru| correct(dom, view.own, ru))
}

fn normal_step(dom: ClockDomain, view: &LocalView) -> bool {
    all_correct(dom, view)
        && view
            .neighbor_values
            .iter()
            .all(|&ru| dom.local_leq(view.own, ru))
}

fn reset_step(dom: ClockDomain, view: &LocalView) -> bool {
    !all_correct(dom, view) && !dom.in_init(view.own)
}

fn convergence_step(dom: ClockDomain, view: &LocalView) -> bool {
    dom.in_init_strict(view.own)
        && view
            .neighbor_values
            .iter()
            .all(|&ru| dom.in_init(ru) && dom.init_leq(view.own, ru))
}

fn increment(dom: ClockDomain, own: i32) -> i32 {
    let value: ClockValue = dom.value(own).expect("guard admits only domain values");
    dom.increment(value).get()
}

fn clock_rules(dom: ClockDomain) -> Vec<Rule> {
    vec![
        Rule::new(
            "NA",
            move |view| normal_step(dom, view),
            move |view| increment(dom, view.own),
        ),
        Rule::new(
            "CA",
            move |view| convergence_step(dom, view),
            move |view| increment(dom, view.own),
        ),
        Rule::new(
            "RA",
            move |view| reset_step(dom, view),
            move |_| dom.reset_value().get(),
        ),
    ]
}

fn ensure_multi_node(g: &Graph) -> Result<(), ProtocolError> {
    // An isolated node would satisfy both the normal and convergence guards
    // vacuously; connectedness plus n >= 2 rules that out.
    if g.n() < 2 {
        Err(ProtocolError::TooFewNodes(g.n()))
    } else {
        Ok(())
    }
}

/// Builds the self-stabilizing unison for `g` with user parameters.
///
/// The parameters must satisfy `alpha >= trou - 2` and `k > cyclo`. When the
/// exact constants exceed the enumeration guard, the check falls back to the
/// safe upper bound `trou = cyclo = n`.
pub fn make_unison(g: &Graph, params: UnisonParams) -> Result<ProtocolDef, ProtocolError> {
    ensure_multi_node(g)?;
    let dom = ClockDomain::new(params.alpha, params.k)?;
    let (trou, cyclo) = match g.metrics(DEFAULT_ENUMERATION_LIMIT) {
        Ok(m) => (m.trou, m.cyclo),
        Err(TopologyError::EnumerationLimit { .. }) => (g.n(), g.n()),
        Err(e) => return Err(e.into()),
    };
    if (params.alpha as i64) < trou as i64 - 2 {
        return Err(ProtocolError::AlphaTooSmall {
            alpha: params.alpha,
            trou,
        });
    }
    if params.k as i64 <= cyclo as i64 {
        return Err(ProtocolError::CycleTooSmall { k: params.k, cyclo });
    }
    Ok(ProtocolDef {
        name: "unison".to_string(),
        n: g.n(),
        domain: dom.values().collect(),
        rules: clock_rules(dom),
        privilege: Box::new(|_| false),
        params: ProtocolParams::Unison {
            alpha: params.alpha,
            k: params.k,
        },
    })
}

/// Builds the speculatively-stabilizing mutual-exclusion protocol for `g`.
///
/// Parameters are derived, never user-supplied: `alpha = n` and
/// `k = (2n-1)(diam+1)+2` always satisfy the unison constraints because both
/// topology constants are at most `n`.
pub fn make_emss(g: &Graph) -> Result<ProtocolDef, ProtocolError> {
    ensure_multi_node(g)?;
    let params = EmssParams::for_graph(g);
    let dom = ClockDomain::new(params.alpha, params.k)?;
    let targets = params.targets.clone();
    Ok(ProtocolDef {
        name: "emss".to_string(),
        n: g.n(),
        domain: dom.values().collect(),
        rules: clock_rules(dom),
        privilege: Box::new(move |view| view.own == targets[view.node]),
        params: ProtocolParams::Emss {
            alpha: params.alpha,
            k: params.k,
            diam: params.diam,
            targets: params.targets,
        },
    })
}

/// True when `g` is exactly the canonical labeled ring, the topology the
/// token-ring baseline assumes.
pub fn is_labeled_ring(g: &Graph) -> bool {
    let n = g.n();
    if n < 3 {
        return false;
    }
    (0..n).all(|v| {
        let mut expect = [(v + n - 1) % n, (v + 1) % n];
        expect.sort_unstable();
        g.neighbors(v) == expect
    })
}

/// Builds the classic token ring on `ring_size` nodes with `ring_size`
/// states per register.
///
/// Node 0 increments mod k when its value equals its predecessor's; every
/// other node copies its predecessor's value when different. A node is
/// privileged exactly when its rule is enabled. Must be paired with the
/// labeled ring topology of the same size.
pub fn make_dijkstra(ring_size: usize) -> Result<ProtocolDef, ProtocolError> {
    if ring_size < 3 {
        return Err(ProtocolError::RingTooSmall(ring_size));
    }
    let n = ring_size;
    let k = ring_size as i32;
    let predecessor_value = move |view: &LocalView| -> i32 {
        let pred = (view.node + n - 1) % n;
        view.value_of(pred)
            .expect("token ring protocol requires the labeled ring topology")
    };
    let token_at = move |view: &LocalView| -> bool {
        if view.node == 0 {
            view.own == predecessor_value(view)
        } else {
            view.own != predecessor_value(view)
        }
    };
    Ok(ProtocolDef {
        name: "dijkstra".to_string(),
        n,
        domain: (0..k).collect(),
        rules: vec![
            Rule::new(
                "increment",
                move |view| view.node == 0 && view.own == predecessor_value(view),
                move |view| (view.own + 1) % k,
            ),
            Rule::new(
                "copy",
                move |view| view.node != 0 && view.own != predecessor_value(view),
                predecessor_value,
            ),
        ],
        privilege: Box::new(token_at),
        params: ProtocolParams::DijkstraRing { k },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{activable_set, apply_step, privileged_set, Configuration, Stepper};
    use crate::topology::GraphKind;

    fn graph(kind: GraphKind) -> Graph {
        Graph::generate(kind).unwrap()
    }

    #[test]
    fn emss_parameters_ring4() {
        let g = graph(GraphKind::Ring(4));
        let p = EmssParams::for_graph(&g);
        assert_eq!((p.alpha, p.k), (4, 23));
        assert_eq!(p.targets, vec![8, 12, 16, 20]);
    }

    #[test]
    fn emss_parameters_line2() {
        let g = graph(GraphKind::Line(2));
        let p = EmssParams::for_graph(&g);
        assert_eq!((p.alpha, p.k), (2, 8));
        assert_eq!(p.targets, vec![4, 6]);
    }

    #[test]
    fn emss_targets_spread_wider_than_diameter() {
        for g in [
            graph(GraphKind::Ring(4)),
            graph(GraphKind::Ring(6)),
            graph(GraphKind::Line(2)),
            graph(GraphKind::Line(5)),
            graph(GraphKind::Star(6)),
            graph(GraphKind::Complete(5)),
            graph(GraphKind::Grid { rows: 2, cols: 4 }),
        ] {
            let params = EmssParams::for_graph(&g);
            let dom = ClockDomain::new(params.alpha, params.k).unwrap();
            let diam = params.diam as i32;
            for (u, &tu) in params.targets.iter().enumerate() {
                // every target lies strictly inside the correct range
                assert!(2 * params.n as i32 <= tu);
                assert!(tu <= params.k - (diam + 1));
                for &tv in &params.targets[u + 1..] {
                    let d = dom.distance(tu, tv);
                    assert!(d > diam, "targets {tu},{tv} too close on {g:?}");
                    assert!(d >= (2 * diam).min(diam + 1));
                }
            }
        }
    }

    #[test]
    fn emss_satisfies_unison_constraints_automatically() {
        for g in [
            graph(GraphKind::Ring(5)),
            graph(GraphKind::Line(4)),
            graph(GraphKind::Complete(4)),
            graph(GraphKind::Grid { rows: 2, cols: 3 }),
        ] {
            let params = EmssParams::for_graph(&g);
            let m = g.metrics(DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert!(params.alpha as i64 >= m.trou as i64 - 2);
            assert!(params.k as i64 > m.cyclo as i64);
        }
    }

    #[test]
    fn unison_parameter_validation() {
        let c3 = graph(GraphKind::Ring(3));
        assert!(make_unison(&c3, UnisonParams { alpha: 1, k: 4 }).is_ok());
        assert!(matches!(
            make_unison(&c3, UnisonParams { alpha: 1, k: 3 }),
            Err(ProtocolError::CycleTooSmall { k: 3, cyclo: 3 })
        ));
        let line4 = graph(GraphKind::Line(4));
        assert!(make_unison(&line4, UnisonParams { alpha: 1, k: 3 }).is_ok());
        let c5 = graph(GraphKind::Ring(5));
        assert!(matches!(
            make_unison(&c5, UnisonParams { alpha: 2, k: 6 }),
            Err(ProtocolError::AlphaTooSmall { alpha: 2, trou: 5 })
        ));
    }

    #[test]
    fn emss_rules_match_unison_rules() {
        // Restricted to guards and actions the two protocols are the same;
        // check behaviorally over the whole configuration space of line(2).
        let g = graph(GraphKind::Line(2));
        let emss = make_emss(&g).unwrap();
        let unison = make_unison(&g, UnisonParams { alpha: 2, k: 8 }).unwrap();
        assert_eq!(
            emss.rules.iter().map(|r| r.name).collect::<Vec<_>>(),
            unison.rules.iter().map(|r| r.name).collect::<Vec<_>>()
        );
        let mut se = Stepper::new(&emss, &g);
        let mut su = Stepper::new(&unison, &g);
        for a in -2..=7 {
            for b in -2..=7 {
                let gamma = Configuration(vec![a, b]);
                for v in 0..2 {
                    let re = se.first_enabled(&gamma, v);
                    let ru = su.first_enabled(&gamma, v);
                    assert_eq!(re, ru, "rule mismatch at {gamma:?} node {v}");
                    if let Some(rule) = re {
                        assert_eq!(
                            se.action_value(&gamma, v, rule),
                            su.action_value(&gamma, v, rule)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn protocols_reject_single_node_graphs() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert!(matches!(make_emss(&g), Err(ProtocolError::TooFewNodes(1))));
    }

    #[test]
    fn dijkstra_all_equal_gives_token_to_root() {
        let g = graph(GraphKind::Ring(3));
        let p = make_dijkstra(3).unwrap();
        let gamma = Configuration(vec![0, 0, 0]);
        assert_eq!(privileged_set(&p, &g, &gamma), vec![0]);
        assert_eq!(activable_set(&p, &g, &gamma), vec![0]);
        let next = apply_step(&p, &g, &gamma, &[0]).unwrap();
        assert_eq!(next, Configuration(vec![1, 0, 0]));
    }

    #[test]
    fn dijkstra_every_config_has_a_token_and_circulation_keeps_one() {
        let g = graph(GraphKind::Ring(3));
        let p = make_dijkstra(3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let gamma = Configuration(vec![a, b, c]);
                    let privileged = privileged_set(&p, &g, &gamma);
                    assert!(!privileged.is_empty(), "no token at {gamma:?}");
                    // privilege coincides with activability in this protocol
                    assert_eq!(privileged, activable_set(&p, &g, &gamma));
                }
            }
        }
        // the nine circulation configurations carry exactly one token
        for a in 0..3i32 {
            let b = (a + 1) % 3;
            for gamma in [vec![a, a, a], vec![b, a, a], vec![b, b, a]] {
                let gamma = Configuration(gamma);
                assert_eq!(
                    privileged_set(&p, &g, &gamma).len(),
                    1,
                    "circulation config {gamma:?}"
                );
            }
        }
    }

    #[test]
    fn dijkstra_requires_a_real_ring() {
        assert!(matches!(
            make_dijkstra(2),
            Err(ProtocolError::RingTooSmall(2))
        ));
        assert!(is_labeled_ring(&graph(GraphKind::Ring(5))));
        assert!(!is_labeled_ring(&graph(GraphKind::Line(4))));
        assert!(!is_labeled_ring(&graph(GraphKind::Complete(4))));
    }
}
