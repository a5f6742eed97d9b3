use stabsim::analysis::{did_worst_case, GameBudget, LegitimacyPredicate, StabTime};
use stabsim::clock::ClockDomain;
use stabsim::engine::{LocalView, ProtocolDef, ProtocolParams, Rule};
use stabsim::topology::{Graph, GraphKind};

fn broken(g: &Graph, alpha: i32, k: i32) -> ProtocolDef {
    let dom = ClockDomain::new(alpha, k).unwrap();
    let correct =
        move |rv: i32, ru: i32| dom.in_stab(rv) && dom.in_stab(ru) && dom.distance(rv, ru) <= 1;
    let all_correct =
        move |view: &LocalView| view.neighbor_values.iter().all(|&ru| correct(view.own, ru));
    ProtocolDef {
        name: "broken".into(),
        n: g.n(),
        domain: dom.values().collect(),
        rules: vec![
            Rule::new(
                "NA",
                move |v| all_correct(v) && v.neighbor_values.iter().all(|&r| dom.local_leq(v.own, r)),
                move |v| dom.increment(dom.value(v.own).unwrap()).get(),
            ),
            Rule::new(
                "CA",
                move |v| {
                    dom.in_init_strict(v.own)
                        && v.neighbor_values.iter().all(|&r| dom.in_init(r) && v.own <= r)
                },
                move |v| dom.increment(dom.value(v.own).unwrap()).get(),
            ),
            Rule::new("RA", move |v| !all_correct(v) && !dom.in_init(v.own), move |_| 0),
        ],
        privilege: Box::new(|_| false),
        params: ProtocolParams::Unison { alpha, k },
    }
}

fn main() {
    let candidates: Vec<(Graph, i32, i32, &str)> = vec![
        (Graph::generate(GraphKind::Ring(3)).unwrap(), 1, 4, "ring(3) a=1 k=4"),
        (Graph::generate(GraphKind::Line(3)).unwrap(), 1, 3, "line(3) a=1 k=3"),
        (Graph::generate(GraphKind::Ring(4)).unwrap(), 2, 5, "ring(4) a=2 k=5"),
        (Graph::generate(GraphKind::Ring(5)).unwrap(), 3, 6, "ring(5) a=3 k=6"),
    ];
    for (g, a, k, label) in candidates {
        let p = broken(&g, a, k);
        let pred = LegitimacyPredicate::Gamma1.compile(&p, &g).unwrap();
        match did_worst_case(&p, &g, label, pred.as_ref(), &GameBudget::default()) {
            Ok(analysis) => {
                let lasso = analysis
                    .report
                    .witness
                    .as_ref()
                    .and_then(|w| w.lasso.as_ref())
                    .map(|l| (l.stem.len(), l.cycle.len()));
                println!(
                    "{label}: states={} target={} w={} lasso={lasso:?}",
                    analysis.states, analysis.target_size, analysis.report.stab_time
                );
                if analysis.report.stab_time == StabTime::Infinite {
                    if let Some(l) = analysis.report.witness.as_ref().and_then(|w| w.lasso.as_ref()) {
                        println!("  cycle: {:?}", l.cycle.iter().map(|s| (&s.config, &s.selected)).collect::<Vec<_>>());
                    }
                }
            }
            Err(e) => println!("{label}: error {e}"),
        }
    }
}
