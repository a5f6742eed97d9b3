use stabsim::analysis::{sync_worst_case, SweepMode, DEFAULT_SYNC_BUDGET};
use stabsim::protocols::make_emss;
use stabsim::topology::{Graph, GraphKind};

fn main() {
    let cases = [
        (GraphKind::Line(2), "line(2)"),
        (GraphKind::Ring(3), "ring(3)"),
        (GraphKind::Ring(4), "ring(4)"),
        (GraphKind::Line(4), "line(4)"),
    ];
    for (kind, label) in cases {
        let g = Graph::generate(kind).unwrap();
        let p = make_emss(&g).unwrap();
        let t0 = std::time::Instant::now();
        let report = sync_worst_case(
            &p,
            &g,
            label,
            SweepMode::Exhaustive {
                max_states: DEFAULT_SYNC_BUDGET,
            },
        )
        .unwrap();
        println!(
            "{label}: diam={} bound={} measured={} witness={:?} elapsed={:?}",
            g.diameter(),
            (g.diameter() as u64).div_ceil(2),
            report.stab_time,
            report.witness.as_ref().map(|w| &w.initial),
            t0.elapsed()
        );
    }
}
