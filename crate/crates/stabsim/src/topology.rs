//! Graph representation, edge-list I/O, generators, and the two topology
//! constants (largest hole, cyclomatic characteristic) that bound valid
//! clock parameters.
//!
//! Hole and cycle-basis computations enumerate chordless cycles, which is
//! exponential in general, so they sit behind an explicit size guard. The
//! protocols themselves only need `n` and the diameter; the exact constants
//! exist to check user-supplied clock parameters on small instances.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default node-count guard for the exponential cycle enumerations.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: cannot parse `{text}` as an edge")]
    BadLine { line: usize, text: String },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node id {id} out of range for n={n}")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no nodes")]
    Empty,
    #[error("{kind} requires size >= {min}, got {got}")]
    SizeBelowMinimum {
        kind: &'static str,
        min: usize,
        got: usize,
    },
    #[error("n={n} exceeds the enumeration limit {limit}")]
    EnumerationLimit { n: usize, limit: usize },
}

/// An undirected connected graph over node ids `0..n-1`.
///
/// Immutable after construction; neighbor lists are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// Canonical generated topologies used as fixtures and benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Ring(usize),
    Line(usize),
    Star(usize),
    Complete(usize),
    Grid { rows: usize, cols: usize },
}

/// The topology constants relevant to clock-parameter validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyMetrics {
    pub n: usize,
    pub diam: usize,
    /// Length of the longest chordless cycle; 2 when the graph is acyclic.
    pub trou: usize,
    /// Length of the longest cycle in a minimum cycle basis; 2 when acyclic.
    pub cyclo: usize,
}

impl Graph {
    /// Builds and validates a graph from `n` and an unordered edge list.
    pub fn from_edges(n: usize, raw_edges: &[(usize, usize)]) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(a, b) in raw_edges {
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            for id in [a, b] {
                if id >= n {
                    return Err(TopologyError::NodeOutOfRange { id, n });
                }
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Graph { n, edges, adjacency };
        if !g.is_connected() {
            return Err(TopologyError::Disconnected);
        }
        Ok(g)
    }

    /// Parses edge-list text: one `u v` pair per line, with an optional
    /// leading `n <count>` header. Blank lines and `#` comments are skipped.
    /// Without a header, `n` is one past the largest id seen.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut declared_n: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_id = 0usize;
        let mut saw_any = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || TopologyError::BadLine {
                line: idx + 1,
                text: raw.to_string(),
            };
            let mut parts = line.split_whitespace();
            let first = parts.next().ok_or_else(bad)?;
            let second = parts.next().ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            if first == "n" {
                if declared_n.is_some() || saw_any {
                    return Err(bad());
                }
                declared_n = Some(second.parse().map_err(|_| bad())?);
                saw_any = true;
                continue;
            }
            let u: usize = first.parse().map_err(|_| bad())?;
            let v: usize = second.parse().map_err(|_| bad())?;
            max_id = max_id.max(u).max(v);
            edges.push((u, v));
            saw_any = true;
        }
        let n = match declared_n {
            Some(n) => n,
            None if edges.is_empty() => return Err(TopologyError::Empty),
            None => max_id + 1,
        };
        Self::from_edges(n, &edges)
    }

    /// Builds one of the canonical labeled topologies.
    ///
    /// Node numbering is deterministic: rings and lines in path order,
    /// grids row-major, stars with the hub at 0.
    pub fn generate(kind: GraphKind) -> Result<Self, TopologyError> {
        let check = |name: &'static str, min: usize, got: usize| {
            if got < min {
                Err(TopologyError::SizeBelowMinimum {
                    kind: name,
                    min,
                    got,
                })
            } else {
                Ok(())
            }
        };
        let edges: Vec<(usize, usize)> = match kind {
            GraphKind::Ring(k) => {
                check("ring", 3, k)?;
                (0..k).map(|i| (i, (i + 1) % k)).collect()
            }
            GraphKind::Line(k) => {
                check("line", 2, k)?;
                (0..k - 1).map(|i| (i, i + 1)).collect()
            }
            GraphKind::Star(k) => {
                check("star", 2, k)?;
                (1..k).map(|i| (0, i)).collect()
            }
            GraphKind::Complete(k) => {
                check("complete", 2, k)?;
                let mut e = Vec::new();
                for i in 0..k {
                    for j in i + 1..k {
                        e.push((i, j));
                    }
                }
                e
            }
            GraphKind::Grid { rows, cols } => {
                check("grid", 1, rows.min(cols))?;
                check("grid", 2, rows * cols)?;
                let id = |r: usize, c: usize| r * cols + c;
                let mut e = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            e.push((id(r, c), id(r, c + 1)));
                        }
                        if r + 1 < rows {
                            e.push((id(r, c), id(r + 1, c)));
                        }
                    }
                }
                e
            }
        };
        let n = match kind {
            GraphKind::Ring(k) | GraphKind::Line(k) | GraphKind::Star(k) | GraphKind::Complete(k) => k,
            GraphKind::Grid { rows, cols } => rows * cols,
        };
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// A connected graph is acyclic exactly when it has `n - 1` edges.
    pub fn is_acyclic(&self) -> bool {
        self.edges.len() == self.n - 1
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == self.n
    }

    /// BFS distances from `src`.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Graph diameter in hops, by all-pairs BFS.
    pub fn diameter(&self) -> usize {
        (0..self.n)
            .flat_map(|src| self.bfs_distances(src))
            .max()
            .unwrap_or(0)
    }

    /// Enumerates every chordless cycle once, as a vertex sequence starting
    /// at its minimal vertex with the second vertex smaller than the last.
    ///
    /// A path is grown so it always stays induced; a neighbor of both the
    /// path head and tail closes a hole and is never extended through, since
    /// the closing edge would be a chord of any longer cycle.
    fn chordless_cycles(&self) -> Vec<Vec<usize>> {
        let mut cycles = Vec::new();
        let mut path: Vec<usize> = Vec::new();
        let mut on_path = vec![false; self.n];
        for start in 0..self.n {
            path.clear();
            path.push(start);
            on_path.iter_mut().for_each(|b| *b = false);
            on_path[start] = true;
            self.grow_hole(start, &mut path, &mut on_path, &mut cycles);
            on_path[start] = false;
        }
        cycles
    }

    fn grow_hole(
        &self,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        cycles: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        for &w in self.neighbors(last) {
            if w <= start || on_path[w] {
                continue;
            }
            // The path must stay induced: w may touch only its predecessor
            // (and possibly the start, which closes the cycle).
            let internal_chord = path.len() > 1
                && path[1..path.len() - 1].iter().any(|&p| self.has_edge(w, p));
            if internal_chord {
                continue;
            }
            let closes = path.len() >= 2 && self.has_edge(w, start);
            if closes {
                if path[1] < w {
                    let mut cycle = path.clone();
                    cycle.push(w);
                    cycles.push(cycle);
                }
                continue;
            }
            path.push(w);
            on_path[w] = true;
            self.grow_hole(start, path, on_path, cycles);
            on_path[w] = false;
            path.pop();
        }
    }

    fn check_enumeration_limit(&self, limit: usize) -> Result<(), TopologyError> {
        if self.n > limit {
            Err(TopologyError::EnumerationLimit { n: self.n, limit })
        } else {
            Ok(())
        }
    }

    /// Size of the largest hole: the length of the longest chordless cycle,
    /// or 2 when the graph is acyclic.
    pub fn largest_hole(&self, limit: usize) -> Result<usize, TopologyError> {
        self.check_enumeration_limit(limit)?;
        if self.is_acyclic() {
            return Ok(2);
        }
        Ok(self
            .chordless_cycles()
            .iter()
            .map(Vec::len)
            .max()
            .expect("cyclic graph has a chordless cycle"))
    }

    /// Length of the longest cycle in a minimum cycle basis (minimum total
    /// length), or 2 when the graph is acyclic.
    ///
    /// Candidates are the chordless cycles: a basis member with a chord
    /// would split into two strictly shorter cycles, one of which could
    /// replace it in the basis at lower total weight, so every minimum
    /// basis consists of chordless cycles. Greedy selection by length with
    /// GF(2) independence then yields a minimum basis, and all minimum
    /// bases share the same length multiset, so the maximum is well defined.
    pub fn cyclomatic_characteristic(&self, limit: usize) -> Result<usize, TopologyError> {
        self.check_enumeration_limit(limit)?;
        if self.is_acyclic() {
            return Ok(2);
        }
        let mut candidates = self.chordless_cycles();
        candidates.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let rank_target = self.edges.len() - self.n + 1;
        let mut basis = Gf2Basis::new(self.edges.len());
        let mut longest = 0;
        for cycle in &candidates {
            if basis.insert(self.cycle_edge_vector(cycle)) {
                longest = longest.max(cycle.len());
                if basis.rank() == rank_target {
                    break;
                }
            }
        }
        debug_assert_eq!(basis.rank(), rank_target);
        Ok(longest)
    }

    /// Incidence vector of a cycle over the edge index space.
    fn cycle_edge_vector(&self, cycle: &[usize]) -> Vec<u64> {
        let words = self.edges.len().div_ceil(64);
        let mut vector = vec![0u64; words];
        for i in 0..cycle.len() {
            let a = cycle[i];
            let b = cycle[(i + 1) % cycle.len()];
            let key = (a.min(b), a.max(b));
            let idx = self
                .edges
                .binary_search(&key)
                .expect("cycle uses graph edges");
            vector[idx / 64] |= 1 << (idx % 64);
        }
        vector
    }

    /// All three metrics at once.
    pub fn metrics(&self, limit: usize) -> Result<TopologyMetrics, TopologyError> {
        Ok(TopologyMetrics {
            n: self.n,
            diam: self.diameter(),
            trou: self.largest_hole(limit)?,
            cyclo: self.cyclomatic_characteristic(limit)?,
        })
    }
}

/// Incremental GF(2) row basis with Gaussian reduction.
struct Gf2Basis {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    words: usize,
}

impl Gf2Basis {
    fn new(bits: usize) -> Self {
        Gf2Basis {
            rows: Vec::new(),
            pivots: Vec::new(),
            words: bits.div_ceil(64).max(1),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `vector` against the basis; inserts and returns true when it
    /// is independent.
    fn insert(&mut self, mut vector: Vec<u64>) -> bool {
        debug_assert_eq!(vector.len(), self.words);
        for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
            if vector[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (v, r) in vector.iter_mut().zip(row) {
                    *v ^= r;
                }
            }
        }
        match highest_bit(&vector) {
            Some(pivot) => {
                self.rows.push(vector);
                self.pivots.push(pivot);
                true
            }
            None => false,
        }
    }
}

fn highest_bit(vector: &[u64]) -> Option<usize> {
    for (w, &word) in vector.iter().enumerate().rev() {
        if word != 0 {
            return Some(w * 64 + 63 - word.leading_zeros() as usize);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(k: usize) -> Graph {
        Graph::generate(GraphKind::Ring(k)).unwrap()
    }

    fn line(k: usize) -> Graph {
        Graph::generate(GraphKind::Line(k)).unwrap()
    }

    const LIMIT: usize = DEFAULT_ENUMERATION_LIMIT;

    // ---- independent oracles -------------------------------------------

    /// Floyd–Warshall all-pairs distances, as a second route to the diameter.
    fn floyd_warshall_diameter(g: &Graph) -> usize {
        let n = g.n();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for v in 0..n {
            d[v][v] = 0;
        }
        for &(u, v) in g.edges() {
            d[u][v] = 1;
            d[v][u] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| d[i][j])
            .max()
            .unwrap_or(0)
    }

    /// Brute force over every simple cycle, canonicalized as in the
    /// implementation but with no chordless pruning at all.
    fn all_simple_cycles(g: &Graph) -> Vec<Vec<usize>> {
        fn grow(
            g: &Graph,
            start: usize,
            path: &mut Vec<usize>,
            on_path: &mut [bool],
            out: &mut Vec<Vec<usize>>,
        ) {
            let last = *path.last().unwrap();
            for &w in g.neighbors(last) {
                if w <= start || on_path[w] {
                    continue;
                }
                if path.len() >= 2 && g.has_edge(w, start) && path[1] < w {
                    let mut cycle = path.clone();
                    cycle.push(w);
                    out.push(cycle);
                }
                path.push(w);
                on_path[w] = true;
                grow(g, start, path, on_path, out);
                on_path[w] = false;
                path.pop();
            }
        }
        let mut out = Vec::new();
        for start in 0..g.n() {
            let mut on_path = vec![false; g.n()];
            on_path[start] = true;
            grow(g, start, &mut vec![start], &mut on_path, &mut out);
        }
        out
    }

    fn is_chordless(g: &Graph, cycle: &[usize]) -> bool {
        let k = cycle.len();
        for i in 0..k {
            for j in i + 1..k {
                let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                if !consecutive && g.has_edge(cycle[i], cycle[j]) {
                    return false;
                }
            }
        }
        true
    }

    fn brute_trou(g: &Graph) -> usize {
        all_simple_cycles(g)
            .iter()
            .filter(|c| is_chordless(g, c))
            .map(|c| c.len())
            .max()
            .unwrap_or(2)
    }

    /// Greedy minimum cycle basis over the full simple-cycle set; an
    /// independent route since the implementation restricts candidates to
    /// chordless cycles.
    fn brute_cyclo(g: &Graph) -> usize {
        if g.is_acyclic() {
            return 2;
        }
        let mut cycles = all_simple_cycles(g);
        cycles.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let target = g.edge_count() - g.n() + 1;
        let mut basis = Gf2Basis::new(g.edge_count());
        let mut longest = 0;
        for c in &cycles {
            if basis.insert(g.cycle_edge_vector(c)) {
                longest = longest.max(c.len());
                if basis.rank() == target {
                    return longest;
                }
            }
        }
        panic!("cycle set must span the cycle space");
    }

    fn girth(g: &Graph) -> Option<usize> {
        all_simple_cycles(g).iter().map(|c| c.len()).min()
    }

    /// Exhaustive search over all size-mu independent cycle subsets:
    /// minimum total weight first, then minimum max length.
    fn exhaustive_cyclo(g: &Graph) -> usize {
        let cycles = all_simple_cycles(g);
        let mu = g.edge_count() - g.n() + 1;
        let mut best: Option<(usize, usize)> = None;
        let mut pick = Vec::new();
        fn search(
            g: &Graph,
            cycles: &[Vec<usize>],
            from: usize,
            mu: usize,
            pick: &mut Vec<usize>,
            best: &mut Option<(usize, usize)>,
        ) {
            if pick.len() == mu {
                let mut basis = Gf2Basis::new(g.edge_count());
                if !pick
                    .iter()
                    .all(|&i| basis.insert(g.cycle_edge_vector(&cycles[i])))
                {
                    return;
                }
                let total: usize = pick.iter().map(|&i| cycles[i].len()).sum();
                let longest = pick.iter().map(|&i| cycles[i].len()).max().unwrap();
                let cand = (total, longest);
                if best.map_or(true, |b| cand < b) {
                    *best = Some(cand);
                }
                return;
            }
            for i in from..cycles.len() {
                pick.push(i);
                search(g, cycles, i + 1, mu, pick, best);
                pick.pop();
            }
        }
        search(g, &cycles, 0, mu, &mut pick, &mut best);
        best.expect("graph has a cycle basis").1
    }

    // ---- parsing and generation ----------------------------------------

    #[test]
    fn parse_triangle_with_header() {
        let g = Graph::parse("n 3\n0 1\n1 2\n2 0").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn parse_single_edge() {
        let g = Graph::parse("n 2\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn parse_rejects_disconnected() {
        assert_eq!(
            Graph::parse("n 4\n0 1\n2 3"),
            Err(TopologyError::Disconnected)
        );
    }

    #[test]
    fn parse_rejects_self_loop_duplicate_and_range() {
        assert_eq!(Graph::parse("n 2\n1 1"), Err(TopologyError::SelfLoop(1)));
        assert_eq!(
            Graph::parse("n 2\n0 1\n1 0"),
            Err(TopologyError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::parse("n 2\n0 2"),
            Err(TopologyError::NodeOutOfRange { id: 2, n: 2 })
        );
    }

    #[test]
    fn parse_without_header_infers_n() {
        let g = Graph::parse("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn generate_examples() {
        assert_eq!(ring(4).edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(line(2).edges(), &[(0, 1)]);
        let grid = Graph::generate(GraphKind::Grid { rows: 2, cols: 3 }).unwrap();
        assert_eq!(grid.n(), 6);
        assert_eq!(grid.edge_count(), 7);
    }

    #[test]
    fn generate_rejects_undersized() {
        assert!(Graph::generate(GraphKind::Ring(2)).is_err());
        assert!(Graph::generate(GraphKind::Line(1)).is_err());
        assert!(Graph::generate(GraphKind::Complete(1)).is_err());
    }

    // ---- metrics ---------------------------------------------------------

    #[test]
    fn diameter_examples() {
        assert_eq!(ring(4).diameter(), 2);
        assert_eq!(line(5).diameter(), 4);
        assert_eq!(Graph::generate(GraphKind::Complete(6)).unwrap().diameter(), 1);
    }

    #[test]
    fn trou_examples() {
        assert_eq!(line(4).largest_hole(LIMIT).unwrap(), 2);
        assert_eq!(ring(5).largest_hole(LIMIT).unwrap(), 5);
        let grid = Graph::generate(GraphKind::Grid { rows: 2, cols: 3 }).unwrap();
        assert_eq!(grid.largest_hole(LIMIT).unwrap(), 4);
    }

    #[test]
    fn cyclo_examples() {
        assert_eq!(line(4).cyclomatic_characteristic(LIMIT).unwrap(), 2);
        assert_eq!(ring(5).cyclomatic_characteristic(LIMIT).unwrap(), 5);
        let grid = Graph::generate(GraphKind::Grid { rows: 2, cols: 3 }).unwrap();
        assert_eq!(grid.cyclomatic_characteristic(LIMIT).unwrap(), 4);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let g = line(13);
        assert_eq!(
            g.largest_hole(LIMIT),
            Err(TopologyError::EnumerationLimit { n: 13, limit: 12 })
        );
        assert!(g.largest_hole(13).is_ok());
    }

    fn corpus() -> Vec<Graph> {
        vec![
            line(2),
            line(4),
            line(5),
            ring(3),
            ring(4),
            ring(5),
            ring(6),
            Graph::generate(GraphKind::Star(5)).unwrap(),
            Graph::generate(GraphKind::Complete(4)).unwrap(),
            Graph::generate(GraphKind::Complete(5)).unwrap(),
            Graph::generate(GraphKind::Grid { rows: 2, cols: 3 }).unwrap(),
            Graph::generate(GraphKind::Grid { rows: 2, cols: 4 }).unwrap(),
            // ring(6) plus one chord
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
                .unwrap(),
            // two triangles sharing a node
            Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap(),
        ]
    }

    #[test]
    fn diameter_matches_floyd_warshall() {
        for g in corpus() {
            assert_eq!(g.diameter(), floyd_warshall_diameter(&g), "{:?}", g.edges());
        }
    }

    #[test]
    fn hole_and_basis_match_brute_force() {
        for g in corpus() {
            assert_eq!(
                g.largest_hole(LIMIT).unwrap(),
                brute_trou(&g),
                "trou {:?}",
                g.edges()
            );
            assert_eq!(
                g.cyclomatic_characteristic(LIMIT).unwrap(),
                brute_cyclo(&g),
                "cyclo {:?}",
                g.edges()
            );
        }
    }

    #[test]
    fn greedy_basis_matches_exhaustive_search() {
        // Full subset search is only tractable on graphs with few cycles.
        let small: Vec<Graph> = vec![
            Graph::generate(GraphKind::Grid { rows: 2, cols: 3 }).unwrap(),
            Graph::generate(GraphKind::Complete(4)).unwrap(),
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
                .unwrap(),
        ];
        for g in small {
            assert_eq!(
                g.cyclomatic_characteristic(LIMIT).unwrap(),
                exhaustive_cyclo(&g),
                "{:?}",
                g.edges()
            );
        }
    }

    #[test]
    fn metric_bounds_hold() {
        for g in corpus() {
            let m = g.metrics(LIMIT).unwrap();
            assert!(m.diam >= 1 && m.diam <= m.n - 1);
            assert!((2..=m.n.max(2)).contains(&m.trou));
            assert!((2..=m.n.max(2)).contains(&m.cyclo));
            if g.is_acyclic() {
                assert_eq!((m.trou, m.cyclo), (2, 2));
            } else {
                let girth = girth(&g).unwrap();
                assert!(girth <= m.trou);
                assert!(m.cyclo >= girth);
            }
        }
    }

    #[test]
    fn neighbor_lists_are_symmetric_and_sorted() {
        for g in corpus() {
            for v in 0..g.n() {
                let ns = g.neighbors(v);
                assert!(ns.windows(2).all(|w| w[0] < w[1]));
                for &u in ns {
                    assert!(g.neighbors(u).contains(&v));
                }
            }
        }
    }
}
