//! Simple undirected graphs with role labels, the series-parallel
//! construction primitives, and graph-class recognition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(Vertex, u32),
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(Vertex, Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(Vertex, Vertex),
    #[error("label {0:?} already bound to vertex {1}")]
    DuplicateLabelName(String, Vertex),
    #[error("vertex {1} already carries label {0:?}")]
    DuplicateLabelIndex(String, Vertex),
}

/// Errors from [`parse_graph`]; each malformed-input class gets its own code.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphParseError {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0:?}")]
    BadHeader(String),
    #[error("malformed edge line: {0:?}")]
    BadEdge(String),
    #[error("vertex index {0} out of range (n = {1})")]
    VertexOutOfRange(u32, u32),
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("malformed label comment: {0:?}")]
    BadLabel(String),
    #[error("duplicate label: {0:?}")]
    DuplicateLabel(String),
}

/// A simple undirected graph on vertices `0..n`, with an optional injective
/// map from role names (`a`, `b`, `c1`, ...) to vertices.
///
/// Values are immutable once built; the construction operations return new
/// graphs. Edges are kept as ordered pairs `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    edges: BTreeSet<(Vertex, Vertex)>,
    labels: BTreeMap<String, Vertex>,
}

impl Graph {
    pub fn new(n: u32) -> Self {
        Graph { n, edges: BTreeSet::new(), labels: BTreeMap::new() }
    }

    pub fn from_edges<I>(n: u32, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Single edge (a, b); the seed of every gadget construction.
    pub fn k2() -> Self {
        Graph::from_edges(2, [(0, 1)]).unwrap()
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn cycle(n: u32) -> Self {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)).map(|(u, v)| (u.min(v), u.max(v))))
            .unwrap()
    }

    pub fn path(n: u32) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.vertices().filter(|&u| self.has_edge(u, v)).count()
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.vertices().filter(|&u| self.has_edge(u, v)).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.m() == (self.n as usize * (self.n as usize).saturating_sub(1)) / 2
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        if !self.edges.insert((u.min(v), u.max(v))) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        Ok(())
    }

    pub fn set_label(&mut self, name: &str, v: Vertex) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        if let Some(&old) = self.labels.get(name) {
            return Err(GraphError::DuplicateLabelName(name.to_string(), old));
        }
        if let Some((name2, _)) = self.labels.iter().find(|&(_, &w)| w == v) {
            return Err(GraphError::DuplicateLabelIndex(name2.clone(), v));
        }
        self.labels.insert(name.to_string(), v);
        Ok(())
    }

    pub fn label(&self, name: &str) -> Option<Vertex> {
        self.labels.get(name).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, Vertex)> {
        self.labels.iter().map(|(s, &v)| (s.as_str(), v))
    }

    /// Split the edge `(u, v)`: add a new vertex `w = n` adjacent to exactly
    /// `u` and `v`, keeping `(u, v)`.
    pub fn split_edge(&self, u: Vertex, v: Vertex) -> Result<(Graph, Vertex), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let mut g = self.clone();
        let w = g.n;
        g.n += 1;
        g.add_edge(u, w)?;
        g.add_edge(v, w)?;
        Ok((g, w))
    }

    /// Add a new degree-1 vertex `w = n` adjacent to `u`.
    pub fn add_pendant(&self, u: Vertex) -> Result<(Graph, Vertex), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        let mut g = self.clone();
        let w = g.n;
        g.n += 1;
        g.add_edge(u, w)?;
        Ok((g, w))
    }

    /// Series operation: replace the edge `(u, v)` by a path `u - w - v`
    /// through the new vertex `w = n`.
    pub fn series_subdivide(&self, u: Vertex, v: Vertex) -> Result<(Graph, Vertex), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        let mut g = self.clone();
        g.edges.remove(&(u.min(v), u.max(v)));
        let w = g.n;
        g.n += 1;
        g.add_edge(u, w)?;
        g.add_edge(v, w)?;
        Ok((g, w))
    }

    /// Series-parallel test (no K4 minor) by the standard reduction: delete
    /// degree-0/1 vertices and suppress degree-2 vertices, merging any
    /// parallel edge that suppression would create. The graph is
    /// series-parallel iff no edge survives. A graph whose residue keeps a
    /// vertex of minimum degree >= 3 contains a K4 minor.
    ///
    /// Disconnected input is evaluated per component (the reduction already
    /// acts component-wise), so the result is the conjunction over components.
    pub fn is_series_parallel(&self) -> bool {
        let n = self.n as usize;
        let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
        for (u, v) in self.edges() {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
        let mut alive = vec![true; n];
        let mut queue: Vec<Vertex> = (0..self.n).collect();
        while let Some(v) = queue.pop() {
            let vi = v as usize;
            if !alive[vi] {
                continue;
            }
            match adj[vi].len() {
                0 => alive[vi] = false,
                1 => {
                    let u = *adj[vi].iter().next().unwrap();
                    alive[vi] = false;
                    adj[vi].clear();
                    adj[u as usize].remove(&v);
                    queue.push(u);
                }
                2 => {
                    let mut it = adj[vi].iter();
                    let u = *it.next().unwrap();
                    let w = *it.next().unwrap();
                    alive[vi] = false;
                    adj[vi].clear();
                    adj[u as usize].remove(&v);
                    adj[w as usize].remove(&v);
                    // Suppression: u-w becomes an edge; if it already is one,
                    // the parallel copy collapses.
                    adj[u as usize].insert(w);
                    adj[w as usize].insert(u);
                    queue.push(u);
                    queue.push(w);
                }
                _ => {}
            }
        }
        adj.iter().all(|s| s.is_empty())
    }

    /// 2-tree test: reduce by repeatedly deleting a degree-2 vertex whose two
    /// neighbors are adjacent (a simplicial degree-2 vertex); true iff the
    /// residue is exactly K3. Greedy removal is safe: deleting any simplicial
    /// degree-2 vertex of a 2-tree leaves a 2-tree, and a reduction to K3
    /// replays backwards as a 2-tree construction sequence.
    pub fn is_2_tree(&self) -> bool {
        let n = self.n as usize;
        if n < 3 {
            return false;
        }
        let mut adj: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
        for (u, v) in self.edges() {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
        let mut alive_count = n;
        let mut alive = vec![true; n];
        let mut queue: Vec<Vertex> = (0..self.n).collect();
        while alive_count > 3 {
            let mut removed = false;
            while let Some(v) = queue.pop() {
                let vi = v as usize;
                if !alive[vi] || adj[vi].len() != 2 {
                    continue;
                }
                let mut it = adj[vi].iter();
                let u = *it.next().unwrap();
                let w = *it.next().unwrap();
                if !adj[u as usize].contains(&w) {
                    continue;
                }
                alive[vi] = false;
                alive_count -= 1;
                adj[vi].clear();
                adj[u as usize].remove(&v);
                adj[w as usize].remove(&v);
                queue.push(u);
                queue.push(w);
                removed = true;
                break;
            }
            if !removed {
                // Rescan in case a candidate was skipped while its neighbors
                // were still cluttered.
                queue = (0..self.n).filter(|&v| alive[v as usize]).collect();
                let progress = queue.iter().any(|&v| {
                    let vi = v as usize;
                    if adj[vi].len() != 2 {
                        return false;
                    }
                    let mut it = adj[vi].iter();
                    let u = *it.next().unwrap();
                    let w = *it.next().unwrap();
                    adj[u as usize].contains(&w)
                });
                if !progress {
                    return false;
                }
            }
        }
        let rest: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        rest.len() == 3
            && rest
                .iter()
                .all(|&v| adj[v].len() == 2)
    }
}

/// Serialize to the text format: optional `#` comments, header `n m`, then
/// `m` lines `u v` with `u < v` in lexicographic order, then one
/// `# label <name> <index>` comment per label.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", u, v).unwrap();
    }
    for (name, v) in g.labels() {
        writeln!(out, "# label {} {}", name, v).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut g: Option<Graph> = None;
    let mut found = 0usize;
    let mut labels: Vec<(String, u32)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.first() == Some(&"label") {
                if words.len() != 3 {
                    return Err(GraphParseError::BadLabel(line.to_string()));
                }
                let idx: u32 = words[2]
                    .parse()
                    .map_err(|_| GraphParseError::BadLabel(line.to_string()))?;
                labels.push((words[1].to_string(), idx));
            }
            continue;
        }
        if header.is_none() {
            let mut it = line.split_whitespace();
            let n: u32 = it
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| GraphParseError::BadHeader(line.to_string()))?;
            let m: usize = it
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| GraphParseError::BadHeader(line.to_string()))?;
            if it.next().is_some() {
                return Err(GraphParseError::BadHeader(line.to_string()));
            }
            header = Some((n, m));
            g = Some(Graph::new(n));
            continue;
        }
        let mut it = line.split_whitespace();
        let (u, v) = match (
            it.next().and_then(|w| w.parse::<u32>().ok()),
            it.next().and_then(|w| w.parse::<u32>().ok()),
            it.next(),
        ) {
            (Some(u), Some(v), None) => (u, v),
            _ => return Err(GraphParseError::BadEdge(line.to_string())),
        };
        let graph = g.as_mut().unwrap();
        if u == v {
            return Err(GraphParseError::SelfLoop(u));
        }
        if u > v {
            return Err(GraphParseError::BadEdge(line.to_string()));
        }
        graph.add_edge(u, v).map_err(|e| match e {
            GraphError::VertexOutOfRange(w, n) => GraphParseError::VertexOutOfRange(w, n),
            GraphError::DuplicateEdge(a, b) => GraphParseError::DuplicateEdge(a, b),
            _ => GraphParseError::BadEdge(line.to_string()),
        })?;
        found += 1;
    }
    let (n, m) = header.ok_or(GraphParseError::MissingHeader)?;
    let mut graph = g.unwrap();
    if found != m {
        return Err(GraphParseError::EdgeCountMismatch { expected: m, found });
    }
    for (name, idx) in labels {
        if idx >= n {
            return Err(GraphParseError::VertexOutOfRange(idx, n));
        }
        graph
            .set_label(&name, idx)
            .map_err(|_| GraphParseError::DuplicateLabel(name))?;
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_k2_gives_triangle() {
        let (g, w) = Graph::k2().split_edge(0, 1).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(w, 2);
        assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && g.has_edge(1, 2));
    }

    #[test]
    fn split_rejects_non_edge_and_self_loop() {
        let p3 = Graph::path(3);
        assert_eq!(p3.split_edge(0, 2), Err(GraphError::NotAnEdge(0, 2)));
        assert_eq!(p3.split_edge(1, 1), Err(GraphError::SelfLoop(1)));
    }

    #[test]
    fn pendant_on_k1_gives_k2() {
        let (g, w) = Graph::new(1).add_pendant(0).unwrap();
        assert_eq!((g.n(), g.m(), w), (2, 1, 1));
        assert_eq!(
            Graph::new(1).add_pendant(1),
            Err(GraphError::VertexOutOfRange(1, 1))
        );
    }

    #[test]
    fn subdivision_examples() {
        let (p3, _) = Graph::k2().series_subdivide(0, 1).unwrap();
        assert_eq!((p3.n(), p3.m()), (3, 2));
        assert!(!p3.has_edge(0, 1));

        let tri = Graph::cycle(3);
        let (c4, _) = tri.series_subdivide(0, 1).unwrap();
        assert_eq!((c4.n(), c4.m()), (4, 4));
        assert!(c4.degree(3) == 2);

        // K2 subdivided twice is P4.
        let (g, w) = Graph::k2().series_subdivide(0, 1).unwrap();
        let (g, _) = g.series_subdivide(0, w).unwrap();
        assert_eq!((g.n(), g.m()), (4, 3));
        assert!(g.vertices().all(|v| g.degree(v) <= 2));
    }

    #[test]
    fn series_parallel_recognition() {
        assert!(!Graph::complete(4).is_series_parallel());
        assert!(Graph::cycle(4).is_series_parallel());
        assert!(Graph::path(7).is_series_parallel());
        // Trees reduce away entirely.
        let mut star = Graph::new(5);
        for v in 1..5 {
            star.add_edge(0, v).unwrap();
        }
        assert!(star.is_series_parallel());
        // K5 and K4 plus extras fail.
        assert!(!Graph::complete(5).is_series_parallel());
    }

    #[test]
    fn two_tree_recognition() {
        assert!(Graph::complete(3).is_2_tree());
        assert!(!Graph::cycle(4).is_2_tree());
        assert!(!Graph::complete(4).is_2_tree());
        let (g, _) = Graph::k2().split_edge(0, 1).unwrap();
        let (g, _) = g.split_edge(0, 2).unwrap();
        assert!(g.is_2_tree());
        assert!(g.is_series_parallel());
    }

    #[test]
    fn two_tree_implies_series_parallel_on_split_builds() {
        // Replay random split sequences from K2 and check the invariants
        // m = 1 + 2 * splits and m = 2n - 3.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut g = Graph::k2();
            let splits = rng.gen_range(1..20);
            for _ in 0..splits {
                let edges: Vec<_> = g.edges().collect();
                let (u, v) = edges[rng.gen_range(0..edges.len())];
                g = g.split_edge(u, v).unwrap().0;
            }
            assert_eq!(g.m(), 1 + 2 * splits);
            assert_eq!(g.m(), 2 * g.n() as usize - 3);
            assert!(g.is_2_tree());
            assert!(g.is_series_parallel());
        }
    }

    #[test]
    fn construction_edge_count_replay() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut g = Graph::k2();
            let (mut splits, mut pendants, mut subs) = (0usize, 0usize, 0usize);
            for _ in 0..rng.gen_range(1..25) {
                match rng.gen_range(0..3) {
                    0 => {
                        let edges: Vec<_> = g.edges().collect();
                        let (u, v) = edges[rng.gen_range(0..edges.len())];
                        g = g.split_edge(u, v).unwrap().0;
                        splits += 1;
                    }
                    1 => {
                        let u = rng.gen_range(0..g.n());
                        g = g.add_pendant(u).unwrap().0;
                        pendants += 1;
                    }
                    _ => {
                        let edges: Vec<_> = g.edges().collect();
                        let (u, v) = edges[rng.gen_range(0..edges.len())];
                        g = g.series_subdivide(u, v).unwrap().0;
                        subs += 1;
                    }
                }
            }
            assert_eq!(g.m(), 1 + 2 * splits + pendants + subs);
        }
    }

    #[test]
    fn parse_basics() {
        let g = parse_graph("2 1\n0 1\n").unwrap();
        assert_eq!(g, Graph::k2());
        assert_eq!(parse_graph("2 1\n0 0\n"), Err(GraphParseError::SelfLoop(0)));
        assert_eq!(parse_graph(""), Err(GraphParseError::MissingHeader));
        assert!(matches!(
            parse_graph("2 1\n1 0\n"),
            Err(GraphParseError::BadEdge(_))
        ));
        assert_eq!(
            parse_graph("2 1\n0 1\n0 1\n"),
            Err(GraphParseError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            parse_graph("2 2\n0 1\n"),
            Err(GraphParseError::EdgeCountMismatch { expected: 2, found: 1 })
        );
        assert_eq!(
            parse_graph("2 1\n0 5\n"),
            Err(GraphParseError::VertexOutOfRange(5, 2))
        );
    }

    #[test]
    fn roundtrip_with_labels() {
        let mut g = Graph::cycle(4);
        g.set_label("a", 0).unwrap();
        g.set_label("b", 2).unwrap();
        let text = serialize_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn labels_are_injective() {
        let mut g = Graph::k2();
        g.set_label("a", 0).unwrap();
        assert!(g.set_label("a", 1).is_err());
        assert!(g.set_label("b", 0).is_err());
    }
}
