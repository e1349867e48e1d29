//! Finite simple connected graphs, exact distances and δ-intervals.
//!
//! Every analysis in the crate runs on a [`Graph`] together with its dense
//! [`DistanceMatrix`]. Graphs are validated at construction (simple,
//! undirected, connected) and immutable afterwards.
//!
//! Quasi-lines `L_λ` (vertices ℤ, `i ~ j` when `0 < |i-j| <= λ`) are only
//! ever materialised as finite windows `[lo, hi]`. Geodesics between window
//! points are monotone and therefore stay inside the window, so the window
//! is isometrically embedded: `d(i, j) = ceil(|i-j| / λ)` holds exactly.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex-count cap applied by the default constructors.
pub const DEFAULT_VERTEX_CAP: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("graph with {requested} vertices exceeds the cap of {cap}")]
    SizeOverflow { requested: usize, cap: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

/// A finite, simple, undirected, connected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds and validates a graph with the default vertex cap.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_cap(n, edges, DEFAULT_VERTEX_CAP)
    }

    pub fn from_edges_with_cap(n: usize, edges: &[(usize, usize)], cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(GraphError::InvalidParam("graph needs at least one vertex".into()));
        }
        if n > cap {
            return Err(GraphError::SizeOverflow { requested: n, cap });
        }
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !sets[u].insert(v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            sets[v].insert(u);
        }
        let graph = Graph {
            adjacency: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
            labels: None,
        };
        let components = graph.component_count();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(graph)
    }

    /// Attaches per-vertex labels. The label count must equal the vertex count.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(GraphError::InvalidParam(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, or its index when the graph is unlabelled.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    fn component_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Breadth-first distances from `source`.
    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// Dense all-pairs shortest-path distances (edge-count metric).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.data[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[u32] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    pub fn diameter(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Defect `|d(x,y) - d(x,z) - d(z,y)|`.
    #[inline]
    pub fn defect(&self, x: usize, y: usize, z: usize) -> u32 {
        let through = self.get(x, z) + self.get(z, y);
        through - self.get(x, y)
    }

    /// `I_δ(x, y)` as a sorted vertex list.
    ///
    /// Panics if `x` or `y` is not a vertex.
    pub fn delta_interval(&self, q: IntervalQuery) -> Vec<usize> {
        assert!(q.x < self.n && q.y < self.n, "interval endpoints out of range");
        (0..self.n)
            .filter(|&z| self.defect(q.x, q.y, z) <= q.delta)
            .collect()
    }

    /// Largest pairwise distance inside `set` (0 for sets of size < 2).
    pub fn set_diameter(&self, set: &[usize]) -> u32 {
        let mut best = 0;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                best = best.max(self.get(a, b));
            }
        }
        best
    }
}

/// Endpoints and slack of a δ-interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalQuery {
    pub x: usize,
    pub y: usize,
    pub delta: u32,
}

impl IntervalQuery {
    pub fn new(x: usize, y: usize, delta: u32) -> Self {
        IntervalQuery { x, y, delta }
    }
}

/// Exact all-pairs distances: one BFS per source, sources run in parallel.
pub fn all_pairs_distances(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| g.bfs(s)).collect();
    DistanceMatrix {
        n,
        data: rows.into_iter().flatten().collect(),
    }
}

/// `I_δ(x, y) = { z : |d(x,y) - d(x,z) - d(z,y)| <= δ }`.
pub fn delta_interval(g: &Graph, dm: &DistanceMatrix, q: IntervalQuery) -> Vec<usize> {
    debug_assert_eq!(g.n(), dm.n());
    dm.delta_interval(q)
}

/// Cartesian (ℓ¹) product. Vertex `(a, b)` has index `a * n2 + b`.
pub fn l1_product(g1: &Graph, g2: &Graph) -> Result<Graph> {
    l1_product_with_cap(g1, g2, DEFAULT_VERTEX_CAP)
}

pub fn l1_product_with_cap(g1: &Graph, g2: &Graph, cap: usize) -> Result<Graph> {
    let (n1, n2) = (g1.n(), g2.n());
    let n = n1
        .checked_mul(n2)
        .filter(|&n| n <= cap)
        .ok_or(GraphError::SizeOverflow {
            requested: n1.saturating_mul(n2),
            cap,
        })?;
    let mut edges = Vec::new();
    for a in 0..n1 {
        for (b, b2) in g2.edges() {
            edges.push((a * n2 + b, a * n2 + b2));
        }
    }
    for (a, a2) in g1.edges() {
        for b in 0..n2 {
            edges.push((a * n2 + b, a2 * n2 + b));
        }
    }
    let labels = (0..n)
        .map(|v| format!("({},{})", g1.label(v / n2), g2.label(v % n2)))
        .collect();
    Graph::from_edges_with_cap(n, &edges, cap)?.with_labels(labels)
}

/// Families of generated graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphKind {
    Hypercube { k: u32 },
    Grid { rows: usize, cols: usize },
    Path { n: usize },
    Cycle { n: usize },
    RandomTree { n: usize, seed: u64 },
    /// Random spanning tree plus `extra` random chords.
    RandomConnected { n: usize, extra: usize, seed: u64 },
    QuasiLine { lambda: u32, lo: i64, hi: i64 },
    Complete { n: usize },
}

pub fn generate(kind: &GraphKind) -> Result<Graph> {
    generate_with_cap(kind, DEFAULT_VERTEX_CAP)
}

pub fn generate_with_cap(kind: &GraphKind, cap: usize) -> Result<Graph> {
    let invalid = |m: &str| Err(GraphError::InvalidParam(m.to_string()));
    match *kind {
        GraphKind::Hypercube { k } => {
            if k == 0 || k > 20 {
                return invalid("hypercube dimension must be in 1..=20");
            }
            let n = 1usize << k;
            if n > cap {
                return Err(GraphError::SizeOverflow { requested: n, cap });
            }
            let mut edges = Vec::new();
            for v in 0..n {
                for bit in 0..k {
                    let w = v ^ (1 << bit);
                    if v < w {
                        edges.push((v, w));
                    }
                }
            }
            let labels = (0..n)
                .map(|v| format!("{:0width$b}", v, width = k as usize))
                .collect();
            Graph::from_edges_with_cap(n, &edges, cap)?.with_labels(labels)
        }
        GraphKind::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return invalid("grid sides must be positive");
            }
            let n = rows.checked_mul(cols).ok_or(GraphError::SizeOverflow {
                requested: usize::MAX,
                cap,
            })?;
            if n > cap {
                return Err(GraphError::SizeOverflow { requested: n, cap });
            }
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        edges.push((v, v + cols));
                    }
                }
            }
            let labels = (0..n).map(|v| format!("({},{})", v / cols, v % cols)).collect();
            Graph::from_edges_with_cap(n, &edges, cap)?.with_labels(labels)
        }
        GraphKind::Path { n } => {
            if n == 0 {
                return invalid("path needs at least one vertex");
            }
            let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            Graph::from_edges_with_cap(n, &edges, cap)
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return invalid("cycle needs at least three vertices");
            }
            let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
            Graph::from_edges_with_cap(n, &edges, cap)
        }
        GraphKind::Complete { n } => {
            if n == 0 {
                return invalid("complete graph needs at least one vertex");
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            Graph::from_edges_with_cap(n, &edges, cap)
        }
        GraphKind::RandomTree { n, seed } => {
            if n == 0 {
                return invalid("tree needs at least one vertex");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            Graph::from_edges_with_cap(n, &edges, cap)
        }
        GraphKind::RandomConnected { n, extra, seed } => {
            if n == 0 {
                return invalid("graph needs at least one vertex");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut set: BTreeSet<(usize, usize)> =
                (1..n).map(|v| (rng.random_range(0..v), v)).collect();
            let max_edges = n * (n - 1) / 2;
            let target = (set.len() + extra).min(max_edges);
            while set.len() < target {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v {
                    set.insert((u.min(v), u.max(v)));
                }
            }
            let edges: Vec<_> = set.into_iter().collect();
            Graph::from_edges_with_cap(n, &edges, cap)
        }
        GraphKind::QuasiLine { lambda, lo, hi } => {
            if lambda == 0 {
                return invalid("quasi-line parameter must be positive");
            }
            if hi < lo {
                return invalid("quasi-line window is empty");
            }
            let span = (hi - lo) as u64 + 1;
            let n = usize::try_from(span).unwrap_or(usize::MAX);
            if n > cap {
                return Err(GraphError::SizeOverflow { requested: n, cap });
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n.min(i + lambda as usize + 1) {
                    edges.push((i, j));
                }
            }
            let labels = (0..n).map(|i| (lo + i as i64).to_string()).collect();
            Graph::from_edges_with_cap(n, &edges, cap)?.with_labels(labels)
        }
    }
}

/// Text formats understood by [`serialize`] and [`parse_as`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Dot,
    Json,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn serialize(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::EdgeList => {
            let mut out = String::new();
            if g.n() == 1 {
                out.push_str("# single vertex\n");
            }
            for (u, v) in g.edges() {
                let _ = writeln!(out, "{u} {v}");
            }
            out
        }
        GraphFormat::Dot => {
            let mut out = String::from("graph G {\n");
            for v in 0..g.n() {
                let _ = writeln!(out, "  {v} [label=\"{}\"];", escape_dot(&g.label(v)));
            }
            for (u, v) in g.edges() {
                let _ = writeln!(out, "  {u} -- {v};");
            }
            out.push_str("}\n");
            out
        }
        GraphFormat::Json => {
            let doc = GraphJson {
                n: g.n(),
                edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
                labels: g.labels.clone(),
            };
            serde_json::to_string(&doc).expect("graph json")
        }
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Parses any of the three formats, detected from the first significant character.
pub fn parse(text: &str) -> Result<Graph> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        parse_as(text, GraphFormat::Json)
    } else if trimmed.starts_with("graph") || trimmed.starts_with("strict") {
        parse_as(text, GraphFormat::Dot)
    } else {
        parse_as(text, GraphFormat::EdgeList)
    }
}

pub fn parse_as(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dot => parse_dot(text),
        GraphFormat::Json => {
            let doc: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let edges: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
            let g = Graph::from_edges(doc.n, &edges)?;
            match doc.labels {
                Some(l) => g.with_labels(l),
                None => Ok(g),
            }
        }
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_vertex = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            let col = toks.get(2).map_or(toks[0].0, |t| t.0);
            return Err(parse_err(lineno + 1, col, "expected exactly two vertex ids"));
        }
        let mut ends = [0usize; 2];
        for (slot, (col, tok)) in ends.iter_mut().zip(&toks) {
            *slot = tok
                .parse()
                .map_err(|_| parse_err(lineno + 1, *col, format!("invalid vertex id `{tok}`")))?;
        }
        max_vertex = max_vertex.max(ends[0]).max(ends[1]);
        edges.push((ends[0], ends[1]));
    }
    Graph::from_edges(max_vertex + 1, &edges)
}

fn parse_dot(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut labels: Vec<(usize, String)> = Vec::new();
    let mut max_vertex = 0usize;
    let mut opened = false;
    let mut closed = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        let indent = raw.len() - raw.trim_start().len() + 1;
        if line.is_empty() || line.starts_with("//") || line.starts_with('#') {
            continue;
        }
        if !opened {
            if !(line.starts_with("graph") || line.starts_with("strict graph")) || !line.ends_with('{') {
                return Err(parse_err(lineno, indent, "expected `graph <name> {`"));
            }
            opened = true;
            continue;
        }
        if line == "}" {
            closed = true;
            continue;
        }
        if closed {
            return Err(parse_err(lineno, indent, "content after closing brace"));
        }
        let body = line.strip_suffix(';').unwrap_or(line).trim();
        if let Some((lhs, rhs)) = body.split_once("--") {
            let u = parse_vertex(lhs.trim(), lineno, indent)?;
            let v = parse_vertex(rhs.trim(), lineno, indent + lhs.len() + 2)?;
            max_vertex = max_vertex.max(u).max(v);
            edges.push((u, v));
        } else if let Some((vertex, attrs)) = body.split_once('[') {
            let v = parse_vertex(vertex.trim(), lineno, indent)?;
            max_vertex = max_vertex.max(v);
            let attrs = attrs.trim_end_matches(']');
            if let Some(rest) = attrs.trim().strip_prefix("label=") {
                let label = rest
                    .trim()
                    .strip_prefix('"')
                    .and_then(|s| s.strip_suffix('"'))
                    .ok_or_else(|| parse_err(lineno, indent, "label must be quoted"))?;
                labels.push((v, label.replace("\\\"", "\"").replace("\\\\", "\\")));
            }
        } else {
            let v = parse_vertex(body, lineno, indent)?;
            max_vertex = max_vertex.max(v);
        }
    }
    if !opened {
        return Err(parse_err(1, 1, "missing graph header"));
    }
    if !closed {
        return Err(parse_err(text.lines().count().max(1), 1, "missing closing brace"));
    }
    let g = Graph::from_edges(max_vertex + 1, &edges)?;
    if labels.is_empty() {
        return Ok(g);
    }
    let mut all: Vec<String> = (0..g.n()).map(|v| v.to_string()).collect();
    for (v, l) in labels {
        all[v] = l;
    }
    // Labels that merely repeat the index carry no information.
    if all.iter().enumerate().all(|(v, l)| *l == v.to_string()) {
        return Ok(g);
    }
    g.with_labels(all)
}

fn parse_vertex(tok: &str, line: usize, column: usize) -> Result<usize> {
    tok.trim_matches('"')
        .parse()
        .map_err(|_| parse_err(line, column, format!("invalid vertex id `{tok}`")))
}

/// Brute-force isomorphism test for graphs with at most 10 vertices.
///
/// Returns `None` when either graph is larger than that.
pub fn is_isomorphic_small(a: &Graph, b: &Graph) -> Option<bool> {
    const LIMIT: usize = 10;
    if a.n() > LIMIT || b.n() > LIMIT {
        return None;
    }
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Some(false);
    }
    let mut da: Vec<usize> = (0..a.n()).map(|v| a.neighbors(v).len()).collect();
    let mut db: Vec<usize> = (0..b.n()).map(|v| b.neighbors(v).len()).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Some(false);
    }
    let mut map = vec![usize::MAX; a.n()];
    let mut used = vec![false; b.n()];
    Some(extend_iso(a, b, 0, &mut map, &mut used))
}

fn extend_iso(a: &Graph, b: &Graph, v: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if v == a.n() {
        return true;
    }
    for w in 0..b.n() {
        if used[w] || a.neighbors(v).len() != b.neighbors(w).len() {
            continue;
        }
        let consistent = (0..v).all(|u| a.has_edge(u, v) == b.has_edge(map[u], w));
        if !consistent {
            continue;
        }
        map[v] = w;
        used[w] = true;
        if extend_iso(a, b, v + 1, map, used) {
            return true;
        }
        used[w] = false;
    }
    map[v] = usize::MAX;
    false
}
