//! Median certification, almost-median frontiers, hyperplanes and cubical
//! dimension.
//!
//! A triple `(x, y, z)` is summarised by the intersection
//! `I_δ(x,y) ∩ I_δ(y,z) ∩ I_δ(x,z)`. At δ = 0 a graph is median when every
//! such intersection is a single vertex; the almost-median frontier records,
//! for each δ, whether all intersections are non-empty and the largest
//! diameter Δ among them.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{DistanceMatrix, Graph};

/// Hyperplane count above which [`cubical_dimension`] refuses to search.
pub const DEFAULT_HYPERPLANE_CAP: usize = 24;

/// Vertex count up to which interval bitsets are precomputed for all pairs.
const TABLE_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MedianError {
    #[error("graph is not median (witness triple {0:?})")]
    NotMedian([usize; 3]),
    #[error("{count} hyperplanes exceed the cap of {cap}")]
    TooManyHyperplanes { count: usize, cap: usize },
    #[error("edge class containing {edge:?} does not split the graph into two halfspaces")]
    InvalidHyperplane { edge: (usize, usize) },
}

/// Triple whose median set is not a singleton, with that median set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MedianWitness {
    pub triple: [usize; 3],
    pub medians: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MedianReport {
    pub is_median: bool,
    pub triples_checked: u64,
    pub witness: Option<MedianWitness>,
}

/// Interval bitsets `I_δ(x, y)` for every ordered pair.
struct IntervalTable {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl IntervalTable {
    fn build(dm: &DistanceMatrix, delta: u32) -> Self {
        let n = dm.n();
        let words = n.div_ceil(64);
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut row = vec![0u64; n * words];
                for y in 0..n {
                    let slot = &mut row[y * words..(y + 1) * words];
                    for z in 0..n {
                        if dm.defect(x, y, z) <= delta {
                            slot[z / 64] |= 1 << (z % 64);
                        }
                    }
                }
                row
            })
            .collect();
        IntervalTable {
            n,
            words,
            bits: rows.into_iter().flatten().collect(),
        }
    }

    fn get(&self, x: usize, y: usize) -> &[u64] {
        let start = (x * self.n + y) * self.words;
        &self.bits[start..start + self.words]
    }
}

/// Computes triple intersections either from a precomputed table or by scanning.
struct TripleOracle<'a> {
    dm: &'a DistanceMatrix,
    delta: u32,
    table: Option<IntervalTable>,
}

impl<'a> TripleOracle<'a> {
    fn new(dm: &'a DistanceMatrix, delta: u32) -> Self {
        let table = (dm.n() <= TABLE_LIMIT).then(|| IntervalTable::build(dm, delta));
        TripleOracle { dm, delta, table }
    }

    fn intersection(&self, x: usize, y: usize, z: usize, out: &mut Vec<usize>) {
        out.clear();
        match &self.table {
            Some(t) => {
                let (a, b, c) = (t.get(x, y), t.get(y, z), t.get(x, z));
                for (w, ((a, b), c)) in a.iter().zip(b).zip(c).enumerate() {
                    let mut word = a & b & c;
                    while word != 0 {
                        let bit = word.trailing_zeros() as usize;
                        out.push(w * 64 + bit);
                        word &= word - 1;
                    }
                }
            }
            None => {
                let dm = self.dm;
                out.extend((0..dm.n()).filter(|&w| {
                    dm.defect(x, y, w) <= self.delta
                        && dm.defect(y, z, w) <= self.delta
                        && dm.defect(x, z, w) <= self.delta
                }));
            }
        }
    }

    fn is_empty(&self, x: usize, y: usize, z: usize) -> bool {
        match &self.table {
            Some(t) => {
                let (a, b, c) = (t.get(x, y), t.get(y, z), t.get(x, z));
                a.iter().zip(b).zip(c).all(|((a, b), c)| a & b & c == 0)
            }
            None => {
                let mut buf = Vec::new();
                self.intersection(x, y, z, &mut buf);
                buf.is_empty()
            }
        }
    }
}

/// Median set `I_0(x,y) ∩ I_0(y,z) ∩ I_0(x,z)` of a single triple.
pub fn medians(dm: &DistanceMatrix, x: usize, y: usize, z: usize) -> Vec<usize> {
    intersection_at(dm, x, y, z, 0)
}

/// `I_δ(x,y) ∩ I_δ(y,z) ∩ I_δ(x,z)` for a single triple.
pub fn intersection_at(dm: &DistanceMatrix, x: usize, y: usize, z: usize, delta: u32) -> Vec<usize> {
    (0..dm.n())
        .filter(|&w| {
            dm.defect(x, y, w) <= delta && dm.defect(y, z, w) <= delta && dm.defect(x, z, w) <= delta
        })
        .collect()
}

/// Unique-median test over all triples of distinct vertices.
///
/// Triples with a repeated vertex always have the repeated vertex as their
/// unique median and are not enumerated. The witness is the
/// lexicographically least failing triple.
pub fn check_median(g: &Graph, dm: &DistanceMatrix) -> MedianReport {
    debug_assert_eq!(g.n(), dm.n());
    let n = dm.n();
    let oracle = TripleOracle::new(dm, 0);
    let witness = (0..n).into_par_iter().find_map_first(|x| {
        let mut buf = Vec::new();
        for y in x + 1..n {
            for z in y + 1..n {
                oracle.intersection(x, y, z, &mut buf);
                if buf.len() != 1 {
                    return Some(MedianWitness {
                        triple: [x, y, z],
                        medians: buf,
                    });
                }
            }
        }
        None
    });
    let n = n as u64;
    MedianReport {
        is_median: witness.is_none(),
        triples_checked: n * n.saturating_sub(1) * n.saturating_sub(2) / 6,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrontierEntry {
    pub delta: u32,
    pub feasible: bool,
    /// Largest intersection diameter over all triples; `None` when infeasible.
    #[serde(rename = "Delta")]
    pub max_diameter: Option<u32>,
    /// Least empty triple when infeasible, least triple attaining Δ otherwise.
    pub witness: Option<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlmostMedianFrontier {
    pub delta_max: u32,
    pub entries: Vec<FrontierEntry>,
}

impl AlmostMedianFrontier {
    /// Least feasible δ with its Δ.
    pub fn least_feasible(&self) -> Option<(u32, u32)> {
        self.entries
            .iter()
            .find(|e| e.feasible)
            .map(|e| (e.delta, e.max_diameter.unwrap_or(0)))
    }

    pub fn entry(&self, delta: u32) -> Option<&FrontierEntry> {
        self.entries.iter().find(|e| e.delta == delta)
    }

    /// JSON report `{"schema", "graph", "entries": [...]}`.
    pub fn to_json(&self, graph_name: &str) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::SCHEMA,
            "graph": graph_name,
            "entries": self.entries,
        })
    }
}

/// Exact frontier for δ in `0..=delta_max`, over all triples `x <= y <= z`.
pub fn almost_median_frontier(g: &Graph, dm: &DistanceMatrix, delta_max: u32) -> AlmostMedianFrontier {
    debug_assert_eq!(g.n(), dm.n());
    let entries = (0..=delta_max).map(|delta| frontier_entry(dm, delta)).collect();
    AlmostMedianFrontier { delta_max, entries }
}

fn frontier_entry(dm: &DistanceMatrix, delta: u32) -> FrontierEntry {
    let n = dm.n();
    let oracle = TripleOracle::new(dm, delta);
    let empty = (0..n).into_par_iter().find_map_first(|x| {
        for y in x..n {
            for z in y..n {
                if oracle.is_empty(x, y, z) {
                    return Some([x, y, z]);
                }
            }
        }
        None
    });
    if let Some(triple) = empty {
        return FrontierEntry {
            delta,
            feasible: false,
            max_diameter: None,
            witness: Some(triple),
        };
    }
    let per_x: Vec<(u32, [usize; 3])> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut buf = Vec::new();
            let mut best = (0u32, [x, x, x]);
            for y in x..n {
                for z in y..n {
                    oracle.intersection(x, y, z, &mut buf);
                    let diam = dm.set_diameter(&buf);
                    if diam > best.0 {
                        best = (diam, [x, y, z]);
                    }
                }
            }
            best
        })
        .collect();
    // Ties resolve to the smallest x because per_x is in x order.
    let (diam, triple) = per_x
        .into_iter()
        .fold((0u32, [0, 0, 0]), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
    FrontierEntry {
        delta,
        feasible: true,
        max_diameter: Some(diam),
        witness: Some(triple),
    }
}

/// A Θ*-class of edges with the two halfspaces it separates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hyperplane {
    pub edges: Vec<(usize, usize)>,
    /// `halfspaces[0]` contains the smaller endpoint of the first edge.
    pub halfspaces: [Vec<usize>; 2],
}

impl Hyperplane {
    pub fn side_of(&self, v: usize) -> usize {
        if self.halfspaces[0].binary_search(&v).is_ok() {
            0
        } else {
            1
        }
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.side_of(x) != self.side_of(y)
    }

    /// Two hyperplanes cross when all four halfspace intersections are non-empty.
    pub fn crosses(&self, other: &Hyperplane) -> bool {
        self.halfspaces
            .iter()
            .all(|a| other.halfspaces.iter().all(|b| sorted_intersect(a, b)))
    }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Djoković relation Θ: `uv Θ xy` iff `d(u,x) + d(v,y) != d(u,y) + d(v,x)`.
pub fn djokovic_related(dm: &DistanceMatrix, e: (usize, usize), f: (usize, usize)) -> bool {
    let (u, v) = e;
    let (x, y) = f;
    dm.get(u, x) + dm.get(v, y) != dm.get(u, y) + dm.get(v, x)
}

/// Θ*-classes of a median graph, each validated to split the graph in two.
pub fn hyperplanes(g: &Graph, dm: &DistanceMatrix) -> Result<Vec<Hyperplane>, MedianError> {
    let report = check_median(g, dm);
    if let Some(w) = report.witness {
        return Err(MedianError::NotMedian(w.triple));
    }
    let edges = g.edges();
    let m = edges.len();
    let related: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i + 1..m)
                .filter(|&j| djokovic_related(dm, edges[i], edges[j]))
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(m);
    for (i, rel) in related.iter().enumerate() {
        for &j in rel {
            uf.union(i, j);
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of_root = vec![usize::MAX; m];
    for i in 0..m {
        let r = uf.find(i);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[class_of_root[r]].push(i);
    }
    classes
        .into_iter()
        .map(|class| {
            let class_edges: Vec<(usize, usize)> = class.iter().map(|&i| edges[i]).collect();
            build_hyperplane(g, dm, class_edges)
        })
        .collect()
}

fn build_hyperplane(
    g: &Graph,
    dm: &DistanceMatrix,
    class_edges: Vec<(usize, usize)>,
) -> Result<Hyperplane, MedianError> {
    let (u, v) = class_edges[0];
    let n = g.n();
    let near_u: Vec<usize> = (0..n).filter(|&w| dm.get(w, u) < dm.get(w, v)).collect();
    let near_v: Vec<usize> = (0..n).filter(|&w| dm.get(w, v) < dm.get(w, u)).collect();
    let invalid = MedianError::InvalidHyperplane { edge: (u, v) };
    if near_u.len() + near_v.len() != n {
        return Err(invalid);
    }
    // Removing the class must leave exactly these two sets as components.
    let removed = |a: usize, b: usize| class_edges.binary_search(&(a.min(b), a.max(b))).is_ok();
    let mut comp = vec![usize::MAX; n];
    let mut components = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = components;
        while let Some(a) = stack.pop() {
            for &b in g.neighbors(a) {
                if comp[b] == usize::MAX && !removed(a, b) {
                    comp[b] = components;
                    stack.push(b);
                }
            }
        }
        components += 1;
    }
    let consistent = components == 2
        && near_u.iter().all(|&w| comp[w] == comp[u])
        && near_v.iter().all(|&w| comp[w] == comp[v]);
    if !consistent {
        return Err(invalid);
    }
    Ok(Hyperplane {
        edges: class_edges,
        halfspaces: [near_u, near_v],
    })
}

/// Number of hyperplanes separating `x` from `y`.
pub fn separating_count(hs: &[Hyperplane], x: usize, y: usize) -> usize {
    hs.iter().filter(|h| h.separates(x, y)).count()
}

/// Maximum number of pairwise-crossing hyperplanes (exhaustive clique search).
pub fn cubical_dimension(hs: &[Hyperplane]) -> Result<usize, MedianError> {
    cubical_dimension_with_cap(hs, DEFAULT_HYPERPLANE_CAP)
}

pub fn cubical_dimension_with_cap(hs: &[Hyperplane], cap: usize) -> Result<usize, MedianError> {
    let count = hs.len();
    if count > cap || count > 64 {
        return Err(MedianError::TooManyHyperplanes { count, cap });
    }
    let mut adj = vec![0u64; count];
    for i in 0..count {
        for j in i + 1..count {
            if hs[i].crosses(&hs[j]) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let all = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
    Ok(max_clique(&adj, 0, all, 0))
}

fn max_clique(adj: &[u64], size: usize, candidates: u64, best: usize) -> usize {
    if candidates == 0 {
        return best.max(size);
    }
    let mut best = best;
    let mut cand = candidates;
    while cand != 0 {
        if size + cand.count_ones() as usize <= best {
            break;
        }
        let v = cand.trailing_zeros() as usize;
        cand &= !(1 << v);
        best = max_clique(adj, size + 1, cand & adj[v], best);
    }
    best.max(size)
}
