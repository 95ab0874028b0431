//! Simple undirected graphs on dense vertex indices `0..n`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeds;

/// Attempt cap for randomized generators.
pub const MAX_GENERATOR_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("generator gave up after {0} attempts")]
    AttemptsExhausted(usize),
    #[error("malformed edge list at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A finite simple graph.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted. Adjacency lists are
/// sorted and derived from the edge set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphDoc", into = "GraphDoc")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

/// On-disk form: `{"n": 4, "edges": [[0,1],[1,2]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphDoc> for Graph {
    type Error = GraphError;
    fn try_from(doc: GraphDoc) -> Result<Self, GraphError> {
        Graph::new(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphDoc {
    fn from(g: Graph) -> Self {
        GraphDoc {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, silently dropping duplicate edges. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `u < v`, sorted.
    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// `2|E| / |V|`; zero for the graph with no vertices.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Returns some triangle `(a, b, c)` with `a < b < c`, if one exists.
    pub fn find_triangle(&self) -> Option<(usize, usize, usize)> {
        for &(u, v) in &self.edges {
            // merge-intersect the sorted adjacency lists, looking only above v
            let (mut i, mut j) = (0, 0);
            let (a, b) = (&self.adj[u], &self.adj[v]);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = a[i];
                        let mut t = [u, v, w];
                        t.sort_unstable();
                        return Some((t[0], t[1], t[2]));
                    }
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// Sum of all degrees; equals `2|E|`.
    pub fn degree_sum(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Parses a DIMACS-style edge list: `c` comment lines, one `p edge n m`
    /// header, then `e u v` lines with 1-indexed endpoints.
    pub fn from_dimacs(text: &str) -> Result<Self, GraphError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| GraphError::Parse {
                    line: line_no,
                    msg: format!("bad integer {s:?}: {e}"),
                })
            };
            match parts.first().copied() {
                Some("p") => {
                    if parts.len() != 4 {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "expected `p edge <n> <m>`".into(),
                        });
                    }
                    if n.is_some() {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "duplicate problem line".into(),
                        });
                    }
                    n = Some(parse(parts[2])?);
                }
                Some("e") => {
                    let Some(nv) = n else {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "edge before problem line".into(),
                        });
                    };
                    if parts.len() != 3 {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "expected `e <u> <v>`".into(),
                        });
                    }
                    let (u, v) = (parse(parts[1])?, parse(parts[2])?);
                    if u == 0 || v == 0 || u > nv || v > nv {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: format!("endpoint out of range 1..={nv}"),
                        });
                    }
                    edges.push((u - 1, v - 1));
                }
                Some(other) => {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: format!("unknown line type {other:?}"),
                    })
                }
                None => {}
            }
        }
        let n = n.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing problem line".into(),
        })?;
        Graph::new(n, edges)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// Cycle `C_n` with edges `i -- i+1 (mod n)`.
pub fn cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameters(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path edges are in range")
}

pub fn complete(n: usize) -> Graph {
    Graph::new(
        n,
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
    )
    .expect("complete graph edges are in range")
}

/// `K_{a,b}`: left side `0..a`, right side `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::new(
        a + b,
        (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))),
    )
    .expect("bipartite edges are in range")
}

/// Star `K_{1,leaves}` centered at vertex 0.
pub fn star(leaves: usize) -> Graph {
    complete_bipartite(1, leaves)
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::new(10, outer.chain(spokes).chain(inner)).expect("petersen edges are in range")
}

/// Random `d`-regular simple graph on `n` vertices.
///
/// Points of the pairing model are matched one at a time, each new pair drawn
/// uniformly among the currently admissible ones (no loop, no repeated edge
/// and, with `triangle_free`, no edge closing a triangle). A dead end restarts
/// the attempt. The output is not exactly uniform, only valid.
pub fn random_regular(
    n: usize,
    d: usize,
    seed: u64,
    triangle_free: bool,
) -> Result<Graph, GraphError> {
    if d >= n.max(1) || !(n * d).is_multiple_of(2) {
        return Err(GraphError::InvalidParameters(format!(
            "no simple {d}-regular graph on {n} vertices (need d < n and n*d even)"
        )));
    }
    if triangle_free && d > n / 2 {
        return Err(GraphError::InvalidParameters(format!(
            "no triangle-free {d}-regular graph on {n} vertices (need d <= n/2)"
        )));
    }
    let mut rng = seeds::rng(seed, "gen-random-regular", &[n as u64, d as u64]);
    for _ in 0..MAX_GENERATOR_ATTEMPTS {
        if let Some(g) = pairing_attempt(n, d, triangle_free, &mut rng) {
            return Ok(g);
        }
    }
    Err(GraphError::AttemptsExhausted(MAX_GENERATOR_ATTEMPTS))
}

fn pairing_attempt<R: Rng>(n: usize, d: usize, triangle_free: bool, rng: &mut R) -> Option<Graph> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut remaining = vec![d; n];
    let mut open: Vec<usize> = (0..n).filter(|_| d > 0).collect();
    let admissible = |adj: &[BTreeSet<usize>], u: usize, v: usize| {
        u != v
            && !adj[u].contains(&v)
            && (!triangle_free || adj[u].intersection(&adj[v]).next().is_none())
    };
    while !open.is_empty() {
        // pick a point uniformly: vertex weighted by its open stubs
        let total: usize = open.iter().map(|&v| remaining[v]).sum();
        let mut r = rng.gen_range(0..total);
        let mut u = open[0];
        for &v in &open {
            if r < remaining[v] {
                u = v;
                break;
            }
            r -= remaining[v];
        }
        let candidates: Vec<usize> = open
            .iter()
            .copied()
            .filter(|&v| admissible(&adj, u, v))
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let weight: usize = candidates.iter().map(|&v| remaining[v]).sum();
        let mut r = rng.gen_range(0..weight);
        let mut v = candidates[0];
        for &c in &candidates {
            if r < remaining[c] {
                v = c;
                break;
            }
            r -= remaining[c];
        }
        adj[u].insert(v);
        adj[v].insert(u);
        remaining[u] -= 1;
        remaining[v] -= 1;
        open.retain(|&w| remaining[w] > 0);
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    Graph::new(n, edges).ok()
}

/// Erdős–Rényi `G(n, p)`, used by tests and experiments for arbitrary
/// small graphs.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seeds::rng(seed, "gen-gnp", &[n as u64]);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("gnp edges are in range")
}

/// Random triangle-free graph: edges of a shuffled complete graph are added
/// greedily while they close no triangle, each kept with probability `p`.
pub fn random_triangle_free(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seeds::rng(seed, "gen-triangle-free", &[n as u64]);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(&mut rng);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, v) in pairs {
        if !rng.gen_bool(p.clamp(0.0, 1.0)) {
            continue;
        }
        if adj[u].intersection(&adj[v]).next().is_some() {
            continue;
        }
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    Graph::new(n, edges).expect("edges are in range")
}
