//! Covers `(L, H)` of a graph.
//!
//! Every vertex `v` owns a list `L(v)` of color ids; colors are dense global
//! integers. For each graph edge `uv` the cover stores a matching between
//! `L(u)` and `L(v)`. The union of those matchings is the cover graph `H`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;
use crate::seeds;

pub type Edge = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("color id {id} is not dense (total list entries: {total})")]
    SparseColorId { id: usize, total: usize },
    #[error("k_per_vertex has {k} entries but there are {lists} lists")]
    KLengthMismatch { k: usize, lists: usize },
    #[error("k_per_vertex[{vertex}] = {claimed} but the list has {actual} colors")]
    KValueMismatch {
        vertex: usize,
        claimed: usize,
        actual: usize,
    },
    #[error("bad matching key {0:?}, expected \"u,v\"")]
    BadKey(String),
    #[error("shifted cycle cover needs an even length >= 4, got {0}")]
    OddCycle(usize),
    #[error("bernoulli keep-probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
}

/// How `random_cover` builds each edge's matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "q")]
pub enum CoverMode {
    /// A uniformly random perfect matching per edge.
    Perfect,
    /// A uniform perfect matching thinned by keeping each pair with
    /// probability `q`.
    Bernoulli(f64),
}

/// A cover `(L, H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    lists: Vec<Vec<usize>>,
    matchings: BTreeMap<Edge, Vec<(usize, usize)>>,
    owner: Vec<Option<usize>>,
    neighbors: Vec<Vec<usize>>,
}

/// A cover condition that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverViolation {
    /// The cover has a different number of lists than the graph has vertices.
    ListCount { vertices: usize, lists: usize },
    /// Lists are not pairwise disjoint.
    SharedColor {
        color: usize,
        first: usize,
        second: usize,
    },
    /// A matching sits on a pair that is not an edge of the graph.
    NonEdge { u: usize, v: usize },
    /// A matched pair does not join `L(u)` and `L(v)`.
    ForeignPair { u: usize, v: usize, x: usize, y: usize },
    /// A color is used by two pairs of the same edge matching.
    NotAMatching { u: usize, v: usize, color: usize },
}

impl std::fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ListCount { vertices, lists } => {
                write!(f, "graph has {vertices} vertices but the cover has {lists} lists")
            }
            Self::SharedColor { color, first, second } => write!(
                f,
                "lists not disjoint: color {color} belongs to vertices {first} and {second}"
            ),
            Self::NonEdge { u, v } => write!(f, "condition 1 violated: matching on non-edge {u},{v}"),
            Self::ForeignPair { u, v, x, y } => write!(
                f,
                "pair ({x},{y}) on edge {u},{v} does not join L({u}) and L({v})"
            ),
            Self::NotAMatching { u, v, color } => write!(
                f,
                "matching condition violated: color {color} appears in two pairs on edge {u},{v}"
            ),
        }
    }
}

/// Result of [`validate_cover`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<CoverViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Cover {
    /// Assembles a cover from raw lists and per-edge pair lists.
    ///
    /// Color ids must be dense (below the total number of list entries) and
    /// pairs are reoriented so that `x` belongs to the smaller endpoint when
    /// ownership allows it. Conditions of the cover definition are *not*
    /// checked here; see [`validate_cover`].
    pub fn from_parts(
        lists: Vec<Vec<usize>>,
        matchings: BTreeMap<Edge, Vec<(usize, usize)>>,
    ) -> Result<Self, CoverError> {
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut owner = vec![None; total];
        for (v, list) in lists.iter().enumerate() {
            for &x in list {
                if x >= total {
                    return Err(CoverError::SparseColorId { id: x, total });
                }
                owner[x].get_or_insert(v);
            }
        }
        let mut canon: BTreeMap<Edge, Vec<(usize, usize)>> = BTreeMap::new();
        let mut neighbors = vec![Vec::new(); total];
        for ((a, b), pairs) in matchings {
            let (u, v) = (a.min(b), a.max(b));
            let entry = canon.entry((u, v)).or_default();
            for (x, y) in pairs {
                for id in [x, y] {
                    if id >= total {
                        return Err(CoverError::SparseColorId { id, total });
                    }
                }
                let (x, y) = if owner[x] == Some(v) && owner[y] == Some(u) {
                    (y, x)
                } else {
                    (x, y)
                };
                entry.push((x, y));
                neighbors[x].push(y);
                neighbors[y].push(x);
            }
            entry.sort_unstable();
        }
        for ns in &mut neighbors {
            ns.sort_unstable();
            ns.dedup();
        }
        Ok(Cover {
            lists,
            matchings: canon,
            owner,
            neighbors,
        })
    }

    /// Fresh, vertex-block-contiguous lists: vertex `v` gets the next
    /// `sizes[v]` ids.
    pub fn block_lists(sizes: &[usize]) -> Vec<Vec<usize>> {
        let mut next = 0;
        sizes
            .iter()
            .map(|&s| {
                let list: Vec<usize> = (next..next + s).collect();
                next += s;
                list
            })
            .collect()
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.lists.len()
    }

    #[inline]
    pub fn num_colors(&self) -> usize {
        self.owner.len()
    }

    #[inline]
    pub fn list(&self, v: usize) -> &[usize] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    /// Vertex whose list contains `x` (the first one, if lists overlap).
    #[inline]
    pub fn owner(&self, x: usize) -> Option<usize> {
        self.owner.get(x).copied().flatten()
    }

    /// `N_H(x)`, sorted.
    #[inline]
    pub fn color_neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    /// Pairs matched across edge `uv`, oriented `(x in L(min), y in L(max))`.
    pub fn matching(&self, u: usize, v: usize) -> &[(usize, usize)] {
        self.matchings
            .get(&(u.min(v), u.max(v)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn matchings(&self) -> &BTreeMap<Edge, Vec<(usize, usize)>> {
        &self.matchings
    }

    pub fn k_per_vertex(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    /// Common list size, when every list has the same size.
    pub fn uniform_k(&self) -> Option<usize> {
        let first = self.lists.first()?.len();
        self.lists.iter().all(|l| l.len() == first).then_some(first)
    }

    pub fn are_matched(&self, x: usize, y: usize) -> bool {
        self.neighbors
            .get(x)
            .is_some_and(|ns| ns.binary_search(&y).is_ok())
    }
}

/// Checks the cover definition against `g`: disjoint lists, matchings only on
/// graph edges joining the right lists, and the matching condition.
pub fn validate_cover(g: &Graph, c: &Cover) -> ValidationReport {
    let mut violations = Vec::new();
    if c.num_vertices() != g.n() {
        violations.push(CoverViolation::ListCount {
            vertices: g.n(),
            lists: c.num_vertices(),
        });
    }
    let mut seen: Vec<Option<usize>> = vec![None; c.num_colors()];
    for (v, list) in c.lists.iter().enumerate() {
        for &x in list {
            match seen[x] {
                Some(first) => violations.push(CoverViolation::SharedColor {
                    color: x,
                    first,
                    second: v,
                }),
                None => seen[x] = Some(v),
            }
        }
    }
    for (&(u, v), pairs) in &c.matchings {
        if pairs.is_empty() {
            continue;
        }
        if !g.has_edge(u, v) {
            violations.push(CoverViolation::NonEdge { u, v });
        }
        let mut used = BTreeSet::new();
        for &(x, y) in pairs {
            let joins = (c.owner(x) == Some(u) && c.owner(y) == Some(v))
                || (c.owner(x) == Some(v) && c.owner(y) == Some(u));
            if !joins {
                violations.push(CoverViolation::ForeignPair { u, v, x, y });
            }
            for z in [x, y] {
                if !used.insert(z) {
                    violations.push(CoverViolation::NotAMatching { u, v, color: z });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// The canonical cover of a list assignment: `(v, c)` is matched to `(u, c)`
/// across every edge `uv` whose lists both contain label `c`.
#[derive(Debug, Clone)]
pub struct Lift<L> {
    pub cover: Cover,
    /// Label of each color id.
    pub labels: Vec<L>,
}

impl<L> Lift<L> {
    /// Reads a cover coloring back as a list coloring.
    pub fn labels_of(&self, chosen: &[usize]) -> Vec<&L> {
        chosen.iter().map(|&x| &self.labels[x]).collect()
    }
}

/// Lifts a list assignment to a cover. Repeated labels within one list are
/// collapsed.
pub fn lift_from_lists<L: Ord + Clone>(g: &Graph, lists: &[Vec<L>]) -> Lift<L> {
    assert_eq!(lists.len(), g.n(), "one list per vertex");
    let sorted: Vec<Vec<L>> = lists
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort();
            l.dedup();
            l
        })
        .collect();
    let mut labels = Vec::new();
    let mut color_lists = Vec::with_capacity(sorted.len());
    for l in &sorted {
        let ids: Vec<usize> = (labels.len()..labels.len() + l.len()).collect();
        labels.extend(l.iter().cloned());
        color_lists.push(ids);
    }
    let mut matchings = BTreeMap::new();
    for &(u, v) in g.edges() {
        let mut pairs = Vec::new();
        let (lu, lv) = (&sorted[u], &sorted[v]);
        let (mut i, mut j) = (0, 0);
        while i < lu.len() && j < lv.len() {
            match lu[i].cmp(&lv[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    pairs.push((color_lists[u][i], color_lists[v][j]));
                    i += 1;
                    j += 1;
                }
            }
        }
        matchings.insert((u, v), pairs);
    }
    let cover = Cover::from_parts(color_lists, matchings).expect("lift ids are dense");
    Lift { cover, labels }
}

/// Random cover with `k` fresh colors per vertex.
pub fn random_cover(g: &Graph, k: usize, seed: u64, mode: CoverMode) -> Result<Cover, CoverError> {
    if let CoverMode::Bernoulli(q) = mode {
        if !(0.0..=1.0).contains(&q) {
            return Err(CoverError::BadProbability(q));
        }
    }
    let mut rng = seeds::rng(seed, "random-cover", &[k as u64]);
    let lists = Cover::block_lists(&vec![k; g.n()]);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut matchings = BTreeMap::new();
    for &(u, v) in g.edges() {
        perm.shuffle(&mut rng);
        let mut pairs = Vec::with_capacity(k);
        for (i, &j) in perm.iter().enumerate() {
            let keep = match mode {
                CoverMode::Perfect => true,
                CoverMode::Bernoulli(q) => rng.gen_bool(q),
            };
            if keep {
                pairs.push((lists[u][i], lists[v][j]));
            }
        }
        matchings.insert((u, v), pairs);
    }
    Ok(Cover::from_parts(lists, matchings).expect("block ids are dense"))
}

/// Cover of `C_m` with two colors per vertex: identity matchings everywhere
/// except the closing edge `(0, m-1)`, which carries the swap. For even `m` it
/// has no coloring, so `chi_c(C_m) >= 3`.
pub fn shifted_cycle_cover(m: usize) -> Result<Cover, CoverError> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(CoverError::OddCycle(m));
    }
    let lists = Cover::block_lists(&vec![2; m]);
    let mut matchings = BTreeMap::new();
    for i in 0..m - 1 {
        let (a, b) = (&lists[i], &lists[i + 1]);
        matchings.insert((i, i + 1), vec![(a[0], b[0]), (a[1], b[1])]);
    }
    let (first, last) = (&lists[0], &lists[m - 1]);
    matchings.insert((0, m - 1), vec![(first[0], last[1]), (first[1], last[0])]);
    Ok(Cover::from_parts(lists, matchings).expect("block ids are dense"))
}

/// Cover of `C_m` with two colors per vertex where edge `i` of the canonical
/// edge order carries the swap matching iff bit `i` of `mask` is set.
pub fn cycle_cover_from_mask(g: &Graph, mask: u64) -> Cover {
    let lists = Cover::block_lists(&vec![2; g.n()]);
    let mut matchings = BTreeMap::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let (a, b) = (&lists[u], &lists[v]);
        let pairs = if mask >> i & 1 == 1 {
            vec![(a[0], b[1]), (a[1], b[0])]
        } else {
            vec![(a[0], b[0]), (a[1], b[1])]
        };
        matchings.insert((u, v), pairs);
    }
    Cover::from_parts(lists, matchings).expect("block ids are dense")
}

#[derive(Serialize, Deserialize)]
struct CoverDocIn {
    k_per_vertex: Vec<usize>,
    lists: Vec<Vec<usize>>,
    matchings: BTreeMap<String, Vec<[usize; 2]>>,
}

struct MatchingsOut<'a>(&'a BTreeMap<Edge, Vec<(usize, usize)>>);

impl Serialize for MatchingsOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (&(u, v), pairs) in self.0 {
            let pairs: Vec<[usize; 2]> = pairs.iter().map(|&(x, y)| [x, y]).collect();
            map.serialize_entry(&format!("{u},{v}"), &pairs)?;
        }
        map.end()
    }
}

impl Serialize for Cover {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            k_per_vertex: Vec<usize>,
            lists: &'a [Vec<usize>],
            matchings: MatchingsOut<'a>,
        }
        Out {
            k_per_vertex: self.k_per_vertex(),
            lists: &self.lists,
            matchings: MatchingsOut(&self.matchings),
        }
        .serialize(s)
    }
}

fn parse_key(key: &str) -> Result<Edge, CoverError> {
    let bad = || CoverError::BadKey(key.to_string());
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let u = a.trim().parse().map_err(|_| bad())?;
    let v = b.trim().parse().map_err(|_| bad())?;
    Ok((u, v))
}

impl<'de> Deserialize<'de> for Cover {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = CoverDocIn::deserialize(d)?;
        if doc.k_per_vertex.len() != doc.lists.len() {
            return Err(D::Error::custom(CoverError::KLengthMismatch {
                k: doc.k_per_vertex.len(),
                lists: doc.lists.len(),
            }));
        }
        for (vertex, (&claimed, list)) in doc.k_per_vertex.iter().zip(&doc.lists).enumerate() {
            if claimed != list.len() {
                return Err(D::Error::custom(CoverError::KValueMismatch {
                    vertex,
                    claimed,
                    actual: list.len(),
                }));
            }
        }
        let mut matchings: BTreeMap<Edge, Vec<(usize, usize)>> = BTreeMap::new();
        for (key, pairs) in doc.matchings {
            let (u, v) = parse_key(&key).map_err(D::Error::custom)?;
            matchings
                .entry((u, v))
                .or_default()
                .extend(pairs.into_iter().map(|[x, y]| (x, y)));
        }
        Cover::from_parts(doc.lists, matchings).map_err(D::Error::custom)
    }
}
