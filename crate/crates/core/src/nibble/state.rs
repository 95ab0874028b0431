use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::solver::{first_violation, Coloring};

use super::NibbleError;

/// Color weights `p` bounded by the cap `p̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Weighting<T> {
    p_hat: T,
    p: Vec<T>,
}

impl<T: Scalar> Weighting<T> {
    pub fn new(p: Vec<T>, p_hat: T) -> Result<Self, NibbleError> {
        if !(p_hat > T::zero() && p_hat.is_finite()) {
            return Err(NibbleError::BadWeighting(format!("cap must be positive, got {p_hat}")));
        }
        if let Some((x, w)) = p
            .iter()
            .enumerate()
            .find(|(_, &w)| !(w >= T::zero() && w <= p_hat))
        {
            return Err(NibbleError::BadWeighting(format!(
                "p({x}) = {w} outside [0, {p_hat}]"
            )));
        }
        Ok(Weighting { p_hat, p })
    }

    pub fn uniform(num_colors: usize, value: T, p_hat: T) -> Result<Self, NibbleError> {
        Self::new(vec![value; num_colors], p_hat)
    }

    #[inline]
    pub fn get(&self, x: usize) -> T {
        self.p[x]
    }

    #[inline]
    pub fn p_hat(&self) -> T {
        self.p_hat
    }

    pub fn values(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `p(x) == p̂`, compared exactly: the cap is only ever assigned, never
    /// recomputed.
    #[inline]
    pub fn at_cap(&self, x: usize) -> bool {
        self.p[x] == self.p_hat
    }

    /// `p(x)` strictly between 0 and the cap.
    #[inline]
    pub fn is_moderate(&self, x: usize) -> bool {
        let w = self.p[x];
        w > T::zero() && w < self.p_hat
    }
}

/// One reduct step's removed vertices and the colors they keep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductRecord {
    /// The removed set `A`, ascending.
    pub removed: Vec<usize>,
    /// `L(v) ∩ S` for each removed vertex, parallel to `removed`.
    pub forced_colors: Vec<Vec<usize>>,
}

/// Why a state is not nice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum NotNice<T> {
    /// Smallest moderate mass is not positive.
    NoModerateMass { vertex: usize, mass: T },
    /// `2 p(x) > min p_m(v)` for a moderate color.
    HeavyColor { color: usize, weight: T, delta: T },
    /// `2 sqrt(Σ p_m(uv)) > min p_m(v)`.
    EdgeMass { vertex: usize, sum: T, delta: T },
}

/// The current instance of the nibble: an induced subgraph of the original
/// graph (tracked by a vertex mask), the untouched original cover, and the
/// current weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductState<T> {
    graph: Arc<Graph>,
    cover: Arc<Cover>,
    alive: Vec<bool>,
    weighting: Weighting<T>,
    history: Vec<ReductRecord>,
    max_degree: usize,
}

/// The current subgraph and cover renumbered densely, for the exact solver.
#[derive(Debug, Clone)]
pub struct InducedInstance {
    pub graph: Graph,
    pub cover: Cover,
    /// New vertex index to original vertex.
    pub vertices: Vec<usize>,
    /// New color id to original color id.
    pub colors: Vec<usize>,
}

impl InducedInstance {
    /// Maps a coloring of the induced instance back to original ids, one
    /// entry per original vertex (`None` outside the subgraph).
    pub fn to_original(&self, coloring: &Coloring, n_original: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_original];
        for (i, &x) in coloring.chosen.iter().enumerate() {
            out[self.vertices[i]] = Some(self.colors[x]);
        }
        out
    }
}

impl<T: Scalar> ReductState<T> {
    pub fn new(graph: Arc<Graph>, cover: Arc<Cover>, weighting: Weighting<T>) -> Result<Self, NibbleError> {
        if cover.num_vertices() != graph.n() {
            return Err(NibbleError::BadWeighting(format!(
                "cover has {} lists for {} vertices",
                cover.num_vertices(),
                graph.n()
            )));
        }
        if weighting.len() != cover.num_colors() {
            return Err(NibbleError::BadWeighting(format!(
                "weighting has {} entries for {} colors",
                weighting.len(),
                cover.num_colors()
            )));
        }
        let max_degree = graph.max_degree();
        Ok(ReductState {
            alive: vec![true; graph.n()],
            graph,
            cover,
            weighting,
            history: Vec::new(),
            max_degree,
        })
    }

    pub(crate) fn successor(&self, alive: Vec<bool>, weighting: Weighting<T>, record: ReductRecord) -> Self {
        let mut history = self.history.clone();
        history.push(record);
        ReductState {
            graph: Arc::clone(&self.graph),
            cover: Arc::clone(&self.cover),
            alive,
            weighting,
            history,
            max_degree: self.max_degree,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn weighting(&self) -> &Weighting<T> {
        &self.weighting
    }

    pub fn history(&self) -> &[ReductRecord] {
        &self.history
    }

    /// Maximum degree of the original graph (the `Δ` of every constant).
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    pub fn alive_mask(&self) -> &[bool] {
        &self.alive
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alive.len()).filter(|&v| self.alive[v])
    }

    pub fn num_alive(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    /// Whether `x` is a color of the current cover graph `H'`.
    #[inline]
    pub fn color_alive(&self, x: usize) -> bool {
        self.cover.owner(x).is_some_and(|v| self.alive[v])
    }

    pub fn current_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.neighbors(v).iter().copied().filter(|&u| self.alive[u])
    }

    pub fn current_degree(&self, v: usize) -> usize {
        self.current_neighbors(v).count()
    }

    pub fn current_max_degree(&self) -> usize {
        self.alive_vertices()
            .map(|v| self.current_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Edges with both endpoints in the current graph.
    pub fn current_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| self.alive[u] && self.alive[v])
    }

    /// `p(v) = Σ_{x ∈ L(v)} p(x)`.
    pub fn vertex_mass(&self, v: usize) -> T {
        self.cover
            .list(v)
            .iter()
            .fold(T::zero(), |acc, &x| acc + self.weighting.get(x))
    }

    /// `p(uv) = Σ_{xy matched} p(x) p(y)`.
    pub fn edge_mass(&self, u: usize, v: usize) -> T {
        self.cover
            .matching(u, v)
            .iter()
            .fold(T::zero(), |acc, &(x, y)| {
                acc + self.weighting.get(x) * self.weighting.get(y)
            })
    }

    /// `Q(v) = Σ p(x) ln(1/p(x))`, with zero weights contributing zero.
    pub fn entropy(&self, v: usize) -> T {
        entropy_of(self.cover.list(v).iter().map(|&x| self.weighting.get(x)))
    }

    /// `p_m(v)`: mass of the moderate colors of `v`.
    pub fn moderate_mass(&self, v: usize) -> T {
        self.cover
            .list(v)
            .iter()
            .filter(|&&x| self.weighting.is_moderate(x))
            .fold(T::zero(), |acc, &x| acc + self.weighting.get(x))
    }

    /// `p_m(uv)`: edge mass over pairs with both colors moderate.
    pub fn moderate_edge_mass(&self, u: usize, v: usize) -> T {
        self.cover
            .matching(u, v)
            .iter()
            .filter(|&&(x, y)| self.weighting.is_moderate(x) && self.weighting.is_moderate(y))
            .fold(T::zero(), |acc, &(x, y)| {
                acc + self.weighting.get(x) * self.weighting.get(y)
            })
    }

    /// `Σ_{u ∈ N'(v)} p_m(uv)` over current neighbors.
    pub fn moderate_edge_sum(&self, v: usize) -> T {
        self.current_neighbors(v)
            .fold(T::zero(), |acc, u| acc + self.moderate_edge_mass(u, v))
    }

    /// Number of colors of `v` sitting at the cap.
    pub fn capped_count(&self, v: usize) -> usize {
        self.cover
            .list(v)
            .iter()
            .filter(|&&x| self.weighting.at_cap(x))
            .count()
    }

    /// Niceness of the current state. On success returns the largest
    /// witnessing `δ`, which is `min_v p_m(v)`; a state without vertices is
    /// vacuously nice with `δ = 1`.
    pub fn check_nice(&self) -> Result<T, NotNice<T>> {
        let mut min_mass: Option<(usize, T)> = None;
        let mut max_color: Option<(usize, T)> = None;
        let mut max_sum: Option<(usize, T)> = None;
        for v in self.alive_vertices() {
            let pm = self.moderate_mass(v);
            if min_mass.is_none_or(|(_, m)| pm < m) {
                min_mass = Some((v, pm));
            }
            for &x in self.cover.list(v) {
                if self.weighting.is_moderate(x) {
                    let w = self.weighting.get(x);
                    if max_color.is_none_or(|(_, m)| w > m) {
                        max_color = Some((x, w));
                    }
                }
            }
            let s = self.moderate_edge_sum(v);
            if max_sum.is_none_or(|(_, m)| s > m) {
                max_sum = Some((v, s));
            }
        }
        let Some((vertex, delta)) = min_mass else {
            return Ok(T::one());
        };
        if delta <= T::zero() {
            return Err(NotNice::NoModerateMass { vertex, mass: delta });
        }
        let two = T::lit(2.0);
        if let Some((color, weight)) = max_color {
            if two * weight > delta {
                return Err(NotNice::HeavyColor { color, weight, delta });
            }
        }
        if let Some((vertex, sum)) = max_sum {
            if two * sum.sqrt() > delta {
                return Err(NotNice::EdgeMass { vertex, sum, delta });
            }
        }
        Ok(delta)
    }

    /// Per-vertex sides of the choice-function inequality
    /// `2 p_m(v)/δ >= 1 + (4/δ²) Σ p_m(uv)`, recomputed from scratch.
    pub fn expectation_inequality(&self, delta: T) -> Vec<(usize, T, T)> {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        self.alive_vertices()
            .map(|v| {
                let lhs = two * self.moderate_mass(v) / delta;
                let rhs = T::one() + four / (delta * delta) * self.moderate_edge_sum(v);
                (v, lhs, rhs)
            })
            .collect()
    }

    /// Moderate colors of each current vertex (empty for removed ones).
    pub fn moderate_restriction(&self) -> Vec<Vec<usize>> {
        (0..self.graph.n())
            .map(|v| {
                if !self.alive[v] {
                    return Vec::new();
                }
                self.cover
                    .list(v)
                    .iter()
                    .copied()
                    .filter(|&x| self.weighting.is_moderate(x))
                    .collect()
            })
            .collect()
    }

    /// The current graph and cover, renumbered densely.
    pub fn induced_instance(&self) -> InducedInstance {
        let vertices: Vec<usize> = self.alive_vertices().collect();
        let mut new_vertex = vec![usize::MAX; self.graph.n()];
        for (i, &v) in vertices.iter().enumerate() {
            new_vertex[v] = i;
        }
        let mut colors = Vec::new();
        let mut new_color = vec![usize::MAX; self.cover.num_colors()];
        let mut lists = Vec::with_capacity(vertices.len());
        for &v in &vertices {
            let mut list = Vec::with_capacity(self.cover.list(v).len());
            for &x in self.cover.list(v) {
                new_color[x] = colors.len();
                list.push(colors.len());
                colors.push(x);
            }
            lists.push(list);
        }
        let edges: Vec<(usize, usize)> = self
            .current_edges()
            .map(|(u, v)| (new_vertex[u], new_vertex[v]))
            .collect();
        let matchings = self
            .current_edges()
            .map(|(u, v)| {
                let pairs = self
                    .cover
                    .matching(u, v)
                    .iter()
                    .map(|&(x, y)| (new_color[x], new_color[y]))
                    .collect();
                ((new_vertex[u], new_vertex[v]), pairs)
            })
            .collect();
        InducedInstance {
            graph: Graph::new(vertices.len(), edges).expect("induced edges are in range"),
            cover: Cover::from_parts(lists, matchings).expect("induced ids are dense"),
            vertices,
            colors,
        }
    }

    /// Moderate restriction expressed in the induced instance's ids.
    pub fn induced_moderate_restriction(&self, inst: &InducedInstance) -> Vec<Vec<usize>> {
        inst.vertices
            .iter()
            .enumerate()
            .map(|(i, _)| {
                inst.cover
                    .list(i)
                    .iter()
                    .copied()
                    .filter(|&x| self.weighting.is_moderate(inst.colors[x]))
                    .collect()
            })
            .collect()
    }

    /// Extends a coloring of the current graph to the original graph through
    /// the recorded history. See [`extend_coloring`].
    pub fn extend_coloring(&self, inner: &[Option<usize>]) -> Result<Coloring, NibbleError> {
        for v in self.alive_vertices() {
            if inner.get(v).copied().flatten().is_none() {
                return Err(NibbleError::Inconsistent(format!(
                    "current vertex {v} has no color"
                )));
            }
        }
        extend_coloring(&self.graph, &self.cover, inner, &self.history)
    }
}

/// Pops `history` newest-first, giving every removed vertex the lowest id of
/// its forced colors, and checks the result on the original instance.
pub fn extend_coloring(
    graph: &Graph,
    cover: &Cover,
    inner: &[Option<usize>],
    history: &[ReductRecord],
) -> Result<Coloring, NibbleError> {
    if inner.len() != graph.n() {
        return Err(NibbleError::Inconsistent(format!(
            "inner coloring has {} entries for {} vertices",
            inner.len(),
            graph.n()
        )));
    }
    let mut chosen = inner.to_vec();
    for record in history.iter().rev() {
        for (&v, forced) in record.removed.iter().zip(&record.forced_colors) {
            let &x = forced.iter().min().ok_or_else(|| {
                NibbleError::Inconsistent(format!("removed vertex {v} has no forced color"))
            })?;
            if chosen[v].replace(x).is_some() {
                return Err(NibbleError::Inconsistent(format!(
                    "vertex {v} is colored twice"
                )));
            }
        }
    }
    let chosen: Vec<usize> = chosen
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| NibbleError::Inconsistent(format!("vertex {v} left uncolored"))))
        .collect::<Result<_, _>>()?;
    let coloring = Coloring::new(chosen);
    match first_violation(graph, cover, &coloring) {
        Ok(None) => Ok(coloring),
        Ok(Some(v)) => Err(NibbleError::Inconsistent(format!("extended coloring invalid: {v}"))),
        Err(e) => Err(NibbleError::Inconsistent(e.to_string())),
    }
}

/// `Σ w ln(1/w)` with `0 ln(1/0) = 0`.
pub fn entropy_of<T: Scalar, I: IntoIterator<Item = T>>(weights: I) -> T {
    weights.into_iter().fold(T::zero(), |acc, w| {
        if w == T::zero() {
            acc
        } else {
            acc - w * w.ln()
        }
    })
}
