//! One randomized reduct step and its closed-form expectations.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::seeds;

use super::params::Constants;
use super::state::{entropy_of, ReductRecord, ReductState, Weighting};
use super::NibbleError;

/// Quantities after one step, evaluated on the whole pre-step graph
/// (removed vertices included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StepStats<T> {
    /// Number of steps taken before this one.
    pub step: usize,
    /// Pre-step vertex mask.
    pub in_graph: Vec<bool>,
    /// `p'(x)` for every color.
    pub pprime_color: Vec<T>,
    /// `p'(v)`; zero outside the pre-step graph.
    pub pprime_vertex: Vec<T>,
    /// `p'(uv)` for every pre-step edge, in canonical edge order.
    pub pprime_edge: Vec<((usize, usize), T)>,
    /// `Q'(v)`.
    pub qprime: Vec<T>,
    /// `d'(v) = |N_G(v) ∩ V(G')|`.
    pub dprime: Vec<usize>,
    /// `|S|`.
    pub sampled: usize,
    /// The removed set `A`.
    pub removed: Vec<usize>,
    /// Colors with more than `Δ^(1/10)` neighbors in `S`.
    pub saturated_colors: usize,
}

/// `K(x) = Π_{y ∈ N_H(x) \ B} (1 - α p(y))` over the current cover graph.
pub fn k_factor<T: Scalar>(state: &ReductState<T>, alpha: T, x: usize) -> T {
    let w = state.weighting();
    state
        .cover()
        .color_neighbors(x)
        .iter()
        .filter(|&&y| state.color_alive(y) && !w.at_cap(y))
        .fold(T::one(), |acc, &y| acc * (T::one() - alpha * w.get(y)))
}

/// Closed form of `E p'(x)`; equals `p(x)` for every color.
pub fn expected_pprime<T: Scalar>(state: &ReductState<T>, alpha: T, x: usize) -> T {
    let w = state.weighting();
    let p_hat = w.p_hat();
    if w.at_cap(x) {
        return p_hat;
    }
    let p = w.get(x);
    let k = k_factor(state, alpha, x);
    let ratio = p / k;
    if ratio <= p_hat {
        k * ratio
    } else {
        let q = resample_probability(p, p_hat, k);
        k * p_hat + (T::one() - k) * q * p_hat
    }
}

/// `q(x) = (p(x)/p̂ - K(x)) / (1 - K(x))`, only defined when `p(x)/K(x) > p̂`.
fn resample_probability<T: Scalar>(p: T, p_hat: T, k: T) -> T {
    let gap = T::one() - k;
    assert!(
        gap > T::zero(),
        "q(x) evaluated with K(x) = {k}; p/K > p̂ forces K < 1"
    );
    (p / p_hat - k) / gap
}

/// Runs one reduct step with inclusion scale `alpha`.
///
/// Randomness is counter-based per color, keyed by `(seed, step index,
/// color id)`, so the outcome is a pure function of the state and seed.
pub fn reduct_step<T: Scalar>(state: &ReductState<T>, alpha: T, seed: u64) -> (ReductState<T>, StepStats<T>) {
    let w = state.weighting();
    let p_hat = w.p_hat();
    assert!(
        alpha > T::zero() && alpha * p_hat <= T::one(),
        "inclusion probabilities α p(x) must lie in [0, 1]"
    );
    let cover = state.cover();
    let graph = state.graph();
    let nc = cover.num_colors();
    let step = state.history().len();
    let key = seeds::derive(seed, "reduct-step", &[step as u64]);
    let draw = |x: usize, purpose: u64| T::lit(seeds::unit(key, x as u64, purpose));

    let live: Vec<bool> = (0..nc).map(|x| state.color_alive(x)).collect();
    let in_b: Vec<bool> = (0..nc).map(|x| live[x] && w.at_cap(x)).collect();
    let in_s: Vec<bool> = (0..nc)
        .map(|x| live[x] && !in_b[x] && w.get(x) > T::zero() && draw(x, 0) < alpha * w.get(x))
        .collect();
    let s_hits: Vec<usize> = (0..nc)
        .map(|x| {
            cover
                .color_neighbors(x)
                .iter()
                .filter(|&&y| in_s[y])
                .count()
        })
        .collect();

    let mut pprime = w.values().to_vec();
    for x in 0..nc {
        if !live[x] {
            continue;
        }
        if in_b[x] {
            pprime[x] = p_hat;
            continue;
        }
        let p = w.get(x);
        let k = k_factor(state, alpha, x);
        let ratio = p / k;
        pprime[x] = if s_hits[x] == 0 {
            if ratio >= p_hat {
                p_hat
            } else {
                ratio
            }
        } else if ratio <= p_hat {
            T::zero()
        } else {
            let q = resample_probability(p, p_hat, k);
            if draw(x, 1) < q {
                p_hat
            } else {
                T::zero()
            }
        };
    }

    // A = {v : ∅ ≠ L(v) ∩ S ⊆ W}, W = {x ∈ S : N_H(x) ∩ S = ∅}
    let mut record = ReductRecord {
        removed: Vec::new(),
        forced_colors: Vec::new(),
    };
    for v in state.alive_vertices() {
        let picked: Vec<usize> = cover.list(v).iter().copied().filter(|&x| in_s[x]).collect();
        if !picked.is_empty() && picked.iter().all(|&x| s_hits[x] == 0) {
            record.removed.push(v);
            record.forced_colors.push(picked);
        }
    }
    let mut alive = state.alive_mask().to_vec();
    for &v in &record.removed {
        alive[v] = false;
    }

    let n = graph.n();
    let mut pprime_vertex = vec![T::zero(); n];
    let mut qprime = vec![T::zero(); n];
    let mut dprime = vec![0; n];
    for v in state.alive_vertices() {
        let list = cover.list(v);
        pprime_vertex[v] = list.iter().fold(T::zero(), |acc, &x| acc + pprime[x]);
        qprime[v] = entropy_of(list.iter().map(|&x| pprime[x]));
        dprime[v] = graph.neighbors(v).iter().filter(|&&u| alive[u]).count();
    }
    let pprime_edge = state
        .current_edges()
        .map(|(u, v)| {
            let mass = cover
                .matching(u, v)
                .iter()
                .fold(T::zero(), |acc, &(x, y)| acc + pprime[x] * pprime[y]);
            ((u, v), mass)
        })
        .collect();
    let threshold = T::from_count(state.max_degree()).powf(T::lit(0.1));
    let saturated_colors = (0..nc)
        .filter(|&x| live[x] && T::from_count(s_hits[x]) > threshold)
        .count();

    let stats = StepStats {
        step,
        in_graph: state.alive_mask().to_vec(),
        pprime_color: pprime.clone(),
        pprime_vertex,
        pprime_edge,
        qprime,
        dprime,
        sampled: in_s.iter().filter(|&&s| s).count(),
        removed: record.removed.clone(),
        saturated_colors,
    };
    let weighting = Weighting::new(pprime, p_hat).expect("p' stays within [0, p̂]");
    (state.successor(alive, weighting, record), stats)
}

/// A per-step target that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum TargetViolation<T> {
    /// `|p'(v) - p(v)| > tol`.
    VertexMass { vertex: usize, before: T, after: T, tol: T },
    /// `p'(uv) > p(uv) + tol`.
    EdgeMass { u: usize, v: usize, before: T, after: T, tol: T },
    /// `Q'(v) < Q(v) - 2 deg(v)/(k ln Δ) - tol`.
    Entropy { vertex: usize, before: T, after: T, floor: T },
    /// `deg'(v) > deg(v)(1 - shrink) + tol`.
    Degree { vertex: usize, before: usize, after: usize, bound: T },
    /// `0 < p'(x) < 1/k`.
    Support { color: usize, weight: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TargetReport<T> {
    pub violations: Vec<TargetViolation<T>>,
}

impl<T> TargetReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the per-step targets on the surviving vertices and edges.
pub fn check_reduct_targets<T: Scalar>(
    old: &ReductState<T>,
    stats: &StepStats<T>,
    c: &Constants<T>,
) -> TargetReport<T> {
    let mut violations = Vec::new();
    let mut survives = old.alive_mask().to_vec();
    for &v in &stats.removed {
        survives[v] = false;
    }
    let k_t = T::from_count(c.k);
    let two = T::lit(2.0);
    for v in (0..survives.len()).filter(|&v| survives[v]) {
        let before = old.vertex_mass(v);
        let after = stats.pprime_vertex[v];
        if (after - before).abs() > c.tol_vertex {
            violations.push(TargetViolation::VertexMass {
                vertex: v,
                before,
                after,
                tol: c.tol_vertex,
            });
        }
        let deg = old.current_degree(v);
        let q_before = old.entropy(v);
        let floor = q_before - two * T::from_count(deg) / (k_t * c.ln_delta) - c.tol_entropy;
        if stats.qprime[v] < floor {
            violations.push(TargetViolation::Entropy {
                vertex: v,
                before: q_before,
                after: stats.qprime[v],
                floor,
            });
        }
        let bound = T::from_count(deg) * (T::one() - c.shrink) + c.tol_degree;
        if T::from_count(stats.dprime[v]) > bound {
            violations.push(TargetViolation::Degree {
                vertex: v,
                before: deg,
                after: stats.dprime[v],
                bound,
            });
        }
        let min_support = T::one() / k_t;
        for &x in old.cover().list(v) {
            let wx = stats.pprime_color[x];
            if wx > T::zero() && wx < min_support {
                violations.push(TargetViolation::Support { color: x, weight: wx });
            }
        }
    }
    for &((u, v), after) in &stats.pprime_edge {
        if !(survives[u] && survives[v]) {
            continue;
        }
        let before = old.edge_mass(u, v);
        if after > before + c.tol_edge {
            violations.push(TargetViolation::EdgeMass {
                u,
                v,
                before,
                after,
                tol: c.tol_edge,
            });
        }
    }
    TargetReport { violations }
}

/// `deg(v) (1 - α p1 + α² (p2² + P Δ))` for every current vertex, after
/// checking `p1 <= p_m(v) <= p2` and `p(uv) <= P` on the current graph.
pub fn degree_expectation_bound<T: Scalar>(
    state: &ReductState<T>,
    alpha: T,
    p1: T,
    p2: T,
    edge_cap: T,
) -> Result<Vec<(usize, T)>, NibbleError> {
    for v in state.alive_vertices() {
        let pm = state.moderate_mass(v);
        if pm < p1 || pm > p2 {
            return Err(NibbleError::Hypothesis(format!(
                "p_m({v}) = {pm} outside [{p1}, {p2}]"
            )));
        }
    }
    for (u, v) in state.current_edges() {
        let m = state.edge_mass(u, v);
        if m > edge_cap {
            return Err(NibbleError::Hypothesis(format!("p({u}{v}) = {m} > {edge_cap}")));
        }
    }
    let delta = T::from_count(state.max_degree());
    let factor = T::one() - alpha * p1 + alpha * alpha * (p2 * p2 + edge_cap * delta);
    Ok(state
        .alive_vertices()
        .map(|v| (v, T::from_count(state.current_degree(v)) * factor))
        .collect())
}

/// Closed-form lower bound on `E Q'(v)`: `Q(v) - (√2 P / ln Δ) deg(v)`.
pub fn entropy_expectation_bound<T: Scalar>(
    state: &ReductState<T>,
    ln_delta: T,
    edge_cap: T,
) -> Vec<(usize, T)> {
    let factor = T::lit(std::f64::consts::SQRT_2) * edge_cap / ln_delta;
    state
        .alive_vertices()
        .map(|v| (v, state.entropy(v) - factor * T::from_count(state.current_degree(v))))
        .collect()
}
