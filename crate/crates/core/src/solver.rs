//! Deciding, counting and checking `(L, H)`-colorings.
//!
//! [`solve_exact`] and [`count_colorings`] share one backtracking skeleton:
//! minimum-remaining-values vertex choice (lowest vertex on ties), colors
//! tried in increasing id order, and forward checking that deletes the
//! matched partners of each chosen color from undecided neighbors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::Cover;
use crate::graph::Graph;

/// Default search budget, in assignment nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// One chosen color per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub chosen: Vec<usize>,
}

impl Coloring {
    pub fn new(chosen: Vec<usize>) -> Self {
        Coloring { chosen }
    }
}

/// First reason a transversal is not a coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColoringViolation {
    NotInList { vertex: usize, color: usize },
    Conflict { u: usize, v: usize, x: usize, y: usize },
}

impl std::fmt::Display for ColoringViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotInList { vertex, color } => {
                write!(f, "color {color} is not in the list of vertex {vertex}")
            }
            Self::Conflict { u, v, x, y } => {
                write!(f, "colors {x} (vertex {u}) and {y} (vertex {v}) are matched")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub coloring: Option<Coloring>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOutcome {
    pub count: u64,
    pub nodes_explored: u64,
}

/// Returns the first violation of `i`, or `None` when it is a coloring.
pub fn first_violation(
    g: &Graph,
    c: &Cover,
    i: &Coloring,
) -> Result<Option<ColoringViolation>, SolverError> {
    if i.chosen.len() != g.n() {
        return Err(SolverError::Malformed(format!(
            "coloring has {} entries for {} vertices",
            i.chosen.len(),
            g.n()
        )));
    }
    for (v, &x) in i.chosen.iter().enumerate() {
        let Some(owner) = c.owner(x) else {
            return Err(SolverError::Malformed(format!(
                "color id {x} (vertex {v}) is not in any list"
            )));
        };
        if owner != v || !c.list(v).contains(&x) {
            return Ok(Some(ColoringViolation::NotInList { vertex: v, color: x }));
        }
    }
    for &(u, v) in g.edges() {
        let (x, y) = (i.chosen[u], i.chosen[v]);
        if c.are_matched(x, y) {
            return Ok(Some(ColoringViolation::Conflict { u, v, x, y }));
        }
    }
    Ok(None)
}

pub fn is_valid_coloring(g: &Graph, c: &Cover, i: &Coloring) -> Result<bool, SolverError> {
    first_violation(g, c, i).map(|v| v.is_none())
}

/// Why [`greedy_color`] stopped.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GreedyError {
    #[error("no color left for vertex {vertex}")]
    Stuck { vertex: usize },
    #[error("order is not a permutation of the vertices")]
    BadOrder,
}

/// Colors vertices in `order`, each with its lowest color not matched to an
/// already chosen color. Always succeeds when `|L(v)| > deg(v)` for all `v`.
pub fn greedy_color(g: &Graph, c: &Cover, order: &[usize]) -> Result<Coloring, GreedyError> {
    let n = g.n();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(GreedyError::BadOrder);
    }
    let mut chosen: Vec<Option<usize>> = vec![None; n];
    for &v in order {
        let pick = c.list(v).iter().copied().find(|&x| {
            g.neighbors(v)
                .iter()
                .filter_map(|&u| chosen[u])
                .all(|y| !c.are_matched(x, y))
        });
        match pick {
            Some(x) => chosen[v] = Some(x),
            None => return Err(GreedyError::Stuck { vertex: v }),
        }
    }
    Ok(Coloring::new(chosen.into_iter().map(Option::unwrap).collect()))
}

enum Mode {
    First,
    Count,
}

struct Search<'a> {
    g: &'a Graph,
    c: &'a Cover,
    alive: Vec<bool>,
    remaining: Vec<usize>,
    assigned: Vec<Option<usize>>,
    trail: Vec<usize>,
    nodes: u64,
    budget: u64,
    count: u64,
    found: Option<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(
        g: &'a Graph,
        c: &'a Cover,
        restrict: Option<&[Vec<usize>]>,
        cfg: SolverConfig,
    ) -> Result<Self, SolverError> {
        if c.num_vertices() != g.n() {
            return Err(SolverError::Malformed(format!(
                "cover has {} lists for {} vertices",
                c.num_vertices(),
                g.n()
            )));
        }
        let mut alive = vec![false; c.num_colors()];
        let mut remaining = vec![0; g.n()];
        match restrict {
            None => {
                for (v, rem) in remaining.iter_mut().enumerate() {
                    for &x in c.list(v) {
                        alive[x] = true;
                    }
                    *rem = c.list(v).len();
                }
            }
            Some(r) => {
                if r.len() != g.n() {
                    return Err(SolverError::Malformed("restrict needs one set per vertex".into()));
                }
                for (v, allowed) in r.iter().enumerate() {
                    for &x in allowed {
                        if !c.list(v).contains(&x) {
                            return Err(SolverError::Malformed(format!(
                                "restricted color {x} is not in L({v})"
                            )));
                        }
                        if !alive[x] {
                            alive[x] = true;
                            remaining[v] += 1;
                        }
                    }
                }
            }
        }
        Ok(Search {
            g,
            c,
            alive,
            remaining,
            assigned: vec![None; g.n()],
            trail: Vec::new(),
            nodes: 0,
            budget: cfg.node_budget,
            count: 0,
            found: None,
        })
    }

    fn pick_vertex(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&v| self.assigned[v].is_none())
            .min_by_key(|&v| (self.remaining[v], v))
    }

    /// Returns `Ok(true)` to stop the whole search.
    fn run(&mut self, mode: &Mode) -> Result<bool, SolverError> {
        let Some(v) = self.pick_vertex() else {
            self.count += 1;
            if matches!(mode, Mode::First) {
                self.found = Some(self.assigned.iter().map(|x| x.unwrap()).collect());
                return Ok(true);
            }
            return Ok(false);
        };
        let candidates: Vec<usize> = self
            .c
            .list(v)
            .iter()
            .copied()
            .filter(|&x| self.alive[x])
            .collect();
        for x in candidates {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(SolverError::BudgetExceeded {
                    budget: self.budget,
                });
            }
            self.assigned[v] = Some(x);
            let mark = self.trail.len();
            let mut wiped = false;
            for &y in self.c.color_neighbors(x) {
                let Some(w) = self.c.owner(y) else { continue };
                if self.assigned[w].is_none() && self.alive[y] {
                    self.alive[y] = false;
                    self.remaining[w] -= 1;
                    self.trail.push(y);
                    if self.remaining[w] == 0 {
                        wiped = true;
                    }
                }
            }
            let stop = if wiped { false } else { self.run(mode)? };
            while self.trail.len() > mark {
                let y = self.trail.pop().unwrap();
                self.alive[y] = true;
                self.remaining[self.c.owner(y).unwrap()] += 1;
            }
            self.assigned[v] = None;
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Finds a coloring or proves that none exists. `restrict`, when given,
/// limits each vertex to a subset of its list.
pub fn solve_exact(
    g: &Graph,
    c: &Cover,
    restrict: Option<&[Vec<usize>]>,
    cfg: SolverConfig,
) -> Result<SolveOutcome, SolverError> {
    let mut s = Search::new(g, c, restrict, cfg)?;
    s.run(&Mode::First)?;
    Ok(SolveOutcome {
        coloring: s.found.map(Coloring::new),
        nodes_explored: s.nodes,
    })
}

/// Counts all colorings (one color per vertex) by exhaustive search.
pub fn count_colorings(g: &Graph, c: &Cover, cfg: SolverConfig) -> Result<CountOutcome, SolverError> {
    let mut s = Search::new(g, c, None, cfg)?;
    s.run(&Mode::Count)?;
    Ok(CountOutcome {
        count: s.count,
        nodes_explored: s.nodes,
    })
}

/// Plain list-coloring backtracker on labels. It never touches covers, which
/// makes it an independent check of the list-to-cover lift.
pub fn solve_lists<L: Ord + Clone>(g: &Graph, lists: &[Vec<L>]) -> Option<Vec<L>> {
    fn go<L: Ord + Clone>(g: &Graph, lists: &[Vec<L>], v: usize, acc: &mut Vec<L>) -> bool {
        if v == g.n() {
            return true;
        }
        for label in &lists[v] {
            let clash = g
                .neighbors(v)
                .iter()
                .any(|&u| u < v && acc[u] == *label);
            if clash {
                continue;
            }
            acc.push(label.clone());
            if go(g, lists, v + 1, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    assert_eq!(lists.len(), g.n(), "one list per vertex");
    let mut acc = Vec::with_capacity(g.n());
    go(g, lists, 0, &mut acc).then_some(acc)
}

/// Counts transversals by enumerating all of them. Test oracle only.
pub fn brute_force_count(g: &Graph, c: &Cover) -> u64 {
    let n = g.n();
    let mut idx = vec![0usize; n];
    if (0..n).any(|v| c.list(v).is_empty()) {
        return 0;
    }
    let mut count = 0;
    loop {
        let chosen: Vec<usize> = (0..n).map(|v| c.list(v)[idx[v]]).collect();
        if g.edges().iter().all(|&(u, v)| !c.are_matched(chosen[u], chosen[v])) {
            count += 1;
        }
        let mut v = 0;
        loop {
            if v == n {
                return count;
            }
            idx[v] += 1;
            if idx[v] < c.list(v).len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}
