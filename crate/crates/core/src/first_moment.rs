//! First-moment lower bounds for the correspondence chromatic number.
//!
//! For a cover whose edges carry independent uniform perfect matchings, a
//! fixed transversal survives each edge with probability `1 - 1/k`, so the
//! expected number of colorings is `k^n (1 - 1/k)^m <= k^n e^{-m/k}`. When that
//! is below one, some cover has no coloring. The experiment here samples such
//! covers and keeps the first non-colorable one as a replayable witness.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{random_cover, validate_cover, Cover, CoverMode};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seeds;
use crate::solver::{count_colorings, solve_exact, SolverConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("average degree {0} is below 2e; ln(d/2) <= 1 outside the bound's hypothesis")]
    DegreeTooSmall(f64),
    #[error("k must be at least 1")]
    ZeroK,
}

/// `(d/2) / ln(d/2)` for `d >= 2e`.
pub fn alon_bound<T: Scalar>(d: T) -> Result<T, BoundError> {
    let two = T::lit(2.0);
    if d < two * T::lit(std::f64::consts::E) {
        return Err(BoundError::DegreeTooSmall(d.to_f64_lossy()));
    }
    let half = d / two;
    Ok(half / half.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstMoment<T> {
    /// `k^n e^{-m/k}`.
    pub bound: T,
    /// `k ln k < m / n`, which is exactly `bound < 1`.
    pub below_one: bool,
}

pub fn first_moment_bound<T: Scalar>(n: usize, m: usize, k: usize) -> Result<FirstMoment<T>, BoundError> {
    if k == 0 {
        return Err(BoundError::ZeroK);
    }
    let (n_t, m_t, k_t) = (T::from_count(n), T::from_count(m), T::from_count(k));
    let bound = (n_t * k_t.ln() - m_t / k_t).exp();
    let below_one = n > 0 && k_t * k_t.ln() < m_t / n_t;
    Ok(FirstMoment { bound, below_one })
}

/// `k^n (1 - 1/k)^m`, the expected number of colorings of a uniform
/// perfect-matching random cover.
pub fn expected_colorings<T: Scalar>(n: usize, m: usize, k: usize) -> Result<T, BoundError> {
    if k == 0 {
        return Err(BoundError::ZeroK);
    }
    if m == 0 {
        return Ok(T::from_count(k).powf(T::from_count(n)));
    }
    if k == 1 {
        return Ok(T::zero());
    }
    let k_t = T::from_count(k);
    let survive = T::one() - T::one() / k_t;
    // direct product when it stays finite (exact for small powers of two)
    if let (Ok(ni), Ok(mi)) = (i32::try_from(n), i32::try_from(m)) {
        let direct = k_t.powi(ni) * survive.powi(mi);
        if direct.is_finite() && direct > T::zero() {
            return Ok(direct);
        }
    }
    Ok((T::from_count(n) * k_t.ln() + T::from_count(m) * survive.ln()).exp())
}

/// Exact rational `k^n (k-1)^m / k^m`.
pub fn expected_colorings_exact(n: usize, m: usize, k: usize) -> Result<BigRational, BoundError> {
    if k == 0 {
        return Err(BoundError::ZeroK);
    }
    let k_big = BigInt::from(k);
    let pow = |b: &BigInt, e: usize| -> BigInt {
        let mut acc = BigInt::one();
        for _ in 0..e {
            acc *= b;
        }
        acc
    };
    let num = pow(&k_big, n) * pow(&(k_big.clone() - 1), m);
    let den = pow(&k_big, m);
    Ok(BigRational::new(num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
}

/// Aggregated outcome of [`run_lb_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub graph: GraphSummary,
    pub average_degree: f64,
    pub k: usize,
    pub mode: CoverMode,
    /// `None` when the average degree is below `2e`.
    pub alon_bound: Option<f64>,
    pub first_moment_bound: f64,
    /// `k ln k < d/2`.
    pub first_moment_below_one: bool,
    pub expected_colorings_exact: f64,
    /// The same value as a reduced fraction, `"p/q"` or `"p"`.
    pub expected_colorings_rational: String,
    pub trials: usize,
    pub completed_trials: usize,
    pub failed_trials: usize,
    pub colorable_count: usize,
    pub colorable_fraction: f64,
    pub colorable_fraction_std_error: f64,
    pub mean_colorings_empirical: f64,
    pub mean_colorings_std_error: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub count: Option<u64>,
    pub error: Option<String>,
}

/// A non-colorable cover: replaying the exact solver certifies
/// `chi_c(graph) >= k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub graph: Graph,
    pub cover: Cover,
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness cover is not a valid cover: {0}")]
    InvalidCover(String),
    #[error("witness cover does not have uniform list size {0}")]
    WrongK(usize),
    #[error("witness cover is colorable")]
    Colorable,
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
}

impl Witness {
    /// Re-checks the witness from scratch: valid cover, uniform list size `k`,
    /// and no coloring.
    pub fn replay(&self, cfg: SolverConfig) -> Result<(), WitnessError> {
        let report = validate_cover(&self.graph, &self.cover);
        if !report.is_ok() {
            let msg = report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(WitnessError::InvalidCover(msg));
        }
        if self.cover.uniform_k() != Some(self.k) && self.graph.n() > 0 {
            return Err(WitnessError::WrongK(self.k));
        }
        match solve_exact(&self.graph, &self.cover, None, cfg)?.coloring {
            Some(_) => Err(WitnessError::Colorable),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbOutcome {
    pub report: LowerBoundReport,
    pub trials: Vec<TrialRecord>,
    pub witness: Option<Witness>,
}

/// Samples `trials` random covers of `g`, counts the colorings of each, and
/// aggregates. Trial `t` uses the stream `(seed, "lb-trial", t)`, so the
/// result does not depend on how trials are scheduled across threads.
pub fn run_lb_experiment(
    g: &Graph,
    k: usize,
    trials: usize,
    seed: u64,
    mode: CoverMode,
    cfg: SolverConfig,
) -> Result<LbOutcome, BoundError> {
    if k == 0 {
        return Err(BoundError::ZeroK);
    }
    let (n, m) = (g.n(), g.num_edges());
    let d = g.average_degree();
    let fm = first_moment_bound::<f64>(n, m, k)?;
    let exact = expected_colorings_exact(n, m, k)?;

    let records: Vec<(TrialRecord, Option<Cover>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = seeds::derive(seed, "lb-trial", &[t as u64]);
            let cover = random_cover(g, k, trial_seed, mode).expect("mode validated by caller");
            match count_colorings(g, &cover, cfg) {
                Ok(out) => {
                    let witness = (out.count == 0).then_some(cover);
                    (
                        TrialRecord {
                            trial: t,
                            seed: trial_seed,
                            count: Some(out.count),
                            error: None,
                        },
                        witness,
                    )
                }
                Err(e) => (
                    TrialRecord {
                        trial: t,
                        seed: trial_seed,
                        count: None,
                        error: Some(e.to_string()),
                    },
                    None,
                ),
            }
        })
        .collect();

    let counts: Vec<f64> = records
        .iter()
        .filter_map(|(r, _)| r.count.map(|c| c as f64))
        .collect();
    let completed = counts.len();
    let colorable = records
        .iter()
        .filter(|(r, _)| r.count.is_some_and(|c| c > 0))
        .count();
    let (mean, se) = mean_and_std_error(&counts);
    let frac = if completed == 0 {
        0.0
    } else {
        colorable as f64 / completed as f64
    };
    let frac_se = if completed == 0 {
        0.0
    } else {
        (frac * (1.0 - frac) / completed as f64).sqrt()
    };

    let witness = records.iter().find_map(|(r, c)| {
        c.as_ref().map(|cover| Witness {
            graph: g.clone(),
            cover: cover.clone(),
            k,
            trial: r.trial,
            seed: r.seed,
        })
    });

    let report = LowerBoundReport {
        graph: GraphSummary { n, m },
        average_degree: d,
        k,
        mode,
        alon_bound: alon_bound(d).ok(),
        first_moment_bound: fm.bound,
        first_moment_below_one: fm.below_one,
        expected_colorings_exact: rational_to_f64(&exact),
        expected_colorings_rational: exact.to_string(),
        trials,
        completed_trials: completed,
        failed_trials: trials - completed,
        colorable_count: colorable,
        colorable_fraction: frac,
        colorable_fraction_std_error: frac_se,
        mean_colorings_empirical: mean,
        mean_colorings_std_error: se,
        seed,
    };
    Ok(LbOutcome {
        report,
        trials: records.into_iter().map(|(r, _)| r).collect(),
        witness,
    })
}

/// Sample mean and its standard error (sample standard deviation over `sqrt(N)`).
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range: go through logs
        let ln = |b: &BigInt| {
            let bits = b.bits();
            let shift = bits.saturating_sub(60);
            let top = (b >> shift).to_f64().unwrap_or(f64::NAN);
            top.ln() + shift as f64 * std::f64::consts::LN_2
        };
        (ln(r.numer()) - ln(r.denom())).exp()
    })
}
