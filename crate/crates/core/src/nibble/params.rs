use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::NibbleError;

/// Constants of the nibble. Defaults ([`NibbleParams::theory`]) are the
/// asymptotic values; [`NibbleParams::relaxed`] adjusts them so the algorithm
/// can be exercised on graphs of degree around ten.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NibbleParams<T> {
    /// List-size constant: `k = ceil(ck * Δ / ln Δ)`.
    pub ck: T,
    /// Weight cap `p̂ = Δ^(-phat_exp)`.
    pub phat_exp: T,
    /// `α = alpha_scale / ln Δ`.
    pub alpha_scale: T,
    /// Entropy budget: terminal `Q(v) >= ln k - entropy_slack * ln Δ`.
    pub entropy_slack: T,
    /// `|p'(v) - p(v)| <= Δ^(-dev_vertex_exp)`.
    pub dev_vertex_exp: T,
    /// `p'(uv) <= p(uv) + k^-1 Δ^(-dev_edge_exp)`.
    pub dev_edge_exp: T,
    /// `deg' <= deg (1 - shrink) + Δ^dev_degree_exp`.
    pub dev_degree_exp: T,
    /// Multiplier applied to all four per-step deviation terms.
    pub tolerance_scale: T,
    /// Degree shrink per step is `shrink_coeff / ln Δ`.
    pub shrink_coeff: T,
    /// Edge-mass cap is `edge_mass_cap / k`.
    pub edge_mass_cap: T,
    /// Terminal degree target is `niceness_target * k`.
    pub niceness_target: T,
    /// Multiplier of the `i Δ^dev_degree_exp` term in the schedule.
    pub schedule_slack_scale: T,
    pub max_retries_per_step: usize,
    pub max_final_retries: usize,
}

impl<T: Scalar> NibbleParams<T> {
    pub fn theory() -> Self {
        NibbleParams {
            ck: T::lit(120.0),
            phat_exp: T::lit(11.0 / 12.0),
            alpha_scale: T::one(),
            entropy_slack: T::lit(1.0 / 40.0),
            dev_vertex_exp: T::lit(1.0 / 6.0),
            dev_edge_exp: T::lit(1.0 / 3.0),
            dev_degree_exp: T::lit(2.0 / 3.0),
            tolerance_scale: T::one(),
            shrink_coeff: T::lit(2.0 / 3.0),
            edge_mass_cap: T::lit(std::f64::consts::SQRT_2),
            niceness_target: T::lit(0.6 * 0.6 * 0.25 * std::f64::consts::FRAC_1_SQRT_2),
            schedule_slack_scale: T::one(),
            max_retries_per_step: 100,
            max_final_retries: 1000,
        }
    }

    /// Desk-scale preset: `ck` small enough that `Δ = 12` gives `k ≈ 30`, a
    /// schedule driven by the multiplicative shrink alone, and a terminal
    /// degree target of `k / 20`. At `Δ = 12` this runs seven steps.
    pub fn relaxed() -> Self {
        NibbleParams {
            ck: T::lit(6.2),
            schedule_slack_scale: T::zero(),
            niceness_target: T::lit(0.05),
            max_retries_per_step: 200,
            max_final_retries: 2000,
            ..Self::theory()
        }
    }

    pub fn validate(&self) -> Result<(), NibbleError> {
        let unit = |name: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(NibbleError::BadParams(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(NibbleError::BadParams(format!("{name} must be positive, got {v}")))
            }
        };
        positive("ck", self.ck)?;
        unit("phat_exp", self.phat_exp)?;
        positive("alpha_scale", self.alpha_scale)?;
        positive("entropy_slack", self.entropy_slack)?;
        unit("dev_vertex_exp", self.dev_vertex_exp)?;
        unit("dev_edge_exp", self.dev_edge_exp)?;
        unit("dev_degree_exp", self.dev_degree_exp)?;
        positive("tolerance_scale", self.tolerance_scale)?;
        positive("shrink_coeff", self.shrink_coeff)?;
        positive("edge_mass_cap", self.edge_mass_cap)?;
        positive("niceness_target", self.niceness_target)?;
        if self.schedule_slack_scale < T::zero() || !self.schedule_slack_scale.is_finite() {
            return Err(NibbleError::BadParams(format!(
                "schedule_slack_scale must be >= 0, got {}",
                self.schedule_slack_scale
            )));
        }
        if self.max_retries_per_step == 0 || self.max_final_retries == 0 {
            return Err(NibbleError::BadParams("retry budgets must be at least 1".into()));
        }
        Ok(())
    }

    /// List size the theorem prescribes for maximum degree `delta`.
    pub fn list_size(&self, delta: usize) -> usize {
        let d = effective_degree::<T>(delta);
        (self.ck * d / d.ln()).ceil().to_usize().unwrap_or(usize::MAX)
    }

    /// Evaluates the numeric constants for maximum degree `delta` and list
    /// size `k`.
    pub fn constants(&self, delta: usize, k: usize) -> Constants<T> {
        let d = effective_degree::<T>(delta);
        let ln_d = d.ln();
        let k_t = T::from_count(k);
        let tol = self.tolerance_scale;
        Constants {
            delta,
            delta_eff: d,
            ln_delta: ln_d,
            k,
            p_hat: d.powf(-self.phat_exp),
            alpha: self.alpha_scale / ln_d,
            tol_vertex: tol * d.powf(-self.dev_vertex_exp),
            tol_edge: tol * d.powf(-self.dev_edge_exp) / k_t,
            tol_entropy: tol * ln_d * d.powf(-self.dev_vertex_exp),
            tol_degree: tol * d.powf(self.dev_degree_exp),
            shrink: self.shrink_coeff / ln_d,
            edge_cap: self.edge_mass_cap / k_t,
            degree_target: self.niceness_target * k_t,
            entropy_floor: k_t.ln() - self.entropy_slack * ln_d,
            saturation: d.powf(T::lit(0.1)),
        }
    }
}

/// Degree used for the logarithmic constants: `max(Δ, 3)`, so `ln Δ > 1`.
pub fn effective_degree<T: Scalar>(delta: usize) -> T {
    T::from_count(delta.max(3))
}

/// Numeric constants for a fixed `(Δ, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Constants<T> {
    pub delta: usize,
    pub delta_eff: T,
    pub ln_delta: T,
    pub k: usize,
    pub p_hat: T,
    pub alpha: T,
    pub tol_vertex: T,
    pub tol_edge: T,
    pub tol_entropy: T,
    pub tol_degree: T,
    /// `2 / (3 ln Δ)` with the theory constants.
    pub shrink: T,
    /// `√2 / k` with the theory constants.
    pub edge_cap: T,
    pub degree_target: T,
    pub entropy_floor: T,
    /// `Δ^(1/10)`, the saturation threshold.
    pub saturation: T,
}
