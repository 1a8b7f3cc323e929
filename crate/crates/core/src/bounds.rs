//! Evaluators for the constants and bounds of the Thompson Sampling regret
//! analysis under Weibull demand, plus the Kaplan–Meier Bayesian regret bound.
//!
//! These are diagnostics. They take the true rate `theta_star` explicitly and
//! are never consulted by a policy.

use crate::demand::GammaParams;
use crate::error::{Error, Result};
use crate::newsvendor::CostParams;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// Probability `1 - exp(-theta* L^k)` that demand falls below an order of `L`.
pub fn uncensor_floor(theta_star: f64, l: f64, k: f64) -> f64 {
    -(-theta_star * l.powf(k)).exp_m1()
}

/// Uniform lower bound on TS orders:
/// `(-ln(h/(p+h)) / 2)^(1/k) * min((beta0/alpha0)^(1/k), d_low)`.
pub fn lower_bound_l(cp: &CostParams, k: f64, prior: &GammaParams, d_low: f64) -> Result<f64> {
    if !(d_low > 0.0) {
        return Err(Error::domain(format!("d_low must be positive, got {d_low}")));
    }
    let half_log = (0.5 * cp.critical_log()).powf(1.0 / k);
    let prior_scale = (prior.beta() / prior.alpha()).powf(1.0 / k);
    Ok(half_log * prior_scale.min(d_low))
}

/// Burn-in `T0 = 64 (1 - e^{-theta* L^k})^{-2} ln(T/delta)`.
pub fn truncation_t0(theta_star: f64, l: f64, k: f64, horizon: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let q = uncensor_floor(theta_star, l, k);
    Ok(64.0 / (q * q) * (horizon as f64 / delta).ln())
}

/// Width `sqrt(ln(2t^2/delta)) (D_high^k + 2/theta*) sqrt(t) / (alpha_t - 1)`
/// of the band around `beta_t / (alpha_t - 1)`.
pub fn posterior_confidence_width(
    t: u64,
    alpha_t: f64,
    theta_star: f64,
    d_high: f64,
    k: f64,
    delta: f64,
) -> Result<f64> {
    if !(alpha_t > 1.0) {
        return Err(Error::domain(format!("alpha_t must exceed 1, got {alpha_t}")));
    }
    if t == 0 {
        return Err(Error::domain("t must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain("delta must be positive"));
    }
    let t = t as f64;
    let log_term = (2.0 * t * t / delta).ln().sqrt();
    Ok(log_term * (d_high.powf(k) + 2.0 / theta_star) * t.sqrt() / (alpha_t - 1.0))
}

/// High-probability bound `sqrt(8t) ln(2t^2/delta)` on the martingale `M_t`.
pub fn martingale_bound_mt(t: u64, delta: f64) -> f64 {
    let t = t as f64;
    (8.0 * t).sqrt() * (2.0 * t * t / delta).ln()
}

/// Bound `(2/e)^alpha` on `P(1/theta <= beta / (2 alpha))` for
/// `theta ~ Gamma(alpha, beta)`.
pub fn inverse_gamma_tail(alpha: f64) -> f64 {
    (alpha * (2.0f64.ln() - 1.0)).exp()
}

/// Prior shape that makes `T (2/e)^alpha0 = delta`, floored at 2.
pub fn theoretical_alpha0(horizon: u64, delta: f64) -> f64 {
    ((horizon as f64 / delta).ln() / (1.0 - 2.0f64.ln())).max(2.0)
}

/// Constant `C0` of the final regret display.
pub fn constant_c0(cp: &CostParams, k: f64, theta_star: f64, l: f64, d_high: f64, horizon: u64, delta: f64) -> f64 {
    cp.max_unit_cost()
        * cp.critical_log().powf(1.0 / k)
        * (d_high.powf(k) + 2.0 / theta_star)
        * (1.0 / k)
        * l.min(1.0 / theta_star).powf(1.0 / k - 1.0)
        * (2.0 * (horizon as f64 / delta).ln()).sqrt()
}

/// Frequentist regret bound
/// `C0 (512 q^{-3} ln(T/delta)^{3/2} + 4 q^{-1} sqrt(T))` with
/// `q = 1 - e^{-theta* L^k}`.
pub fn theorem1_bound(
    cp: &CostParams,
    k: f64,
    theta_star: f64,
    l: f64,
    d_high: f64,
    horizon: u64,
    delta: f64,
) -> Result<f64> {
    check_delta(delta)?;
    let q = uncensor_floor(theta_star, l, k);
    let c0 = constant_c0(cp, k, theta_star, l, d_high, horizon, delta);
    let log_term = (horizon as f64 / delta).ln();
    Ok(c0 * (512.0 * q.powi(-3) * log_term.powf(1.5) + 4.0 / q * (horizon as f64).sqrt()))
}

/// Bayesian regret bound `16 L (h + p) / (1 - G_max) * sqrt(T ln(1/delta))`.
pub fn theorem2_bound(lipschitz_l: f64, cp: &CostParams, g_max: f64, horizon: u64, delta: f64) -> Result<f64> {
    if !(g_max < 1.0) {
        return Err(Error::domain(format!("G_max must be below 1, got {g_max}")));
    }
    check_delta(delta)?;
    Ok(16.0 * lipschitz_l * (cp.h() + cp.p()) / (1.0 - g_max) * (horizon as f64 * (1.0 / delta).ln()).sqrt())
}

/// Lower bound on `alpha_t - 1`: `alpha0 - 1` up to `T0`, then
/// `t (1 - e^{-theta* L^k}) / 2`.
pub fn alpha_t_floor(t: u64, t0: f64, prior: &GammaParams, theta_star: f64, l: f64, k: f64) -> f64 {
    if (t as f64) <= t0 {
        prior.alpha() - 1.0
    } else {
        0.5 * t as f64 * uncensor_floor(theta_star, l, k)
    }
}

/// `min { a_i / b_i : b_i > 0 }`, or `None` when every `b_i` is zero.
pub fn min_ratio(a: &[f64], b: &[f64]) -> Option<f64> {
    a.iter()
        .zip(b)
        .filter(|(_, &bi)| bi > 0.0)
        .map(|(&ai, &bi)| ai / bi)
        .reduce(f64::min)
}

/// All the constants for one configuration, plus the band widths at the
/// requested periods evaluated at the guaranteed floor on `alpha_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub l: f64,
    pub t0: f64,
    pub c0: f64,
    pub theorem1_bound: f64,
    pub widths: Vec<(u64, f64)>,
}

/// Inputs for [`BoundReport::compute`].
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub cost: CostParams,
    pub k: f64,
    pub theta_star: f64,
    pub prior: GammaParams,
    pub horizon: u64,
    pub delta: f64,
}

impl BoundReport {
    pub fn compute(inputs: &BoundInputs, periods: &[u64]) -> Result<Self> {
        let BoundInputs {
            cost,
            k,
            theta_star,
            prior,
            horizon,
            delta,
        } = *inputs;
        let range = crate::demand::DemandRange::compute(theta_star, k, horizon, delta)?;
        let l = lower_bound_l(&cost, k, &prior, range.d_low)?;
        let t0 = truncation_t0(theta_star, l, k, horizon, delta)?;
        let c0 = constant_c0(&cost, k, theta_star, l, range.d_high, horizon, delta);
        let bound = theorem1_bound(&cost, k, theta_star, l, range.d_high, horizon, delta)?;
        let widths = periods
            .iter()
            .map(|&t| {
                let alpha_t = 1.0 + alpha_t_floor(t, t0, &prior, theta_star, l, k);
                posterior_confidence_width(t, alpha_t, theta_star, range.d_high, k, delta).map(|w| (t, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            l,
            t0,
            c0,
            theorem1_bound: bound,
            widths,
        })
    }
}
