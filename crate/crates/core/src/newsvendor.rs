//! Newsvendor cost model.

use crate::demand::{DemandDistribution, WeibullParams};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Absolute tolerance used for the expected-sales integral.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Unit overage cost `h` and unit stock-out penalty `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    h: f64,
    p: f64,
}

impl CostParams {
    pub fn new(h: f64, p: f64) -> Result<Self> {
        for (name, v) in [("h", h), ("p", p)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::params(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { h, p })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Critical ratio `p / (p + h)`.
    pub fn service_level(&self) -> f64 {
        self.p / (self.p + self.h)
    }

    /// `-ln(h / (p + h))`, the log-odds factor in the Weibull quantile.
    pub fn critical_log(&self) -> f64 {
        (self.p / self.h).ln_1p()
    }

    pub fn max_unit_cost(&self) -> f64 {
        self.h.max(self.p)
    }
}

/// `h (y - d)^+ + p (d - y)^+`.
pub fn realized_cost(cp: &CostParams, y: f64, d: f64) -> Result<f64> {
    if !(y >= 0.0 && d >= 0.0) {
        return Err(Error::domain(format!("order and demand must be >= 0, got y={y}, d={d}")));
    }
    Ok(cp.h * (y - d).max(0.0) + cp.p * (d - y).max(0.0))
}

/// `E[min(y, D)] = integral of the survival function over [0, y]`.
pub fn expected_sales<D: DemandDistribution>(dist: &D, y: f64) -> f64 {
    integrate(|x| dist.survival(x), 0.0, y, QUADRATURE_TOL)
}

/// Expected single-period cost `h (y - m(y)) + p (E[D] - m(y))` with
/// `m(y) = E[min(y, D)]`.
pub fn expected_cost<D: DemandDistribution>(cp: &CostParams, dist: &D, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::domain(format!("order must be >= 0, got {y}")));
    }
    let m = expected_sales(dist, y);
    Ok(cp.h * (y - m) + cp.p * (dist.mean() - m))
}

/// `g(y) - g(y_ref)` evaluated as `h (y - y_ref) - (h + p) * integral of S
/// over [y_ref, y]`. Integrating only between the two orders keeps the error
/// proportional to their distance, so the gap is accurate near `y_ref`.
pub fn expected_cost_gap<D: DemandDistribution>(cp: &CostParams, dist: &D, y: f64, y_ref: f64) -> f64 {
    let sales = integrate(|x| dist.survival(x), y_ref, y, QUADRATURE_TOL * (y - y_ref).abs().min(1.0));
    cp.h * (y - y_ref) - (cp.h + cp.p) * sales
}

/// Critical-quantile order `theta^(-1/k) (-ln(h/(p+h)))^(1/k)`.
pub fn optimal_order(cp: &CostParams, dist: &WeibullParams) -> f64 {
    weibull_order(cp, dist.theta(), dist.k())
}

/// Critical-quantile order for a Weibull rate `theta` and shape `k`.
pub fn weibull_order(cp: &CostParams, theta: f64, k: f64) -> f64 {
    (cp.critical_log() / theta).powf(1.0 / k)
}

/// Critical quantile of any demand law.
pub fn optimal_order_for<D: DemandDistribution>(cp: &CostParams, dist: &D) -> f64 {
    dist.quantile(cp.service_level())
}
