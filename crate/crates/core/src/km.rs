//! Kaplan–Meier estimation from censored sales and the greedy parametric
//! plug-in fit.

use crate::demand::{DemandDistribution, WeibullParams};
use crate::error::{Error, Result};
use crate::policies::CensoredObservation;

/// Right-continuous product-limit survival estimate.
///
/// `survival[i]` is the estimate on `[breakpoints[i], breakpoints[i + 1])`;
/// below the first breakpoint the survival is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct KmEstimate {
    breakpoints: Vec<f64>,
    survival: Vec<f64>,
    sample_count: usize,
}

impl KmEstimate {
    /// Fit from `(sale, uncensored)` pairs. Observations are ranked by sale
    /// with uncensored entries ahead of censored ones at ties; the `s`-th of
    /// `t` ranked entries contributes the factor `((t - s) / (t - s + 1))^delta`.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, bool)>,
    {
        let mut ranked: Vec<(f64, bool)> = pairs.into_iter().collect();
        if ranked.is_empty() {
            return Err(Error::domain("Kaplan-Meier fit needs at least one observation"));
        }
        if let Some(&(bad, _)) = ranked.iter().find(|(s, _)| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::domain(format!("sale values must be finite and >= 0, got {bad}")));
        }
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));

        let t = ranked.len();
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut survival: Vec<f64> = Vec::new();
        let mut level = 1.0;
        let mut censored_seen = false;
        for (idx, &(sale, uncensored)) in ranked.iter().enumerate() {
            let s = idx + 1;
            if !uncensored {
                censored_seen = true;
            } else if censored_seen {
                level *= (t - s) as f64 / (t - s + 1) as f64;
            } else {
                // The product telescopes to (t - s) / t before any censoring;
                // dividing once keeps it equal to the empirical survival.
                level = (t - s) as f64 / t as f64;
            }
            match breakpoints.last() {
                Some(&last) if last == sale => *survival.last_mut().expect("paired with breakpoint") = level,
                _ => {
                    breakpoints.push(sale);
                    survival.push(level);
                }
            }
        }
        Ok(Self {
            breakpoints,
            survival,
            sample_count: t,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn survival_values(&self) -> &[f64] {
        &self.survival
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Survival at `x` (right-continuous).
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        if idx == 0 {
            1.0
        } else {
            self.survival[idx - 1]
        }
    }

    /// Survival just below `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b < x);
        if idx == 0 {
            1.0
        } else {
            self.survival[idx - 1]
        }
    }

    /// True when no uncensored sale was seen, i.e. the estimate is identically 1.
    pub fn is_degenerate(&self) -> bool {
        self.survival.last().is_none_or(|&s| s >= 1.0)
    }

    /// `{0} ∪ breakpoints ∪ {+inf}`: enough points for an exact sup-norm
    /// distance between this estimate and any continuous monotone CDF.
    pub fn distance_grid(&self) -> Vec<f64> {
        let mut grid = Vec::with_capacity(self.breakpoints.len() + 2);
        grid.push(0.0);
        grid.extend(self.breakpoints.iter().copied().filter(|&b| b > 0.0));
        grid.push(f64::INFINITY);
        grid
    }
}

/// Fit the product-limit estimate to censored observations.
pub fn km_fit(observations: &[CensoredObservation]) -> Result<KmEstimate> {
    KmEstimate::from_pairs(observations.iter().map(|o| (o.sale(), o.uncensored())))
}

/// A CDF that may jump; `cdf_left` is the left limit.
pub trait CdfLike {
    fn cdf(&self, x: f64) -> f64;

    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl CdfLike for KmEstimate {
    fn cdf(&self, x: f64) -> f64 {
        1.0 - self.eval(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        1.0 - self.eval_left(x)
    }
}

impl CdfLike for WeibullParams {
    fn cdf(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return 1.0;
        }
        self.cdf_value(x)
    }
}

/// Adapter for a continuous CDF given as a closure.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> CdfLike for FnCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// `max |f - g|` over the grid, checking both the value and the left limit at
/// every grid point.
pub fn sup_distance<F: CdfLike + ?Sized, G: CdfLike + ?Sized>(f: &F, g: &G, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::domain("sup distance needs a nonempty grid"));
    }
    Ok(grid.iter().fold(0.0f64, |acc, &x| {
        let at = (f.cdf(x) - g.cdf(x)).abs();
        let left = (f.cdf_left(x) - g.cdf_left(x)).abs();
        acc.max(at).max(left)
    }))
}

/// Log-scale search interval for the plug-in rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSearch {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
}

impl Default for ThetaSearch {
    fn default() -> Self {
        Self {
            lo: 1e-4,
            hi: 1e4,
            grid_points: 1024,
        }
    }
}

impl ThetaSearch {
    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.grid_points.max(2);
        (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

/// Result of the greedy plug-in fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluginFit {
    pub theta_hat: f64,
    pub sup_distance: f64,
    pub k: f64,
}

/// Sup-norm objective `theta -> ||F_theta - F_hat||` specialised to the
/// Weibull family, with `x^k` precomputed at each breakpoint.
struct WeibullObjective {
    powered: Vec<f64>,
    right: Vec<f64>,
    left: Vec<f64>,
    tail: f64,
}

impl WeibullObjective {
    fn new(km: &KmEstimate, k: f64) -> Self {
        let mut left = Vec::with_capacity(km.breakpoints.len());
        let mut prev = 0.0;
        for &s in &km.survival {
            left.push(prev);
            prev = 1.0 - s;
        }
        Self {
            powered: km.breakpoints.iter().map(|b| b.powf(k)).collect(),
            right: km.survival.iter().map(|s| 1.0 - s).collect(),
            left,
            tail: km.survival.last().copied().unwrap_or(1.0),
        }
    }

    fn eval(&self, theta: f64) -> f64 {
        let mut worst = self.tail;
        for ((&xk, &r), &l) in self.powered.iter().zip(&self.right).zip(&self.left) {
            let f = -(-theta * xk).exp_m1();
            worst = worst.max((f - r).abs()).max((f - l).abs());
        }
        worst
    }
}

const GOLDEN_ITERS: usize = 200;

/// Greedy plug-in rate: a log-spaced scan over the search interval followed by
/// golden-section refinement around the best scanned rate. The returned rate
/// is never worse than any scanned rate.
pub fn plugin_fit(km: &KmEstimate, k: f64, search: &ThetaSearch) -> Result<PluginFit> {
    if km.is_degenerate() {
        return Err(Error::InsufficientData);
    }
    if !(search.lo > 0.0 && search.hi > search.lo) {
        return Err(Error::domain("theta search interval must be positive and increasing"));
    }
    let objective = WeibullObjective::new(km, k);
    let grid = search.grid();
    let (best_idx, best_val) = grid
        .iter()
        .enumerate()
        .map(|(i, &th)| (i, objective.eval(th)))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });

    let mut a = grid[best_idx.saturating_sub(1)].ln();
    let mut b = grid[(best_idx + 1).min(grid.len() - 1)].ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective.eval(c.exp());
    let mut fd = objective.eval(d.exp());
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() <= 1e-15 * a.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective.eval(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective.eval(d.exp());
        }
    }
    let (theta_ref, val_ref) = if fc <= fd { (c.exp(), fc) } else { (d.exp(), fd) };
    let (theta_hat, sup) = if val_ref <= best_val {
        (theta_ref, val_ref)
    } else {
        (grid[best_idx], best_val)
    };
    Ok(PluginFit {
        theta_hat,
        sup_distance: sup,
        k,
    })
}

/// Half-width `sqrt(ln(1/delta) / (2t)) / (1 - G(x))` of the Kaplan–Meier band.
pub fn km_confidence_width(t: u64, delta: f64, g_at_x: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("t must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(0.0..1.0).contains(&g_at_x) {
        return Err(Error::domain(format!(
            "censoring CDF must lie in [0, 1) for a finite band, got {g_at_x}"
        )));
    }
    let eps = ((1.0 / delta).ln() / (2.0 * t as f64)).sqrt();
    Ok(eps / (1.0 - g_at_x))
}
