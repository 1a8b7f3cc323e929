//! Demand families and the Gamma prior.
//!
//! Weibull demand is parameterised as `F(x) = 1 - exp(-theta * x^k)` with a
//! rate-like `theta` and a known shape `k`. The Gamma prior on `theta` uses the
//! shape/rate convention, which keeps the censored-data posterior conjugate.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::open_unit;

/// Common interface over the demand laws the simulator can draw from.
///
/// Methods are total: arguments below zero are treated as zero demand and
/// quantile levels are clamped into `[0, 1)`.
pub trait DemandDistribution {
    fn cdf_value(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf_value(x)
    }

    fn mean(&self) -> f64;

    fn quantile(&self, q: f64) -> f64;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::params(format!("{name} must be positive and finite, got {v}")))
    }
}

// ---------------------------------------------------------------------------
// Weibull
// ---------------------------------------------------------------------------

/// Weibull demand with rate-like parameter `theta` and shape `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullParams {
    theta: f64,
    k: f64,
}

impl WeibullParams {
    pub fn new(theta: f64, k: f64) -> Result<Self> {
        check_positive("theta", theta)?;
        check_positive("k", k)?;
        Ok(Self { theta, k })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `1 - exp(-theta x^k)`; negative `x` is a domain error.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("weibull cdf needs x >= 0, got {x}")));
        }
        Ok(-(-self.theta * x.powf(self.k)).exp_m1())
    }

    /// `((-ln(1-q)) / theta)^(1/k)` for `q` in `[0, 1)`.
    pub fn inverse_cdf(&self, q: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&q) {
            return Err(Error::domain(format!(
                "weibull inverse cdf needs q in [0, 1), got {q}"
            )));
        }
        Ok(self.quantile_unchecked(q))
    }

    fn quantile_unchecked(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        ((-(-q).ln_1p()) / self.theta).powf(1.0 / self.k)
    }

    /// Inverse-transform draw from a given uniform `u` in `[0, 1)`.
    pub fn from_uniform(&self, u: f64) -> f64 {
        self.quantile_unchecked(u.clamp(0.0, 1.0 - f64::EPSILON))
    }
}

impl DemandDistribution for WeibullParams {
    fn cdf_value(&self, x: f64) -> f64 {
        self.cdf(x.max(0.0)).unwrap_or(1.0)
    }

    fn survival(&self, x: f64) -> f64 {
        (-self.theta * x.max(0.0).powf(self.k)).exp()
    }

    /// `theta^(-1/k) * Gamma(1 + 1/k)`.
    fn mean(&self) -> f64 {
        let inv_k = 1.0 / self.k;
        (ln_gamma(1.0 + inv_k) - inv_k * self.theta.ln()).exp()
    }

    fn quantile(&self, q: f64) -> f64 {
        self.from_uniform(q)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.from_uniform(u)
    }
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// Gamma law in shape/rate form: density proportional to
/// `theta^(alpha-1) exp(-beta theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    alpha: f64,
    beta: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.beta
    }

    pub fn variance(&self) -> f64 {
        self.alpha / (self.beta * self.beta)
    }

    /// Marsaglia–Tsang squeeze/rejection for `alpha >= 1`; smaller shapes are
    /// boosted through `Gamma(alpha + 1) * U^(1/alpha)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        standard_gamma(self.alpha, rng) / self.beta
    }
}

fn standard_gamma<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha < 1.0 {
        let boosted = standard_gamma(alpha + 1.0, rng);
        let u = open_unit(rng);
        return boosted * u.powf(1.0 / alpha);
    }
    let d = alpha - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = open_unit(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

// ---------------------------------------------------------------------------
// Normal (truncated at zero)
// ---------------------------------------------------------------------------

/// Normal demand parameters before truncation at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    mu: f64,
    sigma: f64,
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

impl NormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::params(format!("mu must be finite, got {mu}")));
        }
        check_positive("sigma", sigma)?;
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Mass the untruncated normal puts below zero.
    fn mass_below_zero(&self) -> f64 {
        std_normal_cdf(-self.mu / self.sigma)
    }
}

impl DemandDistribution for NormalParams {
    /// CDF of the normal conditioned on being nonnegative.
    fn cdf_value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let p0 = self.mass_below_zero();
        let px = std_normal_cdf((x - self.mu) / self.sigma);
        ((px - p0) / (1.0 - p0)).clamp(0.0, 1.0)
    }

    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let p0 = self.mass_below_zero();
        let upper = std_normal_cdf(-(x - self.mu) / self.sigma);
        (upper / (1.0 - p0)).clamp(0.0, 1.0)
    }

    /// `mu + sigma * phi(a) / (1 - Phi(a))` with `a = -mu / sigma`.
    fn mean(&self) -> f64 {
        let a = -self.mu / self.sigma;
        self.mu + self.sigma * std_normal_pdf(a) / (1.0 - self.mass_below_zero())
    }

    /// Bisection on the conditional CDF, bracket width below 1e-12.
    fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        if q <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = self.mu.max(0.0) + self.sigma;
        while self.cdf_value(hi) < q {
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        while hi - lo > 1e-12 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.cdf_value(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Draw from the untruncated normal and resample until nonnegative.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let x = self.mu + self.sigma * z;
            if x >= 0.0 {
                return x;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

/// Demand law of an environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DemandModel {
    Weibull(WeibullParams),
    Normal(NormalParams),
}

impl DemandDistribution for DemandModel {
    fn cdf_value(&self, x: f64) -> f64 {
        match self {
            DemandModel::Weibull(w) => w.cdf_value(x),
            DemandModel::Normal(n) => n.cdf_value(x),
        }
    }

    fn survival(&self, x: f64) -> f64 {
        match self {
            DemandModel::Weibull(w) => w.survival(x),
            DemandModel::Normal(n) => n.survival(x),
        }
    }

    fn mean(&self) -> f64 {
        match self {
            DemandModel::Weibull(w) => w.mean(),
            DemandModel::Normal(n) => n.mean(),
        }
    }

    fn quantile(&self, q: f64) -> f64 {
        match self {
            DemandModel::Weibull(w) => w.quantile(q),
            DemandModel::Normal(n) => n.quantile(q),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DemandModel::Weibull(w) => w.sample(rng),
            DemandModel::Normal(n) => n.sample(rng),
        }
    }
}

// ---------------------------------------------------------------------------
// Demand range
// ---------------------------------------------------------------------------

/// High-probability range `[d_low, d_high]` for a single Weibull demand draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandRange {
    pub d_low: f64,
    pub d_high: f64,
}

impl DemandRange {
    /// Each tail outside the range has probability exactly `delta / (2T)`.
    pub fn compute(theta_star: f64, k: f64, horizon: u64, delta: f64) -> Result<Self> {
        check_positive("theta_star", theta_star)?;
        check_positive("k", k)?;
        if horizon == 0 {
            return Err(Error::domain("horizon must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        let two_t = 2.0 * horizon as f64;
        // ln(2T / (2T - delta)) = -ln(1 - delta / 2T)
        let low_log = -(-delta / two_t).ln_1p();
        let high_log = (two_t / delta).ln();
        Ok(Self {
            d_low: (low_log / theta_star).powf(1.0 / k),
            d_high: (high_log / theta_star).powf(1.0 / k),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{trial_stream, StreamPurpose};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn weibull_cdf_examples() {
        let w = WeibullParams::new(1.0, 1.0).unwrap();
        assert!(close(w.cdf(2f64.ln()).unwrap(), 0.5, 1e-15));
        let w = WeibullParams::new(2.0, 2.0).unwrap();
        assert_eq!(w.cdf(0.0).unwrap(), 0.0);
        let w = WeibullParams::new(0.5, 2.0).unwrap();
        assert!(close(w.cdf(2.0).unwrap(), 1.0 - (-2f64).exp(), 1e-15));
        assert!(close(w.cdf(2.0).unwrap(), 0.864665, 1e-6));
        assert!(matches!(w.cdf(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn weibull_inverse_examples() {
        let w = WeibullParams::new(1.0, 1.0).unwrap();
        assert!(close(w.inverse_cdf(0.5).unwrap(), 2f64.ln(), 1e-15));
        assert_eq!(w.inverse_cdf(0.0).unwrap(), 0.0);
        let w = WeibullParams::new(4.0, 2.0).unwrap();
        assert!(close(w.inverse_cdf(0.9).unwrap(), (10f64.ln() / 4.0).sqrt(), 1e-14));
        assert!(close(w.inverse_cdf(0.9).unwrap(), 0.758714, 1e-6));
        assert!(w.inverse_cdf(1.0).is_err());
        assert!(w.inverse_cdf(-0.1).is_err());
    }

    #[test]
    fn weibull_inverse_transform_examples() {
        let w = WeibullParams::new(1.0, 1.0).unwrap();
        assert!(close(w.from_uniform(0.5), 2f64.ln(), 1e-15));
        assert_eq!(w.from_uniform(0.0), 0.0);
        let w = WeibullParams::new(0.5, 2.0).unwrap();
        assert!(close(w.from_uniform(1.0 - (-2f64).exp()), 2.0, 1e-12));
    }

    #[test]
    fn weibull_round_trip_grid() {
        for &(theta, k) in &[(1.0, 1.0), (0.3, 2.0), (5.0, 0.7), (2.0, 3.5)] {
            let w = WeibullParams::new(theta, k).unwrap();
            for i in 1..=99 {
                let q = i as f64 / 100.0;
                let back = w.cdf(w.inverse_cdf(q).unwrap()).unwrap();
                assert!((back - q).abs() <= 1e-12, "theta={theta} k={k} q={q}");
            }
        }
    }

    #[test]
    fn weibull_mean_matches_gamma_function() {
        // Exp(1) mean is 1; Rayleigh-type k=2, theta=1 mean is sqrt(pi)/2.
        let w = WeibullParams::new(1.0, 1.0).unwrap();
        assert!(close(w.mean(), 1.0, 1e-10));
        let w = WeibullParams::new(1.0, 2.0).unwrap();
        assert!(close(w.mean(), std::f64::consts::PI.sqrt() / 2.0, 1e-10));
        let w = WeibullParams::new(4.0, 1.0).unwrap();
        assert!(close(w.mean(), 0.25, 1e-10));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(WeibullParams::new(0.0, 1.0).is_err());
        assert!(WeibullParams::new(1.0, -1.0).is_err());
        assert!(GammaParams::new(1.0, 0.0).is_err());
        assert!(NormalParams::new(1.0, 0.0).is_err());
        assert!(NormalParams::new(f64::NAN, 1.0).is_err());
    }

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn gamma_sampler_moments() {
        for (i, &(a, b)) in [(1.0, 1.0), (4.0, 4.0), (0.4, 2.0), (28.0, 3.0)].iter().enumerate() {
            let g = GammaParams::new(a, b).unwrap();
            let mut rng = trial_stream(11, i as u64, StreamPurpose::Auxiliary);
            let xs: Vec<f64> = (0..100_000).map(|_| g.sample(&mut rng)).collect();
            let (m, v) = moments(&xs);
            let se = (g.variance() / xs.len() as f64).sqrt();
            assert!((m - g.mean()).abs() <= 4.0 * se, "alpha={a} mean {m}");
            assert!((v - g.variance()).abs() <= 0.1 * g.variance(), "alpha={a} var {v}");
            assert!(xs.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn inverse_gamma_mean_identity() {
        // E[1/theta] = beta / (alpha - 1) = 1.5 for (5, 6).
        let g = GammaParams::new(5.0, 6.0).unwrap();
        let mut rng = trial_stream(12, 0, StreamPurpose::Auxiliary);
        let xs: Vec<f64> = (0..100_000).map(|_| 1.0 / g.sample(&mut rng)).collect();
        let (m, v) = moments(&xs);
        let se = (v / xs.len() as f64).sqrt();
        assert!((m - 1.5).abs() <= 4.0 * se, "mean {m}");
    }

    #[test]
    fn inverse_gamma_lower_tail_frequency() {
        let g = GammaParams::new(4.0, 4.0).unwrap();
        let mut rng = trial_stream(13, 0, StreamPurpose::Auxiliary);
        let n = 100_000;
        let cut = g.beta() / (2.0 * g.alpha());
        let hits = (0..n).filter(|_| 1.0 / g.sample(&mut rng) <= cut).count();
        let freq = hits as f64 / n as f64;
        let bound = (2.0 / std::f64::consts::E).powf(4.0);
        let se = (bound * (1.0 - bound) / n as f64).sqrt();
        assert!(freq <= bound + 3.0 * se, "freq {freq}");
    }

    #[test]
    fn truncated_normal_far_from_zero() {
        let n = NormalParams::new(10.0, 1.0).unwrap();
        let mut rng = trial_stream(14, 0, StreamPurpose::Auxiliary);
        let xs: Vec<f64> = (0..100_000).map(|_| n.sample(&mut rng)).collect();
        let (m, v) = moments(&xs);
        let se = (v / xs.len() as f64).sqrt();
        assert!((m - 10.0).abs() <= 4.0 * se);
        assert!(close(n.mean(), 10.0, 1e-12));
    }

    #[test]
    fn half_normal_moment() {
        let n = NormalParams::new(0.0, 1.0).unwrap();
        let expect = (2.0 / std::f64::consts::PI).sqrt();
        assert!(close(n.mean(), expect, 1e-12));
        let mut rng = trial_stream(15, 0, StreamPurpose::Auxiliary);
        let xs: Vec<f64> = (0..100_000).map(|_| n.sample(&mut rng)).collect();
        let (m, v) = moments(&xs);
        let se = (v / xs.len() as f64).sqrt();
        assert!((m - expect).abs() <= 4.0 * se, "mean {m}");
        assert!(xs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn truncated_normal_quantile_inverts_cdf() {
        for &(mu, sigma) in &[(0.0, 1.0), (10.0, 2.0), (1.0, 3.0)] {
            let n = NormalParams::new(mu, sigma).unwrap();
            let median = n.quantile(0.5);
            assert!((n.cdf_value(median) - 0.5).abs() < 1e-10);
            for q in [0.02, 0.5, 0.9, 0.98] {
                assert!((n.cdf_value(n.quantile(q)) - q).abs() < 1e-10);
            }
        }
        // Half-normal median is Phi^{-1}(0.75).
        let n = NormalParams::new(0.0, 1.0).unwrap();
        assert!((n.quantile(0.5) - 0.674_489_750_196_081_7).abs() < 1e-9);
    }

    #[test]
    fn demand_range_examples() {
        let r = DemandRange::compute(1.0, 1.0, 600, 0.1).unwrap();
        assert!(close(r.d_high, 12000f64.ln(), 1e-14));
        assert!(close(r.d_high, 9.39266, 1e-6));
        assert!(close(r.d_low, (1200.0f64 / 1199.9).ln(), 1e-9));
        assert!((r.d_low - 8.3337e-5).abs() < 1e-8);
        let tiny = DemandRange::compute(1.0, 1.0, 600, 1e-12).unwrap();
        assert!(tiny.d_low < 1e-14);
        assert!(DemandRange::compute(1.0, 1.0, 600, 0.0).is_err());
        assert!(DemandRange::compute(1.0, 1.0, 600, 1.0).is_err());
    }

    #[test]
    fn demand_range_tail_identities() {
        for &(theta, k, t, delta) in &[(1.0, 1.0, 600, 0.1), (0.3, 2.0, 100, 0.05), (4.0, 0.5, 7, 0.5)] {
            let r = DemandRange::compute(theta, k, t, delta).unwrap();
            let w = WeibullParams::new(theta, k).unwrap();
            let tail = delta / (2.0 * t as f64);
            assert!((w.cdf(r.d_low).unwrap() - tail).abs() <= 1e-12 * tail.max(1e-3));
            assert!((w.cdf(r.d_high).unwrap() - (1.0 - tail)).abs() <= 1e-12);
            assert!(r.d_low < r.d_high);
        }
    }
}
