//! Policy-versus-environment episodes and regret aggregation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::demand::{DemandDistribution, DemandModel, GammaParams, NormalParams, WeibullParams};
use crate::error::{Error, Result};
use crate::newsvendor::{expected_cost_gap, optimal_order_for, realized_cost, CostParams};
use crate::policies::{CensoredObservation, PolicyContext, PolicyKind};
use crate::rng::{trial_stream, StreamPurpose};

/// Demand law of the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DemandSpec {
    Weibull { theta: f64, k: f64 },
    /// Normal truncated at zero. `model_k` is the Weibull shape the parametric
    /// policies assume, since they keep running the Weibull–Gamma machinery.
    Normal { mu: f64, sigma: f64, model_k: f64 },
}

impl DemandSpec {
    /// Shape handed to the parametric policies.
    pub fn model_k(&self) -> f64 {
        match *self {
            DemandSpec::Weibull { k, .. } => k,
            DemandSpec::Normal { model_k, .. } => model_k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretMode {
    /// Fixed true rate across trials.
    Frequentist,
    /// True rate drawn from the prior for each trial.
    Bayesian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub horizon: u64,
    pub trials: u64,
    pub seed: u64,
    pub cost: CostParams,
    pub demand: DemandSpec,
    pub prior: GammaParams,
    pub policies: Vec<PolicyKind>,
    pub regret_mode: RegretMode,
    pub checkpoints: Vec<u64>,
    /// Confidence level used by the bound evaluators.
    pub delta: f64,
    pub ucb_width_scale: f64,
}

/// Checkpoints every `step` periods, always ending at the horizon.
pub fn checkpoints_every(step: u64, horizon: u64) -> Vec<u64> {
    let step = step.max(1);
    let mut v: Vec<u64> = (1..=horizon / step).map(|i| i * step).collect();
    if v.last() != Some(&horizon) {
        v.push(horizon);
    }
    v
}

impl ExperimentConfig {
    /// Horizon 600, 100 trials, `alpha0 = beta0 = 4`, exponential demand with
    /// rate 1, checkpoints every 10 periods.
    pub fn baseline(cost: CostParams, policies: Vec<PolicyKind>) -> Self {
        Self {
            horizon: 600,
            trials: 100,
            seed: 20_240_601,
            cost,
            demand: DemandSpec::Weibull { theta: 1.0, k: 1.0 },
            prior: GammaParams::new(4.0, 4.0).expect("valid prior"),
            policies,
            regret_mode: RegretMode::Frequentist,
            checkpoints: checkpoints_every(10, 600),
            delta: 0.1,
            ucb_width_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::config("horizon", "must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "at least one policy is required"));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::config("checkpoints", "at least one checkpoint is required"));
        }
        if let Some(&bad) = self.checkpoints.iter().find(|&&c| c < 1 || c > self.horizon) {
            return Err(Error::config(
                "checkpoints",
                format!("checkpoint {bad} outside [1, {}]", self.horizon),
            ));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("checkpoints", "must be strictly increasing"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("delta", "must lie in (0, 1)"));
        }
        if !(self.ucb_width_scale >= 0.0 && self.ucb_width_scale.is_finite()) {
            return Err(Error::config("ucb.width_scale", "must be a finite nonnegative number"));
        }
        match self.demand {
            DemandSpec::Weibull { theta, k } => {
                WeibullParams::new(theta, k).map_err(|e| Error::config("demand.theta", e.to_string()))?;
            }
            DemandSpec::Normal { mu, sigma, model_k } => {
                NormalParams::new(mu, sigma).map_err(|e| Error::config("demand.sigma", e.to_string()))?;
                if !(model_k > 0.0 && model_k.is_finite()) {
                    return Err(Error::config("demand.k", "must be positive"));
                }
                if self.regret_mode == RegretMode::Bayesian {
                    return Err(Error::config(
                        "regret_mode",
                        "bayesian mode needs weibull demand (the prior is over the Weibull rate)",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Ground truth of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialEnvironment {
    pub model: DemandModel,
    /// True Weibull rate, when demand is Weibull.
    pub theta_star: Option<f64>,
    pub optimal_order: f64,
}

/// Resolve the true demand law for a trial. In Bayesian mode the rate is drawn
/// from the prior on a stream reserved for the environment.
pub fn trial_environment(config: &ExperimentConfig, trial: u64) -> Result<TrialEnvironment> {
    let (model, theta_star) = match config.demand {
        DemandSpec::Weibull { theta, k } => {
            let theta = match config.regret_mode {
                RegretMode::Frequentist => theta,
                RegretMode::Bayesian => {
                    let mut rng = trial_stream(config.seed, trial, StreamPurpose::Environment);
                    config.prior.sample(&mut rng)
                }
            };
            (DemandModel::Weibull(WeibullParams::new(theta, k)?), Some(theta))
        }
        DemandSpec::Normal { mu, sigma, .. } => (DemandModel::Normal(NormalParams::new(mu, sigma)?), None),
    };
    let optimal_order = optimal_order_for(&config.cost, &model);
    Ok(TrialEnvironment {
        model,
        theta_star,
        optimal_order,
    })
}

/// Expected-cost gap `g(y) - g(y*)` of one period, clipped at zero against
/// quadrature round-off.
pub fn pseudo_regret_increment<D: DemandDistribution>(cp: &CostParams, dist: &D, y: f64, y_star: f64) -> f64 {
    if y == y_star {
        return 0.0;
    }
    expected_cost_gap(cp, dist, y, y_star).max(0.0)
}

/// One period of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub period: u64,
    pub order: f64,
    /// Harness-side log of the realised demand; policies never see it.
    pub demand: f64,
    pub observation: CensoredObservation,
    pub realized_cost: f64,
    pub realized_regret: f64,
    pub pseudo_regret: f64,
    /// Posterior after this period's update, for policies that keep one.
    pub posterior: Option<GammaParams>,
    /// Parameter sampled to choose this period's order.
    pub sampled_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub policy: String,
    pub trial: u64,
    pub theta_star: Option<f64>,
    pub optimal_order: f64,
    pub records: Vec<PeriodRecord>,
}

impl Trajectory {
    pub fn cumulative_pseudo_regret(&self) -> Vec<f64> {
        cumulative(self.records.iter().map(|r| r.pseudo_regret))
    }

    pub fn cumulative_realized_regret(&self) -> Vec<f64> {
        cumulative(self.records.iter().map(|r| r.realized_regret))
    }
}

fn cumulative(it: impl Iterator<Item = f64>) -> Vec<f64> {
    it.scan(0.0, |acc, x| {
        *acc += x;
        Some(*acc)
    })
    .collect()
}

/// Run one policy for one trial. Deterministic in `(seed, trial, policy)`; the
/// demand stream depends only on `(seed, trial)`.
pub fn run_trial(config: &ExperimentConfig, policy: PolicyKind, trial: u64) -> Result<Trajectory> {
    let env = trial_environment(config, trial)?;
    let ctx = PolicyContext {
        cost: config.cost,
        k: config.demand.model_k(),
        prior: config.prior,
        horizon: config.horizon,
        ucb_width_scale: config.ucb_width_scale,
        optimal_order: env.optimal_order,
    };
    let mut pol = policy.build(&ctx)?;
    let mut demand_rng = trial_stream(config.seed, trial, StreamPurpose::Demand);
    let mut policy_rng = trial_stream(config.seed, trial, StreamPurpose::Policy);
    let y_star = env.optimal_order;

    let mut records = Vec::with_capacity(config.horizon as usize);
    for period in 1..=config.horizon {
        let order = pol.choose(period, &mut policy_rng);
        if !(order.is_finite() && order >= 0.0) {
            return Err(Error::domain(format!(
                "policy {} produced invalid order {order} in period {period}",
                pol.name()
            )));
        }
        let sampled_theta = pol.last_sample();
        let demand = env.model.sample(&mut demand_rng);
        let observation = CensoredObservation::reveal(order, demand)?;
        let cost = realized_cost(&config.cost, order, demand)?;
        let realized_regret = cost - realized_cost(&config.cost, y_star, demand)?;
        let pseudo_regret = pseudo_regret_increment(&config.cost, &env.model, order, y_star);
        pol.observe(&observation);
        records.push(PeriodRecord {
            period,
            order,
            demand,
            observation,
            realized_cost: cost,
            realized_regret,
            pseudo_regret,
            posterior: pol.posterior(),
            sampled_theta,
        });
    }
    Ok(Trajectory {
        policy: pol.name(),
        trial,
        theta_star: env.theta_star,
        optimal_order: y_star,
        records,
    })
}

/// Mean and standard error of cumulative regret at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub period: u64,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub policy: String,
    pub points: Vec<CurvePoint>,
}

impl RegretCurve {
    /// Aggregate per-trial cumulative regret sampled at `checkpoints`.
    /// `per_trial[i][j]` is trial `i` at checkpoint `j`.
    pub fn from_samples(policy: impl Into<String>, checkpoints: &[u64], per_trial: &[Vec<f64>]) -> Self {
        let n = per_trial.len() as u64;
        let points = checkpoints
            .iter()
            .enumerate()
            .map(|(j, &period)| {
                let values: Vec<f64> = per_trial.iter().map(|row| row[j]).collect();
                let (mean, stderr) = mean_stderr(&values);
                CurvePoint {
                    period,
                    mean,
                    stderr,
                    trials: n,
                }
            })
            .collect();
        Self {
            policy: policy.into(),
            points,
        }
    }

    pub fn at(&self, period: u64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.period == period)
    }

    pub fn final_mean(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.mean)
    }
}

/// Sample mean and standard error (zero for a single value).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Regret curves of every policy, under pseudo-regret and realised regret.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub pseudo: BTreeMap<String, RegretCurve>,
    pub realized: BTreeMap<String, RegretCurve>,
}

/// Run every configured policy across all trials. Trials execute in parallel
/// and are merged by trial index, so the result does not depend on scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let mut pseudo = BTreeMap::new();
    let mut realized = BTreeMap::new();
    for &policy in &config.policies {
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let traj = run_trial(config, policy, trial).map_err(|e| Error::Trial {
                    trial,
                    source: Box::new(e),
                })?;
                let cp = traj.cumulative_pseudo_regret();
                let cr = traj.cumulative_realized_regret();
                let pick = |v: &[f64]| config.checkpoints.iter().map(|&c| v[c as usize - 1]).collect::<Vec<_>>();
                Ok((pick(&cp), pick(&cr)))
            })
            .collect::<Result<Vec<_>>>()?;
        let (p_rows, r_rows): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let name = policy.to_string();
        pseudo.insert(name.clone(), RegretCurve::from_samples(name.clone(), &config.checkpoints, &p_rows));
        realized.insert(name.clone(), RegretCurve::from_samples(name, &config.checkpoints, &r_rows));
    }
    Ok(ExperimentOutcome { pseudo, realized })
}

/// `mean(t2) / mean(t1)` for `t2 = 2 t1`; `sqrt(2)` for square-root growth.
pub fn sublinearity_ratio(curve: &RegretCurve, t1: u64, t2: u64) -> Result<f64> {
    if t2 != 2 * t1 {
        return Err(Error::domain(format!("t2 must equal 2 * t1, got t1={t1}, t2={t2}")));
    }
    let a = curve
        .at(t1)
        .ok_or_else(|| Error::domain(format!("checkpoint {t1} missing")))?;
    let b = curve
        .at(t2)
        .ok_or_else(|| Error::domain(format!("checkpoint {t2} missing")))?;
    if a.mean == 0.0 {
        return Err(Error::domain("zero regret at the first checkpoint"));
    }
    Ok(b.mean / a.mean)
}
