//! Poisson log-linear models `y_i ~ Poisson(E_i exp(theta_i))`.
//!
//! Three structures for `theta_i` are provided:
//!
//! * common rate, `theta_i = alpha_0` with a flat prior on `alpha_0`, i.e.
//!   `p(lambda) ∝ 1/lambda` for `lambda = exp(alpha_0)`;
//! * exchangeable random effects, `theta_i = alpha_0 + gamma_i` with
//!   `gamma_i ~ N(0, sigma_gamma^2)` and an inverse-gamma hyperprior;
//! * saturated, one free mean per observation with prior `∝ mu_i^{-c}`.

use crate::error::{domain, Error, Result};
use crate::probkit::{RngStream, ScalarDistribution};

use super::{DiscreteModel, MaximumLikelihood, Model};

/// Chain length controls for MCMC-based variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings {
    pub retained: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self {
            retained: 5000,
            burn_in: 2000,
            thin: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeableSettings {
    /// Inverse-gamma shape for `sigma_gamma^2`.
    pub hyper_shape: f64,
    /// Inverse-gamma scale for `sigma_gamma^2`.
    pub hyper_scale: f64,
    /// Pin `sigma_gamma^2` instead of sampling it.
    pub fixed_variance: Option<f64>,
    pub chain: ChainSettings,
    /// Target acceptance rate of the one-dimensional random-walk updates.
    pub target_acceptance: f64,
}

impl Default for ExchangeableSettings {
    fn default() -> Self {
        Self {
            hyper_shape: 0.001,
            hyper_scale: 0.001,
            fixed_variance: None,
            chain: ChainSettings::default(),
            target_acceptance: 0.44,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoissonVariant {
    /// `theta_i = alpha_0`.
    Common,
    /// `theta_i = alpha_0 + gamma_i`, exchangeable `gamma_i`.
    Exchangeable(ExchangeableSettings),
    /// `theta_i = alpha_i`, prior on `mu_i` proportional to `mu_i^{-prior_exponent}`.
    Saturated { prior_exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PoissonParam {
    Common {
        rate: f64,
    },
    Exchangeable {
        alpha0: f64,
        gamma: Vec<f64>,
        sigma_gamma: f64,
    },
    Saturated {
        means: Vec<f64>,
    },
}

impl PoissonParam {
    /// Mean of observation `j`.
    #[inline]
    pub fn mean(&self, j: usize, offsets: &[f64]) -> f64 {
        match self {
            PoissonParam::Common { rate } => rate * offsets[j],
            PoissonParam::Exchangeable { alpha0, gamma, .. } => (alpha0 + gamma[j]).exp() * offsets[j],
            PoissonParam::Saturated { means } => means[j],
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoissonLogLinear {
    variant: PoissonVariant,
    offsets: Vec<f64>,
}

impl PoissonLogLinear {
    pub fn new(variant: PoissonVariant, offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return domain("poisson model needs at least one offset");
        }
        if let Some(i) = offsets.iter().position(|e| !(e.is_finite() && *e > 0.0)) {
            return domain(format!(
                "offset E[{i}] = {} must be finite and > 0",
                offsets[i]
            ));
        }
        match variant {
            PoissonVariant::Saturated { prior_exponent } if !(prior_exponent.is_finite() && prior_exponent >= 0.0) => {
                return domain(format!("prior exponent must be >= 0, got {prior_exponent}"));
            }
            PoissonVariant::Exchangeable(s) => {
                if s.chain.thin == 0 || s.chain.retained == 0 {
                    return domain("chain needs thin >= 1 and retained >= 1");
                }
                if !(s.hyper_shape > 0.0 && s.hyper_scale > 0.0) {
                    return domain("inverse-gamma hyperparameters must be > 0");
                }
                if let Some(v) = s.fixed_variance {
                    if !(v > 0.0 && v.is_finite()) {
                        return domain("fixed random-effect variance must be > 0");
                    }
                }
            }
            _ => {}
        }
        Ok(Self { variant, offsets })
    }

    pub fn common(offsets: Vec<f64>) -> Result<Self> {
        Self::new(PoissonVariant::Common, offsets)
    }

    pub fn saturated(offsets: Vec<f64>, prior_exponent: f64) -> Result<Self> {
        Self::new(PoissonVariant::Saturated { prior_exponent }, offsets)
    }

    pub fn exchangeable(offsets: Vec<f64>, settings: ExchangeableSettings) -> Result<Self> {
        Self::new(PoissonVariant::Exchangeable(settings), offsets)
    }

    pub fn variant(&self) -> &PoissonVariant {
        &self.variant
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn means(&self, theta: &PoissonParam) -> Vec<f64> {
        (0..self.offsets.len()).map(|j| theta.mean(j, &self.offsets)).collect()
    }
}

/// `lambda ~ Gamma(sum y, sum E)`: posterior of the common rate under a flat
/// prior on `alpha_0 = ln lambda`.
pub fn poisson_common_posterior_draw(counts: &[u64], offsets: &[f64], rng: &mut RngStream) -> Result<f64> {
    Ok(common_posterior(counts, offsets)?.sample(rng))
}

fn common_posterior(counts: &[u64], offsets: &[f64]) -> Result<ScalarDistribution> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return domain("common-rate posterior is improper when all counts are zero");
    }
    ScalarDistribution::gamma(total as f64, offsets.iter().sum())
}

/// Independent `mu_i ~ Gamma(y_i + 1 - c, 1)`: posterior of each Poisson mean
/// under the prior `∝ mu_i^{-c}`.
pub fn poisson_saturated_posterior_draw(
    counts: &[u64],
    prior_exponent: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let dists = saturated_posteriors(counts, prior_exponent)?;
    Ok(dists.iter().map(|d| d.sample(rng)).collect())
}

fn saturated_posteriors(counts: &[u64], c: f64) -> Result<Vec<ScalarDistribution>> {
    let improper: Vec<usize> = counts
        .iter()
        .enumerate()
        .filter(|(_, &y)| y as f64 + 1.0 - c <= 0.0)
        .map(|(i, _)| i)
        .collect();
    if !improper.is_empty() {
        return domain(format!(
            "saturated posterior with prior exponent {c} is improper for zero counts at observations {improper:?}; \
             use prior exponent 1/2 or drop those observations"
        ));
    }
    counts
        .iter()
        .map(|&y| ScalarDistribution::gamma(y as f64 + 1.0 - c, 1.0))
        .collect()
}

/// Post-adaptation acceptance rates of the random-walk blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDiagnostics {
    pub acceptance_alpha0: f64,
    pub acceptance_gamma: Vec<f64>,
    pub step_alpha0: f64,
    pub step_gamma: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub draws: Vec<PoissonParam>,
    pub diagnostics: ChainDiagnostics,
}

/// Metropolis-within-Gibbs sampler for the exchangeable random-effects model.
///
/// Each sweep updates `alpha_0` and then every `gamma_i` by one-dimensional
/// random-walk Metropolis, followed by a conjugate inverse-gamma draw of
/// `sigma_gamma^2` (skipped when the variance is pinned). Step sizes adapt by
/// Robbins–Monro on the log scale during burn-in only and are frozen after.
pub fn poisson_exchangeable_mcmc(
    counts: &[u64],
    offsets: &[f64],
    settings: &ExchangeableSettings,
    rng: &mut RngStream,
) -> Result<ChainOutput> {
    let n = counts.len();
    if n < 2 {
        return domain(format!("exchangeable model needs n >= 2, got {n}"));
    }
    if offsets.len() != n {
        return domain(format!("{} counts but {} offsets", n, offsets.len()));
    }
    let chain = settings.chain;
    let y: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let total_y: f64 = y.iter().sum();
    let total_e: f64 = offsets.iter().sum();

    let mut alpha = (total_y / total_e).ln();
    let mut gamma = vec![0.0; n];
    let mut var = settings.fixed_variance.unwrap_or(0.1);

    let alpha_lp = |a: f64, g: &[f64]| -> f64 {
        y.iter()
            .zip(offsets)
            .zip(g)
            .map(|((yi, ei), gi)| yi * a - ei * (a + gi).exp())
            .sum()
    };
    let gamma_lp = |i: usize, a: f64, gi: f64, v: f64| -> f64 {
        y[i] * gi - offsets[i] * (a + gi).exp() - 0.5 * gi * gi / v
    };

    if !alpha_lp(alpha, &gamma).is_finite() {
        return Err(Error::Sampler(
            "non-finite log-posterior at initialization (are all counts zero?)".into(),
        ));
    }

    let mut log_step_alpha = -(0.5 * total_y.max(1.0).ln());
    let mut log_step_gamma: Vec<f64> = y.iter().map(|yi| -(0.5 * (yi + 1.0).ln())).collect();
    let target = settings.target_acceptance;

    let mut acc_alpha = 0usize;
    let mut acc_gamma = vec![0usize; n];
    let mut post_iters = 0usize;

    let total_iters = chain.burn_in + chain.retained * chain.thin;
    let mut draws = Vec::with_capacity(chain.retained);

    for it in 0..total_iters {
        let adapting = it < chain.burn_in;
        let gain = ((it + 1) as f64).powf(-0.6);

        // alpha_0
        let cur = alpha_lp(alpha, &gamma);
        let prop = alpha + log_step_alpha.exp() * ScalarDistribution::standard_normal().sample(rng);
        let new = alpha_lp(prop, &gamma);
        let accepted = new.is_finite() && (new - cur) >= rng.uniform_open().ln();
        if accepted {
            alpha = prop;
        }
        if adapting {
            log_step_alpha += gain * (accepted as u8 as f64 - target);
        } else {
            acc_alpha += accepted as usize;
        }

        // gamma_i
        for i in 0..n {
            let step = log_step_gamma[i].exp();
            let cur = gamma_lp(i, alpha, gamma[i], var);
            let prop = gamma[i] + step * ScalarDistribution::standard_normal().sample(rng);
            let new = gamma_lp(i, alpha, prop, var);
            let accepted = new.is_finite() && (new - cur) >= rng.uniform_open().ln();
            if accepted {
                gamma[i] = prop;
            }
            if adapting {
                log_step_gamma[i] += gain * (accepted as u8 as f64 - target);
            } else {
                acc_gamma[i] += accepted as usize;
            }
        }

        // sigma_gamma^2 | gamma ~ InvGamma(a + n/2, b + sum gamma^2 / 2)
        if settings.fixed_variance.is_none() {
            let shape = settings.hyper_shape + 0.5 * n as f64;
            let scale = settings.hyper_scale + 0.5 * gamma.iter().map(|g| g * g).sum::<f64>();
            let precision = ScalarDistribution::gamma(shape, scale)
                .map_err(|e| Error::Sampler(format!("variance update failed: {e}")))?
                .sample(rng);
            var = 1.0 / precision;
            if !(var.is_finite() && var > 0.0) {
                return Err(Error::Sampler(format!(
                    "random-effect variance left (0, inf) at iteration {it}"
                )));
            }
        }

        if !adapting {
            post_iters += 1;
            if post_iters % chain.thin == 0 {
                draws.push(PoissonParam::Exchangeable {
                    alpha0: alpha,
                    gamma: gamma.clone(),
                    sigma_gamma: var.sqrt(),
                });
            }
        }
    }

    let denom = post_iters.max(1) as f64;
    Ok(ChainOutput {
        draws,
        diagnostics: ChainDiagnostics {
            acceptance_alpha0: acc_alpha as f64 / denom,
            acceptance_gamma: acc_gamma.iter().map(|&a| a as f64 / denom).collect(),
            step_alpha0: log_step_alpha.exp(),
            step_gamma: log_step_gamma.iter().map(|l| l.exp()).collect(),
        },
    })
}

impl Model for PoissonLogLinear {
    type Obs = u64;
    type Param = PoissonParam;

    fn name(&self) -> String {
        match self.variant {
            PoissonVariant::Common => "poisson-common".into(),
            PoissonVariant::Exchangeable(_) => "poisson-exchangeable".into(),
            PoissonVariant::Saturated { prior_exponent } => {
                format!("poisson-saturated(c={prior_exponent})")
            }
        }
    }

    fn n_params(&self, n_obs: usize) -> usize {
        match self.variant {
            PoissonVariant::Common => 1,
            PoissonVariant::Exchangeable(_) => n_obs + 2,
            PoissonVariant::Saturated { .. } => n_obs,
        }
    }

    fn validate_data(&self, data: &[u64]) -> Result<()> {
        if data.len() != self.offsets.len() {
            return domain(format!(
                "{} counts supplied for a model with {} offsets",
                data.len(),
                self.offsets.len()
            ));
        }
        match self.variant {
            PoissonVariant::Common => common_posterior(data, &self.offsets).map(|_| ()),
            PoissonVariant::Saturated { prior_exponent } => {
                saturated_posteriors(data, prior_exponent).map(|_| ())
            }
            PoissonVariant::Exchangeable(_) => {
                if data.len() < 2 {
                    return domain("exchangeable model needs n >= 2");
                }
                if data.iter().all(|&y| y == 0) {
                    return domain("exchangeable model needs at least one positive count");
                }
                Ok(())
            }
        }
    }

    fn posterior_draw(&self, data: &[u64], rng: &mut RngStream) -> Result<PoissonParam> {
        Ok(self.posterior_sample(data, 1, rng)?.pop().expect("one draw"))
    }

    fn posterior_sample(&self, data: &[u64], n_draws: usize, rng: &mut RngStream) -> Result<Vec<PoissonParam>> {
        self.validate_data(data)?;
        match self.variant {
            PoissonVariant::Common => {
                let d = common_posterior(data, &self.offsets)?;
                Ok((0..n_draws)
                    .map(|_| PoissonParam::Common { rate: d.sample(rng) })
                    .collect())
            }
            PoissonVariant::Saturated { prior_exponent } => {
                let ds = saturated_posteriors(data, prior_exponent)?;
                Ok((0..n_draws)
                    .map(|_| PoissonParam::Saturated {
                        means: ds.iter().map(|d| d.sample(rng)).collect(),
                    })
                    .collect())
            }
            PoissonVariant::Exchangeable(settings) => {
                let mut s = settings;
                s.chain.retained = n_draws;
                Ok(poisson_exchangeable_mcmc(data, &self.offsets, &s, rng)?.draws)
            }
        }
    }

    fn predictive_draw(&self, theta: &PoissonParam, n_obs: usize, rng: &mut RngStream) -> Vec<u64> {
        assert_eq!(n_obs, self.offsets.len(), "poisson replicate size is fixed by the offsets");
        (0..n_obs)
            .map(|j| {
                ScalarDistribution::poisson(theta.mean(j, &self.offsets))
                    .expect("positive poisson mean")
                    .sample(rng) as u64
            })
            .collect()
    }

    fn obs_mean_var(&self, j: usize, theta: &PoissonParam) -> (f64, f64) {
        let m = theta.mean(j, &self.offsets);
        (m, m)
    }

    fn param_values(&self, theta: &PoissonParam) -> Vec<f64> {
        match theta {
            PoissonParam::Common { rate } => vec![*rate],
            PoissonParam::Exchangeable {
                alpha0,
                gamma,
                sigma_gamma,
            } => {
                let mut v = vec![*alpha0, *sigma_gamma];
                v.extend_from_slice(gamma);
                v
            }
            PoissonParam::Saturated { means } => means.clone(),
        }
    }

    fn param_from_values(&self, values: &[f64]) -> Result<PoissonParam> {
        let n = self.offsets.len();
        if values.iter().any(|v| !v.is_finite()) {
            return domain("non-finite value in poisson draw");
        }
        match self.variant {
            PoissonVariant::Common => match values {
                [rate] if *rate > 0.0 => Ok(PoissonParam::Common { rate: *rate }),
                _ => domain(format!("common-rate draw needs one positive value, got {} values", values.len())),
            },
            PoissonVariant::Exchangeable(_) => {
                if values.len() != n + 2 || values[1] <= 0.0 {
                    return domain(format!(
                        "exchangeable draw needs alpha0, sigma_gamma > 0 and {n} effects"
                    ));
                }
                Ok(PoissonParam::Exchangeable {
                    alpha0: values[0],
                    sigma_gamma: values[1],
                    gamma: values[2..].to_vec(),
                })
            }
            PoissonVariant::Saturated { .. } => {
                if values.len() != n || values.iter().any(|&m| m <= 0.0) {
                    return domain(format!("saturated draw needs {n} positive means"));
                }
                Ok(PoissonParam::Saturated {
                    means: values.to_vec(),
                })
            }
        }
    }
}

impl DiscreteModel for PoissonLogLinear {
    fn obs_pmf(&self, j: usize, y: u64, theta: &PoissonParam) -> f64 {
        match ScalarDistribution::poisson(theta.mean(j, &self.offsets)) {
            Ok(d) => d.density(y as f64),
            Err(_) => f64::NAN,
        }
    }

    #[inline]
    fn obs_cdf_pair(&self, j: usize, y: u64, theta: &PoissonParam) -> (f64, f64) {
        match ScalarDistribution::poisson(theta.mean(j, &self.offsets)) {
            Ok(d) => {
                let below = if y == 0 { 0.0 } else { d.cdf((y - 1) as f64) };
                (below, d.cdf(y as f64))
            }
            Err(_) => (f64::NAN, f64::NAN),
        }
    }
}

impl MaximumLikelihood for PoissonLogLinear {
    fn mle(&self, data: &[u64]) -> Result<PoissonParam> {
        if data.len() != self.offsets.len() {
            return domain("counts and offsets differ in length");
        }
        match self.variant {
            PoissonVariant::Common => {
                let total: u64 = data.iter().sum();
                if total == 0 {
                    return domain("common-rate MLE is on the boundary (all counts zero)");
                }
                Ok(PoissonParam::Common {
                    rate: total as f64 / self.offsets.iter().sum::<f64>(),
                })
            }
            PoissonVariant::Saturated { .. } => {
                if let Some(i) = data.iter().position(|&y| y == 0) {
                    return domain(format!("saturated MLE is on the boundary at observation {i}"));
                }
                Ok(PoissonParam::Saturated {
                    means: data.iter().map(|&y| y as f64).collect(),
                })
            }
            PoissonVariant::Exchangeable(_) => Err(Error::Unsupported(
                "maximum likelihood for the exchangeable random-effects model".into(),
            )),
        }
    }
}
