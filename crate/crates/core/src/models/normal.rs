use crate::error::{domain, Result};
use crate::probkit::{RngStream, ScalarDistribution};

use super::{ContinuousModel, GroupedLikelihood, MaximumLikelihood, Model};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParam {
    pub mu: f64,
    pub sigma: f64,
}

/// Normal observations with unknown mean and scale under the improper
/// reference prior `p(mu, sigma) ∝ 1/sigma`.
///
/// The posterior factors as `sigma^2 | y ~ (n-1) s^2 / chi2_{n-1}` and
/// `mu | sigma, y ~ N(ybar, sigma^2 / n)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NormalRefPrior;

/// Sufficient statistics `(n, ybar, (n-1) s^2)`.
#[derive(Debug, Clone, Copy)]
struct Suff {
    n: usize,
    mean: f64,
    ss: f64,
}

fn suff(data: &[f64]) -> Result<Suff> {
    let n = data.len();
    if n < 2 {
        return domain(format!("normal model needs n >= 2 observations, got {n}"));
    }
    if let Some(i) = data.iter().position(|y| !y.is_finite()) {
        return domain(format!("observation {i} is not finite"));
    }
    let mean = data.iter().sum::<f64>() / n as f64;
    let ss = data.iter().map(|y| (y - mean).powi(2)).sum::<f64>();
    if !(ss > 0.0) {
        return domain("degenerate data: all observations equal (s = 0)");
    }
    Ok(Suff { n, mean, ss })
}

impl NormalRefPrior {
    /// Posterior draw pinned by two uniforms, built by sequential inversion:
    /// `v1` fixes `sigma` through its marginal posterior CDF, then `v2` fixes
    /// `mu` through its conditional posterior CDF given `sigma`.
    ///
    /// For fixed `(v1, v2)` the draw is affine-equivariant in the data.
    pub fn posterior_from_uniforms(&self, data: &[f64], v1: f64, v2: f64) -> Result<NormalParam> {
        let s = suff(data)?;
        for v in [v1, v2] {
            if !(v > 0.0 && v < 1.0) {
                return domain(format!("posterior uniforms must lie in (0, 1), got {v}"));
            }
        }
        let chi = ScalarDistribution::chi_squared((s.n - 1) as f64)?;
        // sigma increases with v1 iff the chi-squared variate decreases
        let x = chi.quantile(1.0 - v1)?;
        let sigma = (s.ss / x).sqrt();
        let z = ScalarDistribution::standard_normal().quantile(v2)?;
        Ok(NormalParam {
            mu: s.mean + sigma / (s.n as f64).sqrt() * z,
            sigma,
        })
    }

    fn draw_from_suff(&self, s: &Suff, chi: &ScalarDistribution, rng: &mut RngStream) -> NormalParam {
        let x = chi.sample(rng);
        let sigma = (s.ss / x).sqrt();
        let z = ScalarDistribution::standard_normal().sample(rng);
        NormalParam {
            mu: s.mean + sigma / (s.n as f64).sqrt() * z,
            sigma,
        }
    }

    pub fn log_likelihood(&self, data: &[f64], theta: &NormalParam) -> f64 {
        let n = data.len() as f64;
        let ss: f64 = data.iter().map(|y| ((y - theta.mu) / theta.sigma).powi(2)).sum();
        -n * theta.sigma.ln() - 0.5 * ss - n * 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

impl Model for NormalRefPrior {
    type Obs = f64;
    type Param = NormalParam;

    fn name(&self) -> String {
        "normal".into()
    }

    fn n_params(&self, _n_obs: usize) -> usize {
        2
    }

    fn validate_data(&self, data: &[f64]) -> Result<()> {
        suff(data).map(|_| ())
    }

    fn posterior_draw(&self, data: &[f64], rng: &mut RngStream) -> Result<NormalParam> {
        let s = suff(data)?;
        let chi = ScalarDistribution::chi_squared((s.n - 1) as f64)?;
        Ok(self.draw_from_suff(&s, &chi, rng))
    }

    fn posterior_sample(
        &self,
        data: &[f64],
        n_draws: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<NormalParam>> {
        let s = suff(data)?;
        let chi = ScalarDistribution::chi_squared((s.n - 1) as f64)?;
        Ok((0..n_draws).map(|_| self.draw_from_suff(&s, &chi, rng)).collect())
    }

    fn predictive_draw(&self, theta: &NormalParam, n_obs: usize, rng: &mut RngStream) -> Vec<f64> {
        let d = ScalarDistribution::normal(theta.mu, theta.sigma).expect("valid normal parameter");
        d.sample_n(n_obs, rng)
    }

    fn obs_mean_var(&self, _j: usize, theta: &NormalParam) -> (f64, f64) {
        (theta.mu, theta.sigma * theta.sigma)
    }

    fn param_values(&self, theta: &NormalParam) -> Vec<f64> {
        vec![theta.mu, theta.sigma]
    }

    fn param_from_values(&self, values: &[f64]) -> Result<NormalParam> {
        match values {
            [mu, sigma] if mu.is_finite() && sigma.is_finite() && *sigma > 0.0 => Ok(NormalParam {
                mu: *mu,
                sigma: *sigma,
            }),
            _ => domain(format!(
                "normal draw needs two values (mu, sigma > 0), got {values:?}"
            )),
        }
    }
}

impl ContinuousModel for NormalRefPrior {
    #[inline]
    fn obs_cdf(&self, _j: usize, y: f64, theta: &NormalParam) -> f64 {
        ScalarDistribution::standard_normal().cdf((y - theta.mu) / theta.sigma)
    }

    fn is_iid(&self) -> bool {
        true
    }
}

impl MaximumLikelihood for NormalRefPrior {
    fn mle(&self, data: &[f64]) -> Result<NormalParam> {
        let s = suff(data)?;
        Ok(NormalParam {
            mu: s.mean,
            sigma: (s.ss / s.n as f64).sqrt(),
        })
    }
}

impl GroupedLikelihood for NormalRefPrior {
    fn to_unconstrained(&self, theta: &NormalParam) -> Vec<f64> {
        vec![theta.mu, theta.sigma.ln()]
    }

    fn from_unconstrained(&self, x: &[f64]) -> Option<NormalParam> {
        let sigma = x[1].exp();
        (x[0].is_finite() && sigma.is_finite() && sigma > 0.0).then_some(NormalParam {
            mu: x[0],
            sigma,
        })
    }
}
