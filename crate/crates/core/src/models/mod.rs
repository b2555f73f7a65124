//! The model contract and the concrete models used by the diagnostics.
//!
//! A model owns everything that depends on its likelihood and prior:
//! per-observation distribution functions, the posterior sampler, the
//! predictive sampler and (where available) the maximum likelihood fit.
//! Observation-specific structure such as Poisson offsets lives inside the
//! model value, so a dataset is just a slice of observations.

use std::fmt::Debug;

use crate::error::Result;
use crate::probkit::RngStream;

mod generators;
mod normal;
mod poisson;

pub use generators::{generate_null_normal, generate_poisson, generate_t};
pub use normal::{NormalParam, NormalRefPrior};
pub use poisson::{
    poisson_common_posterior_draw, poisson_exchangeable_mcmc, poisson_saturated_posterior_draw,
    ChainDiagnostics, ChainOutput, ChainSettings, ExchangeableSettings, PoissonLogLinear,
    PoissonParam, PoissonVariant,
};

/// Numeric view of one observation.
pub trait ObsValue: Copy + Send + Sync + Debug {
    fn as_f64(self) -> f64;
}

impl ObsValue for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}

impl ObsValue for u64 {
    fn as_f64(self) -> f64 {
        self as f64
    }
}

pub trait Model: Sync {
    type Obs: ObsValue;
    type Param: Clone + Send + Sync + Debug;

    fn name(&self) -> String;

    /// Parameter dimension `s` for a dataset of `n_obs` observations.
    fn n_params(&self, n_obs: usize) -> usize;

    /// Check that `data` satisfies the model's preconditions.
    fn validate_data(&self, data: &[Self::Obs]) -> Result<()>;

    fn posterior_draw(&self, data: &[Self::Obs], rng: &mut RngStream) -> Result<Self::Param>;

    /// `n_draws` posterior draws. Independent draws by default; chain-based
    /// models return thinned post-burn-in output.
    fn posterior_sample(
        &self,
        data: &[Self::Obs],
        n_draws: usize,
        rng: &mut RngStream,
    ) -> Result<Vec<Self::Param>> {
        (0..n_draws).map(|_| self.posterior_draw(data, rng)).collect()
    }

    /// Replicate dataset of `n_obs` observations drawn at `theta`.
    fn predictive_draw(&self, theta: &Self::Param, n_obs: usize, rng: &mut RngStream)
        -> Vec<Self::Obs>;

    /// Mean and variance of observation `j` at `theta`.
    fn obs_mean_var(&self, j: usize, theta: &Self::Param) -> (f64, f64);

    /// Flat numeric encoding, one line of a draw stream.
    fn param_values(&self, theta: &Self::Param) -> Vec<f64>;

    fn param_from_values(&self, values: &[f64]) -> Result<Self::Param>;
}

/// Models with continuous observations and per-observation CDFs `F_j`.
pub trait ContinuousModel: Model<Obs = f64> {
    fn obs_cdf(&self, j: usize, y: f64, theta: &Self::Param) -> f64;

    /// True when `F_j` does not depend on `j`.
    fn is_iid(&self) -> bool {
        false
    }
}

/// Models with non-negative integer observations.
pub trait DiscreteModel: Model<Obs = u64> {
    fn obs_pmf(&self, j: usize, y: u64, theta: &Self::Param) -> f64;

    /// `(P(Y_j < y), P(Y_j <= y))` at `theta`.
    fn obs_cdf_pair(&self, j: usize, y: u64, theta: &Self::Param) -> (f64, f64);
}

pub trait MaximumLikelihood: Model {
    fn mle(&self, data: &[Self::Obs]) -> Result<Self::Param>;
}

/// Unconstrained parameterization for derivative-free grouped-likelihood fits.
pub trait GroupedLikelihood: ContinuousModel + MaximumLikelihood {
    fn to_unconstrained(&self, theta: &Self::Param) -> Vec<f64>;
    fn from_unconstrained(&self, x: &[f64]) -> Option<Self::Param>;
}
