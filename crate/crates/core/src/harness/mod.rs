//! Monte Carlo experiments and empirical-distribution utilities.
//!
//! Every experiment derives its randomness from `RngStream::new(seed, id)`
//! with a fixed per-experiment `id`, and replicate `r` draws only from
//! `root.split(r)`. Replicates run on the rayon pool and are collected in
//! index order, so results do not depend on the thread count.

mod analysis;
mod ecdf;
mod experiments;
mod monitor;

pub use analysis::{analyze, analyze_with_trace, app_test, AppTestResult};
pub use ecdf::{
    ks_constant, ks_statistic, mean_variance, plotting_positions, qq_pairs, upper_order_statistic,
    Ecdf, KsResult,
};
pub use experiments::{
    null_a_distribution, null_calibration, power_study, size_study, DistributionSummary,
    NullADistribution, NullCalibration, PowerMethod, PowerRow,
};
pub use monitor::{rb_monitor, AlertRule, MonitorRecord, MonitorSummary, RbMonitor};

use crate::binning::{default_bin_count, BinScheme};
use crate::error::{Error, Result};
use crate::models::PoissonVariant;
use crate::optim::NelderMeadSettings;

/// Stream ids keeping experiments on disjoint random streams.
pub(crate) mod streams {
    pub const NULL_CALIBRATION: u64 = 1;
    pub const NULL_A: u64 = 2;
    pub const POWER: u64 = 3;
    pub const APP_TEST: u64 = 4;
    pub const ANALYZE: u64 = 5;
    pub const SIZE: u64 = 6;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinRule {
    Fixed(usize),
    /// `max(3, round(n^0.4))`.
    Auto,
}

/// Model used to generate and fit synthetic data.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    /// Normal data with the given truth, fitted under the reference prior.
    Normal { mu: f64, sigma: f64 },
    /// Poisson counts with unit offsets and common true mean, fitted by `variant`.
    Poisson { variant: PoissonVariant, mean: f64 },
}

impl ModelChoice {
    pub fn standard_normal() -> Self {
        ModelChoice::Normal { mu: 0.0, sigma: 1.0 }
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, ModelChoice::Normal { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub replicates: usize,
    pub bins: BinRule,
    pub seed: u64,
    pub model: ModelChoice,
    /// Posterior draws behind each `A` value.
    pub draws_per_dataset: usize,
    pub alpha: f64,
    /// Size of the KS calibration checks.
    pub ks_alpha: f64,
    pub df_grid: Vec<u32>,
    pub methods: Vec<PowerMethod>,
    /// Exceedance threshold; `None` means the `chi2_{K-1}` 0.95 quantile.
    pub threshold: Option<f64>,
    /// Also compute `R-hat` and `R^g` during null calibration.
    pub classical: bool,
    /// Posterior-predictive replicates for `app_test`.
    pub pp_reps: usize,
    pub optimizer: NelderMeadSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 50,
            replicates: 2000,
            bins: BinRule::Fixed(5),
            seed: 0,
            model: ModelChoice::standard_normal(),
            draws_per_dataset: 5000,
            alpha: 0.05,
            ks_alpha: 0.01,
            df_grid: vec![1, 2, 3, 5, 10],
            methods: vec![PowerMethod::A, PowerMethod::SingleRb, PowerMethod::Grouped],
            threshold: None,
            classical: false,
            pp_reps: 100,
            optimizer: NelderMeadSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replicates < 1 {
            return bad("replicates must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} outside (0, 1)", self.alpha));
        }
        if !(self.ks_alpha > 0.0 && self.ks_alpha < 1.0) {
            return bad(format!("KS alpha = {} outside (0, 1)", self.ks_alpha));
        }
        if self.n < 2 {
            return bad(format!("n = {} but at least 2 observations are needed", self.n));
        }
        if self.draws_per_dataset < 1 {
            return bad("draws per dataset must be >= 1".into());
        }
        if let BinRule::Fixed(k) = self.bins {
            if k < 2 {
                return bad(format!("K = {k} but at least 2 bins are needed"));
            }
        }
        if let Some(&df) = self.df_grid.iter().find(|&&d| !(1..=10).contains(&d)) {
            return bad(format!("df = {df} outside 1..10"));
        }
        match self.model {
            ModelChoice::Normal { mu, sigma } if !(mu.is_finite() && sigma > 0.0 && sigma.is_finite()) => {
                bad("normal truth needs finite mu and sigma > 0".into())
            }
            ModelChoice::Poisson { mean, .. } if !(mean > 0.0 && mean.is_finite()) => {
                bad("poisson truth needs a positive mean".into())
            }
            _ => Ok(()),
        }
    }

    pub fn k(&self) -> usize {
        match self.bins {
            BinRule::Fixed(k) => k,
            BinRule::Auto => default_bin_count(self.n),
        }
    }

    pub fn scheme(&self) -> Result<BinScheme> {
        BinScheme::equiprobable(self.k())
    }

    pub fn resolved_threshold(&self) -> f64 {
        self.threshold
            .unwrap_or_else(|| crate::gof::default_threshold(self.k() - 1))
    }
}
