//! Null calibration, null distribution of `A`, size and power studies.

use rayon::prelude::*;

use crate::binning::BinScheme;
use crate::error::{Error, Result};
use crate::gof::{
    a_statistic_values, r_grouped, r_hat, rb_continuous, rb_discrete_randomized, DataEdges,
};
use crate::models::{generate_poisson, generate_t, Model, NormalRefPrior, PoissonLogLinear};
use crate::probkit::{RngStream, ScalarDistribution};

use super::ecdf::{ks_statistic, mean_variance, qq_pairs, upper_order_statistic, KsResult};
use super::{streams, ExperimentConfig, ModelChoice};

/// Replicate values with their Q-Q pairs against `chi2_dof`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    /// In replicate order.
    pub values: Vec<f64>,
    pub reference_dof: usize,
    /// `(sorted value, reference quantile at (i - 0.5)/N)`.
    pub qq: Vec<(f64, f64)>,
    pub mean: f64,
    pub variance: f64,
    /// `None` when there are fewer than 20 replicates.
    pub ks: Option<KsResult>,
}

impl DistributionSummary {
    fn new(values: Vec<f64>, dof: usize, ks_alpha: f64) -> Result<Self> {
        let reference = ScalarDistribution::chi_squared(dof as f64)?;
        let qq = qq_pairs(&values, &reference)?;
        let (mean, variance) = mean_variance(&values);
        let ks = if values.len() >= 20 {
            Some(ks_statistic(&values, &reference, ks_alpha)?)
        } else {
            None
        };
        Ok(Self {
            values,
            reference_dof: dof,
            qq,
            mean,
            variance,
            ks,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullCalibration {
    pub n: usize,
    pub k: usize,
    pub replicates: usize,
    pub rb: DistributionSummary,
    /// Raw-MLE Pearson statistic, referenced to `chi2_{K-1-s}`.
    pub r_hat: Option<DistributionSummary>,
    /// Grouped-MLE Pearson statistic, referenced to `chi2_{K-1-s}`.
    pub r_grouped: Option<DistributionSummary>,
}

/// Data-space cells at the quantiles `k/K` of `N(mu, sigma^2)`.
pub(crate) fn normal_quantile_edges(k: usize, mu: f64, sigma: f64) -> Result<DataEdges> {
    let z = ScalarDistribution::standard_normal();
    let cuts = (1..k)
        .map(|i| z.quantile(i as f64 / k as f64).map(|q| mu + sigma * q))
        .collect::<Result<Vec<f64>>>()?;
    DataEdges::new(cuts)
}

fn normal_data(n: usize, mu: f64, sigma: f64, rng: &mut RngStream) -> Vec<f64> {
    crate::models::generate_null_normal(n, rng)
        .into_iter()
        .map(|z| mu + sigma * z)
        .collect()
}

/// One posterior `R^B` per synthetic dataset drawn at the configured truth.
pub fn null_calibration(config: &ExperimentConfig) -> Result<NullCalibration> {
    config.validate()?;
    let scheme = config.scheme()?;
    let k = scheme.k();
    let root = RngStream::new(config.seed, streams::NULL_CALIBRATION);
    let per_rep: Vec<(f64, Option<(f64, f64)>)> = match &config.model {
        ModelChoice::Normal { mu, sigma } => {
            let (mu, sigma) = (*mu, *sigma);
            let edges = if config.classical {
                if k < 4 {
                    return Err(Error::Config(format!(
                        "grouped fit of a 2-parameter model needs K >= 4, got {k}"
                    )));
                }
                Some(normal_quantile_edges(k, mu, sigma)?)
            } else {
                None
            };
            (0..config.replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let mut rng = root.split(r);
                    let data = normal_data(config.n, mu, sigma, &mut rng);
                    let theta = NormalRefPrior.posterior_draw(&data, &mut rng)?;
                    let rb = rb_continuous(&data, &NormalRefPrior, &theta, &scheme)?.value;
                    let classical = match &edges {
                        Some(e) => Some((
                            r_hat(&data, &NormalRefPrior, e)?,
                            r_grouped(&data, &NormalRefPrior, e, &config.optimizer)?.value,
                        )),
                        None => None,
                    };
                    Ok((rb, classical))
                })
                .collect::<Result<Vec<_>>>()?
        }
        ModelChoice::Poisson { variant, mean } => {
            if config.classical {
                return Err(Error::Config(
                    "classical comparators need a continuous model with a grouped likelihood".into(),
                ));
            }
            let model = PoissonLogLinear::new(*variant, vec![1.0; config.n])?;
            let means = vec![*mean; config.n];
            (0..config.replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let mut rng = root.split(r);
                    let data = generate_poisson(&means, &mut rng)?;
                    let theta = model.posterior_draw(&data, &mut rng)?;
                    let rb = rb_discrete_randomized(&data, &model, &theta, &scheme, &mut rng)?;
                    Ok((rb.value, None))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let rb_values: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
    let rb = DistributionSummary::new(rb_values, k - 1, config.ks_alpha)?;
    let (r_hat_s, r_g_s) = if config.classical {
        let dof = k - 1 - 2;
        let rh: Vec<f64> = per_rep.iter().map(|p| p.1.unwrap().0).collect();
        let rg: Vec<f64> = per_rep.iter().map(|p| p.1.unwrap().1).collect();
        (
            Some(DistributionSummary::new(rh, dof, config.ks_alpha)?),
            Some(DistributionSummary::new(rg, dof, config.ks_alpha)?),
        )
    } else {
        (None, None)
    };
    Ok(NullCalibration {
        n: config.n,
        k,
        replicates: config.replicates,
        rb,
        r_hat: r_hat_s,
        r_grouped: r_g_s,
    })
}

/// `A` and the first draw's `R^B` for normal data under the reference prior.
fn normal_a(
    data: &[f64],
    draws: usize,
    scheme: &BinScheme,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let thetas = NormalRefPrior.posterior_sample(data, draws, rng)?;
    let values = thetas
        .iter()
        .map(|t| rb_continuous(data, &NormalRefPrior, t, scheme).map(|s| s.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok((a_statistic_values(&values, scheme.k() - 1)?, values[0]))
}

/// Sampling distribution of `A` under normal data.
///
/// `R^B` is location-scale invariant under the normal reference-prior model,
/// so this one distribution serves every normal dataset of the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct NullADistribution {
    /// Sorted ascending.
    pub values: Vec<f64>,
    pub n: usize,
    pub k: usize,
    pub draws_per_dataset: usize,
    pub alpha: f64,
    /// Order statistic at `ceil((1 - alpha) N)`.
    pub critical: f64,
}

impl NullADistribution {
    pub fn mean(&self) -> f64 {
        mean_variance(&self.values).0
    }

    fn check_compatible(&self, config: &ExperimentConfig) -> Result<()> {
        if self.n != config.n || self.k != config.k() || self.draws_per_dataset != config.draws_per_dataset {
            return Err(Error::Config(format!(
                "null A distribution was built for n={}, K={}, draws={} but the experiment uses n={}, K={}, draws={}",
                self.n,
                self.k,
                self.draws_per_dataset,
                config.n,
                config.k(),
                config.draws_per_dataset
            )));
        }
        Ok(())
    }
}

pub fn null_a_distribution(config: &ExperimentConfig) -> Result<NullADistribution> {
    config.validate()?;
    let (mu, sigma) = match config.model {
        ModelChoice::Normal { mu, sigma } => (mu, sigma),
        _ => {
            return Err(Error::Config(
                "a shared null A distribution is only valid for the normal model; use app_test for other models".into(),
            ))
        }
    };
    let scheme = config.scheme()?;
    let root = RngStream::new(config.seed, streams::NULL_A);
    let mut values = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = root.split(r);
            let data = normal_data(config.n, mu, sigma, &mut rng);
            normal_a(&data, config.draws_per_dataset, &scheme, &mut rng).map(|p| p.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    let critical = upper_order_statistic(&values, 1.0 - config.alpha)?;
    Ok(NullADistribution {
        values,
        n: config.n,
        k: scheme.k(),
        draws_per_dataset: config.draws_per_dataset,
        alpha: config.alpha,
        critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerMethod {
    /// `A` against the null `A` critical value.
    A,
    /// The first posterior draw's `R^B` against the `chi2_{K-1}` 0.95 quantile.
    SingleRb,
    /// `R^g` with standard-normal quantile cells against `chi2_{K-3}` at 0.95.
    Grouped,
}

impl PowerMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PowerMethod::A => "a",
            PowerMethod::SingleRb => "rb1",
            PowerMethod::Grouped => "rg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(PowerMethod::A),
            "rb1" => Some(PowerMethod::SingleRb),
            "rg" => Some(PowerMethod::Grouped),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    /// Student-t degrees of freedom of the data; `None` for normal data.
    pub df: Option<u32>,
    pub method: PowerMethod,
    pub rejections: usize,
    pub replicates: usize,
    pub rate: f64,
}

struct Tester<'a> {
    config: &'a ExperimentConfig,
    scheme: BinScheme,
    null_a: Option<&'a NullADistribution>,
    rb_critical: f64,
    rg: Option<(DataEdges, f64)>,
}

impl<'a> Tester<'a> {
    fn new(config: &'a ExperimentConfig, null_a: Option<&'a NullADistribution>) -> Result<Self> {
        config.validate()?;
        let scheme = config.scheme()?;
        let k = scheme.k();
        if config.methods.contains(&PowerMethod::A) {
            match null_a {
                Some(d) => d.check_compatible(config)?,
                None => {
                    return Err(Error::Config(
                        "the A test needs a null A distribution".into(),
                    ))
                }
            }
        }
        let rg = if config.methods.contains(&PowerMethod::Grouped) {
            if k < 4 {
                return Err(Error::Config(format!("the R^g test needs K >= 4, got {k}")));
            }
            let crit = ScalarDistribution::chi_squared((k - 3) as f64)?.quantile(0.95)?;
            Some((normal_quantile_edges(k, 0.0, 1.0)?, crit))
        } else {
            None
        };
        let rb_critical = ScalarDistribution::chi_squared((k - 1) as f64)?.quantile(0.95)?;
        Ok(Self {
            config,
            scheme,
            null_a,
            rb_critical,
            rg,
        })
    }

    /// Rejection flags, one per configured method.
    fn test(&self, data: &[f64], rng: &mut RngStream) -> Result<Vec<bool>> {
        let needs_a = self.config.methods.contains(&PowerMethod::A);
        let draws = if needs_a { self.config.draws_per_dataset } else { 1 };
        let (a, rb1) = normal_a(data, draws, &self.scheme, rng)?;
        self.config
            .methods
            .iter()
            .map(|m| {
                Ok(match m {
                    PowerMethod::A => a > self.null_a.expect("checked").critical,
                    PowerMethod::SingleRb => rb1 > self.rb_critical,
                    PowerMethod::Grouped => {
                        let (edges, crit) = self.rg.as_ref().expect("checked");
                        r_grouped(data, &NormalRefPrior, edges, &self.config.optimizer)?.value > *crit
                    }
                })
            })
            .collect()
    }

    fn rows(&self, df: Option<u32>, flags: &[Vec<bool>]) -> Vec<PowerRow> {
        self.config
            .methods
            .iter()
            .enumerate()
            .map(|(i, &method)| {
                let rejections = flags.iter().filter(|f| f[i]).count();
                PowerRow {
                    df,
                    method,
                    rejections,
                    replicates: flags.len(),
                    rate: rejections as f64 / flags.len() as f64,
                }
            })
            .collect()
    }
}

/// Rejection rates for Student-t data under the normal model, per `df`.
///
/// Replicate `r` at `df` uses `root.split(df).split(r)`; all methods see the
/// same datasets.
pub fn power_study(
    config: &ExperimentConfig,
    null_a: Option<&NullADistribution>,
) -> Result<Vec<PowerRow>> {
    let tester = Tester::new(config, null_a)?;
    let root = RngStream::new(config.seed, streams::POWER);
    let mut rows = Vec::new();
    for &df in &config.df_grid {
        let parent = root.split(df as u64);
        let flags = (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = parent.split(r);
                let data = generate_t(config.n, df as f64, &mut rng)?;
                tester.test(&data, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(tester.rows(Some(df), &flags));
    }
    Ok(rows)
}

/// Rejection rates on fresh normal datasets drawn at the configured truth.
pub fn size_study(
    config: &ExperimentConfig,
    null_a: Option<&NullADistribution>,
) -> Result<Vec<PowerRow>> {
    let tester = Tester::new(config, null_a)?;
    let (mu, sigma) = match config.model {
        ModelChoice::Normal { mu, sigma } => (mu, sigma),
        _ => return Err(Error::Config("size study needs the normal model".into())),
    };
    let root = RngStream::new(config.seed, streams::SIZE);
    let flags = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = root.split(r);
            let data = normal_data(config.n, mu, sigma, &mut rng);
            tester.test(&data, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tester.rows(None, &flags))
}
