//! Single-dataset analysis and the posterior-predictive-posterior test.

use rayon::prelude::*;

use crate::binning::{default_bin_count, BinScheme};
use crate::error::{Error, Result};
use crate::gof::{a_statistic_values, default_threshold, summarize, GofSummary, RbModel, RbSample};
use crate::probkit::RngStream;

use super::{streams, BinRule, ExperimentConfig};

fn scheme_for(config: &ExperimentConfig, n: usize) -> Result<BinScheme> {
    let k = match config.bins {
        BinRule::Fixed(k) => k,
        BinRule::Auto => default_bin_count(n),
    };
    BinScheme::equiprobable(k)
}

fn rb_draws<M: RbModel>(
    data: &[M::Obs],
    model: &M,
    n_draws: usize,
    scheme: &BinScheme,
    rng: &mut RngStream,
) -> Result<Vec<RbSample>> {
    let thetas = model.posterior_sample(data, n_draws, rng)?;
    thetas
        .iter()
        .enumerate()
        .map(|(i, t)| model.rb(data, t, scheme, rng).map(|s| s.with_draw_index(i)))
        .collect()
}

/// Posterior summary of `R^B` plus the per-draw samples behind it.
pub fn analyze_with_trace<M: RbModel>(
    data: &[M::Obs],
    model: &M,
    config: &ExperimentConfig,
) -> Result<(GofSummary, Vec<RbSample>)> {
    if config.draws_per_dataset == 0 {
        return Err(Error::Config("draws per dataset must be >= 1".into()));
    }
    model.validate_data(data)?;
    let scheme = scheme_for(config, data.len())?;
    let threshold = config
        .threshold
        .unwrap_or_else(|| default_threshold(scheme.k() - 1));
    let mut rng = RngStream::new(config.seed, streams::ANALYZE);
    let samples = rb_draws(data, model, config.draws_per_dataset, &scheme, &mut rng)?;
    let summary = summarize(&samples, scheme.probs(), threshold)?;
    Ok((summary, samples))
}

pub fn analyze<M: RbModel>(data: &[M::Obs], model: &M, config: &ExperimentConfig) -> Result<GofSummary> {
    analyze_with_trace(data, model, config).map(|p| p.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppTestResult {
    pub a_observed: f64,
    /// `A` on each posterior-predictive dataset, in replicate order, for
    /// replicates that evaluated.
    pub app_samples: Vec<f64>,
    pub failures: usize,
    /// `#{A^pp >= a_observed} / #app_samples`.
    pub p_value: f64,
}

/// Reference distribution for `A` built by refitting the model on
/// posterior-predictive data.
///
/// Replicate `m` (1-based) draws `theta` from the posterior given `data`,
/// simulates a dataset of the same size at `theta`, and computes `A` on it.
/// The observed `A` uses `root.split(0)`.
pub fn app_test<M: RbModel>(
    data: &[M::Obs],
    model: &M,
    config: &ExperimentConfig,
) -> Result<AppTestResult> {
    let m_reps = config.pp_reps;
    if m_reps < 20 {
        return Err(Error::Config(format!(
            "posterior-predictive test needs at least 20 replicates, got {m_reps}"
        )));
    }
    model.validate_data(data)?;
    let scheme = scheme_for(config, data.len())?;
    let dof = scheme.k() - 1;
    let draws = config.draws_per_dataset;
    let root = RngStream::new(config.seed, streams::APP_TEST);

    let a_of = |samples: Vec<RbSample>| {
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        a_statistic_values(&values, dof)
    };
    let a_observed = a_of(rb_draws(data, model, draws, &scheme, &mut root.split(0))?)?;

    let outcomes: Vec<Option<f64>> = (1..=m_reps as u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = root.split(m);
            let mut run = || -> Result<f64> {
                let theta = model.posterior_draw(data, &mut rng)?;
                let y_pp = model.predictive_draw(&theta, data.len(), &mut rng);
                a_of(rb_draws(&y_pp, model, draws, &scheme, &mut rng)?)
            };
            run().ok()
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_none()).count();
    if failures * 10 > m_reps {
        return Err(Error::Sampler(format!(
            "{failures} of {m_reps} posterior-predictive replicates failed"
        )));
    }
    let app_samples: Vec<f64> = outcomes.into_iter().flatten().collect();
    let hits = app_samples.iter().filter(|&&a| a >= a_observed).count();
    Ok(AppTestResult {
        a_observed,
        p_value: hits as f64 / app_samples.len() as f64,
        app_samples,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{NormalRefPrior, PoissonLogLinear};

    #[test]
    fn analyze_summary_consistency() {
        let mut rng = RngStream::new(1, 0);
        let data = crate::models::generate_null_normal(50, &mut rng);
        let c = ExperimentConfig {
            draws_per_dataset: 300,
            ..Default::default()
        };
        let (s, trace) = analyze_with_trace(&data, &NormalRefPrior, &c).unwrap();
        assert_eq!(s.n_draws, 300);
        assert_eq!(trace.len(), 300);
        assert_eq!(trace[17].draw_index, 17);
        assert!((s.mean_bin_counts.iter().sum::<f64>() - 50.0).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&s.a_value));
        assert!((s.threshold - 9.4877).abs() < 1e-4);
    }

    #[test]
    fn analyze_rejects_incompatible_data() {
        let m = PoissonLogLinear::saturated(vec![1.0; 3], 1.0).unwrap();
        assert!(analyze(&[1, 0, 2], &m, &ExperimentConfig::default()).is_err());
    }

    #[test]
    fn app_test_needs_twenty_replicates() {
        let data = [0.1, 0.5, -0.3, 1.2, 0.7];
        let c = ExperimentConfig {
            pp_reps: 19,
            ..Default::default()
        };
        assert!(matches!(app_test(&data, &NormalRefPrior, &c), Err(Error::Config(_))));
    }

    #[test]
    fn app_test_p_value_is_a_count() {
        let data = [0.1, 0.5, -0.3, 1.2, 0.7, -0.9, 0.2, 2.1];
        let c = ExperimentConfig {
            pp_reps: 20,
            draws_per_dataset: 50,
            bins: BinRule::Fixed(3),
            ..Default::default()
        };
        let r = app_test(&data, &NormalRefPrior, &c).unwrap();
        assert_eq!(r.app_samples.len(), 20);
        let scaled = r.p_value * 20.0;
        assert!((scaled - scaled.round()).abs() < 1e-12);
        let hits = r.app_samples.iter().filter(|&&a| a >= r.a_observed).count();
        assert_eq!(hits as f64 / 20.0, r.p_value);
    }
}
