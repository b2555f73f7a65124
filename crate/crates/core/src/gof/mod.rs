//! Goodness-of-fit statistics.
//!
//! [`pearson`] is the shared kernel. The Bayesian variants in [`bayes`] fix the
//! cell probabilities and let the counts move with a posterior draw; the
//! classical comparators in [`classical`] fix the counts in data space and
//! estimate cell probabilities instead.

pub mod bayes;
pub mod classical;

pub use bayes::{
    rb_continuous, rb_discrete_fixed_bins, rb_discrete_randomized, OutcomeBins, RbModel,
};
pub use classical::{
    cell_probs, data_space_counts, gms_discrepancy, r_grouped, r_hat, r_zero, DataEdges, GroupedFit,
};

use crate::binning::BinCounts;
use crate::error::{domain, Result};
use crate::probkit::ScalarDistribution;

/// Pearson's statistic `sum_k (m_k - n p_k)^2 / (n p_k)`.
pub fn pearson(counts: &BinCounts, probs: &[f64]) -> Result<f64> {
    if counts.k() != probs.len() {
        return domain(format!(
            "{} counts but {} cell probabilities",
            counts.k(),
            probs.len()
        ));
    }
    if let Some(k) = probs.iter().position(|&p| !(p > 0.0 && p.is_finite())) {
        return domain(format!("cell probability p[{k}] = {} is not positive", probs[k]));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return domain(format!("cell probabilities sum to {sum}, not 1"));
    }
    Ok(pearson_unchecked(counts.counts(), counts.total(), probs))
}

#[inline]
pub(crate) fn pearson_unchecked(counts: &[u64], total: u64, probs: &[f64]) -> f64 {
    let n = total as f64;
    counts
        .iter()
        .zip(probs)
        .map(|(&m, &p)| {
            let e = n * p;
            (m as f64 - e).powi(2) / e
        })
        .sum()
}

/// One `R^B` value tied to a posterior draw and a bin scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct RbSample {
    pub value: f64,
    /// `K - 1`.
    pub dof: usize,
    pub draw_index: usize,
    pub counts: BinCounts,
}

impl RbSample {
    pub fn with_draw_index(mut self, i: usize) -> Self {
        self.draw_index = i;
        self
    }
}

fn common_dof(samples: &[RbSample]) -> Result<usize> {
    let first = match samples.first() {
        Some(s) => s.dof,
        None => return domain("no R^B samples"),
    };
    if samples.iter().any(|s| s.dof != first) {
        return domain("R^B samples mix different degrees of freedom");
    }
    Ok(first)
}

/// `A = Pr(R^B > X)` with `X ~ chi2_{K-1}` independent of the draws.
///
/// Computed as the posterior mean of `P(X < R^B)` (the chi-squared CDF at
/// each value), which integrates `X` out exactly instead of simulating it.
pub fn a_statistic(samples: &[RbSample]) -> Result<f64> {
    let dof = common_dof(samples)?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    a_statistic_values(&values, dof)
}

pub fn a_statistic_values(values: &[f64], dof: usize) -> Result<f64> {
    if values.is_empty() {
        return domain("no R^B values");
    }
    let reference = ScalarDistribution::chi_squared(dof as f64)?;
    Ok(values.iter().map(|&v| reference.cdf(v)).sum::<f64>() / values.len() as f64)
}

/// Fraction of values strictly above `threshold`.
pub fn exceedance(samples: &[RbSample], threshold: f64) -> Result<f64> {
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    exceedance_values(&values, threshold)
}

pub fn exceedance_values(values: &[f64], threshold: f64) -> Result<f64> {
    if values.is_empty() {
        return domain("no R^B values");
    }
    Ok(values.iter().filter(|&&v| v > threshold).count() as f64 / values.len() as f64)
}

/// 0.95 quantile of `chi2_dof` (9.4877 for `dof = 4`).
pub fn default_threshold(dof: usize) -> f64 {
    ScalarDistribution::chi_squared(dof as f64)
        .and_then(|d| d.quantile(0.95))
        .expect("dof >= 1")
}

/// Posterior summary of `R^B` for one dataset and model.
#[derive(Debug, Clone, PartialEq)]
pub struct GofSummary {
    pub a_value: f64,
    pub exceedance: f64,
    pub threshold: f64,
    pub mean_bin_counts: Vec<f64>,
    pub n_draws: usize,
    /// Cells whose expected count `n p_k` is below 1.
    pub sparse_cells: Vec<usize>,
}

pub fn summarize(samples: &[RbSample], probs: &[f64], threshold: f64) -> Result<GofSummary> {
    let a_value = a_statistic(samples)?;
    let exceed = exceedance(samples, threshold)?;
    let k = samples[0].counts.k();
    let mut mean_bin_counts = vec![0.0; k];
    for s in samples {
        for (acc, &m) in mean_bin_counts.iter_mut().zip(s.counts.counts()) {
            *acc += m as f64;
        }
    }
    let d = samples.len() as f64;
    mean_bin_counts.iter_mut().for_each(|m| *m /= d);
    let n = samples[0].counts.total() as f64;
    let sparse_cells = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| n * p < 1.0)
        .map(|(k, _)| k)
        .collect();
    Ok(GofSummary {
        a_value,
        exceedance: exceed,
        threshold,
        mean_bin_counts,
        n_draws: samples.len(),
        sparse_cells,
    })
}
