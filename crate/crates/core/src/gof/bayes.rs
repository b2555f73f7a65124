//! `R^B`: Pearson's statistic at a posterior draw, with fixed cells.

use crate::binning::{BinCounts, BinScheme};
use crate::error::{domain, Error, Result};
use crate::models::{ContinuousModel, DiscreteModel, NormalRefPrior, PoissonLogLinear};
use crate::probkit::RngStream;

use super::{pearson_unchecked, RbSample};

fn sample(counts: BinCounts, probs: &[f64]) -> RbSample {
    let value = pearson_unchecked(counts.counts(), counts.total(), probs);
    RbSample {
        value,
        dof: probs.len() - 1,
        draw_index: 0,
        counts,
    }
}

/// `R^B` for continuous observations: `u_j = F_j(y_j | theta)` binned on the
/// probability scale.
pub fn rb_continuous<M: ContinuousModel + ?Sized>(
    data: &[f64],
    model: &M,
    theta: &M::Param,
    scheme: &BinScheme,
) -> Result<RbSample> {
    let mut counts = BinCounts::zeros(scheme.k());
    for (j, &y) in data.iter().enumerate() {
        let u = model.obs_cdf(j, y, theta);
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Evaluation {
                index: j,
                reason: format!("PIT value {u} is not a probability"),
            });
        }
        counts.add(scheme.assign_unchecked(u));
    }
    Ok(sample(counts, scheme.probs()))
}

/// `R^B` for discrete observations with randomized allocation: each outcome's
/// CDF mass interval `(F_j(y-1), F_j(y)]` is sampled uniformly and binned.
pub fn rb_discrete_randomized<M: DiscreteModel + ?Sized>(
    data: &[u64],
    model: &M,
    theta: &M::Param,
    scheme: &BinScheme,
    rng: &mut RngStream,
) -> Result<RbSample> {
    let mut counts = BinCounts::zeros(scheme.k());
    for (j, &y) in data.iter().enumerate() {
        let (lo, hi) = model.obs_cdf_pair(j, y, theta);
        if !(lo.is_finite() && hi.is_finite()) || !(hi > lo) {
            return Err(Error::Evaluation {
                index: j,
                reason: format!("observed outcome {y} has zero probability under the draw"),
            });
        }
        let k = scheme
            .assign_discrete_randomized(lo.max(0.0), hi.min(1.0), rng)
            .map_err(|e| Error::Evaluation {
                index: j,
                reason: e.to_string(),
            })?;
        counts.add(k);
    }
    Ok(sample(counts, scheme.probs()))
}

/// Partition of the non-negative integers into consecutive ranges.
///
/// `upper[k]` is the inclusive upper end of cell `k`; the final cell is
/// open-ended, so there are `upper.len() + 1` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeBins {
    upper: Vec<u64>,
}

impl OutcomeBins {
    pub fn new(upper: Vec<u64>) -> Result<Self> {
        if upper.is_empty() {
            return domain("outcome bins need at least one finite cell");
        }
        if upper.windows(2).any(|w| w[1] <= w[0]) {
            return domain("outcome bin upper ends must be strictly increasing");
        }
        Ok(Self { upper })
    }

    pub fn k(&self) -> usize {
        self.upper.len() + 1
    }

    pub fn upper(&self) -> &[u64] {
        &self.upper
    }

    pub fn assign(&self, y: u64) -> usize {
        self.upper.partition_point(|&a| a < y)
    }

    pub fn counts(&self, data: &[u64]) -> BinCounts {
        let mut c = BinCounts::zeros(self.k());
        for &y in data {
            c.add(self.assign(y));
        }
        c
    }

    /// `p_k(theta) = (1/n) sum_j P(Y_j in cell k | theta)`.
    pub fn cell_probs<M: DiscreteModel + ?Sized>(
        &self,
        model: &M,
        theta: &M::Param,
        n: usize,
    ) -> Vec<f64> {
        let k = self.k();
        let mut p = vec![0.0; k];
        for j in 0..n {
            let mut prev = 0.0;
            for (cell, &a) in self.upper.iter().enumerate() {
                let (_, at) = model.obs_cdf_pair(j, a, theta);
                p[cell] += at - prev;
                prev = at;
            }
            p[k - 1] += 1.0 - prev;
        }
        p.iter_mut().for_each(|x| *x /= n as f64);
        p
    }
}

/// `R^B` with fixed outcome cells: counts come from the data once, and the
/// cell probabilities move with `theta`.
pub fn rb_discrete_fixed_bins<M: DiscreteModel + ?Sized>(
    data: &[u64],
    model: &M,
    theta: &M::Param,
    bins: &OutcomeBins,
) -> Result<RbSample> {
    if data.is_empty() {
        return domain("no observations");
    }
    let probs = bins.cell_probs(model, theta, data.len());
    if let Some(k) = probs.iter().position(|&p| !(p >= 1e-12)) {
        return Err(Error::Numerical(format!(
            "cell {k} has probability {} under the draw",
            probs[k]
        )));
    }
    Ok(sample(bins.counts(data), &probs))
}

/// Models that know which `R^B` path applies to them.
pub trait RbModel: crate::models::Model {
    /// `R^B` at `theta`. Continuous models ignore `rng`.
    fn rb(
        &self,
        data: &[Self::Obs],
        theta: &Self::Param,
        scheme: &BinScheme,
        rng: &mut RngStream,
    ) -> Result<RbSample>;
}

impl RbModel for NormalRefPrior {
    fn rb(
        &self,
        data: &[f64],
        theta: &Self::Param,
        scheme: &BinScheme,
        _rng: &mut RngStream,
    ) -> Result<RbSample> {
        rb_continuous(data, self, theta, scheme)
    }
}

impl RbModel for PoissonLogLinear {
    fn rb(
        &self,
        data: &[u64],
        theta: &Self::Param,
        scheme: &BinScheme,
        rng: &mut RngStream,
    ) -> Result<RbSample> {
        rb_discrete_randomized(data, self, theta, scheme, rng)
    }
}
