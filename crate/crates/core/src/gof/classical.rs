//! Classical Pearson comparators with fixed data-space cells, and the
//! Gelman–Meng–Stern discrepancy.

use crate::binning::BinCounts;
use crate::error::{domain, Error, Result};
use crate::models::{ContinuousModel, GroupedLikelihood, MaximumLikelihood, Model, ObsValue};
use crate::optim::{nelder_mead, NelderMeadSettings};

use super::pearson_unchecked;

/// Interior cut points `c_1 < ... < c_{K-1}` on the data scale. Cells are
/// `(-inf, c_1], (c_1, c_2], ..., (c_{K-1}, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataEdges {
    cuts: Vec<f64>,
}

impl DataEdges {
    pub fn new(cuts: Vec<f64>) -> Result<Self> {
        if cuts.is_empty() {
            return domain("data-space cells need at least one cut point");
        }
        if cuts.iter().any(|c| !c.is_finite()) {
            return domain("data-space cut points must be finite");
        }
        if cuts.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("data-space cut points must be strictly increasing");
        }
        Ok(Self { cuts })
    }

    pub fn k(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn assign(&self, y: f64) -> usize {
        self.cuts.partition_point(|&c| c < y)
    }
}

pub fn data_space_counts(data: &[f64], edges: &DataEdges) -> BinCounts {
    let mut c = BinCounts::zeros(edges.k());
    for &y in data {
        c.add(edges.assign(y));
    }
    c
}

/// `p_k(theta)` for data-space cells, averaged over observations unless the
/// model is i.i.d.
pub fn cell_probs<M: ContinuousModel + ?Sized>(
    model: &M,
    theta: &M::Param,
    edges: &DataEdges,
    n: usize,
) -> Vec<f64> {
    let k = edges.k();
    let reps = if model.is_iid() { 1 } else { n.max(1) };
    let mut p = vec![0.0; k];
    for j in 0..reps {
        let mut prev = 0.0;
        for (cell, &c) in edges.cuts.iter().enumerate() {
            let at = model.obs_cdf(j, c, theta);
            p[cell] += at - prev;
            prev = at;
        }
        p[k - 1] += 1.0 - prev;
    }
    p.iter_mut().for_each(|x| *x /= reps as f64);
    p
}

fn checked_pearson(counts: &BinCounts, probs: &[f64]) -> Result<f64> {
    if let Some(k) = probs.iter().position(|&p| !(p >= 1e-12)) {
        return Err(Error::Numerical(format!(
            "cell {k} has fitted probability {}",
            probs[k]
        )));
    }
    Ok(pearson_unchecked(counts.counts(), counts.total(), probs))
}

/// `R^0`: Pearson with data-space cells at a known parameter.
pub fn r_zero<M: ContinuousModel + ?Sized>(
    data: &[f64],
    model: &M,
    theta: &M::Param,
    edges: &DataEdges,
) -> Result<f64> {
    let probs = cell_probs(model, theta, edges, data.len());
    checked_pearson(&data_space_counts(data, edges), &probs)
}

/// `R-hat`: Pearson with data-space cells at the ungrouped MLE.
pub fn r_hat<M>(data: &[f64], model: &M, edges: &DataEdges) -> Result<f64>
where
    M: ContinuousModel + MaximumLikelihood + ?Sized,
{
    let theta = model.mle(data)?;
    r_zero(data, model, &theta, edges)
}

#[derive(Debug, Clone)]
pub struct GroupedFit<P> {
    pub value: f64,
    pub theta: P,
    /// Grouped log-likelihood `sum_k m_k log p_k` at the raw-MLE start.
    pub start_loglik: f64,
    /// The same at the returned `theta`.
    pub loglik: f64,
    pub iterations: usize,
}

fn grouped_loglik(counts: &[u64], probs: &[f64]) -> f64 {
    counts
        .iter()
        .zip(probs)
        .filter(|(&m, _)| m > 0)
        .map(|(&m, &p)| if p > 0.0 { m as f64 * p.ln() } else { f64::NEG_INFINITY })
        .sum()
}

/// `R^g`: Pearson at the grouped MLE, found by simplex search from the raw MLE.
pub fn r_grouped<M>(
    data: &[f64],
    model: &M,
    edges: &DataEdges,
    settings: &NelderMeadSettings,
) -> Result<GroupedFit<M::Param>>
where
    M: GroupedLikelihood + ?Sized,
{
    let counts = data_space_counts(data, edges);
    let n = data.len();
    let start = model.mle(data)?;
    let start_loglik = grouped_loglik(counts.counts(), &cell_probs(model, &start, edges, n));
    let objective = |x: &[f64]| match model.from_unconstrained(x) {
        Some(t) => -grouped_loglik(counts.counts(), &cell_probs(model, &t, edges, n)),
        None => f64::INFINITY,
    };
    let min = nelder_mead(objective, &model.to_unconstrained(&start), settings)?;
    let (theta, loglik) = if -min.value >= start_loglik {
        let t = model
            .from_unconstrained(&min.x)
            .ok_or_else(|| Error::Numerical("grouped fit left the parameter space".into()))?;
        (t, -min.value)
    } else {
        (start, start_loglik)
    };
    let value = checked_pearson(&counts, &cell_probs(model, &theta, edges, n))?;
    Ok(GroupedFit {
        value,
        theta,
        start_loglik,
        loglik,
        iterations: min.iterations,
    })
}

/// `sum_i (y_i - E y_i)^2 / Var y_i` at `theta`.
pub fn gms_discrepancy<M: Model + ?Sized>(
    y: &[M::Obs],
    model: &M,
    theta: &M::Param,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, &v) in y.iter().enumerate() {
        let (mean, var) = model.obs_mean_var(i, theta);
        if !(var > 0.0 && var.is_finite()) {
            return Err(Error::Evaluation {
                index: i,
                reason: format!("variance {var} is not positive"),
            });
        }
        total += (v.as_f64() - mean).powi(2) / var;
    }
    Ok(total)
}
