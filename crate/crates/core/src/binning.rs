//! Bin schemes on the probability scale and allocation of observations.
//!
//! Bins are right-closed intervals `(a_{k-1}, a_k]` of `[0, 1]`. Indices are
//! zero-based throughout: bin `0` is `(a_0, a_1]` and additionally receives
//! `u = 0`, so assignment is total on `[0, 1]`.

use crate::error::{domain, Error, Result};
use crate::probkit::RngStream;

/// Ordered cut points `0 = a_0 < a_1 < ... < a_K = 1` with cell probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BinScheme {
    edges: Vec<f64>,
    probs: Vec<f64>,
}

impl BinScheme {
    /// `K` cells of probability `1/K`.
    pub fn equiprobable(k: usize) -> Result<Self> {
        if k < 2 {
            return domain(format!("a bin scheme needs K >= 2 cells, got {k}"));
        }
        let kf = k as f64;
        let mut edges: Vec<f64> = (0..=k).map(|i| i as f64 / kf).collect();
        edges[k] = 1.0;
        Ok(Self {
            edges,
            probs: vec![1.0 / kf; k],
        })
    }

    /// Build from explicit edges. The first must be 0, the last 1.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 3 {
            return domain(format!(
                "a bin scheme needs at least 3 edges (K >= 2), got {}",
                edges.len()
            ));
        }
        if edges[0] != 0.0 || *edges.last().unwrap() != 1.0 {
            return domain("bin edges must start at 0 and end at 1");
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("bin edges must be strictly increasing");
        }
        let probs = edges.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { edges, probs })
    }

    /// Number of cells `K`.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Zero-based index of the cell `(a_{k-1}, a_k]` containing `u`.
    pub fn assign(&self, u: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&u) {
            return domain(format!("PIT value {u} outside [0, 1]"));
        }
        Ok(self.assign_unchecked(u))
    }

    #[inline]
    pub(crate) fn assign_unchecked(&self, u: f64) -> usize {
        // number of upper edges strictly below u
        let k = self.edges[1..].partition_point(|&a| a < u);
        k.min(self.k() - 1)
    }

    /// Randomized allocation of a discrete outcome whose CDF mass interval is
    /// `(f_below, f_at]`: draw `u` uniformly on that interval and assign it.
    ///
    /// The probability of landing in cell `k` equals the share of the mass
    /// interval overlapping that cell.
    pub fn assign_discrete_randomized(
        &self,
        f_below: f64,
        f_at: f64,
        rng: &mut RngStream,
    ) -> Result<usize> {
        if !(0.0..=1.0).contains(&f_below) || !(0.0..=1.0).contains(&f_at) {
            return domain(format!(
                "CDF mass interval ({f_below}, {f_at}] outside [0, 1]"
            ));
        }
        if f_below >= f_at {
            return domain(format!(
                "outcome has zero mass: F_below = {f_below} >= F_at = {f_at}"
            ));
        }
        Ok(self.assign_unchecked(randomized_pit(f_below, f_at, rng)))
    }
}

/// Uniform draw on `(f_below, f_at]`.
#[inline]
pub fn randomized_pit(f_below: f64, f_at: f64, rng: &mut RngStream) -> f64 {
    let u = f_at - rng.uniform() * (f_at - f_below);
    // rounding can land exactly on f_below when the interval is a few ulps wide
    if u <= f_below {
        f_at
    } else {
        u
    }
}

/// Bin counts `m_k` with their total `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinCounts {
    counts: Vec<u64>,
    total: u64,
}

impl BinCounts {
    pub fn zeros(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            total: 0,
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    #[inline]
    pub fn add(&mut self, bin: usize) {
        self.counts[bin] += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }
}

/// Tally zero-based bin indices into `k` cells.
pub fn tally(indices: &[usize], k: usize) -> Result<BinCounts> {
    let mut out = BinCounts::zeros(k);
    for (pos, &i) in indices.iter().enumerate() {
        if i >= k {
            return Err(Error::Domain(format!(
                "bin index {i} at position {pos} out of range for K = {k}"
            )));
        }
        out.add(i);
    }
    Ok(out)
}

/// `max(3, round(n^0.4))` equiprobable cells.
pub fn default_bin_count(n: usize) -> usize {
    let k = (n.max(1) as f64).powf(0.4).round() as usize;
    k.max(3)
}

/// Mann–Wald rule: `round(3.8 (n - 1)^0.4)` cells.
pub fn mann_wald_count(n: usize) -> Result<usize> {
    if n < 2 {
        return domain(format!("Mann-Wald rule needs n >= 2, got {n}"));
    }
    Ok((3.8 * ((n - 1) as f64).powf(0.4)).round() as usize)
}
