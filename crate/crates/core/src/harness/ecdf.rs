//! Empirical distribution utilities.

use crate::error::{domain, Result};
use crate::probkit::ScalarDistribution;

/// Empirical CDF `F(x) = #{x_i <= x} / N` over a sorted copy of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return domain("empirical CDF of an empty sample");
        }
        if sample.iter().any(|x| x.is_nan()) {
            return domain("sample contains NaN");
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// Order statistic `x_(ceil(p N))` of a sorted sample, `p` in `(0, 1]`.
pub fn upper_order_statistic(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return domain("quantile of an empty sample");
    }
    if !(p > 0.0 && p <= 1.0) {
        return domain(format!("probability {p} outside (0, 1]"));
    }
    let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[idx - 1])
}

/// Plotting positions `(i - 0.5) / N`, `i = 1..N`.
pub fn plotting_positions(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect()
}

/// Sorted sample paired with reference quantiles at the plotting positions.
pub fn qq_pairs(sample: &[f64], reference: &ScalarDistribution) -> Result<Vec<(f64, f64)>> {
    let e = Ecdf::new(sample)?;
    plotting_positions(e.len())
        .into_iter()
        .zip(e.sorted())
        .map(|(p, &x)| reference.quantile(p).map(|q| (x, q)))
        .collect()
}

pub fn mean_variance(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = if sample.len() > 1 {
        sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub d: f64,
    pub critical: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// Asymptotic Kolmogorov constant `c(alpha) = sqrt(-ln(alpha / 2) / 2)`.
pub fn ks_constant(alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt()
}

/// One-sample Kolmogorov–Smirnov distance against a continuous reference.
pub fn ks_statistic(sample: &[f64], reference: &ScalarDistribution, alpha: f64) -> Result<KsResult> {
    let n = sample.len();
    if n < 20 {
        return domain(format!("KS test needs at least 20 observations, got {n}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("test size {alpha} outside (0, 1)"));
    }
    let e = Ecdf::new(sample)?;
    let nf = n as f64;
    let d = e
        .sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = reference.cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    let critical = ks_constant(alpha) / nf.sqrt();
    Ok(KsResult {
        d,
        critical,
        alpha,
        pass: d < critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::RngStream;

    #[test]
    fn constants() {
        assert!((ks_constant(0.01) - 1.628).abs() < 1e-3);
        assert!((ks_constant(0.05) - 1.358).abs() < 1e-3);
    }

    #[test]
    fn exact_quantiles_give_half_step() {
        let c4 = ScalarDistribution::chi_squared(4.0).unwrap();
        for n in [20, 137, 2000] {
            let s: Vec<f64> = plotting_positions(n).iter().map(|&p| c4.quantile(p).unwrap()).collect();
            let r = ks_statistic(&s, &c4, 0.01).unwrap();
            assert!((r.d - 0.5 / n as f64).abs() < 1e-9, "{n}: {}", r.d);
        }
    }

    #[test]
    fn small_samples_rejected() {
        let z = ScalarDistribution::standard_normal();
        assert!(ks_statistic(&[0.0; 19], &z, 0.01).is_err());
    }

    #[test]
    fn null_passes_and_wrong_reference_fails() {
        let c2 = ScalarDistribution::chi_squared(2.0).unwrap();
        let c4 = ScalarDistribution::chi_squared(4.0).unwrap();
        let root = RngStream::new(5, 0);
        let mut passes = 0;
        for r in 0..100 {
            let mut rng = root.split(r);
            if ks_statistic(&c4.sample_n(2000, &mut rng), &c4, 0.01).unwrap().pass {
                passes += 1;
            }
        }
        assert!(passes >= 98, "{passes}");
        let mut rng = root.split(1000);
        let r = ks_statistic(&c2.sample_n(2000, &mut rng), &c4, 0.01).unwrap();
        assert!(!r.pass && r.d > 0.15);
    }

    #[test]
    fn ecdf_and_order_statistics() {
        let e = Ecdf::new(&[3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(e.eval(0.0), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval(3.0), 1.0);
        let s: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(upper_order_statistic(&s, 0.95).unwrap(), 19.0);
        assert_eq!(upper_order_statistic(&s, 1.0).unwrap(), 20.0);
    }

    #[test]
    fn qq_pairs_sorted() {
        let z = ScalarDistribution::standard_normal();
        let q = qq_pairs(&[0.3, -1.0, 2.0], &z).unwrap();
        assert!(q.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
        assert!(q[1].1.abs() < 1e-12);
    }
}
