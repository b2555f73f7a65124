use crate::error::Result;
use crate::probkit::{RngStream, ScalarDistribution};

/// `n` i.i.d. standard normal deviates.
pub fn generate_null_normal(n: usize, rng: &mut RngStream) -> Vec<f64> {
    ScalarDistribution::standard_normal().sample_n(n, rng)
}

/// `n` i.i.d. Student-t deviates with `df` degrees of freedom.
pub fn generate_t(n: usize, df: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    Ok(ScalarDistribution::student_t(df)?.sample_n(n, rng))
}

/// Independent Poisson counts with the given means.
pub fn generate_poisson(means: &[f64], rng: &mut RngStream) -> Result<Vec<u64>> {
    means
        .iter()
        .map(|&m| Ok(ScalarDistribution::poisson(m)?.sample(rng) as u64))
        .collect()
}
