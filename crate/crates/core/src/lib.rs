//! Bayesian chi-squared goodness-of-fit diagnostics.
//!
//! The central statistic, `R^B`, is Pearson's statistic evaluated with fixed
//! cell probabilities while observations are allocated to cells through their
//! probability integral transform at a parameter value drawn from the
//! posterior. Under the model it is asymptotically chi-squared on `K - 1`
//! degrees of freedom regardless of how many parameters the model has.
//!
//! Layout:
//!
//! * [`probkit`]: special functions, scalar distributions and splittable RNG streams.
//! * [`binning`]: bin schemes and (randomized) PIT allocation.
//! * [`gof`]: `R^B` variants, classical comparators, the `A` statistic.
//! * [`models`]: the model contract plus normal and Poisson log-linear models.
//! * [`optim`]: a small Nelder–Mead minimizer used for grouped likelihoods.
//! * [`harness`]: Monte Carlo experiments, the `A^pp` test and the trace monitor.

pub mod binning;
pub mod error;
pub mod gof;
pub mod harness;
pub mod models;
pub mod optim;
pub mod probkit;

pub use error::{Error, Result};
