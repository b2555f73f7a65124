//! Distributions and random streams shared by every other module.

mod dist;
mod rng;

pub use dist::ScalarDistribution;
pub use rng::RngStream;
