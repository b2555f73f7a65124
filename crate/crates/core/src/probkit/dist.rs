use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use statrs::function::beta::beta_reg;
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use super::RngStream;
use crate::error::{domain, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Normal { mean: f64, sd: f64 },
    ChiSquared { dof: f64 },
    Gamma { shape: f64, rate: f64 },
    StudentT { df: f64 },
    Uniform { lo: f64, hi: f64 },
    Poisson { mean: f64 },
}

/// A univariate distribution with validated parameters.
///
/// Evaluation is pure; sampling consumes a caller-owned [`RngStream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarDistribution {
    kind: Kind,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and > 0, got {v}"))
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

fn std_normal_quantile(p: f64) -> f64 {
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    // one Newton step against the high-accuracy CDF
    let (resid, dens) = if p < 0.5 {
        (std_normal_cdf(z) - p, std_normal_pdf(z))
    } else {
        ((1.0 - p) - std_normal_sf(z), std_normal_pdf(z))
    };
    if dens > 0.0 && resid.is_finite() {
        z - resid / dens
    } else {
        z
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

fn gamma_pdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return match shape {
            s if s < 1.0 => f64::INFINITY,
            s if s == 1.0 => rate,
            _ => 0.0,
        };
    }
    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
}

fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(shape, rate * x)
    }
}

fn gamma_sf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma_ur(shape, rate * x)
    }
}

fn student_t_tail(df: f64, t: f64) -> f64 {
    // P(T > |t|)
    let x = df / (df + t * t);
    0.5 * beta_reg(0.5 * df, 0.5, x)
}

fn student_t_pdf(df: f64, t: f64) -> f64 {
    let ln = ln_gamma(0.5 * (df + 1.0))
        - ln_gamma(0.5 * df)
        - 0.5 * (df * std::f64::consts::PI).ln()
        - 0.5 * (df + 1.0) * (1.0 + t * t / df).ln();
    ln.exp()
}

fn poisson_cdf(mean: f64, k: f64) -> f64 {
    if k < 0.0 {
        0.0
    } else {
        gamma_ur(k + 1.0, mean)
    }
}

fn poisson_sf(mean: f64, k: f64) -> f64 {
    if k < 0.0 {
        1.0
    } else {
        gamma_lr(k + 1.0, mean)
    }
}

impl ScalarDistribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() {
            return domain(format!("normal mean must be finite, got {mean}"));
        }
        positive("normal sd", sd)?;
        Ok(Self {
            kind: Kind::Normal { mean, sd },
        })
    }

    pub fn standard_normal() -> Self {
        Self {
            kind: Kind::Normal { mean: 0.0, sd: 1.0 },
        }
    }

    pub fn chi_squared(dof: f64) -> Result<Self> {
        positive("chi-squared dof", dof)?;
        Ok(Self {
            kind: Kind::ChiSquared { dof },
        })
    }

    /// Gamma with shape and *rate* (mean `shape / rate`).
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        positive("gamma shape", shape)?;
        positive("gamma rate", rate)?;
        Ok(Self {
            kind: Kind::Gamma { shape, rate },
        })
    }

    pub fn student_t(df: f64) -> Result<Self> {
        if !(df.is_finite() && df >= 1.0) {
            return domain(format!("student-t df must be finite and >= 1, got {df}"));
        }
        Ok(Self {
            kind: Kind::StudentT { df },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!("uniform needs finite lo < hi, got ({lo}, {hi})"));
        }
        Ok(Self {
            kind: Kind::Uniform { lo, hi },
        })
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        positive("poisson mean", mean)?;
        Ok(Self {
            kind: Kind::Poisson { mean },
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, Kind::Poisson { .. })
    }

    pub fn mean(&self) -> Option<f64> {
        match self.kind {
            Kind::Normal { mean, .. } => Some(mean),
            Kind::ChiSquared { dof } => Some(dof),
            Kind::Gamma { shape, rate } => Some(shape / rate),
            Kind::StudentT { df } if df > 1.0 => Some(0.0),
            Kind::StudentT { .. } => None,
            Kind::Uniform { lo, hi } => Some(0.5 * (lo + hi)),
            Kind::Poisson { mean } => Some(mean),
        }
    }

    pub fn variance(&self) -> Option<f64> {
        match self.kind {
            Kind::Normal { sd, .. } => Some(sd * sd),
            Kind::ChiSquared { dof } => Some(2.0 * dof),
            Kind::Gamma { shape, rate } => Some(shape / (rate * rate)),
            Kind::StudentT { df } if df > 2.0 => Some(df / (df - 2.0)),
            Kind::StudentT { .. } => None,
            Kind::Uniform { lo, hi } => Some((hi - lo).powi(2) / 12.0),
            Kind::Poisson { mean } => Some(mean),
        }
    }

    /// `P(X <= x)`. For Poisson, `P(Y <= floor(x))`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self.kind {
            Kind::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            Kind::ChiSquared { dof } => gamma_cdf(0.5 * dof, 0.5, x),
            Kind::Gamma { shape, rate } => gamma_cdf(shape, rate, x),
            Kind::StudentT { df } => {
                if x.is_infinite() {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                let tail = student_t_tail(df, x);
                if x > 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
            Kind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Kind::Poisson { mean } => {
                if x.is_infinite() {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                poisson_cdf(mean, x.floor())
            }
        }
    }

    /// `P(X > x)`, evaluated through the upper tail rather than `1 - cdf`.
    pub fn survival(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match self.kind {
            Kind::Normal { mean, sd } => std_normal_sf((x - mean) / sd),
            Kind::ChiSquared { dof } => gamma_sf(0.5 * dof, 0.5, x),
            Kind::Gamma { shape, rate } => gamma_sf(shape, rate, x),
            Kind::StudentT { df } => {
                if x.is_infinite() {
                    return if x > 0.0 { 0.0 } else { 1.0 };
                }
                let tail = student_t_tail(df, x);
                if x > 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            Kind::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            Kind::Poisson { mean } => {
                if x.is_infinite() {
                    return if x > 0.0 { 0.0 } else { 1.0 };
                }
                poisson_sf(mean, x.floor())
            }
        }
    }

    /// Density (continuous kinds) or mass at `floor(x)` (Poisson).
    pub fn density(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Normal { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Kind::ChiSquared { dof } => gamma_pdf(0.5 * dof, 0.5, x),
            Kind::Gamma { shape, rate } => gamma_pdf(shape, rate, x),
            Kind::StudentT { df } => student_t_pdf(df, x),
            Kind::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Kind::Poisson { mean } => {
                if x < 0.0 || x != x.floor() {
                    return 0.0;
                }
                (x * mean.ln() - mean - ln_gamma(x + 1.0)).exp()
            }
        }
    }

    /// Inverse CDF.
    ///
    /// Continuous kinds accept `p` in `(0, 1)`. Poisson accepts `[0, 1)` and
    /// returns the smallest `y` with `cdf(y) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if let Kind::Poisson { mean } = self.kind {
            if !(0.0..1.0).contains(&p) {
                return domain(format!("poisson quantile needs p in [0, 1), got {p}"));
            }
            return Ok(poisson_quantile(mean, p));
        }
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile needs p in (0, 1), got {p}"));
        }
        Ok(match self.kind {
            Kind::Normal { mean, sd } => mean + sd * std_normal_quantile(p),
            Kind::Uniform { lo, hi } => lo + p * (hi - lo),
            Kind::StudentT { df } if df == 1.0 => (std::f64::consts::PI * (p - 0.5)).tan(),
            Kind::StudentT { df } if df == 2.0 => {
                let a = 4.0 * p * (1.0 - p);
                2.0 * (p - 0.5) * (2.0 / a).sqrt()
            }
            Kind::StudentT { .. } => {
                let guess = std_normal_quantile(p);
                self.invert(p, guess, f64::NEG_INFINITY)
            }
            Kind::ChiSquared { dof } => self.invert(p, wilson_hilferty(0.5 * dof, 0.5, p), 0.0),
            Kind::Gamma { shape, rate } => self.invert(p, wilson_hilferty(shape, rate, p), 0.0),
            Kind::Poisson { .. } => unreachable!(),
        })
    }

    /// Safeguarded Newton on the CDF (lower half) or survival (upper half).
    fn invert(&self, p: f64, guess: f64, lower_support: f64) -> f64 {
        let upper_half = p > 0.5;
        let q = 1.0 - p;
        // increasing in x in both cases
        let resid = |x: f64| {
            if upper_half {
                q - self.survival(x)
            } else {
                self.cdf(x) - p
            }
        };

        let mut x = if guess.is_finite() {
            guess
        } else {
            lower_support.max(0.0) + 1.0
        };
        if lower_support.is_finite() && x <= lower_support {
            x = lower_support + 1e-3;
        }

        // bracket [lo, hi] with resid(lo) < 0 < resid(hi)
        let (mut lo, mut hi);
        if resid(x) < 0.0 {
            lo = x;
            let mut step = x.abs().max(1.0);
            hi = x + step;
            while resid(hi) < 0.0 {
                lo = hi;
                step *= 2.0;
                hi += step;
            }
        } else {
            hi = x;
            let mut step = x.abs().max(1.0);
            lo = x - step;
            if lower_support.is_finite() && lo <= lower_support {
                lo = lower_support;
            }
            while resid(lo) > 0.0 {
                hi = lo;
                if lower_support.is_finite() {
                    lo = lower_support + 0.5 * (lo - lower_support);
                    if lo - lower_support < 1e-300 {
                        return lower_support;
                    }
                } else {
                    step *= 2.0;
                    lo -= step;
                }
            }
        }

        x = x.clamp(lo, hi);
        for _ in 0..200 {
            let r = resid(x);
            if r == 0.0 {
                return x;
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.density(x);
            let mut next = if d > 0.0 && d.is_finite() { x - r / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return next;
            }
            x = next;
            if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return x;
            }
        }
        x
    }

    /// Draw one value.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self.kind {
            Kind::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Kind::ChiSquared { dof } => sample_gamma(0.5 * dof, 0.5, rng),
            Kind::Gamma { shape, rate } => sample_gamma(shape, rate, rng),
            Kind::StudentT { df } => {
                let z: f64 = StandardNormal.sample(rng);
                let x = sample_gamma(0.5 * df, 0.5, rng);
                z / (x / df).sqrt()
            }
            Kind::Uniform { lo, hi } => lo + (hi - lo) * rng.uniform(),
            Kind::Poisson { mean } => Poisson::new(mean)
                .expect("validated poisson mean")
                .sample(rng),
        }
    }

    pub fn sample_n(&self, n: usize, rng: &mut RngStream) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

fn sample_gamma(shape: f64, rate: f64, rng: &mut RngStream) -> f64 {
    Gamma::new(shape, 1.0 / rate)
        .expect("validated gamma parameters")
        .sample(rng)
}

fn wilson_hilferty(shape: f64, rate: f64, p: f64) -> f64 {
    let z = std_normal_quantile(p);
    let c = 1.0 / (9.0 * shape);
    let g = shape * (1.0 - c + z * c.sqrt()).powi(3);
    let g = if g > 0.0 { g } else { shape * 0.5 * p.powf(1.0 / shape) };
    g / rate
}

fn poisson_quantile(mean: f64, p: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    let z = std_normal_quantile(p.clamp(1e-12, 1.0 - 1e-12));
    let mut y = (mean + z * mean.sqrt() - 1.0).floor().max(0.0);
    while y > 0.0 && poisson_cdf(mean, y - 1.0) >= p {
        y -= 1.0;
    }
    while poisson_cdf(mean, y) < p {
        y += 1.0;
    }
    y
}
