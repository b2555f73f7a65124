//! Flag / config-file / default resolution into fully materialized settings.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cli::{AnalyzeArgs, AppTestArgs, CommonArgs, DataArgs, ModelArgs, MonitorArgs, PowerArgs, SimulateNullArgs};
use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "BAYESCHI_OUT_DIR";

/// Flat `key = value` TOML whose keys mirror the long flag names.
#[derive(Debug, Default)]
pub struct ConfigFile {
    table: toml::Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        if let Some((k, _)) = table.iter().find(|(_, v)| v.is_table()) {
            return Err(CliError::usage(format!("config key `{k}` is a table; the config file must be flat")));
        }
        Ok(Self { table })
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key `{key}`: {e}"))),
        }
    }

    /// Flag, else config value, else default.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn pick_opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn flag(&self, set: bool, key: &str) -> Result<bool, CliError> {
        Ok(set || self.get(key)?.unwrap_or(false))
    }
}

/// Recorded paths are made absolute so a manifest replays from any directory.
fn absolute(p: PathBuf) -> PathBuf {
    std::path::absolute(&p).unwrap_or(p)
}

pub fn resolve_out_dir(flag: Option<PathBuf>, cfg: &ConfigFile) -> Result<PathBuf, CliError> {
    if let Some(p) = cfg.pick_opt(flag.map(|p| p.display().to_string()), "out")? {
        return Ok(PathBuf::from(p));
    }
    Ok(std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".")))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct ModelSettings {
    pub model: String,
    pub prior_exponent: f64,
    pub hyper_shape: f64,
    pub hyper_scale: f64,
    pub burn_in: usize,
    pub thin: usize,
}

pub const MODELS: [&str; 4] = ["normal", "poisson-common", "poisson-exchangeable", "poisson-saturated"];

impl ModelSettings {
    fn resolve(a: &ModelArgs, cfg: &ConfigFile, default_model: &str) -> Result<Self, CliError> {
        let s = Self {
            model: cfg.pick(a.model.clone(), "model", default_model.to_string())?,
            prior_exponent: cfg.pick(a.prior_exponent, "prior-exponent", 0.5)?,
            hyper_shape: cfg.pick(a.hyper_shape, "hyper-shape", 0.001)?,
            hyper_scale: cfg.pick(a.hyper_scale, "hyper-scale", 0.001)?,
            burn_in: cfg.pick(a.burn_in, "burn-in", 2000)?,
            thin: cfg.pick(a.thin, "thin", 4)?,
        };
        if !MODELS.contains(&s.model.as_str()) {
            return Err(CliError::usage(format!(
                "unknown model `{}`; expected one of {}",
                s.model,
                MODELS.join(", ")
            )));
        }
        Ok(s)
    }

    pub fn is_poisson(&self) -> bool {
        self.model.starts_with("poisson")
    }
}

/// Bin count, or `None` for the automatic rule.
fn resolve_k(c: &CommonArgs, cfg: &ConfigFile) -> Result<Option<usize>, CliError> {
    let raw: Option<String> = match &c.k {
        Some(v) => Some(v.clone()),
        None => match cfg.table.get("k") {
            None => None,
            Some(toml::Value::Integer(i)) => Some(i.to_string()),
            Some(toml::Value::String(s)) => Some(s.clone()),
            Some(other) => return Err(CliError::usage(format!("config key `k`: unexpected value {other}"))),
        },
    };
    match raw.as_deref() {
        None => Ok(Some(5)),
        Some("auto") => Ok(None),
        Some(s) => s
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::usage(format!("--k expects an integer or `auto`, got `{s}`"))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateNullSettings {
    pub seed: u64,
    pub k: Option<usize>,
    pub model: ModelSettings,
    pub n: usize,
    pub reps: usize,
    pub mu: f64,
    pub sigma: f64,
    pub mean: f64,
    pub classical: bool,
    pub ks_alpha: f64,
    pub assert_calibrated: bool,
}

impl SimulateNullSettings {
    pub fn resolve(a: &SimulateNullArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        Ok(Self {
            seed: cfg.pick(a.common.seed, "seed", 1)?,
            k: resolve_k(&a.common, cfg)?,
            model: ModelSettings::resolve(&a.model, cfg, "normal")?,
            n: cfg.pick(a.n, "n", 50)?,
            reps: cfg.pick(a.reps, "reps", 2000)?,
            mu: cfg.pick(a.mu, "mu", 0.0)?,
            sigma: cfg.pick(a.sigma, "sigma", 1.0)?,
            mean: cfg.pick(a.mean, "mean", 4.2)?,
            classical: cfg.flag(a.classical, "classical")?,
            ks_alpha: cfg.pick(a.ks_alpha, "ks-alpha", 0.01)?,
            assert_calibrated: cfg.flag(a.assert_calibrated, "assert-calibrated")?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct PowerSettings {
    pub seed: u64,
    pub k: Option<usize>,
    pub n: usize,
    pub reps: usize,
    pub null_reps: usize,
    pub draws: usize,
    pub df: Vec<u32>,
    pub methods: Vec<String>,
    pub alpha: f64,
}

fn parse_df(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::usage(format!("--df expects `a..b` or a comma list, got `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

impl PowerSettings {
    pub fn resolve(a: &PowerArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let df = parse_df(&cfg.pick(a.df.clone(), "df", "1,2,3,5,10".to_string())?)?;
        if let Some(d) = df.iter().find(|&&d| !(1..=10).contains(&d)) {
            return Err(CliError::usage(format!("df {d} outside 1..10")));
        }
        let methods: Vec<String> = cfg
            .pick(a.methods.clone(), "methods", "a,rb1,rg".to_string())?
            .split(',')
            .map(|m| m.trim().to_string())
            .collect();
        if let Some(m) = methods
            .iter()
            .find(|m| bayeschi::harness::PowerMethod::parse(m).is_none())
        {
            return Err(CliError::usage(format!("unknown method `{m}`; expected a, rb1 or rg")));
        }
        Ok(Self {
            seed: cfg.pick(a.common.seed, "seed", 1)?,
            k: resolve_k(&a.common, cfg)?,
            n: cfg.pick(a.n, "n", 50)?,
            reps: cfg.pick(a.reps, "reps", 1000)?,
            null_reps: cfg.pick(a.null_reps, "null-reps", 2000)?,
            draws: cfg.pick(a.draws, "draws", 500)?,
            df,
            methods,
            alpha: cfg.pick(a.alpha, "alpha", 0.05)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct DataSettings {
    pub data: PathBuf,
    pub model: ModelSettings,
}

impl DataSettings {
    pub fn resolve(a: &DataArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let data = cfg
            .pick_opt(a.data.as_ref().map(|p| p.display().to_string()), "data")?
            .ok_or_else(|| CliError::usage("--data is required"))?;
        Ok(Self {
            data: absolute(PathBuf::from(data)),
            model: ModelSettings::resolve(&a.model, cfg, "normal")?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct AnalyzeSettings {
    pub input: DataSettings,
    pub seed: u64,
    pub k: Option<usize>,
    pub draws: usize,
    pub threshold: Option<f64>,
}

impl AnalyzeSettings {
    pub fn resolve(a: &AnalyzeArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        Ok(Self {
            input: DataSettings::resolve(&a.data, cfg)?,
            seed: cfg.pick(a.common.seed, "seed", 1)?,
            k: resolve_k(&a.common, cfg)?,
            draws: cfg.pick(a.draws, "draws", 5000)?,
            threshold: cfg.pick_opt(a.threshold, "threshold")?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct AppTestSettings {
    pub input: DataSettings,
    pub seed: u64,
    pub k: Option<usize>,
    pub draws: usize,
    pub pp_reps: usize,
}

impl AppTestSettings {
    pub fn resolve(a: &AppTestArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        Ok(Self {
            input: DataSettings::resolve(&a.data, cfg)?,
            seed: cfg.pick(a.common.seed, "seed", 1)?,
            k: resolve_k(&a.common, cfg)?,
            draws: cfg.pick(a.draws, "draws", 1000)?,
            pp_reps: cfg.pick(a.pp_reps, "pp-reps", 100)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct MonitorSettings {
    pub input: DataSettings,
    pub seed: u64,
    pub k: Option<usize>,
    /// `None` for standard input.
    pub draws_file: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub alert_factor: f64,
    pub alert_min_draws: usize,
}

impl MonitorSettings {
    pub fn resolve(a: &MonitorArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let draws_file = cfg
            .pick_opt(a.draws_file.clone(), "draws-file")?
            .filter(|s| s != "-")
            .map(|s| absolute(PathBuf::from(s)));
        Ok(Self {
            input: DataSettings::resolve(&a.data, cfg)?,
            seed: cfg.pick(a.common.seed, "seed", 1)?,
            k: resolve_k(&a.common, cfg)?,
            draws_file,
            threshold: cfg.pick_opt(a.threshold, "threshold")?,
            alert_factor: cfg.pick(a.alert_factor, "alert-factor", 3.0)?,
            alert_min_draws: cfg.pick(a.alert_min_draws, "alert-min-draws", 200)?,
        })
    }
}

/// A fully resolved command, as recorded in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", content = "settings", rename_all = "kebab-case")]
pub enum Resolved {
    SimulateNull(SimulateNullSettings),
    Power(PowerSettings),
    Analyze(AnalyzeSettings),
    AppTest(AppTestSettings),
    Monitor(MonitorSettings),
    Validate(DataSettings),
}
