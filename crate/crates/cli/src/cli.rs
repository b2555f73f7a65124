use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const CSV_NOTE: &str = "Numeric CSV fields are written with 17 significant digits.";

#[derive(Debug, Parser)]
#[command(name = "bayeschi", version, about = "Bayesian chi-squared goodness-of-fit experiments and analyses")]
pub struct Cli {
    /// Flat TOML file of `flag-name = value` pairs. Flags given on the
    /// command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory. Defaults to $BAYESCHI_OUT_DIR, then the current directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for replicate-level parallelism. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Null calibration of R^B (and optionally R-hat and R^g) on synthetic data.
    #[command(after_help = concat!(
        "Outputs:\n",
        "  qq.csv         rank,value,reference_quantile (R^B, sorted)\n",
        "  qq_rhat.csv    same layout for R-hat (with --classical)\n",
        "  qq_rg.csv      same layout for R^g (with --classical)\n",
        "  summary.csv    statistic,reference_dof,replicates,mean,variance,ks_d,ks_critical,ks_pass\n",
        "  manifest.json\n",
        "Exit 2 with --assert-calibrated when the R^B KS check fails.\n",
    ))]
    SimulateNull(SimulateNullArgs),

    /// Power of the A, single-R^B and R^g tests against Student-t data.
    #[command(after_help = concat!(
        "Outputs:\n",
        "  power.csv      df,method,rejections,replicates,rate\n",
        "  null_a.csv     rank,a (sorted null distribution of A, when method a is used)\n",
        "  manifest.json\n",
    ))]
    Power(PowerArgs),

    /// Posterior R^B summary for a dataset.
    #[command(after_help = concat!(
        "Outputs:\n",
        "  summary.csv    model,a,exceedance,threshold,n_draws,m_1..m_K\n",
        "  rb_trace.csv   draw,value,exceed\n",
        "  manifest.json\n",
    ))]
    Analyze(AnalyzeArgs),

    /// Posterior-predictive-posterior significance test of A.
    #[command(after_help = concat!(
        "Outputs:\n",
        "  app_test.csv   a_observed,m,failures,p_value\n",
        "  app_samples.csv replicate,a_pp\n",
        "  manifest.json\n",
    ))]
    AppTest(AppTestArgs),

    /// Stream posterior draws and monitor R^B exceedances.
    #[command(after_help = concat!(
        "Draw stream: one whitespace-separated parameter vector per line.\n",
        "  normal: mu sigma\n",
        "  poisson-common: rate\n",
        "  poisson-saturated: mu_1 .. mu_n\n",
        "  poisson-exchangeable: alpha0 sigma_gamma gamma_1 .. gamma_n\n",
        "Outputs:\n",
        "  monitor.csv          index,valid,value,exceed,rate,alert\n",
        "  monitor_summary.csv  draws,valid,malformed,exceedances,rate,nominal,first_alert\n",
        "  manifest.json\n",
        "Exit 3 when the alert fired; 65 when more than 10% of lines are malformed.\n",
    ))]
    Monitor(MonitorArgs),

    /// Check a dataset against a model's input requirements.
    #[command(after_help = concat!(
        "Dataset schema: headered CSV with column `y` (observations) and,\n",
        "for Poisson models, column `E` (positive expected counts / offsets).\n",
        "Poisson `y` values must be non-negative integers.\n",
        "Outputs:\n",
        "  validation.csv field,value\n",
        "  manifest.json\n",
    ))]
    Validate(DataArgs),

    /// Re-run the command recorded in a manifest.
    Replay {
        /// Path to a manifest.json written by an earlier run.
        manifest: PathBuf,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of equiprobable bins, or `auto` for max(3, round(n^0.4)).
    #[arg(long)]
    pub k: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ModelArgs {
    /// normal | poisson-common | poisson-exchangeable | poisson-saturated
    #[arg(long)]
    pub model: Option<String>,
    /// Saturated-model prior exponent c (prior proportional to mu^-c).
    #[arg(long)]
    pub prior_exponent: Option<f64>,
    /// Inverse-gamma shape of the random-effect variance (exchangeable model).
    #[arg(long)]
    pub hyper_shape: Option<f64>,
    /// Inverse-gamma scale of the random-effect variance (exchangeable model).
    #[arg(long)]
    pub hyper_scale: Option<f64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
}

#[derive(Debug, Args, Clone)]
#[command(after_help = CSV_NOTE)]
pub struct SimulateNullArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Normal truth: mean.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Normal truth: standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Poisson truth: common mean of every count.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Also compute R-hat and R^g (normal model only).
    #[arg(long)]
    pub classical: bool,
    #[arg(long)]
    pub ks_alpha: Option<f64>,
    #[arg(long)]
    pub assert_calibrated: bool,
}

#[derive(Debug, Args, Clone)]
pub struct PowerArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Replicates per df.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Replicates behind the null distribution of A.
    #[arg(long)]
    pub null_reps: Option<usize>,
    /// Posterior draws per dataset for A.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Degrees of freedom: a range `1..10` or a list `1,2,3`.
    #[arg(long)]
    pub df: Option<String>,
    /// Comma-separated subset of a,rb1,rg.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct DataArgs {
    /// Headered CSV with column `y` and, for Poisson models, `E`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Retained posterior draws.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Exceedance threshold (default: chi-squared 0.95 quantile).
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct AppTestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub draws: Option<usize>,
    /// Posterior-predictive replicates (at least 20).
    #[arg(long)]
    pub pp_reps: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct MonitorArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Draw stream file; `-` or absent reads standard input.
    #[arg(long)]
    pub draws_file: Option<String>,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Alert when the exceedance rate exceeds this multiple of the nominal tail mass.
    #[arg(long)]
    pub alert_factor: Option<f64>,
    /// Valid draws required before an alert can fire.
    #[arg(long)]
    pub alert_min_draws: Option<usize>,
}
