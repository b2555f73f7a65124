//! Command execution on resolved settings.

use std::io::{BufRead, BufReader};
use std::path::Path;

use bayeschi::binning::{default_bin_count, BinScheme};
use bayeschi::gof::{default_threshold, RbModel};
use bayeschi::harness::{
    analyze_with_trace, app_test, null_a_distribution, null_calibration, power_study, AlertRule, BinRule,
    DistributionSummary, ExperimentConfig, ModelChoice, PowerMethod, RbMonitor,
};
use bayeschi::probkit::RngStream;
use sha2::{Digest, Sha256};

use crate::config::{
    AnalyzeSettings, AppTestSettings, DataSettings, MonitorSettings, PowerSettings, Resolved, SimulateNullSettings,
};
use crate::data::{as_counts, fit, poisson_variant, read_dataset, Fitted};
use crate::error::{CliError, EXIT_ALERT, EXIT_OK, EXIT_UNCALIBRATED};
use crate::output::{num, CsvOut, InputDigest};

/// Stream id for the monitor's randomized allocation.
const MONITOR_STREAM: u64 = 7;

pub struct Outcome {
    pub code: u8,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

pub fn execute(r: &Resolved, out: &Path) -> Result<Outcome, CliError> {
    match r {
        Resolved::SimulateNull(s) => simulate_null(s, out),
        Resolved::Power(s) => power(s, out),
        Resolved::Analyze(s) => analyze(s, out),
        Resolved::AppTest(s) => app(s, out),
        Resolved::Monitor(s) => monitor(s, out),
        Resolved::Validate(s) => validate(s, out),
    }
}

fn bins(k: Option<usize>) -> BinRule {
    k.map(BinRule::Fixed).unwrap_or(BinRule::Auto)
}

fn scheme_for(k: Option<usize>, n: usize) -> Result<BinScheme, CliError> {
    Ok(BinScheme::equiprobable(k.unwrap_or_else(|| default_bin_count(n)))?)
}

fn digest(role: &str, path: &Path, sha256: String) -> InputDigest {
    InputDigest {
        role: role.into(),
        path: path.display().to_string(),
        sha256,
    }
}

fn write_qq(out: &Path, name: &str, d: &DistributionSummary) -> Result<String, CliError> {
    let mut w = CsvOut::create(out, name, &["rank", "value", "reference_quantile"])?;
    for (i, (v, q)) in d.qq.iter().enumerate() {
        w.row([(i + 1).to_string(), num(*v), num(*q)])?;
    }
    w.finish()
}

fn simulate_null(s: &SimulateNullSettings, out: &Path) -> Result<Outcome, CliError> {
    let model = if s.model.is_poisson() {
        ModelChoice::Poisson {
            variant: poisson_variant(&s.model)?,
            mean: s.mean,
        }
    } else {
        ModelChoice::Normal { mu: s.mu, sigma: s.sigma }
    };
    let config = ExperimentConfig {
        n: s.n,
        replicates: s.reps,
        bins: bins(s.k),
        seed: s.seed,
        model,
        ks_alpha: s.ks_alpha,
        classical: s.classical,
        ..Default::default()
    };
    if s.assert_calibrated && s.reps < 20 {
        return Err(CliError::usage("--assert-calibrated needs at least 20 replicates"));
    }
    let r = null_calibration(&config)?;

    let mut outputs = vec![write_qq(out, "qq.csv", &r.rb)?];
    let mut stats = vec![("rb", &r.rb)];
    if let (Some(h), Some(g)) = (&r.r_hat, &r.r_grouped) {
        outputs.push(write_qq(out, "qq_rhat.csv", h)?);
        outputs.push(write_qq(out, "qq_rg.csv", g)?);
        stats.push(("rhat", h));
        stats.push(("rg", g));
    }
    let mut w = CsvOut::create(
        out,
        "summary.csv",
        &["statistic", "reference_dof", "replicates", "mean", "variance", "ks_d", "ks_critical", "ks_pass"],
    )?;
    for (name, d) in &stats {
        let (kd, kc, kp) = match d.ks {
            Some(k) => (num(k.d), num(k.critical), k.pass.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        w.row([
            name.to_string(),
            d.reference_dof.to_string(),
            d.values.len().to_string(),
            num(d.mean),
            num(d.variance),
            kd,
            kc,
            kp,
        ])?;
    }
    outputs.push(w.finish()?);

    let calibrated = r.rb.ks.map(|k| k.pass).unwrap_or(true);
    let code = if s.assert_calibrated && !calibrated {
        eprintln!("R^B null calibration failed the KS check");
        EXIT_UNCALIBRATED
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        code,
        inputs: vec![],
        outputs,
    })
}

fn power(s: &PowerSettings, out: &Path) -> Result<Outcome, CliError> {
    let methods: Vec<PowerMethod> = s.methods.iter().filter_map(|m| PowerMethod::parse(m)).collect();
    let config = ExperimentConfig {
        n: s.n,
        replicates: s.reps,
        bins: bins(s.k),
        seed: s.seed,
        draws_per_dataset: s.draws,
        alpha: s.alpha,
        df_grid: s.df.clone(),
        methods: methods.clone(),
        ..Default::default()
    };
    let mut outputs = Vec::new();
    let null_a = if methods.contains(&PowerMethod::A) {
        let d = null_a_distribution(&ExperimentConfig {
            replicates: s.null_reps,
            ..config.clone()
        })?;
        let mut w = CsvOut::create(out, "null_a.csv", &["rank", "a"])?;
        for (i, a) in d.values.iter().enumerate() {
            w.row([(i + 1).to_string(), num(*a)])?;
        }
        outputs.push(w.finish()?);
        Some(d)
    } else {
        None
    };
    let rows = power_study(&config, null_a.as_ref())?;
    let mut w = CsvOut::create(out, "power.csv", &["df", "method", "rejections", "replicates", "rate"])?;
    for r in rows {
        w.row([
            r.df.map(|d| d.to_string()).unwrap_or_default(),
            r.method.name().to_string(),
            r.rejections.to_string(),
            r.replicates.to_string(),
            num(r.rate),
        ])?;
    }
    outputs.insert(0, w.finish()?);
    Ok(Outcome {
        code: EXIT_OK,
        inputs: vec![],
        outputs,
    })
}

fn load(s: &DataSettings) -> Result<(Fitted, InputDigest), CliError> {
    let ds = read_dataset(&s.data)?;
    let fitted = fit(&ds, &s.model)?;
    Ok((fitted, digest("data", &s.data, ds.sha256)))
}

fn analyze_model<M: RbModel>(
    data: &[M::Obs],
    model: &M,
    s: &AnalyzeSettings,
    out: &Path,
) -> Result<Vec<String>, CliError> {
    let config = ExperimentConfig {
        bins: bins(s.k),
        seed: s.seed,
        draws_per_dataset: s.draws,
        threshold: s.threshold,
        ..Default::default()
    };
    let (summary, trace) = analyze_with_trace(data, model, &config)?;
    let k = summary.mean_bin_counts.len();
    let mut header: Vec<String> = ["model", "a", "exceedance", "threshold", "n_draws"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=k).map(|i| format!("m_{i}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = CsvOut::create(out, "summary.csv", &header_refs)?;
    let mut row = vec![
        s.input.model.model.clone(),
        num(summary.a_value),
        num(summary.exceedance),
        num(summary.threshold),
        summary.n_draws.to_string(),
    ];
    row.extend(summary.mean_bin_counts.iter().map(|&m| num(m)));
    w.row(row)?;
    let summary_file = w.finish()?;
    if !summary.sparse_cells.is_empty() {
        eprintln!(
            "note: cells {:?} have expected count below 1; the chi-squared reference is unreliable",
            summary.sparse_cells
        );
    }

    let mut w = CsvOut::create(out, "rb_trace.csv", &["draw", "value", "exceed"])?;
    for t in &trace {
        w.row([
            t.draw_index.to_string(),
            num(t.value),
            (t.value > summary.threshold).to_string(),
        ])?;
    }
    Ok(vec![summary_file, w.finish()?])
}

fn analyze(s: &AnalyzeSettings, out: &Path) -> Result<Outcome, CliError> {
    let (fitted, input) = load(&s.input)?;
    let outputs = match &fitted {
        Fitted::Normal(m, y) => analyze_model(y, m, s, out)?,
        Fitted::Poisson(m, y) => analyze_model(y, m, s, out)?,
    };
    Ok(Outcome {
        code: EXIT_OK,
        inputs: vec![input],
        outputs,
    })
}

fn app_model<M: RbModel>(data: &[M::Obs], model: &M, s: &AppTestSettings, out: &Path) -> Result<Vec<String>, CliError> {
    let config = ExperimentConfig {
        bins: bins(s.k),
        seed: s.seed,
        draws_per_dataset: s.draws,
        pp_reps: s.pp_reps,
        ..Default::default()
    };
    let r = app_test(data, model, &config)?;
    let mut w = CsvOut::create(out, "app_test.csv", &["a_observed", "m", "failures", "p_value"])?;
    w.row([
        num(r.a_observed),
        s.pp_reps.to_string(),
        r.failures.to_string(),
        num(r.p_value),
    ])?;
    let a = w.finish()?;
    let mut w = CsvOut::create(out, "app_samples.csv", &["replicate", "a_pp"])?;
    for (i, v) in r.app_samples.iter().enumerate() {
        w.row([(i + 1).to_string(), num(*v)])?;
    }
    Ok(vec![a, w.finish()?])
}

fn app(s: &AppTestSettings, out: &Path) -> Result<Outcome, CliError> {
    let (fitted, input) = load(&s.input)?;
    let outputs = match &fitted {
        Fitted::Normal(m, y) => app_model(y, m, s, out)?,
        Fitted::Poisson(m, y) => app_model(y, m, s, out)?,
    };
    Ok(Outcome {
        code: EXIT_OK,
        inputs: vec![input],
        outputs,
    })
}

struct MonitorCounts {
    lines: usize,
    malformed: usize,
    alerted: bool,
    draws_sha256: String,
}

fn monitor_model<M: RbModel>(
    data: &[M::Obs],
    model: &M,
    s: &MonitorSettings,
    source: Box<dyn BufRead>,
    out: &Path,
) -> Result<(MonitorCounts, Vec<String>), CliError> {
    let scheme = scheme_for(s.k, data.len())?;
    let threshold = s.threshold.unwrap_or_else(|| default_threshold(scheme.k() - 1));
    let rule = AlertRule {
        factor: s.alert_factor,
        min_draws: s.alert_min_draws,
    };
    let mut mon = RbMonitor::new(scheme.k() - 1, threshold, rule)?;
    let mut rng = RngStream::new(s.seed, MONITOR_STREAM);
    let mut hasher = Sha256::new();
    let mut w = CsvOut::create(out, "monitor.csv", &["index", "valid", "value", "exceed", "rate", "alert"])?;
    let (mut lines, mut malformed) = (0usize, 0usize);

    for line in source.lines() {
        let line = line.map_err(|e| CliError::data(format!("reading draws: {e}")))?;
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        lines += 1;
        let parsed: Option<Vec<f64>> = t.split_whitespace().map(|f| f.parse().ok()).collect();
        let theta = parsed.and_then(|v| model.param_from_values(&v).ok());
        if theta.is_none() {
            malformed += 1;
        }
        let value = theta.and_then(|th| model.rb(data, &th, &scheme, &mut rng).ok().map(|r| r.value));
        let rec = mon.push(value);
        w.row([
            rec.index.to_string(),
            rec.value.is_some().to_string(),
            rec.value.map(num).unwrap_or_default(),
            rec.exceed.map(|e| e.to_string()).unwrap_or_default(),
            num(rec.rate),
            rec.alert.to_string(),
        ])?;
        w.flush()?;
    }
    let trace = w.finish()?;
    let sum = mon.summary();
    let mut w = CsvOut::create(
        out,
        "monitor_summary.csv",
        &["draws", "valid", "malformed", "exceedances", "rate", "nominal", "first_alert"],
    )?;
    w.row([
        sum.draws.to_string(),
        sum.valid.to_string(),
        malformed.to_string(),
        sum.exceedances.to_string(),
        num(sum.rate),
        num(sum.nominal),
        sum.first_alert.map(|i| i.to_string()).unwrap_or_default(),
    ])?;
    let summary = w.finish()?;
    let draws_sha256 = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((
        MonitorCounts {
            lines,
            malformed,
            alerted: sum.first_alert.is_some(),
            draws_sha256,
        },
        vec![trace, summary],
    ))
}

fn monitor(s: &MonitorSettings, out: &Path) -> Result<Outcome, CliError> {
    let (fitted, input) = load(&s.input)?;
    let source: Box<dyn BufRead> = match &s.draws_file {
        Some(p) => Box::new(BufReader::new(
            std::fs::File::open(p).map_err(|e| CliError::data(format!("cannot open {}: {e}", p.display())))?,
        )),
        None => Box::new(BufReader::new(std::io::stdin())),
    };
    let (counts, outputs) = match &fitted {
        Fitted::Normal(m, y) => monitor_model(y, m, s, source, out)?,
        Fitted::Poisson(m, y) => monitor_model(y, m, s, source, out)?,
    };
    let draws_path = s
        .draws_file
        .as_deref()
        .unwrap_or_else(|| Path::new("-"));
    let inputs = vec![input, digest("draws", draws_path, counts.draws_sha256)];
    if counts.malformed > 0 {
        eprintln!("{} of {} draw lines were malformed", counts.malformed, counts.lines);
    }
    if counts.malformed * 10 > counts.lines {
        return Err(CliError::data(format!(
            "{} of {} draw lines were malformed (more than 10%)",
            counts.malformed, counts.lines
        )));
    }
    let code = if counts.alerted {
        eprintln!("alert: R^B exceedance rate left the nominal band");
        EXIT_ALERT
    } else {
        EXIT_OK
    };
    Ok(Outcome { code, inputs, outputs })
}

fn validate(s: &DataSettings, out: &Path) -> Result<Outcome, CliError> {
    let ds = read_dataset(&s.data)?;
    fit(&ds, &s.model)?;
    let min = ds.y.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ds.y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w = CsvOut::create(out, "validation.csv", &["field", "value"])?;
    w.row(["model", s.model.model.as_str()])?;
    w.row(["rows".to_string(), ds.y.len().to_string()])?;
    w.row(["has_offsets".to_string(), ds.offsets.is_some().to_string()])?;
    w.row(["min_y".to_string(), num(min)])?;
    w.row(["max_y".to_string(), num(max)])?;
    if s.model.is_poisson() {
        let zeros = as_counts(&ds.y)?.iter().filter(|&&c| c == 0).count();
        w.row(["zero_counts".to_string(), zeros.to_string()])?;
    }
    w.row(["status", "ok"])?;
    eprintln!("{}: {} rows valid for model {}", s.data.display(), ds.y.len(), s.model.model);
    Ok(Outcome {
        code: EXIT_OK,
        inputs: vec![digest("data", &s.data, ds.sha256)],
        outputs: vec![w.finish()?],
    })
}
