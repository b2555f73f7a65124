mod cli;
mod commands;
mod config;
mod data;
mod error;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use cli::{Cli, Command};
use config::{
    resolve_out_dir, AnalyzeSettings, AppTestSettings, ConfigFile, DataSettings, MonitorSettings, PowerSettings,
    Resolved, SimulateNullSettings,
};
use error::{CliError, EXIT_USAGE};
use output::{RunManifest, Timings};

fn resolve(command: &Command, cfg: &ConfigFile) -> Result<Resolved, CliError> {
    Ok(match command {
        Command::SimulateNull(a) => Resolved::SimulateNull(SimulateNullSettings::resolve(a, cfg)?),
        Command::Power(a) => Resolved::Power(PowerSettings::resolve(a, cfg)?),
        Command::Analyze(a) => Resolved::Analyze(AnalyzeSettings::resolve(a, cfg)?),
        Command::AppTest(a) => Resolved::AppTest(AppTestSettings::resolve(a, cfg)?),
        Command::Monitor(a) => Resolved::Monitor(MonitorSettings::resolve(a, cfg)?),
        Command::Validate(a) => Resolved::Validate(DataSettings::resolve(a, cfg)?),
        Command::Replay { manifest } => {
            let m = RunManifest::read(manifest)?;
            check_inputs(&m)?;
            m.resolved
        }
    })
}

/// Refuse to replay against a data file whose contents changed.
fn check_inputs(m: &RunManifest) -> Result<(), CliError> {
    for i in &m.inputs {
        if i.path == "-" {
            return Err(CliError::usage("the recorded run read draws from standard input and cannot be replayed"));
        }
        let bytes = std::fs::read(&i.path).map_err(|e| CliError::data(format!("cannot read {}: {e}", i.path)))?;
        if data::sha256_hex(&bytes) != i.sha256 {
            return Err(CliError::data(format!("{} changed since the recorded run", i.path)));
        }
    }
    Ok(())
}

fn seed_of(r: &Resolved) -> Option<u64> {
    match r {
        Resolved::SimulateNull(s) => Some(s.seed),
        Resolved::Power(s) => Some(s.seed),
        Resolved::Analyze(s) => Some(s.seed),
        Resolved::AppTest(s) => Some(s.seed),
        Resolved::Monitor(s) => Some(s.seed),
        Resolved::Validate(_) => None,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    let threads = cfg.pick_opt(cli.threads, "threads")?;
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(format!("--threads: {e}")))?;
    }
    let out = resolve_out_dir(cli.out.clone(), &cfg)?;
    let resolved = resolve(&cli.command, &cfg)?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;

    let outcome = commands::execute(&resolved, &out)?;
    let manifest = RunManifest {
        tool: "bayeschi".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: seed_of(&resolved),
        resolved,
        threads,
        inputs: outcome.inputs,
        outputs: outcome.outputs,
        exit_code: outcome.code,
        timings: Timings {
            started_unix_ms,
            elapsed_ms: started.elapsed().as_millis(),
        },
    };
    manifest.write(Path::new(&out))?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
