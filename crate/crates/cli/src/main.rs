use clap::{Args, Parser, Subcommand};
use floqdyn::commands::{self, Metric};
use floqdyn::config::{self, RunConfig, RunSource, SweepConfig};
use floqdyn::error::{CliError, Result, EXIT_OK};
use std::path::PathBuf;
use std::process::ExitCode;

/// Floquet-Lindblad and Floquet-Redfield simulations of driven few-level
/// systems between two thermal baths.
#[derive(Debug, Parser)]
#[command(name = "floqdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario; replaces the config's scenario.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory; overrides outputs.path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a config value by dotted path, e.g. scenario.drive.mu=0.2.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        RunSource {
            file: self.config.clone(),
            preset: self.preset.clone(),
            sets: self.sets.clone(),
        }
        .load()
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario; writes trajectory.csv and summary.json.
    Simulate(RunArgs),
    /// Floquet analysis of a driven scenario; writes floquet.json and
    /// fidelity.csv.
    Floquet(RunArgs),
    /// Run two scenarios and compare them; writes compare.csv and
    /// compare.json.
    Compare {
        /// Config of run A, then of run B (a single file serves both).
        #[arg(long, num_args = 1)]
        config: Vec<PathBuf>,
        /// Preset of run A, then of run B.
        #[arg(long, num_args = 1)]
        preset: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override applied to both runs.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Override applied to run B only.
        #[arg(long = "set-b", value_name = "KEY=VALUE")]
        sets_b: Vec<String>,
        #[arg(long, value_enum, default_value = "eta-series")]
        metric: Metric,
    },
    /// Run a parameter grid; writes sweep.csv and sweep.json.
    Sweep {
        /// JSON sweep config.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a sweep config value by dotted path, e.g. base.integration.t_final=100.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
}

fn compare_sources(
    configs: &[PathBuf],
    presets: &[String],
    sets: &[String],
    sets_b: &[String],
) -> Result<[RunSource; 2]> {
    if configs.len() > 2 || presets.len() > 2 {
        return Err(CliError::Config(
            "compare takes at most two configs and two presets".into(),
        ));
    }
    if configs.len().max(presets.len()) == 0 {
        return Err(CliError::Config(
            "compare needs --config or --preset".into(),
        ));
    }
    let pick = |k: usize| RunSource {
        file: configs.get(k).or(configs.first()).cloned(),
        preset: presets.get(k).or(presets.first()).cloned(),
        sets: sets
            .iter()
            .chain(if k == 1 { sets_b } else { &[] })
            .cloned()
            .collect(),
    };
    Ok([pick(0), pick(1)])
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate(args) => {
            let rc = args.load()?;
            let out = args.out.clone().unwrap_or_else(|| rc.outputs.path.clone());
            let s = commands::simulate(&rc, &out)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("eta = {} at t = {}", s.eta, s.t_final);
        }
        Command::Floquet(args) => {
            let rc = args.load()?;
            let out = args.out.clone().unwrap_or_else(|| rc.outputs.path.clone());
            let s = commands::floquet(&rc, &out)?;
            println!("quasienergies = {:?}", s.quasienergies);
            println!(
                "min propagator fidelity = {}, min periodicity fidelity = {}",
                s.min_propagator_fidelity, s.min_periodicity_fidelity
            );
        }
        Command::Compare {
            config,
            preset,
            out,
            sets,
            sets_b,
            metric,
        } => {
            let [a, b] = compare_sources(&config, &preset, &sets, &sets_b)?;
            let (a, b) = (a.load()?, b.load()?);
            let out = out.unwrap_or_else(|| a.outputs.path.clone());
            let s = commands::compare(&a, &b, metric, &out, &a.outputs.formats)?;
            println!(
                "eta_a = {}, eta_b = {}, relative gain = {}",
                s.eta_a, s.eta_b, s.relative_gain
            );
        }
        Command::Sweep { config, out, sets } => {
            let mut v = config::read_json(&config)?;
            for s in &sets {
                let (k, val) = config::parse_assignment(s)?;
                config::set_path(&mut v, &k, val)?;
            }
            let sc: SweepConfig = serde_json::from_value(v)
                .map_err(|e| CliError::Config(format!("sweep config: {e}")))?;
            let out = out.unwrap_or_else(|| sc.outputs.path.clone());
            let (rows, code) = commands::sweep(&sc, &out)?;
            for r in rows.iter().filter(|r| r.error_code != EXIT_OK) {
                eprintln!("point {:?} failed: {}", r.values, r.status);
            }
            println!(
                "{} of {} points succeeded",
                rows.iter().filter(|r| r.error_code == EXIT_OK).count(),
                rows.len()
            );
            return Ok(code);
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
