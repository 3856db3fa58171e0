//! Command-line front end: single runs, experiment sweeps, the complexity
//! report, and the verification suite.
//!
//! Configuration precedence, lowest to highest: built-in defaults, config
//! file (`--config`, or the `CUSBF_CONFIG` environment variable), then
//! individual `--set key=value` flags.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cusbf::acceptance;
use cusbf::config::ScenarioConfig;
use cusbf::metrics::monte_carlo;
use cusbf::scheduling::Scheme;
use cusbf::sweep::{complexity_report, run_sweep, SweepSpec, SweepVariable};

/// Environment variable holding the default config file path.
const CONFIG_ENV: &str = "CUSBF_CONFIG";

#[derive(Parser)]
#[command(
    name = "cusbf",
    about = "Correlation-based user scheduling and beamforming simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines; keys match the scenario field
    /// names. Falls back to $CUSBF_CONFIG when omitted.
    #[arg(long)]
    config: Option<std::path::PathBuf>,

    /// Override one scenario field, e.g. `--set m=128`. Repeatable;
    /// applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ScenarioConfig, String> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(Into::into));
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                ScenarioConfig::from_kv_text(&text).map_err(|e| e.to_string())?
            }
            None => ScenarioConfig::default(),
        };
        for item in &self.sets {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("--set expects KEY=VALUE, got `{item}`"))?;
            cfg.set_field(key.trim(), value).map_err(|e| e.to_string())?;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one Monte Carlo experiment for a single scheme and print the
    /// aggregate report.
    Run {
        #[command(flatten)]
        config: ConfigArgs,

        /// Scheme to evaluate: CUSBF, GWC, or JSDM.
        #[arg(long, default_value = "CUSBF")]
        scheme: String,
    },
    /// Sweep one variable over a value list and emit CSV on stdout.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,

        /// Variable to sweep: epsilon, K, K_s, power_dBm, or M.
        #[arg(long)]
        variable: String,

        /// Comma-separated ascending values, e.g. `0.1,0.2,0.3`.
        #[arg(long)]
        values: String,

        /// Comma-separated schemes (default: all three).
        #[arg(long, default_value = "CUSBF,GWC,JSDM")]
        schemes: String,

        /// Write the CSV to a file instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Print the complexity table and measured scaling trends.
    Complexity {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the verification suite; one pass/fail line per criterion.
    Check,
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| Scheme::parse(t).ok_or_else(|| format!("unknown scheme `{t}`")))
        .collect()
}

fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad value `{t}`")))
        .collect()
}

fn real_main() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, scheme } => {
            let cfg = config.resolve()?;
            let scheme =
                Scheme::parse(&scheme).ok_or_else(|| format!("unknown scheme `{scheme}`"))?;
            let report = monte_carlo(&cfg, scheme).map_err(|e| e.to_string())?;
            println!("scheme:             {}", report.scheme);
            println!("drops:              {}", report.drops);
            println!("seed:               {}", report.seed);
            println!("sum rate mean:      {:.4} bits/s/Hz", report.sum_rate_mean);
            println!("sum rate stderr:    {:.4}", report.sum_rate_stderr);
            println!("per-user rate mean: {:.4} bits/s/Hz", report.per_user_rate_mean);
            println!("served users mean:  {:.2}", report.n_selected_mean);
            Ok(())
        }
        Command::Sweep {
            config,
            variable,
            values,
            schemes,
            out,
        } => {
            let base = config.resolve()?;
            let variable = SweepVariable::parse(&variable)
                .ok_or_else(|| format!("unknown sweep variable `{variable}`"))?;
            let spec = SweepSpec {
                variable,
                values: parse_values(&values)?,
                schemes: parse_schemes(&schemes)?,
                base,
            };
            let csv = run_sweep(&spec).map_err(|e| e.to_string())?;
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Complexity { config } => {
            let cfg = config.resolve()?;
            let report = complexity_report(&cfg).map_err(|e| e.to_string())?;
            print!("{report}");
            Ok(())
        }
        Command::Check => {
            let results = acceptance::run_all();
            let mut failed = 0;
            for r in &results {
                println!("{}", r.line());
                if !r.passed {
                    failed += 1;
                }
            }
            if failed > 0 {
                Err(format!("{failed} of {} criteria failed", results.len()))
            } else {
                println!("all {} criteria passed", results.len());
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
