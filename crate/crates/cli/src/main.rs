use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpattern::experiments::{
    cmd_cluster_sweep, cmd_gold, cmd_pairwise_tau, cmd_pipeline, cmd_properties, cmd_stats,
    ExperimentError, RunConfig,
};

/// Pattern-based graph classification experiments.
#[derive(Debug, Parser)]
#[command(name = "gpattern", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat TOML file whose keys mirror the run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, `key=value` with the value in TOML syntax; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Mine, cluster, rank, select the top patterns and cross-validate.
    Pipeline,
    /// Representative count and F1 across clustering thresholds.
    ClusterSweep,
    /// Kendall tau between measure rankings and the resulting equivalence blocks.
    PairwiseTau,
    /// Shapley gold standard with RBO and F1 curves per measure.
    Gold,
    /// Exhaustive property checks for every measure.
    Properties,
    /// Graph dataset statistics.
    Stats,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// A TOML value, or the raw text as a string when it does not parse.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut table = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            text.parse::<toml::Table>()
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };
    for o in &cli.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects key=value, got {o:?}")))?;
        table.insert(k.trim().to_string(), parse_value(v.trim()));
    }
    let cfg: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Failure::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let out = cfg.output_dir.display();
    match cli.command {
        Command::Pipeline => {
            let s = cmd_pipeline(&cfg)?;
            println!(
                "{}: {} patterns, {} representatives, s = {}",
                s.dataset, s.n_patterns, s.n_representatives, s.s
            );
            for r in &s.results {
                println!("{:<10} f1 {:.4}", r.measure.to_string(), r.f1);
            }
        }
        Command::ClusterSweep => {
            for r in cmd_cluster_sweep(&cfg)? {
                println!(
                    "{:>6}% {:>6} representatives  f1 {:.4}",
                    r.threshold_pct, r.n_representatives, r.f1
                );
            }
        }
        Command::PairwiseTau => {
            let eb = cmd_pairwise_tau(&cfg)?;
            for b in &eb.blocks {
                println!(
                    "{}",
                    b.iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
            }
        }
        Command::Gold => {
            let g = cmd_gold(&cfg)?;
            println!("gold top 10: {:?}", g.gold.ranking.top(10));
            for (m, s) in &g.s_star {
                match s {
                    Some(p) => println!("{m:<10} matches gold at {p}%"),
                    None => println!("{m:<10} never matches gold"),
                }
            }
        }
        Command::Properties => {
            let p = cmd_properties(&cfg)?;
            println!(
                "{} checks, {} mismatches, {} unexplained",
                p.checks,
                p.mismatches.len(),
                p.unexplained.len()
            );
            for (m, prop) in &p.unexplained {
                println!("unexplained: {m} {prop}");
            }
        }
        Command::Stats => {
            for (name, st) in cmd_stats(&cfg)? {
                println!(
                    "{name}: {} graphs, {:.2} vertices, {:.2} edges",
                    st.n_graphs, st.avg_vertices, st.avg_edges
                );
            }
        }
    }
    println!("wrote {out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
