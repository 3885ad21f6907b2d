//! Benchmark CLI: run experiments, search allocation curves, compare the
//! proposed method against the baseline, and generate synthetic inputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pomcp_budget::env::{export_truth_slices, generate_dataset, SliceLattice};
use pomcp_budget::harness::{compare_baseline, grid_search, run_experiment, ExperimentConfig};
use pomcp_budget::AllocationCurve;

#[derive(Parser)]
#[command(
    name = "pomcp-budget",
    version,
    about = "Budget-aware POMCP planning benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured method over one or more seeds and write episode
    /// logs plus a summary CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seed list overriding the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Output directory for CSVs (default: out/).
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate all 49 beta allocation curves and rank them by mean final
    /// cumulative reward.
    GridSearch {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Baseline (even split + UCT + single-step) versus the proposed
    /// method (beta curve + UGapEb + Welch commitment) on shared seeds.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate a synthetic static survey dataset CSV.
    GenDataset {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export time slices of the analytic dynamic field for inspection.
    ExportTruth {
        /// Keep only lattice points with value >= threshold (0 keeps all).
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> pomcp_budget::Result<()> {
    match cli.command {
        Command::Run { config, seeds, out } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
            }
            let summary = run_experiment(&cfg, Some(&out), "run")?;
            println!(
                "{} seeds: mean final reward {:.4} (std {:.4}), mean rollouts {:.1}, wall {:.1} ms",
                summary.episodes.len(),
                summary.mean_reward,
                summary.std_reward,
                summary.mean_rollouts,
                summary.total_wall_ms
            );
            println!("wrote episode logs and summary.csv to {}", out.display());
            Ok(())
        }
        Command::GridSearch { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let ranked = grid_search(&cfg, Some(&out))?;
            println!("rank  alpha  beta   mean_final_reward");
            for (rank, (curve, reward)) in ranked.iter().enumerate().take(10) {
                let AllocationCurve::Beta { alpha, beta } = curve else {
                    continue;
                };
                println!("{:>4}  {:>5}  {:>4}   {:.4}", rank + 1, alpha, beta, reward);
            }
            println!("full ranking in {}", out.join("grid_search.csv").display());
            Ok(())
        }
        Command::Compare { config, out } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let report = compare_baseline(&cfg, Some(&out))?;
            let b = &report.baseline;
            let p = &report.proposed;
            println!(
                "baseline: reward {:.4} (std {:.4}), rollouts {:.1}, wall {:.1} ms",
                b.mean_reward, b.std_reward, b.mean_rollouts, b.total_wall_ms
            );
            println!(
                "proposed: reward {:.4} (std {:.4}), rollouts {:.1}, wall {:.1} ms",
                p.mean_reward, p.std_reward, p.mean_rollouts, p.total_wall_ms
            );
            println!("side-by-side CSVs in {}", out.display());
            Ok(())
        }
        Command::GenDataset { out, seed } => {
            let rows = generate_dataset(&out, seed)?;
            println!("wrote {rows} rows to {}", out.display());
            Ok(())
        }
        Command::ExportTruth { threshold, out } => {
            let truth = pomcp_budget::GroundTruth::AnalyticDynamic;
            let rows = export_truth_slices(&truth, threshold, &out, SliceLattice::default())?;
            println!("wrote {rows} rows to {}", out.display());
            Ok(())
        }
    }
}
