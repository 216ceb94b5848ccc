//! Command-line front end for covariance change-point detection.
//!
//! `detect` estimates a break from a CSV sample, `simulate` summarizes seeded
//! replications of a scenario, `table` reproduces whole simulation grids, and
//! `verify` diffs the fast statistics against brute-force references.
//!
//! Statistical outcomes are data, not process failures: `detect` exits 0 even
//! when no component survives screening. Nonzero exits mean IO or validation
//! errors, or, for `verify`, disagreement with the references.

mod csv_io;
mod detect;
mod schema;
mod simulate;
mod table;
mod verify;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use covcp_core::{Aggregation, DetectConfig, TauRule, ThresholdConfig};

#[derive(Debug, Parser)]
#[command(
    name = "covcp",
    version,
    about = "Locate a change point in the covariance structure of a multivariate sample"
)]
struct Cli {
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate a covariance change point from a CSV sample
    Detect(detect::DetectArgs),
    /// Run seeded replications of a scenario file and summarize the estimates
    Simulate(simulate::SimulateArgs),
    /// Reproduce a simulation summary grid over (case, dimension) cells
    Table(table::TableArgs),
    /// Compare the fast statistics against brute-force references
    Verify(verify::VerifyArgs),
}

/// Threshold and screening flags shared by the detection-running commands.
#[derive(Debug, Args)]
struct RuleArgs {
    /// Threshold rule: `bootstrap` or `theory:<C>`, where C scales
    /// max(ln p, ln n).
    #[arg(long, value_parser = parse_rule, default_value = "bootstrap")]
    tau_rule: RuleChoice,

    /// Bootstrap replicates; with more than one, the median of the
    /// per-replicate maxima becomes the threshold.
    #[arg(long, default_value_t = 1)]
    boot_replicates: u32,

    /// Score every component instead of screening first.
    #[arg(long)]
    skip_reduction: bool,

    /// Fall back to the full component set when the selection is empty.
    #[arg(long)]
    fallback_all: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum RuleChoice {
    Bootstrap,
    Theory { c: f64 },
}

fn parse_rule(text: &str) -> Result<RuleChoice, String> {
    if text == "bootstrap" {
        return Ok(RuleChoice::Bootstrap);
    }
    if let Some(raw) = text.strip_prefix("theory:") {
        let c: f64 = raw
            .parse()
            .map_err(|_| format!("cannot read {raw:?} as a threshold scale"))?;
        if !c.is_finite() || c <= 0.0 {
            return Err("threshold scale must be positive and finite".to_string());
        }
        return Ok(RuleChoice::Theory { c });
    }
    Err(format!(
        "unknown rule {text:?}; use `bootstrap` or `theory:<C>`"
    ))
}

impl RuleArgs {
    /// Pipeline configuration with the given bootstrap seed.
    fn to_config(&self, seed: u64) -> Result<DetectConfig> {
        anyhow::ensure!(
            self.boot_replicates >= 1,
            "--boot-replicates must be at least 1"
        );
        let tau_rule = match self.tau_rule {
            RuleChoice::Bootstrap => TauRule::Bootstrap(ThresholdConfig {
                replicates: self.boot_replicates,
                seed,
                aggregation: if self.boot_replicates > 1 {
                    Aggregation::MedianOfMaxima
                } else {
                    Aggregation::MaxOfSingle
                },
            }),
            RuleChoice::Theory { c } => TauRule::Theoretical { c },
        };
        Ok(DetectConfig {
            tau_rule,
            skip_reduction: self.skip_reduction,
            fallback_all: self.fallback_all,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()?;
    }
    match cli.command {
        Command::Detect(args) => detect::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Table(args) => table::run(&args),
        Command::Verify(args) => verify::run(&args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_parser_accepts_both_forms() {
        assert_eq!(parse_rule("bootstrap").unwrap(), RuleChoice::Bootstrap);
        assert_eq!(
            parse_rule("theory:5").unwrap(),
            RuleChoice::Theory { c: 5.0 }
        );
        assert!(parse_rule("theory:0").is_err());
        assert!(parse_rule("theory:abc").is_err());
        assert!(parse_rule("jackknife").is_err());
    }

    #[test]
    fn several_bootstrap_replicates_switch_to_the_median() {
        let args = RuleArgs {
            tau_rule: RuleChoice::Bootstrap,
            boot_replicates: 5,
            skip_reduction: false,
            fallback_all: false,
        };
        match args.to_config(9).unwrap().tau_rule {
            TauRule::Bootstrap(cfg) => {
                assert_eq!(cfg.replicates, 5);
                assert_eq!(cfg.seed, 9);
                assert_eq!(cfg.aggregation, Aggregation::MedianOfMaxima);
            }
            other => panic!("unexpected rule {other:?}"),
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
