//! `covcp simulate`: seeded replications of one scenario.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use covcp_core::{run_replications, TauRule};

use crate::csv_io;
use crate::schema::{self, ScenarioFile, SimulationReport, TauRuleReport};
use crate::RuleArgs;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario description (JSON; see the README for the schema).
    #[arg(long)]
    scenario: PathBuf,

    /// Number of replicates.
    #[arg(long, default_value_t = 200)]
    replicates: u32,

    #[command(flatten)]
    rule: RuleArgs,

    /// Master seed; each replicate derives its own streams from it.
    #[arg(long, default_value_t = covcp_core::DEFAULT_SEED)]
    seed: u64,

    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the detected estimates (one per line) for external
    /// histogramming.
    #[arg(long)]
    dump_estimates: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.scenario)
        .with_context(|| format!("cannot read {}", args.scenario.display()))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .with_context(|| format!("invalid scenario {}", args.scenario.display()))?;
    let scenario = file.into_scenario()?;

    let cfg = args.rule.to_config(args.seed)?;
    let report = run_replications(&scenario, args.replicates, args.seed, &cfg)?;

    let rule = match &cfg.tau_rule {
        TauRule::Bootstrap(boot) => TauRuleReport {
            rule: "bootstrap".to_string(),
            replicates: Some(boot.replicates),
            seed: None,
            aggregation: None,
            degenerate_profile: None,
            c: None,
        },
        TauRule::Theoretical { c } => TauRuleReport {
            rule: "theory".to_string(),
            replicates: None,
            seed: None,
            aggregation: None,
            degenerate_profile: None,
            c: Some(*c),
        },
    };
    let summary =
        SimulationReport::new(&scenario, &report, args.seed, cfg.skip_reduction, rule);
    let json = schema::to_json_pretty(&summary)?;
    match &args.out {
        Some(path) => fs::write(path, json)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{json}"),
    }

    if let Some(path) = &args.dump_estimates {
        csv_io::write_estimates(path, report.estimates())?;
    }

    Ok(ExitCode::SUCCESS)
}
