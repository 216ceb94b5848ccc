//! `covcp detect`: change-point estimation on a CSV sample.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{ensure, Context, Result};
use clap::Args;
use covcp_core::{center, detect_change, screening};

use crate::csv_io;
use crate::schema::{self, DetectReport};
use crate::RuleArgs;

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Input CSV: one observation per row, one coordinate per column,
    /// optional header.
    #[arg(long)]
    input: PathBuf,

    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    delimiter: char,

    #[command(flatten)]
    rule: RuleArgs,

    /// Seed for the bootstrap threshold.
    #[arg(long, default_value_t = covcp_core::DEFAULT_SEED)]
    seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the score curve as CSV (`split,score`).
    #[arg(long)]
    curve_out: Option<PathBuf>,

    /// Also write per-component screening statistics as CSV
    /// (`a,b,statistic`).
    #[arg(long)]
    screening_out: Option<PathBuf>,
}

pub fn run(args: &DetectArgs) -> Result<ExitCode> {
    ensure!(
        args.delimiter.is_ascii(),
        "--delimiter must be a single ASCII character"
    );
    let data = csv_io::read_matrix(&args.input, args.delimiter as u8)?;
    let cfg = args.rule.to_config(args.seed)?;
    let result = detect_change(&data, &cfg)?;

    let report = DetectReport::from_result(&result);
    let json = schema::to_json_pretty(&report)?;
    match &args.out {
        Some(path) => fs::write(path, json)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{json}"),
    }

    if let Some(path) = &args.curve_out {
        match &result.curve {
            Some(curve) => csv_io::write_curve(path, curve)?,
            None => eprintln!(
                "note: no components selected, so there is no score curve to write"
            ),
        }
    }
    if let Some(path) = &args.screening_out {
        let scores = screening(&center(&data))?;
        csv_io::write_screening(path, &scores)?;
    }

    Ok(ExitCode::SUCCESS)
}
