//! `covcp verify`: diff the fast statistics against brute-force references.
//!
//! The references recompute every statistic by its defining nested sums, so
//! instances are kept small; the largest admissible sample size is capped by
//! `--max-n`.

use std::process::ExitCode;

use anyhow::{ensure, Result};
use clap::Args;
use covcp_core::{
    center, oracle, screening, split_contrast, substream, ComponentIndex, ComponentSeries,
    DataMatrix, Scenario, ScoreCurve, SelectionSet,
};

const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 50)]
    instances: u64,

    /// Largest sample size drawn for the brute-force checks.
    #[arg(long, default_value_t = 12)]
    max_n: usize,

    /// Seed for instance generation.
    #[arg(long, default_value_t = covcp_core::DEFAULT_SEED)]
    seed: u64,
}

fn rel_dev(fast: f64, slow: f64) -> f64 {
    (fast - slow).abs() / fast.abs().max(slow.abs()).max(1.0)
}

pub fn run(args: &VerifyArgs) -> Result<ExitCode> {
    ensure!(args.instances >= 1, "--instances must be at least 1");
    ensure!(
        args.max_n >= DataMatrix::MIN_ROWS,
        "--max-n must be at least {}",
        DataMatrix::MIN_ROWS
    );

    let mut worst_screening = 0.0f64;
    let mut worst_score = 0.0f64;
    let mut worst_contrast = 0.0f64;
    for i in 0..args.instances {
        let n = DataMatrix::MIN_ROWS + (i as usize) % (args.max_n - DataMatrix::MIN_ROWS + 1);
        let p = 2 + (i as usize) % 3;
        let case = (i % 4) as u8 + 1;
        let scenario = Scenario::standard_case(case, n, p, n / 2)?;
        let data = scenario.sample_dataset(&mut substream(args.seed, &[i]))?;
        let centered = center(&data);

        let fast = screening(&centered)?;
        let slow = oracle::naive_screening(&centered)?;
        for (f, s) in fast.values().iter().zip(slow.values()) {
            worst_screening = worst_screening.max(rel_dev(*f, *s));
        }

        let everything = SelectionSet::full(p);
        let curve = ScoreCurve::compute(&centered, &everything)?;
        let first = ComponentSeries::compute(&centered, ComponentIndex::new(1, 1, p)?)?;
        for k in 2..=n - 2 {
            let fast_score = curve.value_at(k).expect("k is in range");
            let slow_score = oracle::naive_score(&centered, &everything, k)?;
            worst_score = worst_score.max(rel_dev(fast_score, slow_score));

            let fast_contrast = split_contrast(&first, k)?;
            let slow_contrast = oracle::naive_contrast(&centered, 1, 1, k)?;
            worst_contrast = worst_contrast.max(rel_dev(fast_contrast, slow_contrast));
        }
    }

    println!(
        "{} instances, n in [{}, {}], p in [2, 4], seed {}",
        args.instances,
        DataMatrix::MIN_ROWS,
        args.max_n,
        args.seed
    );
    println!("screening statistic  max relative deviation {worst_screening:.3e}");
    println!("change score         max relative deviation {worst_score:.3e}");
    println!("split contrast       max relative deviation {worst_contrast:.3e}");

    let worst = worst_screening.max(worst_score).max(worst_contrast);
    if worst <= TOLERANCE {
        println!("ok: all statistics within {TOLERANCE:.0e} of the references");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAILED: tolerance {TOLERANCE:.0e} exceeded");
        Ok(ExitCode::FAILURE)
    }
}
