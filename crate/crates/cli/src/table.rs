//! `covcp table`: reproduce a whole simulation summary grid.

use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, ValueEnum};
use covcp_core::{derive_seed, run_replications, DetectConfig, ReplicationReport, Scenario};

/// Dimensions covered by every preset.
const DIMS: [usize; 6] = [5, 20, 60, 200, 300, 500];

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Which summary grid to reproduce.
    #[arg(long, value_enum)]
    preset: Preset,

    /// Replicates per cell.
    #[arg(long, default_value_t = 200)]
    replicates: u32,

    /// Master seed; each (case, dimension) cell derives its own stream.
    #[arg(long, default_value_t = covcp_core::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// n = 100, cases 1-4, bootstrap threshold
    Table1,
    /// n = 200, cases 1-4, bootstrap threshold
    Table2,
    /// n = 200, cases 1 and 3, no screening stage
    Table3,
}

struct Grid {
    n: usize,
    k0: usize,
    cases: &'static [u8],
    skip_reduction: bool,
}

impl Preset {
    fn grid(self) -> Grid {
        match self {
            Preset::Table1 => Grid {
                n: 100,
                k0: 50,
                cases: &[1, 2, 3, 4],
                skip_reduction: false,
            },
            Preset::Table2 => Grid {
                n: 200,
                k0: 100,
                cases: &[1, 2, 3, 4],
                skip_reduction: false,
            },
            Preset::Table3 => Grid {
                n: 200,
                k0: 100,
                cases: &[1, 3],
                skip_reduction: true,
            },
        }
    }
}

fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.4}"),
        None => "--".to_string(),
    }
}

fn print_row(label: &str, values: &[String]) {
    print!("{label:<6}");
    for value in values {
        print!(" {value:>8}");
    }
    println!();
}

pub fn run(args: &TableArgs) -> Result<ExitCode> {
    let grid = args.preset.grid();
    println!(
        "n = {}, change at row {}, {} replicates per cell{}",
        grid.n,
        grid.k0,
        args.replicates,
        if grid.skip_reduction {
            ", no screening stage"
        } else {
            ""
        }
    );
    let cfg = if grid.skip_reduction {
        DetectConfig::without_reduction()
    } else {
        DetectConfig::default()
    };

    for &case in grid.cases {
        let mut reports: Vec<ReplicationReport> = Vec::with_capacity(DIMS.len());
        for &p in &DIMS {
            let scenario = Scenario::standard_case(case, grid.n, p, grid.k0)?;
            let cell_seed = derive_seed(args.seed, &[u64::from(case), p as u64]);
            eprintln!("running case {case}, p = {p} ...");
            reports.push(run_replications(&scenario, args.replicates, cell_seed, &cfg)?);
        }

        println!();
        println!("case {case}");
        let column = |f: &dyn Fn(&ReplicationReport) -> String| -> Vec<String> {
            reports.iter().map(f).collect()
        };
        print_row("p", &DIMS.map(|p| p.to_string()));
        print_row("mean", &column(&|r| cell(r.mean())));
        print_row("std", &column(&|r| cell(r.std_dev())));
        print_row("mse", &column(&|r| cell(r.mse())));
        if reports.iter().any(|r| r.n_no_detection() > 0) {
            print_row("none", &column(&|r| r.n_no_detection().to_string()));
        }
    }

    Ok(ExitCode::SUCCESS)
}
