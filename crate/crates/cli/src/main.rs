use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, ValueEnum};
use slopebound::data::{CovariateSelection, InteractionSpec};
use slopebound_cli::{run, Mode, OutputFormat, RunConfig, EXIT_INPUT};

/// Exact minimum and maximum of an adjusted regression slope over every
/// subset of candidate covariates.
#[derive(Debug, Parser)]
#[command(name = "slopebound", version)]
struct Args {
    /// Comma-separated input file with a header row.
    #[arg(long, value_name = "PATH")]
    data: PathBuf,

    /// Response column.
    #[arg(long, value_name = "LABEL")]
    y: String,

    /// Explanatory column whose slope is bounded.
    #[arg(long, value_name = "LABEL")]
    x: String,

    /// Candidate covariate columns. Takes precedence over --all-others.
    #[arg(long, value_delimiter = ',', value_name = "L1,L2,...")]
    covariates: Option<Vec<String>>,

    /// Use every column other than --y and --x as a covariate.
    #[arg(long)]
    all_others: bool,

    /// Covariates whose pairwise products are added as extra covariates.
    #[arg(long, value_delimiter = ',', value_name = "L1,L2,...")]
    interactions: Option<Vec<String>>,

    /// Skip the product of this pair; repeatable.
    #[arg(long = "exclude-pair", value_name = "A:B")]
    exclude_pairs: Vec<String>,

    #[arg(long, value_enum, default_value_t = ModeArg::Bb)]
    mode: ModeArg,

    /// Stop after popping this many nodes and report a partial result.
    #[arg(long, value_name = "N")]
    node_budget: Option<u64>,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Compare the root envelope against an N×N grid evaluation.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(2..))]
    grid_check: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Bb,
    Bf,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

fn config(args: Args) -> Result<RunConfig> {
    let covariates = match (args.covariates, args.all_others) {
        (Some(list), _) => {
            CovariateSelection::Explicit(list.into_iter().filter(|l| !l.is_empty()).collect())
        }
        (None, true) => CovariateSelection::AllOthers,
        (None, false) => CovariateSelection::Explicit(Vec::new()),
    };
    let interactions = match args.interactions {
        Some(base) => {
            let mut spec = InteractionSpec::new(base);
            for pair in &args.exclude_pairs {
                let Some((a, b)) = pair.split_once(':') else {
                    bail!("--exclude-pair expects A:B, got '{pair}'");
                };
                spec = spec.exclude(a, b);
            }
            Some(spec)
        }
        None if !args.exclude_pairs.is_empty() => {
            bail!("--exclude-pair requires --interactions")
        }
        None => None,
    };
    Ok(RunConfig {
        data_path: args.data,
        y_col: args.y,
        x_col: args.x,
        covariates,
        interactions,
        mode: match args.mode {
            ModeArg::Bb => Mode::Bb,
            ModeArg::Bf => Mode::Bf,
            ModeArg::Both => Mode::Both,
        },
        node_budget: args.node_budget,
        output_format: match args.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Text => OutputFormat::Text,
        },
        grid_check: args.grid_check.map(|g| g as usize),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(&config) {
        Ok(report) => {
            print!("{}", report.render(config.output_format));
            if report.is_partial() {
                eprintln!("warning: node budget reached; bounds cover only the nodes visited");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
