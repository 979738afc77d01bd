//! `ecod` command-line tool.
//!
//! Exit status: 0 on success, 1 for invalid arguments or bad data, 2 for
//! file-system failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const FORMATS_HELP: &str = "\
FILE FORMATS:
  CSV input    UTF-8, comma separated, '.' decimal point, one sample per row.
               Use --header when the first row holds column names and
               --label-column (index, name or 'last') for a 0/1 or no/yes
               ground-truth column, which is never used as a feature.
  ARFF input   Files ending in .arff: numeric/real/integer attributes plus
               one nominal label attribute (--label-attribute, default
               'outlier'); 'yes', 'outlier' and 'anomaly' mean outlier.
  Model        JSON: {format, version, scalar, n_train, d, prob_floor,
               column_names?, dimensions: [{skewness, sorted_values}]}.
  Scores       CSV: row,final,left_only,right_only,auto.
  Explanation  JSON: {sample, variant, final_score, band_percentile,
               dimensions: [{dim, name, score, band, flagged}]}.
  Eval         CSV: dataset,variant,trial,roc,ap,seed (trial 'mean' rows
               hold the averages); .md gives summary tables; .json the raw
               results.
  Bench        CSV: n,d,workers,fit_s,score_s,total_s,checksum,status.

EXIT STATUS:
  0 success, 1 invalid arguments or data, 2 I/O failure.";

/// Sample counts by dimension counts of the published runtime table.
pub(crate) const DEFAULT_GRID: &str = "1000,10000,100000,1000000x10,100,1000,10000";

#[derive(Debug, Parser)]
#[command(name = "ecod", version, about = "Empirical-CDF outlier detection", after_help = FORMATS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model on a dataset and save it.
    Fit(FitArgs),
    /// Score a dataset with a saved model.
    Score(ScoreArgs),
    /// Per-dimension explanation of one sample's score.
    Explain(ExplainArgs),
    /// Repeated train/test evaluation with ROC-AUC and average precision.
    Eval(EvalArgs),
    /// Runtime over a grid of synthetic dataset sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input dataset (.csv or .arff).
    #[arg(long, short)]
    input: PathBuf,
    /// The CSV's first row is a header.
    #[arg(long)]
    header: bool,
    /// CSV label column to drop or use: index, header name, or `last`.
    #[arg(long)]
    label_column: Option<String>,
    /// Nominal ARFF attribute holding the labels.
    #[arg(long, default_value = "outlier")]
    label_attribute: String,
    /// ARFF attributes to ignore (repeatable), e.g. row ids.
    #[arg(long)]
    ignore_attribute: Vec<String>,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Where to write the model.
    #[arg(long, short)]
    model: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long, short)]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// left, right, both, auto or ecod.
    #[arg(long, default_value = "ecod")]
    variant: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, short)]
    output: PathBuf,
    /// Overrides the format implied by the output extension.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[arg(long, short)]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Row of the input to explain (0-based).
    #[arg(long)]
    sample: usize,
    /// Percentile of each dimension's scores used as the reference band.
    #[arg(long, default_value_t = 0.99)]
    band: f64,
    #[arg(long, default_value = "ecod")]
    variant: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Labeled datasets (.csv or .arff); repeatable.
    #[arg(long, short, required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    header: bool,
    /// CSV label column: index, header name, or `last`.
    #[arg(long, default_value = "last")]
    label_column: String,
    #[arg(long, default_value = "outlier")]
    label_attribute: String,
    #[arg(long)]
    ignore_attribute: Vec<String>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0.6)]
    train_frac: f64,
    /// Comma-separated variants.
    #[arg(long, default_value = "left,right,both,ecod")]
    variants: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `NS x DS` with comma-separated sizes, e.g. `1000,10000x10,100`.
    #[arg(long, default_value = DEFAULT_GRID)]
    grid: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Skip cells estimated to need more bytes than this (default: 75% of RAM).
    #[arg(long)]
    memory_limit: Option<u64>,
    /// Skip the untimed warm-up run per cell.
    #[arg(long)]
    no_warmup: bool,
    #[arg(long, short)]
    output: PathBuf,
    /// Also write `n,d,workers,phase,seconds` rows for plotting.
    #[arg(long)]
    long_output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Score(a) => commands::score(a),
        Command::Explain(a) => commands::explain(a),
        Command::Eval(a) => commands::eval(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
