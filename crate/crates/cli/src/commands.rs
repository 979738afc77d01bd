use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ecod::bench::{self, GridOptions};
use ecod::dataset::{load_arff, load_csv, ArffOptions, CsvOptions, LabelColumn, SplitSpec};
use ecod::eval::{markdown_summary, run_trials, write_results_csv};
use ecod::scoring::{explain as explain_sample, score_with_workers};
use ecod::{Dataset, EcdfModel, Error, LabeledDataset, Result, Variant};
use serde::Serialize;

use crate::{BenchArgs, EvalArgs, ExplainArgs, FitArgs, Format, InputArgs, ScoreArgs};

fn is_arff(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("arff"))
}

fn load_labeled(
    path: &Path,
    header: bool,
    label_column: &str,
    label_attribute: &str,
    ignore: &[String],
) -> Result<LabeledDataset> {
    if is_arff(path) {
        let mut opts = ArffOptions::new(label_attribute);
        opts.ignore_attributes = ignore.to_vec();
        load_arff(path, &opts)
    } else {
        let opts = CsvOptions {
            has_header: header,
            label_column: Some(label_column.parse().expect("infallible")),
        };
        load_csv(path, &opts)?.into_labeled()
    }
}

fn load_features(a: &InputArgs) -> Result<Dataset> {
    if is_arff(&a.input) {
        let mut opts = ArffOptions::new(a.label_attribute.clone());
        opts.ignore_attributes = a.ignore_attribute.clone();
        return Ok(load_arff(&a.input, &opts)?.data);
    }
    let opts = CsvOptions {
        has_header: a.header,
        label_column: a
            .label_column
            .as_deref()
            .map(|s| s.parse::<LabelColumn>().expect("infallible")),
    };
    Ok(load_csv(&a.input, &opts)?.into_dataset())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Serialization(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_at(path))
}

/// Explicit `--format`, else the output extension, else `fallback`.
fn output_format(path: &Path, explicit: Option<Format>, fallback: Format) -> Format {
    explicit.unwrap_or_else(|| {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some("md") => Format::Md,
            _ => fallback,
        }
    })
}

fn check_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::InvalidArgument("--workers must be >= 1".into()));
    }
    Ok(())
}

fn reject_format(cmd: &str, format: Format) -> Result<()> {
    Err(Error::InvalidArgument(format!(
        "`{cmd}` cannot write {format:?} output"
    )))
}

pub fn fit(a: FitArgs) -> Result<()> {
    check_workers(a.workers)?;
    let data = load_features(&a.input)?;
    let model = EcdfModel::fit_with_workers(&data, a.workers)?;
    model.save(&a.model)?;

    let left = model.dims().iter().filter(|d| d.use_left_tail()).count();
    println!(
        "n={} d={} left-tail dims={} right-tail dims={}",
        model.n_train(),
        model.d(),
        left,
        model.d() - left
    );
    for (j, dm) in model.dims().iter().enumerate() {
        println!(
            "  {:>4} {:<20} skewness={:+.6} tail={}",
            j,
            data.column_name(j),
            dm.skewness(),
            if dm.use_left_tail() { "left" } else { "right" }
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ScoreJson<'a> {
    variant: Variant,
    #[serde(rename = "final")]
    final_scores: &'a [f64],
    left_only: &'a [f64],
    right_only: &'a [f64],
    auto: &'a [f64],
}

pub fn score(a: ScoreArgs) -> Result<()> {
    let variant: Variant = a.variant.parse()?;
    check_workers(a.workers)?;
    let format = output_format(&a.output, a.format, Format::Csv);
    if format == Format::Md {
        return reject_format("score", format);
    }
    let model = EcdfModel::load(&a.model)?;
    let data = load_features(&a.input)?;
    let report = score_with_workers(&model, &data, variant, a.workers)?;
    match format {
        Format::Json => write_json(
            &a.output,
            &ScoreJson {
                variant,
                final_scores: report.final_scores(),
                left_only: report.left_only(),
                right_only: report.right_only(),
                auto: report.auto(),
            },
        ),
        _ => {
            let w = create(&a.output)?;
            report.write_csv(w).map_err(io_at(&a.output))
        }
    }
}

pub fn explain(a: ExplainArgs) -> Result<()> {
    let variant: Variant = a.variant.parse()?;
    check_workers(a.workers)?;
    if !(a.band > 0.0 && a.band < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "--band must lie in (0, 1), got {}",
            a.band
        )));
    }
    let format = output_format(&a.output, a.format, Format::Json);
    if format == Format::Md {
        return reject_format("explain", format);
    }
    let model = EcdfModel::load(&a.model)?;
    let data = load_features(&a.input)?;
    let report = score_with_workers(&model, &data, variant, a.workers)?;
    let e = explain_sample(&report, a.sample, a.band)?;
    match format {
        Format::Csv => {
            let mut w = create(&a.output)?;
            let io = io_at(&a.output);
            writeln!(w, "dim,name,score,band,flagged").map_err(&io)?;
            for d in &e.dimensions {
                writeln!(w, "{},{},{},{},{}", d.dim, d.name, d.score, d.band, d.flagged).map_err(&io)?;
            }
            w.flush().map_err(io)
        }
        _ => write_json(&a.output, &e),
    }
}

fn parse_variants(list: &str) -> Result<Vec<Variant>> {
    let vs: Vec<Variant> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if vs.is_empty() {
        return Err(Error::InvalidArgument("--variants is empty".into()));
    }
    Ok(vs)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Serialize)]
struct EvalJson<'a> {
    seed: u64,
    trials: usize,
    train_fraction: f64,
    results: &'a [ecod::eval::EvalResult],
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let variants = parse_variants(&a.variants)?;
    check_workers(a.workers)?;
    let spec = SplitSpec {
        train_fraction: a.train_frac,
        seed: a.seed,
        trial_count: a.trials,
    };
    spec.validate()?;
    let format = output_format(&a.output, a.format, Format::Csv);

    let mut results = Vec::new();
    for path in &a.input {
        let ds = load_labeled(
            path,
            a.header,
            &a.label_column,
            &a.label_attribute,
            &a.ignore_attribute,
        )?;
        results.extend(run_trials(&dataset_name(path), &ds, &spec, &variants, a.workers)?);
    }

    let summary = markdown_summary(&results, &spec);
    match format {
        Format::Csv => {
            let w = create(&a.output)?;
            write_results_csv(w, &results, spec.seed).map_err(io_at(&a.output))?;
        }
        Format::Md => {
            let mut w = create(&a.output)?;
            w.write_all(summary.as_bytes())
                .and_then(|_| w.flush())
                .map_err(io_at(&a.output))?;
        }
        Format::Json => write_json(
            &a.output,
            &EvalJson {
                seed: spec.seed,
                trials: spec.trial_count,
                train_fraction: spec.train_fraction,
                results: &results,
            },
        )?,
    }
    print!("{summary}");
    Ok(())
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim().replace('_', "");
            t.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad grid size `{t}`")))
        })
        .collect()
}

/// `NS x DS`, e.g. `1000,10000x10,100`.
pub(crate) fn parse_grid(grid: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let (ns, ds) = grid
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::InvalidArgument(format!("grid `{grid}` is not of the form NSxDS")))?;
    Ok((parse_sizes(ns)?, parse_sizes(ds)?))
}

pub fn bench(a: BenchArgs) -> Result<()> {
    check_workers(a.workers)?;
    let (ns, ds) = parse_grid(&a.grid)?;
    let mut opts = GridOptions::new(a.workers, a.seed);
    if let Some(limit) = a.memory_limit {
        opts.memory_limit_bytes = limit;
    }
    opts.warmup = !a.no_warmup;

    let outcomes = bench::run_grid(&ns, &ds, &opts)?;
    for o in &outcomes {
        if let bench::BenchOutcome::Skipped { n, d, needed_bytes, limit_bytes } = o {
            eprintln!("warning: skipped {n}x{d}: needs ~{needed_bytes} bytes, limit {limit_bytes}");
        }
    }
    let w = create(&a.output)?;
    bench::write_grid_csv(w, &outcomes).map_err(io_at(&a.output))?;
    if let Some(long) = &a.long_output {
        let w = create(long)?;
        bench::write_long_csv(w, &outcomes).map_err(io_at(long))?;
    }
    println!("seed={} workers={} cells={}", a.seed, a.workers, outcomes.len());
    Ok(())
}
