//! Repeated train/test evaluation with ROC-AUC and average precision.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::dataset::{split, split_with_seed, trial_seed, Dataset, LabeledDataset, SplitSpec};
use crate::ecdf::EcdfModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scoring::{score_with_workers, Variant};

/// Redraws allowed per trial when the test part lacks a class.
pub const SPLIT_RETRY_CAP: u32 = 100;

fn check_inputs<T>(scores: &[T], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    Ok(())
}

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("scores are not NaN")
}

/// Area under the ROC curve as the Mann-Whitney statistic: the probability
/// that a random outlier outscores a random inlier, ties counting one half.
/// Computed from mid-ranks.
pub fn roc_auc<T: Scalar>(scores: &[T], labels: &[bool]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| cmp(&scores[a], &scores[b]));

    // Twice the rank sum keeps mid-ranks integral.
    let mut twice_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Ranks start+1..=end share the mid-rank (start + 1 + end) / 2.
        let twice_mid = (start + 1 + end) as u128;
        let tied_pos = order[start..end].iter().filter(|&&i| labels[i]).count() as u128;
        twice_rank_sum += twice_mid * tied_pos;
        start = end;
    }
    let (p, q) = (pos as u128, neg as u128);
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2 * p * q) as f64)
}

/// Average precision, `Σ_k (R_k - R_{k-1}) P_k`, over the ranking by
/// descending score. Equal scores keep their input order.
pub fn average_precision<T: Scalar>(scores: &[T], labels: &[bool]) -> Result<f64> {
    check_inputs(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 {
        return Err(Error::InvalidArgument(
            "average precision needs at least one outlier".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| cmp(&scores[b], &scores[a]).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut total = 0.0;
    for (k, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            total += hits as f64 / (k + 1) as f64;
        }
    }
    Ok(total / pos as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub trial: usize,
    pub roc: f64,
    pub ap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalResult {
    pub dataset_name: String,
    pub variant: Variant,
    pub per_trial: Vec<TrialMetrics>,
    pub mean_roc: f64,
    pub mean_ap: f64,
}

impl EvalResult {
    fn from_trials(dataset_name: &str, variant: Variant, per_trial: Vec<TrialMetrics>) -> Self {
        let k = per_trial.len() as f64;
        let mean_roc = per_trial.iter().map(|t| t.roc).sum::<f64>() / k;
        let mean_ap = per_trial.iter().map(|t| t.ap).sum::<f64>() / k;
        Self {
            dataset_name: dataset_name.to_string(),
            variant,
            per_trial,
            mean_roc,
            mean_ap,
        }
    }
}

/// Runs `spec.trial_count` trials: split, fit on the unlabeled training
/// part, score the test part, and measure every requested variant. Results
/// come back in the order the variants were requested (duplicates dropped).
pub fn run_trials<T: Scalar>(
    dataset_name: &str,
    ds: &LabeledDataset<T>,
    spec: &SplitSpec,
    variants: &[Variant],
    workers: usize,
) -> Result<Vec<EvalResult>> {
    spec.validate()?;
    if !ds.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let mut wanted: Vec<Variant> = Vec::new();
    for &v in variants {
        if !wanted.contains(&v) {
            wanted.push(v);
        }
    }
    if wanted.is_empty() {
        return Err(Error::InvalidArgument("no variants requested".into()));
    }

    let mut per_variant: Vec<Vec<TrialMetrics>> = vec![Vec::new(); wanted.len()];
    for trial in 0..spec.trial_count {
        let (train, test) = trial_split(ds, spec, trial)?;
        let model = EcdfModel::fit_with_workers(&train, workers)?;
        let report = score_with_workers(&model, &test.data, Variant::Ecod, workers)?;
        for (slot, &v) in per_variant.iter_mut().zip(&wanted) {
            let scores = report.scores_for(v);
            slot.push(TrialMetrics {
                trial,
                roc: roc_auc(&scores, &test.labels)?,
                ap: average_precision(&scores, &test.labels)?,
            });
        }
    }
    Ok(wanted
        .into_iter()
        .zip(per_variant)
        .map(|(v, trials)| EvalResult::from_trials(dataset_name, v, trials))
        .collect())
}

/// The trial's split, redrawn with a bumped attempt counter until the test
/// part holds both classes.
fn trial_split<T: Scalar>(
    ds: &LabeledDataset<T>,
    spec: &SplitSpec,
    trial: usize,
) -> Result<(Dataset<T>, LabeledDataset<T>)> {
    let first = split(ds, spec, trial)?;
    if first.1.has_both_classes() {
        return Ok(first);
    }
    for attempt in 1..SPLIT_RETRY_CAP {
        let parts = split_with_seed(ds, spec, trial_seed(spec.seed, trial, attempt))?;
        if parts.1.has_both_classes() {
            return Ok(parts);
        }
    }
    Err(Error::RetriesExhausted {
        attempts: SPLIT_RETRY_CAP as usize,
    })
}

/// Ranks of methods within each dataset (1 = highest metric, ties share the
/// mean rank) and each method's average rank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankTable {
    pub datasets: Vec<String>,
    pub methods: Vec<String>,
    /// `ranks[dataset][method]`
    pub ranks: Vec<Vec<f64>>,
    pub average_rank: Vec<f64>,
}

/// `metrics[dataset][method]`, higher is better.
pub fn rank_table(
    datasets: &[String],
    methods: &[String],
    metrics: &[Vec<f64>],
) -> Result<RankTable> {
    if metrics.len() != datasets.len() || metrics.iter().any(|row| row.len() != methods.len()) {
        return Err(Error::InvalidArgument(
            "metric table is ragged or does not match the dataset/method lists".into(),
        ));
    }
    if methods.is_empty() || datasets.is_empty() {
        return Err(Error::InvalidArgument("empty metric table".into()));
    }
    let ranks: Vec<Vec<f64>> = metrics.iter().map(|row| descending_ranks(row)).collect();
    let average_rank = (0..methods.len())
        .map(|m| ranks.iter().map(|r| r[m]).sum::<f64>() / datasets.len() as f64)
        .collect();
    Ok(RankTable {
        datasets: datasets.to_vec(),
        methods: methods.to_vec(),
        ranks,
        average_rank,
    })
}

fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

/// Writes `dataset,variant,trial,roc,ap,seed`: one row per trial followed by
/// one `mean` row per dataset and variant.
pub fn write_results_csv<W: Write>(mut w: W, results: &[EvalResult], seed: u64) -> std::io::Result<()> {
    writeln!(w, "dataset,variant,trial,roc,ap,seed")?;
    for r in results {
        for t in &r.per_trial {
            writeln!(w, "{},{},{},{},{},{}", r.dataset_name, r.variant, t.trial, t.roc, t.ap, seed)?;
        }
    }
    for r in results {
        writeln!(w, "{},{},mean,{},{},{}", r.dataset_name, r.variant, r.mean_roc, r.mean_ap, seed)?;
    }
    w.flush()
}

/// Markdown tables (ROC, then AP) with datasets as rows and variants as
/// columns, each cell `metric (rank)`, plus an average row.
pub fn markdown_summary(results: &[EvalResult], spec: &SplitSpec) -> String {
    let mut datasets: Vec<String> = Vec::new();
    let mut variants: Vec<Variant> = Vec::new();
    for r in results {
        if !datasets.contains(&r.dataset_name) {
            datasets.push(r.dataset_name.clone());
        }
        if !variants.contains(&r.variant) {
            variants.push(r.variant);
        }
    }
    let lookup = |ds: &str, v: Variant| {
        results
            .iter()
            .find(|r| r.dataset_name == ds && r.variant == v)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<!-- seed={} trials={} train_fraction={} -->",
        spec.seed, spec.trial_count, spec.train_fraction
    );
    for (title, pick) in [
        ("ROC-AUC", (|r: &EvalResult| r.mean_roc) as fn(&EvalResult) -> f64),
        ("Average precision", |r: &EvalResult| r.mean_ap),
    ] {
        let _ = writeln!(out, "\n### {title} (mean of {} trials, seed {})\n", spec.trial_count, spec.seed);
        let _ = write!(out, "| Dataset |");
        for v in &variants {
            let _ = write!(out, " {} |", v.display_name());
        }
        let _ = write!(out, "\n|---|");
        for _ in &variants {
            let _ = write!(out, "---|");
        }
        out.push('\n');

        let complete: Vec<&String> = datasets
            .iter()
            .filter(|ds| variants.iter().all(|&v| lookup(ds, v).is_some()))
            .collect();
        let table: Vec<Vec<f64>> = complete
            .iter()
            .map(|ds| variants.iter().map(|&v| pick(lookup(ds, v).unwrap())).collect())
            .collect();
        let names: Vec<String> = variants.iter().map(|v| v.display_name().to_string()).collect();
        let ranks = rank_table(
            &complete.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            &names,
            &table,
        )
        .ok();

        for (k, ds) in complete.iter().enumerate() {
            let _ = write!(out, "| {ds} |");
            for (m, value) in table[k].iter().enumerate() {
                let rank = ranks.as_ref().map_or(0.0, |r| r.ranks[k][m]);
                let _ = write!(out, " {value:.3} ({}) |", fmt_rank(rank));
            }
            out.push('\n');
        }
        if let Some(r) = &ranks {
            let _ = write!(out, "| AVG |");
            for m in 0..variants.len() {
                let mean = table.iter().map(|row| row[m]).sum::<f64>() / table.len() as f64;
                let _ = write!(out, " {mean:.3} ({}) |", fmt_rank(r.average_rank[m]));
            }
            out.push('\n');
        }
    }
    out
}

fn fmt_rank(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.2}")
    }
}
