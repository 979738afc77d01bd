//! Reference implementations used as independent oracles by the test
//! targets. Everything here counts directly instead of sorting or
//! binary-searching.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Row-major plain matrix, `rows[i][j]`.
pub type Rows = Vec<Vec<f64>>;

pub fn count_le(col: &[f64], z: f64) -> usize {
    col.iter().filter(|&&x| x <= z).count()
}

pub fn count_ge(col: &[f64], z: f64) -> usize {
    col.iter().filter(|&&x| x >= z).count()
}

pub fn naive_skewness(col: &[f64]) -> f64 {
    let n = col.len();
    if n < 2 || col.iter().all(|&x| x == col[0]) {
        return 0.0;
    }
    let nf = n as f64;
    let mut sum = 0.0;
    for &x in col {
        sum += x;
    }
    let mean = sum / nf;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    for &x in col {
        let dev = x - mean;
        s2 += dev * dev;
        s3 += dev * dev * dev;
    }
    let var = s2 / (nf - 1.0);
    (s3 / nf) / (var * var.sqrt())
}

#[derive(Debug, Clone)]
pub struct NaiveScores {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub auto: Vec<f64>,
    pub both: Vec<f64>,
    pub ecod: Vec<f64>,
}

/// Direct transcription of the detector: for every query point and every
/// dimension, count training values on each side, take negative logs and
/// sum. Empty tails use `1 / (n + 1)`.
pub fn naive_scores(train: &Rows, queries: &Rows) -> NaiveScores {
    let n = train.len();
    let d = train[0].len();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| train.iter().map(|r| r[j]).collect()).collect();
    let skews: Vec<f64> = cols.iter().map(|c| naive_skewness(c)).collect();
    let floor = 1.0 / (n as f64 + 1.0);
    let prob = |c: usize| if c == 0 { floor } else { c as f64 / n as f64 };
    let mut out = NaiveScores {
        left: vec![],
        right: vec![],
        auto: vec![],
        both: vec![],
        ecod: vec![],
    };
    for q in queries {
        let (mut l, mut r, mut a) = (0.0, 0.0, 0.0);
        for j in 0..d {
            let tl = -prob(count_le(&cols[j], q[j])).ln();
            let tr = -prob(count_ge(&cols[j], q[j])).ln();
            l += tl;
            r += tr;
            a += if skews[j] < 0.0 { tl } else { tr };
        }
        out.left.push(l);
        out.right.push(r);
        out.auto.push(a);
        out.both.push((l + r) / 2.0);
        out.ecod.push(l.max(r).max(a));
    }
    out
}

/// ROC-AUC by enumerating every (outlier, inlier) pair.
pub fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (k, &lk) in labels.iter().enumerate() {
            if lk {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[k] {
                wins += 1.0;
            } else if scores[i] == scores[k] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Average precision by locating each item's 1-based position directly:
/// items ahead of `i` are those with a higher score, or an equal score and
/// a smaller index.
pub fn brute_ap(scores: &[f64], labels: &[bool]) -> f64 {
    let n = scores.len();
    let pos_of = |i: usize| {
        1 + (0..n)
            .filter(|&k| scores[k] > scores[i] || (scores[k] == scores[i] && k < i))
            .count()
    };
    let total_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut ap = 0.0;
    for i in 0..n {
        if !labels[i] {
            continue;
        }
        let k = pos_of(i);
        let hits = (0..n).filter(|&m| labels[m] && pos_of(m) <= k).count();
        ap += hits as f64 / k as f64;
    }
    ap / total_pos
}

/// A random matrix whose columns are either continuous or small integers,
/// the latter producing plenty of ties.
pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Rows {
    let kinds: Vec<u8> = (0..d).map(|_| rng.random_range(0..3)).collect();
    (0..n)
        .map(|_| {
            kinds
                .iter()
                .map(|k| match k {
                    0 => rng.random_range(-5.0..5.0),
                    1 => f64::from(rng.random_range(0..6)),
                    _ => rng.random::<f64>().powi(3) * 20.0,
                })
                .collect()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
