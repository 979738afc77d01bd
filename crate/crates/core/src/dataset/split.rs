use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Repeated random train/test protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub trial_count: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.6,
            seed: 42,
            trial_count: 10,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.trial_count == 0 {
            return Err(Error::InvalidArgument("trial count must be >= 1".into()));
        }
        Ok(())
    }

    /// Rows assigned to the training part: `floor(fraction * n + 0.5)`.
    pub fn train_size(&self, n: usize) -> usize {
        (self.train_fraction * n as f64 + 0.5).floor() as usize
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial's partition. `attempt` is bumped when a partition has
/// to be redrawn.
///
/// `splitmix64(seed ^ splitmix64(trial_index + (attempt << 32)))`
pub fn trial_seed(seed: u64, trial_index: usize, attempt: u32) -> u64 {
    splitmix64(seed ^ splitmix64(trial_index as u64 + (u64::from(attempt) << 32)))
}

/// Uniform random partition of the rows for one trial. The training part
/// drops the labels. Both parts keep the original row order.
pub fn split<T: Scalar>(
    ds: &LabeledDataset<T>,
    spec: &SplitSpec,
    trial_index: usize,
) -> Result<(Dataset<T>, LabeledDataset<T>)> {
    if trial_index >= spec.trial_count {
        return Err(Error::InvalidArgument(format!(
            "trial index {trial_index} out of range for {} trials",
            spec.trial_count
        )));
    }
    split_with_seed(ds, spec, trial_seed(spec.seed, trial_index, 0))
}

pub(crate) fn split_with_seed<T: Scalar>(
    ds: &LabeledDataset<T>,
    spec: &SplitSpec,
    seed: u64,
) -> Result<(Dataset<T>, LabeledDataset<T>)> {
    spec.validate()?;
    let n = ds.n();
    let k = spec.train_size(n);
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "train fraction {} leaves an empty part for n={n}",
            spec.train_fraction
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(k);
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.data.select_rows(train)?, ds.select_rows(test)?))
}
