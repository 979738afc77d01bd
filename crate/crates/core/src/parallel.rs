use std::ops::Range;
use std::thread;

use crate::error::{Error, Result};

/// Splits dimensions `0..d` into at most `workers` contiguous, non-empty
/// ranges whose sizes differ by at most one. Larger ranges come first.
pub fn worker_partition(d: usize, workers: usize) -> Vec<Range<usize>> {
    let groups = workers.min(d);
    if groups == 0 {
        return Vec::new();
    }
    let base = d / groups;
    let extra = d % groups;
    let mut start = 0;
    (0..groups)
        .map(|g| {
            let len = base + usize::from(g < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

pub(crate) fn check_workers(workers: usize) -> Result<()> {
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be >= 1".into()));
    }
    Ok(())
}

/// Runs `job(range, chunk)` for each worker range, where `chunk` is the
/// part of `buf` holding columns `range` of a column-major buffer with
/// `stride` entries per column. A single range runs on the calling thread.
pub(crate) fn for_each_column_chunk<T, F>(
    buf: &mut [T],
    stride: usize,
    ranges: &[Range<usize>],
    job: F,
) where
    T: Send,
    F: Fn(Range<usize>, &mut [T]) + Sync,
{
    if ranges.len() <= 1 {
        if let Some(r) = ranges.first() {
            job(r.clone(), buf);
        }
        return;
    }
    thread::scope(|s| {
        let mut rest = buf;
        for r in ranges {
            let (head, tail) = rest.split_at_mut(r.len() * stride);
            rest = tail;
            let job = &job;
            let r = r.clone();
            s.spawn(move || job(r, head));
        }
    });
}
