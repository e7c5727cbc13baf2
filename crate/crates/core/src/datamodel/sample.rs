//! Rare-event control sampling.
//!
//! Draws a uniform without-replacement subsample of the non-deal
//! businesses that were still operating at the start of the study window.
//! The last review date stands in for the closing date; closed records
//! with no date at all are treated as closed before the window and are
//! not eligible.

use super::record::BusinessRecord;
use crate::{Error, Result};
use chrono::NaiveDate;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform without-replacement sample of eligible control records,
/// deterministic for a fixed seed (ChaCha8 keyed by `seed`, partial
/// Fisher-Yates over the eligible indices).
pub fn sample_controls(
    records: &[BusinessRecord],
    n: usize,
    window_start: NaiveDate,
    seed: u64,
) -> Result<Vec<BusinessRecord>> {
    let eligible: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| is_eligible(r, window_start))
        .map(|(i, _)| i)
        .collect();
    if n > eligible.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            eligible: eligible.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = eligible;
    for i in 0..n {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut picked: Vec<usize> = pool[..n].to_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| records[i].clone()).collect())
}

fn is_eligible(r: &BusinessRecord, window_start: NaiveDate) -> bool {
    if r.is_groupon {
        return false;
    }
    if !r.is_closed {
        return true;
    }
    match r.last_review_date {
        Some(d) => d >= window_start,
        None => false,
    }
}
