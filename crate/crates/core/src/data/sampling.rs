use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Dataset, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

/// Floor for the per-feature standard deviation in the subsample score.
pub const SCORE_EPSILON: f64 = 1e-12;

/// The first `count` primes, ascending.
pub fn prime_seeds(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n >= 6
    let n = count as f64;
    let bound = if count < 6 {
        15
    } else {
        (n * (n.ln() + n.ln().ln())).ceil() as usize + 1
    };
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::with_capacity(count);
    for i in 2..=bound {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == count {
            break;
        }
        let mut j = i * i;
        while j <= bound {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Result of [`subsample`].
#[derive(Debug, Clone)]
pub struct Subsample {
    pub dataset: Dataset,
    pub seed: u64,
    pub score: f64,
}

/// Picks, among one stratified random draw per seed, the subset whose
/// per-feature mean and standard deviation stay closest to the full data.
///
/// Score: `Σ_j (|mean_sub − mean_full| + |std_sub − std_full|) / max(std_full, ε)`.
/// Lowest score wins; ties go to the smaller seed. Rows keep their original
/// relative order.
pub fn subsample(full: &Dataset, size: usize, seeds: &[u64]) -> Result<Subsample> {
    let n = full.len();
    if size < 2 || size > n {
        return Err(Error::argument(format!(
            "subsample size {size} must lie in [2, {n}]"
        )));
    }
    if seeds.is_empty() {
        return Err(Error::argument("no subsample seeds given"));
    }

    let reference = column_moments(full, None);
    let (positives, negatives) = class_indices(full);
    let mut n_pos = ((size * positives.len()) as f64 / n as f64).round() as usize;
    n_pos = n_pos.min(positives.len()).max(size.saturating_sub(negatives.len()));
    let n_neg = size - n_pos;

    let draw = |seed: u64| -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen: Vec<usize> = index::sample(&mut rng, positives.len(), n_pos)
            .into_iter()
            .map(|i| positives[i])
            .chain(
                index::sample(&mut rng, negatives.len(), n_neg)
                    .into_iter()
                    .map(|i| negatives[i]),
            )
            .collect();
        chosen.sort_unstable();
        chosen
    };

    let scores: Vec<f64> = seeds
        .par_iter()
        .map(|&seed| distribution_score(&reference, &column_moments(full, Some(&draw(seed)))))
        .collect();

    let mut best = 0;
    for i in 1..seeds.len() {
        let better = scores[i] < scores[best]
            || (scores[i] == scores[best] && seeds[i] < seeds[best]);
        if better {
            best = i;
        }
    }
    Ok(Subsample {
        dataset: full.select(&draw(seeds[best])),
        seed: seeds[best],
        score: scores[best],
    })
}

#[cfg(test)]
pub(crate) fn subset_score(full: &Dataset, rows: &[usize]) -> f64 {
    distribution_score(&column_moments(full, None), &column_moments(full, Some(rows)))
}

struct Moments {
    mean: Vec<f64>,
    std: Vec<f64>,
}

fn column_moments(ds: &Dataset, rows: Option<&[usize]>) -> Moments {
    let x = ds.features();
    let d = x.ncols();
    let mut mean = vec![0.0; d];
    let mut sq = vec![0.0; d];
    let mut count = 0usize;
    let mut visit = |i: usize| {
        count += 1;
        for j in 0..d {
            mean[j] += x[[i, j]];
        }
    };
    match rows {
        Some(rows) => rows.iter().for_each(|&i| visit(i)),
        None => (0..x.nrows()).for_each(&mut visit),
    }
    let c = count as f64;
    mean.iter_mut().for_each(|m| *m /= c);
    let mut accumulate = |i: usize| {
        for j in 0..d {
            let dev = x[[i, j]] - mean[j];
            sq[j] += dev * dev;
        }
    };
    match rows {
        Some(rows) => rows.iter().for_each(|&i| accumulate(i)),
        None => (0..x.nrows()).for_each(&mut accumulate),
    }
    let std = sq.iter().map(|s| (s / c).sqrt()).collect();
    Moments { mean, std }
}

fn distribution_score(full: &Moments, sub: &Moments) -> f64 {
    (0..full.mean.len())
        .map(|j| {
            let scale = full.std[j].max(SCORE_EPSILON);
            ((sub.mean[j] - full.mean[j]).abs() + (sub.std[j] - full.std[j]).abs()) / scale
        })
        .sum()
}

fn class_indices(ds: &Dataset) -> (Vec<usize>, Vec<usize>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &l) in ds.labels().iter().enumerate() {
        if l == POSITIVE {
            pos.push(i);
        } else {
            neg.push(i);
        }
    }
    (pos, neg)
}

/// Stratified train/test split. Each class contributes
/// `round(class_count × test_fraction)` rows to the test side; both sides
/// keep the input's relative row order.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::argument(format!(
            "test fraction {test_fraction} must lie in (0, 1)"
        )));
    }
    let (pos, neg) = class_indices(ds);
    for (label, members) in [(POSITIVE, &pos), (NEGATIVE, &neg)] {
        if members.len() < 2 {
            return Err(Error::argument(format!(
                "class {label:+} has {} member(s); a stratified split needs at least 2",
                members.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::with_capacity(ds.len());
    let mut test = Vec::new();
    for mut members in [pos, neg] {
        let n_test = (members.len() as f64 * test_fraction).round() as usize;
        members.shuffle(&mut rng);
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select(&train), ds.select(&test)))
}
