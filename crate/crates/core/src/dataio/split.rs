use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Train / validation / test proportions.
pub const DEFAULT_RATIOS: [f64; 3] = [0.70, 0.15, 0.15];

/// Row indices of the three partitions. Together they cover every row once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded uniform shuffle of `0..n_rows`, sliced at largest-remainder boundaries.
pub fn split_dataset(n_rows: usize, seed: u64, ratios: [f64; 3]) -> Result<DatasetSplit> {
    let sizes = partition_sizes(n_rows, ratios)?;
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(slice(order, sizes))
}

/// Like [`split_dataset`] but keeps file order, so validation and test
/// follow training in time.
pub fn split_chronological(n_rows: usize, ratios: [f64; 3]) -> Result<DatasetSplit> {
    let sizes = partition_sizes(n_rows, ratios)?;
    Ok(slice((0..n_rows).collect(), sizes))
}

fn slice(order: Vec<usize>, [a, b, _]: [usize; 3]) -> DatasetSplit {
    DatasetSplit {
        train: order[..a].to_vec(),
        validation: order[a..a + b].to_vec(),
        test: order[a + b..].to_vec(),
    }
}

fn partition_sizes(n_rows: usize, ratios: [f64; 3]) -> Result<[usize; 3]> {
    if n_rows == 0 {
        return Err(Error::Config("cannot split an empty dataset".into()));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Config(format!(
            "split ratios must be nonnegative, got {ratios:?}"
        )));
    }
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split ratios sum to {total}, expected 1"
        )));
    }

    let quotas = ratios.map(|r| r * n_rows as f64);
    let mut sizes = quotas.map(|q| q.floor() as usize);
    let assigned: usize = sizes.iter().sum();
    let mut by_remainder = [0usize, 1, 2];
    // stable sort: ties go to the earlier partition
    by_remainder.sort_by(|&i, &j| {
        let (ri, rj) = (quotas[i] - quotas[i].floor(), quotas[j] - quotas[j].floor());
        rj.partial_cmp(&ri).unwrap_or(std::cmp::Ordering::Equal)
    });
    for &k in by_remainder
        .iter()
        .cycle()
        .take(n_rows.saturating_sub(assigned))
    {
        sizes[k] += 1;
    }
    // floors can overshoot only if the ratios sum slightly above 1
    while sizes.iter().sum::<usize>() > n_rows {
        let k = (0..3).rev().find(|&k| sizes[k] > 0).unwrap_or(0);
        sizes[k] -= 1;
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_partition(s: &DatasetSplit, n: usize) {
        let mut all: Vec<usize> = s
            .train
            .iter()
            .chain(&s.validation)
            .chain(&s.test)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn hundred_rows_split_70_15_15() {
        let s = split_dataset(100, 1, DEFAULT_RATIOS).unwrap();
        assert_eq!(
            (s.train.len(), s.validation.len(), s.test.len()),
            (70, 15, 15)
        );
        assert_partition(&s, 100);
    }

    #[test]
    fn everything_in_train() {
        let s = split_dataset(17, 9, [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.train.len(), 17);
        assert!(s.validation.is_empty() && s.test.is_empty());
    }

    #[test]
    fn largest_remainder_sizes() {
        // 10 rows: quotas 7, 1.5, 1.5 -> remainder goes to validation (earlier tie)
        let s = split_chronological(10, DEFAULT_RATIOS).unwrap();
        assert_eq!((s.train.len(), s.validation.len(), s.test.len()), (7, 2, 1));
        assert_eq!(s.train, (0..7).collect::<Vec<_>>());
        let s = split_chronological(1, DEFAULT_RATIOS).unwrap();
        assert_eq!(s.train, vec![0]);
    }

    #[test]
    fn determinism() {
        assert_eq!(
            split_dataset(1000, 5, DEFAULT_RATIOS).unwrap(),
            split_dataset(1000, 5, DEFAULT_RATIOS).unwrap()
        );
        assert_ne!(
            split_dataset(1000, 5, DEFAULT_RATIOS).unwrap(),
            split_dataset(1000, 6, DEFAULT_RATIOS).unwrap()
        );
    }

    #[test]
    fn bad_ratios() {
        assert!(matches!(
            split_dataset(10, 0, [0.7, 0.2, 0.2]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            split_dataset(10, 0, [1.2, -0.1, -0.1]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            split_dataset(0, 0, DEFAULT_RATIOS),
            Err(Error::Config(_))
        ));
    }

    proptest! {
        #[test]
        fn disjoint_and_exhaustive(n in 1usize..3000, seed in any::<u64>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
            let ratios = [a, b, 1.0 - a - b];
            let s = split_dataset(n, seed, ratios).unwrap();
            assert_partition(&s, n);
            let sizes = [s.train.len(), s.validation.len(), s.test.len()];
            for k in 0..3 {
                prop_assert!((sizes[k] as f64 - ratios[k] * n as f64).abs() < 1.0 + 1e-9);
            }
        }
    }
}
