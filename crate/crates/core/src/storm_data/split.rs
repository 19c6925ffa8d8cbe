use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::track::StormTrack;
use crate::error::{Error, Result};

pub const DEFAULT_TEST_FRACTION: f64 = 0.25;
pub const DEFAULT_VALIDATION_FRACTION: f64 = 0.25;

/// Storm-level partition: a storm's fixes never straddle two splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDataset {
    pub train: Vec<StormTrack>,
    pub validation: Vec<StormTrack>,
    pub test: Vec<StormTrack>,
    pub seed: u64,
}

/// Shuffles whole storms with a seeded permutation, then takes the first
/// `round(test_frac * N)` for test, the next `round(val_frac * N)` for
/// validation and the rest for training.
pub fn shuffle_split(
    mut storms: Vec<StormTrack>,
    seed: u64,
    test_frac: f64,
    val_frac: f64,
) -> Result<SplitDataset> {
    let n = storms.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, given: n });
    }
    if !(0.0..1.0).contains(&test_frac) || !(0.0..1.0).contains(&val_frac) {
        return Err(Error::invalid("split fractions must lie in [0, 1)"));
    }
    let n_test = (test_frac * n as f64).round() as usize;
    let n_val = (val_frac * n as f64).round() as usize;
    if n_test == 0 || n_val == 0 || n_test + n_val >= n {
        return Err(Error::invalid(format!(
            "fractions {test_frac}/{val_frac} leave an empty split for {n} storms"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    storms.shuffle(&mut rng);
    let train = storms.split_off(n_test + n_val);
    let validation = storms.split_off(n_test);
    Ok(SplitDataset {
        train,
        validation,
        test: storms,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn storms(n: usize) -> Vec<StormTrack> {
        (0..n)
            .map(|i| StormTrack {
                storm_id: format!("S{i:03}"),
                name: String::new(),
                fixes: Vec::new(),
            })
            .collect()
    }

    fn sizes(s: &SplitDataset) -> (usize, usize, usize) {
        (s.test.len(), s.validation.len(), s.train.len())
    }

    #[test]
    fn hundred_storms() {
        let s = shuffle_split(storms(100), 1, 0.25, 0.25).unwrap();
        assert_eq!(sizes(&s), (25, 25, 50));
    }

    #[test]
    fn four_storms() {
        let s = shuffle_split(storms(4), 1, 0.25, 0.25).unwrap();
        assert_eq!(sizes(&s), (1, 1, 2));
    }

    #[test]
    fn too_few_storms() {
        assert!(matches!(
            shuffle_split(storms(3), 1, 0.25, 0.25),
            Err(Error::InsufficientData { needed: 4, given: 3 })
        ));
    }

    #[test]
    fn seeded() {
        let a = shuffle_split(storms(30), 9, 0.25, 0.25).unwrap();
        let b = shuffle_split(storms(30), 9, 0.25, 0.25).unwrap();
        assert_eq!(a, b);
        let c = shuffle_split(storms(30), 10, 0.25, 0.25).unwrap();
        assert_ne!(a, c);
    }

    proptest! {
        #[test]
        fn partitions_the_input(n in 4usize..120, seed in any::<u64>()) {
            let s = shuffle_split(storms(n), seed, 0.25, 0.25).unwrap();
            let ids = |v: &[StormTrack]| v.iter().map(|t| t.storm_id.clone()).collect::<BTreeSet<_>>();
            let (a, b, c) = (ids(&s.train), ids(&s.validation), ids(&s.test));
            prop_assert!(a.is_disjoint(&b) && a.is_disjoint(&c) && b.is_disjoint(&c));
            let all: BTreeSet<_> = a.union(&b).chain(c.iter()).cloned().collect();
            prop_assert_eq!(all, ids(&storms(n)));
            prop_assert_eq!(s.test.len(), (0.25 * n as f64).round() as usize);
            prop_assert_eq!(s.validation.len(), (0.25 * n as f64).round() as usize);
        }
    }
}
