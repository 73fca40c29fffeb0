use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// 20 nodes per class for training, 500 validation, 1000 test.
    Standard,
    /// 2.5% / 2.5% / 95%.
    Sparse,
    /// 60% / 20% / 20%.
    Full,
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "sparse" => Ok(Self::Sparse),
            "full" => Ok(Self::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown regime {other:?} (expected standard, sparse or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Checks the parts are disjoint and index into `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in self.train.iter().chain(&self.val).chain(&self.test) {
            if i >= n {
                return Err(Error::Index { index: i, n });
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!("node {i} appears in more than one split part")));
            }
            seen[i] = true;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let split: Split = serde_json::from_str(&text)?;
        split.validate(n)?;
        Ok(split)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

const STANDARD_PER_CLASS: usize = 20;
const STANDARD_VAL: usize = 500;
const STANDARD_TEST: usize = 1000;

pub fn make_split(dataset: &Dataset, regime: Regime, seed: u64) -> Result<Split> {
    let n = dataset.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match regime {
        Regime::Standard => {
            let mut by_class = vec![Vec::new(); dataset.num_classes];
            for (i, &c) in dataset.labels.iter().enumerate() {
                by_class[c].push(i);
            }
            if let Some((c, members)) = by_class
                .iter()
                .enumerate()
                .find(|(_, m)| !m.is_empty() && m.len() < STANDARD_PER_CLASS)
            {
                return Err(Error::Capacity(format!(
                    "class {c} has {} nodes, standard split needs {STANDARD_PER_CLASS}",
                    members.len()
                )));
            }
            let mut train = Vec::new();
            let mut rest = Vec::new();
            for members in &mut by_class {
                members.shuffle(&mut rng);
                let take = STANDARD_PER_CLASS.min(members.len());
                train.extend_from_slice(&members[..take]);
                rest.extend_from_slice(&members[take..]);
            }
            if rest.len() < STANDARD_VAL + STANDARD_TEST {
                return Err(Error::Capacity(format!(
                    "standard split needs {} nodes beyond the training set, have {}",
                    STANDARD_VAL + STANDARD_TEST,
                    rest.len()
                )));
            }
            rest.shuffle(&mut rng);
            train.sort_unstable();
            let mut val = rest[..STANDARD_VAL].to_vec();
            let mut test = rest[STANDARD_VAL..STANDARD_VAL + STANDARD_TEST].to_vec();
            val.sort_unstable();
            test.sort_unstable();
            Ok(Split { train, val, test })
        }
        Regime::Sparse | Regime::Full => {
            let (tr, va) = if regime == Regime::Sparse { (0.025, 0.025) } else { (0.6, 0.2) };
            let n_train = (tr * n as f64).round() as usize;
            let n_val = (va * n as f64).round() as usize;
            if n_train == 0 || n_val == 0 || n_train + n_val >= n {
                return Err(Error::Capacity(format!(
                    "{n} nodes are too few for a {regime:?} split"
                )));
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut train = perm[..n_train].to_vec();
            let mut val = perm[n_train..n_train + n_val].to_vec();
            let mut test = perm[n_train + n_val..].to_vec();
            train.sort_unstable();
            val.sort_unstable();
            test.sort_unstable();
            Ok(Split { train, val, test })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, SyntheticKind, generate_synthetic};
    use crate::linalg::Matrix;
    use proptest::prelude::*;

    fn labelled(n: usize, classes: usize) -> Dataset {
        let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
        Dataset::new(Graph::empty(n), Matrix::zeros(n, 1), labels, classes).unwrap()
    }

    #[test]
    fn standard_sizes() {
        let d = labelled(2708, 7);
        let s = make_split(&d, Regime::Standard, 0).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (140, 500, 1000));
        for c in 0..7 {
            assert_eq!(s.train.iter().filter(|&&i| d.labels[i] == c).count(), 20);
        }
        s.validate(2708).unwrap();
    }

    #[test]
    fn standard_capacity() {
        assert!(matches!(make_split(&labelled(1000, 2), Regime::Standard, 0), Err(Error::Capacity(_))));
        let few = Dataset::new(Graph::empty(30), Matrix::zeros(30, 1), vec![0; 30], 1).unwrap();
        assert!(make_split(&few, Regime::Standard, 0).is_err());
    }

    #[test]
    fn full_percentages() {
        let d = generate_synthetic(200, SyntheticKind::Homophilic, 1).unwrap();
        let s = make_split(&d, Regime::Full, 3).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (120, 40, 40));
        let s = make_split(&d, Regime::Sparse, 3).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (5, 5, 190));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let d = labelled(100, 2);
        let s = make_split(&d, Regime::Full, 5).unwrap();
        let back: Split = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        let overlapping = Split { train: vec![0, 1], val: vec![1], test: vec![2] };
        assert!(overlapping.validate(10).is_err());
        let outside = Split { train: vec![0], val: vec![1], test: vec![10] };
        assert!(matches!(outside.validate(10), Err(Error::Index { .. })));
    }

    proptest! {
        #[test]
        fn splits_are_deterministic_and_disjoint(n in 40usize..400, seed in 0u64..1000, full in any::<bool>()) {
            let d = labelled(n, 3);
            let regime = if full { Regime::Full } else { Regime::Sparse };
            match make_split(&d, regime, seed) {
                Ok(s) => {
                    prop_assert_eq!(&s, &make_split(&d, regime, seed).unwrap());
                    s.validate(n).unwrap();
                    prop_assert_eq!(s.train.len() + s.val.len() + s.test.len(), n);
                }
                Err(e) => prop_assert!(matches!(e, Error::Capacity(_))),
            }
        }
    }
}
