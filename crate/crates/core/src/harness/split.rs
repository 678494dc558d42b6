use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{Corpus, CorpusEntry, HarnessError};
use crate::knn::ClassLabel;

/// Per-class sample counts and the generator seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub seed: u64,
}

/// Seeded xoshiro256++ stream (state expanded from the seed by SplitMix64).
/// Bounded draws use the high half of a 64x64 widening multiply.
#[derive(Debug, Clone)]
pub struct SplitRng(Xoshiro256PlusPlus);

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        SplitRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish integer in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((u128::from(self.next_u64()) * bound as u128) >> 64) as usize
    }

    /// Integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<'a> {
    pub train: Vec<&'a CorpusEntry>,
    pub test: Vec<&'a CorpusEntry>,
}

/// Per-class sampling without replacement. Classes are visited in ascending
/// label order with one shared generator; each class's entries are drawn by
/// a partial Fisher-Yates shuffle of its manifest-order list. Within each
/// set, entries keep class order and then draw order.
pub fn split<'a>(corpus: &'a Corpus, spec: SplitSpec) -> Result<Split<'a>, HarnessError> {
    if spec.train_per_class == 0 {
        return Err(HarnessError::InvalidSplit(
            "train count per class must be positive".into(),
        ));
    }
    let mut by_class: BTreeMap<ClassLabel, Vec<&CorpusEntry>> = BTreeMap::new();
    for e in &corpus.entries {
        by_class.entry(e.label).or_default().push(e);
    }
    let required = spec.train_per_class + spec.test_per_class;
    if let Some((&label, members)) = by_class.iter().find(|(_, m)| m.len() < required) {
        return Err(HarnessError::InsufficientSamples {
            label,
            available: members.len(),
            required,
        });
    }

    let mut rng = SplitRng::new(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in by_class.into_values() {
        for i in 0..required {
            let j = i + rng.below(members.len() - i);
            members.swap(i, j);
        }
        train.extend_from_slice(&members[..spec.train_per_class]);
        test.extend_from_slice(&members[spec.train_per_class..required]);
    }
    Ok(Split { train, test })
}
