//! Communication and write accounting shared by the kernels and the grid
//! simulation.

use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::algebra::{EdgeEntry, Weight};

/// Per-phase tallies. Word counts use the sizes from [`WordSize`];
/// `remote_writes` and `local_combines` count elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CostCounters {
    pub words_redistributed: u64,
    pub words_broadcast: u64,
    pub words_reduced: u64,
    pub words_allgathered: u64,
    /// Remote reads of vector entries, duplicates collated per process.
    pub words_gathered: u64,
    /// Pre-combined scatter traffic to remote owners.
    pub words_scattered: u64,
    pub remote_writes: u64,
    pub local_combines: u64,
}

impl CostCounters {
    pub fn total_words(&self) -> u64 {
        self.words_redistributed
            + self.words_broadcast
            + self.words_reduced
            + self.words_allgathered
            + self.words_gathered
            + self.words_scattered
    }
}

impl AddAssign for CostCounters {
    fn add_assign(&mut self, rhs: CostCounters) {
        self.words_redistributed += rhs.words_redistributed;
        self.words_broadcast += rhs.words_broadcast;
        self.words_reduced += rhs.words_reduced;
        self.words_allgathered += rhs.words_allgathered;
        self.words_gathered += rhs.words_gathered;
        self.words_scattered += rhs.words_scattered;
        self.remote_writes += rhs.remote_writes;
        self.local_combines += rhs.local_combines;
    }
}

impl Add for CostCounters {
    type Output = CostCounters;

    fn add(mut self, rhs: CostCounters) -> CostCounters {
        self += rhs;
        self
    }
}

impl std::iter::Sum for CostCounters {
    fn sum<I: Iterator<Item = CostCounters>>(iter: I) -> CostCounters {
        iter.fold(CostCounters::default(), |acc, c| acc + c)
    }
}

/// Size of one vector element in machine words.
///
/// Fixed units: a weight or vertex id is 1 word, an [`EdgeEntry`] is 3
/// (weight, key, parent), a changed-map entry is 2.
pub trait WordSize {
    const WORDS: u64;
}

impl WordSize for usize {
    const WORDS: u64 = 1;
}

impl WordSize for Option<usize> {
    const WORDS: u64 = 1;
}

impl WordSize for bool {
    const WORDS: u64 = 1;
}

impl WordSize for Weight {
    const WORDS: u64 = 1;
}

impl WordSize for EdgeEntry {
    const WORDS: u64 = 3;
}

/// Words per `(vertex, new parent)` pair in an all-gather.
pub const CHANGED_ENTRY_WORDS: u64 = 2;
