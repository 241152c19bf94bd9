//! Subgoal and answer tables.
//!
//! Term data (subgoal arguments, answers) lives in the table area; the
//! indexes and evaluation bookkeeping are ordinary Rust structures.

use crate::hashing::HashCode;
use crate::terms::{Addr, SymId};

pub const SUBGOAL_BUCKETS: usize = 256;
pub const ANSWER_BUCKETS: usize = 8;

/// Hash index from keys to record ids with chained buckets. Doubles when
/// the entry count exceeds the bucket count.
#[derive(Debug)]
pub struct KeyIndex {
    initial: usize,
    buckets: Vec<Vec<(HashCode, u32)>>,
    count: usize,
    pub comparisons: u64,
}

impl KeyIndex {
    pub fn new(initial: usize) -> Self {
        KeyIndex { initial, buckets: Vec::new(), count: 0, comparisons: 0 }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len().max(self.initial)
    }

    /// Finds an entry with key `key` accepted by `same`. Every entry in the
    /// bucket costs one comparison; `same` runs only on equal keys.
    pub fn find(&mut self, key: HashCode, mut same: impl FnMut(u32) -> bool) -> Option<u32> {
        if self.buckets.is_empty() {
            return None;
        }
        let n = self.buckets.len();
        for &(k, id) in &self.buckets[key.0 as usize % n] {
            self.comparisons += 1;
            if k == key && same(id) {
                return Some(id);
            }
        }
        None
    }

    pub fn insert(&mut self, key: HashCode, id: u32) {
        if self.buckets.is_empty() {
            self.buckets = vec![Vec::new(); self.initial];
        }
        let n = self.buckets.len();
        self.buckets[key.0 as usize % n].push((key, id));
        self.count += 1;
        if self.count > n {
            let mut next = vec![Vec::new(); n * 2];
            for (k, id) in self.buckets.drain(..).flatten() {
                next[k.0 as usize % (n * 2)].push((k, id));
            }
            self.buckets = next;
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SubgoalState {
    Incomplete,
    Complete,
}

#[derive(Debug)]
pub struct AnswerRecord {
    /// First of `arity` cells holding the answer's argument terms.
    pub block: Addr,
    /// Structural code of each argument; 0 marks a non-ground argument.
    pub codes: Box<[HashCode]>,
}

#[derive(Debug)]
pub struct SubgoalRecord {
    pub sym: SymId,
    /// `[functor, arg1, ..., argN]` in the table area.
    pub block: Addr,
    pub key: HashCode,
    pub state: SubgoalState,
    /// Answers in insertion order.
    pub answers: Vec<AnswerRecord>,
    pub answer_index: KeyIndex,
    // Fixpoint bookkeeping.
    pub(crate) active: bool,
    pub(crate) evaluated: bool,
    pub(crate) looped: bool,
    pub(crate) comp_idx: Option<usize>,
    pub(crate) lowlink: usize,
    pub(crate) round_epoch: u64,
}

impl SubgoalRecord {
    pub fn arg(&self, i: usize) -> Addr {
        self.block.offset(1 + i)
    }

    pub fn is_complete(&self) -> bool {
        self.state == SubgoalState::Complete
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgoalId(pub u32);

#[derive(Debug)]
pub struct SubgoalTable {
    records: Vec<SubgoalRecord>,
    index: KeyIndex,
}

impl Default for SubgoalTable {
    fn default() -> Self {
        SubgoalTable { records: Vec::new(), index: KeyIndex::new(SUBGOAL_BUCKETS) }
    }
}

impl SubgoalTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: SubgoalId) -> &SubgoalRecord {
        &self.records[id.0 as usize]
    }

    pub fn get_mut(&mut self, id: SubgoalId) -> &mut SubgoalRecord {
        &mut self.records[id.0 as usize]
    }

    pub fn records(&self) -> impl Iterator<Item = (SubgoalId, &SubgoalRecord)> {
        self.records.iter().enumerate().map(|(i, r)| (SubgoalId(i as u32), r))
    }

    pub fn find(&mut self, key: HashCode, same: impl FnMut(&SubgoalRecord) -> bool) -> Option<SubgoalId> {
        let records = &self.records;
        let mut same = same;
        self.index.find(key, |id| same(&records[id as usize])).map(SubgoalId)
    }

    pub fn insert(&mut self, sym: SymId, block: Addr, key: HashCode) -> SubgoalId {
        let id = self.records.len() as u32;
        self.records.push(SubgoalRecord {
            sym,
            block,
            key,
            state: SubgoalState::Incomplete,
            answers: Vec::new(),
            answer_index: KeyIndex::new(ANSWER_BUCKETS),
            active: false,
            evaluated: false,
            looped: false,
            comp_idx: None,
            lowlink: 0,
            round_epoch: 0,
        });
        self.index.insert(key, id);
        SubgoalId(id)
    }

    pub fn answer_count(&self) -> usize {
        self.records.iter().map(|r| r.answers.len()).sum()
    }

    /// Subgoal-index plus answer-index comparisons.
    pub fn comparisons(&self) -> u64 {
        self.index.comparisons + self.records.iter().map(|r| r.answer_index.comparisons).sum::<u64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_only_checks_equal_keys() {
        let mut ix = KeyIndex::new(4);
        ix.insert(HashCode(1), 0);
        ix.insert(HashCode(5), 1);
        let mut calls = 0;
        assert_eq!(
            ix.find(HashCode(5), |_| {
                calls += 1;
                true
            }),
            Some(1)
        );
        assert_eq!(calls, 1);
        assert_eq!(ix.comparisons, 2);
    }

    #[test]
    fn growth_keeps_entries() {
        let mut ix = KeyIndex::new(4);
        for i in 0..100u32 {
            ix.insert(HashCode(i * 7), i);
        }
        assert_eq!(ix.bucket_count(), 128);
        for i in 0..100u32 {
            assert_eq!(ix.find(HashCode(i * 7), |id| id == i), Some(i));
        }
    }

    #[test]
    fn equal_keys_share_a_chain() {
        let mut ix = KeyIndex::new(4);
        for i in 0..10 {
            ix.insert(HashCode(3), i);
        }
        ix.comparisons = 0;
        assert_eq!(ix.find(HashCode(3), |id| id == 9), Some(9));
        assert_eq!(ix.comparisons, 10);
    }
}
