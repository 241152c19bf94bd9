//! The terms-table: one canonical table copy of every ground compound term.
//!
//! Buckets and chain nodes live in the table area and are charged to it.
//! Each bucket holds its first entry inline; further entries hang off it
//! in chain nodes. An entry is `[term, link]` when codes are memoized in
//! front of the term block, and `[code, term, link]` otherwise, so chain
//! walks can always compare codes before comparing terms.

use thiserror::Error;

use crate::arena::{ArenaError, Category};
use crate::hashing::{self, HashCode};
use crate::terms::{Addr, Cell, CellView, Store};

pub const INITIAL_BUCKETS: usize = 256;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct TermsStats {
    pub hits: u64,
    pub misses: u64,
    /// Chain entries visited (one code comparison each).
    pub comparisons: u64,
    /// Full structural comparisons, made only on equal codes.
    pub structural: u64,
    pub expansions: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("entry {term:?}: stored code {stored:?} != recomputed {recomputed:?}")]
    CodeMismatch { term: Cell, stored: HashCode, recomputed: HashCode },
    #[error("entry {0:?} sits in the wrong bucket")]
    Misplaced(Cell),
    #[error("entries {0:?} and {1:?} are structurally equal")]
    Duplicate(Cell, Cell),
    #[error("entry {0:?} is not a ground table-resident compound")]
    NotCanonical(Cell),
}

#[derive(Debug)]
pub struct TermsTable {
    memo: bool,
    buckets: Option<Addr>,
    nbuckets: usize,
    count: usize,
    stats: TermsStats,
}

impl TermsTable {
    /// `memo` selects the enhanced layout, where every table compound block
    /// is preceded by its hash-code cell.
    pub fn new(memo: bool) -> Self {
        TermsTable { memo, buckets: None, nbuckets: INITIAL_BUCKETS, count: 0, stats: TermsStats::default() }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn bucket_count(&self) -> usize {
        self.nbuckets
    }

    pub fn stats(&self) -> TermsStats {
        self.stats
    }

    fn width(&self) -> usize {
        if self.memo {
            2
        } else {
            3
        }
    }

    fn term_slot(&self, entry: Addr) -> Addr {
        if self.memo {
            entry
        } else {
            entry.offset(1)
        }
    }

    fn link_slot(&self, entry: Addr) -> Addr {
        self.term_slot(entry).offset(1)
    }

    fn bucket_entry(&self, base: Addr, i: usize) -> Addr {
        base.offset(i * self.width())
    }

    fn entry_code(&self, store: &Store, entry: Addr) -> HashCode {
        if self.memo {
            stored_hcode(store, store.get(self.term_slot(entry)))
        } else {
            match store.get(entry).view() {
                CellView::Hash(h) => h,
                other => unreachable!("chain entry without code: {other:?}"),
            }
        }
    }

    fn ensure_buckets(&mut self, store: &mut Store) -> Result<Addr, ArenaError> {
        if let Some(b) = self.buckets {
            return Ok(b);
        }
        let b = store.arena.allocate_from_table(self.nbuckets * self.width(), Category::Index)?;
        self.buckets = Some(b);
        Ok(b)
    }

    /// Returns the canonical copy of `t`. On a miss `t` itself is inserted
    /// and returned; on a hit the existing copy is returned and the caller
    /// rolls back its own allocation.
    pub fn hash_consing(&mut self, store: &mut Store, t: Cell, hcode: HashCode) -> Result<Cell, ArenaError> {
        debug_assert!(hcode.is_ground());
        debug_assert!(t.is_compound() && t.addr().is_some_and(|a| a.is_table()));
        let base = self.ensure_buckets(store)?;
        let bucket = hcode.0 as usize % self.nbuckets;
        if let Some(found) = self.chain_lookup(store, bucket, t, hcode) {
            self.stats.hits += 1;
            return Ok(found);
        }
        self.stats.misses += 1;
        self.insert(store, base, self.nbuckets, t, hcode)?;
        self.count += 1;
        if self.count > self.nbuckets {
            self.expand_and_rehash(store)?;
        }
        Ok(t)
    }

    /// Walks one chain comparing codes first; terms are compared only when
    /// codes agree.
    pub fn chain_lookup(&mut self, store: &Store, bucket: usize, t: Cell, hcode: HashCode) -> Option<Cell> {
        let base = self.buckets?;
        let mut entry = self.bucket_entry(base, bucket);
        loop {
            let term = store.get(self.term_slot(entry));
            if term == Cell::EMPTY {
                return None;
            }
            self.stats.comparisons += 1;
            if self.entry_code(store, entry) == hcode {
                self.stats.structural += 1;
                if term == t || store.identical(term, t) {
                    return Some(term);
                }
            }
            match store.get(self.link_slot(entry)).view() {
                CellView::Link(next) => entry = next,
                _ => return None,
            }
        }
    }

    fn write_entry(&self, store: &mut Store, entry: Addr, term: Cell, hcode: HashCode, link: Cell) {
        if !self.memo {
            store.arena.set(entry, Cell::hash(hcode));
        }
        store.arena.set(self.term_slot(entry), term);
        store.arena.set(self.link_slot(entry), link);
    }

    fn insert(
        &self,
        store: &mut Store,
        base: Addr,
        nbuckets: usize,
        t: Cell,
        hcode: HashCode,
    ) -> Result<(), ArenaError> {
        let head = self.bucket_entry(base, hcode.0 as usize % nbuckets);
        let head_term = store.get(self.term_slot(head));
        if head_term == Cell::EMPTY {
            self.write_entry(store, head, t, hcode, Cell::EMPTY);
            return Ok(());
        }
        // Move the current head into a fresh node and put `t` inline.
        let w = self.width();
        let node = store.arena.allocate_from_table(w, Category::Index)?;
        store.arena.note_chain_node(w);
        for i in 0..w {
            let c = store.get(head.offset(i));
            store.arena.set(node.offset(i), c);
        }
        self.write_entry(store, head, t, hcode, Cell::link(node));
        Ok(())
    }

    fn entries(&self, store: &Store) -> Vec<(Cell, HashCode)> {
        self.walk(store, None)
    }

    /// Entries bucket by bucket, optionally collecting chain node addresses.
    fn walk(&self, store: &Store, mut nodes: Option<&mut Vec<Addr>>) -> Vec<(Cell, HashCode)> {
        let Some(base) = self.buckets else { return Vec::new() };
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.nbuckets {
            let mut entry = self.bucket_entry(base, i);
            loop {
                let term = store.get(self.term_slot(entry));
                if term == Cell::EMPTY {
                    break;
                }
                out.push((term, self.entry_code(store, entry)));
                match store.get(self.link_slot(entry)).view() {
                    CellView::Link(next) => {
                        if let Some(nodes) = nodes.as_deref_mut() {
                            nodes.push(next);
                        }
                        entry = next;
                    }
                    _ => break,
                }
            }
        }
        out
    }

    /// Every stored `(term, code)` pair, bucket by bucket.
    pub fn stored_terms(&self, store: &Store) -> Vec<(Cell, HashCode)> {
        self.entries(store)
    }

    /// Doubles the bucket array and re-buckets every entry by its stored
    /// code. No term is traversed.
    /// The old array and chain nodes are released.
    pub fn expand_and_rehash(&mut self, store: &mut Store) -> Result<(), ArenaError> {
        let mut nodes = Vec::new();
        let entries = self.walk(store, Some(&mut nodes));
        let n = self.nbuckets * 2;
        let w = self.width();
        let base = store.arena.allocate_from_table(n * w, Category::Index)?;
        for (term, code) in entries {
            self.insert(store, base, n, term, code)?;
        }
        if let Some(old) = self.buckets {
            store.arena.release(old, self.nbuckets * w, Category::Index);
        }
        for node in nodes {
            store.arena.release_chain_node(node, w);
        }
        self.buckets = Some(base);
        self.nbuckets = n;
        self.stats.expansions += 1;
        Ok(())
    }

    /// Checks every entry: ground table compound, stored code equal to the
    /// recomputed structural hash, correct bucket, no structural duplicate
    /// within a bucket. Returns the number of entries checked.
    pub fn audit(&self, store: &Store) -> Result<usize, AuditError> {
        let entries = self.entries(store);
        let mut by_bucket: Vec<Vec<Cell>> = vec![Vec::new(); self.nbuckets];
        for &(term, stored) in &entries {
            if !term.is_compound() || !term.addr().is_some_and(|a| a.is_table()) || !store.is_ground(term) {
                return Err(AuditError::NotCanonical(term));
            }
            let recomputed = hashing::structural_hcode(store, term);
            if recomputed != stored {
                return Err(AuditError::CodeMismatch { term, stored, recomputed });
            }
            let b = stored.0 as usize % self.nbuckets;
            for &other in &by_bucket[b] {
                if store.identical(other, term) {
                    return Err(AuditError::Duplicate(other, term));
                }
            }
            by_bucket[b].push(term);
        }
        // Bucket placement: recheck by walking each bucket.
        if let Some(base) = self.buckets {
            for i in 0..self.nbuckets {
                let mut entry = self.bucket_entry(base, i);
                loop {
                    let term = store.get(self.term_slot(entry));
                    if term == Cell::EMPTY {
                        break;
                    }
                    if self.entry_code(store, entry).0 as usize % self.nbuckets != i {
                        return Err(AuditError::Misplaced(term));
                    }
                    match store.get(self.link_slot(entry)).view() {
                        CellView::Link(next) => entry = next,
                        _ => break,
                    }
                }
            }
        }
        Ok(entries.len())
    }
}

/// Memoized code of a table-resident compound: the cell just before its
/// block.
pub fn stored_hcode(store: &Store, t: Cell) -> HashCode {
    let p = match t.view() {
        CellView::List(p) | CellView::Struct(p) => p,
        other => panic!("stored_hcode on non-compound {other:?}"),
    };
    debug_assert!(p.is_table());
    match store.get(p.pred()).view() {
        CellView::Hash(h) => h,
        other => panic!("no memoized code before {p:?}: {other:?}"),
    }
}
