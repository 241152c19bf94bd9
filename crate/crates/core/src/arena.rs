//! Table area.
//!
//! A growable cell region addressed by index, so addresses stay valid for
//! the life of the engine even when the backing vector reallocates. Only
//! the most recent live allocation can be rolled back; that is exactly the
//! pattern the copier needs after a hash-consing hit.

use thiserror::Error;

use crate::terms::{Addr, Cell};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArenaError {
    #[error("table area exhausted allocating {0} cells")]
    Exhausted(usize),
    #[error("rollback of {requested} cells does not match the most recent allocation ({live})")]
    Discipline { requested: usize, live: usize },
    #[error("zero-sized table allocation")]
    ZeroSized,
}

/// What an allocation holds; used cells are reported per category.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Category {
    /// Copied term blocks, including memoized hash cells.
    Term = 0,
    /// Subgoal and answer record blocks.
    Record = 1,
    /// Terms-table bucket arrays and chain nodes.
    Index = 2,
}

const CATEGORIES: usize = 3;

#[derive(Copy, Clone, Debug)]
struct Allocation {
    start: u32,
    category: Category,
}

#[derive(Debug, Default)]
pub struct TableArena {
    cells: Vec<Cell>,
    top: usize,
    log: Vec<Allocation>,
    used: [usize; CATEGORIES],
    chain_node_cells: usize,
    released: usize,
}

impl TableArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn allocate_from_table(&mut self, n: usize, category: Category) -> Result<Addr, ArenaError> {
        if n == 0 {
            return Err(ArenaError::ZeroSized);
        }
        let start = self.top;
        let end = start + n;
        if end >= (1usize << 31) {
            return Err(ArenaError::Exhausted(n));
        }
        if end > self.cells.len() {
            let grow = end - self.cells.len();
            self.cells.try_reserve(grow).map_err(|_| ArenaError::Exhausted(n))?;
            self.cells.resize(end, Cell::EMPTY);
        }
        self.cells[start..end].fill(Cell::EMPTY);
        self.top = end;
        self.log.push(Allocation { start: start as u32, category });
        self.used[category as usize] += n;
        Ok(Addr::table(start))
    }

    /// Rolls back the most recent live allocation, which must be `n` cells.
    pub fn deallocate_to_table(&mut self, n: usize) -> Result<(), ArenaError> {
        let live = match self.log.last() {
            Some(a) => self.top - a.start as usize,
            None => 0,
        };
        if live != n || n == 0 {
            return Err(ArenaError::Discipline { requested: n, live });
        }
        let a = self.log.pop().expect("checked above");
        self.top = a.start as usize;
        self.used[a.category as usize] -= n;
        Ok(())
    }

    /// Returns a block that is no longer referenced (a superseded bucket
    /// array or chain node). Its cells stop counting as used but are not
    /// reused, so rollback order is unaffected.
    pub fn release(&mut self, addr: Addr, n: usize, category: Category) {
        debug_assert!(addr.is_table() && addr.index() + n <= self.top);
        self.used[category as usize] -= n;
        self.released += n;
    }

    /// Cells given back through [`TableArena::release`].
    pub fn released_cells(&self) -> usize {
        self.released
    }

    /// Region membership; rewound cells still belong to the arena.
    pub fn in_table(&self, addr: Addr) -> bool {
        addr.is_table() && addr.index() < self.cells.len()
    }

    /// Live cells, net of rollbacks and releases.
    pub fn used_cells(&self) -> usize {
        self.used.iter().sum()
    }

    pub fn used_by(&self, category: Category) -> usize {
        self.used[category as usize]
    }

    /// Cells of index allocations that are chain nodes rather than bucket
    /// arrays.
    pub fn chain_node_cells(&self) -> usize {
        self.chain_node_cells
    }

    pub(crate) fn note_chain_node(&mut self, n: usize) {
        self.chain_node_cells += n;
    }

    pub(crate) fn release_chain_node(&mut self, addr: Addr, n: usize) {
        self.release(addr, n, Category::Index);
        self.chain_node_cells -= n;
    }

    pub fn allocations(&self) -> usize {
        self.log.len()
    }

    #[inline]
    pub fn get(&self, addr: Addr) -> Cell {
        debug_assert!(addr.is_table() && addr.index() < self.top, "read outside live table: {addr:?}");
        self.cells[addr.index()]
    }

    #[inline]
    pub fn set(&mut self, addr: Addr, cell: Cell) {
        debug_assert!(addr.is_table() && addr.index() < self.top, "write outside live table: {addr:?}");
        self.cells[addr.index()] = cell;
    }

    /// Live allocations as `(start, len)` pairs, oldest first.
    pub fn live_allocations(&self) -> impl Iterator<Item = (Addr, usize)> + '_ {
        self.log.iter().enumerate().map(move |(i, a)| {
            let end = self.log.get(i + 1).map_or(self.top, |b| b.start as usize);
            (Addr::table(a.start as usize), end - a.start as usize)
        })
    }

    /// Live table cells, for full-table scans.
    pub fn live_cells(&self) -> &[Cell] {
        &self.cells[..self.top]
    }
}
