use super::cell::{Addr, Cell, CellView};

/// Execution heap with a value trail.
///
/// The trail records `(address, previous cell)` pairs, so any write made
/// through [`Heap::assign`] can be undone exactly, whether it bound a
/// variable or redirected an argument slot.
#[derive(Debug, Default)]
pub struct Heap {
    cells: Vec<Cell>,
    trail: Vec<(Addr, Cell)>,
}

impl Heap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Next free heap index.
    #[inline]
    pub fn top(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn trail_mark(&self) -> usize {
        self.trail.len()
    }

    #[inline]
    pub fn get(&self, addr: Addr) -> Cell {
        debug_assert!(addr.is_heap());
        self.cells[addr.index()]
    }

    /// Untrailed write; used while building fresh structure.
    #[inline]
    pub fn set(&mut self, addr: Addr, cell: Cell) {
        debug_assert!(addr.is_heap());
        self.cells[addr.index()] = cell;
    }

    pub fn push(&mut self, cell: Cell) -> Addr {
        let a = Addr::heap(self.cells.len());
        self.cells.push(cell);
        a
    }

    /// Reserves `n` cells, initialised to `EMPTY`.
    pub fn alloc(&mut self, n: usize) -> Addr {
        let a = Addr::heap(self.cells.len());
        self.cells.resize(self.cells.len() + n, Cell::EMPTY);
        a
    }

    pub fn new_var(&mut self) -> Cell {
        let a = Addr::heap(self.cells.len());
        let c = Cell::reference(a);
        self.cells.push(c);
        c
    }

    /// Trailed write.
    #[inline]
    pub fn assign(&mut self, addr: Addr, cell: Cell) {
        let old = self.get(addr);
        self.trail.push((addr, old));
        self.set(addr, cell);
    }

    /// Restores every cell written since `mark`, newest first.
    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (addr, old) = self.trail.pop().expect("trail above mark");
            if addr.index() < self.cells.len() {
                self.cells[addr.index()] = old;
            }
        }
    }

    /// Undoes only the variable numberings recorded since `mark`, keeping
    /// other trailed writes (argument-slot redirections) in place and on
    /// the trail.
    pub fn undo_numbering(&mut self, mark: usize) {
        let tail = self.trail.split_off(mark);
        let (numbered, kept): (Vec<_>, Vec<_>) =
            tail.into_iter().partition(|&(addr, _)| matches!(self.get(addr).view(), CellView::NumVar(_)));
        for (addr, old) in numbered.into_iter().rev() {
            self.set(addr, old);
        }
        self.trail.extend(kept);
    }

    /// Drops cells above `top`. Callers must have undone any trail entries
    /// that point above it.
    pub fn truncate(&mut self, top: usize) {
        self.cells.truncate(top);
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undo_restores_bindings() {
        let mut h = Heap::new();
        let x = h.new_var();
        let y = h.new_var();
        let mark = h.trail_mark();
        h.assign(x.addr().unwrap(), Cell::int(1).unwrap());
        h.assign(y.addr().unwrap(), Cell::int(2).unwrap());
        h.undo_to(mark);
        assert_eq!(h.get(x.addr().unwrap()), x);
        assert_eq!(h.get(y.addr().unwrap()), y);
        // no-op at the current top
        let mark = h.trail_mark();
        h.undo_to(mark);
        assert_eq!(h.trail_mark(), mark);
    }

    #[test]
    fn undo_numbering_keeps_slot_writes() {
        let mut h = Heap::new();
        let v = h.new_var();
        let slot = h.push(Cell::int(5).unwrap());
        let mark = h.trail_mark();
        h.assign(v.addr().unwrap(), Cell::numvar(0));
        h.assign(slot, Cell::int(9).unwrap());
        h.undo_numbering(mark);
        assert_eq!(h.get(v.addr().unwrap()), v);
        assert_eq!(h.get(slot), Cell::int(9).unwrap());
        assert_eq!(h.trail_mark(), mark + 1);
        h.undo_to(mark);
        assert_eq!(h.get(slot), Cell::int(5).unwrap());
    }
}
