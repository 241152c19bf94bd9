use thiserror::Error;

use super::cell::{Addr, Cell, CellView};
use super::heap::Heap;
use super::symbols::{SymId, SymbolTable};
use crate::arena::TableArena;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("functor {name}/{arity} applied to {given} arguments")]
    ArityMismatch { name: String, arity: usize, given: usize },
    #[error("structures need arity >= 1; use an atom for {0}/0")]
    ZeroArity(String),
    #[error("cannot bind non-variable cell {0:?}")]
    NotAVariable(Cell),
    #[error("integer {0} out of range")]
    IntOutOfRange(i64),
}

/// Heap, table area and symbol table: everything a cell address can point
/// into.
#[derive(Debug, Default)]
pub struct Store {
    pub heap: Heap,
    pub arena: TableArena,
    pub symbols: SymbolTable,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn get(&self, addr: Addr) -> Cell {
        if addr.is_heap() {
            self.heap.get(addr)
        } else {
            self.arena.get(addr)
        }
    }

    /// Whether an LST/STR payload points into the heap rather than the
    /// table area.
    #[inline]
    pub fn is_heap_reference(&self, addr: Addr) -> bool {
        addr.is_heap()
    }

    pub fn make_atom(&mut self, name: &str) -> Cell {
        Cell::atom(self.symbols.intern(name, 0))
    }

    pub fn nil(&self) -> Cell {
        Cell::atom(SymbolTable::NIL)
    }

    pub fn make_int(&self, v: i64) -> Result<Cell, TermError> {
        Cell::int(v).ok_or(TermError::IntOutOfRange(v))
    }

    pub fn new_var(&mut self) -> Cell {
        self.heap.new_var()
    }

    pub fn make_cons(&mut self, car: Cell, cdr: Cell) -> Cell {
        let p = self.heap.alloc(2);
        self.heap.set(p, car);
        self.heap.set(p.offset(1), cdr);
        Cell::list(p)
    }

    pub fn make_struct(&mut self, sym: SymId, args: &[Cell]) -> Result<Cell, TermError> {
        let arity = self.symbols.arity(sym);
        if arity == 0 {
            return Err(TermError::ZeroArity(self.symbols.name(sym).to_string()));
        }
        if arity != args.len() {
            return Err(TermError::ArityMismatch {
                name: self.symbols.name(sym).to_string(),
                arity,
                given: args.len(),
            });
        }
        let p = self.heap.alloc(arity + 1);
        self.heap.set(p, Cell::functor(sym));
        for (i, &a) in args.iter().enumerate() {
            self.heap.set(p.offset(i + 1), a);
        }
        Ok(Cell::structure(p))
    }

    /// Builds `[items... | tail]` on the heap.
    pub fn make_list(&mut self, items: &[Cell], tail: Cell) -> Cell {
        items.iter().rev().fold(tail, |cdr, &car| self.make_cons(car, cdr))
    }

    pub fn make_int_list(&mut self, items: &[i64]) -> Result<Cell, TermError> {
        let cells = items.iter().map(|&v| self.make_int(v)).collect::<Result<Vec<_>, _>>()?;
        let nil = self.nil();
        Ok(self.make_list(&cells, nil))
    }

    /// Follows REF chains to a non-REF cell or an unbound variable.
    #[inline]
    pub fn deref(&self, mut t: Cell) -> Cell {
        while let CellView::Ref(a) = t.view() {
            let next = self.get(a);
            if next == t {
                break;
            }
            t = next;
        }
        t
    }

    /// Functor and argument block of a callable or structure cell.
    pub fn functor_of(&self, t: Cell) -> Option<(SymId, Option<Addr>)> {
        match self.deref(t).view() {
            CellView::Atom(s) => Some((s, None)),
            CellView::Struct(p) => match self.get(p).view() {
                CellView::Functor(s) => Some((s, Some(p))),
                _ => None,
            },
            _ => None,
        }
    }

    /// Binds an unbound heap variable, recording the old cell on the trail.
    pub fn bind(&mut self, var: Cell, value: Cell) -> Result<(), TermError> {
        let v = self.deref(var);
        match v.view() {
            CellView::Ref(a) if a.is_heap() => {
                self.heap.assign(a, value);
                Ok(())
            }
            _ => Err(TermError::NotAVariable(v)),
        }
    }

    pub fn undo_to(&mut self, mark: usize) {
        self.heap.undo_to(mark);
    }

    fn bind_vars(&mut self, a: Addr, b: Addr) {
        // Newer variable points at the older one.
        if a > b {
            self.heap.assign(a, Cell::reference(b));
        } else {
            self.heap.assign(b, Cell::reference(a));
        }
    }

    /// Unification without occurs check. On failure every binding made by
    /// this call is undone.
    pub fn unify(&mut self, a: Cell, b: Cell) -> bool {
        let mark = self.heap.trail_mark();
        if self.unify_inner(a, b) {
            true
        } else {
            self.heap.undo_to(mark);
            false
        }
    }

    fn unify_inner(&mut self, a: Cell, b: Cell) -> bool {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let a = self.deref(a);
            let b = self.deref(b);
            if a == b {
                continue;
            }
            match (a.view(), b.view()) {
                (CellView::Ref(x), CellView::Ref(y)) => self.bind_vars(x, y),
                (CellView::Ref(x), _) => self.heap.assign(x, b),
                (_, CellView::Ref(y)) => self.heap.assign(y, a),
                (CellView::List(p), CellView::List(q)) => {
                    work.push((self.get(p.offset(1)), self.get(q.offset(1))));
                    work.push((self.get(p), self.get(q)));
                }
                (CellView::Struct(p), CellView::Struct(q)) => {
                    let f = self.get(p);
                    if f != self.get(q) {
                        return false;
                    }
                    let CellView::Functor(sym) = f.view() else { return false };
                    for i in (1..=self.symbols.arity(sym)).rev() {
                        work.push((self.get(p.offset(i)), self.get(q.offset(i))));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Binds each distinct unbound variable of `t` to a numbered variable,
    /// in left-to-right first-occurrence order starting from `start`.
    /// Returns the next free ordinal. Bindings are trailed.
    pub fn number_vars_from(&mut self, t: Cell, start: u32) -> u32 {
        let mut next = start;
        let mut work = vec![t];
        while let Some(t) = work.pop() {
            let t = self.deref(t);
            match t.view() {
                CellView::Ref(a) => {
                    self.heap.assign(a, Cell::numvar(next));
                    next += 1;
                }
                // The table area never holds unbound variables.
                CellView::List(p) if p.is_heap() => {
                    work.push(self.get(p.offset(1)));
                    work.push(self.get(p));
                }
                CellView::Struct(p) if p.is_heap() => {
                    let CellView::Functor(sym) = self.get(p).view() else { continue };
                    for i in (1..=self.symbols.arity(sym)).rev() {
                        work.push(self.get(p.offset(i)));
                    }
                }
                _ => {}
            }
        }
        next
    }

    pub fn number_vars(&mut self, t: Cell) -> u32 {
        self.number_vars_from(t, 0)
    }

    /// Cell-by-cell structural identity after dereferencing. Unbound
    /// variables are identical only to themselves; numbered variables by
    /// ordinal. On numbered terms this is the variant test.
    pub fn identical(&self, a: Cell, b: Cell) -> bool {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let a = self.deref(a);
            let b = self.deref(b);
            if a == b {
                continue;
            }
            match (a.view(), b.view()) {
                (CellView::List(p), CellView::List(q)) => {
                    work.push((self.get(p.offset(1)), self.get(q.offset(1))));
                    work.push((self.get(p), self.get(q)));
                }
                (CellView::Struct(p), CellView::Struct(q)) => {
                    let f = self.get(p);
                    if f != self.get(q) {
                        return false;
                    }
                    let CellView::Functor(sym) = f.view() else { return false };
                    for i in (1..=self.symbols.arity(sym)).rev() {
                        work.push((self.get(p.offset(i)), self.get(q.offset(i))));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Variant test on numbered terms.
    pub fn variant(&self, a: Cell, b: Cell) -> bool {
        self.identical(a, b)
    }

    /// True iff `t` contains no unbound or numbered variable.
    pub fn is_ground(&self, t: Cell) -> bool {
        let mut work = vec![t];
        while let Some(t) = work.pop() {
            match self.deref(t).view() {
                CellView::Ref(_) | CellView::NumVar(_) => return false,
                CellView::List(p) => {
                    work.push(self.get(p.offset(1)));
                    work.push(self.get(p));
                }
                CellView::Struct(p) => {
                    let CellView::Functor(sym) = self.get(p).view() else { continue };
                    for i in 1..=self.symbols.arity(sym) {
                        work.push(self.get(p.offset(i)));
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// Elements of a proper list, or `None` if `t` is not one.
    pub fn list_items(&self, t: Cell) -> Option<Vec<Cell>> {
        let mut out = Vec::new();
        let mut cur = self.deref(t);
        loop {
            match cur.view() {
                CellView::List(p) => {
                    out.push(self.deref(self.get(p)));
                    cur = self.deref(self.get(p.offset(1)));
                }
                CellView::Atom(SymbolTable::NIL) => return Some(out),
                _ => return None,
            }
        }
    }
}
