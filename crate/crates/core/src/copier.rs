//! Copying heap terms into the table area.
//!
//! Three sharing modes:
//! * `None`: every copy gets fresh blocks.
//! * `HashCons`: ground compounds are interned in the terms-table; a copy
//!   that turns out to be a duplicate is rolled back.
//! * `Enhanced`: as `HashCons`, but every table compound block carries its
//!   hash code in the cell before it, so a table-resident compound met
//!   during a later copy is reused as-is in one step.
//!
//! Lists are copied by a two-pass loop: the first pass reverses the heap
//! spine in place, the second walks it back, restoring each cdr cell and
//! building the copy suffix-first.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::arena::{ArenaError, Category};
use crate::hashcons::{stored_hcode, TermsTable};
use crate::hashing::{self, HashCode};
use crate::terms::{Addr, Cell, CellView, Store};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum SharingMode {
    None,
    HashCons,
    #[default]
    Enhanced,
}

impl SharingMode {
    pub const ALL: [SharingMode; 3] = [SharingMode::None, SharingMode::HashCons, SharingMode::Enhanced];

    pub fn name(self) -> &'static str {
        match self {
            SharingMode::None => "none",
            SharingMode::HashCons => "hashcons",
            SharingMode::Enhanced => "enhanced",
        }
    }

    /// Whether table compound blocks carry a leading code cell.
    pub fn memoizes(self) -> bool {
        self == SharingMode::Enhanced
    }

    pub fn interns(self) -> bool {
        self != SharingMode::None
    }
}

impl fmt::Display for SharingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SharingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(SharingMode::None),
            "hashcons" => Ok(SharingMode::HashCons),
            "enhanced" => Ok(SharingMode::Enhanced),
            _ => Err(format!("unknown sharing mode '{s}' (expected none, hashcons or enhanced)")),
        }
    }
}

/// How subgoal and answer keys are computed.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum HashFlavor {
    /// Every argument hashed in full.
    #[default]
    Full,
    /// Only the first three elements of the first argument.
    Prefix3,
}

impl HashFlavor {
    pub fn name(self) -> &'static str {
        match self {
            HashFlavor::Full => "full",
            HashFlavor::Prefix3 => "prefix3",
        }
    }
}

impl fmt::Display for HashFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HashFlavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(HashFlavor::Full),
            "prefix3" => Ok(HashFlavor::Prefix3),
            _ => Err(format!("unknown hash flavor '{s}' (expected full or prefix3)")),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct CopyCounters {
    pub cells_copied: u64,
    pub traversal_steps: u64,
    pub hash_combines: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CopyError {
    #[error("unbound variable met while copying; variables must be numbered first")]
    UnboundVariable,
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// Seed of the argument-code fold in [`Copier::copy_subgoal_args`].
pub const ARGS_SEED: HashCode = HashCode(1);

#[derive(Debug)]
pub struct Copier {
    mode: SharingMode,
    pub terms: TermsTable,
    pub counters: CopyCounters,
}

/// Pending list cells in pass two, innermost first.
struct Spine {
    /// Last heap cons reached (spine reversed through its cdr cells).
    heap_last: Option<Addr>,
    /// Raw REF cells displaced from reversed cdr slots.
    refs: Vec<Cell>,
    /// Table-resident conses following the heap prefix, in spine order.
    table: Vec<Addr>,
    /// The cell ending the spine.
    end: Cell,
    /// The cell the last heap cdr pointed at when it was not a REF.
    after_heap: Cell,
}

impl Copier {
    pub fn new(mode: SharingMode) -> Self {
        Copier { mode, terms: TermsTable::new(mode.memoizes()), counters: CopyCounters::default() }
    }

    pub fn mode(&self) -> SharingMode {
        self.mode
    }

    /// Copies `t` into the table cell `dest` and returns its structural
    /// code (0 when non-ground).
    pub fn copy_term(&mut self, store: &mut Store, t: Cell, dest: Addr) -> Result<HashCode, CopyError> {
        let (cell, code) = self.copy_value(store, t)?;
        store.arena.set(dest, cell);
        Ok(code)
    }

    /// Copies `t` and returns the table cell together with its code.
    pub fn copy_value(&mut self, store: &mut Store, t: Cell) -> Result<(Cell, HashCode), CopyError> {
        let t = store.deref(t);
        match t.view() {
            CellView::Atom(_) | CellView::Int(_) => {
                self.counters.traversal_steps += 1;
                Ok((t, hashing::atomic_hcode(store, t).expect("atomic")))
            }
            CellView::NumVar(_) => {
                self.counters.traversal_steps += 1;
                Ok((t, HashCode::NON_GROUND))
            }
            CellView::List(p) | CellView::Struct(p) if p.is_table() && self.mode.memoizes() => {
                self.counters.traversal_steps += 1;
                Ok((t, stored_hcode(store, t)))
            }
            CellView::List(_) => self.copy_list_iterative(store, t),
            CellView::Struct(p) => self.copy_struct(store, p),
            CellView::Ref(_) => Err(CopyError::UnboundVariable),
            other => unreachable!("copying internal cell {other:?}"),
        }
    }

    fn header(&self) -> usize {
        usize::from(self.mode.memoizes())
    }

    fn copy_struct(&mut self, store: &mut Store, p: Addr) -> Result<(Cell, HashCode), CopyError> {
        self.counters.traversal_steps += 1;
        let CellView::Functor(sym) = store.get(p).view() else { unreachable!("structure block without functor") };
        let arity = store.symbols.arity(sym);
        let mut code = store.symbols.hcode(sym);
        let size = arity + 1 + self.header();
        let block = store.arena.allocate_from_table(size, Category::Term)?.offset(self.header());
        store.arena.set(block, Cell::functor(sym));
        for i in 1..=arity {
            let (c, h) = self.copy_value(store, store.get(p.offset(i)))?;
            store.arena.set(block.offset(i), c);
            code = hashing::seq_hcode(code, h);
            self.counters.hash_combines += 1;
        }
        self.counters.cells_copied += size as u64;
        self.finish(store, Cell::structure(block), code, size)
    }

    /// Stores the code cell (enhanced) and interns the block when ground.
    fn finish(
        &mut self,
        store: &mut Store,
        cell: Cell,
        code: HashCode,
        size: usize,
    ) -> Result<(Cell, HashCode), CopyError> {
        if self.mode.memoizes() {
            store.arena.set(cell.addr().expect("compound").pred(), Cell::hash(code));
        }
        if self.mode.interns() && code.is_ground() {
            let canon = self.terms.hash_consing(store, cell, code)?;
            if canon != cell {
                store.arena.deallocate_to_table(size)?;
            }
            return Ok((canon, code));
        }
        Ok((cell, code))
    }

    fn cons(
        &mut self,
        store: &mut Store,
        car: Cell,
        car_code: HashCode,
        cdr: Cell,
        cdr_code: HashCode,
    ) -> Result<(Cell, HashCode), CopyError> {
        let size = 2 + self.header();
        let block = store.arena.allocate_from_table(size, Category::Term)?.offset(self.header());
        store.arena.set(block, car);
        store.arena.set(block.offset(1), cdr);
        self.counters.cells_copied += size as u64;
        self.counters.hash_combines += 1;
        let code = hashing::seq_hcode(car_code, cdr_code);
        self.finish(store, Cell::list(block), code, size)
    }

    /// Pass one: reverse the heap part of the spine through the cdr cells.
    fn reverse_spine(&mut self, store: &mut Store, list: Cell) -> Spine {
        let mut spine = Spine { heap_last: None, refs: Vec::new(), table: Vec::new(), end: list, after_heap: list };
        let mut cur = list;
        while let CellView::List(p) = cur.view() {
            if p.is_table() {
                if self.mode.memoizes() {
                    break;
                }
                self.counters.traversal_steps += 1;
                spine.table.push(p);
                cur = store.arena.get(p.offset(1));
                continue;
            }
            self.counters.traversal_steps += 1;
            let raw = store.heap.get(p.offset(1));
            let via_ref = raw.is_ref();
            if via_ref {
                spine.refs.push(raw);
            }
            store.heap.set(p.offset(1), Cell::reversed(spine.heap_last, via_ref));
            spine.heap_last = Some(p);
            cur = store.deref(raw);
            spine.after_heap = cur;
        }
        spine.end = cur;
        spine
    }

    /// Copies a list without recursion along its spine. The heap is left
    /// exactly as it was found, even on error.
    pub fn copy_list_iterative(&mut self, store: &mut Store, list: Cell) -> Result<(Cell, HashCode), CopyError> {
        let mut spine = self.reverse_spine(store, list);
        let mut acc = self.copy_value(store, spine.end);
        for &p in spine.table.iter().rev() {
            acc = acc.and_then(|(cdr, cdr_code)| {
                let (car, car_code) = self.copy_value(store, store.arena.get(p))?;
                self.cons(store, car, car_code, cdr, cdr_code)
            });
        }
        let mut following = spine.after_heap;
        let mut node = spine.heap_last;
        while let Some(p) = node {
            let CellView::Reversed { prev, via_ref } = store.heap.get(p.offset(1)).view() else {
                unreachable!("spine cell lost its reversal mark")
            };
            let original = if via_ref { spine.refs.pop().expect("saved ref") } else { following };
            store.heap.set(p.offset(1), original);
            if acc.is_ok() {
                acc = acc.and_then(|(cdr, cdr_code)| {
                    let (car, car_code) = self.copy_value(store, store.heap.get(p))?;
                    self.cons(store, car, car_code, cdr, cdr_code)
                });
            }
            following = Cell::list(p);
            node = prev;
        }
        debug_assert!(spine.refs.is_empty());
        acc
    }

    /// Copies the `arity` arguments held in `slots` into `dest+i` and folds
    /// their codes. In enhanced mode every ground compound argument slot is
    /// redirected (trailed) to its table copy.
    pub fn copy_subgoal_args(&mut self, store: &mut Store, slots: &[Addr], dest: Addr) -> Result<HashCode, CopyError> {
        let mut code = ARGS_SEED;
        for (i, &slot) in slots.iter().enumerate() {
            let h = self.copy_term(store, store.get(slot), dest.offset(i))?;
            code = hashing::seq_hcode(code, h);
            self.counters.hash_combines += 1;
            if self.mode.memoizes() && h.is_ground() && slot.is_heap() {
                let copy = store.arena.get(dest.offset(i));
                if copy.is_compound() && store.heap.get(slot) != copy {
                    store.heap.assign(slot, copy);
                }
            }
        }
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::VarNames;
    use proptest::prelude::*;

    fn int(v: i64) -> Cell {
        Cell::int(v).unwrap()
    }

    fn copy(store: &mut Store, c: &mut Copier, t: Cell) -> (Cell, HashCode) {
        c.copy_value(store, t).unwrap()
    }

    fn heap_snapshot(s: &Store) -> Vec<u64> {
        s.heap.cells().iter().map(|c| c.bits()).collect()
    }

    /// Straightforward recursive copier used as an oracle.
    fn reference_copy(store: &mut Store, mode: SharingMode, tt: &mut TermsTable, t: Cell) -> (Cell, HashCode) {
        let t = store.deref(t);
        let hdr = usize::from(mode.memoizes());
        let (cell, code, size) = match t.view() {
            CellView::Atom(_) | CellView::Int(_) => return (t, hashing::atomic_hcode(store, t).unwrap()),
            CellView::NumVar(_) => return (t, HashCode(0)),
            CellView::List(p) | CellView::Struct(p) if p.is_table() && mode.memoizes() => {
                return (t, stored_hcode(store, t))
            }
            CellView::List(p) => {
                let (cdr, hd) = reference_copy(store, mode, tt, store.get(p.offset(1)));
                let (car, ha) = reference_copy(store, mode, tt, store.get(p));
                let b = store.arena.allocate_from_table(2 + hdr, Category::Term).unwrap().offset(hdr);
                store.arena.set(b, car);
                store.arena.set(b.offset(1), cdr);
                (Cell::list(b), hashing::seq_hcode(ha, hd), 2 + hdr)
            }
            CellView::Struct(p) => {
                let CellView::Functor(sym) = store.get(p).view() else { panic!() };
                let n = store.symbols.arity(sym);
                let b = store.arena.allocate_from_table(n + 1 + hdr, Category::Term).unwrap().offset(hdr);
                store.arena.set(b, Cell::functor(sym));
                let mut h = store.symbols.hcode(sym);
                for i in 1..=n {
                    let (c, hc) = reference_copy(store, mode, tt, store.get(p.offset(i)));
                    store.arena.set(b.offset(i), c);
                    h = hashing::seq_hcode(h, hc);
                }
                (Cell::structure(b), h, n + 1 + hdr)
            }
            other => panic!("{other:?}"),
        };
        if mode.memoizes() {
            store.arena.set(cell.addr().unwrap().pred(), Cell::hash(code));
        }
        if mode.interns() && code.is_ground() {
            let canon = tt.hash_consing(store, cell, code).unwrap();
            if canon != cell {
                store.arena.deallocate_to_table(size).unwrap();
            }
            return (canon, code);
        }
        (cell, code)
    }

    #[derive(Clone, Debug)]
    enum Shape {
        Atom(u8),
        Int(i64),
        NumVar(u8),
        List(Vec<Shape>, Box<Shape>),
        Struct(u8, Vec<Shape>),
    }

    fn shape() -> impl Strategy<Value = Shape> {
        let leaf = prop_oneof![
            (0u8..4).prop_map(Shape::Atom),
            (-5i64..5).prop_map(Shape::Int),
            (0u8..3).prop_map(Shape::NumVar),
        ];
        leaf.prop_recursive(4, 40, 5, |inner| {
            prop_oneof![
                (prop::collection::vec(inner.clone(), 0..5), inner.clone())
                    .prop_map(|(items, tail)| Shape::List(items, Box::new(tail))),
                (0u8..3, prop::collection::vec(inner, 1..4)).prop_map(|(f, args)| Shape::Struct(f, args)),
            ]
        })
    }

    fn build(s: &mut Store, sh: &Shape) -> Cell {
        match sh {
            Shape::Atom(a) => s.make_atom(["a", "b", "c", "[]"][*a as usize]),
            Shape::Int(v) => int(*v),
            Shape::NumVar(n) => Cell::numvar(*n as u32),
            Shape::List(items, tail) => {
                let cells: Vec<Cell> = items.iter().map(|i| build(s, i)).collect();
                let t = build(s, tail);
                s.make_list(&cells, t)
            }
            Shape::Struct(f, args) => {
                let cells: Vec<Cell> = args.iter().map(|a| build(s, a)).collect();
                let sym = s.symbols.intern(["f", "g", "h"][*f as usize], cells.len());
                s.make_struct(sym, &cells).unwrap()
            }
        }
    }

    #[test]
    fn numvar_is_copied_verbatim_with_code_zero() {
        for mode in SharingMode::ALL {
            let mut s = Store::new();
            let mut c = Copier::new(mode);
            assert_eq!(copy(&mut s, &mut c, Cell::numvar(0)), (Cell::numvar(0), HashCode(0)));
            assert_eq!(s.arena.used_cells(), 0);
        }
    }

    #[test]
    fn block_sizes_per_mode() {
        for (mode, cons_cells, struct_cells) in
            [(SharingMode::None, 2, 3), (SharingMode::HashCons, 2, 3), (SharingMode::Enhanced, 3, 4)]
        {
            let mut s = Store::new();
            let mut c = Copier::new(mode);
            let l = s.make_cons(Cell::numvar(0), s.nil());
            copy(&mut s, &mut c, l);
            assert_eq!(s.arena.used_by(Category::Term), cons_cells);
            let f = s.symbols.intern("f", 2);
            let t = s.make_struct(f, &[Cell::numvar(0), int(1)]).unwrap();
            copy(&mut s, &mut c, t);
            assert_eq!(s.arena.used_by(Category::Term), cons_cells + struct_cells);
        }
    }

    #[test]
    fn memoized_code_of_f1() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::Enhanced);
        let f = s.symbols.intern("f", 1);
        let t = s.make_struct(f, &[int(1)]).unwrap();
        let (copied, code) = copy(&mut s, &mut c, t);
        let expected = hashing::seq_hcode(s.symbols.hcode(f), hashing::int_hcode(1));
        assert_eq!(code, expected);
        assert_eq!(stored_hcode(&s, copied), expected);
    }

    #[test]
    fn duplicate_copies_roll_back() {
        for mode in [SharingMode::HashCons, SharingMode::Enhanced] {
            let mut s = Store::new();
            let mut c = Copier::new(mode);
            let a = s.make_int_list(&[1, 2]).unwrap();
            let (first, _) = copy(&mut s, &mut c, a);
            let used = s.arena.used_cells();
            let b = s.make_int_list(&[1, 2]).unwrap();
            let (second, _) = copy(&mut s, &mut c, b);
            assert_eq!(first, second);
            assert_eq!(s.arena.used_cells(), used);
            assert_eq!(c.terms.len(), 2);
        }
    }

    #[test]
    fn table_resident_term_is_reused_in_one_step() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::Enhanced);
        let l = s.make_int_list(&(1..=50).collect::<Vec<_>>()).unwrap();
        let (copied, code) = copy(&mut s, &mut c, l);
        let steps = c.counters.traversal_steps;
        let used = s.arena.used_cells();
        assert_eq!(copy(&mut s, &mut c, copied), (copied, code));
        assert_eq!(c.counters.traversal_steps, steps + 1);
        assert_eq!(s.arena.used_cells(), used);
    }

    #[test]
    fn heap_is_restored_after_list_copy() {
        let mut s = Store::new();
        let x = s.new_var();
        let items: Vec<Cell> = (0..20).map(int).collect();
        let l = s.make_list(&items[..10], x);
        let rest = s.make_list(&items[10..], s.nil());
        s.bind(x, rest).unwrap();
        let before = heap_snapshot(&s);
        for mode in SharingMode::ALL {
            let mut c = Copier::new(mode);
            let (copied, _) = copy(&mut s, &mut c, l);
            assert_eq!(heap_snapshot(&s), before);
            assert_eq!(s.show(copied), s.show(l));
        }
    }

    #[test]
    fn heap_is_restored_after_error() {
        let mut s = Store::new();
        let x = s.new_var();
        let l = s.make_list(&[int(1), x, int(3)], s.nil());
        let before = heap_snapshot(&s);
        let mut c = Copier::new(SharingMode::HashCons);
        assert_eq!(c.copy_value(&mut s, l), Err(CopyError::UnboundVariable));
        assert_eq!(heap_snapshot(&s), before);
    }

    #[test]
    fn long_list_copies_iteratively() {
        let mut s = Store::new();
        let l = s.make_int_list(&(0..100_000).collect::<Vec<_>>()).unwrap();
        let before = heap_snapshot(&s);
        let mut c = Copier::new(SharingMode::Enhanced);
        let (copied, code) = copy(&mut s, &mut c, l);
        assert_eq!(heap_snapshot(&s), before);
        assert!(code.is_ground());
        assert_eq!(s.list_items(copied).unwrap().len(), 100_000);
    }

    #[test]
    fn mixed_heap_and_table_spine_in_hashcons_mode() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::HashCons);
        let tail = s.make_int_list(&[3, 4]).unwrap();
        let (table_tail, _) = copy(&mut s, &mut c, tail);
        let l = s.make_list(&[int(1), int(2)], table_tail);
        let before = heap_snapshot(&s);
        let (copied, code) = copy(&mut s, &mut c, l);
        assert_eq!(heap_snapshot(&s), before);
        assert_eq!(s.show(copied), "[1,2,3,4]");
        assert_eq!(code, hashing::structural_hcode(&s, l));
        assert_eq!(c.terms.audit(&s).unwrap(), 4);
    }

    #[test]
    fn matches_recursive_reference_on_lists() {
        for mode in SharingMode::ALL {
            for n in [0usize, 1, 2, 7, 100] {
                let mut runs = Vec::new();
                for use_reference in [false, true] {
                    let mut s = Store::new();
                    let items: Vec<i64> = (0..n as i64).map(|i| i % 4).collect();
                    let a = s.make_int_list(&items).unwrap();
                    let b = s.make_list(&[Cell::numvar(0)], a);
                    let mut c = Copier::new(mode);
                    let mut tt = TermsTable::new(mode.memoizes());
                    let mut out = Vec::new();
                    for t in [a, b, a] {
                        out.push(if use_reference {
                            reference_copy(&mut s, mode, &mut tt, t)
                        } else {
                            copy(&mut s, &mut c, t)
                        });
                    }
                    runs.push((out, s.arena.used_cells()));
                }
                assert_eq!(runs[0], runs[1], "mode {mode} n {n}");
            }
        }
    }

    #[test]
    fn subgoal_args_fold_and_redirect() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::Enhanced);
        let l = s.make_int_list(&[1, 2, 3]).unwrap();
        let is_list = s.symbols.intern("is_list", 1);
        let goal = s.make_struct(is_list, &[l]).unwrap();
        let slot = goal.addr().unwrap().offset(1);
        let dest = s.arena.allocate_from_table(1, Category::Record).unwrap();
        let code = c.copy_subgoal_args(&mut s, &[slot], dest).unwrap();
        assert_eq!(code, hashing::seq_hcode(ARGS_SEED, hashing::structural_hcode(&s, l)));
        let redirected = s.heap.get(slot);
        assert!(redirected.addr().unwrap().is_table());
        assert!(s.identical(redirected, l));
        // The tail of the redirected argument copies in one step.
        let CellView::List(p) = redirected.view() else { panic!() };
        let steps = c.counters.traversal_steps;
        let tail = s.arena.get(p.offset(1));
        copy(&mut s, &mut c, tail);
        assert_eq!(c.counters.traversal_steps, steps + 1);
    }

    #[test]
    fn non_ground_argument_is_not_redirected() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::Enhanced);
        let l = s.make_list(&[Cell::numvar(0), int(2), int(3)], s.nil());
        let f = s.symbols.intern("is_list", 1);
        let goal = s.make_struct(f, &[l]).unwrap();
        let slot = goal.addr().unwrap().offset(1);
        let dest = s.arena.allocate_from_table(1, Category::Record).unwrap();
        let code = c.copy_subgoal_args(&mut s, &[slot], dest).unwrap();
        assert_eq!(code, HashCode(0));
        assert_eq!(s.heap.get(slot), l);
        assert_eq!(c.terms.len(), 2);
    }

    #[test]
    fn zero_arity_returns_seed() {
        let mut s = Store::new();
        let mut c = Copier::new(SharingMode::HashCons);
        assert_eq!(c.copy_subgoal_args(&mut s, &[], Addr::table(0)).unwrap(), ARGS_SEED);
        assert_eq!(s.arena.used_cells(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn hash_agrees_with_structural_hash(sh in shape(), mode_ix in 0usize..3) {
            let mode = SharingMode::ALL[mode_ix];
            let mut s = Store::new();
            let t = build(&mut s, &sh);
            let before = heap_snapshot(&s);
            let mut c = Copier::new(mode);
            let (copied, code) = copy(&mut s, &mut c, t);
            prop_assert_eq!(code, hashing::structural_hcode(&s, t));
            prop_assert_eq!(heap_snapshot(&s), before);
            let mut n1 = VarNames::new();
            let mut n2 = VarNames::new();
            prop_assert_eq!(s.format_term(copied, &mut n1), s.format_term(t, &mut n2));
            if mode.interns() {
                c.terms.audit(&s).unwrap();
            }
        }

        #[test]
        fn ground_copies_are_idempotent(sh in shape(), mode_ix in 1usize..3) {
            let mode = SharingMode::ALL[mode_ix];
            let mut s = Store::new();
            let t = build(&mut s, &sh);
            let u = build(&mut s, &sh);
            let mut c = Copier::new(mode);
            let (a, ha) = copy(&mut s, &mut c, t);
            let used = s.arena.used_cells();
            let (b, hb) = copy(&mut s, &mut c, u);
            prop_assert_eq!(ha, hb);
            if ha.is_ground() {
                prop_assert_eq!(a, b);
                prop_assert_eq!(s.arena.used_cells(), used);
            }
        }
    }
}
