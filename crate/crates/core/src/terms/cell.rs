//! Packed tagged cells.
//!
//! Every cell is one 64-bit word: the low four bits hold the tag and the
//! remaining 60 bits hold the payload. Heap and table area share this
//! layout, so a table-resident ground term can be referenced from the heap
//! without conversion.

use std::fmt;

use super::symbols::SymId;
use crate::hashing::HashCode;

const TAG_BITS: u32 = 4;
const TAG_MASK: u64 = (1 << TAG_BITS) - 1;

const TAG_REF: u64 = 0;
const TAG_ATM: u64 = 1;
const TAG_INT: u64 = 2;
const TAG_NUMVAR: u64 = 3;
const TAG_LST: u64 = 4;
const TAG_STR: u64 = 5;
const TAG_FUN: u64 = 6;
const TAG_HASH: u64 = 7;
const TAG_LINK: u64 = 8;
const TAG_EMPTY: u64 = 9;
const TAG_REV: u64 = 10;

/// Largest magnitude an `INT` payload can carry.
pub const INT_MAX: i64 = (1 << 59) - 1;
pub const INT_MIN: i64 = -(1 << 59);

/// A region-qualified cell address.
///
/// The top bit selects the region: clear for the heap, set for the table
/// area. The low 31 bits are an index into that region.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Addr(u32);

impl Addr {
    const TABLE_BIT: u32 = 1 << 31;

    pub fn heap(index: usize) -> Addr {
        debug_assert!(index < Self::TABLE_BIT as usize);
        Addr(index as u32)
    }

    pub fn table(index: usize) -> Addr {
        debug_assert!(index < Self::TABLE_BIT as usize);
        Addr(index as u32 | Self::TABLE_BIT)
    }

    #[inline]
    pub fn is_heap(self) -> bool {
        self.0 & Self::TABLE_BIT == 0
    }

    #[inline]
    pub fn is_table(self) -> bool {
        !self.is_heap()
    }

    #[inline]
    pub fn index(self) -> usize {
        (self.0 & !Self::TABLE_BIT) as usize
    }

    #[inline]
    pub fn offset(self, by: usize) -> Addr {
        Addr(self.0 + by as u32)
    }

    /// The address one cell below this one, in the same region.
    #[inline]
    pub fn pred(self) -> Addr {
        debug_assert!(self.index() > 0);
        Addr(self.0 - 1)
    }

    fn raw(self) -> u32 {
        self.0
    }

    fn from_raw(raw: u32) -> Addr {
        Addr(raw)
    }
}

impl fmt::Debug for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_heap() {
            write!(f, "h{}", self.index())
        } else {
            write!(f, "t{}", self.index())
        }
    }
}

/// Decoded form of a [`Cell`], convenient for matching.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CellView {
    /// Reference; an unbound variable is a self-reference.
    Ref(Addr),
    Atom(SymId),
    Int(i64),
    NumVar(u32),
    List(Addr),
    Struct(Addr),
    /// Functor cell heading a structure block.
    Functor(SymId),
    /// Memoized hash code (enhanced mode) or chain-node code.
    Hash(HashCode),
    /// Internal link between table-area nodes.
    Link(Addr),
    Empty,
    /// A cdr cell temporarily overwritten by the iterative list copier.
    Reversed {
        prev: Option<Addr>,
        via_ref: bool,
    },
}

/// One tagged storage word.
#[derive(Copy, Clone, PartialEq, Eq, Hash)]
pub struct Cell(u64);

impl Cell {
    #[inline]
    fn pack(tag: u64, payload: u64) -> Cell {
        Cell((payload << TAG_BITS) | tag)
    }

    #[inline]
    fn payload(self) -> u64 {
        self.0 >> TAG_BITS
    }

    #[inline]
    fn tag(self) -> u64 {
        self.0 & TAG_MASK
    }

    pub fn reference(addr: Addr) -> Cell {
        Cell::pack(TAG_REF, addr.raw() as u64)
    }

    pub fn atom(sym: SymId) -> Cell {
        Cell::pack(TAG_ATM, sym.0 as u64)
    }

    /// Integer cell. Values outside [`INT_MIN`, `INT_MAX`] are rejected.
    pub fn int(v: i64) -> Option<Cell> {
        if (INT_MIN..=INT_MAX).contains(&v) {
            Some(Cell(((v << TAG_BITS) as u64) | TAG_INT))
        } else {
            None
        }
    }

    pub fn numvar(n: u32) -> Cell {
        Cell::pack(TAG_NUMVAR, n as u64)
    }

    pub fn list(addr: Addr) -> Cell {
        Cell::pack(TAG_LST, addr.raw() as u64)
    }

    pub fn structure(addr: Addr) -> Cell {
        Cell::pack(TAG_STR, addr.raw() as u64)
    }

    pub fn functor(sym: SymId) -> Cell {
        Cell::pack(TAG_FUN, sym.0 as u64)
    }

    pub fn hash(code: HashCode) -> Cell {
        Cell::pack(TAG_HASH, code.0 as u64)
    }

    pub fn link(addr: Addr) -> Cell {
        Cell::pack(TAG_LINK, addr.raw() as u64)
    }

    pub const EMPTY: Cell = Cell(TAG_EMPTY);

    pub fn reversed(prev: Option<Addr>, via_ref: bool) -> Cell {
        let mut payload = prev.map_or(0, |a| a.raw() as u64 | (1 << 32));
        if via_ref {
            payload |= 1 << 33;
        }
        Cell::pack(TAG_REV, payload)
    }

    #[inline]
    pub fn view(self) -> CellView {
        let p = self.payload();
        match self.tag() {
            TAG_REF => CellView::Ref(Addr::from_raw(p as u32)),
            TAG_ATM => CellView::Atom(SymId(p as u32)),
            TAG_INT => CellView::Int((self.0 as i64) >> TAG_BITS),
            TAG_NUMVAR => CellView::NumVar(p as u32),
            TAG_LST => CellView::List(Addr::from_raw(p as u32)),
            TAG_STR => CellView::Struct(Addr::from_raw(p as u32)),
            TAG_FUN => CellView::Functor(SymId(p as u32)),
            TAG_HASH => CellView::Hash(HashCode(p as u32)),
            TAG_LINK => CellView::Link(Addr::from_raw(p as u32)),
            TAG_EMPTY => CellView::Empty,
            TAG_REV => CellView::Reversed {
                prev: (p & (1 << 32) != 0).then(|| Addr::from_raw(p as u32)),
                via_ref: p & (1 << 33) != 0,
            },
            t => unreachable!("corrupt cell tag {t}"),
        }
    }

    #[inline]
    pub fn is_ref(self) -> bool {
        self.tag() == TAG_REF
    }

    /// LST or STR.
    #[inline]
    pub fn is_compound(self) -> bool {
        matches!(self.tag(), TAG_LST | TAG_STR)
    }

    #[inline]
    pub fn is_atomic(self) -> bool {
        matches!(self.tag(), TAG_ATM | TAG_INT)
    }

    /// Address carried by REF/LST/STR/LINK cells.
    #[inline]
    pub fn addr(self) -> Option<Addr> {
        match self.tag() {
            TAG_REF | TAG_LST | TAG_STR | TAG_LINK => Some(Addr::from_raw(self.payload() as u32)),
            _ => None,
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.view() {
            CellView::Ref(a) => write!(f, "REF({a:?})"),
            CellView::Atom(s) => write!(f, "ATM({})", s.0),
            CellView::Int(v) => write!(f, "INT({v})"),
            CellView::NumVar(n) => write!(f, "NUMVAR({n})"),
            CellView::List(a) => write!(f, "LST({a:?})"),
            CellView::Struct(a) => write!(f, "STR({a:?})"),
            CellView::Functor(s) => write!(f, "FUN({})", s.0),
            CellView::Hash(h) => write!(f, "HASH({})", h.0),
            CellView::Link(a) => write!(f, "LINK({a:?})"),
            CellView::Empty => write!(f, "EMPTY"),
            CellView::Reversed { prev, via_ref } => write!(f, "REV({prev:?},{via_ref})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ints_round_trip_at_the_edges() {
        for v in [0, 1, -1, 42, INT_MAX, INT_MIN] {
            assert_eq!(Cell::int(v).unwrap().view(), CellView::Int(v));
        }
        assert!(Cell::int(INT_MAX + 1).is_none());
        assert!(Cell::int(INT_MIN - 1).is_none());
    }

    #[test]
    fn addresses_keep_their_region() {
        let h = Addr::heap(17);
        let t = Addr::table(17);
        assert!(h.is_heap() && t.is_table());
        assert_eq!(Cell::list(t).view(), CellView::List(t));
        assert_eq!(Cell::structure(h).view(), CellView::Struct(h));
        assert_eq!(t.offset(3).index(), 20);
        assert!(t.offset(3).is_table());
    }

    #[test]
    fn reversed_cells_decode() {
        let a = Addr::heap(9);
        assert_eq!(Cell::reversed(Some(a), true).view(), CellView::Reversed { prev: Some(a), via_ref: true });
        assert_eq!(Cell::reversed(None, false).view(), CellView::Reversed { prev: None, via_ref: false });
    }
}
