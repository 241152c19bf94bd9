//! Hash codes for table terms.
//!
//! Code 0 is reserved for non-ground terms. Combination for hash-consing
//! (`seq_hcode`) absorbs zero so groundness falls out of the code itself;
//! combination for subgoal and answer keys (`table_key_hcode`) does not,
//! since non-ground calls still need usable bucket keys.

use crate::terms::{Cell, CellView, Store};

/// 32-bit hash code with wraparound arithmetic.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashCode(pub u32);

impl HashCode {
    pub const NON_GROUND: HashCode = HashCode(0);

    #[inline]
    pub fn is_ground(self) -> bool {
        self.0 != 0
    }

    #[inline]
    fn nonzero(v: u32) -> HashCode {
        HashCode(if v == 0 { 1 } else { v })
    }
}

const FNV_OFFSET: u32 = 0x811c_9dc5;
const FNV_PRIME: u32 = 0x0100_0193;

fn fnv1a(bytes: &[u8]) -> u32 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u32).wrapping_mul(FNV_PRIME))
}

fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^ (k >> 33)
}

/// Code of an atom, from its name text.
pub fn atom_name_hcode(name: &str) -> HashCode {
    HashCode::nonzero(fnv1a(name.as_bytes()))
}

/// Code of an integer.
pub fn int_hcode(v: i64) -> HashCode {
    let m = fmix64(v as u64);
    HashCode::nonzero((m ^ (m >> 32)) as u32)
}

/// Initial code of a structure with functor `name/arity`.
pub fn functor_hcode(name: &str, arity: usize) -> HashCode {
    let m = fmix64(((fnv1a(name.as_bytes()) as u64) << 32) | arity as u64);
    HashCode::nonzero((m ^ (m >> 32)) as u32)
}

/// Code of an atomic cell; `None` for anything that is not an atom or an
/// integer.
pub fn atomic_hcode(store: &Store, t: Cell) -> Option<HashCode> {
    match t.view() {
        CellView::Atom(sym) => Some(store.symbols.hcode(sym)),
        CellView::Int(v) => Some(int_hcode(v)),
        _ => None,
    }
}

/// Hash-consing combination: `code1 + 31*code2 + 1`, zero if either side
/// is zero.
#[inline]
pub fn seq_hcode(code1: HashCode, code2: HashCode) -> HashCode {
    if code1.0 == 0 || code2.0 == 0 {
        return HashCode::NON_GROUND;
    }
    HashCode::nonzero(code1.0.wrapping_add(code2.0.wrapping_mul(31)).wrapping_add(1))
}

#[inline]
pub fn is_ground_hcode(code: HashCode) -> bool {
    code.is_ground()
}

/// Key combination for subgoal and answer tables: `code1*33 + code2 + 1`.
#[inline]
pub fn table_key_hcode(code1: HashCode, code2: HashCode) -> HashCode {
    HashCode(code1.0.wrapping_mul(33).wrapping_add(code2.0).wrapping_add(1))
}

/// Full structural hash of a term, ignoring any memoized codes. Unbound
/// variables and numbered variables hash to 0.
pub fn structural_hcode(store: &Store, t: Cell) -> HashCode {
    let t = store.deref(t);
    match t.view() {
        CellView::Atom(_) | CellView::Int(_) => atomic_hcode(store, t).expect("atomic"),
        CellView::List(_) => {
            // Iterate the spine, then fold suffix-first.
            let mut cars = Vec::new();
            let mut cur = t;
            while let CellView::List(p) = cur.view() {
                cars.push(store.get(p));
                cur = store.deref(store.get(p.offset(1)));
            }
            let mut code = structural_hcode(store, cur);
            for car in cars.into_iter().rev() {
                code = seq_hcode(structural_hcode(store, car), code);
            }
            code
        }
        CellView::Struct(p) => {
            let CellView::Functor(sym) = store.get(p).view() else { unreachable!("structure block without functor") };
            let mut code = store.symbols.hcode(sym);
            for i in 1..=store.symbols.arity(sym) {
                code = seq_hcode(code, structural_hcode(store, store.get(p.offset(i))));
            }
            code
        }
        _ => HashCode::NON_GROUND,
    }
}

/// Legacy list key: folds the codes of at most the first three elements.
/// Non-list input falls back to the full structural hash.
pub fn prefix3_hcode(store: &Store, list: Cell) -> HashCode {
    let list = store.deref(list);
    match list.view() {
        CellView::List(_) => {}
        CellView::Atom(sym) if sym == crate::terms::SymbolTable::NIL => {}
        _ => return structural_hcode(store, list),
    }
    let mut code = store.symbols.hcode(crate::terms::SymbolTable::NIL);
    let mut cur = list;
    for _ in 0..3 {
        let CellView::List(p) = cur.view() else { break };
        let car = store.deref(store.get(p));
        let elem = atomic_hcode(store, car).unwrap_or_else(|| structural_hcode(store, car));
        code = table_key_hcode(code, elem);
        cur = store.deref(store.get(p.offset(1)));
    }
    code
}
