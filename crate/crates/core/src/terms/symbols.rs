use indexmap::IndexSet;

use crate::hashing::{self, HashCode};

/// Interned `(name, arity)` pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymId(pub u32);

/// Symbol table. One id per distinct `(name, arity)`.
///
/// Hash codes are cached per symbol: atoms hash their name, functors hash
/// name and arity. Neither depends on interning order.
#[derive(Debug)]
pub struct SymbolTable {
    syms: IndexSet<(Box<str>, usize)>,
    codes: Vec<HashCode>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub const NIL: SymId = SymId(0);

    pub fn new() -> Self {
        let mut table = SymbolTable { syms: IndexSet::new(), codes: Vec::new() };
        let nil = table.intern("[]", 0);
        debug_assert_eq!(nil, Self::NIL);
        table
    }

    pub fn intern(&mut self, name: &str, arity: usize) -> SymId {
        if let Some(i) = self.syms.get_index_of(&(Box::from(name), arity)) {
            return SymId(i as u32);
        }
        let code = if arity == 0 { hashing::atom_name_hcode(name) } else { hashing::functor_hcode(name, arity) };
        let (i, _) = self.syms.insert_full((name.into(), arity));
        self.codes.push(code);
        SymId(i as u32)
    }

    pub fn lookup(&self, name: &str, arity: usize) -> Option<SymId> {
        self.syms.get_index_of(&(Box::from(name), arity)).map(|i| SymId(i as u32))
    }

    pub fn name(&self, sym: SymId) -> &str {
        &self.syms[sym.0 as usize].0
    }

    pub fn arity(&self, sym: SymId) -> usize {
        self.syms[sym.0 as usize].1
    }

    /// Cached hash code of the symbol.
    #[inline]
    pub fn hcode(&self, sym: SymId) -> HashCode {
        self.codes[sym.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }
}
