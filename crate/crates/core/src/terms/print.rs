use std::collections::HashMap;
use std::fmt::Write;

use super::cell::{Addr, Cell, CellView};
use super::store::Store;
use super::symbols::SymbolTable;

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

/// Names unbound variables `_G0`, `_G1`, ... in order of first appearance,
/// so printed output does not depend on heap addresses.
#[derive(Debug, Default)]
pub struct VarNames {
    seen: HashMap<Addr, usize>,
}

impl VarNames {
    pub fn new() -> Self {
        Self::default()
    }

    fn name(&mut self, a: Addr) -> usize {
        let n = self.seen.len();
        *self.seen.entry(a).or_insert(n)
    }
}

/// Writes an atom name, quoting it when it would not read back as the same
/// atom.
pub fn write_atom(out: &mut String, name: &str) {
    if atom_needs_quotes(name) {
        out.push('\'');
        for c in name.chars() {
            match c {
                '\'' => out.push_str("\\'"),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                c => out.push(c),
            }
        }
        out.push('\'');
    } else {
        out.push_str(name);
    }
}

fn atom_needs_quotes(name: &str) -> bool {
    if matches!(name, "[]" | "!" | ";") {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_lowercase() => !chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(_) => !name.chars().all(|c| SYMBOL_CHARS.contains(c)),
    }
}

impl Store {
    /// Canonical text of a term: list notation, functor notation for every
    /// structure, `_N` for numbered variables and `_GN` for unbound ones.
    pub fn format_term(&self, t: Cell, names: &mut VarNames) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t, names);
        out
    }

    pub fn show(&self, t: Cell) -> String {
        self.format_term(t, &mut VarNames::new())
    }

    fn write_term(&self, out: &mut String, t: Cell, names: &mut VarNames) {
        let t = self.deref(t);
        match t.view() {
            CellView::Ref(a) => {
                let _ = write!(out, "_G{}", names.name(a));
            }
            CellView::Atom(sym) => write_atom(out, self.symbols.name(sym)),
            CellView::Int(v) => {
                let _ = write!(out, "{v}");
            }
            CellView::NumVar(n) => {
                let _ = write!(out, "_{n}");
            }
            CellView::List(_) => {
                out.push('[');
                let mut cur = t;
                let mut first = true;
                loop {
                    match cur.view() {
                        CellView::List(p) => {
                            if !first {
                                out.push(',');
                            }
                            first = false;
                            self.write_term(out, self.get(p), names);
                            cur = self.deref(self.get(p.offset(1)));
                        }
                        CellView::Atom(SymbolTable::NIL) => break,
                        _ => {
                            out.push('|');
                            self.write_term(out, cur, names);
                            break;
                        }
                    }
                }
                out.push(']');
            }
            CellView::Struct(p) => {
                let CellView::Functor(sym) = self.get(p).view() else {
                    out.push_str("<bad structure>");
                    return;
                };
                write_atom(out, self.symbols.name(sym));
                out.push('(');
                for i in 1..=self.symbols.arity(sym) {
                    if i > 1 {
                        out.push(',');
                    }
                    self.write_term(out, self.get(p.offset(i)), names);
                }
                out.push(')');
            }
            other => {
                let _ = write!(out, "<{other:?}>");
            }
        }
    }
}
