//! Tagged-cell term representation shared by the heap and the table area.

mod cell;
mod heap;
mod print;
mod store;
mod symbols;

pub use cell::{Addr, Cell, CellView, INT_MAX, INT_MIN};
pub use heap::Heap;
pub use print::{write_atom, VarNames};
pub use store::{Store, TermError};
pub use symbols::{SymId, SymbolTable};
