//! Program text, builtins and the command line.

pub mod ast;
pub mod builtins;
pub mod cli;
pub mod parser;

pub use ast::{Clause, Program, Term};
pub use parser::{parse_program, parse_query, parse_term, ParseError};
