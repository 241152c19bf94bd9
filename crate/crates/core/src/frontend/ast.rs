use std::fmt;

use indexmap::IndexSet;

use crate::terms::write_atom;

/// Source-level term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Atom(String),
    Int(i64),
    Compound(String, Vec<Term>),
    /// `[items... | tail]`; a proper list has tail `[]`.
    List(Vec<Term>, Box<Term>),
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(name.to_string())
    }

    pub fn nil() -> Term {
        Term::atom("[]")
    }

    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::Compound(name.to_string(), args)
    }

    /// Name and arity when the term can be called as a goal.
    pub fn indicator(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    /// Splits a `','/2` chain into its conjuncts.
    pub fn conjuncts(self) -> Vec<Term> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Compound(f, mut args) if f == "," && args.len() == 2 => {
                    let right = args.pop().expect("two args");
                    let left = args.pop().expect("two args");
                    out.extend(left.conjuncts());
                    cur = right;
                }
                other => {
                    out.push(other);
                    return out;
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Int(i) => write!(f, "{i}"),
            Term::Atom(a) => {
                let mut s = String::new();
                write_atom(&mut s, a);
                f.write_str(&s)
            }
            Term::Compound(name, args) => {
                let mut s = String::new();
                write_atom(&mut s, name);
                f.write_str(&s)?;
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::List(items, tail) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                if **tail != Term::nil() {
                    write!(f, "|{tail}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, g) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{g}")?;
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub tabled: IndexSet<(String, usize)>,
    pub warnings: Vec<String>,
}

impl Program {
    pub fn is_tabled(&self, name: &str, arity: usize) -> bool {
        self.tabled.contains(&(name.to_string(), arity))
    }

    pub fn defines(&self, name: &str, arity: usize) -> bool {
        self.clauses.iter().any(|c| c.head.indicator() == Some((name, arity)))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in &self.tabled {
            let mut s = String::new();
            write_atom(&mut s, name);
            writeln!(f, ":- table {s}/{arity}.")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
