//! Clause templates and their instantiation on the heap.

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

use crate::frontend::builtins::Builtin;
use crate::frontend::{ParseError, Program, Term};
use crate::terms::{Cell, CellView, Store, SymId};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot redefine builtin {0}")]
    Builtin(String),
    #[error("builtin {0} cannot be tabled")]
    TabledBuiltin(String),
    #[error("integer {0} out of range")]
    IntRange(i64),
}

/// A term with clause-local variable numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tmpl {
    Var(u32),
    /// `_`: a fresh variable at every occurrence.
    Anon,
    Const(Cell),
    List(Vec<Tmpl>, Box<Tmpl>),
    Struct(SymId, Vec<Tmpl>),
}

#[derive(Clone, Debug)]
pub struct ClauseCode {
    pub nvars: usize,
    pub head: Vec<Tmpl>,
    pub body: Vec<Tmpl>,
}

#[derive(Clone, Debug)]
pub struct Pred {
    pub sym: SymId,
    pub tabled: bool,
    pub clauses: Vec<ClauseCode>,
}

#[derive(Clone, Debug, Default)]
pub struct Code {
    pub preds: Vec<Pred>,
    pub by_sym: HashMap<SymId, usize>,
    pub builtins: HashMap<SymId, Builtin>,
}

/// Variable names of one clause or query, in first-occurrence order.
#[derive(Debug, Default)]
pub struct VarMap {
    pub names: IndexMap<String, u32>,
}

impl VarMap {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn compile_term(store: &mut Store, t: &Term, vars: &mut VarMap) -> Result<Tmpl, LoadError> {
    Ok(match t {
        Term::Var(v) if v == "_" => Tmpl::Anon,
        Term::Var(v) => {
            let n = vars.names.len() as u32;
            Tmpl::Var(*vars.names.entry(v.clone()).or_insert(n))
        }
        Term::Int(i) => Tmpl::Const(Cell::int(*i).ok_or(LoadError::IntRange(*i))?),
        Term::Atom(a) => Tmpl::Const(store.make_atom(a)),
        Term::Compound(f, args) => {
            let sym = store.symbols.intern(f, args.len());
            let args = args.iter().map(|a| compile_term(store, a, vars)).collect::<Result<_, _>>()?;
            Tmpl::Struct(sym, args)
        }
        Term::List(items, tail) => {
            let items = items.iter().map(|a| compile_term(store, a, vars)).collect::<Result<_, _>>()?;
            Tmpl::List(items, Box::new(compile_term(store, tail, vars)?))
        }
    })
}

/// Interns builtin symbols and compiles every clause of `program`.
pub fn compile_program(store: &mut Store, program: &Program) -> Result<Code, LoadError> {
    let mut code = Code::default();
    for &(name, arity, b) in Builtin::TABLE.iter() {
        code.builtins.insert(store.symbols.intern(name, arity), b);
    }
    let pred_of = |store: &mut Store, code: &mut Code, name: &str, arity: usize| -> usize {
        let sym = store.symbols.intern(name, arity);
        *code.by_sym.entry(sym).or_insert_with(|| {
            code.preds.push(Pred { sym, tabled: program.is_tabled(name, arity), clauses: Vec::new() });
            code.preds.len() - 1
        })
    };
    for (name, arity) in &program.tabled {
        if Builtin::lookup(name, *arity).is_some() {
            return Err(LoadError::TabledBuiltin(format!("{name}/{arity}")));
        }
        pred_of(store, &mut code, name, *arity);
    }
    for clause in &program.clauses {
        let (name, arity) = clause.head.indicator().expect("checked by the parser");
        if Builtin::lookup(name, arity).is_some() {
            return Err(LoadError::Builtin(format!("{name}/{arity}")));
        }
        let pid = pred_of(store, &mut code, name, arity);
        let mut vars = VarMap::default();
        let head = match &clause.head {
            Term::Compound(_, args) => {
                args.iter().map(|a| compile_term(store, a, &mut vars)).collect::<Result<_, _>>()?
            }
            _ => Vec::new(),
        };
        let body = clause.body.iter().map(|g| compile_term(store, g, &mut vars)).collect::<Result<_, _>>()?;
        code.preds[pid].clauses.push(ClauseCode { nvars: vars.len(), head, body });
    }
    Ok(code)
}

impl Tmpl {
    /// Builds the template on the heap, creating variables on first use.
    pub fn instantiate(&self, store: &mut Store, vars: &mut [Option<Cell>]) -> Cell {
        match self {
            Tmpl::Const(c) => *c,
            Tmpl::Anon => store.new_var(),
            Tmpl::Var(i) => match vars[*i as usize] {
                Some(c) => c,
                None => {
                    let v = store.new_var();
                    vars[*i as usize] = Some(v);
                    v
                }
            },
            Tmpl::List(items, tail) => instantiate_list(store, items, tail, vars),
            Tmpl::Struct(sym, args) => {
                let p = store.heap.alloc(args.len() + 1);
                store.heap.set(p, Cell::functor(*sym));
                for (i, a) in args.iter().enumerate() {
                    let slot = p.offset(i + 1);
                    let c = match a {
                        // A first-occurrence variable lives in the slot itself.
                        Tmpl::Var(v) if vars[*v as usize].is_none() => {
                            let c = Cell::reference(slot);
                            vars[*v as usize] = Some(c);
                            c
                        }
                        Tmpl::Anon => Cell::reference(slot),
                        _ => a.instantiate(store, vars),
                    };
                    store.heap.set(slot, c);
                }
                Cell::structure(p)
            }
        }
    }

    /// Unifies the template against an existing term, binding clause
    /// variables to subterms of `t` without copying them. Bindings are
    /// trailed; on failure the caller undoes them.
    pub fn unify_head(&self, store: &mut Store, t: Cell, vars: &mut [Option<Cell>]) -> bool {
        match self {
            Tmpl::Anon => true,
            Tmpl::Var(i) => match vars[*i as usize] {
                None => {
                    vars[*i as usize] = Some(store.deref(t));
                    true
                }
                Some(v) => store.unify(v, t),
            },
            Tmpl::Const(c) => {
                let d = store.deref(t);
                if d.is_ref() {
                    store.bind(d, *c).is_ok()
                } else {
                    d == *c
                }
            }
            Tmpl::Struct(sym, args) => {
                let d = store.deref(t);
                match d.view() {
                    CellView::Ref(_) => {
                        let v = self.instantiate(store, vars);
                        store.bind(d, v).is_ok()
                    }
                    CellView::Struct(p) if store.get(p) == Cell::functor(*sym) => {
                        args.iter().enumerate().all(|(i, a)| a.unify_head(store, store.get(p.offset(i + 1)), vars))
                    }
                    _ => false,
                }
            }
            Tmpl::List(items, tail) => {
                let mut cur = store.deref(t);
                for (k, item) in items.iter().enumerate() {
                    match cur.view() {
                        CellView::Ref(_) => {
                            let v = instantiate_list(store, &items[k..], tail, vars);
                            return store.bind(cur, v).is_ok();
                        }
                        CellView::List(p) => {
                            if !item.unify_head(store, store.get(p), vars) {
                                return false;
                            }
                            cur = store.deref(store.get(p.offset(1)));
                        }
                        _ => return false,
                    }
                }
                tail.unify_head(store, cur, vars)
            }
        }
    }
}

fn instantiate_list(store: &mut Store, items: &[Tmpl], tail: &Tmpl, vars: &mut [Option<Cell>]) -> Cell {
    let cars: Vec<Cell> = items.iter().map(|i| i.instantiate(store, vars)).collect();
    let t = tail.instantiate(store, vars);
    store.make_list(&cars, t)
}
