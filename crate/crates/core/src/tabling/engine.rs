//! Resolution engine with linear tabling.
//!
//! The machine is iterative: goals waiting to run form a shared linked
//! continuation, alternatives are explicit choicepoints, and every heap
//! write that may need undoing goes through the trail.
//!
//! A tabled call whose variant is new becomes a generator: it runs its
//! clauses, and each solution is recorded as an answer and then failed
//! back (lazy consumption). When its clauses are exhausted the generator
//! either turns into a consumer of its own answers (it depends on an
//! older incomplete subgoal), re-runs its clauses (it leads a loop that
//! produced new answers this round) or completes together with every
//! subgoal pushed after it.

use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::compile::{compile_program, compile_term, Code, LoadError, VarMap};
use super::stats::Statistics;
use super::tables::{SubgoalId, SubgoalState, SubgoalTable};
use crate::arena::{ArenaError, Category};
use crate::copier::{Copier, CopyError, HashFlavor, SharingMode};
use crate::frontend::builtins::{eval, int_arg, Builtin, EvalError};
use crate::frontend::{parse_program, parse_query, ParseError, Program};
use crate::hashcons::stored_hcode;
use crate::hashing::{self, HashCode};
use crate::programs;
use crate::terms::{Addr, Cell, CellView, Store, SymId, VarNames};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("unknown procedure {0}")]
    Undefined(String),
    #[error("instantiation error: called an unbound variable")]
    UnboundGoal,
    #[error("type error: callable expected, found {0}")]
    NotCallable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Copy(#[from] CopyError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

enum Frame {
    Call(Cell),
    /// The generator's goal has been solved: record it as an answer.
    Answer {
        sub: SubgoalId,
        goal: Cell,
    },
}

struct ContNode {
    frame: Frame,
    next: Cont,
}

type Cont = Option<Rc<ContNode>>;

impl Drop for ContNode {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.next.take(),
                Err(_) => break,
            }
        }
    }
}

fn push(frame: Frame, next: Cont) -> Cont {
    Some(Rc::new(ContNode { frame, next }))
}

enum Alt {
    Clauses { goal: Cell, pred: usize, next: usize, cont: Cont },
    Between { var: Cell, next: i64, hi: i64, cont: Cont },
    Consumer { sub: SubgoalId, goal: Cell, next: usize, cont: Cont },
    Generator { sub: SubgoalId, goal: Cell, pred: usize, cont: Cont },
    Stop,
}

struct ChoicePoint {
    trail: usize,
    heap: usize,
    alt: Alt,
}

/// One printed solution: `(variable, value)` pairs in query order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub bindings: Vec<(String, String)>,
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("yes");
        }
        for (i, (name, value)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name} = {value}")?;
        }
        Ok(())
    }
}

pub struct Engine {
    store: Store,
    copier: Copier,
    subgoals: SubgoalTable,
    code: Rc<Code>,
    flavor: HashFlavor,
    cps: Vec<ChoicePoint>,
    cont: Cont,
    /// Generators whose clauses are running, innermost last.
    active: Vec<SubgoalId>,
    /// Incomplete subgoals in order of first evaluation.
    comp_stack: Vec<SubgoalId>,
    answer_epoch: u64,
    resolutions: u64,
    elapsed: Duration,
}

impl Engine {
    /// Builds an engine for `program`, adding the library `range/3` unless
    /// the program defines its own.
    pub fn new(program: &Program, mode: SharingMode, flavor: HashFlavor) -> Result<Engine, LoadError> {
        let mut program = program.clone();
        if !program.defines("range", 3) {
            let lib = parse_program(programs::LIBRARY)?;
            program.clauses.extend(lib.clauses);
        }
        let mut store = Store::new();
        let code = compile_program(&mut store, &program)?;
        Ok(Engine {
            store,
            copier: Copier::new(mode),
            subgoals: SubgoalTable::new(),
            code: Rc::new(code),
            flavor,
            cps: Vec::new(),
            cont: None,
            active: Vec::new(),
            comp_stack: Vec::new(),
            answer_epoch: 0,
            resolutions: 0,
            elapsed: Duration::ZERO,
        })
    }

    pub fn from_source(text: &str, mode: SharingMode, flavor: HashFlavor) -> Result<Engine, EngineError> {
        Ok(Engine::new(&parse_program(text)?, mode, flavor)?)
    }

    pub fn mode(&self) -> SharingMode {
        self.copier.mode()
    }

    pub fn flavor(&self) -> HashFlavor {
        self.flavor
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn copier(&self) -> &Copier {
        &self.copier
    }

    pub fn subgoals(&self) -> &SubgoalTable {
        &self.subgoals
    }

    pub fn statistics(&self) -> Statistics {
        Statistics::collect(self.store(), &self.copier, &self.subgoals, self.resolutions, self.elapsed)
    }

    /// Clause resolutions made for tabled predicates so far.
    pub fn tabled_resolutions(&self) -> u64 {
        self.resolutions
    }

    /// Starts a query given as text. Variables whose names begin with `_`
    /// are not reported.
    pub fn query(&mut self, text: &str) -> Result<Solutions<'_>, EngineError> {
        let goals = parse_query(text)?;
        self.reset();
        let mut vars = VarMap::default();
        let mut tmpls = Vec::with_capacity(goals.len());
        for g in &goals {
            tmpls.push(compile_term(&mut self.store, g, &mut vars)?);
        }
        let mut cells = vec![None; vars.len()];
        let goal_cells: Vec<Cell> = tmpls.iter().map(|t| t.instantiate(&mut self.store, &mut cells)).collect();
        let names = vars
            .names
            .iter()
            .filter(|(n, _)| !n.starts_with('_'))
            .map(|(n, &i)| (n.clone(), cells[i as usize].expect("instantiated")))
            .collect();
        Ok(self.start(goal_cells, names))
    }

    /// Starts a query whose goals are built directly on the heap by `build`,
    /// which returns the goals and the variables to report.
    pub fn query_with(&mut self, build: impl FnOnce(&mut Store) -> (Vec<Cell>, Vec<(String, Cell)>)) -> Solutions<'_> {
        self.reset();
        let (goals, names) = build(&mut self.store);
        self.start(goals, names)
    }

    /// Runs a text query to exhaustion and returns the printed answers.
    pub fn solve_all(&mut self, text: &str) -> Result<Vec<String>, EngineError> {
        self.query(text)?.map(|a| a.map(|a| a.to_string())).collect()
    }

    fn start(&mut self, goals: Vec<Cell>, names: Vec<(String, Cell)>) -> Solutions<'_> {
        self.cps.push(ChoicePoint { trail: self.store.heap.trail_mark(), heap: self.store.heap.top(), alt: Alt::Stop });
        self.cont = goals.into_iter().rev().fold(None, |next, g| push(Frame::Call(g), next));
        Solutions { engine: self, names, started: false, done: false }
    }

    /// Drops all execution state. Tables persist; subgoals left incomplete
    /// by an abandoned query will be evaluated afresh when called again.
    pub fn reset(&mut self) {
        self.cps.clear();
        self.cont = None;
        for sid in self.comp_stack.drain(..) {
            let rec = self.subgoals.get_mut(sid);
            rec.active = false;
            rec.evaluated = false;
            rec.looped = false;
            rec.comp_idx = None;
        }
        self.active.clear();
        self.store.heap.undo_to(0);
        self.store.heap.truncate(0);
    }

    fn run(&mut self) -> Result<bool, EngineError> {
        let started = Instant::now();
        let r = self.run_inner();
        self.elapsed += started.elapsed();
        r
    }

    fn run_inner(&mut self) -> Result<bool, EngineError> {
        loop {
            let Some(node) = self.cont.clone() else { return Ok(true) };
            self.cont = node.next.clone();
            let ok = match node.frame {
                Frame::Call(goal) => self.call(goal)?,
                Frame::Answer { sub, goal } => {
                    self.add_answer(sub, goal)?;
                    false
                }
            };
            if !ok && !self.backtrack() {
                return Ok(false);
            }
        }
    }

    fn resume(&mut self) -> Result<bool, EngineError> {
        let started = Instant::now();
        let r = if self.backtrack() { self.run_inner() } else { Ok(false) };
        self.elapsed += started.elapsed();
        r
    }

    fn push_cp(&mut self, alt: Alt) {
        self.cps.push(ChoicePoint { trail: self.store.heap.trail_mark(), heap: self.store.heap.top(), alt });
    }

    fn call(&mut self, goal: Cell) -> Result<bool, EngineError> {
        let goal = self.store.deref(goal);
        let (sym, args) = match goal.view() {
            CellView::Atom(s) => (s, None),
            CellView::Struct(p) => match self.store.get(p).view() {
                CellView::Functor(s) => (s, Some(p)),
                _ => unreachable!("structure without functor"),
            },
            CellView::Ref(_) => return Err(EngineError::UnboundGoal),
            _ => return Err(EngineError::NotCallable(self.store.show(goal))),
        };
        if let Some(&b) = self.code.builtins.get(&sym) {
            return self.builtin(b, args);
        }
        let Some(&pid) = self.code.by_sym.get(&sym) else {
            let s = &self.store.symbols;
            return Err(EngineError::Undefined(format!("{}/{}", s.name(sym), s.arity(sym))));
        };
        if self.code.preds[pid].tabled {
            self.call_tabled(goal, sym, args, pid)
        } else {
            let cont = self.cont.take();
            Ok(self.try_clauses(goal, pid, 0, cont))
        }
    }

    /// Resolves `goal` against the clauses of `pid` from index `start`.
    fn try_clauses(&mut self, goal: Cell, pid: usize, start: usize, cont: Cont) -> bool {
        let code = Rc::clone(&self.code);
        let pred = &code.preds[pid];
        let trail = self.store.heap.trail_mark();
        let heap = self.store.heap.top();
        let args = match goal.view() {
            CellView::Struct(p) => Some(p),
            _ => None,
        };
        for (i, clause) in pred.clauses.iter().enumerate().skip(start) {
            if pred.tabled {
                self.resolutions += 1;
            }
            let mut vars = vec![None; clause.nvars];
            let unified = clause.head.iter().enumerate().all(|(k, h)| {
                let a = self.store.get(args.expect("arity > 0").offset(k + 1));
                h.unify_head(&mut self.store, a, &mut vars)
            });
            if unified {
                if i + 1 < pred.clauses.len() {
                    self.cps.push(ChoicePoint {
                        trail,
                        heap,
                        alt: Alt::Clauses { goal, pred: pid, next: i + 1, cont: cont.clone() },
                    });
                }
                let mut next = cont;
                for g in clause.body.iter().rev() {
                    let c = g.instantiate(&mut self.store, &mut vars);
                    next = push(Frame::Call(c), next);
                }
                self.cont = next;
                return true;
            }
            self.store.heap.undo_to(trail);
            self.store.heap.truncate(heap);
        }
        false
    }

    fn builtin(&mut self, b: Builtin, args: Option<Addr>) -> Result<bool, EngineError> {
        let arg = |s: &Store, i: usize| s.get(args.expect("builtin arity > 0").offset(i));
        Ok(match b {
            Builtin::True => true,
            Builtin::Fail => false,
            Builtin::Unify => {
                let (a, c) = (arg(&self.store, 1), arg(&self.store, 2));
                self.store.unify(a, c)
            }
            Builtin::Identical => self.store.identical(arg(&self.store, 1), arg(&self.store, 2)),
            Builtin::NotIdentical => !self.store.identical(arg(&self.store, 1), arg(&self.store, 2)),
            Builtin::Is => {
                let v = eval(&self.store, arg(&self.store, 2))?;
                let c = Cell::int(v).ok_or(EvalError::Overflow)?;
                let a = arg(&self.store, 1);
                self.store.unify(a, c)
            }
            b if b.is_comparison() => {
                let x = eval(&self.store, arg(&self.store, 1))?;
                let y = eval(&self.store, arg(&self.store, 2))?;
                b.compare(x, y)
            }
            Builtin::Between => {
                let lo = int_arg(&self.store, arg(&self.store, 1))?;
                let hi = int_arg(&self.store, arg(&self.store, 2))?;
                let x = self.store.deref(arg(&self.store, 3));
                match x.view() {
                    CellView::Int(v) => lo <= v && v <= hi,
                    CellView::Ref(_) => {
                        if lo > hi {
                            return Ok(false);
                        }
                        if lo < hi {
                            let cont = self.cont.clone();
                            self.push_cp(Alt::Between { var: x, next: lo + 1, hi, cont });
                        }
                        let c = Cell::int(lo).ok_or(EvalError::Overflow)?;
                        self.store.bind(x, c).expect("unbound");
                        true
                    }
                    _ => {
                        return Err(EvalError::Type { expected: "integer", culprit: self.store.show(x) }.into());
                    }
                }
            }
            Builtin::Conj => {
                let (a, c) = (arg(&self.store, 1), arg(&self.store, 2));
                let rest = self.cont.take();
                self.cont = push(Frame::Call(a), push(Frame::Call(c), rest));
                true
            }
            other => unreachable!("unhandled builtin {other:?}"),
        })
    }

    fn memo(&self) -> bool {
        self.copier.mode().memoizes()
    }

    fn key_of(&self, sym: SymId, args: Option<Addr>, arg_cell: impl Fn(usize) -> Cell) -> HashCode {
        let arity = self.store.symbols.arity(sym);
        let seed = self.store.symbols.hcode(sym);
        if args.is_none() || arity == 0 {
            return seed;
        }
        match self.flavor {
            HashFlavor::Full => (0..arity).fold(seed, |acc, i| {
                hashing::table_key_hcode(acc, variant_hcode(&self.store, arg_cell(i), self.memo()))
            }),
            HashFlavor::Prefix3 => hashing::table_key_hcode(seed, hashing::prefix3_hcode(&self.store, arg_cell(0))),
        }
    }

    fn call_tabled(&mut self, goal: Cell, sym: SymId, args: Option<Addr>, pid: usize) -> Result<bool, EngineError> {
        let arity = self.store.symbols.arity(sym);
        let mark = self.store.heap.trail_mark();
        self.store.number_vars(goal);
        let slot = |i: usize| args.expect("arity > 0").offset(i + 1);
        let key = self.key_of(sym, args, |i| self.store.get(slot(i)));
        let memo = self.memo();
        let store = &self.store;
        let found = self.subgoals.find(key, |rec| {
            rec.sym == sym && (0..arity).all(|i| variant_eq(store, store.get(rec.arg(i)), store.get(slot(i)), memo))
        });
        let sid = match found {
            Some(sid) => sid,
            None => {
                let block = self.store.arena.allocate_from_table(arity + 1, Category::Record)?;
                self.store.arena.set(block, Cell::functor(sym));
                let slots: Vec<Addr> = (0..arity).map(slot).collect();
                self.copier.copy_subgoal_args(&mut self.store, &slots, block.offset(1))?;
                self.subgoals.insert(sym, block, key)
            }
        };
        self.store.heap.undo_numbering(mark);

        let rec = self.subgoals.get(sid);
        if rec.state == SubgoalState::Complete {
            let cont = self.cont.take();
            self.push_cp(Alt::Consumer { sub: sid, goal, next: 0, cont });
            return Ok(false);
        }
        if rec.active || rec.evaluated {
            let link = if rec.active { rec.comp_idx.expect("on stack") } else { rec.lowlink };
            if let Some(&top) = self.active.last() {
                let t = self.subgoals.get_mut(top);
                t.lowlink = t.lowlink.min(link);
                t.looped = true;
            }
            let cont = self.cont.take();
            self.push_cp(Alt::Consumer { sub: sid, goal, next: 0, cont });
            return Ok(false);
        }

        let depth = self.comp_stack.len();
        let epoch = self.answer_epoch;
        let rec = self.subgoals.get_mut(sid);
        rec.active = true;
        rec.looped = false;
        rec.round_epoch = epoch;
        let idx = match rec.comp_idx {
            Some(i) => i,
            None => {
                rec.comp_idx = Some(depth);
                depth
            }
        };
        rec.lowlink = idx;
        if idx == depth {
            self.comp_stack.push(sid);
        }
        self.active.push(sid);
        let cont = self.cont.take();
        self.push_cp(Alt::Generator { sub: sid, goal, pred: pid, cont });
        let answer = push(Frame::Answer { sub: sid, goal }, None);
        Ok(self.try_clauses(goal, pid, 0, answer))
    }

    fn add_answer(&mut self, sub: SubgoalId, goal: Cell) -> Result<(), EngineError> {
        if self.subgoals.get(sub).is_complete() {
            return Ok(());
        }
        let sym = self.subgoals.get(sub).sym;
        let arity = self.store.symbols.arity(sym);
        let args = match self.store.deref(goal).view() {
            CellView::Struct(p) => Some(p),
            _ => None,
        };
        let mark = self.store.heap.trail_mark();
        self.store.number_vars(goal);
        let arg = |s: &Store, i: usize| s.get(args.expect("arity > 0").offset(i + 1));
        let key = self.key_of(sym, args, |i| arg(&self.store, i));
        let memo = self.memo();
        let store = &self.store;
        let rec = self.subgoals.get_mut(sub);
        let answers = &rec.answers;
        let dup = rec.answer_index.find(key, |aid| {
            let block = answers[aid as usize].block;
            (0..arity).all(|i| variant_eq(store, store.get(block.offset(i)), arg(store, i), memo))
        });
        if dup.is_none() {
            let block =
                if arity > 0 { self.store.arena.allocate_from_table(arity, Category::Record)? } else { Addr::table(0) };
            let mut codes = Vec::with_capacity(arity);
            for i in 0..arity {
                let a = arg(&self.store, i);
                codes.push(self.copier.copy_term(&mut self.store, a, block.offset(i))?);
            }
            let rec = self.subgoals.get_mut(sub);
            let id = rec.answers.len() as u32;
            rec.answers.push(super::tables::AnswerRecord { block, codes: codes.into_boxed_slice() });
            rec.answer_index.insert(key, id);
            self.answer_epoch += 1;
        }
        self.store.heap.undo_to(mark);
        Ok(())
    }

    /// Unifies the goal with answer `i` of `sub`. Ground table subterms are
    /// bound by reference; only non-ground parts are rebuilt on the heap.
    fn unify_answer(&mut self, sub: SubgoalId, i: usize, goal: Cell) -> bool {
        let rec = self.subgoals.get(sub);
        let arity = self.store.symbols.arity(rec.sym);
        let ans = &rec.answers[i];
        let (block, codes) = (ans.block, ans.codes.clone());
        let CellView::Struct(p) = self.store.deref(goal).view() else {
            return true;
        };
        let mut vars = Vec::new();
        for (j, code) in codes.iter().enumerate().take(arity) {
            let stored = self.store.get(block.offset(j));
            let value = if code.is_ground() { stored } else { self.instantiate_answer(stored, &mut vars).0 };
            let target = self.store.get(p.offset(j + 1));
            if !self.store.unify(target, value) {
                return false;
            }
        }
        true
    }

    /// Heap instance of a stored answer term. Returns the cell and whether
    /// it is a reused ground table term.
    fn instantiate_answer(&mut self, t: Cell, vars: &mut Vec<Option<Cell>>) -> (Cell, bool) {
        let memo = self.memo();
        let ground_memo = |s: &Store, t: Cell| memo && stored_hcode(s, t).is_ground();
        match t.view() {
            CellView::NumVar(n) => {
                let n = n as usize;
                if vars.len() <= n {
                    vars.resize(n + 1, None);
                }
                let v = *vars[n].get_or_insert_with(|| self.store.new_var());
                (v, false)
            }
            CellView::Struct(p) => {
                if ground_memo(&self.store, t) {
                    return (t, true);
                }
                let CellView::Functor(sym) = self.store.get(p).view() else { unreachable!() };
                let n = self.store.symbols.arity(sym);
                let parts: Vec<(Cell, bool)> =
                    (1..=n).map(|i| self.instantiate_answer(self.store.get(p.offset(i)), vars)).collect();
                if parts.iter().all(|&(_, g)| g) {
                    return (t, true);
                }
                let cells: Vec<Cell> = parts.into_iter().map(|(c, _)| c).collect();
                (self.store.make_struct(sym, &cells).expect("arity matches"), false)
            }
            CellView::List(_) => {
                let mut spine = Vec::new();
                let mut cur = t;
                while let CellView::List(p) = cur.view() {
                    if ground_memo(&self.store, cur) {
                        break;
                    }
                    spine.push(p);
                    cur = self.store.get(p.offset(1));
                }
                let (mut acc, mut ground) = match cur.view() {
                    CellView::List(_) => (cur, true),
                    _ => self.instantiate_answer(cur, vars),
                };
                for p in spine.into_iter().rev() {
                    let (car, car_ground) = self.instantiate_answer(self.store.get(p), vars);
                    if car_ground && ground {
                        acc = Cell::list(p);
                    } else {
                        acc = self.store.make_cons(car, acc);
                        ground = false;
                    }
                }
                (acc, ground)
            }
            _ => (t, true),
        }
    }

    /// Pops choicepoints until one yields a continuation. Returns false
    /// when the query is exhausted.
    fn backtrack(&mut self) -> bool {
        loop {
            let Some(cp) = self.cps.last_mut() else { return false };
            self.store.heap.undo_to(cp.trail);
            self.store.heap.truncate(cp.heap);
            match &mut cp.alt {
                Alt::Stop => return false,
                Alt::Clauses { goal, pred, next, cont } => {
                    let (goal, pred, next, cont) = (*goal, *pred, *next, cont.take());
                    self.cps.pop();
                    if self.try_clauses(goal, pred, next, cont) {
                        return true;
                    }
                }
                Alt::Between { var, next, hi, cont } => {
                    let (var, v) = (*var, *next);
                    let cont = if *next < *hi {
                        *next += 1;
                        cont.clone()
                    } else {
                        let c = cont.take();
                        self.cps.pop();
                        c
                    };
                    self.store.bind(var, Cell::int(v).expect("within bounds")).expect("unbound");
                    self.cont = cont;
                    return true;
                }
                Alt::Consumer { sub, goal, next, cont } => {
                    let (sub, goal, i) = (*sub, *goal, *next);
                    let rec = self.subgoals.get(sub);
                    if i >= rec.answers.len() {
                        self.cps.pop();
                        continue;
                    }
                    *next += 1;
                    let more = i + 1 < rec.answers.len() || !rec.is_complete();
                    let cont = if more {
                        cont.clone()
                    } else {
                        let c = cont.take();
                        self.cps.pop();
                        c
                    };
                    if self.unify_answer(sub, i, goal) {
                        self.cont = cont;
                        return true;
                    }
                }
                Alt::Generator { sub, goal, pred, .. } => {
                    let (sub, goal, pred) = (*sub, *goal, *pred);
                    if self.generator_exhausted(sub) {
                        // Iterate: clauses again under the same choicepoint.
                        let answer = push(Frame::Answer { sub, goal }, None);
                        if self.try_clauses(goal, pred, 0, answer) {
                            return true;
                        }
                    } else {
                        let Some(ChoicePoint { alt: Alt::Generator { cont, .. }, .. }) = self.cps.pop() else {
                            unreachable!()
                        };
                        self.push_cp(Alt::Consumer { sub, goal, next: 0, cont });
                    }
                }
            }
        }
    }

    /// Fixpoint step for a generator whose clauses have all failed.
    /// Returns true when it must run its clauses again.
    fn generator_exhausted(&mut self, sid: SubgoalId) -> bool {
        debug_assert_eq!(self.active.last(), Some(&sid));
        let rec = self.subgoals.get(sid);
        let idx = rec.comp_idx.expect("generator on the completion stack");
        let caller = self.active.len().checked_sub(2).map(|i| self.active[i]);
        let caller_above = caller.is_some_and(|c| self.subgoals.get(c).comp_idx.expect("active") > idx);
        if rec.lowlink < idx || caller_above {
            let (link, looped) = (rec.lowlink.min(idx), rec.looped);
            self.active.pop();
            let rec = self.subgoals.get_mut(sid);
            rec.active = false;
            rec.evaluated = true;
            rec.lowlink = link;
            if let Some(c) = caller {
                let c = self.subgoals.get_mut(c);
                c.lowlink = c.lowlink.min(link);
                c.looped |= looped;
            }
            return false;
        }
        if rec.looped && rec.round_epoch != self.answer_epoch {
            for &m in &self.comp_stack[idx + 1..] {
                self.subgoals.get_mut(m).evaluated = false;
            }
            let epoch = self.answer_epoch;
            let rec = self.subgoals.get_mut(sid);
            rec.looped = false;
            rec.round_epoch = epoch;
            rec.lowlink = idx;
            return true;
        }
        for m in self.comp_stack.drain(idx..) {
            let rec = self.subgoals.get_mut(m);
            rec.state = SubgoalState::Complete;
            rec.active = false;
            rec.evaluated = false;
            rec.looped = false;
            rec.comp_idx = None;
        }
        self.active.pop();
        false
    }
}

/// Hash of a numbered term that agrees with the structural hash on ground
/// terms and gives numbered variables nonzero codes, so variants share a
/// key and non-ground terms still spread over buckets.
fn variant_hcode(store: &Store, t: Cell, memo: bool) -> HashCode {
    let t = store.deref(t);
    match t.view() {
        CellView::Atom(_) | CellView::Int(_) => hashing::atomic_hcode(store, t).expect("atomic"),
        CellView::NumVar(n) => hashing::int_hcode(!(n as i64)),
        CellView::List(p) | CellView::Struct(p) if memo && p.is_table() && stored_hcode(store, t).is_ground() => {
            stored_hcode(store, t)
        }
        CellView::List(_) => {
            let mut cars = Vec::new();
            let mut cur = t;
            while let CellView::List(p) = cur.view() {
                if memo && p.is_table() && stored_hcode(store, cur).is_ground() {
                    break;
                }
                cars.push(store.get(p));
                cur = store.deref(store.get(p.offset(1)));
            }
            let mut code = variant_hcode(store, cur, memo);
            for car in cars.into_iter().rev() {
                code = hashing::seq_hcode(variant_hcode(store, car, memo), code);
            }
            code
        }
        CellView::Struct(p) => {
            let CellView::Functor(sym) = store.get(p).view() else { unreachable!() };
            let mut code = store.symbols.hcode(sym);
            for i in 1..=store.symbols.arity(sym) {
                code = hashing::seq_hcode(code, variant_hcode(store, store.get(p.offset(i)), memo));
            }
            code
        }
        _ => HashCode::NON_GROUND,
    }
}

/// Variant test between numbered terms. With memoized codes, two distinct
/// ground table compounds are known to differ without looking inside.
fn variant_eq(store: &Store, a: Cell, b: Cell, memo: bool) -> bool {
    let mut work = vec![(a, b)];
    while let Some((a, b)) = work.pop() {
        let a = store.deref(a);
        let b = store.deref(b);
        if a == b {
            continue;
        }
        match (a.view(), b.view()) {
            (CellView::List(p), CellView::List(q)) | (CellView::Struct(p), CellView::Struct(q)) => {
                if memo && p.is_table() && q.is_table() {
                    let (ha, hb) = (stored_hcode(store, a), stored_hcode(store, b));
                    if ha != hb || ha.is_ground() {
                        return false;
                    }
                }
                if matches!(a.view(), CellView::List(_)) {
                    work.push((store.get(p.offset(1)), store.get(q.offset(1))));
                    work.push((store.get(p), store.get(q)));
                } else {
                    let f = store.get(p);
                    if f != store.get(q) {
                        return false;
                    }
                    let CellView::Functor(sym) = f.view() else { return false };
                    for i in (1..=store.symbols.arity(sym)).rev() {
                        work.push((store.get(p.offset(i)), store.get(q.offset(i))));
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Pull-based answer stream. Dropping it abandons the query.
pub struct Solutions<'a> {
    engine: &'a mut Engine,
    names: Vec<(String, Cell)>,
    started: bool,
    done: bool,
}

impl Solutions<'_> {
    pub fn engine(&self) -> &Engine {
        self.engine
    }

    /// Advances to the next solution without formatting it.
    pub fn next_solution(&mut self) -> Result<bool, EngineError> {
        if self.done {
            return Ok(false);
        }
        let r = if self.started { self.engine.resume() } else { self.engine.run() };
        self.started = true;
        match r {
            Ok(true) => Ok(true),
            other => {
                self.done = true;
                self.engine.reset();
                other
            }
        }
    }

    /// Runs to exhaustion and returns the number of solutions.
    pub fn count(mut self) -> Result<usize, EngineError> {
        let mut n = 0;
        while self.next_solution()? {
            n += 1;
        }
        Ok(n)
    }

    /// The current value of a reported variable, printed.
    pub fn format_current(&self) -> Answer {
        let mut names = VarNames::new();
        let store = &self.engine.store;
        Answer { bindings: self.names.iter().map(|(n, c)| (n.clone(), store.format_term(*c, &mut names))).collect() }
    }
}

impl Iterator for Solutions<'_> {
    type Item = Result<Answer, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_solution() {
            Ok(true) => Some(Ok(self.format_current())),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        }
    }
}

impl Drop for Solutions<'_> {
    fn drop(&mut self) {
        if !self.done {
            self.engine.reset();
        }
    }
}
