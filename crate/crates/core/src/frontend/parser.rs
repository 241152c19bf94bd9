//! Reader for the supported Prolog subset.
//!
//! Operator-precedence parsing over a fixed operator table. A name
//! immediately followed by `(` is always a functor application.

use thiserror::Error;

use super::ast::{Clause, Program, Term};
use crate::terms::INT_MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    /// Quoted atoms never act as operators.
    Quoted(String),
    Var(String),
    Int(i64),
    Punct(char),
    End,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
    /// Whitespace or a comment precedes the token.
    layout_before: bool,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }

    fn skip_layout(&mut self) -> Result<bool, ParseError> {
        let start = self.pos;
        loop {
            match self.peek(0) {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek(1) == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return Err(self.err(line, col, "unterminated block comment")),
                            Some('*') if self.peek(0) == Some('/') => {
                                self.bump();
                                break;
                            }
                            _ => {}
                        }
                    }
                }
                _ => return Ok(self.pos != start),
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            let layout_before = self.skip_layout()?;
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek(0) else {
                out.push(Token { tok: Tok::Eof, line, col, layout_before });
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(d) = self.peek(0).filter(|d| d.is_ascii_digit() || *d == '_') {
                    self.bump();
                    if d != '_' {
                        s.push(d);
                    }
                }
                let v: i64 = s.parse().map_err(|_| self.err(line, col, format!("integer {s} too large")))?;
                if v > INT_MAX {
                    return Err(self.err(line, col, format!("integer {s} out of range")));
                }
                Tok::Int(v)
            } else if c == '_' || c.is_ascii_uppercase() {
                Tok::Var(self.word())
            } else if c.is_ascii_lowercase() {
                Tok::Name(self.word())
            } else if c == '\'' {
                Tok::Quoted(self.quoted(line, col)?)
            } else if c == '.' && self.peek(1).is_none_or(|n| n.is_whitespace() || n == '%') {
                self.bump();
                Tok::End
            } else if SYMBOL_CHARS.contains(c) {
                let mut s = String::new();
                while let Some(d) = self.peek(0).filter(|d| SYMBOL_CHARS.contains(*d)) {
                    if d == '.' && self.peek(1).is_none_or(|n| n.is_whitespace() || n == '%') && !s.is_empty() {
                        break;
                    }
                    self.bump();
                    s.push(d);
                }
                Tok::Name(s)
            } else if c == '!' || c == ';' {
                self.bump();
                Tok::Name(c.to_string())
            } else if "()[],|".contains(c) {
                self.bump();
                Tok::Punct(c)
            } else {
                return Err(self.err(line, col, format!("unexpected character '{c}'")));
            };
            out.push(Token { tok, line, col, layout_before });
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(d) = self.peek(0).filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
            self.bump();
            s.push(d);
        }
        s
    }

    fn quoted(&mut self, line: usize, col: usize) -> Result<String, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(line, col, "unterminated quoted atom")),
                Some('\'') if self.peek(0) == Some('\'') => {
                    self.bump();
                    s.push('\'');
                }
                Some('\'') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('\\') => s.push('\\'),
                    Some('\'') => s.push('\''),
                    Some(other) => return Err(self.err(self.line, self.col, format!("unknown escape \\{other}"))),
                    None => return Err(self.err(line, col, "unterminated quoted atom")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        ":-" => (1200, Assoc::Xfx),
        "," => (1000, Assoc::Xfy),
        "=" | "\\=" | "==" | "\\==" | "is" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" => (700, Assoc::Xfx),
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "/" | "//" | "mod" => (400, Assoc::Yfx),
        _ => return None,
    })
}

/// Prefix operators: priority and maximum argument priority.
fn prefix_op(name: &str) -> Option<(u32, u32)> {
    Some(match name {
        ":-" => (1200, 1199),
        "table" => (1150, 1149),
        "-" => (200, 200),
        _ => return None,
    })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, off: usize) -> &Token {
        &self.toks[(self.pos + off).min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: &Token, msg: impl Into<String>) -> ParseError {
        let what = match &t.tok {
            Tok::Eof => "end of input".to_string(),
            Tok::End => "end of clause".to_string(),
            Tok::Name(n) | Tok::Quoted(n) => format!("'{n}'"),
            Tok::Var(v) => format!("variable {v}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Punct(c) => format!("'{c}'"),
        };
        ParseError { line: t.line, col: t.col, msg: format!("{} at {what}", msg.into()) }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(())
        } else {
            Err(self.err_at(&t, format!("expected '{c}'")))
        }
    }

    /// Whether the current token can begin a term.
    fn starts_term(&self) -> bool {
        match &self.peek().tok {
            Tok::Name(n) => infix_op(n).is_none() || self.peek_at(1).tok == Tok::Punct('(') || prefix_op(n).is_some(),
            Tok::Quoted(_) | Tok::Var(_) | Tok::Int(_) => true,
            Tok::Punct(c) => matches!(c, '(' | '['),
            Tok::End | Tok::Eof => false,
        }
    }

    fn functor_follows(&self) -> bool {
        let t = self.peek_at(1);
        t.tok == Tok::Punct('(') && !t.layout_before
    }

    fn parse(&mut self, max: u32) -> Result<Term, ParseError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let name = match &self.peek().tok {
                Tok::Name(n) => n.clone(),
                Tok::Punct(',') => ",".to_string(),
                _ => break,
            };
            let Some((prec, assoc)) = infix_op(&name) else { break };
            let left_max = if assoc == Assoc::Yfx { prec } else { prec - 1 };
            let right_max = if assoc == Assoc::Xfy { prec } else { prec - 1 };
            if prec > max || left_prec > left_max {
                break;
            }
            self.next();
            let right = self.parse(right_max)?;
            left = Term::Compound(name, vec![left, right]);
            left_prec = prec;
        }
        Ok(left)
    }

    fn arglist(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect_punct('(')?;
        let mut args = vec![self.parse(999)?];
        loop {
            let t = self.next();
            match t.tok {
                Tok::Punct(',') => args.push(self.parse(999)?),
                Tok::Punct(')') => return Ok(args),
                _ => return Err(self.err_at(&t, "expected ',' or ')' in argument list")),
            }
        }
    }

    fn primary(&mut self, max: u32) -> Result<(Term, u32), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok((Term::Int(v), 0)),
            Tok::Var(v) => Ok((Term::Var(v), 0)),
            Tok::Punct('(') => {
                let inner = self.parse(1200)?;
                self.expect_punct(')')?;
                Ok((inner, 0))
            }
            Tok::Punct('[') => {
                if self.peek().tok == Tok::Punct(']') {
                    self.next();
                    return self.after_name("[]".to_string(), max);
                }
                let mut items = vec![self.parse(999)?];
                let tail = loop {
                    let t = self.next();
                    match t.tok {
                        Tok::Punct(',') => items.push(self.parse(999)?),
                        Tok::Punct('|') => {
                            let tail = self.parse(999)?;
                            self.expect_punct(']')?;
                            break tail;
                        }
                        Tok::Punct(']') => break Term::nil(),
                        _ => return Err(self.err_at(&t, "expected ',', '|' or ']' in list")),
                    }
                };
                Ok((Term::List(items, Box::new(tail)), 0))
            }
            Tok::Quoted(name) => {
                self.pos -= 1;
                if self.functor_follows() {
                    self.next();
                    let args = self.arglist()?;
                    return Ok((Term::Compound(name, args), 0));
                }
                self.next();
                Ok((Term::Atom(name), 0))
            }
            Tok::Name(name) => {
                self.pos -= 1;
                if self.functor_follows() {
                    self.next();
                    let args = self.arglist()?;
                    return Ok((Term::Compound(name, args), 0));
                }
                self.next();
                if name == "-" {
                    if let Tok::Int(v) = self.peek().tok {
                        if !self.peek().layout_before {
                            self.next();
                            return Ok((Term::Int(-v), 0));
                        }
                    }
                }
                self.after_name(name, max)
            }
            _ => Err(self.err_at(&t, "unexpected token")),
        }
    }

    /// A bare name: prefix operator application or plain atom.
    fn after_name(&mut self, name: String, max: u32) -> Result<(Term, u32), ParseError> {
        if let Some((prec, arg_max)) = prefix_op(&name) {
            if prec <= max && self.starts_term() {
                let arg = self.parse(arg_max)?;
                return Ok((Term::Compound(name, vec![arg]), prec));
            }
        }
        Ok((Term::Atom(name), 0))
    }

    fn at_end(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn clause_term(&mut self) -> Result<Term, ParseError> {
        let t = self.parse(1200)?;
        let end = self.next();
        if end.tok != Tok::End {
            return Err(self.err_at(&end, "operator expected"));
        }
        Ok(t)
    }
}

/// Parses a single term; a trailing `.` is optional.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    if p.at_end() {
        return Err(p.err_at(p.peek(), "empty input"));
    }
    let t = p.parse(1200)?;
    if p.peek().tok == Tok::End {
        p.next();
    }
    if !p.at_end() {
        return Err(p.err_at(p.peek(), "operator expected"));
    }
    Ok(t)
}

/// Parses a query into its conjuncts.
pub fn parse_query(text: &str) -> Result<Vec<Term>, ParseError> {
    Ok(parse_term(text)?.conjuncts())
}

fn table_specs(spec: Term, out: &mut Vec<(String, usize)>) -> Result<(), String> {
    match spec {
        Term::Compound(f, args) if f == "," && args.len() == 2 => {
            for a in args {
                table_specs(a, out)?;
            }
            Ok(())
        }
        Term::Compound(f, args) if f == "/" && args.len() == 2 => match (&args[0], &args[1]) {
            (Term::Atom(name), Term::Int(n)) if *n >= 0 => {
                out.push((name.clone(), *n as usize));
                Ok(())
            }
            _ => Err(format!("bad table specification {}", Term::Compound(f.clone(), args.clone()))),
        },
        other => Err(format!("bad table specification {other}")),
    }
}

fn contains_cut(t: &Term) -> bool {
    match t {
        Term::Atom(a) => a == "!",
        Term::Compound(f, args) if f == "," => args.iter().any(contains_cut),
        _ => false,
    }
}

/// Parses a whole program text.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    let mut prog = Program::default();
    while !p.at_end() {
        let start = p.peek().clone();
        let err = |msg: String| ParseError { line: start.line, col: start.col, msg };
        let term = p.clause_term()?;
        match term {
            Term::Compound(f, mut args) if f == ":-" && args.len() == 1 => match args.pop().expect("one arg") {
                Term::Compound(d, mut dargs) if d == "table" && dargs.len() == 1 => {
                    let mut specs = Vec::new();
                    table_specs(dargs.pop().expect("one arg"), &mut specs).map_err(err)?;
                    for (name, arity) in specs {
                        if prog.defines(&name, arity) {
                            return Err(err(format!("table declaration for {name}/{arity} follows its clauses")));
                        }
                        if !prog.tabled.insert((name.clone(), arity)) {
                            prog.warnings
                                .push(format!("line {}: duplicate table declaration for {name}/{arity}", start.line));
                        }
                    }
                }
                other => return Err(err(format!("unsupported directive {other}"))),
            },
            Term::Compound(f, mut args) if f == ":-" && args.len() == 2 => {
                let body = args.pop().expect("two args");
                let head = args.pop().expect("two args");
                if contains_cut(&body) {
                    return Err(err("cut is not supported".to_string()));
                }
                prog.clauses.push(check_clause(head, body.conjuncts()).map_err(err)?);
            }
            head => prog.clauses.push(check_clause(head, Vec::new()).map_err(err)?),
        }
    }
    Ok(prog)
}

fn check_clause(head: Term, body: Vec<Term>) -> Result<Clause, String> {
    if head.indicator().is_none() {
        return Err(format!("clause head {head} is not callable"));
    }
    for g in &body {
        if matches!(g, Term::Int(_) | Term::List(..)) {
            return Err(format!("body goal {g} is not callable"));
        }
    }
    Ok(Clause { head, body })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Term {
        Term::Int(v)
    }

    fn var(v: &str) -> Term {
        Term::Var(v.to_string())
    }

    #[test]
    fn is_list_program() {
        let p = parse_program(":- table is_list/1.\nis_list([]).\nis_list([_|L]) :- is_list(L).\n").unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert!(p.is_tabled("is_list", 1));
        assert_eq!(p.clauses[0].head, Term::compound("is_list", vec![Term::nil()]));
        assert_eq!(p.clauses[1].head, Term::compound("is_list", vec![Term::List(vec![var("_")], Box::new(var("L")))]));
        assert_eq!(p.clauses[1].body, vec![Term::compound("is_list", vec![var("L")])]);
    }

    #[test]
    fn create_list_program() {
        let p = parse_program(
            "create_list(N,L):- between(1,N,I), range(1,I,L).\n\
             range(L,H,[]) :- L>H.\n\
             range(L,H,[L|T]) :- L=<H, L1 is L+1, range(L1,H,T).",
        )
        .unwrap();
        assert_eq!(p.clauses.len(), 3);
        let body = &p.clauses[0].body;
        assert_eq!(body[0].indicator(), Some(("between", 3)));
        assert_eq!(body[1].indicator(), Some(("range", 3)));
        assert_eq!(
            p.clauses[2].body[1],
            Term::compound("is", vec![var("L1"), Term::compound("+", vec![var("L"), int(1)])])
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_term("1-2-3").unwrap().to_string(), "-(-(1,2),3)");
        assert_eq!(parse_term("1+2*3").unwrap().to_string(), "+(1,*(2,3))");
        assert_eq!(parse_term("a,b,c").unwrap().to_string(), "','(a,','(b,c))");
        assert_eq!(parse_term("X is - Y").unwrap().to_string(), "is(X,-(Y))");
        assert_eq!(parse_term("X is -1").unwrap().to_string(), "is(X,-1)");
        assert_eq!(parse_term("X is 3 - 1").unwrap().to_string(), "is(X,-(3,1))");
        assert_eq!(parse_term("min(D1+1,min(D2+1,D3))").unwrap().to_string(), "min(+(D1,1),min(+(D2,1),D3))");
        assert_eq!(parse_term("[a,b|T]").unwrap().to_string(), "[a,b|T]");
        assert_eq!(parse_term("'hello world'(x)").unwrap().to_string(), "'hello world'(x)");
        assert_eq!(parse_term("=(X, Y)").unwrap().to_string(), "=(X,Y)");
    }

    #[test]
    fn xfx_does_not_chain() {
        assert!(parse_term("a = b = c").is_err());
    }

    #[test]
    fn unterminated_functor() {
        let e = parse_program("foo(").unwrap_err();
        assert!(e.msg.contains("end of input"), "{e}");
        assert_eq!((e.line, e.col), (1, 5));
    }

    #[test]
    fn error_positions() {
        let e = parse_program("a.\nb :- c d.\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 8));
    }

    #[test]
    fn duplicate_table_is_a_warning() {
        let p = parse_program(":- table p/1.\n:- table p/1.\np(1).").unwrap();
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn table_after_clauses_is_rejected() {
        assert!(parse_program("p(1).\n:- table p/1.").is_err());
    }

    #[test]
    fn cut_is_rejected() {
        assert!(parse_program("p :- !.").is_err());
        assert!(parse_program("p :- a, !, b.").is_err());
    }

    #[test]
    fn comments_and_layout() {
        let p = parse_program("% header\np(1). /* block */ p(2). % trailing\n").unwrap();
        assert_eq!(p.clauses.len(), 2);
    }

    #[test]
    fn multiple_table_specs() {
        let p = parse_program(":- table a/1, b/2.").unwrap();
        assert!(p.is_tabled("a", 1) && p.is_tabled("b", 2));
    }

    #[test]
    fn printed_program_parses_back() {
        let src = ":- table edit/3.\nedit([],[],0).\nedit([_|T],[],D) :- edit(T,[],D0), D is D0+1.\n\
                   p(X) :- X \\== [a|_], 'q r'(-3, - 3).\n";
        let p = parse_program(src).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, again);
    }
}
