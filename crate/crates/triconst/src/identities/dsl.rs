//! A small language for identity manifests.
//!
//! ```text
//! lemma "14.8" {
//!   inner a b;
//!   range a [0, 1/2]; range b (0, 1];
//!   let d1 = 1 - a;
//!   check 112*(a^2 + b^2)*(d1^2 + b^2)/b^2*(L1(a, b) - L1(a, 0)) == 8*(a*d1 - b^2)^2 + b^2;
//!   nonneg 8*(a*d1 - b^2)^2 + b^2;
//! }
//! ```
//!
//! Statements: `inner` / `outer` variable declarations (outer variables are
//! the polynomial "dof" variables of quadratic forms), `range` for the region
//! used by positivity claims, `let`, `check lhs == rhs` (exact expansion),
//! `hessian lhs == rhs` (quadratic forms compared through their second
//! derivatives), `nonneg e` and `positive e`.
//!
//! Expressions use `+ - * / ^`, parentheses, integer literals of any size and
//! calls: `diff(e, v[, k])`, `subs(e, v, val)`, `subs(e, {v, ..}, {val, ..})`,
//! `int(e, v, lo, hi)`, `L1`..`L4(a, b)`, and the element forms
//! `F_alpha_0`, `F_alpha_1`, `F_beta_0`, `F_beta_1`, `F_beta_2`.
//! `-x^2` parses as `-(x^2)`. Comments run from `#` to the end of the line.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::symbolic::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(String, Vec<Expr>),
    List(Vec<Expr>),
}

impl Expr {
    /// Whether evaluation needs symbolic operations (derivatives or integrals).
    pub fn needs_symbolic(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Ident(_) => false,
            Expr::Neg(e) | Expr::Pow(e, _) => e.needs_symbolic(),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.needs_symbolic() || y.needs_symbolic()
            }
            Expr::Call(name, args) => {
                matches!(name.as_str(), "diff" | "int") || args.iter().any(Expr::needs_symbolic)
            }
            Expr::List(items) => items.iter().any(Expr::needs_symbolic),
        }
    }

    /// Identifiers referenced anywhere in the expression.
    pub fn idents<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Num(_) => {}
            Expr::Ident(s) => out.push(s),
            Expr::Neg(e) | Expr::Pow(e, _) => e.idents(out),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.idents(out);
                y.idents(out);
            }
            Expr::Call(_, args) | Expr::List(args) => args.iter().for_each(|a| a.idents(out)),
        }
    }
}

/// An interval end: inclusive or exclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound {
    pub value: Rational,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Inner(Vec<String>),
    Outer(Vec<String>),
    Range { var: String, lo: Bound, hi: Bound },
    Let(String, Expr),
    Check(Expr, Expr),
    Hessian(Expr, Expr),
    NonNeg(Expr),
    Positive(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    /// 1-based source line of the statement's first token.
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaBlock {
    pub id: String,
    pub title: Option<String>,
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Str(String),
    Sym(&'static str),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

const SYMBOLS: [&str; 16] = [
    "==", "+", "-", "*", "/", "^", "(", ")", "{", "}", "[", "]", ",", ";", "=", ".",
];

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next()? {
            out.push(t);
        }
        Ok(out)
    }

    fn next(&mut self) -> Result<Option<(Tok, usize)>> {
        loop {
            match self.src.get(self.pos) {
                None => return Ok(None),
                Some(b'\n') => {
                    self.line += 1;
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while self.src.get(self.pos).is_some_and(|&c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                Some(_) => break,
            }
        }
        let start = self.pos;
        let c = self.src[start];
        let line = self.line;
        if c.is_ascii_digit() {
            while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
            let v: BigInt = text.parse().map_err(|_| self.err("bad integer"))?;
            return Ok(Some((Tok::Int(v), line)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|&c| c.is_ascii_alphanumeric() || c == b'_')
            {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
            return Ok(Some((Tok::Ident(text.to_string()), line)));
        }
        if c == b'"' {
            self.pos += 1;
            while self.src.get(self.pos).is_some_and(|&c| c != b'"' && c != b'\n') {
                self.pos += 1;
            }
            if self.src.get(self.pos) != Some(&b'"') {
                return Err(self.err("unterminated string"));
            }
            let text = std::str::from_utf8(&self.src[start + 1..self.pos])
                .map_err(|_| self.err("string is not UTF-8"))?;
            self.pos += 1;
            return Ok(Some((Tok::Str(text.to_string()), line)));
        }
        for s in SYMBOLS {
            if self.src[start..].starts_with(s.as_bytes()) {
                self.pos += s.len();
                return Ok(Some((Tok::Sym(s), line)));
            }
        }
        Err(self.err(&format!("unexpected character {:?}", c as char)))
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("line {}: {msg}", self.line))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(0, |(_, l)| *l)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("line {}: {msg}", self.line()))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.err("expected identifier"))
            }
        }
    }

    fn file(&mut self) -> Result<Vec<LemmaBlock>> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.lemma()?);
        }
        Ok(out)
    }

    fn lemma(&mut self) -> Result<LemmaBlock> {
        if self.ident()? != "lemma" {
            self.pos -= 1;
            return Err(self.err("expected `lemma`"));
        }
        let id = match self.bump() {
            Some(Tok::Str(s)) => s,
            _ => return Err(self.err("expected lemma id string")),
        };
        let title = match self.peek() {
            Some(Tok::Str(_)) => match self.bump() {
                Some(Tok::Str(s)) => Some(s),
                _ => unreachable!(),
            },
            _ => None,
        };
        self.expect_sym("{")?;
        let mut stmts = Vec::new();
        while !self.eat_sym("}") {
            if self.peek().is_none() {
                return Err(self.err("unterminated lemma block"));
            }
            stmts.push(self.stmt()?);
        }
        Ok(LemmaBlock { id, title, stmts })
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let line = self.line();
        let kw = self.ident()?;
        let kind = match kw.as_str() {
            "inner" | "outer" => {
                let mut names = Vec::new();
                while !self.is_sym(";") {
                    names.push(self.ident()?);
                }
                if kw == "inner" {
                    StmtKind::Inner(names)
                } else {
                    StmtKind::Outer(names)
                }
            }
            "range" => {
                let var = self.ident()?;
                let lo_open = if self.eat_sym("(") {
                    true
                } else {
                    self.expect_sym("[")?;
                    false
                };
                let lo = self.rational()?;
                self.expect_sym(",")?;
                let hi = self.rational()?;
                let hi_open = if self.eat_sym(")") {
                    true
                } else {
                    self.expect_sym("]")?;
                    false
                };
                StmtKind::Range {
                    var,
                    lo: Bound { value: lo, open: lo_open },
                    hi: Bound { value: hi, open: hi_open },
                }
            }
            "let" => {
                let name = self.ident()?;
                self.expect_sym("=")?;
                StmtKind::Let(name, self.expr()?)
            }
            "check" | "hessian" => {
                let lhs = self.expr()?;
                self.expect_sym("==")?;
                let rhs = self.expr()?;
                if kw == "check" {
                    StmtKind::Check(lhs, rhs)
                } else {
                    StmtKind::Hessian(lhs, rhs)
                }
            }
            "nonneg" => StmtKind::NonNeg(self.expr()?),
            "positive" => StmtKind::Positive(self.expr()?),
            other => return Err(self.err(&format!("unknown statement `{other}`"))),
        };
        self.expect_sym(";")?;
        Ok(Stmt { kind, line })
    }

    /// `[-]p[/q]` for region bounds.
    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat_sym("-");
        let p = match self.bump() {
            Some(Tok::Int(v)) => v,
            _ => return Err(self.err("expected number")),
        };
        let mut text = format!("{}{p}", if neg { "-" } else { "" });
        if self.eat_sym("/") {
            match self.bump() {
                Some(Tok::Int(q)) => text = format!("{text}/{q}"),
                _ => return Err(self.err("expected denominator")),
            }
        }
        parse_rational(&text)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_sym("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_sym("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat_sym("^") {
            let neg = self.eat_sym("-");
            let k = match self.bump() {
                Some(Tok::Int(v)) => i32::try_from(v).map_err(|_| self.err("exponent too large"))?,
                _ => return Err(self.err("exponent must be an integer literal")),
            };
            base = Expr::Pow(Box::new(base), if neg { -k } else { k });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Int(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(name)) => {
                if self.eat_sym("(") {
                    let args = self.args(")")?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Some(Tok::Sym("(")) => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Sym("{")) => Ok(Expr::List(self.args("}")?)),
            _ => {
                self.pos -= 1;
                Err(self.err("expected expression"))
            }
        }
    }

    fn args(&mut self, close: &str) -> Result<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat_sym(close) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_sym(close) {
                return Ok(args);
            }
            self.expect_sym(",")?;
        }
    }
}

/// Parses a whole manifest.
pub fn parse_manifest(src: &str) -> Result<Vec<LemmaBlock>> {
    let toks = Lexer::tokens(src)?;
    Parser { toks, pos: 0 }.file()
}

/// Parses a single expression.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}
