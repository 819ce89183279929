//! Concrete syntax.
//!
//! ```text
//! seq    ::= expr [';' seq]
//! expr   ::= 'let' id [':' type] '=' seq 'in' seq
//!          | ('λ' | '\' | 'fun') id ':' type '.' seq
//!          | 'if' seq 'then' seq 'else' expr
//!          | 'while' seq 'do' expr
//!          | eq [':=' eq]
//! eq     ::= app ['=' app]
//! app    ::= head arg*
//! head   ::= ('succ' | 'pred' | 'ref' | '!') arg | 'mkvar' arg arg | atom
//! arg    ::= '!' arg | atom
//! atom   ::= '()' | nat | id | 'Ω' | 'Omega' | '(' seq ')'
//! type   ::= tatom ['->' type]
//! tatom  ::= 'unit' | 'int' | 'intref' | 'int' 'ref' | '(' type ')'
//! ```
//!
//! `→` may be written for `->`. Comments run from `#` to end of line.

use super::{Binding, LangError, RmlType, Span, Term, TermKind};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    LParen,
    RParen,
    Colon,
    Dot,
    Semi,
    Comma,
    Assign,
    Equals,
    Bang,
    Arrow,
    Lambda,
    Omega,
    Eof,
}

const KEYWORDS: &[&str] = &[
    "let", "in", "if", "then", "else", "while", "do", "succ", "pred", "ref", "mkvar", "fun",
    "Omega", "unit", "int", "intref",
];

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Nat(n) => format!("`{}`", n),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Assign => "`:=`".into(),
        Tok::Equals => "`=`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Lambda => "`λ`".into(),
        Tok::Omega => "`Ω`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        let span = Span { line, col };
        let mut bump = |it: &mut std::iter::Peekable<std::str::Chars>| {
            let ch = it.next().unwrap();
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            ch
        };
        if c.is_whitespace() {
            bump(&mut it);
            continue;
        }
        if c == '#' {
            while let Some(&d) = it.peek() {
                if d == '\n' {
                    break;
                }
                bump(&mut it);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(bump(&mut it));
            }
            let n = s.parse::<u32>().map_err(|_| LangError::Syntax {
                span,
                msg: format!("integer literal `{}` too large", s),
            })?;
            out.push((Tok::Nat(n), span));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            if c == 'λ' || c == 'Ω' {
                bump(&mut it);
                out.push((if c == 'λ' { Tok::Lambda } else { Tok::Omega }, span));
                continue;
            }
            let mut s = String::new();
            while let Some(&d) = it.peek() {
                if !(d.is_alphanumeric() || d == '_' || d == '\'') || d == 'λ' || d == 'Ω' {
                    break;
                }
                s.push(bump(&mut it));
            }
            let tok = match s.as_str() {
                "fun" => Tok::Lambda,
                "Omega" => Tok::Omega,
                _ => Tok::Ident(s),
            };
            out.push((tok, span));
            continue;
        }
        bump(&mut it);
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            '\\' => Tok::Lambda,
            'Ω' => Tok::Omega,
            '→' => Tok::Arrow,
            '=' => Tok::Equals,
            ':' => {
                if it.peek() == Some(&'=') {
                    bump(&mut it);
                    Tok::Assign
                } else {
                    Tok::Colon
                }
            }
            '-' => {
                if it.peek() == Some(&'>') {
                    bump(&mut it);
                    Tok::Arrow
                } else {
                    return Err(LangError::Syntax {
                        span,
                        msg: "unexpected `-`".into(),
                    });
                }
            }
            other => {
                return Err(LangError::Syntax {
                    span,
                    msg: format!("unexpected character `{}`", other),
                })
            }
        };
        out.push((tok, span));
    }
    out.push((Tok::Eof, Span { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        Err(LangError::Syntax {
            span: self.span(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<Span, LangError> {
        if *self.peek() == t {
            Ok(self.advance().1)
        } else {
            self.err(format!(
                "expected {}, found {}",
                describe(&t),
                describe(self.peek())
            ))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), LangError> {
        if self.is_kw(kw) {
            self.advance();
            Ok(())
        } else {
            self.err(format!("expected `{}`, found {}", kw, describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn ty(&mut self) -> Result<RmlType, LangError> {
        let a = self.ty_atom()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let b = self.ty()?;
            Ok(RmlType::arrow(a, b))
        } else {
            Ok(a)
        }
    }

    fn ty_atom(&mut self) -> Result<RmlType, LangError> {
        if self.is_kw("unit") {
            self.advance();
            Ok(RmlType::Unit)
        } else if self.is_kw("intref") {
            self.advance();
            Ok(RmlType::IntRef)
        } else if self.is_kw("int") {
            self.advance();
            if self.is_kw("ref") {
                self.advance();
                Ok(RmlType::IntRef)
            } else {
                Ok(RmlType::Int)
            }
        } else if *self.peek() == Tok::LParen {
            self.advance();
            let t = self.ty()?;
            self.expect(Tok::RParen)?;
            Ok(t)
        } else {
            self.err(format!("expected a type, found {}", describe(self.peek())))
        }
    }

    fn seq(&mut self) -> Result<Term, LangError> {
        let first = self.expr()?;
        if *self.peek() == Tok::Semi {
            let span = self.advance().1;
            let rest = self.seq()?;
            Ok(Term::at(
                TermKind::Seq(Box::new(first), Box::new(rest)),
                span,
            ))
        } else {
            Ok(first)
        }
    }

    fn expr(&mut self) -> Result<Term, LangError> {
        let span = self.span();
        if self.is_kw("let") {
            self.advance();
            let x = self.ident()?;
            // the annotation is accepted and checked against the bound term
            let ann = if *self.peek() == Tok::Colon {
                self.advance();
                Some(self.ty()?)
            } else {
                None
            };
            self.expect(Tok::Equals)?;
            let mut m = self.seq()?;
            if let Some(t) = ann {
                if m.ty.is_none() {
                    m.ty = Some(t);
                }
            }
            self.expect_kw("in")?;
            let n = self.seq()?;
            return Ok(Term::at(TermKind::Let(x, Box::new(m), Box::new(n)), span));
        }
        if *self.peek() == Tok::Lambda {
            self.advance();
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            let t = self.ty()?;
            self.expect(Tok::Dot)?;
            let body = self.seq()?;
            return Ok(Term::at(TermKind::Lam(x, t, Box::new(body)), span));
        }
        if self.is_kw("if") {
            self.advance();
            let c = self.seq()?;
            self.expect_kw("then")?;
            let a = self.seq()?;
            self.expect_kw("else")?;
            let b = self.expr()?;
            return Ok(Term::at(
                TermKind::If(Box::new(c), Box::new(a), Box::new(b)),
                span,
            ));
        }
        if self.is_kw("while") {
            self.advance();
            let c = self.seq()?;
            self.expect_kw("do")?;
            let b = self.expr()?;
            return Ok(Term::at(TermKind::While(Box::new(c), Box::new(b)), span));
        }
        let lhs = self.eq()?;
        if *self.peek() == Tok::Assign {
            let span = self.advance().1;
            let rhs = self.eq()?;
            return Ok(Term::at(
                TermKind::Assign(Box::new(lhs), Box::new(rhs)),
                span,
            ));
        }
        Ok(lhs)
    }

    fn eq(&mut self) -> Result<Term, LangError> {
        let lhs = self.app()?;
        if *self.peek() == Tok::Equals {
            let span = self.advance().1;
            let rhs = self.app()?;
            return Ok(Term::at(TermKind::Eq(Box::new(lhs), Box::new(rhs)), span));
        }
        Ok(lhs)
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Bang | Tok::LParen | Tok::Nat(_) | Tok::Omega => true,
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term, LangError> {
        let mut f = self.head()?;
        while self.starts_arg() {
            let span = self.span();
            let a = self.arg()?;
            f = Term::at(TermKind::App(Box::new(f), Box::new(a)), span);
        }
        Ok(f)
    }

    fn head(&mut self) -> Result<Term, LangError> {
        let span = self.span();
        let unary = |p: &mut Parser, k: fn(Box<Term>) -> TermKind| -> Result<Term, LangError> {
            p.advance();
            let a = p.arg()?;
            Ok(Term::at(k(Box::new(a)), span))
        };
        if self.is_kw("succ") {
            return unary(self, TermKind::Succ);
        }
        if self.is_kw("pred") {
            return unary(self, TermKind::Pred);
        }
        if self.is_kw("ref") {
            return unary(self, TermKind::Ref);
        }
        if *self.peek() == Tok::Bang {
            return unary(self, TermKind::Deref);
        }
        if self.is_kw("mkvar") {
            self.advance();
            let a = self.arg()?;
            let b = self.arg()?;
            return Ok(Term::at(TermKind::Mkvar(Box::new(a), Box::new(b)), span));
        }
        self.atom()
    }

    fn arg(&mut self) -> Result<Term, LangError> {
        if *self.peek() == Tok::Bang {
            let span = self.advance().1;
            let a = self.arg()?;
            return Ok(Term::at(TermKind::Deref(Box::new(a)), span));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term, LangError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                if *self.peek() == Tok::RParen {
                    self.advance();
                    return Ok(Term::at(TermKind::Unit, span));
                }
                let t = self.seq()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Nat(n) => {
                self.advance();
                Ok(Term::at(TermKind::Int(n), span))
            }
            Tok::Omega => {
                self.advance();
                Ok(Term::at(TermKind::Omega, span))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                Ok(Term::at(TermKind::Var(x), span))
            }
            t => self.err(format!("expected a term, found {}", describe(&t))),
        }
    }
}

fn parser(src: &str) -> Result<Parser, LangError> {
    Ok(Parser {
        toks: lex(src)?,
        pos: 0,
    })
}

/// Parses a term. The result is untyped and may contain sugar.
pub fn parse_term(src: &str) -> Result<Term, LangError> {
    let mut p = parser(src)?;
    let t = p.seq()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<RmlType, LangError> {
    let mut p = parser(src)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(t)
}

/// Parses `x: τ, y: σ` (commas or semicolons between entries, both optional
/// at line ends). An empty string is the empty context.
pub fn parse_context(src: &str) -> Result<Vec<Binding>, LangError> {
    let mut p = parser(src)?;
    let mut out: Vec<Binding> = Vec::new();
    loop {
        while matches!(p.peek(), Tok::Comma | Tok::Semi) {
            p.advance();
        }
        if *p.peek() == Tok::Eof {
            break;
        }
        let x = p.ident()?;
        p.expect(Tok::Colon)?;
        let t = p.ty()?;
        if out.iter().any(|(n, _)| *n == x) {
            return Err(LangError::DuplicateContext(x));
        }
        out.push((x, t));
    }
    Ok(out)
}
