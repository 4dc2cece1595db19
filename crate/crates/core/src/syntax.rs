//! Surface syntax for terms.
//!
//! ```text
//! term   ::= lambda | atom+ lambda?
//! lambda ::= ("\" | "λ") ident+ "." term
//! atom   ::= ident | "(" term ")"
//! ident  ::= letter (letter | digit | "_" | "'")*
//! ```
//!
//! Abstraction bodies extend as far right as possible and application is
//! left associative. The printer always emits `\` and parenthesises
//! abstractions in argument position.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::ParseError;
use crate::term::{Name, Term, TermKind};

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        scope: Vec::new(),
        end: end_location(text),
    };
    let term = parser.term()?;
    if let Some(tok) = parser.peek() {
        return Err(parser.error_at(tok, "unexpected input after term"));
    }
    Ok(term)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    Open,
    Close,
    Ident(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn end_location(text: &str) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(c) = chars.next() {
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            continue;
        }
        column += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::Open,
            ')' => Tok::Close,
            c if c.is_alphabetic() => {
                let mut name = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_alphanumeric() || n == '_' || n == '\'' {
                        name.push(n);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Token {
            tok,
            line: l,
            column: col,
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    scope: Vec<Name>,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_at(&self, tok: &Token, message: &str) -> ParseError {
        ParseError {
            line: tok.line,
            column: tok.column,
            message: String::from(message),
        }
    }

    fn error_here(&self, message: &str) -> ParseError {
        match self.peek() {
            Some(tok) => self.error_at(tok, message),
            None => ParseError {
                line: self.end.0,
                column: self.end.1,
                message: format!("{message} at end of input"),
            },
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Lambda,
                ..
            })
        ) {
            return self.lambda();
        }
        let mut acc = self.atom()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Ident(_)) | Some(Tok::Open) => {
                    let arg = self.atom()?;
                    acc = Term::app(acc, arg);
                }
                Some(Tok::Lambda) => {
                    let arg = self.lambda()?;
                    return Ok(Term::app(acc, arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.pos += 1;
        let mut binders = Vec::new();
        while let Some(Token {
            tok: Tok::Ident(name),
            ..
        }) = self.peek()
        {
            binders.push(Name::from(name.as_str()));
            self.pos += 1;
        }
        if binders.is_empty() {
            return Err(self.error_here("expected a binder after lambda"));
        }
        match self.peek() {
            Some(Token { tok: Tok::Dot, .. }) => self.pos += 1,
            _ => return Err(self.error_here("expected '.' after binders")),
        }
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.term();
        self.scope.truncate(depth);
        let body = body?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |acc, name| Term::abs(name, acc)))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("expected a term"));
        };
        match tok.tok {
            Tok::Ident(name) => {
                self.pos += 1;
                let index = self.scope.iter().rev().position(|b| **b == *name);
                Ok(match index {
                    Some(i) => Term::bound(i as u32),
                    None => Term::var(&name),
                })
            }
            Tok::Open => {
                self.pos += 1;
                let inner = self.term()?;
                match self.peek() {
                    Some(Token {
                        tok: Tok::Close, ..
                    }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error_here("expected ')'")),
                }
            }
            _ => Err(self.error_at(&tok, "expected a variable or '('")),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    Fun,
    Arg,
}

/// Canonical text of a term; `parse_term` of the result is α-equal to `t`.
///
/// Binders keep their hint when it clashes with neither a free variable nor
/// an enclosing binder; otherwise primes are appended until it does not.
pub fn print_term(t: &Term) -> String {
    let mut printer = Printer {
        free: t.free_vars(),
        scope: Vec::new(),
        out: String::new(),
    };
    printer.term(t, Slot::Top);
    printer.out
}

struct Printer {
    free: BTreeSet<Name>,
    scope: Vec<String>,
    out: String,
}

impl Printer {
    fn fresh(&self, hint: &str) -> String {
        let mut name = if is_identifier(hint) {
            String::from(hint)
        } else {
            String::from("v")
        };
        while self.free.iter().any(|f| **f == *name) || self.scope.contains(&name) {
            name.push('\'');
        }
        name
    }

    fn term(&mut self, t: &Term, slot: Slot) {
        match t.kind() {
            TermKind::Free(x) => self.out.push_str(x),
            TermKind::Bound(i) => {
                let idx = self.scope.len().checked_sub(1 + *i as usize);
                match idx {
                    Some(idx) => {
                        let name = self.scope[idx].clone();
                        self.out.push_str(&name);
                    }
                    // Only reachable when printing an open fragment.
                    None => self.out.push_str(&format!("#{i}")),
                }
            }
            TermKind::Lam(..) => {
                if slot != Slot::Top {
                    self.out.push('(');
                }
                self.out.push('\\');
                let depth = self.scope.len();
                let mut cur = t;
                while let TermKind::Lam(hint, body) = cur.kind() {
                    let name = self.fresh(hint);
                    if self.scope.len() > depth {
                        self.out.push(' ');
                    }
                    self.out.push_str(&name);
                    self.scope.push(name);
                    cur = body;
                }
                self.out.push_str(". ");
                self.term(cur, Slot::Top);
                self.scope.truncate(depth);
                if slot != Slot::Top {
                    self.out.push(')');
                }
            }
            TermKind::App(f, a) => {
                if slot == Slot::Arg {
                    self.out.push('(');
                }
                self.term(f, Slot::Fun);
                self.out.push(' ');
                self.term(a, Slot::Arg);
                if slot == Slot::Arg {
                    self.out.push(')');
                }
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic())
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}
