//! Concrete syntax for programs (`.pig` files) and goals.
//!
//! ```text
//! % factorial
//! fact(0, 1) := true.
//! fact(X+1, X*Y+Y) := fact(X, Y).
//! ```
//!
//! Goals use `true`, `false`, `nat(T)`, `&`, `=>`, `exists X.` and `forall X.`.
//! Upper-case identifiers are variables; inside a quantifier any bound name is.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{Clause, Formula};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("line {line}, column {col}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("line {line}, column {col}: {message}")]
    Grammar {
        line: usize,
        col: usize,
        message: String,
    },
}

/// A parsed program: clauses in textual order plus explicit `%level` annotations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub annotations: BTreeMap<String, u8>,
}

impl Program {
    pub fn clauses_for<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses
            .iter()
            .filter(move |c| c.predicate() == predicate)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, level) in &self.annotations {
            writeln!(f, "%level {p} {level}")?;
        }
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Comma,
    Dot,
    Amp,
    Arrow,
    Define,
    Plus,
    Star,
    Level,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Arrow => write!(f, "`=>`"),
            Tok::Define => write!(f, "`:=`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Level => write!(f, "`%level`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            let rest: String = chars[i + 1..].iter().take(5).collect();
            let after = chars.get(i + 6).copied();
            if rest == "level" && after.is_none_or(|c| c.is_whitespace()) {
                out.push(Spanned {
                    tok: Tok::Level,
                    line,
                    col,
                });
                i += 6;
                col += 6;
            } else {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            while i < chars.len() && chars[i] == '\'' {
                s.push('\'');
                i += 1;
                col += 1;
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            let n = s.parse().map_err(|_| SyntaxError::Grammar {
                line: start_line,
                col: start_col,
                message: format!("numeral {s} is too large"),
            })?;
            Tok::Num(n)
        } else {
            let two: String = chars[i..].iter().take(2).collect();
            let (tok, len) = match (c, two.as_str()) {
                (_, "=>") => (Tok::Arrow, 2),
                (_, ":=") => (Tok::Define, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('&', _) => (Tok::Amp, 1),
                ('+', _) => (Tok::Plus, 1),
                ('*', _) => (Tok::Star, 1),
                _ => {
                    return Err(SyntaxError::Parse {
                        line,
                        col,
                        expected: vec!["a token".into()],
                        found: format!("`{c}`"),
                    })
                }
            };
            i += len;
            col += len;
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["true", "false", "exists", "forall", "nat"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError::Parse {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn grammar<T>(&self, at: (usize, usize), message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Grammar {
            line: at.0,
            col: at.1,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&[&tok.to_string()])
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(&["an identifier"]),
        }
    }

    fn is_variable(&self, name: &str) -> bool {
        name.starts_with(|c: char| c.is_ascii_uppercase()) || self.scope.iter().any(|s| s == name)
    }

    fn program(&mut self) -> Result<Program, SyntaxError> {
        let mut program = Program::default();
        loop {
            match self.peek() {
                Tok::Eof => return Ok(program),
                Tok::Level => {
                    self.bump();
                    let name = self.ident()?;
                    let at = self.here();
                    let level = match self.bump() {
                        Tok::Num(n @ (0 | 1)) => n as u8,
                        _ => return self.grammar(at, "a level annotation must be 0 or 1"),
                    };
                    program.annotations.insert(name, level);
                }
                _ => program.clauses.push(self.clause()?),
            }
        }
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let at = self.here();
        let head = match self.formula()? {
            Formula::Atom(t) => t,
            _ => return self.grammar(at, "a clause head must be an atom"),
        };
        self.expect(Tok::Define)?;
        let body = self.formula()?;
        self.expect(Tok::Dot)?;
        Ok(Clause {
            head,
            body: body.uniquify_binders(),
        })
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let at = self.here();
        let lhs = self.conjunction()?;
        if *self.peek() != Tok::Arrow {
            return Ok(lhs);
        }
        self.bump();
        let rhs_at = self.here();
        let rhs = self.formula()?;
        match lhs {
            Formula::Nat(Term::Var(x)) => {
                if !rhs.is_goal() {
                    return self.grammar(
                        rhs_at,
                        format!("the consequent of nat({x}) => must be a level-0 goal"),
                    );
                }
                Ok(Formula::nat_implies(Term::Var(x), rhs))
            }
            lhs if !lhs.is_goal() => self.grammar(
                at,
                "the antecedent of => must be a level-0 goal (no forall, no =>)",
            ),
            lhs => Ok(Formula::implies(lhs, rhs)),
        }
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::Dot)?;
                self.scope.push(name.clone());
                let body = self.formula();
                self.scope.pop();
                let body = body?;
                Ok(if kw == "exists" {
                    Formula::exists(name, body)
                } else {
                    Formula::forall(name, body)
                })
            }
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(kw) if kw == "nat" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Nat(t))
            }
            Tok::Ident(name) if !self.is_variable(&name) => {
                self.bump();
                let args = self.arguments()?;
                Ok(Formula::Atom(Term::app(name, args)))
            }
            _ => self.error(&["a formula"]),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let mut lhs = self.product()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.product()?;
            lhs = match rhs {
                Term::Nat(1) => Term::succ(lhs),
                rhs => Term::add(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Term, SyntaxError> {
        let mut lhs = self.primary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.primary()?;
            lhs = Term::mul(lhs, rhs);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Term::Nat(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                if self.is_variable(&name) {
                    Ok(Term::Var(name))
                } else {
                    Ok(Term::app(name, self.arguments()?))
                }
            }
            _ => self.error(&["a term"]),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, SyntaxError> {
    Parser::new(text)?.program()
}

/// Parses a goal. Binders are renamed apart, so no name is bound twice.
pub fn parse_goal(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(f.uniquify_binders())
}

pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(t)
}
