//! Expression language for polynomials in the generators.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := product ['.' product]
//! product := factor (['*'] factor)*
//! factor  := primary ['^' uint]
//! primary := rational | 'i' | 'hbar' | atom | 'comm(' expr ',' expr ')' | '(' expr ')'
//! ```
//!
//! Juxtaposition multiplies like `*`. The symmetrized product `.` binds
//! looser than `*` and never chains: `a . b . c` is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use qhexa_core::conformal::HexaIndex;
use qhexa_core::ncalg::Atom;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigRational),
    I,
    Hbar,
    Atom(Atom),
    Y(HexaIndex),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Sym(Box<Ast>, Box<Ast>),
    Comm(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(q) => write!(f, "{q}"),
            Ast::I => f.write_str("i"),
            Ast::Hbar => f.write_str("hbar"),
            Ast::Atom(a) => write!(f, "{a}"),
            Ast::Y(h) => write!(f, "Y_{}", h.label()),
            Ast::Neg(a) => write!(f, "Neg({a})"),
            Ast::Add(a, b) => write!(f, "Add({a}, {b})"),
            Ast::Sub(a, b) => write!(f, "Sub({a}, {b})"),
            Ast::Mul(a, b) => write!(f, "Mul({a}, {b})"),
            Ast::Sym(a, b) => write!(f, "Sym({a}, {b})"),
            Ast::Comm(a, b) => write!(f, "Comm({a}, {b})"),
            Ast::Pow(a, k) => write!(f, "Pow({a}, {k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Dot,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '.' => Tok::Dot,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() => {
                let start = i;
                while i + adv < chars.len() && chars[i + adv].is_ascii_digit() {
                    adv += 1;
                }
                let s: String = chars[start..start + adv].iter().collect();
                Tok::Int(s.parse().expect("digits"))
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i + adv < chars.len() && (chars[i + adv].is_ascii_alphanumeric() || chars[i + adv] == '_') {
                    adv += 1;
                }
                let mut s: String = chars[start..start + adv].iter().collect();
                if s == "Y_" && i + adv < chars.len() && matches!(chars[i + adv], '+' | '-') {
                    s.push(chars[i + adv]);
                    adv += 1;
                }
                Tok::Ident(s)
            }
            other => {
                return Err(ParseError {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push(Spanned { tok, line: l0, col: c0 });
        i += adv;
        col += adv;
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.err_here(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut acc = match self.peek() {
            Tok::Minus => {
                self.next();
                Ast::Neg(Box::new(self.term()?))
            }
            Tok::Plus => {
                self.next();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = Ast::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    acc = Ast::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let left = self.product()?;
        if *self.peek() != Tok::Dot {
            return Ok(left);
        }
        self.next();
        let right = self.product()?;
        if *self.peek() == Tok::Dot {
            return Err(self.err_here("chained '.' is ambiguous because the symmetrized product is not associative; add parentheses"));
        }
        Ok(Ast::Sym(Box::new(left), Box::new(right)))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Ident(_) | Tok::LParen)
    }

    fn product(&mut self) -> Result<Ast, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                self.next();
            } else if !self.starts_factor() {
                return Ok(acc);
            }
            acc = Ast::Mul(Box::new(acc), Box::new(self.factor()?));
        }
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.next();
        match self.next() {
            Tok::Int(n) => {
                let k: u32 = n.try_into().map_err(|_| self.err_here("exponent too large"))?;
                Ok(Ast::Pow(Box::new(base), k))
            }
            t => Err(self.err_at_prev(format!("expected a non-negative integer exponent, found {t}"))),
        }
    }

    fn err_at_prev(&self, msg: String) -> ParseError {
        let s = &self.toks[self.pos.saturating_sub(1)];
        ParseError {
            line: s.line,
            col: s.col,
            msg,
        }
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        match self.next() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash {
                    self.next();
                    match self.next() {
                        Tok::Int(d) if d != BigInt::from(0) => Ok(Ast::Num(BigRational::new(n, d))),
                        Tok::Int(_) => Err(self.err_at_prev("zero denominator".into())),
                        t => Err(self.err_at_prev(format!("expected a denominator, found {t}"))),
                    }
                } else {
                    Ok(Ast::Num(BigRational::from_integer(n)))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "i" => Ok(Ast::I),
                "hbar" => Ok(Ast::Hbar),
                "comm" => {
                    self.expect(Tok::LParen)?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma)?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Ast::Comm(Box::new(a), Box::new(b)))
                }
                _ => atom(&s).map_err(|msg| ParseError { line, col, msg }),
            },
            t => Err(ParseError {
                line,
                col,
                msg: format!("expected an operand, found {t}"),
            }),
        }
    }
}

fn atom(s: &str) -> Result<Ast, String> {
    match s {
        "M" => return Ok(Ast::Atom(Atom::M)),
        "Minv" => return Ok(Ast::Atom(Atom::Minv)),
        "D" => return Ok(Ast::Atom(Atom::D)),
        _ => {}
    }
    let unknown = || format!("unknown symbol '{s}'");
    let (head, idx) = s.split_once('_').ok_or_else(unknown)?;
    let digit = |c: char| {
        c.to_digit(10)
            .filter(|&d| d < 4)
            .map(|d| d as u8)
            .ok_or_else(|| format!("index of '{s}' must be 0-3"))
    };
    let one = || -> Result<u8, String> {
        let mut it = idx.chars();
        match (it.next(), it.next()) {
            (Some(c), None) => digit(c),
            _ => Err(format!("'{s}' takes exactly one index")),
        }
    };
    match head {
        "P" => Ok(Ast::Atom(Atom::P(one()?))),
        "X" => Ok(Ast::Atom(Atom::X(one()?))),
        "S" => Ok(Ast::Atom(Atom::S(one()?))),
        "C" => Ok(Ast::Atom(Atom::C(one()?))),
        "Y" => match idx {
            "-" => Ok(Ast::Y(HexaIndex::Minus)),
            "+" => Ok(Ast::Y(HexaIndex::Plus)),
            _ => Ok(Ast::Y(HexaIndex::Mu(one()?))),
        },
        "J" => {
            let ds: Vec<char> = idx.chars().collect();
            if ds.len() != 2 {
                return Err(format!("'{s}' takes exactly two indices"));
            }
            let (a, b) = (digit(ds[0])?, digit(ds[1])?);
            match a.cmp(&b) {
                std::cmp::Ordering::Less => Ok(Ast::Atom(Atom::J(a, b))),
                std::cmp::Ordering::Greater => Ok(Ast::Neg(Box::new(Ast::Atom(Atom::J(b, a))))),
                std::cmp::Ordering::Equal => Err(format!("'{s}' has equal indices; J is antisymmetric")),
            }
        }
        _ => Err(unknown()),
    }
}

pub fn parse(text: &str) -> Result<Ast, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err_here(format!("unexpected {}", p.peek())));
    }
    Ok(e)
}
