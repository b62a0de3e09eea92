//! Text format for triangular systems.
//!
//! One polynomial per line, `fi = <expr>`, with `+ - * / ^`, parentheses,
//! variables `z1..zn`, the imaginary unit `i`, and coefficient literals:
//! integers, decimals, `p/q`, `sqrt(k)` and `root(c0, ..., cd; lo, hi)` for
//! the unique root of `c0 + ... + cd x^d` in `[lo, hi]`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::dyadic::{parse_decimal, Box, Dyadic, DyadicComplex, OracleNumber, PolyBox, RealOracle};
use crate::opoly::{OraclePolynomial, Term, TriangularSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemErrorKind {
    Syntax,
    NotTriangular,
    ZeroDegree,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct SystemError {
    pub kind: SystemErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SystemError {
    fn new(kind: SystemErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        SystemError {
            kind,
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    End,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<(Tok, usize)>, SystemError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = parse_decimal(&text).ok_or_else(|| {
                SystemError::new(
                    SystemErrorKind::Syntax,
                    line,
                    col,
                    format!("bad number `{text}`"),
                )
            })?;
            out.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(SystemError::new(
                SystemErrorKind::Syntax,
                line,
                col,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

/// Dense-map polynomial used while parsing a single line.
#[derive(Clone)]
struct Poly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, OracleNumber>,
}

impl Poly {
    fn constant(arity: usize, c: OracleNumber) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_exact_zero() {
            terms.insert(vec![0; arity], c);
        }
        Poly { arity, terms }
    }

    fn var(arity: usize, j: usize) -> Self {
        let mut e = vec![0; arity];
        e[j] = 1;
        Poly {
            arity,
            terms: BTreeMap::from([(e, OracleNumber::integer(1))]),
        }
    }

    fn as_constant(&self) -> Option<OracleNumber> {
        match self.terms.len() {
            0 => Some(OracleNumber::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert(&mut self, e: Vec<u32>, c: OracleNumber) {
        let sum = match self.terms.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_exact_zero() {
            self.terms.insert(e, sum);
        }
    }

    fn add(mut self, o: Poly) -> Poly {
        for (e, c) in o.terms {
            self.insert(e, c);
        }
        self
    }

    fn neg(self) -> Poly {
        Poly {
            arity: self.arity,
            terms: self.terms.into_iter().map(|(e, c)| (e, c.neg())).collect(),
        }
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                r.insert(e, ca.mul(cb));
            }
        }
        r
    }

    fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::constant(self.arity, OracleNumber::integer(1));
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> SystemError {
        SystemError::new(SystemErrorKind::Syntax, self.line, self.col(), msg)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SystemError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Poly, SystemError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.add(self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, SystemError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Slash => {
                    self.next();
                    let col = self.col();
                    let d = self.unary()?;
                    let r = d.as_constant().and_then(|c| {
                        if c.is_real() {
                            c.re.as_rational()
                        } else {
                            None
                        }
                    });
                    match r {
                        Some(r) if !r.is_zero() => {
                            let inv = OracleNumber::rational(r.recip());
                            acc = acc.mul(&Poly::constant(self.arity, inv));
                        }
                        Some(_) => {
                            return Err(SystemError::new(
                                SystemErrorKind::Syntax,
                                self.line,
                                col,
                                "division by zero",
                            ))
                        }
                        None => {
                            return Err(SystemError::new(
                                SystemErrorKind::Syntax,
                                self.line,
                                col,
                                "only division by a nonzero rational constant is supported",
                            ))
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, SystemError> {
        match self.peek() {
            Tok::Minus => {
                self.next();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, SystemError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.next();
        match self.next() {
            Tok::Num(r) if r.is_integer() && !r.is_negative() && r.numer().bits() <= 16 => {
                Ok(base.pow(r.to_integer().try_into().unwrap()))
            }
            _ => Err(SystemError::new(
                SystemErrorKind::Syntax,
                self.line,
                self.toks[self.pos.saturating_sub(1)].1,
                "exponent must be a small nonnegative integer",
            )),
        }
    }

    fn signed_rational(&mut self) -> Result<BigRational, SystemError> {
        let neg = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let mut v = match self.next() {
            Tok::Num(r) => r,
            _ => return Err(self.err("expected a number")),
        };
        if *self.peek() == Tok::Slash {
            self.next();
            match self.next() {
                Tok::Num(q) if !q.is_zero() => v /= q,
                _ => return Err(self.err("expected a nonzero denominator")),
            }
        }
        Ok(if neg { -v } else { v })
    }

    fn integer(&mut self) -> Result<BigInt, SystemError> {
        let col = self.col();
        let r = self.signed_rational()?;
        if !r.is_integer() {
            return Err(SystemError::new(
                SystemErrorKind::Syntax,
                self.line,
                col,
                "expected an integer",
            ));
        }
        Ok(r.to_integer())
    }

    fn atom(&mut self) -> Result<Poly, SystemError> {
        let col = self.col();
        match self.next() {
            Tok::Num(r) => Ok(Poly::constant(self.arity, OracleNumber::rational(r))),
            Tok::LParen => {
                let p = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::Ident(name) => self.ident(name, col),
            Tok::End => Err(SystemError::new(
                SystemErrorKind::Syntax,
                self.line,
                col,
                "unexpected end of line",
            )),
            t => Err(SystemError::new(
                SystemErrorKind::Syntax,
                self.line,
                col,
                format!("unexpected {t:?}"),
            )),
        }
    }

    fn ident(&mut self, name: String, col: usize) -> Result<Poly, SystemError> {
        if name == "i" {
            return Ok(Poly::constant(
                self.arity,
                OracleNumber::new(RealOracle::zero(), RealOracle::integer(1)),
            ));
        }
        if name == "sqrt" {
            self.expect(Tok::LParen, "`(`")?;
            let k = self.integer()?;
            if k.is_negative() {
                return Err(SystemError::new(
                    SystemErrorKind::Syntax,
                    self.line,
                    col,
                    "sqrt of a negative integer",
                ));
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Poly::constant(
                self.arity,
                OracleNumber::real(RealOracle::sqrt(k)),
            ));
        }
        if name == "root" {
            self.expect(Tok::LParen, "`(`")?;
            let mut coeffs = vec![self.integer()?];
            while *self.peek() == Tok::Comma {
                self.next();
                coeffs.push(self.integer()?);
            }
            self.expect(Tok::Semi, "`;`")?;
            let lo = self.signed_rational()?;
            self.expect(Tok::Comma, "`,`")?;
            let hi = self.signed_rational()?;
            self.expect(Tok::RParen, "`)`")?;
            let syntax = |m: String| SystemError::new(SystemErrorKind::Syntax, self.line, col, m);
            let (lo, hi) = match (Dyadic::from_rational(&lo), Dyadic::from_rational(&hi)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(syntax("root bracket endpoints must be dyadic".into())),
            };
            let o = RealOracle::algebraic(coeffs, lo, hi).map_err(syntax)?;
            return Ok(Poly::constant(self.arity, OracleNumber::real(o)));
        }
        if let Some(j) = name.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()) {
            if j == 0 {
                return Err(SystemError::new(
                    SystemErrorKind::Syntax,
                    self.line,
                    col,
                    "variables start at z1",
                ));
            }
            if j > self.arity {
                return Err(SystemError::new(
                    SystemErrorKind::NotTriangular,
                    self.line,
                    col,
                    format!("f{} mentions z{j}", self.arity),
                ));
            }
            return Ok(Poly::var(self.arity, j - 1));
        }
        Err(SystemError::new(
            SystemErrorKind::Syntax,
            self.line,
            col,
            format!("unknown identifier `{name}`"),
        ))
    }
}

/// Parses a system in the text format.
pub fn parse_system(src: &str) -> Result<TriangularSystem, SystemError> {
    let mut polys = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let text = raw.split('#').next().unwrap();
        if text.trim().is_empty() {
            continue;
        }
        let (lhs, rhs) = text.split_once('=').ok_or_else(|| {
            SystemError::new(SystemErrorKind::Syntax, line, 1, "expected `fi = <expr>`")
        })?;
        let want = polys.len() + 1;
        let name = lhs.trim();
        if name != format!("f{want}") {
            let col = lhs.len() - lhs.trim_start().len() + 1;
            return Err(SystemError::new(
                SystemErrorKind::Syntax,
                line,
                col,
                format!("expected `f{want}`, found `{name}`"),
            ));
        }
        let offset = lhs.chars().count() + 1;
        let mut toks = tokenize(rhs, line)?;
        for t in toks.iter_mut() {
            t.1 += offset;
        }
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            line,
            arity: want,
        };
        let poly = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(p.err("unexpected trailing input"));
        }
        if poly.terms.keys().all(|e| e[want - 1] == 0) {
            return Err(SystemError::new(
                SystemErrorKind::ZeroDegree,
                line,
                offset + 1,
                format!("f{want} has degree 0 in z{want}"),
            ));
        }
        let terms = poly
            .terms
            .into_iter()
            .map(|(exps, coeff)| Term { exps, coeff })
            .collect();
        let op = OraclePolynomial::new(want, terms)
            .map_err(|m| SystemError::new(SystemErrorKind::Syntax, line, offset + 1, m))?;
        polys.push(op);
    }
    if polys.is_empty() {
        return Err(SystemError::new(
            SystemErrorKind::Syntax,
            last_line.max(1),
            1,
            "no polynomials",
        ));
    }
    TriangularSystem::new(polys)
        .map_err(|m| SystemError::new(SystemErrorKind::Syntax, last_line, 1, m))
}

fn write_coeff(out: &mut String, c: &OracleNumber) {
    let s = c.to_string();
    if c.is_real() && c.re.as_rational().is_some_and(|r| r.is_negative()) {
        let _ = write!(out, "({s})");
    } else {
        out.push_str(&s);
    }
}

/// Prints a polynomial in the text format.
pub fn print_polynomial(p: &OraclePolynomial) -> String {
    let mut out = String::new();
    for (k, t) in p.terms().iter().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        let mono: Vec<String> = t
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| {
                if e == 1 {
                    format!("z{}", j + 1)
                } else {
                    format!("z{}^{e}", j + 1)
                }
            })
            .collect();
        let one = t.coeff.is_real()
            && t.coeff
                .re
                .as_rational()
                .is_some_and(|r| r == BigRational::from_integer(1.into()));
        if mono.is_empty() {
            write_coeff(&mut out, &t.coeff);
        } else {
            if !one {
                write_coeff(&mut out, &t.coeff);
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    out
}

/// Prints a system in the text format accepted by [`parse_system`].
pub fn print_system(sys: &TriangularSystem) -> String {
    let mut out = String::new();
    for (i, p) in sys.polys().iter().enumerate() {
        let _ = writeln!(out, "f{} = {}", i + 1, print_polynomial(p));
    }
    out
}

/// Region of interest `cx,cy,w;...`, one triple per variable. Centers that
/// are not dyadic are rounded to 64 fractional bits and widths enlarged to
/// compensate.
pub fn parse_roi(spec: &str, n: usize) -> Result<PolyBox, String> {
    let mut boxes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let f: Vec<&str> = part.split(',').map(str::trim).collect();
        let [cx, cy, w] = f.as_slice() else {
            return Err(format!("`{part}` is not a triple cx,cy,w"));
        };
        let num =
            |t: &str| Dyadic::parse_approx(t, 64).map_err(|e| format!("`{t}`: {}", e.message));
        let (cx, ex) = num(cx)?;
        let (cy, ey) = num(cy)?;
        let (w, ew) = num(w)?;
        let w = &(&w + &ew) + &(&ex + &ey).shl(1);
        if !w.is_positive() {
            return Err(format!("width in `{part}` must be positive"));
        }
        boxes.push(Box::new(DyadicComplex::new(cx, cy), w));
    }
    if boxes.len() != n {
        return Err(format!(
            "region of interest has {} boxes for {n} variables",
            boxes.len()
        ));
    }
    Ok(PolyBox(boxes))
}

/// The polybox centered at the origin with the given width in every
/// component.
pub fn centered_roi(n: usize, width: i64) -> PolyBox {
    PolyBox(vec![
        Box::new(DyadicComplex::zero(), Dyadic::from_i64(width));
        n
    ])
}
