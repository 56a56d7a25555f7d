//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' ('(' rational ')' | int))?
//! atom   := rational | 't' | '(' expr ')' | name '(' expr ')' | name
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Largest integer power accepted on a non-`t` base.
pub const MAX_POWER: u32 = 4096;
const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    /// `t^e` with `e > 0`.
    T(BigRational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(String, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(position: usize, expected: &[&str]) -> Self {
        ParseError { position, expected: expected.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: expected {}", self.position, self.expected.join(" or "))
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::new(p.pos, &["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(e)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::new(self.pos, &[&format!("'{}'", c as char)]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(self.pos, &["shallower nesting"]));
        }
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let mut negations = 0usize;
        while self.eat(b'-') {
            negations += 1;
            if negations > MAX_DEPTH {
                return Err(ParseError::new(self.pos, &["shallower nesting"]));
            }
        }
        let mut e = self.factor()?;
        for _ in 0..negations {
            e = Expr::Neg(Box::new(e));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let e = if self.eat(b'(') {
            let e = self.rational()?;
            self.expect(b')')?;
            e
        } else {
            self.skip_ws();
            BigRational::from_integer(self.integer()?)
        };
        match base {
            Expr::T(ref one) if one == &BigRational::from_integer(1.into()) => {
                if !e.is_positive() {
                    return Err(ParseError::new(at, &["positive exponent"]));
                }
                Ok(Expr::T(e))
            }
            _ => {
                let n = e
                    .is_integer()
                    .then(|| e.to_integer().to_u32())
                    .flatten()
                    .filter(|n| *n <= MAX_POWER)
                    .ok_or_else(|| ParseError::new(at, &["integer power 0..=4096"]))?;
                Ok(Expr::Pow(Box::new(base), n))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Num(self.rational()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident();
                if self.peek() == Some(b'(') {
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Expr::Call(name, Box::new(arg)));
                }
                if name == "t" {
                    return Ok(Expr::T(BigRational::from_integer(1.into())));
                }
                Ok(Expr::Var(name))
            }
            _ => Err(ParseError::new(self.pos, &["number", "'t'", "'('", "name", "'-'"])),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let at = self.pos;
        let d = self.digits();
        if d.is_empty() {
            return Err(ParseError::new(at, &["digit"]));
        }
        Ok(d.parse().expect("ascii digits"))
    }

    /// `int ('/' int)?` or a decimal `int? '.' digits`.
    fn rational(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let int = self.digits().to_string();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let frac = self.digits().to_string();
            if frac.is_empty() {
                return Err(ParseError::new(self.pos, &["digit"]));
            }
            let n: BigInt = format!("{int}{frac}").parse().expect("ascii digits");
            return Ok(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32)));
        }
        if int.is_empty() {
            return Err(ParseError::new(at, &["number"]));
        }
        let n: BigInt = int.parse().expect("ascii digits");
        if self.eat(b'/') {
            self.skip_ws();
            let at = self.pos;
            let d = self.integer()?;
            if d.is_zero() {
                return Err(ParseError::new(at, &["nonzero denominator"]));
            }
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }
}

/// Variables occurring in `e`, sorted and deduplicated.
pub fn variables(e: &Expr) -> Vec<String> {
    fn walk(e: &Expr, out: &mut Vec<String>) {
        match e {
            Expr::Num(_) | Expr::T(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => walk(a, out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn three_terms() {
        let e = parse("3/2 + 2*t^(1/2) - t").unwrap();
        let Expr::Sub(lhs, rhs) = e else { panic!("not a difference") };
        assert_eq!(*rhs, Expr::T(r(1, 1)));
        let Expr::Add(a, b) = *lhs else { panic!("not a sum") };
        assert_eq!(*a, Expr::Num(r(3, 2)));
        assert_eq!(*b, Expr::Mul(Box::new(Expr::Num(r(2, 1))), Box::new(Expr::T(r(1, 2)))));
    }

    #[test]
    fn power_node() {
        let e = parse("(1+t^(1/2))^(2)").unwrap();
        assert!(matches!(e, Expr::Pow(_, 2)));
        assert_eq!(parse("t^(3/2)").unwrap(), Expr::T(r(3, 2)));
        assert!(matches!(parse("y^3").unwrap(), Expr::Pow(_, 3)));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse("1 + ").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(parse("t^(1/0)").is_err());
        assert!(parse("(2)^(1/2)").is_err());
        assert!(parse("t^(0)").is_err());
        assert_eq!(parse("1 2").unwrap_err().position, 2);
    }

    #[test]
    fn calls_and_variables() {
        let e = parse("sin(x) + y*x").unwrap();
        assert_eq!(variables(&e), vec!["x".to_string(), "y".to_string()]);
        assert_eq!(parse("0.25").unwrap(), Expr::Num(r(1, 4)));
    }
}
