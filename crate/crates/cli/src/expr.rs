//! A small grammar for operator coefficients written as text.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//! ```
//! Functions: exp, sin, cos, cosh, sinh, tanh, sqrt, abs.

use anyhow::{anyhow, bail, Result};
use opfeast::{ChebFun, Interval};

/// Largest number of Chebyshev points tried before a coefficient is declared
/// unresolvable (a pole or a jump inside the domain).
const FIT_CAP: usize = 1 << 14;
const FIT_TOL: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Cosh,
    Sinh,
    Tanh,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "cosh" => Func::Cosh,
            "sinh" => Func::Sinh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Cosh => v.cosh(),
            Func::Sinh => v.sinh(),
            Func::Tanh => v.tanh(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        bail!("{what} at offset {} in '{}'", self.pos, self.src)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(c @ ('+' | '-')) => c,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(c @ ('*' | '/')) => c,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.fail("unexpected end of expression"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match name {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ => {
                        let f = Func::from_name(name).ok_or_else(|| anyhow!("unknown name '{name}' in '{}'", self.src))?;
                        if !self.eat('(') {
                            return self.fail(&format!("expected '(' after {name}"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return self.fail("expected ')'");
                        }
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                }
            }
            Some(c) => self.fail(&format!("unexpected '{c}'")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let rest = &self.src[self.pos..];
        let mut end = 0;
        let bytes = rest.as_bytes();
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let v: f64 = rest[..end].parse().map_err(|_| anyhow!("bad number '{}' in '{}'", &rest[..end], self.src))?;
        self.pos += end;
        Ok(Expr::Num(v))
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail("trailing input");
    }
    Ok(e)
}

/// Parses `text` and fits it on `domain`. Expressions that cannot be resolved
/// there, such as ones with a pole inside the domain, are rejected.
pub fn parse_coeff_expression(text: &str, domain: Interval) -> Result<ChebFun> {
    let e = parse(text)?;
    ChebFun::fit_capped(|x| opfeast::C64::new(e.eval(x), 0.0), domain, FIT_TOL, FIT_CAP)
        .map_err(|err| anyhow!("coefficient '{text}' on [{}, {}]: {err}", domain.a, domain.b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(text: &str, x: f64) -> f64 {
        parse(text).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(at("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(at("-x^2", 3.0), -9.0);
        assert_eq!(at("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(at("2 * -x", 1.5), -3.0);
        assert_eq!(at("1.5e2 + 1e-1", 0.0), 150.1);
        assert!((at("pi * e", 0.0) - std::f64::consts::PI * std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        assert_eq!(at("cosh(x)", 0.0), 1.0);
        assert!((at("tanh(x) + exp(-x) * sin(x) / cos(x)", 0.3) - (0.3f64.tanh() + (-0.3f64).exp() * 0.3f64.tan())).abs() < 1e-15);
    }

    #[test]
    fn fits_polynomials_exactly() {
        let f = parse_coeff_expression("x^2", Interval::unit()).unwrap();
        assert_eq!(f.degree(), 2);
        assert!((f.eval(0.7).re - 0.49).abs() < 1e-15);
        let g = parse_coeff_expression("cosh(x)", Interval::unit()).unwrap();
        assert!((g.eval(0.0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_poles_and_bad_syntax() {
        assert!(parse_coeff_expression("1/(x-0.5)", Interval::unit()).is_err());
        assert!(parse_coeff_expression("1/x", Interval::unit()).is_err());
        for bad in ["", "x +", "(x", "foo(x)", "x y", "sin x", "3..4"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
