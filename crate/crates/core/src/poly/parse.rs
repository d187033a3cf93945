//! Text format for polynomials: sums and products of integer literals, the
//! basis element `w` (or `i` in `Q(sqrt -1)`), variables `x`, `y`, `z` or
//! `x1, x2, ...`, parentheses and non-negative integer powers.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::OPoly;
use crate::error::{Error, Result};
use crate::number_field::{AlgInt, Field};

const MAX_EXPONENT: u32 = 10_000;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

enum Ast {
    Num(BigInt),
    Omega,
    Var(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::Open);
                i += 1
            }
            ')' => {
                out.push(Token::Close);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token::Num(text.parse().expect("digits")));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    field: Field,
    source: &'a str,
    max_var: Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} in {:?}", self.source))
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ast::Neg(Box::new(self.term()?))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                // Juxtaposition: `2x`, `3(x+1)`, `(x+1)(x-1)`.
                Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::Open) => {
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.next() {
                Some(Token::Num(n)) => {
                    let e: u32 = u32::try_from(&n)
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or_else(|| self.err("exponent too large"))?;
                    Ok(Ast::Pow(Box::new(base), e))
                }
                _ => Err(self.err("expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Ast> {
        match self.next() {
            Some(Token::Num(n)) => Ok(Ast::Num(n)),
            Some(Token::Open) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(e),
                    _ => Err(self.err("unbalanced parenthesis")),
                }
            }
            Some(Token::Minus) => Ok(Ast::Neg(Box::new(self.factor()?))),
            Some(Token::Ident(name)) => self.ident(&name),
            _ => Err(self.err("unexpected end of expression")),
        }
    }

    fn ident(&mut self, name: &str) -> Result<Ast> {
        let index = match name {
            "w" => {
                if self.field.is_rational() {
                    return Err(self.err("w is not an element of Q"));
                }
                return Ok(Ast::Omega);
            }
            "i" if self.field.d() == Some(-1) => return Ok(Ast::Omega),
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => match name.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()) {
                Some(k) if k >= 1 => k - 1,
                _ => return Err(self.err(&format!("unknown symbol {name:?}"))),
            },
        };
        self.max_var = Some(self.max_var.map_or(index, |m| m.max(index)));
        Ok(Ast::Var(index))
    }
}

fn eval(ast: &Ast, field: Field, arity: usize) -> OPoly {
    match ast {
        Ast::Num(n) => OPoly::constant(field, arity, AlgInt::from_int(n.clone())),
        Ast::Omega => OPoly::constant(field, arity, AlgInt::omega()),
        Ast::Var(j) => OPoly::var(field, arity, *j),
        Ast::Add(a, b) => eval(a, field, arity).add(&eval(b, field, arity)),
        Ast::Sub(a, b) => eval(a, field, arity).sub(&eval(b, field, arity)),
        Ast::Mul(a, b) => eval(a, field, arity).mul(&eval(b, field, arity)),
        Ast::Neg(a) => eval(a, field, arity).neg(),
        Ast::Pow(a, e) => eval(a, field, arity).pow(*e),
    }
}

pub(super) fn parse(s: &str, field: Field, arity: Option<usize>) -> Result<OPoly> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        field,
        source: s,
        max_var: None,
    };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.err("trailing input"));
    }
    let needed = parser.max_var.map_or(0, |m| m + 1);
    let arity = match arity {
        Some(a) if a < needed => {
            return Err(Error::ArityMismatch {
                expected: a,
                got: needed,
            })
        }
        Some(a) => a,
        None => needed.max(1),
    };
    Ok(eval(&ast, field, arity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_powers() {
        let q = Field::rational();
        let p = OPoly::parse("(x^2-13)(x^2-17)(x^2-221)", q).unwrap();
        assert_eq!(p.total_degree(), Some(6));
        assert_eq!(p.constant_term(), AlgInt::from_i64(-13 * 17 * 221));
        assert_eq!(OPoly::parse("2x+1", q).unwrap(), OPoly::parse("2*x+1", q).unwrap());
        assert_eq!(OPoly::parse("-x^2", q).unwrap(), OPoly::parse("0-x*x", q).unwrap());
    }

    #[test]
    fn gaussian_unit_alias() {
        let g = Field::gaussian();
        assert_eq!(OPoly::parse_element("i", g).unwrap(), AlgInt::omega());
        assert_eq!(OPoly::parse_element("(1+i)^2", g).unwrap(), AlgInt::new(0, 2));
        assert!(OPoly::parse_element("i", Field::quadratic(5).unwrap()).is_err());
        assert!(OPoly::parse_element("w", Field::rational()).is_err());
    }

    #[test]
    fn errors() {
        let q = Field::rational();
        for bad in ["", "x+", "(x", "x^y", "x^-1", "q", "x0", "x$"] {
            assert!(OPoly::parse(bad, q).is_err(), "{bad}");
        }
        assert!(OPoly::parse_element("x+1", q).is_err());
    }
}
