//! A minimal arithmetic expression grammar for scenario files:
//! `+ - * / ^`, `sin cos exp sqrt`, numeric literals and coordinates by
//! name. Expressions compile once against a chart's coordinate names and
//! evaluate on jets, so user-defined fields are differentiable without
//! recompiling.
//!
//! Grammar (precedence climbing):
//!   expr   := term (('+' | '-') term)*
//!   term   := unary (('*' | '/') unary)*
//!   unary  := '-' unary | power
//!   power  := atom ('^' integer)?
//!   atom   := number | ident | ident '(' expr ')' | '(' expr ')'

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, p: &[Jet]) -> Jet {
        match self {
            Expr::Num(c) => Jet::constant(*c, p.first().map_or(0, |j| j.n_partials())),
            Expr::Coord(i) => p[*i].clone(),
            Expr::Add(a, b) => &a.eval(p) + &b.eval(p),
            Expr::Sub(a, b) => &a.eval(p) - &b.eval(p),
            Expr::Mul(a, b) => &a.eval(p) * &b.eval(p),
            Expr::Div(a, b) => &a.eval(p) / &b.eval(p),
            Expr::Pow(a, k) => a.eval(p).powi(*k),
            Expr::Neg(a) => -&a.eval(p),
            Expr::Sin(a) => a.eval(p).sin(),
            Expr::Cos(a) => a.eval(p).cos(),
            Expr::Exp(a) => a.eval(p).exp(),
            Expr::Sqrt(a) => a.eval(p).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| GeomError::Config(format!("bad number literal '{text}'")))?;
                out.push(Token::Num(v));
            }
            _ if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            _ => {
                return Err(GeomError::Config(format!(
                    "unexpected character '{c}' at position {i} in expression"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.next() {
            Some(found) if found == t => Ok(()),
            other => Err(GeomError::Config(format!(
                "expected {t:?}, found {other:?} at token {}",
                self.pos
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.next();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.next();
                    acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            // exponent: integer literal (optionally negative)
            let neg = if matches!(self.peek(), Some(Token::Minus)) {
                self.next();
                true
            } else {
                false
            };
            match self.next() {
                Some(Token::Num(v)) if v.fract() == 0.0 => {
                    let k = v as i32 * if neg { -1 } else { 1 };
                    Ok(Expr::Pow(Box::new(base), k))
                }
                other => Err(GeomError::Config(format!(
                    "exponent must be an integer literal, found {other:?}"
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    self.next();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    let boxed = Box::new(arg);
                    match name.as_str() {
                        "sin" => Ok(Expr::Sin(boxed)),
                        "cos" => Ok(Expr::Cos(boxed)),
                        "exp" => Ok(Expr::Exp(boxed)),
                        "sqrt" => Ok(Expr::Sqrt(boxed)),
                        _ => Err(GeomError::Config(format!("unknown function '{name}'"))),
                    }
                } else {
                    match self.chart.index_of(&name) {
                        Some(i) => Ok(Expr::Coord(i)),
                        None => Err(GeomError::Config(format!(
                            "unknown coordinate '{name}' in chart '{}' (coordinates: {})",
                            self.chart.name,
                            self.chart.coord_names.join(", ")
                        ))),
                    }
                }
            }
            other => Err(GeomError::Config(format!(
                "unexpected token {other:?} in expression"
            ))),
        }
    }
}

/// Parse an expression against a chart's coordinate names.
pub fn parse(src: &str, chart: &Chart) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        chart,
    };
    let e = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(GeomError::Config(format!(
            "trailing tokens after expression '{src}'"
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed_point;

    fn chart() -> Chart {
        Chart::symmetric("c", &["x", "y", "t"], 2.0)
    }

    #[test]
    fn parses_and_evaluates() {
        let c = chart();
        let e = parse("x*y + sin(t)*2 - x^2/4", &c).unwrap();
        let p = seed_point(&[1.0, 2.0, 0.5]);
        let v = e.eval(&p);
        let expect = 1.0 * 2.0 + 0.5f64.sin() * 2.0 - 0.25;
        assert!((v.v - expect).abs() < 1e-14);
        // derivatives ride along: ∂x = y − x/2
        assert!((v.d[0] - (2.0 - 0.5)).abs() < 1e-14);
        assert!((v.d[2] - 0.5f64.cos() * 2.0).abs() < 1e-14);
    }

    #[test]
    fn unary_minus_and_negative_exponent() {
        let c = chart();
        let e = parse("-x^2 + y^-1", &c).unwrap();
        let p = seed_point(&[3.0, 4.0, 0.0]);
        let v = e.eval(&p);
        assert!((v.v - (-9.0 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let c = chart();
        assert!(parse("x +", &c).is_err());
        assert!(parse("foo(x)", &c).is_err());
        assert!(parse("z", &c).is_err());
        assert!(parse("x ^ y", &c).is_err());
        assert!(parse("x 2", &c).is_err());
    }

    #[test]
    fn exp_and_sqrt() {
        let c = chart();
        let e = parse("exp(x) * sqrt(y)", &c).unwrap();
        let p = seed_point(&[0.3, 4.0, 0.0]);
        let v = e.eval(&p);
        assert!((v.v - 0.3f64.exp() * 2.0).abs() < 1e-14);
        assert!((v.d[1] - 0.3f64.exp() * 0.25).abs() < 1e-14);
    }
}
