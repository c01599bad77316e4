use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

use super::ast::{Expr, Func};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let text = &src[start..i];
            let bad = || Error::Syntax { pos: start, msg: format!("malformed number `{text}`") };
            let (ip, fp) = text.split_once('.').unwrap_or((text, ""));
            if fp.contains('.') || (ip.is_empty() && fp.is_empty()) {
                return Err(bad());
            }
            let digits = format!("{ip}{fp}");
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let d = num_traits::pow(BigInt::from(10), fp.len());
            out.push((start, Tok::Num(Rational::new(n, d))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, op: char) -> bool {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.syntax(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat('-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::mul(lhs, self.factor()?);
            } else if self.eat('/') {
                let rhs = self.factor()?;
                lhs = match (lhs, rhs) {
                    (Expr::Const(a), Expr::Const(b)) if !b.is_zero() => Expr::Const(a / b),
                    (a, b) => Expr::div(a, b),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(match self.factor()? {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        if self.eat('+') {
            return self.factor();
        }
        let base = self.base()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let pos = self.pos();
            match self.bump() {
                Tok::Num(n) if n.is_integer() => {
                    let k: i32 =
                        n.numer().try_into().map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?;
                    return Ok(Expr::pow(base, if neg { -k } else { k }));
                }
                _ => return Err(Error::Syntax { pos, msg: "expected integer exponent".into() }),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(Expr::Const(n)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if !self.eat('(') {
                        return Err(Error::Arity { pos, name });
                    }
                    if *self.peek() == Tok::Op(')') {
                        return Err(Error::Arity { pos, name });
                    }
                    let arg = self.expr()?;
                    if *self.peek() == Tok::Op(',') {
                        return Err(Error::Arity { pos, name });
                    }
                    self.expect(')')?;
                    return Ok(Expr::call(func, arg));
                }
                match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(i) if i >= 1 && i <= self.nvars && !name[1..].starts_with('0') => Ok(Expr::Var(i - 1)),
                    _ => Err(Error::UnknownIdentifier { pos, name }),
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Op(c) => Err(Error::Syntax { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

/// Parses the source into an expression tree over `x1..x{nvars}`.
pub fn parse_expr(src: &str, nvars: usize) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0, nvars };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e)
}
