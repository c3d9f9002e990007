//! A small expression grammar for elements and scalars:
//! `x1..xn, y1..yn, z0..zn, c, q`, unit names, integers, `e` (the primitive
//! root), with `+ - * / ^` and parentheses. Division is by scalars only.

use std::sync::Arc;

use crate::cyclotomic::CycElem;
use crate::error::{Error, Result};
use crate::polyring::{MPoly, VarTable};
use crate::weyl::{WeylAlgebra, WeylElem};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i64, usize),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| Error::Parse {
                pos: start,
                msg: format!("integer `{text}` out of range"),
            })?;
            out.push((Tok::Int(v), start));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.i += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Sym('^')) {
            let pos = self.pos();
            self.i += 1;
            let neg = self.eat('-');
            let Some(Tok::Int(k)) = self.peek().cloned() else {
                return self.err("expected an integer exponent");
            };
            self.i += 1;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }, pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.i += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(s)) => {
                self.i += 1;
                Ok(Expr::Var(s, pos))
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            _ => self.err("expected a term"),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let toks = lex(s)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: s.chars().count(),
    };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

fn parse_err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

fn indexed(name: &str, prefix: char) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// Evaluates `s` as a scalar over the variables of `ring` and `Q(e_order)`.
pub fn parse_scalar(s: &str, ring: &Arc<VarTable>, order: u32) -> Result<MPoly> {
    eval_scalar(&parse(s)?, ring, order)
}

fn eval_scalar(e: &Expr, ring: &Arc<VarTable>, order: u32) -> Result<MPoly> {
    let rec = |x: &Expr| eval_scalar(x, ring, order);
    Ok(match e {
        Expr::Int(v) => MPoly::from_int(ring, order, *v),
        Expr::Var(name, pos) => {
            if name == "e" {
                MPoly::constant(ring, CycElem::root(order))
            } else if ring.index(name).is_some() {
                MPoly::var(ring, order, name)?
            } else {
                return parse_err(*pos, format!("unknown scalar `{name}`"));
            }
        }
        Expr::Neg(a) => -rec(a)?,
        Expr::Add(a, b) => rec(a)?.try_add(&rec(b)?)?,
        Expr::Sub(a, b) => rec(a)?.try_sub(&rec(b)?)?,
        Expr::Mul(a, b) => rec(a)?.try_mul(&rec(b)?)?,
        Expr::Div(a, b, pos) => {
            let d = rec(b)?;
            let Some(inv) = d.unit_inverse() else {
                return parse_err(*pos, format!("cannot divide by `{d}`"));
            };
            rec(a)?.try_mul(&inv)?
        }
        Expr::Pow(a, k, pos) => scalar_pow(&rec(a)?, *k, *pos)?,
    })
}

fn scalar_pow(base: &MPoly, k: i64, pos: usize) -> Result<MPoly> {
    if k >= 0 {
        return Ok(base.pow(k as u32));
    }
    match base.unit_inverse() {
        Some(inv) => Ok(inv.pow((-k) as u32)),
        None => parse_err(pos, format!("`{base}` is not invertible")),
    }
}

/// Evaluates `s` in `alg`.
pub fn parse_element(s: &str, alg: &Arc<WeylAlgebra>) -> Result<WeylElem> {
    eval_element(&parse(s)?, alg)
}

fn eval_element(e: &Expr, alg: &Arc<WeylAlgebra>) -> Result<WeylElem> {
    let rec = |x: &Expr| eval_element(x, alg);
    let n = alg.n();
    Ok(match e {
        Expr::Int(v) => alg.from_int(*v),
        Expr::Var(name, pos) => {
            let pos = *pos;
            let bad = || parse_err(pos, format!("unknown symbol `{name}`"));
            if let Some(j) = indexed(name, 'x') {
                if j == 0 || j > n {
                    return bad();
                }
                alg.x(j - 1)
            } else if let Some(j) = indexed(name, 'y') {
                if j == 0 || j > n {
                    return bad();
                }
                alg.y(j - 1)
            } else if let Some(j) = indexed(name, 'z') {
                if j > n {
                    return bad();
                }
                alg.z(j)?
            } else if name == "e" {
                alg.scalar(alg.root_scalar(1))
            } else if alg.coeff_ring().index(name).is_some() {
                alg.scalar(alg.coeff_var(name)?)
            } else {
                return bad();
            }
        }
        Expr::Neg(a) => -rec(a)?,
        Expr::Add(a, b) => rec(a)?.try_add(&rec(b)?)?,
        Expr::Sub(a, b) => rec(a)?.try_sub(&rec(b)?)?,
        Expr::Mul(a, b) => rec(a)?.try_mul(&rec(b)?)?,
        Expr::Div(a, b, pos) => {
            let d = rec(b)?;
            let Some(inv) = d.as_scalar().and_then(|s| s.unit_inverse()) else {
                return parse_err(*pos, format!("cannot divide by `{d}`"));
            };
            rec(a)?.scale(&inv)
        }
        Expr::Pow(a, k, pos) => {
            let base = rec(a)?;
            if *k >= 0 {
                base.pow(*k as u32)
            } else {
                match base.as_scalar() {
                    Some(s) => alg.scalar(scalar_pow(&s, *k, *pos)?),
                    None => return parse_err(*pos, "negative powers need a scalar base"),
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Mode, WeylParams};

    #[test]
    fn elements() {
        let p = WeylParams::new(&[(1, 2), (1, 4)], &[]).unwrap();
        let a = WeylAlgebra::new(&p).unwrap();
        assert_eq!(parse_element("y1^2", &a).unwrap(), a.y(0).pow(2));
        assert_eq!(parse_element("x1*y1 - e^2*y1*x1", &a).unwrap(), a.one());
        assert_eq!(parse_element("z2", &a).unwrap(), a.z(2).unwrap());
        assert_eq!(parse_element("(x2 + 1)/2", &a).unwrap(), (a.x(1) + a.one()).scale(&a.coeff_const(CycElem::from_rational(4, num_rational::BigRational::new(1.into(), 2.into()))).unwrap()));
        let u = a.y(0) * a.x(1) - a.from_int(3);
        assert_eq!(parse_element(&u.to_string(), &a).unwrap(), u);
        assert!(matches!(parse_element("x3", &a), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_element("x1 +", &a), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_element("x1 / x2", &a), Err(Error::Parse { .. })));
    }

    #[test]
    fn scalars() {
        let ring = VarTable::new(&[("u", true)]).unwrap();
        let s = parse_scalar("-e^3*u^-1", &ring, 4).unwrap();
        let want = MPoly::var(&ring, 4, "u").unwrap().unit_inverse().unwrap().scale(&CycElem::root(4));
        assert_eq!(s, want);
        assert_eq!(parse_scalar(&s.to_string(), &ring, 4).unwrap(), s);
        assert!(parse_scalar("v", &ring, 4).is_err());
        let c = WeylParams::new(&[(1, 2)], &[])
            .unwrap()
            .with_mode(Mode {
                c_formal: true,
                ..Mode::default()
            })
            .unwrap();
        let a = WeylAlgebra::new(&c).unwrap();
        assert_eq!(parse_element("x1*y1 + y1*x1", &a).unwrap(), a.scalar(a.coeff_var("c").unwrap()));
    }
}
