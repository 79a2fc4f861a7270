//! Symbolic corpus functions such as `w*(w-2)`, `exp(w/3)`, `w^-2` or
//! `zbi:z0*(w-2)`.
//!
//! `zbi` is the inner part of `w − z0` (a single zero at `z0`); bare `zbi`
//! puts the zero at the base point, `zbi:name` looks the point up in a table
//! and `zbi:(re,im)` gives it literally.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::{zero_based_inner, AnalyticRep, Holomorphic};
use crate::error::{Error, Result};
use crate::laplace::HarmonicContext;

/// Named points available to `zbi:name`.
pub type PointTable = BTreeMap<String, C64>;

#[derive(Debug, Clone, PartialEq)]
pub enum PointRef {
    Base,
    Named(String),
    Literal(C64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(C64),
    W,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Zbi(PointRef),
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Config(format!("cannot parse '{}' at position {}: {msg}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
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
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
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
        if self.eat('^') {
            let neg = self.eat('-');
            let n = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err("expected an integer exponent"))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut prev = ' ';
        while let Some(&c) = self.chars.get(self.pos) {
            let ok = c.is_ascii_digit()
                || c == '.'
                || c == 'e'
                || c == 'E'
                || ((c == '-' || c == '+') && (prev == 'e' || prev == 'E'));
            if !ok {
                break;
            }
            prev = c;
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err("expected a number"))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn signed(&mut self) -> Result<f64> {
        let neg = self.eat('-');
        let x = self.number()?;
        Ok(if neg { -x } else { x })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Expr::Num(C64::new(self.number()?, 0.0))),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "w" => Ok(Expr::W),
                    "i" => Ok(Expr::Num(C64::new(0.0, 1.0))),
                    "exp" => {
                        self.expect('(')?;
                        let e = self.expr()?;
                        self.expect(')')?;
                        Ok(Expr::Exp(Box::new(e)))
                    }
                    "zbi" => {
                        if !self.eat(':') {
                            return Ok(Expr::Zbi(PointRef::Base));
                        }
                        if self.eat('(') {
                            let re = self.signed()?;
                            self.expect(',')?;
                            let im = self.signed()?;
                            self.expect(')')?;
                            Ok(Expr::Zbi(PointRef::Literal(C64::new(re, im))))
                        } else {
                            let n = self.ident();
                            if n.is_empty() {
                                return Err(self.err("expected a point name after 'zbi:'"));
                            }
                            Ok(Expr::Zbi(PointRef::Named(n)))
                        }
                    }
                    _ => Err(self.err(&format!("unknown name '{name}'"))),
                }
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { src, chars: src.chars().collect(), pos: 0 };
        let e = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    /// Replaces every `zbi` atom by its computed inner function.
    pub fn resolve(&self, ctx: &HarmonicContext, points: &PointTable) -> Result<CorpusFunction> {
        let mut cache: Vec<(C64, Arc<AnalyticRep>)> = Vec::new();
        let node = self.resolve_node(ctx, points, &mut cache)?;
        Ok(CorpusFunction { node })
    }

    fn resolve_node(
        &self,
        ctx: &HarmonicContext,
        points: &PointTable,
        cache: &mut Vec<(C64, Arc<AnalyticRep>)>,
    ) -> Result<Node> {
        let mut go = |e: &Expr| e.resolve_node(ctx, points, cache);
        Ok(match self {
            Expr::Num(c) => Node::Num(*c),
            Expr::W => Node::W,
            Expr::Neg(a) => Node::Neg(Box::new(go(a)?)),
            Expr::Add(a, b) => Node::Add(Box::new(go(a)?), Box::new(go(b)?)),
            Expr::Sub(a, b) => Node::Sub(Box::new(go(a)?), Box::new(go(b)?)),
            Expr::Mul(a, b) => Node::Mul(Box::new(go(a)?), Box::new(go(b)?)),
            Expr::Div(a, b) => Node::Div(Box::new(go(a)?), Box::new(go(b)?)),
            Expr::Pow(a, n) => Node::Pow(Box::new(go(a)?), *n),
            Expr::Exp(a) => Node::Exp(Box::new(go(a)?)),
            Expr::Zbi(p) => {
                let z = match p {
                    PointRef::Base => ctx.domain().base_point(),
                    PointRef::Literal(z) => *z,
                    PointRef::Named(n) => {
                        *points.get(n).ok_or_else(|| Error::Config(format!("unknown point '{n}' in zbi:{n}")))?
                    }
                };
                if let Some((_, rep)) = cache.iter().find(|(y, _)| *y == z) {
                    return Ok(Node::Inner(rep.clone()));
                }
                let rep = Arc::new(zero_based_inner(&[(z, 1)], ctx)?.inner);
                cache.push((z, rep.clone()));
                Node::Inner(rep)
            }
        })
    }

    /// Zeros introduced by `zbi` atoms.
    pub fn zbi_points(&self, base: C64, points: &PointTable) -> Result<Vec<C64>> {
        let mut out = Vec::new();
        self.collect_zbi(base, points, &mut out)?;
        Ok(out)
    }

    fn collect_zbi(&self, base: C64, points: &PointTable, out: &mut Vec<C64>) -> Result<()> {
        match self {
            Expr::Num(_) | Expr::W => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) => a.collect_zbi(base, points, out)?,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_zbi(base, points, out)?;
                b.collect_zbi(base, points, out)?;
            }
            Expr::Zbi(p) => out.push(match p {
                PointRef::Base => base,
                PointRef::Literal(z) => *z,
                PointRef::Named(n) => {
                    *points.get(n).ok_or_else(|| Error::Config(format!("unknown point '{n}' in zbi:{n}")))?
                }
            }),
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Node {
    Num(C64),
    W,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Exp(Box<Node>),
    Inner(Arc<AnalyticRep>),
}

impl Node {
    fn eval(&self, w: C64) -> C64 {
        match self {
            Node::Num(c) => *c,
            Node::W => w,
            Node::Neg(a) => -a.eval(w),
            Node::Add(a, b) => a.eval(w) + b.eval(w),
            Node::Sub(a, b) => a.eval(w) - b.eval(w),
            Node::Mul(a, b) => a.eval(w) * b.eval(w),
            Node::Div(a, b) => a.eval(w) / b.eval(w),
            Node::Pow(a, n) => a.eval(w).powi(*n),
            Node::Exp(a) => a.eval(w).exp(),
            Node::Inner(rep) => rep.eval(w),
        }
    }
}

/// A parsed and resolved corpus function.
#[derive(Debug, Clone)]
pub struct CorpusFunction {
    node: Node,
}

impl Holomorphic for CorpusFunction {
    fn eval(&self, w: C64) -> C64 {
        self.node.eval(w)
    }
}
