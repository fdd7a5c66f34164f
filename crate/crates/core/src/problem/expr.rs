//! Piecewise polynomial / power expressions for config-defined problems.
//!
//! ```text
//! expr    = compare ;
//! compare = sum [ ( "<" | "<=" | ">" | ">=" ) sum ] ;      (* 1 if true, else 0 *)
//! sum     = product { ( "+" | "-" ) product } ;
//! product = unary { ( "*" | "/" ) unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;                            (* right associative *)
//! atom    = number | name | name "(" expr { "," expr } ")" | "(" expr ")" ;
//! number  = digit { digit } [ "." { digit } ] [ ( "e" | "E" ) [ "+" | "-" ] digit { digit } ] ;
//! ```
//!
//! Functions: `sqrt(x)`, `abs(x)`, `min(a, b)`, `max(a, b)`, `pow(a, b)` and
//! `if(c, a, b)` (`a` when `c != 0`). Names are the caller's variables plus
//! named constants bound at parse time.

use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sqrt,
    Abs,
    Min,
    Max,
    Pow,
    If,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "pow" => (Func::Pow, 2),
            "if" => (Func::If, 3),
            _ => return None,
        })
    }
}

/// A parsed expression over a fixed list of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
    arity: usize,
}

impl Expr {
    /// Parses `src` with variables `vars` (in evaluation order) and named constants.
    pub fn parse(src: &str, vars: &[&str], constants: &[(&str, f64)]) -> Result<Self> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            vars,
            constants,
        };
        let root = p.compare()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Self {
            root,
            source: src.to_string(),
            arity: vars.len(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.arity);
        eval(&self.root, args)
    }

    /// Shared single-variable evaluator.
    pub fn into_scalar(self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        assert_eq!(self.arity, 1, "expression `{}` is not univariate", self.source);
        Arc::new(move |x| eval(&self.root, &[x]))
    }

    /// Shared evaluator of three variables.
    pub fn into_ternary(self) -> Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync> {
        assert_eq!(self.arity, 3, "expression `{}` does not take three variables", self.source);
        Arc::new(move |a, b, c| eval(&self.root, &[a, b, c]))
    }
}

fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn eval(node: &Node, args: &[f64]) -> f64 {
    match node {
        Node::Num(x) => *x,
        Node::Var(i) => args[*i],
        Node::Neg(a) => -eval(a, args),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval(a, args), eval(b, args));
            match op {
                Op::Add => x + y,
                Op::Sub => x - y,
                Op::Mul => x * y,
                Op::Div => x / y,
                Op::Pow => x.powf(y),
                Op::Lt => truth(x < y),
                Op::Le => truth(x <= y),
                Op::Gt => truth(x > y),
                Op::Ge => truth(x >= y),
            }
        }
        Node::Call(f, a) => match f {
            Func::Sqrt => eval(&a[0], args).sqrt(),
            Func::Abs => eval(&a[0], args).abs(),
            Func::Min => eval(&a[0], args).min(eval(&a[1], args)),
            Func::Max => eval(&a[0], args).max(eval(&a[1], args)),
            Func::Pow => eval(&a[0], args).powf(eval(&a[1], args)),
            Func::If => {
                if eval(&a[0], args) != 0.0 {
                    eval(&a[1], args)
                } else {
                    eval(&a[2], args)
                }
            }
        },
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
    constants: &'a [(&'a str, f64)],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

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

    fn compare(&mut self) -> Result<Node> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(b'<') => Op::Lt,
            Some(b'>') => Op::Gt,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let op = if self.src.get(self.pos) == Some(&b'=') {
            self.pos += 1;
            if op == Op::Lt {
                Op::Le
            } else {
                Op::Ge
            }
        } else {
            op
        };
        let rhs = self.sum()?;
        Ok(Node::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.compare()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::Parse {
                pos: start,
                msg: format!("invalid number `{text}`"),
            })
    }

    fn name(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.eat(b'(') {
            let (func, arity) = Func::lookup(name).ok_or_else(|| Error::Parse {
                pos: start,
                msg: format!("unknown function `{name}`"),
            })?;
            let mut args = vec![self.compare()?];
            while self.eat(b',') {
                args.push(self.compare()?);
            }
            if !self.eat(b')') {
                return Err(self.err("expected `)` after arguments"));
            }
            if args.len() != arity {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                });
            }
            return Ok(Node::Call(func, args));
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        if let Some((_, x)) = self.constants.iter().find(|(c, _)| *c == name) {
            return Ok(Node::Num(*x));
        }
        Err(Error::Parse {
            pos: start,
            msg: format!("unknown name `{name}`"),
        })
    }
}
