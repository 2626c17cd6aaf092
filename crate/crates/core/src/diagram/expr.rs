//! Weight expressions: a tiny grammar of rationals, `cos`, `sin`, `sqrt` and
//! the four arithmetic operations.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algfield::{FieldElement, FieldError, FieldTower};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree for a dashed-edge weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightExpr {
    Int(BigInt),
    /// `cos(π·a/b)`
    Cos(i64, i64),
    /// `sin(π·a/b)`
    Sin(i64, i64),
    Sqrt(Box<WeightExpr>),
    Neg(Box<WeightExpr>),
    Bin(BinOp, Box<WeightExpr>, Box<WeightExpr>),
}

/// Syntax error inside an expression; `offset` is a byte offset into the expression text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub offset: usize,
    pub msg: String,
}

impl WeightExpr {
    pub fn int(v: i64) -> WeightExpr {
        WeightExpr::Int(BigInt::from(v))
    }

    pub fn bin(op: BinOp, a: WeightExpr, b: WeightExpr) -> WeightExpr {
        WeightExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn sqrt(a: WeightExpr) -> WeightExpr {
        WeightExpr::Sqrt(Box::new(a))
    }

    pub fn parse(text: &str) -> Result<WeightExpr, ExprError> {
        let mut p = ExprParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Visit every `(b)` denominator that the base field must accommodate:
    /// `cos(π a/b)` needs `2b | N`, `sin(π a/b)` needs `4b | N`.
    pub(crate) fn required_divisors(&self, out: &mut Vec<u64>) {
        match self {
            WeightExpr::Int(_) => {}
            WeightExpr::Cos(_, b) => out.push(b.unsigned_abs()),
            WeightExpr::Sin(_, b) => out.push(2 * b.unsigned_abs()),
            WeightExpr::Sqrt(a) | WeightExpr::Neg(a) => a.required_divisors(out),
            WeightExpr::Bin(_, a, b) => {
                a.required_divisors(out);
                b.required_divisors(out);
            }
        }
    }

    /// Evaluate in `tower`, adjoining square roots as they are met.
    pub fn eval(&self, tower: &mut Arc<FieldTower>) -> Result<FieldElement, FieldError> {
        Ok(match self {
            WeightExpr::Int(v) => {
                FieldElement::from_rational(tower, &BigRational::from_integer(v.clone()))
            }
            WeightExpr::Cos(a, b) => FieldElement::cos_pi(tower, *a, *b),
            // sin(πa/b) = cos(π(b − 2a)/(2b))
            WeightExpr::Sin(a, b) => FieldElement::cos_pi(tower, b - 2 * a, 2 * b),
            WeightExpr::Sqrt(a) => {
                let r = a.eval(tower)?.lift_to(tower);
                if r.is_zero() {
                    return Ok(r);
                }
                let (t, root) = tower.adjoin_sqrt(&r)?;
                *tower = t;
                root
            }
            WeightExpr::Neg(a) => a.eval(tower)?.neg(),
            WeightExpr::Bin(op, a, b) => {
                let x = a.eval(tower)?;
                let y = b.eval(tower)?;
                let (x, y) = (x.lift_to(tower), y.lift_to(tower));
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => x.div(&y)?,
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            WeightExpr::Bin(op, _, _) => op.precedence(),
            WeightExpr::Neg(_) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightExpr::Int(v) => write!(f, "{v}"),
            WeightExpr::Cos(a, b) => write!(f, "cos(pi*{a}/{b})"),
            WeightExpr::Sin(a, b) => write!(f, "sin(pi*{a}/{b})"),
            WeightExpr::Sqrt(a) => write!(f, "sqrt({a})"),
            WeightExpr::Neg(a) => {
                if a.precedence() < 3 {
                    write!(f, "-({a})")
                } else {
                    write!(f, "-{a}")
                }
            }
            WeightExpr::Bin(op, a, b) => {
                let p = op.precedence();
                if a.precedence() < p {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, "{}", op.symbol())?;
                if b.precedence() <= p {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError {
            offset: self.pos,
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

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<WeightExpr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = WeightExpr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<WeightExpr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = WeightExpr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<WeightExpr, ExprError> {
        if self.eat(b'-') {
            return Ok(WeightExpr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_integer(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        let v = self.integer()?;
        i64::try_from(v).map_err(|_| ExprError {
            offset: start,
            msg: "integer too large".into(),
        })
    }

    fn ident(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    /// `pi*a/b` or `pi/b`
    fn pi_ratio(&mut self) -> Result<(i64, i64), ExprError> {
        let at = self.pos;
        if self.ident() != Some("pi") {
            self.pos = at;
            return Err(self.error("expected 'pi'"));
        }
        let a = if self.eat(b'*') {
            self.small_integer()?
        } else {
            1
        };
        self.expect(b'/')?;
        let b_at = self.pos;
        let b = self.small_integer()?;
        if b == 0 {
            return Err(ExprError {
                offset: b_at,
                msg: "zero denominator".into(),
            });
        }
        Ok((a, b))
    }

    fn atom(&mut self) -> Result<WeightExpr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(WeightExpr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                let name = self.ident().unwrap().to_string();
                self.expect(b'(')?;
                let e = match name.as_str() {
                    "cos" => {
                        let (a, b) = self.pi_ratio()?;
                        WeightExpr::Cos(a, b)
                    }
                    "sin" => {
                        let (a, b) = self.pi_ratio()?;
                        WeightExpr::Sin(a, b)
                    }
                    "sqrt" => WeightExpr::sqrt(self.expr()?),
                    _ => {
                        return Err(ExprError {
                            offset: at,
                            msg: format!("unknown function '{name}'"),
                        })
                    }
                };
                self.expect(b')')?;
                Ok(e)
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// Least common multiple of the base-field requirements of a set of expressions
/// and angle labels, doubled: `cos(π/m)` lies in `Q(2cos(2π/N))` once `2m | N`.
pub(crate) fn conductor_for(angles: &[u64], exprs: &[&WeightExpr]) -> u64 {
    let mut divs = angles.to_vec();
    for e in exprs {
        e.required_divisors(&mut divs);
    }
    2 * divs
        .into_iter()
        .filter(|d| !d.is_zero())
        .fold(1u64, |l, d| l.lcm(&d))
}
