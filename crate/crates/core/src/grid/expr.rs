//! A small expression language for sampling functions on a grid.
//!
//! ```text
//! expr    := sum
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' args ')' | name '|' expr '|'
//!          | '|' expr '|' | '(' expr ')'
//! ```
//!
//! Variables: `x` (alias `x1`), `y` (alias `x2`, zero in 1D), `r` = `|x|`
//! (Euclidean norm of the point). Constants: `pi`, `e`.
//!
//! Functions: `abs`, `sign` (with `sign(0) = 1`), `log`, `exp`, `sqrt`,
//! `sin`, `cos`, `step(v)` (1 if `v >= 0`), `min(a,b)`, `max(a,b)`,
//! `clip(v,lo,hi)`, `pow(a,b)`, `ind(a,b)` (indicator of `x ∈ [a,b)`),
//! `box(a1,b1,a2,b2)` (indicator of `[a1,b1)×[a2,b2)`).
//!
//! Singularities are clipped at `h/2`: `log(v)` evaluates `log(max(v, h/2))`,
//! and `a^b` with `b < 0` raises `max(|a|, h/2)` (keeping the sign of `a`).

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Radius,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sign,
    Log,
    Exp,
    Sqrt,
    Sin,
    Cos,
    Step,
    Min,
    Max,
    Clip,
    Pow,
    Ind,
    Box,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "log" | "ln" => Func::Log,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "step" => Func::Step,
            "min" => Func::Min,
            "max" => Func::Max,
            "clip" => Func::Clip,
            "pow" => Func::Pow,
            "ind" => Func::Ind,
            "box" => Func::Box,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Abs | Func::Sign | Func::Log | Func::Exp | Func::Sqrt | Func::Sin | Func::Cos | Func::Step => 1,
            Func::Min | Func::Max | Func::Pow | Func::Ind => 2,
            Func::Clip => 3,
            Func::Box => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
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
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                offset: start,
                message: format!("bad number {text:?}"),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Name(src[start..i].to_string())));
        } else if "+-*/^()|,".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                offset: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err<V>(&self, message: impl Into<String>) -> Result<V> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected '{op}'"))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
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
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn bars(&mut self) -> Result<Expr> {
        let inner = self.sum()?;
        self.expect('|')?;
        Ok(Expr::Call(Func::Abs, vec![inner]))
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::Op('(') => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Op('|') => self.bars(),
            Token::Op(c) => {
                self.pos -= 1;
                self.err(format!("unexpected '{c}'"))
            }
            Token::Name(name) => match name.as_str() {
                "x" | "x1" => Ok(Expr::X),
                "y" | "x2" => Ok(Expr::Y),
                "r" => Ok(Expr::Radius),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                _ => {
                    let Some(func) = Func::lookup(&name) else {
                        self.pos -= 1;
                        return self.err(format!("unknown name {name:?}"));
                    };
                    let args = if self.eat('(') {
                        let mut args = vec![self.sum()?];
                        while self.eat(',') {
                            args.push(self.sum()?);
                        }
                        self.expect(')')?;
                        args
                    } else if self.eat('|') {
                        vec![self.bars()?]
                    } else {
                        return self.err(format!("expected '(' after {name}"));
                    };
                    if args.len() != func.arity() {
                        return self.err(format!(
                            "{name} takes {} argument(s), got {}",
                            func.arity(),
                            args.len()
                        ));
                    }
                    Ok(Expr::Call(func, args))
                }
            },
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            end: src.len(),
        };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }

    /// Evaluates at `p`, clipping singular arguments at `floor` (`h/2` on a grid).
    pub fn eval<T: Real>(&self, p: Point<T>, floor: T) -> T {
        let ev = |e: &Expr| e.eval(p, floor);
        match self {
            Expr::Num(v) => T::lit(*v),
            Expr::X => p[0],
            Expr::Y => p[1],
            Expr::Radius => (p[0] * p[0] + p[1] * p[1]).sqrt(),
            Expr::Neg(a) => -ev(a),
            Expr::Add(a, b) => ev(a) + ev(b),
            Expr::Sub(a, b) => ev(a) - ev(b),
            Expr::Mul(a, b) => ev(a) * ev(b),
            Expr::Div(a, b) => ev(a) / ev(b),
            Expr::Pow(a, b) => clipped_pow(ev(a), ev(b), floor),
            Expr::Call(func, args) => {
                let a = |k: usize| ev(&args[k]);
                let one = T::one();
                let zero = T::zero();
                match func {
                    Func::Abs => a(0).abs(),
                    Func::Sign => a(0).signum(),
                    Func::Log => a(0).max(floor).ln(),
                    Func::Exp => a(0).exp(),
                    Func::Sqrt => a(0).sqrt(),
                    Func::Sin => a(0).sin(),
                    Func::Cos => a(0).cos(),
                    Func::Step => {
                        if a(0) >= zero {
                            one
                        } else {
                            zero
                        }
                    }
                    Func::Min => a(0).min(a(1)),
                    Func::Max => a(0).max(a(1)),
                    Func::Clip => a(0).max(a(1)).min(a(2)),
                    Func::Pow => clipped_pow(a(0), a(1), floor),
                    Func::Ind => {
                        if p[0] >= a(0) && p[0] < a(1) {
                            one
                        } else {
                            zero
                        }
                    }
                    Func::Box => {
                        if p[0] >= a(0) && p[0] < a(1) && p[1] >= a(2) && p[1] < a(3) {
                            one
                        } else {
                            zero
                        }
                    }
                }
            }
        }
    }
}

fn clipped_pow<T: Real>(base: T, exponent: T, floor: T) -> T {
    if exponent < T::zero() && base.abs() < floor {
        let b = if base < T::zero() { -floor } else { floor };
        b.powf(exponent)
    } else {
        base.powf(exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: f64) -> f64 {
        Expr::parse(src).unwrap().eval([x, 0.0], 0.25)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("1e-1 * 10", 0.0), 1.0);
        assert_eq!(ev("x - 1 - 1", 5.0), 3.0);
    }

    #[test]
    fn absolute_value_bars() {
        assert_eq!(ev("|x|", -3.0), 3.0);
        assert_eq!(ev("|x|^0.5", -4.0), 2.0);
        assert_eq!(ev("||x|-1|", -0.5), 0.5);
        assert_eq!(ev("log|x|", std::f64::consts::E), 1.0);
    }

    #[test]
    fn clipping_of_singularities() {
        // floor = 0.25 in these tests
        assert_eq!(ev("log(abs(x))", 0.0), 0.25f64.ln());
        assert_eq!(ev("|x|^-1", 0.0), 4.0);
        assert_eq!(ev("|x|^-1", 0.5), 2.0);
        assert_eq!(ev("|x|^0.5", 0.0), 0.0);
    }

    #[test]
    fn functions() {
        assert_eq!(ev("sign(x)", 0.0), 1.0);
        assert_eq!(ev("sign(x)", -2.0), -1.0);
        assert_eq!(ev("ind(0, 1)", 0.0), 1.0);
        assert_eq!(ev("ind(0, 1)", 1.0), 0.0);
        assert_eq!(ev("clip(x, -1, 1)", 3.0), 1.0);
        assert_eq!(ev("max(x, 2) + min(x, 2)", 1.0), 3.0);
        assert_eq!(ev("step(x - 1)", 1.0), 1.0);
        let b = Expr::parse("box(0,1,0,1)").unwrap();
        assert_eq!(b.eval([0.5f64, 0.5], 0.1), 1.0);
        assert_eq!(b.eval([0.5f64, 1.5], 0.1), 0.0);
        assert_eq!(Expr::parse("r").unwrap().eval([3.0f64, 4.0], 0.1), 5.0);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        for (src, off) in [("1 +", 3), ("foo(x)", 0), ("abs x", 4), ("(1", 2), ("1 2", 2), ("2 $ 3", 2), ("min(1)", 6)] {
            match Expr::parse(src) {
                Err(Error::Parse { offset, .. }) => assert_eq!(offset, off, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }
}
