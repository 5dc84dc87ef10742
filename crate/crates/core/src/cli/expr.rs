//! Closed-form expressions in one variable for the free functions `α`, `β`.
//!
//! Grammar: numbers, the variable `y` (or `t`), the constants `i` and `pi`,
//! `+ - * / ^`, parentheses and `sin cos sinh cosh exp`.

use std::fmt;

use crate::error::{Error, Result};
use crate::mat2::C64;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(C64),
    Var,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    fn by_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    fn apply(self, z: C64) -> C64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Exp => z.exp(),
        }
    }
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Expr {
    pub fn eval(&self, v: f64) -> C64 {
        eval(&self.root, v)
    }

    /// Real part; callers needing a real function check `is_real` first.
    pub fn eval_real(&self, v: f64) -> f64 {
        self.eval(v).re
    }

    /// No `i` appears anywhere in the expression.
    pub fn is_real(&self) -> bool {
        fn real(n: &Node) -> bool {
            match n {
                Node::Num(z) => z.im == 0.0,
                Node::Var => true,
                Node::Neg(a) | Node::Call(_, a) => real(a),
                Node::Bin(_, a, b) => real(a) && real(b),
            }
        }
        real(&self.root)
    }
}

fn eval(n: &Node, v: f64) -> C64 {
    match n {
        Node::Num(z) => *z,
        Node::Var => C64::new(v, 0.0),
        Node::Neg(a) => -eval(a, v),
        Node::Call(f, a) => f.apply(eval(a, v)),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, v), eval(b, v));
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                '/' => a / b,
                _ => {
                    // integer powers stay exact for real bases
                    if b.im == 0.0 && b.re.fract() == 0.0 && b.re.abs() <= 64.0 {
                        a.powi(b.re as i32)
                    } else {
                        a.powc(b)
                    }
                }
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.chars().count(), |_| self.pos)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            // right associative, and -x^2 = -(x^2) via unary above
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some(c) = self.peek() else {
            return self.err("unexpected end of input");
        };
        if c == '(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
            return match word.as_str() {
                "y" | "t" => Ok(Node::Var),
                "i" => Ok(Node::Num(C64::new(0.0, 1.0))),
                "pi" => Ok(Node::Num(C64::new(std::f64::consts::PI, 0.0))),
                w => match Func::by_name(w) {
                    Some(f) => {
                        if self.peek() != Some('(') {
                            return self.err(format!("expected '(' after {w}"));
                        }
                        Ok(Node::Call(f, Box::new(self.atom()?)))
                    }
                    None => {
                        self.pos = start;
                        self.err(format!("unknown name '{w}'"))
                    }
                },
            };
        }
        self.err(format!("unexpected '{c}'"))
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let mut end = self.pos;
        let cs = &self.chars;
        while end < cs.len() && (cs[end].1.is_ascii_digit() || cs[end].1 == '.') {
            end += 1;
        }
        if end < cs.len() && matches!(cs[end].1, 'e' | 'E') {
            let mut k = end + 1;
            if k < cs.len() && matches!(cs[k].1, '+' | '-') {
                k += 1;
            }
            if k < cs.len() && cs[k].1.is_ascii_digit() {
                while k < cs.len() && cs[k].1.is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text: String = cs[start..end].iter().map(|c| c.1).collect();
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Node::Num(C64::new(v, 0.0)))
            }
            Err(_) => self.err(format!("malformed number '{text}'")),
        }
    }
}

/// Parse `src`; errors carry the 0-based character offset.
pub fn parse_expression(src: &str) -> Result<Expr> {
    let mut p = Parser {
        chars: src.chars().enumerate().collect(),
        pos: 0,
        src,
    };
    let root = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(Expr {
        src: src.to_string(),
        root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, v: f64) -> C64 {
        parse_expression(src).unwrap().eval(v)
    }

    #[test]
    fn constants_and_host_math() {
        assert_eq!(at("1", 3.0), C64::new(1.0, 0.0));
        for y in [-1.3, 0.0, 0.7, 2.5] {
            assert_eq!(at("0.5*cos(y)", y).re, 0.5 * y.cos());
            assert_eq!(at("exp(-t^2)/2", y).re, (-(y * y)).exp() / 2.0);
            assert_eq!(at("sinh(y) - cosh(2*y)", y).re, y.sinh() - (2.0 * y).cosh());
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("2^3^2", 0.0).re, 512.0);
        assert_eq!(at("-2^2", 0.0).re, -4.0);
        assert_eq!(at("1-2-3", 0.0).re, -4.0);
        assert_eq!(at("8/2/2", 0.0).re, 2.0);
        assert_eq!(at("2*(y+1)", 1.0).re, 4.0);
        assert_eq!(at("1.5e-1 + 2E1", 0.0).re, 20.15);
    }

    #[test]
    fn complex_values() {
        let e = parse_expression("0.4 + 0.1*i*y").unwrap();
        assert!(!e.is_real());
        assert_eq!(e.eval(2.0), C64::new(0.4, 0.2));
        assert!(parse_expression("sin(pi*y)").unwrap().is_real());
        let z = at("exp(i*pi)", 0.0);
        assert!((z - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn syntax_errors_report_positions() {
        let pos = |s: &str| match parse_expression(s) {
            Err(Error::Syntax { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("1+"), 2);
        assert_eq!(pos("(1"), 2);
        assert_eq!(pos("2*x"), 2);
        assert_eq!(pos("1 2"), 2);
        assert_eq!(pos("sin y"), 4);
        assert_eq!(pos(""), 0);
    }

    #[test]
    fn display_keeps_the_source() {
        assert_eq!(parse_expression(" y^2 ").unwrap().to_string(), " y^2 ");
    }
}
