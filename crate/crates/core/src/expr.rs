//! Restricted arithmetic expressions over the chart coordinates `t, x, y, z`.
//!
//! Grammar: numbers, the four variables, `+ - * /`, unary minus,
//! parentheses, `a ^ b` and `pow(a, b)`.

use std::fmt;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character '{0}' at {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token at {0}")]
    UnexpectedToken(usize),
    #[error("unknown identifier '{0}'")]
    UnknownIdent(String),
    #[error("bad number '{0}'")]
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Chart coordinate index: 0 = t, 1 = x, 2 = y, 3 = z.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.tokens.get(p.pos) {
            None => Ok(e),
            Some((_, at)) => Err(ExprError::UnexpectedToken(*at)),
        }
    }

    pub fn eval<T: Real>(&self, p: &[T; 4]) -> T {
        match self {
            Self::Num(v) => T::lit(*v),
            Self::Var(i) => p[*i],
            Self::Neg(a) => -a.eval(p),
            Self::Add(a, b) => a.eval(p) + b.eval(p),
            Self::Sub(a, b) => a.eval(p) - b.eval(p),
            Self::Mul(a, b) => a.eval(p) * b.eval(p),
            Self::Div(a, b) => a.eval(p) / b.eval(p),
            Self::Pow(a, b) => {
                let base = a.eval(p);
                match b.as_ref() {
                    Self::Num(k) if k.fract() == 0.0 && k.abs() <= 64.0 => base.powi(*k as i32),
                    _ => base.powf(b.eval(p)),
                }
            }
        }
    }

    /// Whether the expression reads coordinate `i`.
    pub fn uses(&self, i: usize) -> bool {
        match self {
            Self::Num(_) => false,
            Self::Var(j) => *j == i,
            Self::Neg(a) => a.uses(i),
            Self::Add(a, b) | Self::Sub(a, b) | Self::Mul(a, b) | Self::Div(a, b) | Self::Pow(a, b) => {
                a.uses(i) || b.uses(i)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Num(v) => write!(f, "{v}"),
            Self::Var(i) => write!(f, "{}", ["t", "x", "y", "z"][*i]),
            Self::Neg(a) => write!(f, "(-{a})"),
            Self::Add(a, b) => write!(f, "({a} + {b})"),
            Self::Sub(a, b) => write!(f, "({a} - {b})"),
            Self::Mul(a, b) => write!(f, "({a} * {b})"),
            Self::Div(a, b) => write!(f, "({a} / {b})"),
            Self::Pow(a, b) => write!(f, "pow({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ExprError::BadNumber(text.clone()))?;
            out.push((Tok::Num(v), start));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^(),".contains(ch) {
            out.push((Tok::Op(ch), i));
            i += 1;
        } else {
            return Err(ExprError::UnexpectedChar(ch, i));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Tok::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ExprError> {
        match self.tokens.get(self.pos) {
            Some((Tok::Op(c), _)) if *c == op => {
                self.pos += 1;
                Ok(())
            }
            Some((_, at)) => Err(ExprError::UnexpectedToken(*at)),
            None => Err(ExprError::UnexpectedEnd),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(self.unary()?.into()));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            // right associative, binds tighter than unary minus on the left
            let exp = self.unary()?;
            return Ok(Expr::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (tok, at) = self.tokens.get(self.pos).cloned().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var(0)),
                "x" => Ok(Expr::Var(1)),
                "y" => Ok(Expr::Var(2)),
                "z" => Ok(Expr::Var(3)),
                "pow" => {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(',')?;
                    let b = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Pow(a.into(), b.into()))
                }
                _ => Err(ExprError::UnknownIdent(name)),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(_) => Err(ExprError::UnexpectedToken(at)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, p: [f64; 4]) -> f64 {
        Expr::parse(src).unwrap().eval(&p)
    }

    #[test]
    fn precedence_and_associativity() {
        let p = [2.0, 3.0, 5.0, 7.0];
        assert_eq!(ev("1 + 2 * 3", p), 7.0);
        assert_eq!(ev("(1 + 2) * 3", p), 9.0);
        assert_eq!(ev("8 / 4 / 2", p), 1.0);
        assert_eq!(ev("2 ^ 3 ^ 2", p), 512.0);
        assert_eq!(ev("-t ^ 2", p), -4.0);
        assert_eq!(ev("t - x - y", p), -6.0);
        assert_eq!(ev("pow(t, 0.5) * pow(t, 0.5)", p), 2.0000000000000004);
        assert_eq!(ev("1e-1 * 10", p), 1.0);
        assert_eq!(ev("-(x + z) * -1", p), 10.0);
    }

    #[test]
    fn variables() {
        let p = [1.5, -2.0, 0.25, 4.0];
        assert_eq!(ev("t", p), 1.5);
        assert_eq!(ev("x*y*z", p), -2.0);
        let e = Expr::parse("pow(t, 2/3)").unwrap();
        assert!(e.uses(0) && !e.uses(1));
    }

    #[test]
    fn errors() {
        assert!(matches!(Expr::parse("t +"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(Expr::parse("sin(t)"), Err(ExprError::UnknownIdent(_))));
        assert!(matches!(Expr::parse("t $ 2"), Err(ExprError::UnexpectedChar('$', 2))));
        assert!(matches!(Expr::parse("(t"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(Expr::parse("t t"), Err(ExprError::UnexpectedToken(2))));
        assert!(matches!(Expr::parse("pow(t 2)"), Err(ExprError::UnexpectedToken(_))));
    }

    #[test]
    fn display_round_trips() {
        let e = Expr::parse("1 - x*x/(t+2)^2").unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        let p = [0.3, 0.7, 0.0, 0.0];
        assert_eq!(e.eval(&p), again.eval(&p));
    }
}
