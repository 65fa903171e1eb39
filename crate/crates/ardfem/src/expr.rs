//! Tiny expression language for coefficient fields in config files.
//!
//! Grammar: floating literals, the variables `t`, `x`, `y`, the constant
//! `pi`, the functions `sin`, `cos`, `exp`, parentheses, unary minus and
//! the binary operators `+ - * / ^` (`^` is right associative and binds
//! tightest). Whitespace is insignificant.

use crate::coeffs::ScalarField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    Var(Var),
    Func(Func),
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    T,
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone)]
enum Ast {
    Num(f64),
    Var(Var),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

impl Ast {
    fn eval(&self, t: f64, x: f64, y: f64) -> f64 {
        match self {
            Ast::Num(v) => *v,
            Ast::Var(Var::T) => t,
            Ast::Var(Var::X) => x,
            Ast::Var(Var::Y) => y,
            Ast::Neg(a) => -a.eval(t, x, y),
            Ast::Add(a, b) => a.eval(t, x, y) + b.eval(t, x, y),
            Ast::Sub(a, b) => a.eval(t, x, y) - b.eval(t, x, y),
            Ast::Mul(a, b) => a.eval(t, x, y) * b.eval(t, x, y),
            Ast::Div(a, b) => a.eval(t, x, y) / b.eval(t, x, y),
            Ast::Pow(a, b) => a.eval(t, x, y).powf(b.eval(t, x, y)),
            Ast::Call(Func::Sin, a) => a.eval(t, x, y).sin(),
            Ast::Call(Func::Cos, a) => a.eval(t, x, y).cos(),
            Ast::Call(Func::Exp, a) => a.eval(t, x, y).exp(),
        }
    }
}

/// A parsed expression over `(t, x, y)`.
#[derive(Debug, Clone)]
pub struct Expression {
    ast: std::sync::Arc<Ast>,
    src: String,
}

impl Expression {
    pub fn eval(&self, t: f64, x: f64, y: f64) -> f64 {
        self.ast.eval(t, x, y)
    }

    /// Source text the expression was parsed from.
    pub fn source(&self) -> &str {
        &self.src
    }

    /// Wraps the expression as a coefficient field (gradients by finite
    /// differences).
    pub fn to_field(&self) -> ScalarField {
        let ast = self.ast.clone();
        ScalarField::new(move |t, x, y| ast.eval(t, x, y))
    }
}

/// Parses an expression, reporting errors with 1-based column positions.
pub fn parse(src: &str) -> Result<Expression> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens: &tokens,
        next: 0,
        src_len: src.len(),
    };
    let ast = parser.expression(0)?;
    if let Some(&(pos, _)) = parser.peek() {
        return Err(err_at(pos, "unexpected trailing input"));
    }
    Ok(Expression {
        ast: std::sync::Arc::new(ast),
        src: src.to_string(),
    })
}

fn err_at(pos: usize, msg: &str) -> Error {
    Error::config(format!("expression: {} at column {}", msg, pos + 1))
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                tokens.push((
                    i,
                    match c {
                        '+' => Token::Plus,
                        '-' => Token::Minus,
                        '*' => Token::Star,
                        '/' => Token::Slash,
                        '^' => Token::Caret,
                        '(' => Token::LParen,
                        _ => Token::RParen,
                    },
                ));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // Exponent part, optionally signed.
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| err_at(start, &format!("invalid number '{text}'")))?;
                tokens.push((start, Token::Num(value)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                let name = &src[start..i];
                let token = match name {
                    "t" => Token::Var(Var::T),
                    "x" => Token::Var(Var::X),
                    "y" => Token::Var(Var::Y),
                    "pi" => Token::Pi,
                    "sin" => Token::Func(Func::Sin),
                    "cos" => Token::Func(Func::Cos),
                    "exp" => Token::Func(Func::Exp),
                    _ => {
                        return Err(err_at(
                            start,
                            &format!(
                                "unknown name '{name}' (expected t, x, y, pi, sin, cos or exp)"
                            ),
                        ))
                    }
                };
                tokens.push((start, token));
            }
            _ => return Err(err_at(i, &format!("unexpected character '{c}'"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    next: usize,
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.next)
    }

    fn advance(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.next).copied();
        if t.is_some() {
            self.next += 1;
        }
        t
    }

    fn expect_rparen(&mut self, open_pos: usize) -> Result<()> {
        match self.advance() {
            Some((_, Token::RParen)) => Ok(()),
            Some((pos, _)) => Err(err_at(pos, "expected ')'")),
            None => Err(err_at(open_pos, "unclosed '('")),
        }
    }

    /// Precedence climbing: `+ -` bind at 1, `* /` at 3, `^` at 5
    /// (right associative), unary minus between `* /` and `^`.
    fn expression(&mut self, min_bp: u8) -> Result<Ast> {
        let mut lhs = match self.advance() {
            Some((_, Token::Num(v))) => Ast::Num(v),
            Some((_, Token::Var(v))) => Ast::Var(v),
            Some((_, Token::Pi)) => Ast::Num(std::f64::consts::PI),
            Some((_, Token::Minus)) => Ast::Neg(Box::new(self.expression(4)?)),
            Some((pos, Token::LParen)) => {
                let inner = self.expression(0)?;
                self.expect_rparen(pos)?;
                inner
            }
            Some((pos, Token::Func(f))) => match self.advance() {
                Some((open, Token::LParen)) => {
                    let arg = self.expression(0)?;
                    self.expect_rparen(open)?;
                    Ast::Call(f, Box::new(arg))
                }
                _ => return Err(err_at(pos, "function name must be followed by '('")),
            },
            Some((pos, _)) => return Err(err_at(pos, "expected a value")),
            None => return Err(err_at(self.src_len, "unexpected end of expression")),
        };
        while let Some(&(_, token)) = self.peek() {
            let (lbp, rbp) = match token {
                Token::Plus | Token::Minus => (1, 2),
                Token::Star | Token::Slash => (3, 4),
                Token::Caret => (5, 5), // right associative
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            self.advance();
            let rhs = self.expression(rbp)?;
            lhs = match token {
                Token::Plus => Ast::Add(Box::new(lhs), Box::new(rhs)),
                Token::Minus => Ast::Sub(Box::new(lhs), Box::new(rhs)),
                Token::Star => Ast::Mul(Box::new(lhs), Box::new(rhs)),
                Token::Slash => Ast::Div(Box::new(lhs), Box::new(rhs)),
                Token::Caret => Ast::Pow(Box::new(lhs), Box::new(rhs)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str) -> f64 {
        parse(src).unwrap().eval(0.0, 0.0, 0.0)
    }

    fn eval_at(src: &str, t: f64, x: f64, y: f64) -> f64 {
        parse(src).unwrap().eval(t, x, y)
    }

    #[test]
    fn literals_and_arithmetic() {
        assert_eq!(eval("2 + 3 * 4"), 14.0);
        assert_eq!(eval("(2 + 3) * 4"), 20.0);
        assert_eq!(eval("7 - 3 - 2"), 2.0);
        assert_eq!(eval("8 / 4 / 2"), 1.0);
        assert_eq!(eval("1.5e2 + .5"), 150.5);
        assert_eq!(eval("1e-3"), 0.001);
    }

    #[test]
    fn power_is_right_associative_and_tightest() {
        assert_eq!(eval("2 ^ 3 ^ 2"), 512.0);
        assert_eq!(eval("2 * 3 ^ 2"), 18.0);
        assert_eq!(eval("-2 ^ 2"), -4.0);
        assert_eq!(eval("2 ^ -1"), 0.5);
    }

    #[test]
    fn variables_and_functions() {
        assert_eq!(eval_at("t + 2*x + 3*y", 1.0, 10.0, 100.0), 321.0);
        assert!((eval("sin(pi / 2)") - 1.0).abs() < 1e-15);
        assert!((eval("cos(pi)") + 1.0).abs() < 1e-15);
        assert!((eval("exp(1)") - std::f64::consts::E).abs() < 1e-15);
        let v = eval_at("1.1 + 0.75 * cos(x) * cos(y)", 0.0, 0.3, 0.7);
        assert!((v - (1.1 + 0.75 * 0.3f64.cos() * 0.7f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn field_wrapper_evaluates_and_differentiates() {
        let f = parse("x^2 + t*y").unwrap().to_field();
        assert!((f.eval(2.0, 3.0, 4.0) - 17.0).abs() < 1e-12);
        let g = f.grad(2.0, 3.0, 4.0);
        assert!((g[0] - 6.0).abs() < 1e-6);
        assert!((g[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn errors_carry_positions() {
        let msg = |src: &str| parse(src).unwrap_err().to_string();
        assert!(msg("1 +").contains("column 4"), "{}", msg("1 +"));
        assert!(msg("foo(1)").contains("unknown name 'foo'"));
        assert!(msg("sin 1").contains("followed by '('"));
        assert!(msg("(1 + 2").contains("unclosed"));
        assert!(msg("1 @ 2").contains("unexpected character '@'"));
        assert!(msg("1 2").contains("trailing"));
        assert!(msg("").contains("end of expression"));
        assert!(msg("1..2").contains("invalid number"));
    }
}
