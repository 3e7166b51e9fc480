//! Recursive-descent parser.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary minus, `^`. Binary
//! operators are left-associative except `^`, whose exponent must be a
//! constant expression.

use super::{Expr, Func, Params};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{s}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [String],
    params: &'a Params,
}

/// Parse `text` over the named coordinates.
pub fn parse_expr(text: &str, coords: &[String]) -> Result<Expr> {
    parse_expr_with_params(text, coords, &Params::new())
}

/// Parse with named constant parameters substituted by value.
pub fn parse_expr_with_params(text: &str, coords: &[String], params: &Params) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        coords,
        params,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(p.syntax("unexpected trailing input")),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(&format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(Error::Syntax {
                offset: at,
                message: "exponent must be a constant expression".into(),
            });
        }
        let value = exponent.eval(&[]).map_err(|_| Error::Syntax {
            offset: at,
            message: "exponent is not a finite constant".into(),
        })?;
        Ok(Expr::Pow(Box::new(base), value))
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| Error::UnknownIdentifier {
                        name: name.clone(),
                        offset: at,
                    })?;
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    if args.len() != 1 {
                        return Err(Error::Arity {
                            name,
                            expected: 1,
                            found: args.len(),
                        });
                    }
                    return Ok(Expr::Call(func, Box::new(args.pop().unwrap())));
                }
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    Ok(Expr::Var(i))
                } else if let Some(v) = self.params.get(&name) {
                    Ok(Expr::Const(*v))
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else if Func::from_name(&name).is_some() {
                    Err(Error::Arity {
                        name,
                        expected: 1,
                        found: 0,
                    })
                } else {
                    Err(Error::UnknownIdentifier { name, offset: at })
                }
            }
            Tok::End => Err(Error::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            t => Err(Error::Syntax {
                offset: at,
                message: format!("unexpected token {t:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    #[test]
    fn grammar_shape() {
        let e = parse_expr("x1*x2 + 1", &c2()).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)))),
                Box::new(Expr::Const(1.0))
            )
        );
    }

    #[test]
    fn pow_binds_tighter_than_negation() {
        let e = parse_expr("-x1^2", &c2()).unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Var(0)), 2.0)))
        );
        assert_eq!(e.eval(&[3.0, 0.0]).unwrap(), -9.0);
    }

    #[test]
    fn left_associative() {
        let e = parse_expr("8 - 4 - 2", &c2()).unwrap();
        assert_eq!(e.eval(&[0.0, 0.0]).unwrap(), 2.0);
        let d = parse_expr("8 / 4 / 2", &c2()).unwrap();
        assert_eq!(d.eval(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn parameters_are_substituted() {
        let mut params = Params::new();
        params.insert("a0".into(), 0.5);
        let e = parse_expr_with_params("log(1 - a0)", &c2(), &params).unwrap();
        assert!((e.eval(&[0.0, 0.0]).unwrap() - (-0.693_147_180_559_945_3)).abs() < 1e-15);
    }

    #[test]
    fn error_reporting() {
        match parse_expr("x1 + * 2", &c2()) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expr("x1 + y", &c2()),
            Err(Error::UnknownIdentifier { offset: 5, .. })
        ));
        assert!(matches!(
            parse_expr("sin(x1, x2)", &c2()),
            Err(Error::Arity { found: 2, .. })
        ));
        assert!(matches!(parse_expr("x1^x2", &c2()), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("(x1", &c2()), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x1 $", &c2()), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("1.5e-3*x1 + 2E2", &c2()).unwrap();
        assert!((e.eval(&[2.0, 0.0]).unwrap() - 200.003).abs() < 1e-12);
    }
}
