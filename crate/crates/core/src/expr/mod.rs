//! Coordinate expressions: parsing, printing, and jet evaluation.
//!
//! The grammar is documented in `docs/grammar.md`.

mod jet;
mod parse;

pub use jet::{dot, values, Jet};
pub use parse::{parse_expr, parse_expr_with_params};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree over coordinate variables. Immutable after parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
}

/// Named scalar parameters substituted at parse time.
pub type Params = BTreeMap<String, f64>;

impl Expr {
    /// Largest variable index + 1 (0 for constant expressions).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        self.arity() == 0
    }

    /// Plain value at a point.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => p[*i],
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Call(f, a) => {
                let x = a.eval(p)?;
                check_domain(*f, x, p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                }
            }
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => {
                let d = b.eval(p)?;
                if d == 0.0 {
                    return Err(domain("division by zero", p));
                }
                a.eval(p)? / d
            }
            Expr::Pow(a, e) => {
                let x = a.eval(p)?;
                check_pow(x, *e, p)?;
                jet::pow_value(x, *e)
            }
        })
    }

    /// Value and exact first partials at `p`.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet> {
        let n = p.len();
        Ok(match self {
            Expr::Const(c) => Jet::constant(*c, n),
            Expr::Var(i) => Jet::variable(p[*i], *i, n),
            Expr::Neg(a) => -a.eval_jet(p)?,
            Expr::Call(f, a) => {
                let x = a.eval_jet(p)?;
                check_domain(*f, x.value, p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                }
            }
            Expr::Add(a, b) => a.eval_jet(p)? + b.eval_jet(p)?,
            Expr::Sub(a, b) => a.eval_jet(p)? - b.eval_jet(p)?,
            Expr::Mul(a, b) => a.eval_jet(p)? * b.eval_jet(p)?,
            Expr::Div(a, b) => {
                let d = b.eval_jet(p)?;
                if d.value == 0.0 {
                    return Err(domain("division by zero", p));
                }
                a.eval_jet(p)? / d
            }
            Expr::Pow(a, e) => {
                let x = a.eval_jet(p)?;
                check_pow(x.value, *e, p)?;
                x.powf(*e)
            }
        })
    }
}

fn domain(message: &str, p: &[f64]) -> Error {
    Error::Domain {
        message: message.to_string(),
        point: p.to_vec(),
    }
}

fn check_domain(f: Func, x: f64, p: &[f64]) -> Result<()> {
    match f {
        Func::Log if x <= 0.0 => Err(domain(&format!("log of non-positive value {x}"), p)),
        Func::Sqrt if x <= 0.0 => Err(domain(&format!("sqrt of non-positive value {x}"), p)),
        _ => Ok(()),
    }
}

fn check_pow(x: f64, e: f64, p: &[f64]) -> Result<()> {
    if e.fract() != 0.0 && x <= 0.0 {
        return Err(domain(&format!("non-integer power of non-positive value {x}"), p));
    }
    if e < 1.0 && e != 0.0 && x == 0.0 {
        return Err(domain("power singular at zero", p));
    }
    Ok(())
}

/// Prints a fully parenthesised form that parses back to the same tree.
/// Variables are printed as `x{index+1}` unless names are supplied via [`Expr::display_with`].
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, &|i| format!("x{}", i + 1))
    }
}

impl Expr {
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        struct Named<'a>(&'a Expr, &'a [String]);
        impl fmt::Display for Named<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write(f, &|i| self.1[i].clone())
            }
        }
        Named(self, names)
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, name: &dyn Fn(usize) -> String) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(0 - {})", -c)
            }
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "{}", name(*i)),
            Expr::Neg(a) => {
                write!(f, "(-")?;
                a.write(f, name)?;
                write!(f, ")")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, name)?;
                write!(f, ")")
            }
            Expr::Add(a, b) => bin(f, a, "+", b, name),
            Expr::Sub(a, b) => bin(f, a, "-", b, name),
            Expr::Mul(a, b) => bin(f, a, "*", b, name),
            Expr::Div(a, b) => bin(f, a, "/", b, name),
            Expr::Pow(a, e) => {
                write!(f, "(")?;
                a.write(f, name)?;
                if *e < 0.0 {
                    write!(f, "^(-{:?}))", -e)
                } else {
                    write!(f, "^{e:?})")
                }
            }
        }
    }
}

fn bin(
    f: &mut fmt::Formatter<'_>,
    a: &Expr,
    op: &str,
    b: &Expr,
    name: &dyn Fn(usize) -> String,
) -> fmt::Result {
    write!(f, "(")?;
    a.write(f, name)?;
    write!(f, " {op} ")?;
    b.write(f, name)?;
    write!(f, ")")
}
