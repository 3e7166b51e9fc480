//! First-order jets: a value together with its partial derivatives.
//!
//! Arithmetic is truncated first-order polynomial arithmetic, so the product
//! and chain rules hold exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, dim: usize) -> Self {
        Jet {
            value,
            grad: vec![0.0; dim],
        }
    }

    /// The coordinate function `x_index` evaluated at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Jet { value, grad }
    }

    pub fn new(value: f64, grad: Vec<f64>) -> Self {
        Jet { value, grad }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    /// Partial derivative along coordinate `i`.
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    /// Apply a scalar function given its value and derivative at `self.value`.
    pub fn chain(&self, value: f64, derivative: f64) -> Jet {
        Jet {
            value,
            grad: self.grad.iter().map(|g| g * derivative).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
        }
    }

    pub fn sin(&self) -> Jet {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(&self) -> Jet {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e)
    }

    /// Natural logarithm; the caller guarantees a positive value.
    pub fn ln(&self) -> Jet {
        self.chain(self.value.ln(), 1.0 / self.value)
    }

    /// Square root; the caller guarantees a positive value.
    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn powf(&self, p: f64) -> Jet {
        if p == 0.0 {
            return Jet::constant(1.0, self.dim());
        }
        let v = pow_value(self.value, p);
        let dv = p * pow_value(self.value, p - 1.0);
        self.chain(v, dv)
    }

    pub fn recip(&self) -> Jet {
        let r = 1.0 / self.value;
        self.chain(r, -r * r)
    }
}

/// `x^p`, using integer powers where possible so negative bases work.
pub(crate) fn pow_value(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value * rhs.value,
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| a * rhs.value + self.value * b)
                .collect(),
        }
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let q = self.value / rhs.value;
        Jet {
            value: q,
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| (a - q * b) / rhs.value)
                .collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Dot product of two jet vectors.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let dim = a.first().map(Jet::dim).unwrap_or(0);
    a.iter()
        .zip(b)
        .fold(Jet::constant(0.0, dim), |acc, (x, y)| &acc + &(x * y))
}

pub fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.value).collect()
}
