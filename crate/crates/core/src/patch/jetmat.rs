//! Matrices whose entries are first-order jets, stored as a value matrix plus
//! one partial-derivative matrix per coordinate.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Jet;

#[derive(Debug, Clone, PartialEq)]
pub struct JetMat {
    pub val: DMatrix<f64>,
    /// `d[i]` is the partial derivative along coordinate `i`.
    pub d: Vec<DMatrix<f64>>,
}

impl JetMat {
    pub fn constant(val: DMatrix<f64>, dim: usize) -> Self {
        let z = DMatrix::zeros(val.nrows(), val.ncols());
        JetMat { val, d: vec![z; dim] }
    }

    pub fn identity(size: usize, dim: usize) -> Self {
        Self::constant(DMatrix::identity(size, size), dim)
    }

    pub fn zeros(rows: usize, cols: usize, dim: usize) -> Self {
        Self::constant(DMatrix::zeros(rows, cols), dim)
    }

    /// Build from a row-major grid of jets.
    pub fn from_jets(rows: usize, cols: usize, entries: &[Jet]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let dim = entries.first().map(Jet::dim).unwrap_or(0);
        let val = DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c].value);
        let d = (0..dim)
            .map(|i| DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c].grad[i]))
            .collect();
        JetMat { val, d }
    }

    /// Columns given as jet vectors.
    pub fn from_columns(cols: &[Vec<Jet>]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map(Vec::len).unwrap_or(0);
        let mut entries = Vec::with_capacity(nrows * ncols);
        for r in 0..nrows {
            for c in cols {
                entries.push(c[r].clone());
            }
        }
        Self::from_jets(nrows, ncols, &entries)
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn nrows(&self) -> usize {
        self.val.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.val.ncols()
    }

    pub fn entry(&self, r: usize, c: usize) -> Jet {
        Jet::new(self.val[(r, c)], self.d.iter().map(|m| m[(r, c)]).collect())
    }

    pub fn column(&self, c: usize) -> Vec<Jet> {
        (0..self.nrows()).map(|r| self.entry(r, c)).collect()
    }

    pub fn transpose(&self) -> JetMat {
        JetMat {
            val: self.val.transpose(),
            d: self.d.iter().map(|m| m.transpose()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> JetMat {
        JetMat {
            val: &self.val * s,
            d: self.d.iter().map(|m| m * s).collect(),
        }
    }

    /// Multiply by a scalar jet.
    pub fn scale_jet(&self, s: &Jet) -> JetMat {
        JetMat {
            val: &self.val * s.value,
            d: self
                .d
                .iter()
                .zip(&s.grad)
                .map(|(m, g)| m * s.value + &self.val * *g)
                .collect(),
        }
    }

    pub fn trace(&self) -> Jet {
        Jet::new(self.val.trace(), self.d.iter().map(|m| m.trace()).collect())
    }

    /// `self + s·I`.
    pub fn add_identity(&self, s: &Jet) -> JetMat {
        let n = self.nrows();
        let mut out = self.clone();
        for k in 0..n {
            out.val[(k, k)] += s.value;
            for (m, g) in out.d.iter_mut().zip(&s.grad) {
                m[(k, k)] += *g;
            }
        }
        out
    }

    /// Inverse, with `∂(A⁻¹) = −A⁻¹ (∂A) A⁻¹`.
    pub fn inverse(&self, what: &str, point: &[f64]) -> Result<JetMat> {
        let inv = self
            .val
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|x| x.is_finite()))
            .ok_or_else(|| Error::Singular {
                what: what.to_string(),
                point: point.to_vec(),
            })?;
        let d = self.d.iter().map(|m| -(&inv * m * &inv)).collect();
        Ok(JetMat { val: inv, d })
    }

    /// Matrix-vector product with a jet vector.
    pub fn mul_vec(&self, v: &[Jet]) -> Vec<Jet> {
        let dim = self.dim();
        (0..self.nrows())
            .map(|r| {
                let mut acc = Jet::constant(0.0, dim);
                for (c, x) in v.iter().enumerate() {
                    acc = &acc + &(&self.entry(r, c) * x);
                }
                acc
            })
            .collect()
    }

    /// Largest absolute entry of the value matrix.
    pub fn max_abs(&self) -> f64 {
        self.val.amax()
    }
}

impl Add<&JetMat> for &JetMat {
    type Output = JetMat;
    fn add(self, rhs: &JetMat) -> JetMat {
        JetMat {
            val: &self.val + &rhs.val,
            d: self.d.iter().zip(&rhs.d).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&JetMat> for &JetMat {
    type Output = JetMat;
    fn sub(self, rhs: &JetMat) -> JetMat {
        JetMat {
            val: &self.val - &rhs.val,
            d: self.d.iter().zip(&rhs.d).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&JetMat> for &JetMat {
    type Output = JetMat;
    fn mul(self, rhs: &JetMat) -> JetMat {
        JetMat {
            val: &self.val * &rhs.val,
            d: self
                .d
                .iter()
                .zip(&rhs.d)
                .map(|(a, b)| a * &rhs.val + &self.val * b)
                .collect(),
        }
    }
}

impl Neg for &JetMat {
    type Output = JetMat;
    fn neg(self) -> JetMat {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<JetMat> for JetMat {
            type Output = JetMat;
            fn $m(self, rhs: JetMat) -> JetMat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&JetMat> for JetMat {
            type Output = JetMat;
            fn $m(self, rhs: &JetMat) -> JetMat {
                (&self).$m(rhs)
            }
        }
        impl $tr<JetMat> for &JetMat {
            type Output = JetMat;
            fn $m(self, rhs: JetMat) -> JetMat {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
