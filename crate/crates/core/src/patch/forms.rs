//! Differential forms at a point, with the determinant convention:
//! `(α∧β)(X,Y) = α(X)β(Y) − α(Y)β(X)` and `dβ_ijk = ∂_i β_jk + ∂_j β_ki + ∂_k β_ij`.

use nalgebra::DMatrix;

use super::JetMat;
use crate::error::{Error, Result};
use crate::expr::Jet;

/// Dense antisymmetric three-index array.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    pub n: usize,
    pub data: Vec<f64>,
}

impl ThreeForm {
    pub fn zeros(n: usize) -> Self {
        ThreeForm {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.n;
        self.data[(i * n + j) * n + k] = v;
    }

    /// `h(X, Y, Z)`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..n {
                    s += xy * z[k] * self.get(i, j, k);
                }
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> ThreeForm {
        ThreeForm {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &ThreeForm) -> ThreeForm {
        ThreeForm {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &ThreeForm) -> ThreeForm {
        ThreeForm {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// `(X,Y,Z) ↦ h(AX, BY, CZ)` with endomorphisms given as matrices,
    /// contracted one slot at a time.
    pub fn pullback(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> ThreeForm {
        let n = self.n;
        let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        let mut t1 = vec![0.0; n * n * n];
        for i in 0..n {
            for p in 0..n {
                let w = a[(p, i)];
                if w == 0.0 {
                    continue;
                }
                for jk in 0..n * n {
                    t1[i * n * n + jk] += w * self.data[p * n * n + jk];
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for q in 0..n {
                    let w = b[(q, j)];
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        t2[idx(i, j, k)] += w * t1[idx(i, q, k)];
                    }
                }
            }
        }
        let mut out = ThreeForm::zeros(n);
        for ij in 0..n * n {
            for k in 0..n {
                let mut s = 0.0;
                for r in 0..n {
                    s += t2[ij * n + r] * c[(r, k)];
                }
                out.data[ij * n + k] = s;
            }
        }
        out
    }
}

/// d of a function: its gradient as a one-form.
pub fn d0(f: &Jet) -> Vec<f64> {
    f.grad.clone()
}

/// d of a one-form with jet components.
pub fn d1(alpha: &[Jet]) -> DMatrix<f64> {
    let n = alpha.len();
    DMatrix::from_fn(n, n, |i, j| alpha[j].d(i) - alpha[i].d(j))
}

/// d of a two-form with jet components.
pub fn d2(beta: &JetMat) -> ThreeForm {
    let n = beta.nrows();
    let mut h = ThreeForm::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = beta.d[i][(j, k)] + beta.d[j][(k, i)] + beta.d[k][(i, j)];
                h.set(i, j, k, v);
            }
        }
    }
    h
}

pub fn wedge_11(a: &[f64], b: &[f64]) -> DMatrix<f64> {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i] * b[j] - a[j] * b[i])
}

/// `(θ∧β)(X,Y,Z) = θ(X)β(Y,Z) + θ(Y)β(Z,X) + θ(Z)β(X,Y)`.
pub fn wedge_12(theta: &[f64], beta: &DMatrix<f64>) -> ThreeForm {
    let n = theta.len();
    let mut h = ThreeForm::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = theta[i] * beta[(j, k)] + theta[j] * beta[(k, i)] + theta[k] * beta[(i, j)];
                h.set(i, j, k, v);
            }
        }
    }
    h
}

pub fn interior_1(x: &[f64], alpha: &[f64]) -> f64 {
    x.iter().zip(alpha).map(|(a, b)| a * b).sum()
}

/// `ι_X β = β(X, ·)`.
pub fn interior_2(x: &[f64], beta: &DMatrix<f64>) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|j| (0..n).map(|i| x[i] * beta[(i, j)]).sum()).collect()
}

/// `ι_X h = h(X, ·, ·)`.
pub fn interior_3(x: &[f64], h: &ThreeForm) -> DMatrix<f64> {
    let n = h.n;
    DMatrix::from_fn(n, n, |j, k| (0..n).map(|i| x[i] * h.get(i, j, k)).sum())
}

/// A form value of some degree at a point.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Zero(f64),
    One(Vec<f64>),
    Two(DMatrix<f64>),
    Three(ThreeForm),
    /// Coefficient of `dx1∧…∧dxn`.
    Top(f64),
}

fn perm_sign(idx: &[usize]) -> f64 {
    let mut s = 1.0;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] == idx[b] {
                return 0.0;
            }
            if idx[a] > idx[b] {
                s = -s;
            }
        }
    }
    s
}

/// Hodge star for a Riemannian metric and orientation `±1`.
///
/// Supported: 0-forms and top forms in any dimension; one-, two- and
/// three-forms in dimension four.
pub fn hodge_star(w: &Form, g: &DMatrix<f64>, orientation: i8) -> Result<Form> {
    let n = g.nrows();
    let o = orientation.signum() as f64;
    if o == 0.0 {
        return Err(Error::Invalid("orientation must be +1 or -1".into()));
    }
    let sqrt_det = g.determinant().sqrt();
    let unsupported = |deg: usize| Error::Unsupported(format!("Hodge star of a {deg}-form in dimension {n}"));
    match w {
        Form::Zero(f) => Ok(Form::Top(o * sqrt_det * f)),
        Form::Top(c) => Ok(Form::Zero(o * c / sqrt_det)),
        _ if n != 4 => Err(unsupported(match w {
            Form::One(_) => 1,
            Form::Two(_) => 2,
            _ => 3,
        })),
        Form::One(theta) => {
            let gi = g.clone().try_inverse().ok_or_else(|| unsupported(1))?;
            let up: Vec<f64> = (0..4).map(|i| (0..4).map(|j| gi[(i, j)] * theta[j]).sum()).collect();
            let mut h = ThreeForm::zeros(4);
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v: f64 = (0..4).map(|i| up[i] * perm_sign(&[i, j, k, l])).sum();
                        h.set(j, k, l, o * sqrt_det * v);
                    }
                }
            }
            Ok(Form::Three(h))
        }
        Form::Two(beta) => {
            let gi = g.clone().try_inverse().ok_or_else(|| unsupported(2))?;
            let up = &gi * beta * gi.transpose();
            let m = DMatrix::from_fn(4, 4, |k, l| {
                let mut s = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        s += up[(i, j)] * perm_sign(&[i, j, k, l]);
                    }
                }
                0.5 * o * sqrt_det * s
            });
            Ok(Form::Two(m))
        }
        Form::Three(h) => {
            let gi = g.clone().try_inverse().ok_or_else(|| unsupported(3))?;
            let mut up = ThreeForm::zeros(4);
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let mut s = 0.0;
                        for i in 0..4 {
                            for j in 0..4 {
                                for k in 0..4 {
                                    s += gi[(a, i)] * gi[(b, j)] * gi[(c, k)] * h.get(i, j, k);
                                }
                            }
                        }
                        up.set(a, b, c, s);
                    }
                }
            }
            let v: Vec<f64> = (0..4)
                .map(|l| {
                    let mut s = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                s += up.get(i, j, k) * perm_sign(&[i, j, k, l]);
                            }
                        }
                    }
                    o * sqrt_det * s / 6.0
                })
                .collect();
            Ok(Form::One(v))
        }
    }
}
