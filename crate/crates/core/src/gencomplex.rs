//! The doubled bundle `TM ⊕ T*M`: canonical pairing, Courant bracket, Dirac
//! subspaces `L(T^ℂM, ε)` and B-field transforms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bihermitian::Quadruple;
use crate::error::{Error, Result};
use crate::expr::{dot, values, Expr, Jet, Params};
use crate::patch::{d1, interior_2, ExprMatrix, ExprVector, JetMat, TwoFormField};
use crate::residual::Residual;

/// `X + α` with complex components.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedVector {
    pub vector: Vec<Complex64>,
    pub form: Vec<Complex64>,
}

impl GeneralizedVector {
    pub fn real(vector: &[f64], form: &[f64]) -> Self {
        GeneralizedVector {
            vector: vector.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            form: form.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// Stacked `(X; α)` column.
    pub fn stacked(&self) -> DVector<Complex64> {
        DVector::from_iterator(
            2 * self.dim(),
            self.vector.iter().chain(&self.form).copied(),
        )
    }

    pub fn conj(&self) -> Self {
        GeneralizedVector {
            vector: self.vector.iter().map(|z| z.conj()).collect(),
            form: self.form.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.stacked().norm()
    }
}

/// `<X + α, Y + β> = ½(α(Y) + β(X))`, complex bilinear.
pub fn canonical_pairing(u: &GeneralizedVector, v: &GeneralizedVector) -> Result<Complex64> {
    if u.dim() != v.dim() || u.form.len() != v.form.len() || u.form.len() != u.dim() {
        return Err(Error::Shape(format!(
            "pairing of generalized vectors of dimensions {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    let a: Complex64 = u.form.iter().zip(&v.vector).map(|(x, y)| x * y).sum();
    let b: Complex64 = v.form.iter().zip(&u.vector).map(|(x, y)| x * y).sum();
    Ok((a + b) * 0.5)
}

/// Real section `X + α` evaluated as jets at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionJet {
    pub vector: Vec<Jet>,
    pub form: Vec<Jet>,
}

impl SectionJet {
    pub fn zero(n: usize) -> Self {
        SectionJet {
            vector: vec![Jet::constant(0.0, n); n],
            form: vec![Jet::constant(0.0, n); n],
        }
    }

    pub fn scale_jet(&self, f: &Jet) -> Self {
        SectionJet {
            vector: self.vector.iter().map(|x| x * f).collect(),
            form: self.form.iter().map(|x| x * f).collect(),
        }
    }
}

/// Complex section as real and imaginary real sections.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSectionJet {
    pub re: SectionJet,
    pub im: SectionJet,
}

/// Courant bracket of real sections, with the Lie derivative expanded by
/// Cartan's formula `L_X β = ι_X dβ + d(ι_X β)`. Returns `(vector, form)`.
pub fn courant_bracket_real(u: &SectionJet, v: &SectionJet) -> (Vec<f64>, Vec<f64>) {
    let x = &u.vector;
    let y = &v.vector;
    let (alpha, beta) = (&u.form, &v.form);
    let xv = values(x);
    let yv = values(y);
    let lie = crate::patch::lie_bracket(x, y);
    let ix_beta = dot(x, beta);
    let iy_alpha = dot(y, alpha);
    // L_X β − L_Y α
    let lx_beta: Vec<f64> = interior_2(&xv, &d1(beta))
        .iter()
        .zip(&ix_beta.grad)
        .map(|(a, b)| a + b)
        .collect();
    let ly_alpha: Vec<f64> = interior_2(&yv, &d1(alpha))
        .iter()
        .zip(&iy_alpha.grad)
        .map(|(a, b)| a + b)
        .collect();
    let correction = &ix_beta - &iy_alpha;
    let form = (0..xv.len())
        .map(|i| lx_beta[i] - ly_alpha[i] - 0.5 * correction.grad[i])
        .collect();
    (lie, form)
}

/// Complex-bilinear Courant bracket.
pub fn courant_bracket(u: &ComplexSectionJet, v: &ComplexSectionJet) -> GeneralizedVector {
    let (rr_v, rr_f) = courant_bracket_real(&u.re, &v.re);
    let (ii_v, ii_f) = courant_bracket_real(&u.im, &v.im);
    let (ri_v, ri_f) = courant_bracket_real(&u.re, &v.im);
    let (ir_v, ir_f) = courant_bracket_real(&u.im, &v.re);
    let combine = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<Complex64> {
        (0..a.len())
            .map(|k| Complex64::new(a[k] - b[k], c[k] + d[k]))
            .collect()
    };
    GeneralizedVector {
        vector: combine(&rr_v, &ii_v, &ri_v, &ir_v),
        form: combine(&rr_f, &ii_f, &ri_f, &ir_f),
    }
}

/// A section given by expressions: vector field and one-form, each with an
/// optional imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSection {
    pub vector: ExprVector,
    pub form: ExprVector,
    pub vector_im: Option<ExprVector>,
    pub form_im: Option<ExprVector>,
}

impl GeneralizedSection {
    pub fn parse_real(vector: &[String], form: &[String], coords: &[String], params: &Params) -> Result<Self> {
        Ok(GeneralizedSection {
            vector: ExprVector::parse(vector, coords, params, "section vector")?,
            form: ExprVector::parse(form, coords, params, "section form")?,
            vector_im: None,
            form_im: None,
        })
    }

    pub fn eval(&self, p: &[f64]) -> Result<ComplexSectionJet> {
        let n = p.len();
        let zeros = || vec![Jet::constant(0.0, n); n];
        let opt = |e: &Option<ExprVector>| -> Result<Vec<Jet>> {
            e.as_ref().map(|v| v.eval_jet(p)).unwrap_or_else(|| Ok(zeros()))
        };
        Ok(ComplexSectionJet {
            re: SectionJet {
                vector: self.vector.eval_jet(p)?,
                form: self.form.eval_jet(p)?,
            },
            im: SectionJet {
                vector: opt(&self.vector_im)?,
                form: opt(&self.form_im)?,
            },
        })
    }
}

/// Complex two-form with jet components.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTwoFormJet {
    pub re: JetMat,
    pub im: JetMat,
}

impl ComplexTwoFormJet {
    pub fn value(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.re.nrows(), self.re.ncols(), |r, c| {
            Complex64::new(self.re.val[(r, c)], self.im.val[(r, c)])
        })
    }
}

/// Anything that yields a complex two-form field.
pub trait TwoFormSource: Sync {
    fn eval(&self, p: &[f64]) -> Result<ComplexTwoFormJet>;
}

impl TwoFormSource for crate::patch::ComplexTwoFormField {
    fn eval(&self, p: &[f64]) -> Result<ComplexTwoFormJet> {
        Ok(ComplexTwoFormJet {
            re: self.re.eval_jet(p)?,
            im: self.im.eval_jet(p)?,
        })
    }
}

/// Frame section `f·(∂_i + ι_{∂_i} ε)` of `L(T^ℂM, ε)`.
pub fn epsilon_frame_section(eps: &ComplexTwoFormJet, i: usize, coeff: &Jet) -> ComplexSectionJet {
    let n = eps.re.nrows();
    let dim = eps.re.dim();
    let e_i: Vec<Jet> = (0..n)
        .map(|k| Jet::constant(if k == i { 1.0 } else { 0.0 }, dim))
        .collect();
    let row = |m: &JetMat| -> Vec<Jet> { (0..n).map(|j| m.entry(i, j)).collect() };
    ComplexSectionJet {
        re: SectionJet {
            vector: e_i,
            form: row(&eps.re),
        }
        .scale_jet(coeff),
        im: SectionJet {
            vector: vec![Jet::constant(0.0, dim); n],
            form: row(&eps.im),
        }
        .scale_jet(coeff),
    }
}

/// Basis `{e_i + ι_{e_i} ε}` of `L(T^ℂM, ε)` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSpec {
    pub epsilon: DMatrix<Complex64>,
    pub basis: Vec<GeneralizedVector>,
}

pub fn dirac_from_epsilon(eps: &DMatrix<Complex64>) -> DiracSpec {
    let n = eps.nrows();
    let basis = (0..n)
        .map(|i| GeneralizedVector {
            vector: (0..n)
                .map(|k| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0))
                .collect(),
            form: (0..n).map(|j| eps[(i, j)]).collect(),
        })
        .collect();
    DiracSpec {
        epsilon: eps.clone(),
        basis,
    }
}

impl DiracSpec {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Pairing Gram matrix of the basis.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |a, b| {
            canonical_pairing(&self.basis[a], &self.basis[b]).expect("same dimension")
        })
    }

    pub fn isotropy_residual(&self) -> f64 {
        self.gram().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `[L | conj L]` as a `2n × 2n` complex matrix.
    fn stacked_with_conjugate(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let cols: Vec<DVector<Complex64>> = self
            .basis
            .iter()
            .map(|v| v.stacked())
            .chain(self.basis.iter().map(|v| v.conj().stacked()))
            .collect();
        DMatrix::from_columns(&cols).resize(2 * n, 2 * n, Complex64::new(0.0, 0.0))
    }

    /// Rank of `L + conj L`; equals `2n` exactly when `L ∩ conj L = 0`.
    pub fn rank_with_conjugate(&self, tol: f64) -> usize {
        let svd = self.stacked_with_conjugate().svd(false, false);
        svd.singular_values.iter().filter(|s| **s > tol).count()
    }

    /// Whether `Im ε` is nondegenerate (the condition for full `E`).
    pub fn is_generalized_complex(&self, tol: f64) -> bool {
        let im = self.epsilon.map(|z| z.im);
        let svd = im.svd(false, false);
        svd.singular_values.iter().all(|s| *s > tol) && self.rank_with_conjugate(tol) == 2 * self.dim()
    }

    /// Norm of the component of `w` along `conj L` in the splitting
    /// `L ⊕ conj L`; fails when `L ∩ conj L ≠ 0`.
    pub fn transverse_component(&self, w: &GeneralizedVector) -> Result<f64> {
        let n = self.dim();
        let c = self
            .stacked_with_conjugate()
            .lu()
            .solve(&w.stacked())
            .ok_or_else(|| Error::Invalid("L and its conjugate intersect; no transverse splitting".into()))?;
        let mut t = DVector::from_element(2 * n, Complex64::new(0.0, 0.0));
        for (k, v) in self.basis.iter().enumerate() {
            t += v.conj().stacked() * c[n + k];
        }
        Ok(t.norm())
    }
}

/// `max |dε(∂_i, ∂_j, ∂_k)|` over the given points (real and imaginary parts).
pub fn dirac_integrability_residual(src: &dyn TwoFormSource, points: &[Vec<f64>]) -> Result<Residual> {
    let per_point = points
        .par_iter()
        .map(|p| {
            let eps = src.eval(p)?;
            let re = crate::patch::d2(&eps.re).max_abs();
            let im = crate::patch::d2(&eps.im).max_abs();
            Ok(Residual::at(re.hypot(im), p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Residual::merge_all(&per_point))
}

/// Shift `b` by a closed real two-form `B`. The metric and both complex
/// structures are untouched; `ε± ↦ ε± + B` follows because `Re ε±` is affine
/// in `b` with unit coefficient.
pub fn b_field_transform(q: &Quadruple, shift: &TwoFormField, tol: f64) -> Result<Quadruple> {
    let n = q.patch.dim;
    if shift.0.rows != n || shift.0.cols != n {
        return Err(Error::Shape(format!("B-field must be {n}x{n}")));
    }
    for p in q.patch.pre_grid() {
        let bj = shift.0.eval_jet(&p)?;
        let asym = (&bj.val + bj.val.transpose()).amax();
        if asym > tol {
            return Err(Error::Validation {
                check: "B-field antisymmetry".into(),
                residual: asym,
                point: p,
            });
        }
        let db = crate::patch::d2(&bj).max_abs();
        if db > tol {
            return Err(Error::Validation {
                check: "B-field closedness (dB = 0)".into(),
                residual: db,
                point: p,
            });
        }
    }
    let entries = q
        .b
        .0
        .entries
        .iter()
        .zip(&shift.0.entries)
        .map(|(a, b)| match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            _ => Expr::Add(Box::new(a.clone()), Box::new(b.clone())),
        })
        .collect();
    let mut out = q.clone();
    out.b = TwoFormField(ExprMatrix {
        rows: n,
        cols: n,
        entries,
    });
    Ok(out)
}
