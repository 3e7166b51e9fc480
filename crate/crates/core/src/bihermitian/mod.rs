//! Bihermitian quadruples `(g, b, J₊, J₋)`, the two-forms `ε±` of the
//! associated Dirac structures, and the residual suites for the identities
//! satisfied by generalized Kähler data.

mod fourdim;
mod identities;

pub use fourdim::{
    four_dim_suite, orientation_of, pointwise_equivalence, quaternion_left, sample_pointwise, PointData4,
    PointSample, SampleKind,
};
pub use identities::{identity_suite, normalized_gauge, GaugeFields};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::gencomplex::{ComplexTwoFormJet, TwoFormSource};
use crate::patch::{
    christoffels, covariant_deriv_endo, d2, metric_sharp_flat, nijenhuis, Christoffels, EndoField,
    JetMat, MetricField, MetricPair, Patch, ThreeForm, TwoFormField,
};
use crate::residual::{sweep, Check, Outcome};
use crate::tol::Tolerances;

/// `(g, b, J₊, J₋)` on a patch, with a declared orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub patch: Patch,
    pub g: MetricField,
    pub b: TwoFormField,
    pub jplus: EndoField,
    pub jminus: EndoField,
    pub orientation: i8,
}

/// Which of the pair `J₊ ± J₋`, `ε±`, `K±` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn s(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// All fields of a quadruple evaluated as jets at one point.
#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub point: Vec<f64>,
    pub metric: MetricPair,
    pub b: JetMat,
    pub jp: JetMat,
    pub jm: JetMat,
    pub gamma: Christoffels,
}

impl Quadruple {
    pub fn dim(&self) -> usize {
        self.patch.dim
    }

    pub fn at(&self, p: &[f64]) -> Result<QuadPoint> {
        let metric = metric_sharp_flat(&self.g, p)?;
        let gamma = christoffels(&metric);
        Ok(QuadPoint {
            point: p.to_vec(),
            metric,
            b: self.b.0.eval_jet(p)?,
            jp: self.jplus.0.eval_jet(p)?,
            jm: self.jminus.0.eval_jet(p)?,
            gamma,
        })
    }

    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        self.patch.sample_points()
    }
}

impl QuadPoint {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.metric.g.val
    }

    pub fn j(&self, s: Sign) -> &JetMat {
        match s {
            Sign::Plus => &self.jp,
            Sign::Minus => &self.jm,
        }
    }

    /// `J₊ + s J₋`.
    pub fn j_combo(&self, s: Sign) -> JetMat {
        match s {
            Sign::Plus => &self.jp + &self.jm,
            Sign::Minus => &self.jp - &self.jm,
        }
    }

    /// `Σ = J₊J₋ + J₋J₊`.
    pub fn sigma(&self) -> JetMat {
        &self.jp * &self.jm + &self.jm * &self.jp
    }

    /// `a = −tr(J₊J₋)/n`.
    pub fn a(&self) -> Jet {
        (&self.jp * &self.jm).trace().scale(-1.0 / self.dim() as f64)
    }

    /// `g` composed with an endomorphism: `(gA)(X, Y) = g(X, AY)`.
    pub fn g_times(&self, a: &JetMat) -> JetMat {
        &self.metric.g * a
    }

    /// `h = db`.
    pub fn h(&self) -> ThreeForm {
        d2(&self.b)
    }

    /// `(J₊ ∓ J₋)⁻¹`, the inverse used by `ε±`.
    pub fn inverse_combo(&self, s: Sign) -> Result<JetMat> {
        let what = match s {
            Sign::Plus => "J+ - J- (a = 1 locus)",
            Sign::Minus => "J+ + J- (a = -1 locus)",
        };
        self.j_combo(s.flip()).inverse(what, &self.point)
    }

    /// `ε± = b + g(J₊±J₋)(J₊∓J₋)⁻¹ + 2i g(J₊∓J₋)⁻¹`.
    pub fn epsilon(&self, s: Sign) -> Result<ComplexTwoFormJet> {
        self.epsilon_with_b(s, &self.b)
    }

    pub fn epsilon_with_b(&self, s: Sign, b: &JetMat) -> Result<ComplexTwoFormJet> {
        let inv = self.inverse_combo(s)?;
        let im = self.g_times(&inv).scale(2.0);
        let re = b + &(self.g_times(&self.j_combo(s)) * &inv);
        Ok(ComplexTwoFormJet { re, im })
    }
}

/// `ε±` of a quadruple as a field.
pub struct EpsilonSource<'a> {
    pub quad: &'a Quadruple,
    pub sign: Sign,
}

impl TwoFormSource for EpsilonSource<'_> {
    fn eval(&self, p: &[f64]) -> Result<ComplexTwoFormJet> {
        self.quad.at(p)?.epsilon(self.sign)
    }
}

/// Pointwise `Σ` data.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaData {
    pub sigma: DMatrix<f64>,
    pub a: f64,
    /// `‖Σ + 2a Id‖_max`; small exactly in the scalar regime.
    pub scalar_defect: f64,
    pub scalar: bool,
}

pub fn sigma_and_a(qp: &QuadPoint, tol: f64) -> SigmaData {
    let n = qp.dim();
    let sigma = qp.sigma().val;
    let a = qp.a().value;
    let scalar_defect = (&sigma + DMatrix::identity(n, n) * (2.0 * a)).amax();
    SigmaData {
        sigma,
        a,
        scalar_defect,
        scalar: scalar_defect < tol,
    }
}

/// `J² + Id`, `JᵀgJ − g`, `b + bᵀ`, `g − gᵀ` at one point.
fn structure_defects(qp: &QuadPoint) -> [f64; 6] {
    let n = qp.dim();
    let g = qp.g();
    let id = DMatrix::<f64>::identity(n, n);
    let sq = |j: &DMatrix<f64>| (j * j + &id).amax();
    let herm = |j: &DMatrix<f64>| (j.transpose() * g * j - g).amax();
    [
        sq(&qp.jp.val),
        sq(&qp.jm.val),
        herm(&qp.jp.val),
        herm(&qp.jm.val),
        (&qp.b.val + qp.b.val.transpose()).amax(),
        (g - g.transpose()).amax(),
    ]
}

const STRUCTURE_CHECKS: [(&str, &str); 6] = [
    ("validate.jplus_squared", "J+^2 = -Id"),
    ("validate.jminus_squared", "J-^2 = -Id"),
    ("validate.jplus_hermitian", "g(J+X, J+Y) = g(X, Y)"),
    ("validate.jminus_hermitian", "g(J-X, J-Y) = g(X, Y)"),
    ("validate.b_antisymmetric", "b(X, Y) = -b(Y, X)"),
    ("validate.g_symmetric", "g(X, Y) = g(Y, X)"),
];

/// Almost-Hermitian invariants of the quadruple, plus the `Σ` invariants.
pub fn validate_quadruple(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<Outcome> {
    let rs = sweep(points, 8, |p| {
        let qp = q.at(p)?;
        let mut v = structure_defects(&qp).to_vec();
        let gs = qp.g() * qp.sigma().val;
        v.push((&gs - gs.transpose()).amax());
        // eigenvalues of Σ in a g-orthonormal frame
        let l = qp.g().clone().cholesky().ok_or(Error::NotPositiveDefinite { point: p.to_vec() })?.l();
        let s = l.transpose() * qp.sigma().val * l.clone().try_inverse().expect("triangular with positive diagonal").transpose();
        let s = (&s + s.transpose()) * 0.5;
        let over = s.symmetric_eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs() - 2.0));
        v.push(over.max(0.0));
        Ok(v)
    })?;
    let mut out = Outcome::default();
    for ((name, reference), r) in STRUCTURE_CHECKS.iter().zip(&rs) {
        out.push(Check::new(name, reference, r.clone(), tol.algebraic));
    }
    out.push(Check::new("validate.sigma_g_symmetric", "g(Sigma X, Y) = g(X, Sigma Y)", rs[6].clone(), tol.algebraic));
    out.push(Check::new("validate.sigma_spectrum", "eigenvalues of J+J- + J-J+ lie in [-2, 2]", rs[7].clone(), tol.algebraic));
    Ok(out)
}

/// Fail fast on the first structural defect over `points`.
pub fn validate_at_load(q: &Quadruple, points: &[Vec<f64>], tol: f64) -> Result<()> {
    for p in points {
        let qp = q.at(p)?;
        for ((name, _), v) in STRUCTURE_CHECKS.iter().zip(structure_defects(&qp)) {
            if !(v <= tol) {
                return Err(Error::Validation {
                    check: name.to_string(),
                    residual: v,
                    point: p.clone(),
                });
            }
        }
    }
    Ok(())
}

/// `g((∇_i J)e_j, e_k)` stored at `[i][(k, j)]`.
pub fn nabla_lowered(qp: &QuadPoint, j: &JetMat) -> Vec<DMatrix<f64>> {
    covariant_deriv_endo(j, &qp.gamma)
        .into_iter()
        .map(|m| qp.g() * m)
        .collect()
}

/// Max over coordinate triples of
/// `g((∇_X J±)Y, Z) ± ½[h(X, J±Y, Z) + h(X, Y, J±Z)]`.
pub fn parallel_defect(qp: &QuadPoint, s: Sign, h: &ThreeForm) -> f64 {
    let n = qp.dim();
    let j = &qp.j(s).val;
    let id = DMatrix::identity(n, n);
    let t = nabla_lowered(qp, qp.j(s));
    let h1 = h.pullback(&id, j, &id);
    let h2 = h.pullback(&id, &id, j);
    let mut m = 0.0f64;
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                let lhs = t[i][(k, jj)];
                let rhs = -0.5 * s.s() * (h1.get(i, jj, k) + h2.get(i, jj, k));
                m = m.max((lhs - rhs).abs());
            }
        }
    }
    m
}

pub const REF_PARALLEL: &str =
    "g((nabla_X J±)(Y), Z) = ∓1/2 [db(X, J±Y, Z) + db(X, Y, J±Z)]";

/// Nijenhuis tensors of `J±` and the parallelism condition for `∇±`.
pub fn gk_integrability_residual(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<Outcome> {
    let rs = sweep(points, 5, |p| {
        let qp = q.at(p)?;
        let h = qp.h();
        let nij = |j: &JetMat| -> Result<f64> {
            Ok(nijenhuis(j, p, tol.algebraic.max(1e-9))?
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs())))
        };
        Ok(vec![
            nij(&qp.jp)?,
            nij(&qp.jm)?,
            parallel_defect(&qp, Sign::Plus, &h),
            parallel_defect(&qp, Sign::Minus, &h),
            h.max_abs(),
        ])
    })?;
    let mut out = Outcome::default();
    out.push(Check::new("gk.nijenhuis_plus", "N_{J+} = 0", rs[0].clone(), tol.derivative));
    out.push(Check::new("gk.nijenhuis_minus", "N_{J-} = 0", rs[1].clone(), tol.derivative));
    out.push(Check::new("gk.parallel_plus", REF_PARALLEL, rs[2].clone(), tol.derivative));
    out.push(Check::new("gk.parallel_minus", REF_PARALLEL, rs[3].clone(), tol.derivative));
    out.push(
        Check::new("gk.db_norm", "h = db (max coefficient)", rs[4].clone(), tol.derivative).informational(),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::zoo;

    fn quad(name: &str, params: &[(&str, f64)]) -> Quadruple {
        let p = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        zoo::generate(name, &p).unwrap().quadruple().unwrap()
    }

    #[test]
    fn sigma_examples() {
        let q = quad("Z1", &[("alpha", 0.0), ("beta", 1.0), ("gamma", 0.0)]);
        let qp = q.at(&q.patch.center()).unwrap();
        let s = sigma_and_a(&qp, 1e-12);
        assert!(s.scalar && s.a.abs() < 1e-15 && s.sigma.amax() < 1e-15);
        let q = quad("Z1", &[("alpha", 0.36), ("beta", 0.48), ("gamma", 0.8)]);
        let s = sigma_and_a(&q.at(&q.patch.center()).unwrap(), 1e-12);
        assert!((s.a - 0.36).abs() < 1e-14 && s.scalar);
        let q = quad("Z1", &[("alpha", 1.0), ("beta", 0.0), ("gamma", 0.0)]);
        let s = sigma_and_a(&q.at(&q.patch.center()).unwrap(), 1e-12);
        assert!((s.a - 1.0).abs() < 1e-15);
        assert!((s.sigma + DMatrix::identity(4, 4) * 2.0).amax() < 1e-15);
    }

    #[test]
    fn epsilon_on_z1_with_a_zero() {
        let q = quad("Z1", &[("alpha", 0.0), ("beta", 1.0), ("gamma", 0.0)]);
        let qp = q.at(&q.patch.center()).unwrap();
        let e = qp.epsilon(Sign::Plus).unwrap();
        // Im ε₊ = −g(I − J)
        let expected = -(&qp.jp.val - &qp.jm.val);
        assert!((&e.im.val - expected).amax() < 1e-14);
        let a = qp.a().value;
        for s in Sign::BOTH {
            let e = qp.epsilon(s).unwrap();
            let lhs = &e.im.val * (-2.0 + 2.0 * s.s() * a);
            let rhs = qp.g() * qp.j_combo(s.flip()).val * 2.0;
            assert!((lhs - rhs).amax() < 1e-12);
        }
    }

    #[test]
    fn validation_flags_broken_data() {
        let q = quad("Z1", &[("alpha", 0.6), ("beta", 0.8), ("gamma", 0.0)]);
        let pts = q.patch.pre_grid();
        let ok = validate_quadruple(&q, &pts, &Tolerances::default()).unwrap();
        assert!(ok.all_gating_pass());
        assert!(ok.checks.iter().all(|c| c.residual.max < 1e-12));

        // conjugate J₊ by diag(2,1,1,1): still J² = −Id but not orthogonal
        let mut bad = q.clone();
        let j = q.jplus.0.eval(&pts[0]).unwrap();
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0, 1.0, 1.0]));
        let jc = &s * j * s.clone().try_inverse().unwrap();
        bad.jplus = EndoField(crate::patch::ExprMatrix::from_constant(&jc));
        let r = validate_quadruple(&bad, &pts, &Tolerances::default()).unwrap();
        let herm = r.check("validate.jplus_hermitian").unwrap();
        assert!(herm.residual.max > 0.1 && !herm.pass());
        assert!(r.check("validate.jplus_squared").unwrap().pass());
        assert!(matches!(
            validate_at_load(&bad, &pts, 1e-10),
            Err(Error::Validation { .. })
        ));

        let mut sym = q.clone();
        let mut b = DMatrix::zeros(4, 4);
        b[(0, 1)] = 1.0;
        b[(1, 0)] = 1.0;
        sym.b = TwoFormField(crate::patch::ExprMatrix::from_constant(&b));
        let r = validate_quadruple(&sym, &pts, &Tolerances::default()).unwrap();
        assert!(!r.check("validate.b_antisymmetric").unwrap().pass());
    }

    #[test]
    fn gk_residuals() {
        let tol = Tolerances::default();
        let q = quad("Z1", &[("alpha", 0.6), ("beta", 0.8), ("gamma", 0.0)]);
        let r = gk_integrability_residual(&q, &q.patch.pre_grid(), &tol).unwrap();
        assert!(r.checks.iter().all(|c| c.residual.max < 1e-12));
        let q = quad("Z2", &[]);
        let r = gk_integrability_residual(&q, &q.patch.pre_grid(), &tol).unwrap();
        assert!(r.all_gating_pass(), "{r:?}");
        let q = quad("Z4", &[]);
        let r = gk_integrability_residual(&q, &q.patch.pre_grid(), &tol).unwrap();
        assert!(r.check("gk.parallel_plus").unwrap().residual.max > 1e-2);
        assert!((r.check("gk.db_norm").unwrap().residual.max - 1.0).abs() < 1e-12);
    }
}
