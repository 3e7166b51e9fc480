//! Residuals of the identities satisfied by a generalized Kähler quadruple,
//! from the algebraic description of `ε±` through the gradient constraint on
//! `a`.

use nalgebra::{DMatrix, DVector};

use super::{QuadPoint, Quadruple, Sign};
use crate::error::Result;
use crate::expr::Jet;
use crate::patch::{d2, least_squares, wedge_12, JetMat, ThreeForm};
use crate::residual::{sweep, Check, Outcome};
use crate::tol::Tolerances;

/// Smallest singular value below which `J₊ ± J₋` is treated as singular.
const SINGULAR_TOL: f64 = 1e-8;

/// Fields of the gauge `Re ε₋ = 0` at a point.
#[derive(Debug, Clone)]
pub struct GaugeFields {
    /// `b = −g(J₊−J₋)(J₊+J₋)⁻¹`.
    pub b: JetMat,
    /// `Re ε₊ = g[(J₊+J₋)(J₊−J₋)⁻¹ − (J₊−J₋)(J₊+J₋)⁻¹]`.
    pub re_eps_plus: JetMat,
}

impl QuadPoint {
    pub fn gauge(&self) -> Result<GaugeFields> {
        let inv_p = self.inverse_combo(Sign::Plus)?;
        let inv_m = self.inverse_combo(Sign::Minus)?;
        let sum = self.j_combo(Sign::Plus);
        let diff = self.j_combo(Sign::Minus);
        let down = self.g_times(&(&diff * &inv_m));
        let up = self.g_times(&(&sum * &inv_p));
        Ok(GaugeFields {
            b: -&down,
            re_eps_plus: &up - &down,
        })
    }

    /// `K± = (J₊ ± J₋)/√(2(1 ± a))`.
    pub fn k(&self, s: Sign) -> JetMat {
        let a = self.a();
        let f = a.chain(2.0 * (1.0 + s.s() * a.value), 2.0 * s.s()).powf(-0.5);
        self.j_combo(s).scale_jet(&f)
    }
}

/// Which preconditions hold over the whole point set.
#[derive(Debug, Clone, Copy)]
struct Regime {
    scalar: bool,
    /// `J₊ − J₋` invertible (needed by `ε₊`).
    inv_plus: bool,
    /// `J₊ + J₋` invertible (needed by `ε₋`).
    inv_minus: bool,
    a_interior: bool,
}

fn min_singular(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, b| a.min(*b))
}

fn regime(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<Regime> {
    let mut r = Regime {
        scalar: true,
        inv_plus: true,
        inv_minus: true,
        a_interior: true,
    };
    for p in points {
        let qp = q.at(p)?;
        let s = super::sigma_and_a(&qp, tol.algebraic);
        r.scalar &= s.scalar;
        r.a_interior &= s.a.abs() < 1.0 - tol.a_margin;
        r.inv_plus &= min_singular(&qp.j_combo(Sign::Minus).val) > SINGULAR_TOL;
        r.inv_minus &= min_singular(&qp.j_combo(Sign::Plus).val) > SINGULAR_TOL;
    }
    Ok(r)
}

fn max3(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> f64 {
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = f(i, j, k).abs();
                if v > m || v.is_nan() {
                    m = v;
                }
            }
        }
    }
    m
}

struct Frame {
    n: usize,
    g: DMatrix<f64>,
    a: Jet,
    da: Vec<f64>,
    /// `w = da∧b` with `b` in the gauge `Re ε₋ = 0`.
    w: ThreeForm,
}

impl Frame {
    /// `ρ(X)(a)` for `X = e_i`, i.e. `(ρᵀ da)_i`.
    fn da_of(&self, k: &DMatrix<f64>) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|l| self.da[l] * k[(l, i)]).sum())
            .collect()
    }

    fn ratio(&self) -> f64 {
        let a = self.a.value;
        (1.0 - a) / (1.0 + a)
    }
}

/// `g((∇_X J±)Y, Z) = ±1/(2(1−a)) (da∧b)(X, J±Y, Z) + (X, Y, J±Z)`.
fn eq_nabla_j(fr: &Frame, qp: &QuadPoint, s: Sign) -> f64 {
    let n = fr.n;
    let j = &qp.j(s).val;
    let id = DMatrix::identity(n, n);
    let t = super::nabla_lowered(qp, qp.j(s));
    let w1 = fr.w.pullback(&id, j, &id);
    let w2 = fr.w.pullback(&id, &id, j);
    let c = s.s() / (2.0 * (1.0 - fr.a.value));
    max3(n, |i, jj, k| t[i][(k, jj)] - c * (w1.get(i, jj, k) + w2.get(i, jj, k)))
}

/// The covariant derivative of `K±`.
fn eq_nabla_k(fr: &Frame, qp: &QuadPoint, s: Sign, kj: &JetMat, kother: &DMatrix<f64>) -> f64 {
    let n = fr.n;
    let a = fr.a.value;
    let id = DMatrix::identity(n, n);
    let t = super::nabla_lowered(qp, kj);
    let gk = &fr.g * &kj.val;
    let w1 = fr.w.pullback(&id, kother, &id);
    let w2 = fr.w.pullback(&id, &id, kother);
    let c1 = -s.s() / (2.0 * (1.0 + s.s() * a));
    let c2 = fr.ratio().powf(0.5 * s.s()) / (2.0 * (1.0 - a));
    max3(n, |i, j, k| {
        let rhs = c1 * fr.da[i] * gk[(k, j)] + c2 * (w1.get(i, j, k) + w2.get(i, j, k));
        t[i][(k, j)] - rhs
    })
}

/// The `(1,2)`-symplectic condition for `(e^{2f±} g, K±)`.
fn eq_symplectic(fr: &Frame, qp: &QuadPoint, s: Sign, kj: &JetMat) -> f64 {
    let n = fr.n;
    let k = &kj.val;
    let g = &fr.g;
    let t = super::nabla_lowered(qp, kj);
    let gk = g * k;
    let kda = fr.da_of(k);
    let c = s.s() / (2.0 * (1.0 + s.s() * fr.a.value));
    max3(n, |i, j, l| {
        let mut lhs = 0.0;
        for m in 0..n {
            lhs += k[(m, i)] * t[m][(l, j)] - t[i][(m, j)] * k[(m, l)];
        }
        let rhs = c
            * (kda[j] * gk[(l, i)] - kda[l] * gk[(j, i)] + fr.da[j] * g[(i, l)]
                - fr.da[l] * g[(i, j)]);
        lhs - rhs
    })
}

/// The combined constraint on `da` for one sign.
fn eq_a_b(fr: &Frame, s: Sign, kp: &DMatrix<f64>, km: &DMatrix<f64>) -> f64 {
    let n = fr.n;
    let g = &fr.g;
    let id = DMatrix::identity(n, n);
    let gk = g * kp;
    let kda = fr.da_of(kp);
    let mu = fr.ratio().powf(-0.5);
    let kmkp = km * kp;
    let w1 = fr.w.pullback(kp, km, &id);
    let w2 = fr.w.pullback(kp, &id, km);
    let w3 = fr.w.pullback(&id, km, kp);
    let w4 = fr.w.pullback(&id, &id, &kmkp);
    max3(n, |i, j, k| {
        let lhs = kda[i] * gk[(k, j)] + kda[j] * gk[(k, i)] - kda[k] * gk[(j, i)]
            - fr.da[i] * g[(j, k)]
            + fr.da[j] * g[(i, k)]
            - fr.da[k] * g[(i, j)];
        let rhs = s.s() * mu * (w1.get(i, j, k) + w2.get(i, j, k) - w3.get(i, j, k) - w4.get(i, j, k));
        lhs - rhs
    })
}

/// Residual tensor of the subtracted constraint, as `r[(i*n + j)*n + k]`.
fn subtracted_tensor(fr: &Frame, kp: &DMatrix<f64>, km: &DMatrix<f64>) -> Vec<f64> {
    let n = fr.n;
    let g = &fr.g;
    let id = DMatrix::identity(n, n);
    let gkp = g * kp;
    let gkm = g * km;
    let pda = fr.da_of(kp);
    let mda = fr.da_of(km);
    let mu = fr.ratio().powf(-0.5);
    let w = fr.w.pullback(kp, km, &id);
    let mut r = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = pda[i] * gkp[(k, j)] + pda[j] * gkp[(k, i)] - pda[k] * gkp[(j, i)]
                    + mda[i] * gkm[(k, j)]
                    + mda[j] * gkm[(k, i)]
                    + mda[k] * gkm[(j, i)]
                    - 2.0 * fr.da[k] * g[(i, j)];
                r[(i * n + j) * n + k] = lhs - 2.0 * mu * w.get(i, j, k);
            }
        }
    }
    r
}

/// Component of `grad a` orthogonal to `span{X, K₊X, K₋X, K₊K₋X}`, worst `X = e_i`.
fn gradient_off_quaternionic_lines(fr: &Frame, g_inv: &DMatrix<f64>, kp: &DMatrix<f64>, km: &DMatrix<f64>) -> f64 {
    let n = fr.n;
    let grad = g_inv * DVector::from_column_slice(&fr.da);
    let kk = kp * km;
    let mut worst = 0.0f64;
    for i in 0..n {
        let e = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        let q = DMatrix::from_columns(&[e.clone(), kp * &e, km * &e, &kk * &e]);
        let gram = q.transpose() * &fr.g * &q;
        let rhs = q.transpose() * &fr.g * &grad;
        let (coef, _) = least_squares(&gram, &rhs, 1e-12);
        let perp = &grad - &q * coef;
        worst = worst.max((perp.transpose() * &fr.g * &perp)[(0, 0)].max(0.0).sqrt());
    }
    worst
}

struct Slot {
    name: &'static str,
    reference: &'static str,
    derivative: bool,
    /// Holds without the scalar regime.
    general: bool,
    needs: Needs,
}

#[derive(Clone, Copy, PartialEq)]
enum Needs {
    EpsPlus,
    EpsMinus,
    Both,
    BothInterior,
    Interior,
}

const SLOTS: &[Slot] = &[
    Slot { name: "eps.im_plus", reference: "(Im eps+)(J+ - J-) = 2g", derivative: false, general: true, needs: Needs::EpsPlus },
    Slot { name: "eps.im_minus", reference: "(Im eps-)(J+ + J-) = 2g", derivative: false, general: true, needs: Needs::EpsMinus },
    Slot { name: "eps.re_plus", reference: "(Re eps+)(J+ - J-) = b(J+ - J-) + g(J+ + J-)", derivative: false, general: true, needs: Needs::EpsPlus },
    Slot { name: "eps.re_minus", reference: "(Re eps-)(J+ + J-) = b(J+ + J-) + g(J+ - J-)", derivative: false, general: true, needs: Needs::EpsMinus },
    Slot { name: "eps.scalar_im_plus", reference: "(-2 + 2a) Im eps+ = 2g(J+ - J-)", derivative: false, general: false, needs: Needs::EpsPlus },
    Slot { name: "eps.scalar_im_minus", reference: "(-2 - 2a) Im eps- = 2g(J+ + J-)", derivative: false, general: false, needs: Needs::EpsMinus },
    Slot { name: "eps.scalar_re_plus", reference: "(-2 + 2a) Re eps+ = (-2 + 2a) b - g(J+J- - J-J+)", derivative: false, general: false, needs: Needs::EpsPlus },
    Slot { name: "eps.scalar_re_minus", reference: "(-2 - 2a) Re eps- = (-2 - 2a) b + g(J+J- - J-J+)", derivative: false, general: false, needs: Needs::EpsMinus },
    Slot { name: "eps.b_relation", reference: "(a - 1) Re eps+ - (a + 1) Re eps- = -2b, read as Re eps+ (A - 1) - Re eps- (A + 1) = -2b with A = -(J+J- + J-J+)/2", derivative: false, general: true, needs: Needs::Both },
    Slot { name: "eps.closed_plus", reference: "d eps+ = 0", derivative: true, general: true, needs: Needs::EpsPlus },
    Slot { name: "eps.closed_minus", reference: "d eps- = 0", derivative: true, general: true, needs: Needs::EpsMinus },
    Slot { name: "identity.closed_plus", reference: "d[g(J+ + J-)/(1 + a)] = 0", derivative: true, general: false, needs: Needs::Interior },
    Slot { name: "identity.closed_minus", reference: "d[g(J+ - J-)/(1 - a)] = 0", derivative: true, general: false, needs: Needs::Interior },
    Slot { name: "identity.db", reference: "db = 1/(a - 1) da^b", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.nabla_j_plus", reference: "g((nabla_X J+)(Y), Z) = 1/(2(1 - a)) (da^b)(X^J+Y^Z + X^Y^J+Z)", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.nabla_j_minus", reference: "g((nabla_X J-)(Y), Z) = -1/(2(1 - a)) (da^b)(X^J-Y^Z + X^Y^J-Z)", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.k_algebra", reference: "K±^2 = -Id, K+K- + K-K+ = 0, K± = (J+ ± J-)/sqrt(2(1 ± a))", derivative: false, general: false, needs: Needs::Interior },
    Slot { name: "identity.nabla_k_plus", reference: "g((nabla_X K+)(Y), Z) = -X(a) g(K+Y, Z)/(2(1 + a)) + ((1 - a)/(1 + a))^(1/2) (da^b)(X^K-Y^Z + X^Y^K-Z)/(2(1 - a))", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.nabla_k_minus", reference: "g((nabla_X K-)(Y), Z) = X(a) g(K-Y, Z)/(2(1 - a)) + ((1 - a)/(1 + a))^(-1/2) (da^b)(X^K+Y^Z + X^Y^K+Z)/(2(1 - a))", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.symplectic_plus", reference: "g((nabla_{K+X} K+)Y, Z) - g((nabla_X K+)Y, K+Z) = [(K+Y)(a) g(K+X, Z) - (K+Z)(a) g(K+X, Y) + Y(a) g(X, Z) - Z(a) g(X, Y)]/(2(1 + a))", derivative: true, general: false, needs: Needs::Interior },
    Slot { name: "identity.symplectic_minus", reference: "g((nabla_{K-X} K-)Y, Z) - g((nabla_X K-)Y, K-Z) = -[(K-Y)(a) g(K-X, Z) - (K-Z)(a) g(K-X, Y) + Y(a) g(X, Z) - Z(a) g(X, Y)]/(2(1 - a))", derivative: true, general: false, needs: Needs::Interior },
    Slot { name: "identity.a_b_plus", reference: "(K+X)(a) g(K+Y, Z) + (K+Y)(a) g(K+X, Z) - (K+Z)(a) g(K+X, Y) - X(a) g(Y, Z) + Y(a) g(X, Z) - Z(a) g(X, Y) = ((1 - a)/(1 + a))^(-1/2) (da^b)(K+X^K-Y^Z + K+X^Y^K-Z - X^K-Y^K+Z - X^Y^K-K+Z)", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.a_b_minus", reference: "(K-X)(a) g(K-Y, Z) + (K-Y)(a) g(K-X, Z) - (K-Z)(a) g(K-X, Y) - X(a) g(Y, Z) + Y(a) g(X, Z) - Z(a) g(X, Y) = -((1 - a)/(1 + a))^(-1/2) (da^b)(K-X^K+Y^Z + K-X^Y^K+Z - X^K+Y^K-Z - X^Y^K+K-Z)", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.subtracted", reference: "sum over K± of (K±X)(a) g(K±Y, Z) + (K±Y)(a) g(K±X, Z) ∓ (K±Z)(a) g(K±X, Y), minus 2Z(a) g(X, Y) = 2((1 - a)/(1 + a))^(-1/2) (da^b)(K+X^K-Y^Z)", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.subtracted_z_kx", reference: "subtracted constraint with Z = K+X", derivative: true, general: false, needs: Needs::BothInterior },
    Slot { name: "identity.grad_a_quaternionic", reference: "grad a vanishes on the orthogonal complement of span{X, K+X, K-X, K+K-X}", derivative: true, general: false, needs: Needs::Interior },
];

fn eval_point(q: &Quadruple, p: &[f64], reg: Regime) -> Result<Vec<f64>> {
    let qp = q.at(p)?;
    let n = qp.dim();
    let g = qp.g().clone();
    let id = DMatrix::<f64>::identity(n, n);
    let a = qp.a();
    let av = a.value;
    let mut v = vec![0.0; SLOTS.len()];
    let eps_p = if reg.inv_plus { Some(qp.epsilon(Sign::Plus)?) } else { None };
    let eps_m = if reg.inv_minus { Some(qp.epsilon(Sign::Minus)?) } else { None };
    let bv = &qp.b.val;
    let comm = &qp.jp.val * &qp.jm.val - &qp.jm.val * &qp.jp.val;
    for (s, eps) in [(Sign::Plus, &eps_p), (Sign::Minus, &eps_m)] {
        let Some(e) = eps else { continue };
        let o = if s == Sign::Plus { 0 } else { 1 };
        let inv_side = qp.j_combo(s.flip()).val;
        let same = qp.j_combo(s).val;
        v[o] = (&e.im.val * &inv_side - &g * 2.0).amax();
        v[2 + o] = (&e.re.val * &inv_side - bv * &inv_side - &g * &same).amax();
        let f = -2.0 + 2.0 * s.s() * av;
        v[4 + o] = (&e.im.val * f - &g * &inv_side * 2.0).amax();
        v[6 + o] = (&e.re.val * f - (bv * f - &g * &comm * s.s())).amax();
        v[9 + o] = d2(&e.re).max_abs().hypot(d2(&e.im).max_abs());
    }
    if let (Some(ep), Some(em)) = (&eps_p, &eps_m) {
        // A = −Σ/2 commutes with J±, so the relation holds without a scalar Σ
        let op_a = qp.sigma().val * -0.5;
        v[8] = (&ep.re.val * (&op_a - &id) - &em.re.val * (&op_a + &id) + bv * 2.0).amax();
    }
    if !reg.a_interior {
        return Ok(v);
    }
    for s in Sign::BOTH {
        let f = a.chain(1.0 + s.s() * av, s.s()).recip();
        let form = qp.g_times(&qp.j_combo(s)).scale_jet(&f);
        v[11 + if s == Sign::Plus { 0 } else { 1 }] = d2(&form).max_abs();
    }
    let kp = qp.k(Sign::Plus);
    let km = qp.k(Sign::Minus);
    v[16] = [
        (&kp.val * &kp.val + &id).amax(),
        (&km.val * &km.val + &id).amax(),
        (&kp.val * &km.val + &km.val * &kp.val).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let mut fr = Frame {
        n,
        g: g.clone(),
        a: a.clone(),
        da: a.grad.clone(),
        w: ThreeForm::zeros(n),
    };
    v[19] = eq_symplectic(&fr, &qp, Sign::Plus, &kp);
    v[20] = eq_symplectic(&fr, &qp, Sign::Minus, &km);
    v[25] = gradient_off_quaternionic_lines(&fr, &qp.metric.g_inv.val, &kp.val, &km.val);
    if !(reg.inv_plus && reg.inv_minus) {
        return Ok(v);
    }
    let gauge = qp.gauge()?;
    fr.w = wedge_12(&fr.da, &gauge.b.val);
    let h = d2(&qp.b);
    v[13] = h.sub(&fr.w.scale(1.0 / (av - 1.0))).max_abs();
    v[14] = eq_nabla_j(&fr, &qp, Sign::Plus);
    v[15] = eq_nabla_j(&fr, &qp, Sign::Minus);
    v[17] = eq_nabla_k(&fr, &qp, Sign::Plus, &kp, &km.val);
    v[18] = eq_nabla_k(&fr, &qp, Sign::Minus, &km, &kp.val);
    v[21] = eq_a_b(&fr, Sign::Plus, &kp.val, &km.val);
    v[22] = eq_a_b(&fr, Sign::Minus, &km.val, &kp.val);
    let r = subtracted_tensor(&fr, &kp.val, &km.val);
    v[23] = r.iter().fold(0.0, |m, x| m.max(x.abs()));
    let mut slot = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| r[(i * n + j) * n + k] * kp.val[(k, i)]).sum();
            slot = slot.max(s.abs());
        }
    }
    v[24] = slot;
    Ok(v)
}

/// Every identity of the chain from `ε±` to the gradient constraint on `a`.
///
/// `a` is always `−tr(J₊J₋)/n`. Outside the scalar regime the identities
/// that assume `J₊J₋ + J₋J₊ = −2a` are still evaluated but do not gate.
pub fn identity_suite(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<Outcome> {
    let reg = regime(q, points, tol)?;
    let rs = sweep(points, SLOTS.len(), |p| eval_point(q, p, reg))?;
    let mut out = Outcome::default();
    if !reg.scalar {
        out.note("J+J- + J-J+ is not a multiple of the identity on the sample set; identities derived in the scalar regime are reported without gating");
    }
    for (slot, r) in SLOTS.iter().zip(rs) {
        let available = match slot.needs {
            Needs::EpsPlus => reg.inv_plus,
            Needs::EpsMinus => reg.inv_minus,
            Needs::Both => reg.inv_plus && reg.inv_minus,
            Needs::BothInterior => reg.inv_plus && reg.inv_minus && reg.a_interior,
            Needs::Interior => reg.a_interior,
        };
        if !available {
            let reason = match slot.needs {
                Needs::Interior => "|a| reaches 1 on the sample set",
                Needs::BothInterior if reg.inv_plus && reg.inv_minus => "|a| reaches 1 on the sample set",
                _ => "J+ - J- or J+ + J- is singular on the sample set",
            };
            out.skip(slot.name, reason);
            continue;
        }
        let t = if slot.derivative { tol.derivative } else { tol.algebraic };
        let c = Check::new(slot.name, slot.reference, r, t);
        out.push(if slot.general || reg.scalar { c } else { c.informational() });
    }
    Ok(out)
}

/// Gauge-normalized `b` and `Re ε₊` with the closedness of `Re ε₊`.
pub fn normalized_gauge(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<Outcome> {
    let reg = regime(q, points, tol)?;
    let mut out = Outcome::default();
    if !(reg.inv_plus && reg.inv_minus) {
        out.skip("gauge.re_eps_plus_closed", "J+ - J- or J+ + J- is singular on the sample set");
        out.skip("gauge.re_eps_minus_zero", "J+ - J- or J+ + J- is singular on the sample set");
        return Ok(out);
    }
    let rs = sweep(points, 3, |p| {
        let qp = q.at(p)?;
        let gf = qp.gauge()?;
        let closed = d2(&gf.re_eps_plus).max_abs();
        let em = qp.epsilon_with_b(Sign::Minus, &gf.b)?;
        let ep = qp.epsilon_with_b(Sign::Plus, &gf.b)?;
        Ok(vec![closed, em.re.max_abs(), (&ep.re.val - &gf.re_eps_plus.val).amax()])
    })?;
    out.note("the B-field gauge is fixed by Re eps- = 0");
    out.push(Check::new(
        "gauge.re_eps_plus_closed",
        "d Re eps+ = 0, Re eps+ = g[(J+ + J-)(J+ - J-)^-1 - (J+ - J-)(J+ + J-)^-1]",
        rs[0].clone(),
        tol.derivative,
    ));
    out.push(Check::new(
        "gauge.re_eps_minus_zero",
        "b = -g(J+ - J-)(J+ + J-)^-1 gives Re eps- = 0",
        rs[1].clone(),
        tol.algebraic,
    ));
    out.push(Check::new(
        "gauge.re_eps_plus_formula",
        "Re eps+ = b + g(J+ + J-)(J+ - J-)^-1 in the gauge",
        rs[2].clone(),
        tol.algebraic,
    ));
    Ok(out)
}
