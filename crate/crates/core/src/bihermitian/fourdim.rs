//! Four-dimensional relations between `db`, `da∧b` and `[J₊, J₋]`, and the
//! pointwise sampler used to test their equivalent forms.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Quadruple, Sign};
use crate::error::{Error, Result};
use crate::patch::{d2, hodge_star, least_squares, wedge_12, Form, ThreeForm};
use crate::residual::{sweep, Check, Outcome, Residual};
use crate::tol::Tolerances;

/// Pfaffian of a 4×4 antisymmetric matrix.
fn pfaffian4(w: &DMatrix<f64>) -> f64 {
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// Orientation induced by `J` on a 4-manifold: the sign of `ω∧ω` with
/// `ω = g(J·,·)` relative to `dx1∧dx2∧dx3∧dx4`.
pub fn orientation_of(j: &DMatrix<f64>, g: &DMatrix<f64>) -> i8 {
    let omega = j.transpose() * g;
    if pfaffian4(&omega) >= 0.0 {
        1
    } else {
        -1
    }
}

fn three(f: Form) -> ThreeForm {
    match f {
        Form::Three(t) => t,
        _ => unreachable!("Hodge star of a one-form in dimension four is a three-form"),
    }
}

fn one(f: Form) -> Vec<f64> {
    match f {
        Form::One(v) => v,
        _ => unreachable!("Hodge star of a three-form in dimension four is a one-form"),
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Pointwise 4D data `(g, J₊, J₋, da, b)` with an orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData4 {
    pub g: DMatrix<f64>,
    pub jp: DMatrix<f64>,
    pub jm: DMatrix<f64>,
    pub da: Vec<f64>,
    pub b: DMatrix<f64>,
    pub orientation: i8,
}

impl PointData4 {
    pub fn a(&self) -> f64 {
        -(&self.jp * &self.jm).trace() / 4.0
    }

    pub fn k(&self, s: Sign) -> DMatrix<f64> {
        let m = match s {
            Sign::Plus => &self.jp + &self.jm,
            Sign::Minus => &self.jp - &self.jm,
        };
        m / (2.0 * (1.0 + s.s() * self.a())).sqrt()
    }

    /// `K = K₊K₋`.
    pub fn kk(&self) -> DMatrix<f64> {
        self.k(Sign::Plus) * self.k(Sign::Minus)
    }

    /// An endomorphism acting on a one-form through the metric: `(A θ♯)♭`.
    pub fn on_form(&self, a: &DMatrix<f64>, theta: &[f64]) -> Vec<f64> {
        let gi = self.g.clone().try_inverse().expect("positive definite");
        let v = &self.g * a * gi * DVector::from_column_slice(theta);
        v.iter().copied().collect()
    }

    /// `du` with `u = log(1 − a)`.
    pub fn du(&self) -> Vec<f64> {
        let a = self.a();
        self.da.iter().map(|x| -x / (1.0 - a)).collect()
    }

    fn star1(&self, metric: &DMatrix<f64>, theta: Vec<f64>) -> Result<ThreeForm> {
        Ok(three(hodge_star(&Form::One(theta), metric, self.orientation)?))
    }

    /// `*(da∧b) − [J₊, J₋](da)/(2(1+a))`.
    pub fn star_relation(&self) -> Result<f64> {
        let lhs = one(hodge_star(&Form::Three(wedge_12(&self.da, &self.b)), &self.g, self.orientation)?);
        let c = &self.jp * &self.jm - &self.jm * &self.jp;
        let rhs: Vec<f64> = self.on_form(&c, &self.da).iter().map(|x| x / (2.0 * (1.0 + self.a()))).collect();
        Ok(max_diff(&lhs, &rhs))
    }

    /// `du∧b − σ *_m K du` with `m = ((1+a)/(1−a))^{e/2} g`.
    fn star_k_relation(&self, e: f64, sigma: f64) -> Result<f64> {
        let a = self.a();
        let metric = &self.g * ((1.0 + a) / (1.0 - a)).powf(0.5 * e);
        let du = self.du();
        let lhs = wedge_12(&du, &self.b);
        let rhs = self.star1(&metric, self.on_form(&self.kk(), &du))?.scale(sigma);
        Ok(lhs.sub(&rhs).max_abs())
    }

    /// `du∧b = −*_k K du`, `k = ((1+a)/(1−a))^{1/2} g`.
    pub fn printed_star_k(&self) -> Result<f64> {
        self.star_k_relation(1.0, -1.0)
    }

    /// `du∧b = *_k' K du`, `k' = ((1−a)/(1+a))^{1/2} g`; equivalent to
    /// the `*(da∧b)` relation.
    pub fn corrected_star_k(&self) -> Result<f64> {
        self.star_k_relation(-1.0, 1.0)
    }

    /// `*_k θ − s *_g θ` for `k = s g` on one-forms.
    pub fn conformal_star_defect(&self, s: f64, theta: &[f64]) -> Result<f64> {
        let a = self.star1(&(&self.g * s), theta.to_vec())?;
        let b = self.star1(&self.g, theta.to_vec())?.scale(s);
        Ok(a.sub(&b).max_abs())
    }

    /// `(v_E, v_F, f₁, f₂)` for `E = span{grad u, K grad u}`, `F = E^⊥`.
    ///
    /// Volume forms are taken for `k`, `E` is oriented by `(grad u, K grad u)`
    /// and `F` so that `v_E∧v_F` is positive. `f₁, f₂` are `k`-orthonormal
    /// covectors spanning `F*`.
    pub fn planes(&self) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>, Vec<f64>)> {
        let a = self.a();
        let k = &self.g * ((1.0 + a) / (1.0 - a)).sqrt();
        let gi = self.g.clone().try_inverse().expect("positive definite");
        let grad = &gi * DVector::from_vec(self.du());
        let knorm = |v: &DVector<f64>| (v.transpose() * &k * v)[(0, 0)].sqrt();
        let n0 = knorm(&grad);
        if !(n0 > 1e-12) {
            return Err(Error::Invalid("du vanishes".into()));
        }
        let e1 = &grad / n0;
        let e2 = self.kk() * &e1;
        let e2 = &e2 / knorm(&e2);
        // complete to a k-orthonormal basis by Gram-Schmidt on coordinate vectors
        let mut basis = vec![e1.clone(), e2.clone()];
        for i in 0..4 {
            if basis.len() == 4 {
                break;
            }
            let mut v = DVector::from_fn(4, |r, _| if r == i { 1.0 } else { 0.0 });
            for b in &basis {
                let c = (b.transpose() * &k * &v)[(0, 0)];
                v -= b * c;
            }
            let nv = knorm(&v);
            if nv > 1e-6 {
                basis.push(v / nv);
            }
        }
        let frame = DMatrix::from_columns(&basis);
        if (frame.determinant() > 0.0) != (self.orientation > 0) {
            let last = basis[3].clone();
            basis[3] = -last;
        }
        let flat = |v: &DVector<f64>| -> Vec<f64> { (&k * v).iter().copied().collect() };
        let w = |x: &[f64], y: &[f64]| DMatrix::from_fn(4, 4, |i, j| x[i] * y[j] - x[j] * y[i]);
        let (c1, c2, c3, c4) = (flat(&basis[0]), flat(&basis[1]), flat(&basis[2]), flat(&basis[3]));
        Ok((w(&c1, &c2), w(&c3, &c4), c3, c4))
    }

    /// `c v_E + v_F + du∧α` with `α = α₁ f₁ + α₂ f₂`.
    pub fn decomposed_b(&self, c: f64, alpha: [f64; 2]) -> Result<DMatrix<f64>> {
        let (ve, vf, f1, f2) = self.planes()?;
        let du = self.du();
        let al: Vec<f64> = (0..4).map(|i| alpha[0] * f1[i] + alpha[1] * f2[i]).collect();
        let dual = DMatrix::from_fn(4, 4, |i, j| du[i] * al[j] - du[j] * al[i]);
        Ok(ve * c + vf + dual)
    }

    /// Distance of `b` from the family `c v_E + v_F + du∧α`.
    pub fn decomposition_defect(&self) -> Result<f64> {
        let base = self.decomposed_b(0.0, [0.0, 0.0])?;
        let cols = [
            self.decomposed_b(1.0, [0.0, 0.0])? - &base,
            self.decomposed_b(0.0, [1.0, 0.0])? - &base,
            self.decomposed_b(0.0, [0.0, 1.0])? - &base,
        ];
        let upper = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        };
        let a = DMatrix::from_fn(6, 3, |r, c| upper(&cols[c])[r]);
        let rhs = DVector::from_vec(upper(&(&self.b - &base)));
        let (x, _) = least_squares(&a, &rhs, 1e-12);
        Ok((a * x - rhs).amax())
    }
}

/// How a synthetic data set chooses `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// `b = c v_E + v_F + du∧α` with random `c, α`.
    Decomposition,
    /// Entries of `b` uniform in `[-1, 1]`.
    Generic,
    /// `b` solving `*(da∧b) = [J₊,J₋](da)/(2(1+a))`, plus a random kernel element.
    StarRelation,
    /// `b` solving `du∧b = *_k' K du`, plus a random kernel element.
    CorrectedStarK,
}

pub type PointSample = PointData4;

/// Left multiplication by a quaternion `w + xi + yj + zk` on `ℝ⁴`.
pub fn quaternion_left(q: [f64; 4]) -> DMatrix<f64> {
    let [a, b, c, d] = q;
    DMatrix::from_row_slice(4, 4, &[a, -b, -c, -d, b, a, -d, c, c, d, a, -b, d, -c, b, a])
}

fn unit_imaginary(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.2 && n <= 1.0 {
            return [0.0, v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn antisym(v: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    let mut it = v.iter();
    for i in 0..4 {
        for j in i + 1..4 {
            let x = *it.next().expect("six entries");
            m[(i, j)] = x;
            m[(j, i)] = -x;
        }
    }
    m
}

/// Particular solution and kernel of a linear map on two-forms.
fn solve_two_form(f: impl Fn(&DMatrix<f64>) -> Result<Vec<f64>>) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>, f64)> {
    let f0 = f(&DMatrix::zeros(4, 4))?;
    let m = f0.len();
    let mut a = DMatrix::zeros(m, 6);
    for c in 0..6 {
        let mut e = [0.0; 6];
        e[c] = 1.0;
        let fc = f(&antisym(&e))?;
        for r in 0..m {
            a[(r, c)] = fc[r] - f0[r];
        }
    }
    let rhs = -DVector::from_vec(f0);
    let (x, kernel) = least_squares(&a, &rhs, 1e-12);
    let fit = (&a * &x - &rhs).amax();
    let kernel = kernel.iter().map(|v| antisym(v.as_slice())).collect();
    Ok((antisym(x.as_slice()), kernel, fit))
}

/// Seeded random pointwise data sets with positive orientation.
pub fn sample_pointwise(seed: u64, count: usize, kind: SampleKind) -> Result<Vec<PointSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let g = m.transpose() * &m + DMatrix::identity(4, 4) * 0.5;
        let l = g.clone().cholesky().expect("positive definite").l();
        let frame = l.transpose().try_inverse().expect("invertible");
        let frame_inv = l.transpose();
        let qp = unit_imaginary(&mut rng);
        let qm = unit_imaginary(&mut rng);
        let jp = &frame * quaternion_left(qp) * &frame_inv;
        let jm = &frame * quaternion_left(qm) * &frame_inv;
        let da: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut d = PointData4 {
            g,
            jp,
            jm,
            da,
            b: DMatrix::zeros(4, 4),
            orientation: 1,
        };
        let a = d.a();
        if a.abs() > 0.9 || d.da.iter().map(|x| x * x).sum::<f64>() < 0.01 {
            continue;
        }
        d.b = match kind {
            SampleKind::Generic => antisym(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()),
            SampleKind::Decomposition => {
                let c = rng.gen_range(-2.0..2.0);
                let al = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                d.decomposed_b(c, al)?
            }
            SampleKind::StarRelation | SampleKind::CorrectedStarK => {
                let probe = d.clone();
                let (b0, kernel, fit) = solve_two_form(|b| {
                    let mut t = probe.clone();
                    t.b = b.clone();
                    if kind == SampleKind::StarRelation {
                        let lhs = one(hodge_star(&Form::Three(wedge_12(&t.da, &t.b)), &t.g, 1)?);
                        let c = &t.jp * &t.jm - &t.jm * &t.jp;
                        let rhs = t.on_form(&c, &t.da);
                        Ok(lhs.iter().zip(&rhs).map(|(x, y)| x - y / (2.0 * (1.0 + a))).collect())
                    } else {
                        let metric = &t.g * ((1.0 - a) / (1.0 + a)).sqrt();
                        let du = t.du();
                        let lhs = wedge_12(&du, &t.b);
                        let rhs = t.star1(&metric, t.on_form(&t.kk(), &du))?;
                        Ok(lhs.sub(&rhs).data)
                    }
                })?;
                if fit > 1e-8 {
                    return Err(Error::Validation {
                        check: format!("pointwise construction {kind:?}"),
                        residual: fit,
                        point: vec![out.len() as f64],
                    });
                }
                let mut b = b0;
                for kb in kernel {
                    b += kb * rng.gen_range(-1.0..1.0);
                }
                b
            }
        };
        out.push(d);
    }
    Ok(out)
}

fn worst(samples: &[PointSample], f: impl Fn(&PointSample) -> Result<f64>) -> Result<Residual> {
    let mut r = Residual::default();
    for (i, s) in samples.iter().enumerate() {
        r.observe(f(s)?, &[i as f64]);
    }
    Ok(r)
}

/// Residuals of the pointwise equivalences on synthetic data; argmax points
/// are sample indices.
pub fn pointwise_equivalence(seed: u64, count: usize, tol: &Tolerances) -> Result<Outcome> {
    let mut out = Outcome::default();
    let dec = sample_pointwise(seed, count, SampleKind::Decomposition)?;
    out.push(Check::new(
        "fourdim.pointwise.decomposition",
        "b = c v_E + v_F + du^alpha implies du^b = -*_k K du",
        worst(&dec, PointData4::printed_star_k)?,
        tol.algebraic,
    ));
    let generic = sample_pointwise(seed.wrapping_add(1), count, SampleKind::Generic)?;
    let mut small = 0usize;
    for s in &generic {
        if s.printed_star_k()? <= 1e-3 {
            small += 1;
        }
    }
    let frac = small as f64 / count.max(1) as f64;
    out.push(Check::new(
        "fourdim.pointwise.generic_rejected",
        "fraction of generic b with |du^b + *_k K du| <= 1e-3",
        Residual::at(frac, &[]),
        0.01,
    ));
    let star = sample_pointwise(seed.wrapping_add(2), count, SampleKind::StarRelation)?;
    out.push(Check::new(
        "fourdim.pointwise.star_fit",
        "*(da^b) = [J+,J-](da)/(2(1+a)) (constructed)",
        worst(&star, PointData4::star_relation)?,
        tol.algebraic,
    ));
    out.push(Check::new(
        "fourdim.pointwise.star_implies_corrected",
        "*(da^b) = [J+,J-](da)/(2(1+a)) implies du^b = *_k' K du, k' = ((1-a)/(1+a))^(1/2) g",
        worst(&star, PointData4::corrected_star_k)?,
        tol.algebraic,
    ));
    out.push(
        Check::new(
            "fourdim.pointwise.star_implies_printed",
            "*(da^b) = [J+,J-](da)/(2(1+a)) implies du^b = -*_k K du, k = ((1+a)/(1-a))^(1/2) g",
            worst(&star, PointData4::printed_star_k)?,
            tol.algebraic,
        )
        .informational(),
    );
    let corr = sample_pointwise(seed.wrapping_add(3), count, SampleKind::CorrectedStarK)?;
    out.push(Check::new(
        "fourdim.pointwise.corrected_implies_star",
        "du^b = *_k' K du implies *(da^b) = [J+,J-](da)/(2(1+a))",
        worst(&corr, PointData4::star_relation)?,
        tol.algebraic,
    ));
    out.push(Check::new(
        "fourdim.pointwise.conformal_star",
        "*_{s g} = s *_g on one-forms in dimension four",
        worst(&dec, |s| {
            let theta: Vec<f64> = (0..4).map(|i| s.da[(i + 1) % 4]).collect();
            s.conformal_star_defect(0.5 + (s.a() + 1.0), &theta)
        })?,
        tol.algebraic,
    ));
    Ok(out)
}

/// Four-dimensional relations on the gauge `Re ε₋ = 0`, plus the pointwise
/// equivalences.
pub fn four_dim_suite(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances, pointwise: (u64, usize)) -> Result<Outcome> {
    if q.dim() != 4 {
        return Err(Error::Unsupported(format!("four-dimensional relations on a {}-dimensional patch", q.dim())));
    }
    for p in points {
        let qp = q.at(p)?;
        let op = orientation_of(&qp.jp.val, qp.g());
        let om = orientation_of(&qp.jm.val, qp.g());
        if op != om || op != q.orientation.signum() {
            return Err(Error::Invalid(format!(
                "orientation mismatch at {p:?}: J+ induces {op}, J- induces {om}, declared {}",
                q.orientation
            )));
        }
        let a = qp.a().value;
        if a.abs() >= 1.0 - tol.a_margin {
            return Err(Error::Invalid(format!("J+ and J- are not linearly independent at {p:?} (a = {a})")));
        }
    }
    let rs = sweep(points, 6, |p| {
        let qp = q.at(p)?;
        let gauge = qp.gauge()?;
        let a = qp.a();
        let db = d2(&gauge.b);
        let data = PointData4 {
            g: qp.g().clone(),
            jp: qp.jp.val.clone(),
            jm: qp.jm.val.clone(),
            da: a.grad.clone(),
            b: gauge.b.val.clone(),
            orientation: q.orientation,
        };
        let w = wedge_12(&data.da, &data.b);
        let r1 = db.add(&w.scale(1.0 / (1.0 - a.value))).max_abs();
        let r3 = db.sub(&wedge_12(&data.du(), &data.b)).max_abs();
        let dec = if data.du().iter().any(|x| x.abs() > 1e-8) {
            data.decomposition_defect()?
        } else {
            f64::NEG_INFINITY
        };
        Ok(vec![r1, data.star_relation()?, r3, data.printed_star_k()?, data.corrected_star_k()?, dec])
    })?;
    let mut out = Outcome::default();
    out.note("four-dimensional relations are evaluated in the gauge Re eps- = 0");
    out.push(Check::new("fourdim.db", "db = -1/(1-a) da^b", rs[0].clone(), tol.derivative));
    out.push(Check::new("fourdim.star", "*(da^b) = [J+,J-](da)/(2(1+a))", rs[1].clone(), tol.derivative));
    out.push(Check::new("fourdim.du_wedge_b", "db = du^b, u = log(1-a)", rs[2].clone(), tol.derivative));
    out.push(
        Check::new("fourdim.printed_star_k", "du^b = -*_k K du, k = ((1+a)/(1-a))^(1/2) g, K = K+K-", rs[3].clone(), tol.derivative)
            .informational(),
    );
    out.push(Check::new(
        "fourdim.corrected_star_k",
        "du^b = *_k' K du, k' = ((1-a)/(1+a))^(1/2) g, K = K+K-",
        rs[4].clone(),
        tol.derivative,
    ));
    if rs[5].max == f64::NEG_INFINITY {
        out.skip("fourdim.decomposition", "du vanishes at every sample point");
    } else {
        out.push(
            Check::new("fourdim.decomposition", "b = c v_E + v_F + du^alpha", rs[5].clone(), tol.derivative).informational(),
        );
    }
    let (seed, count) = pointwise;
    if count > 0 {
        out.extend(pointwise_equivalence(seed, count, tol)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_structures_share_orientation() {
        let g = DMatrix::identity(4, 4);
        for q in [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]] {
            assert_eq!(orientation_of(&quaternion_left(q), &g), 1);
        }
        let r = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
        let flipped = &r * quaternion_left([0.0, 1.0, 0.0, 0.0]) * &r;
        assert_eq!(orientation_of(&flipped, &g), -1);
    }

    #[test]
    fn samples_are_valid() {
        for s in sample_pointwise(5, 20, SampleKind::Decomposition).unwrap() {
            let id = DMatrix::<f64>::identity(4, 4);
            assert!((&s.jp * &s.jp + &id).amax() < 1e-12);
            assert!((s.jp.transpose() * &s.g * &s.jp - &s.g).amax() < 1e-12);
            assert_eq!(orientation_of(&s.jm, &s.g), 1);
            let kp = s.k(Sign::Plus);
            let km = s.k(Sign::Minus);
            assert!((&kp * &km + &km * &kp).amax() < 1e-12);
            assert!(s.decomposition_defect().unwrap() < 1e-12);
        }
    }

    #[test]
    fn pointwise_equivalences() {
        let r = pointwise_equivalence(11, 200, &Tolerances::default()).unwrap();
        for c in &r.checks {
            if c.gating {
                assert!(c.pass(), "{c:?}");
            } else {
                assert!(!c.pass(), "{c:?}");
            }
        }
    }
}
