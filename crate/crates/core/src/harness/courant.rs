//! Dirac-structure checks for `ε±` and brackets of user-supplied sections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bihermitian::{EpsilonSource, Quadruple, Sign};
use crate::error::{Error, Result};
use crate::expr::{Jet, Params};
use crate::gencomplex::{
    courant_bracket, dirac_from_epsilon, dirac_integrability_residual, epsilon_frame_section,
    GeneralizedSection,
};
use crate::residual::{sweep, Check, Outcome};
use crate::tol::Tolerances;

/// Random polynomial `c₀ + Σ c_l x_l + c_q x_m x_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeff {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: (f64, usize, usize),
}

impl PolyCoeff {
    pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        PolyCoeff {
            constant: rng.gen_range(0.5..1.5),
            linear: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            quadratic: (rng.gen_range(-1.0..1.0), rng.gen_range(0..n), rng.gen_range(0..n)),
        }
    }

    pub fn eval(&self, p: &[f64]) -> Jet {
        let (c, m, r) = self.quadratic;
        let value = self.constant + self.linear.iter().zip(p).map(|(a, x)| a * x).sum::<f64>() + c * p[m] * p[r];
        let mut grad = self.linear.clone();
        grad[m] += c * p[r];
        grad[r] += c * p[m];
        Jet::new(value, grad)
    }
}

/// Frame-section pair `(f·(∂_i + ι_i ε), h·(∂_j + ι_j ε))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePair {
    pub i: usize,
    pub j: usize,
    pub f: PolyCoeff,
    pub h: PolyCoeff,
}

pub fn random_frame_pairs(seed: u64, n: usize, count: usize) -> Vec<FramePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| FramePair {
            i: rng.gen_range(0..n),
            j: rng.gen_range(0..n),
            f: PolyCoeff::random(&mut rng, n),
            h: PolyCoeff::random(&mut rng, n),
        })
        .collect()
}

const PAIRS: usize = 10;

fn epsilon_available(q: &Quadruple, s: Sign, points: &[Vec<f64>]) -> Result<bool> {
    for p in points {
        match q.at(p)?.epsilon(s) {
            Ok(_) => {}
            Err(Error::Singular { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Isotropy, `dε = 0`, and closure of `L(T^ℂM, ε±)` under the Courant
/// bracket of random frame-section pairs.
pub fn courant_suite(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances, seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let n = q.dim();
    let pairs = random_frame_pairs(seed, n, PAIRS);
    out.note(format!("Courant closure uses {PAIRS} seeded frame-section pairs f (e_i + i_{{e_i}} eps), h (e_j + i_{{e_j}} eps) with random polynomial f, h"));
    for s in Sign::BOTH {
        let sym = if s == Sign::Plus { "plus" } else { "minus" };
        if !epsilon_available(q, s, points)? {
            for c in ["isotropy", "closed", "closure"] {
                out.skip(&format!("courant.{c}_{sym}"), "eps is undefined where J+ -/+ J- is singular");
            }
            continue;
        }
        let rs = sweep(points, 2, |p| {
            let eps = q.at(p)?.epsilon(s)?;
            let dirac = dirac_from_epsilon(&eps.value());
            let mut worst = 0.0f64;
            for fp in &pairs {
                let u = epsilon_frame_section(&eps, fp.i, &fp.f.eval(p));
                let v = epsilon_frame_section(&eps, fp.j, &fp.h.eval(p));
                worst = worst.max(dirac.transverse_component(&courant_bracket(&u, &v))?);
            }
            Ok(vec![dirac.isotropy_residual(), worst])
        })?;
        let closed = dirac_integrability_residual(&EpsilonSource { quad: q, sign: s }, points)?;
        out.push(Check::new(&format!("courant.isotropy_{sym}"), "<e_i + i_{e_i} eps, e_j + i_{e_j} eps> = 0", rs[0].clone(), tol.algebraic));
        out.push(Check::new(&format!("courant.closed_{sym}"), "d eps = 0 (L(T^C M, eps) integrable)", closed, tol.derivative));
        out.push(Check::new(&format!("courant.closure_{sym}"), "[L, L] in L for L = L(T^C M, eps)", rs[1].clone(), tol.derivative));
    }
    Ok(out)
}

/// One section in a sections file; imaginary parts are optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SectionText {
    pub vector: Vec<String>,
    pub form: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_im: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_im: Option<Vec<String>>,
}

impl SectionText {
    pub fn parse(&self, coords: &[String], params: &Params) -> Result<GeneralizedSection> {
        let mut s = GeneralizedSection::parse_real(&self.vector, &self.form, coords, params)?;
        let parse = |t: &Option<Vec<String>>, what: &str| {
            t.as_ref()
                .map(|v| crate::patch::ExprVector::parse(v, coords, params, what))
                .transpose()
        };
        s.vector_im = parse(&self.vector_im, "section vector (imaginary part)")?;
        s.form_im = parse(&self.form_im, "section form (imaginary part)")?;
        Ok(s)
    }
}

/// Contents of a sections file: a list of pairs.
pub type SectionsFile = Vec<[SectionText; 2]>;

/// Courant bracket of one section pair at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BracketRecord {
    pub pair: usize,
    pub point: Vec<f64>,
    pub vector_re: Vec<f64>,
    pub vector_im: Vec<f64>,
    pub form_re: Vec<f64>,
    pub form_im: Vec<f64>,
}

/// Brackets of user sections at the patch centre, and for each sign whose
/// `ε` is defined, membership of the sections in `L(T^ℂM, ε)` and of their
/// bracket. Closure gates only when both sections lie in `L`.
pub fn sections_suite(
    q: &Quadruple,
    pairs: &[(GeneralizedSection, GeneralizedSection)],
    points: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<(Outcome, Vec<BracketRecord>)> {
    let mut out = Outcome::default();
    let centre = q.patch.center();
    let mut brackets = Vec::with_capacity(pairs.len());
    for (k, (u, v)) in pairs.iter().enumerate() {
        let b = courant_bracket(&u.eval(&centre)?, &v.eval(&centre)?);
        brackets.push(BracketRecord {
            pair: k,
            point: centre.clone(),
            vector_re: b.vector.iter().map(|z| z.re).collect(),
            vector_im: b.vector.iter().map(|z| z.im).collect(),
            form_re: b.form.iter().map(|z| z.re).collect(),
            form_im: b.form.iter().map(|z| z.im).collect(),
        });
    }
    for s in Sign::BOTH {
        let sym = if s == Sign::Plus { "plus" } else { "minus" };
        if !epsilon_available(q, s, points)? {
            out.skip(&format!("courant.sections_{sym}"), "eps is undefined where J+ -/+ J- is singular");
            continue;
        }
        for (k, (u, v)) in pairs.iter().enumerate() {
            let rs = sweep(points, 2, |p| {
                let eps = q.at(p)?.epsilon(s)?;
                let dirac = dirac_from_epsilon(&eps.value());
                let (uj, vj) = (u.eval(p)?, v.eval(p)?);
                let member = |w: &crate::gencomplex::ComplexSectionJet| -> Result<f64> {
                    let g = crate::gencomplex::GeneralizedVector {
                        vector: w.re.vector.iter().zip(&w.im.vector).map(|(a, b)| num_complex::Complex64::new(a.value, b.value)).collect(),
                        form: w.re.form.iter().zip(&w.im.form).map(|(a, b)| num_complex::Complex64::new(a.value, b.value)).collect(),
                    };
                    dirac.transverse_component(&g)
                };
                Ok(vec![
                    member(&uj)?.max(member(&vj)?),
                    dirac.transverse_component(&courant_bracket(&uj, &vj))?,
                ])
            })?;
            let in_l = rs[0].below(tol.algebraic);
            out.push(
                Check::new(&format!("courant.sections[{k}].membership_{sym}"), "u, v in L(T^C M, eps)", rs[0].clone(), tol.algebraic)
                    .informational(),
            );
            let c = Check::new(&format!("courant.sections[{k}].closure_{sym}"), "[u, v] in L for u, v in L = L(T^C M, eps)", rs[1].clone(), tol.derivative);
            out.push(if in_l { c } else { c.informational() });
        }
    }
    if pairs.is_empty() {
        out.note("the sections file contains no pairs");
    }
    Ok((out, brackets))
}
