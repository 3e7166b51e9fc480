//! Eigendistributions of `Σ = J₊J₋ + J₋J₊` and foliation residuals.
//!
//! `Σ` is diagonalized in a `g`-orthonormal frame and eigenvalues closer than
//! the cluster tolerance are merged into bands. Projector jets come from the
//! Lagrange polynomial `P_j = Π_{k≠j} (Σ − λ_k)/(λ_j − λ_k)` with eigenvalue
//! jets `∂λ_j = tr(P_j ∂Σ)/m_j`, so brackets and covariant derivatives of
//! band frames stay exact.

use nalgebra::DMatrix;

use crate::bihermitian::{gk_integrability_residual, QuadPoint, Quadruple, Sign};
use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::patch::{
    christoffels, covariant_deriv_endo, full_norm_3, lie_bracket, metric_sharp_flat, Christoffels,
    ExprMatrix, ExprVector, JetMat, MetricField, MetricPair,
};
use crate::residual::{sweep, Check, Outcome, Residual};
use crate::tol::Tolerances;

/// One eigenvalue cluster of `Σ` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    /// `a` with `Σ = −2a` on the band.
    pub a: f64,
    pub multiplicity: usize,
    pub projector: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    pub point: Vec<f64>,
    /// Sorted by increasing `a`.
    pub bands: Vec<Band>,
    pub cluster_tol: f64,
}

/// Clustered eigen-decomposition of `Σ` at one point.
pub fn spectral_split(qp: &QuadPoint, cluster_tol: f64) -> Result<EigenStructure> {
    let n = qp.dim();
    let p = &qp.point;
    let l = qp
        .g()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite { point: p.clone() })?
        .l();
    let l_inv_t = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular {
            what: "Cholesky factor".into(),
            point: p.clone(),
        })?
        .transpose();
    let sigma = qp.sigma().val;
    let s = l.transpose() * &sigma * &l_inv_t;
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    // sort by a = −λ/2 ascending, i.e. λ descending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(gr) => {
                let prev = eig.eigenvalues[*gr.last().expect("nonempty")];
                let gap = (prev - eig.eigenvalues[i]).abs();
                if gap <= cluster_tol {
                    gr.push(i);
                } else if gap <= 3.0 * cluster_tol {
                    return Err(Error::AmbiguousClustering { point: p.clone(), gap });
                } else {
                    groups.push(vec![i]);
                }
            }
            None => groups.push(vec![i]),
        }
    }
    let bands = groups
        .into_iter()
        .map(|gr| {
            let mut po = DMatrix::zeros(n, n);
            let mut lam = 0.0;
            for &i in &gr {
                let v = eig.eigenvectors.column(i);
                po += &v * v.transpose();
                lam += eig.eigenvalues[i];
            }
            lam /= gr.len() as f64;
            Band {
                a: -0.5 * lam,
                multiplicity: gr.len(),
                projector: &l_inv_t * po * l.transpose(),
            }
        })
        .collect();
    Ok(EigenStructure {
        point: p.clone(),
        bands,
        cluster_tol,
    })
}

/// Band count and multiplicities fixed on a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct BandLayout {
    /// `a`-values at the reference point.
    pub a_values: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl BandLayout {
    pub fn from_split(es: &EigenStructure) -> Self {
        BandLayout {
            a_values: es.bands.iter().map(|b| b.a).collect(),
            multiplicities: es.bands.iter().map(|b| b.multiplicity).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    /// Split at `qp` and require the same band structure.
    pub fn split_matching(&self, qp: &QuadPoint, cluster_tol: f64) -> Result<EigenStructure> {
        let es = spectral_split(qp, cluster_tol)?;
        let mults: Vec<usize> = es.bands.iter().map(|b| b.multiplicity).collect();
        if mults != self.multiplicities {
            return Err(Error::RankJump {
                what: format!("eigenbands of J+J- + J-J+ (multiplicities {:?})", self.multiplicities),
                expected: self.len(),
                found: mults.len(),
                point: qp.point.clone(),
            });
        }
        Ok(es)
    }
}

/// Band structure at the first sample point.
pub fn band_layout(q: &Quadruple, points: &[Vec<f64>], cluster_tol: f64) -> Result<BandLayout> {
    let first = points
        .first()
        .ok_or_else(|| Error::Invalid("empty sample set".into()))?;
    Ok(BandLayout::from_split(&spectral_split(&q.at(first)?, cluster_tol)?))
}

/// Projector jets of every band at a point, by Lagrange interpolation in `Σ`.
pub fn band_projector_jets(qp: &QuadPoint, es: &EigenStructure) -> Vec<JetMat> {
    let n = qp.dim();
    let sigma = qp.sigma();
    let lams: Vec<Jet> = es
        .bands
        .iter()
        .map(|b| {
            let m = b.multiplicity as f64;
            Jet::new(
                -2.0 * b.a,
                sigma.d.iter().map(|ds| (&b.projector * ds).trace() / m).collect(),
            )
        })
        .collect();
    (0..es.bands.len())
        .map(|j| {
            let mut p = JetMat::identity(n, n);
            for (k, lk) in lams.iter().enumerate() {
                if k == j {
                    continue;
                }
                let factor = sigma.add_identity(&-lk).scale_jet(&(&lams[j] - lk).recip());
                p = &p * &factor;
            }
            p
        })
        .collect()
}

/// A distribution as a projector field with the metric data needed for
/// brackets and covariant derivatives.
#[derive(Debug, Clone)]
pub struct DistPoint {
    pub point: Vec<f64>,
    pub metric: MetricPair,
    pub gamma: Christoffels,
    pub projector: JetMat,
}

impl DistPoint {
    pub fn rank(&self) -> usize {
        self.projector.val.trace().round().max(0.0) as usize
    }
}

pub trait Distribution: Sync {
    fn describe(&self) -> String;
    fn at(&self, p: &[f64]) -> Result<DistPoint>;
}

/// Sum of a set of bands of `Σ`.
pub struct BandSum<'a> {
    pub quad: &'a Quadruple,
    pub layout: BandLayout,
    pub members: Vec<usize>,
    pub cluster_tol: f64,
    pub label: String,
}

impl Distribution for BandSum<'_> {
    fn describe(&self) -> String {
        self.label.clone()
    }

    fn at(&self, p: &[f64]) -> Result<DistPoint> {
        let qp = self.quad.at(p)?;
        let es = self.layout.split_matching(&qp, self.cluster_tol)?;
        let jets = band_projector_jets(&qp, &es);
        let n = qp.dim();
        let mut proj = JetMat::zeros(n, n, n);
        for &m in &self.members {
            proj = &proj + &jets[m];
        }
        Ok(DistPoint {
            point: p.to_vec(),
            metric: qp.metric,
            gamma: qp.gamma,
            projector: proj,
        })
    }
}

/// A projector given by expressions.
pub struct ProjectorField {
    pub g: MetricField,
    pub projector: ExprMatrix,
}

impl Distribution for ProjectorField {
    fn describe(&self) -> String {
        "projector field".into()
    }

    fn at(&self, p: &[f64]) -> Result<DistPoint> {
        let metric = metric_sharp_flat(&self.g, p)?;
        let gamma = christoffels(&metric);
        Ok(DistPoint {
            point: p.to_vec(),
            gamma,
            projector: self.projector.eval_jet(p)?,
            metric,
        })
    }
}

/// The span of given vector fields, with its `g`-orthogonal projector
/// `E (EᵀgE)⁻¹ Eᵀg`.
pub struct FrameField {
    pub g: MetricField,
    pub frame: Vec<ExprVector>,
}

impl Distribution for FrameField {
    fn describe(&self) -> String {
        format!("span of {} vector fields", self.frame.len())
    }

    fn at(&self, p: &[f64]) -> Result<DistPoint> {
        let metric = metric_sharp_flat(&self.g, p)?;
        let gamma = christoffels(&metric);
        let cols = self
            .frame
            .iter()
            .map(|v| v.eval_jet(p))
            .collect::<Result<Vec<_>>>()?;
        let e = JetMat::from_columns(&cols);
        let et = e.transpose();
        let gram = &(&et * &metric.g) * &e;
        let inv = gram.inverse("frame Gram matrix", p)?;
        let projector = &(&(&e * &inv) * &et) * &metric.g;
        Ok(DistPoint {
            point: p.to_vec(),
            metric,
            gamma,
            projector,
        })
    }
}

fn inner_jet(g: &JetMat, u: &[Jet], v: &[Jet]) -> Jet {
    let n = u.len();
    let mut acc = Jet::constant(0.0, g.dim());
    for a in 0..n {
        for b in 0..n {
            acc = &acc + &(&(&u[a] * &g.entry(a, b)) * &v[b]);
        }
    }
    acc
}

fn inner_val(g: &DMatrix<f64>, u: &[Jet], v: &[Jet]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += u[a].value * g[(a, b)] * v[b].value;
        }
    }
    s
}

/// Orthonormal jet frame of the image of `proj`: projected coordinate
/// fields, largest remaining norm first.
pub fn orthonormal_frame(proj: &JetMat, g: &JetMat, rank: usize, drop: f64, point: &[f64]) -> Result<Vec<Vec<Jet>>> {
    let n = proj.nrows();
    let cands: Vec<Vec<Jet>> = (0..n).map(|c| proj.column(c)).collect();
    let mut frame: Vec<Vec<Jet>> = Vec::with_capacity(rank);
    let mut used = vec![false; n];
    while frame.len() < rank {
        let mut best: Option<(usize, f64)> = None;
        for (c, v) in cands.iter().enumerate() {
            if used[c] {
                continue;
            }
            let mut nrm2 = inner_val(&g.val, v, v);
            for e in &frame {
                let t = inner_val(&g.val, v, e);
                nrm2 -= t * t;
            }
            let nrm = nrm2.max(0.0).sqrt();
            if best.map_or(true, |(_, b)| nrm > b) {
                best = Some((c, nrm));
            }
        }
        let (c, nrm) = best.unwrap_or((0, 0.0));
        if nrm < drop {
            return Err(Error::RankJump {
                what: "projected coordinate frame".into(),
                expected: rank,
                found: frame.len(),
                point: point.to_vec(),
            });
        }
        used[c] = true;
        let mut w = cands[c].clone();
        for e in &frame {
            let t = inner_jet(g, &w, e);
            w = w.iter().zip(e).map(|(x, y)| x - &(&t * y)).collect();
        }
        let len = inner_jet(g, &w, &w).sqrt();
        let inv = len.recip();
        frame.push(w.iter().map(|x| x * &inv).collect());
    }
    Ok(frame)
}

fn check_rank(dp: &DistPoint, expected: &mut Option<usize>) -> Result<usize> {
    let r = dp.rank();
    match expected {
        Some(e) if *e != r => Err(Error::RankJump {
            what: "distribution".into(),
            expected: *e,
            found: r,
            point: dp.point.clone(),
        }),
        _ => {
            *expected = Some(r);
            Ok(r)
        }
    }
}

fn reference_rank(d: &dyn Distribution, points: &[Vec<f64>]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::Invalid("empty sample set".into()))?;
    Ok(d.at(first)?.rank())
}

/// `max ‖P⊥[e_i, e_j]‖_g` over an orthonormal frame of `D` at one point.
fn frobenius_at(dp: &DistPoint, drop: f64) -> Result<f64> {
    let n = dp.projector.nrows();
    let r = dp.rank();
    if r == 0 || r == n {
        return Ok(0.0);
    }
    let frame = orthonormal_frame(&dp.projector, &dp.metric.g, r, drop, &dp.point)?;
    let perp = DMatrix::identity(n, n) - &dp.projector.val;
    let g = &dp.metric.g.val;
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in i + 1..r {
            let br = nalgebra::DVector::from_vec(lie_bracket(&frame[i], &frame[j]));
            let t = &perp * br;
            worst = worst.max((t.transpose() * g * &t)[(0, 0)].max(0.0).sqrt());
        }
    }
    Ok(worst)
}

pub fn frobenius_residual(d: &dyn Distribution, points: &[Vec<f64>], tol: &Tolerances) -> Result<Residual> {
    let rank = reference_rank(d, points)?;
    let r = sweep(points, 1, |p| {
        let dp = d.at(p)?;
        check_rank(&dp, &mut Some(rank))?;
        Ok(vec![frobenius_at(&dp, tol.frame_drop)?])
    })?;
    Ok(r.into_iter().next().expect("one slot"))
}

/// `max |g(∇_Y X, Z) + g(∇_Z X, Y)|` for `X` in an orthonormal frame of `D`
/// and `Y, Z` in an orthonormal frame of `D⊥`.
fn riemannian_at(dp: &DistPoint, drop: f64) -> Result<f64> {
    let n = dp.projector.nrows();
    let r = dp.rank();
    if r == 0 || r == n {
        return Ok(0.0);
    }
    let frame = orthonormal_frame(&dp.projector, &dp.metric.g, r, drop, &dp.point)?;
    let perp = JetMat::identity(n, n) - &dp.projector;
    let normal = orthonormal_frame(&perp, &dp.metric.g, n - r, drop, &dp.point)?;
    let g = &dp.metric.g.val;
    let gamma = &dp.gamma;
    // (∇_{∂_j} X)^k
    let nabla = |x: &[Jet]| -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |k, j| {
            x[k].d(j) + (0..n).map(|l| gamma.get(k, j, l) * x[l].value).sum::<f64>()
        })
    };
    let vals = |v: &[Jet]| nalgebra::DVector::from_iterator(n, v.iter().map(|x| x.value));
    let ys: Vec<_> = normal.iter().map(|v| vals(v)).collect();
    let mut worst = 0.0f64;
    for x in &frame {
        let nx = nabla(x);
        // g(∇_Y X, Z) = Zᵀ g (∇X) Y
        let m = g * &nx;
        for (a, y) in ys.iter().enumerate() {
            for z in &ys[a..] {
                let v = (z.transpose() * &m * y)[(0, 0)] + (y.transpose() * &m * z)[(0, 0)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Bundle-like residual; fails if `D` is not integrable within
/// `integrability_tol` at some point.
pub fn riemannian_foliation_residual(
    d: &dyn Distribution,
    points: &[Vec<f64>],
    tol: &Tolerances,
    integrability_tol: f64,
) -> Result<Residual> {
    let rank = reference_rank(d, points)?;
    let r = sweep(points, 1, |p| {
        let dp = d.at(p)?;
        check_rank(&dp, &mut Some(rank))?;
        let f = frobenius_at(&dp, tol.frame_drop)?;
        if !(f <= integrability_tol) {
            return Err(Error::Validation {
                check: format!("integrability of {} (needed for the bundle-like residual)", d.describe()),
                residual: f,
                point: p.to_vec(),
            });
        }
        Ok(vec![riemannian_at(&dp, tol.frame_drop)?])
    })?;
    Ok(r.into_iter().next().expect("one slot"))
}

/// `‖∇P‖` with the full tensor norm.
pub fn parallel_foliation_residual(d: &dyn Distribution, points: &[Vec<f64>]) -> Result<Residual> {
    let rank = reference_rank(d, points)?;
    let r = sweep(points, 1, |p| {
        let dp = d.at(p)?;
        check_rank(&dp, &mut Some(rank))?;
        let np = covariant_deriv_endo(&dp.projector, &dp.gamma);
        Ok(vec![full_norm_3(&np, &dp.metric.g.val, &dp.metric.g_inv.val)])
    })?;
    Ok(r.into_iter().next().expect("one slot"))
}

fn band_label(layout: &BandLayout, members: &[usize]) -> String {
    let parts: Vec<String> = members.iter().map(|&m| format!("H^{}", fmt_a(layout.a_values[m]))).collect();
    parts.join("+")
}

fn fmt_a(a: f64) -> String {
    let r = (a * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Pointwise projector invariants of every band.
fn band_invariants(q: &Quadruple, layout: &BandLayout, points: &[Vec<f64>], tol: &Tolerances) -> Result<Vec<Residual>> {
    sweep(points, 6, |p| {
        let qp = q.at(p)?;
        let es = layout.split_matching(&qp, tol.cluster)?;
        let n = qp.dim();
        let id = DMatrix::<f64>::identity(n, n);
        let g = qp.g();
        let sigma = qp.sigma().val;
        let jets = band_projector_jets(&qp, &es);
        let mut v = [0.0f64; 6];
        let mut sum = DMatrix::zeros(n, n);
        for (j, b) in es.bands.iter().enumerate() {
            let pm = &b.projector;
            sum += pm;
            v[0] = v[0].max((pm * pm - pm).amax());
            let gp = g * pm;
            v[0] = v[0].max((&gp - gp.transpose()).amax());
            for c in &es.bands[j + 1..] {
                v[1] = v[1].max((pm * &c.projector).amax());
            }
            v[3] = v[3].max((&sigma * pm + pm * (2.0 * b.a)).amax());
            for jm in [&qp.jp.val, &qp.jm.val] {
                v[4] = v[4].max((jm * pm - pm * jm).amax());
            }
            v[5] = v[5].max((&jets[j].val - pm).amax());
        }
        v[2] = (sum - id).amax();
        Ok(v.to_vec())
    })
}

/// Band recovery and foliation residuals for every eigendistribution.
pub fn eigendist_suite(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<(Outcome, BandLayout)> {
    let layout = band_layout(q, points, tol.cluster)?;
    let mut out = Outcome::default();
    let inv = band_invariants(q, &layout, points, tol)?;
    let names = [
        ("eigen.projector_idempotent_selfadjoint", "P^2 = P, g(PX, Y) = g(X, PY)"),
        ("eigen.projectors_orthogonal", "P_j P_k = 0 for j != k"),
        ("eigen.projectors_sum", "sum_j P_j = Id"),
        ("eigen.eigenvalue", "(J+J- + J-J+) P_j = -2 a_j P_j"),
        ("eigen.j_invariant", "J± P_j = P_j J±"),
        ("eigen.lagrange_projector", "P_j = prod_{k != j} (Sigma - lambda_k)/(lambda_j - lambda_k)"),
    ];
    for ((name, reference), r) in names.iter().zip(inv) {
        let t = if *name == "eigen.j_invariant" { tol.derivative } else { tol.algebraic.max(10.0 * tol.cluster.min(1e-9)) };
        out.push(Check::new(name, reference, r, t));
    }
    let summary: Vec<String> = layout
        .a_values
        .iter()
        .zip(&layout.multiplicities)
        .map(|(a, m)| format!("a = {} (dim {m})", fmt_a(*a)))
        .collect();
    out.note(format!("bands at the first sample point: {}", summary.join(", ")));
    out.note("Riemannian foliation residual: |g(nabla_Y X, Z) + g(nabla_Z X, Y)| for X tangent, Y, Z normal (bundle-like metric)");
    let mut implication = Residual::default();
    for j in 0..layout.len() {
        let d = BandSum {
            quad: q,
            layout: layout.clone(),
            members: vec![j],
            cluster_tol: tol.cluster,
            label: band_label(&layout, &[j]),
        };
        let label = d.describe();
        let fro = frobenius_residual(&d, points, tol)?;
        let par = parallel_foliation_residual(&d, points)?;
        let integrable = fro.below(tol.derivative);
        out.push(Check::new(&format!("eigen.frobenius[{label}]"), "[X, Y] in H^a for X, Y in H^a", fro.clone(), tol.derivative).informational());
        if integrable {
            let rie = riemannian_foliation_residual(&d, points, tol, tol.derivative)?;
            if par.below(tol.derivative) && !rie.below(10.0 * tol.derivative) {
                implication.observe(1.0, &rie.argmax);
            }
            out.push(
                Check::new(&format!("eigen.riemannian[{label}]"), "g(nabla_Y X, Z) + g(nabla_Z X, Y) = 0, X in H^a, Y, Z in (H^a)^perp", rie, tol.derivative)
                    .informational(),
            );
        } else {
            out.skip(&format!("eigen.riemannian[{label}]"), "distribution is not integrable on the sample set");
            if par.below(tol.derivative) {
                implication.observe(1.0, &fro.argmax);
            }
        }
        out.push(Check::new(&format!("eigen.parallel[{label}]"), "nabla P_a = 0", par, tol.derivative).informational());
    }
    if implication.argmax.is_empty() {
        implication = Residual::at(0.0, &[]);
    }
    out.push(Check::new(
        "eigen.parallel_implies_foliation",
        "parallel => integrable => bundle-like (0 when the implication holds)",
        implication,
        0.5,
    ));
    Ok((out, layout))
}

/// Outcome of comparing the two conditions on one example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Counterexample,
    /// The quadruple is not generalized Kähler on the sample set.
    NotGeneralizedKahler,
    /// Generalized Kähler, but a band in `V` has dimension below eight.
    HypothesisNotSatisfied,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Counterexample => "counterexample",
            Verdict::NotGeneralizedKahler => "hypotheses not met (not a generalized Kähler structure)",
            Verdict::HypothesisNotSatisfied => "hypothesis not satisfied",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub verdict: Verdict,
    pub invertible_sum: bool,
    pub invertible_difference: bool,
    pub dimension_hypothesis: bool,
    /// `db = 0` on the sample set.
    pub condition_i: bool,
    /// Bands and their complements integrable.
    pub condition_ii: bool,
    /// `H±` and all pairwise sums integrable.
    pub condition_ii_sums: bool,
}

fn min_singular(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().fold(f64::INFINITY, |a, b| a.min(*b))
}

/// Evaluate both conditions and the hypotheses of the factorisation
/// results, and compare.
pub fn theorem_scenario(q: &Quadruple, points: &[Vec<f64>], tol: &Tolerances) -> Result<(Outcome, Scenario)> {
    let layout = band_layout(q, points, tol.cluster)?;
    let mut out = Outcome::default();
    let gk = gk_integrability_residual(q, points, tol)?;
    let is_gk = gk.checks.iter().filter(|c| c.gating).all(|c| c.pass());
    let db = gk.check("gk.db_norm").expect("present").residual.clone();
    let condition_i = db.below(tol.derivative);
    out.push(Check::new("theorem.condition_i", "db = 0", db, tol.derivative).informational());

    let (mut inv_sum, mut inv_diff) = (true, true);
    for p in points {
        let qp = q.at(p)?;
        inv_sum &= min_singular(&qp.j_combo(Sign::Plus).val) > 1e-8;
        inv_diff &= min_singular(&qp.j_combo(Sign::Minus).val) > 1e-8;
    }
    let boundary = |a: f64| (a.abs() - 1.0).abs() <= tol.a_margin;
    let dim_ok = layout
        .a_values
        .iter()
        .zip(&layout.multiplicities)
        .all(|(a, m)| boundary(*a) || *m >= 8);
    out.note(format!(
        "hypotheses: J+ + J- invertible: {inv_sum}; J+ - J- invertible: {inv_diff}; eigendistributions in V of dimension >= 8: {dim_ok}"
    ));

    let nb = layout.len();
    let mut seen: std::collections::BTreeMap<Vec<usize>, bool> = Default::default();
    let mut frob = |members: Vec<usize>, kind: &str| -> Result<bool> {
        if members.is_empty() || members.len() == nb {
            return Ok(true);
        }
        if let Some(ok) = seen.get(&members) {
            return Ok(*ok);
        }
        let d = BandSum {
            quad: q,
            layout: layout.clone(),
            members: members.clone(),
            cluster_tol: tol.cluster,
            label: band_label(&layout, &members),
        };
        let r = frobenius_residual(&d, points, tol)?;
        let ok = r.below(tol.derivative);
        seen.insert(members, ok);
        out.push(
            Check::new(&format!("theorem.frobenius.{kind}[{}]", d.describe()), "Frobenius: [X, Y] in D for X, Y in D", r, tol.derivative)
                .informational(),
        );
        Ok(ok)
    };
    let mut ii = true;
    for j in 0..nb {
        ii &= frob(vec![j], "band")?;
        ii &= frob((0..nb).filter(|&k| k != j).collect(), "complement")?;
    }
    let mut ii_sums = true;
    for j in 0..nb {
        if boundary(layout.a_values[j]) {
            ii_sums &= frob(vec![j], "band")?;
        }
        for k in j + 1..nb {
            ii_sums &= frob(vec![j, k], "sum")?;
        }
    }
    let verdict = if !is_gk {
        Verdict::NotGeneralizedKahler
    } else if !dim_ok {
        Verdict::HypothesisNotSatisfied
    } else {
        let theorem_ok = !(inv_sum || inv_diff) || condition_i == ii;
        let sums_ok = condition_i == ii_sums;
        if theorem_ok && sums_ok {
            Verdict::Consistent
        } else {
            Verdict::Counterexample
        }
    };
    out.note(format!("scenario verdict: {}", verdict.as_str()));
    let agree = if verdict == Verdict::Counterexample { 1.0 } else { 0.0 };
    out.push(Check::new(
        "theorem.agreement",
        "db = 0 <=> eigendistributions and complements integrable; db = 0 <=> H± and pairwise sums integrable",
        Residual::at(agree, &[]),
        0.5,
    ));
    Ok((
        out,
        Scenario {
            verdict,
            invertible_sum: inv_sum,
            invertible_difference: inv_diff,
            dimension_hypothesis: dim_ok,
            condition_i,
            condition_ii: ii,
            condition_ii_sums: ii_sums,
        },
    ))
}
