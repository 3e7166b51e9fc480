//! Acceptance criteria. Runs without the libtest harness so that one
//! PASS/FAIL line per criterion is always printed.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gkv::bihermitian::{gk_integrability_residual, Quadruple, Sign, REF_PARALLEL};
use gkv::eigendist::{eigendist_suite, spectral_split, theorem_scenario, Verdict};
use gkv::expr::{parse_expr, Params};
use gkv::gencomplex::{b_field_transform, courant_bracket, GeneralizedSection};
use gkv::harness::courant::courant_suite;
use gkv::harness::{run_suite, zoo, ManifoldSpec, RunConfig, Suite};
use gkv::patch::{christoffels, metric_sharp_flat, ExprMatrix, MetricField, TwoFormField};
use gkv::tol::Tolerances;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(name: &str, kv: &[(&str, f64)]) -> ManifoldSpec {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    zoo::generate(name, &params).expect("zoo example")
}

fn quad(name: &str, kv: &[(&str, f64)]) -> Quadruple {
    spec(name, kv).validated().expect("valid example")
}

const Z1_TUPLES: [[f64; 3]; 5] = [
    [0.0, 1.0, 0.0],
    [0.6, 0.8, 0.0],
    [0.36, 0.48, 0.8],
    [0.0, 0.0, 1.0],
    [-0.6, 0.0, 0.8],
];

fn z1(n: f64, t: [f64; 3]) -> ManifoldSpec {
    spec("Z1", &[("n", n), ("alpha", t[0]), ("beta", t[1]), ("gamma", t[2])])
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checks = 0usize;
    for n in [1.0, 2.0] {
        for t in Z1_TUPLES {
            let s = z1(n, t);
            for suite in [Suite::Validate, Suite::Gk, Suite::Identities, Suite::Gauge] {
                let r = run_suite(&s, suite, &RunConfig::default()).map_err(|e| format!("n={n} {t:?}: {e}"))?;
                ensure(!r.checks.is_empty(), || format!("n={n} {t:?} {}: no checks ran", suite.name()))?;
                for c in &r.checks {
                    let m = c.max_residual.ok_or_else(|| format!("{} is NaN", c.check_name))?;
                    ensure(m < 1e-9, || format!("n={n} {t:?} {} residual {m:e}", c.check_name))?;
                    worst = worst.max(m);
                    checks += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("runtime {secs:.1} s"))?;
    Ok(format!("{checks} checks, max residual {worst:.2e}, {secs:.1} s"))
}

/// Polynomial in `x1, x2, x3` as exponent triple to coefficient.
#[derive(Clone, Default)]
struct Poly(BTreeMap<[u32; 3], f64>);

impl Poly {
    fn random(rng: &mut ChaCha8Rng) -> Poly {
        let mut p = Poly::default();
        for _ in 0..rng.gen_range(1..5) {
            let e = [rng.gen_range(0..3), rng.gen_range(0..3), rng.gen_range(0..3)];
            if e.iter().sum::<u32>() <= 3 {
                *p.0.entry(e).or_default() += rng.gen_range(-2.0..2.0);
            }
        }
        p
    }

    fn add(&self, o: &Poly, s: f64) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.0 {
            *r.0.entry(*e).or_default() += s * c;
        }
        r
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::default();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                *r.0.entry([a[0] + b[0], a[1] + b[1], a[2] + b[2]]).or_default() += x * y;
            }
        }
        r
    }

    fn deriv(&self, i: usize) -> Poly {
        let mut r = Poly::default();
        for (e, c) in &self.0 {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                *r.0.entry(f).or_default() += c * e[i] as f64;
            }
        }
        r
    }

    fn eval(&self, p: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * (0..3).map(|i| p[i].powi(e[i] as i32)).product::<f64>())
            .sum()
    }

    fn text(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        self.0
            .iter()
            .map(|(e, c)| {
                let mut t = format!("({c:?})");
                for (i, k) in e.iter().enumerate() {
                    if *k > 0 {
                        t += &format!("*x{}^{k}", i + 1);
                    }
                }
                t
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn sum(terms: impl Iterator<Item = Poly>) -> Poly {
    terms.fold(Poly::default(), |a, t| a.add(&t, 1.0))
}

/// `[X + α, Y + β] = [X, Y] + L_X β − L_Y α − ½ d(ι_X β − ι_Y α)` with
/// `(L_X β)_j = X^i ∂_i β_j + β_i ∂_j X^i`, expanded symbolically.
fn courant_closed_form(x: &[Poly], alpha: &[Poly], y: &[Poly], beta: &[Poly]) -> (Vec<Poly>, Vec<Poly>) {
    let lie: Vec<Poly> = (0..3)
        .map(|k| sum((0..3).map(|i| x[i].mul(&y[k].deriv(i)).add(&y[i].mul(&x[k].deriv(i)), -1.0))))
        .collect();
    let lie_d = |v: &[Poly], w: &[Poly], j: usize| {
        sum((0..3).map(|i| v[i].mul(&w[j].deriv(i)).add(&w[i].mul(&v[i].deriv(j)), 1.0)))
    };
    let pairing = sum((0..3).map(|i| x[i].mul(&beta[i]))).add(&sum((0..3).map(|i| y[i].mul(&alpha[i]))), -1.0);
    let form = (0..3)
        .map(|j| lie_d(x, beta, j).add(&lie_d(y, alpha, j), -1.0).add(&pairing.deriv(j), -0.5))
        .collect();
    (lie, form)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let coords: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
    let mut worst = 0.0f64;
    for pair in 0..20 {
        let mut field = || (0..3).map(|_| Poly::random(&mut rng)).collect::<Vec<_>>();
        let (x, alpha, y, beta) = (field(), field(), field(), field());
        let texts = |v: &[Poly]| v.iter().map(Poly::text).collect::<Vec<_>>();
        let u = GeneralizedSection::parse_real(&texts(&x), &texts(&alpha), &coords, &Params::new()).map_err(|e| e.to_string())?;
        let v = GeneralizedSection::parse_real(&texts(&y), &texts(&beta), &coords, &Params::new()).map_err(|e| e.to_string())?;
        let (vec_cf, form_cf) = courant_closed_form(&x, &alpha, &y, &beta);
        for _ in 0..100 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w = courant_bracket(&u.eval(&p).map_err(|e| e.to_string())?, &v.eval(&p).map_err(|e| e.to_string())?);
            for k in 0..3 {
                let dv = (w.vector[k].re - vec_cf[k].eval(&p)).abs() + w.vector[k].im.abs();
                let df = (w.form[k].re - form_cf[k].eval(&p)).abs() + w.form[k].im.abs();
                worst = worst.max(dv).max(df);
            }
        }
        ensure(worst < 1e-12, || format!("pair {pair}: deviation {worst:e}"))?;
    }
    Ok(format!("20 pairs x 100 points, max deviation {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut report = Vec::new();
    for n in [1.0, 2.0] {
        for t in Z1_TUPLES {
            let q = z1(n, t).validated().map_err(|e| e.to_string())?;
            let r = courant_suite(&q, &q.sample_points(), &Tolerances::default(), 11).map_err(|e| e.to_string())?;
            let c = r
                .check("courant.closure_plus")
                .ok_or_else(|| format!("n={n} {t:?}: closure check skipped"))?;
            ensure(c.residual.max < 1e-8, || format!("n={n} {t:?}: transverse component {:e}", c.residual.max))?;
            report.push(c.residual.max);
        }
    }
    let worst = report.iter().cloned().fold(0.0, f64::max);
    Ok(format!("10 frame pairs on {} Z1 fields, max transverse component {worst:.2e}", report.len()))
}

fn criterion_4() -> Outcome {
    let (a1, a2) = (0.0, 0.5);
    let q = quad("Z3", &[("a1", a1), ("a2", a2)]);
    let tol = Tolerances::default();
    let points = q.sample_points();
    for p in &points {
        let es = spectral_split(&q.at(p).map_err(|e| e.to_string())?, tol.cluster).map_err(|e| e.to_string())?;
        ensure(es.bands.len() == 2, || format!("{} bands at {p:?}", es.bands.len()))?;
        for (b, a) in es.bands.iter().zip([a1, a2]) {
            ensure((b.a - a).abs() < 1e-10, || format!("band a = {} expected {a}", b.a))?;
            ensure(b.multiplicity == 8, || format!("band dimension {}", b.multiplicity))?;
        }
    }
    let (out, _) = eigendist_suite(&q, &points, &tol).map_err(|e| e.to_string())?;
    let mut foliation = 0.0f64;
    for prefix in ["eigen.frobenius[", "eigen.riemannian[", "eigen.parallel["] {
        let cs: Vec<_> = out.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
        ensure(cs.len() == 2, || format!("{} checks named {prefix}..]", cs.len()))?;
        for c in cs {
            ensure(c.residual.max < 1e-8, || format!("{} = {:e}", c.name, c.residual.max))?;
            foliation = foliation.max(c.residual.max);
        }
    }
    let gk = gk_integrability_residual(&q, &points, &tol).map_err(|e| e.to_string())?;
    let db = gk.check("gk.db_norm").ok_or("no db norm")?.residual.max;
    ensure(db < 1e-10, || format!("|db| = {db:e}"))?;
    let (_, sc) = theorem_scenario(&q, &points, &tol).map_err(|e| e.to_string())?;
    ensure(sc.verdict == Verdict::Consistent, || format!("verdict {}", sc.verdict.as_str()))?;
    Ok(format!("bands a = {a1}, {a2} of dimension 8, foliation residuals <= {foliation:.2e}, |db| = {db:.1e}, verdict consistent"))
}

fn gkv(args: &[&str], workers: Option<&str>) -> Result<std::process::Output, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gkv"));
    cmd.args(args);
    if let Some(w) = workers {
        cmd.env("GKV_WORKERS", w);
    }
    cmd.output().map_err(|e| e.to_string())
}

fn emit(dir: &Path, name: &str) -> Result<String, String> {
    let path = dir.join(format!("{}.json", name.to_lowercase()));
    let path = path.to_str().ok_or("non-utf8 temp path")?.to_string();
    let out = gkv(&["zoo", name, "--emit", &path], None)?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    Ok(path)
}

fn read_json(path: &str) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn criterion_5(dir: &Path) -> Outcome {
    let spec = emit(dir, "Z4")?;
    let report = dir.join("z4-report.json").to_string_lossy().into_owned();
    let out = gkv(&["check", &spec, "--suite", "gk", "--report", &report], None)?;
    ensure(out.status.code() == Some(1), || format!("exit code {:?}", out.status.code()))?;
    let r = read_json(&report)?;
    let checks = r["checks"].as_array().ok_or("no checks array")?;
    let find = |name: &str| checks.iter().find(|c| c["checkName"] == name).ok_or(format!("no {name}"));
    let par = find("gk.parallel_plus")?;
    let res = par["maxResidual"].as_f64().ok_or("NaN residual")?;
    ensure(res > 1e-2, || format!("parallel residual {res:e}"))?;
    ensure(par["pass"] == false && par["gating"] == true, || "parallelism did not fail as a gating check".into())?;
    ensure(par["paperRef"] == REF_PARALLEL, || format!("paperRef {}", par["paperRef"]))?;
    let db = find("gk.db_norm")?["maxResidual"].as_f64().ok_or("NaN db")?;
    ensure(db >= 1.0 - 1e-10, || format!("|db| = {db}"))?;
    ensure(r["pass"] == false, || "report passes".into())?;
    Ok(format!("exit 1, parallel residual {res:.3}, |db| = {db}, paperRef \"{REF_PARALLEL}\""))
}

fn criterion_6() -> Outcome {
    let r = run_suite(&spec("Z5", &[("count", 1000.0), ("seed", 6.0)]), Suite::Fourdim, &RunConfig::default())
        .map_err(|e| e.to_string())?;
    let dec = r.check("fourdim.pointwise.decomposition").ok_or("no decomposition check")?;
    let dec_res = dec.max_residual.ok_or("NaN")?;
    ensure(dec_res < 1e-10, || format!("decomposition residual {dec_res:e}"))?;
    let frac = r.check("fourdim.pointwise.generic_rejected").ok_or("no generic check")?.max_residual.ok_or("NaN")?;
    ensure(frac <= 0.01, || format!("{:.1}% of generic samples satisfy the relation", 100.0 * frac))?;
    Ok(format!(
        "1000 decomposition samples max residual {dec_res:.2e}; {:.1}% of 1000 generic samples have residual > 1e-3",
        100.0 * (1.0 - frac)
    ))
}

fn random_closed_b(rng: &mut ChaCha8Rng, n: usize) -> TwoFormField {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    TwoFormField(ExprMatrix::from_constant(&m))
}

/// `max |Re ε₊ (A − 1) − Re ε₋ (A + 1) + 2b|` with `A = −Σ/2`, which is
/// `(a − 1) Re ε₊ − (a + 1) Re ε₋ + 2b` wherever `Σ = −2a`.
fn b_relation(q: &Quadruple, points: &[Vec<f64>]) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for p in points {
        let qp = q.at(p).map_err(|e| e.to_string())?;
        let n = qp.dim();
        let a = qp.sigma().val * -0.5;
        let id = DMatrix::<f64>::identity(n, n);
        let ep = qp.epsilon(Sign::Plus).map_err(|e| e.to_string())?.re.val;
        let em = qp.epsilon(Sign::Minus).map_err(|e| e.to_string())?.re.val;
        let r = ep * (&a - &id) - em * (&a + &id) + &qp.b.val * 2.0;
        worst = worst.max(r.amax());
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tol = Tolerances::default();
    let (mut proj_dev, mut rel) = (0.0f64, 0.0f64);
    for q in [quad("Z1", &[("alpha", 0.6), ("beta", 0.8)]), quad("Z3", &[])] {
        let points = q.patch.pre_grid();
        for _ in 0..3 {
            let shift = random_closed_b(&mut rng, q.dim());
            let t = b_field_transform(&q, &shift, tol.algebraic).map_err(|e| e.to_string())?;
            for p in &points {
                let before = spectral_split(&q.at(p).map_err(|e| e.to_string())?, tol.cluster).map_err(|e| e.to_string())?;
                let after = spectral_split(&t.at(p).map_err(|e| e.to_string())?, tol.cluster).map_err(|e| e.to_string())?;
                ensure(before.bands.len() == after.bands.len(), || "band count changed".into())?;
                for (x, y) in before.bands.iter().zip(&after.bands) {
                    proj_dev = proj_dev.max((&x.projector - &y.projector).amax());
                }
            }
            rel = rel.max(b_relation(&t, &points)?);
        }
    }
    ensure(proj_dev < 1e-14, || format!("projector deviation {proj_dev:e}"))?;
    ensure(rel < 1e-12, || format!("b relation residual {rel:e}"))?;
    Ok(format!("projector deviation {proj_dev:.1e}, b relation residual {rel:.2e}"))
}

/// Random expression text over `n` coordinates; every subterm is defined on
/// all of `ℝⁿ`.
fn random_expr(rng: &mut ChaCha8Rng, n: usize, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            format!("x{}", rng.gen_range(1..=n))
        } else {
            format!("{:.3}", rng.gen_range(0.1..2.0))
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, n, depth - 1);
    match rng.gen_range(0..12) {
        0 => format!("({} + {})", sub(rng), sub(rng)),
        1 => format!("({} - {})", sub(rng), sub(rng)),
        2 => format!("({} * {})", sub(rng), sub(rng)),
        3 => format!("({} / (1 + ({})^2))", sub(rng), sub(rng)),
        4 => format!("sin({})", sub(rng)),
        5 => format!("cos({})", sub(rng)),
        6 => format!("exp(sin({}))", sub(rng)),
        7 => format!("log(2 + cos({}))", sub(rng)),
        8 => format!("sqrt(1 + ({})^2)", sub(rng)),
        9 => format!("({})^{}", sub(rng), rng.gen_range(2..4)),
        10 => format!("(1 + ({})^2)^(-1.5)", sub(rng)),
        _ => format!("-{}", sub(rng)),
    }
}

/// Fourth-order central difference.
fn central(f: &dyn Fn(&[f64]) -> f64, p: &[f64], i: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut q = p.to_vec();
        q[i] += s * h;
        f(&q)
    };
    (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_ratio = 0.0f64;
    for k in 0..1000 {
        let n = rng.gen_range(1..=4);
        let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let text = random_expr(&mut rng, n, 4);
        let e = parse_expr(&text, &coords).map_err(|err| format!("{text}: {err}"))?;
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let jet = e.eval_jet(&p).map_err(|err| format!("{text}: {err}"))?;
        let f = |q: &[f64]| e.eval(q).expect("defined everywhere");
        for i in 0..n {
            let fd = central(&f, &p, i, 1e-3);
            let allowed = 1e-7f64.max(1e-5 * jet.grad[i].abs());
            let dev = (jet.grad[i] - fd).abs();
            ensure(dev <= allowed, || format!("expression {k} `{text}` at {p:?}: d{i} = {} vs {fd}", jet.grad[i]))?;
            worst_ratio = worst_ratio.max(dev / allowed);
        }
    }
    let metrics: [(usize, Vec<Vec<&str>>); 3] = [
        (2, vec![vec!["1", "0"], vec!["0", "(2 + x1)^2"]]),
        (3, vec![vec!["1", "0", "0"], vec!["0", "exp(2*x1)", "0"], vec!["0", "0", "exp(2*x1)*sin(x2 + 2)^2"]]),
        (
            3,
            vec![
                vec!["2 + sin(x1*x2)", "0.3*x3", "0.1*cos(x1)"],
                vec!["0.3*x3", "2 + x2^2", "0.2*x1*x3"],
                vec!["0.1*cos(x1)", "0.2*x1*x3", "3 + exp(0.5*x3)"],
            ],
        ),
    ];
    let mut worst_gamma = 0.0f64;
    for (n, rows) in metrics {
        let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        let g = MetricField(ExprMatrix::parse(&text, &coords, &Params::new(), "metric").map_err(|e| e.to_string())?);
        for _ in 0..20 {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let gamma = christoffels(&metric_sharp_flat(&g, &p).map_err(|e| e.to_string())?);
            let gv = |q: &[f64]| g.0.eval(q).expect("metric defined");
            let dg: Vec<DMatrix<f64>> = (0..n)
                .map(|l| DMatrix::from_fn(n, n, |r, c| central(&|q| gv(q)[(r, c)], &p, l, 1e-3)))
                .collect();
            let gi = gv(&p).try_inverse().ok_or("singular metric")?;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let oracle: f64 = (0..n)
                            .map(|l| 0.5 * gi[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                            .sum();
                        let dev = (gamma.get(k, i, j) - oracle).abs();
                        ensure(dev < 1e-6, || format!("Gamma^{k}_{i}{j} at {p:?}: {} vs {oracle}", gamma.get(k, i, j)))?;
                        worst_gamma = worst_gamma.max(dev);
                    }
                }
            }
        }
    }
    Ok(format!(
        "1000 expressions within {:.0}% of the allowance; Christoffels of 3 metrics within {worst_gamma:.1e}",
        100.0 * worst_ratio
    ))
}

fn criterion_9(dir: &Path) -> Outcome {
    let spec = emit(dir, "Z3")?;
    let mut reports = Vec::new();
    for (k, workers) in [None, Some("1")].into_iter().enumerate() {
        let path = dir.join(format!("z3-run{k}.json")).to_string_lossy().into_owned();
        let out = gkv(&["check", &spec, "--suite", "all", "--seed", "7", "--report", &path], workers)?;
        ensure(out.status.code() == Some(0), || format!("exit code {:?}", out.status.code()))?;
        let mut r = read_json(&path)?;
        r["meta"].as_object_mut().ok_or("no meta")?.remove("timestamp");
        reports.push(r);
    }
    ensure(reports[0] == reports[1], || "reports differ after stripping the timestamp".into())?;
    Ok(format!(
        "{} checks identical across runs (default pool and GKV_WORKERS=1)",
        reports[0]["checks"].as_array().map_or(0, Vec::len)
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 9] = [
        ("Z1 full suite", Box::new(criterion_1)),
        ("Courant bracket closed form", Box::new(criterion_2)),
        ("Courant closure for Z1 eps+", Box::new(criterion_3)),
        ("Z3 eigendistributions", Box::new(criterion_4)),
        ("Z4 negative control", Box::new(|| criterion_5(dir.path()))),
        ("four-dimensional pointwise equivalence", Box::new(criterion_6)),
        ("B-field invariance", Box::new(criterion_7)),
        ("jet correctness", Box::new(criterion_8)),
        ("determinism", Box::new(|| criterion_9(dir.path()))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{secs:.1} s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({why}) [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
