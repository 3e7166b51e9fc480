//! Built-in example quadruples.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::patch::SamplePlan;

use super::{ManifoldSpec, PointwiseSampler};

pub const NAMES: [&str; 5] = ["Z1", "Z2", "Z3", "Z4", "Z5"];

/// Sign pattern of left multiplication by `i`, `j`, `k` on `ℝ⁴`: entry
/// `(r, c)` is `Some((unit, sign))` where at most one unit is nonzero.
fn quaternion_entry(r: usize, c: usize) -> Option<(usize, i8)> {
    // rows of L(i), L(j), L(k) in the basis 1, i, j, k
    const L: [[[i8; 4]; 4]; 3] = [
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    ];
    (0..3).find(|&u| L[u][r][c] != 0).map(|u| (u, L[u][r][c]))
}

/// `Σ_u coeff[u] L(unit u)` on a 4-block, as expression strings.
fn quaternion_block(coeff: [&str; 3]) -> Vec<Vec<String>> {
    (0..4)
        .map(|r| {
            (0..4)
                .map(|c| match quaternion_entry(r, c) {
                    Some((u, s)) if coeff[u] != "0" => {
                        if s > 0 {
                            coeff[u].to_string()
                        } else {
                            format!("-({})", coeff[u])
                        }
                    }
                    _ => "0".to_string(),
                })
                .collect()
        })
        .collect()
}

fn zeros(n: usize) -> Vec<Vec<String>> {
    vec![vec!["0".to_string(); n]; n]
}

fn diag(d: &[String]) -> Vec<Vec<String>> {
    let mut m = zeros(d.len());
    for (i, x) in d.iter().enumerate() {
        m[i][i] = x.clone();
    }
    m
}

fn block_diag(blocks: &[Vec<Vec<String>>]) -> Vec<Vec<String>> {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut m = zeros(n);
    let mut off = 0;
    for b in blocks {
        for (r, row) in b.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                m[off + r][off + c] = x.clone();
            }
        }
        off += b.len();
    }
    m
}

fn base(dim: usize, parameters: BTreeMap<String, f64>) -> ManifoldSpec {
    ManifoldSpec {
        dim,
        coords: (1..=dim).map(|i| format!("x{i}")).collect(),
        parameters,
        metric: diag(&vec!["1".to_string(); dim]),
        b: zeros(dim),
        jplus: zeros(dim),
        jminus: zeros(dim),
        domain: vec![[-1.0, 1.0]; dim],
        sample_plan: SamplePlan::default(),
        orientation: 1,
        declared_scenarios: Vec::new(),
        pointwise_sampler: None,
    }
}

fn take(params: &BTreeMap<String, f64>, allowed: &[(&str, f64)], name: &str) -> Result<BTreeMap<String, f64>> {
    if let Some(k) = params.keys().find(|k| !allowed.iter().any(|(a, _)| a == k)) {
        let names: Vec<&str> = allowed.iter().map(|(a, _)| *a).collect();
        return Err(Error::Invalid(format!("{name} has no parameter '{k}' (expected one of {names:?})")));
    }
    Ok(allowed
        .iter()
        .map(|(k, d)| (k.to_string(), params.get(*k).copied().unwrap_or(*d)))
        .collect())
}

const GENERIC_SUITES: [&str; 7] = ["validate", "gk", "identities", "gauge", "eigendist", "theorem", "courant"];

fn suites(dim4: bool) -> Vec<String> {
    let mut v: Vec<String> = GENERIC_SUITES.iter().map(|s| s.to_string()).collect();
    if dim4 {
        v.push("fourdim".into());
    }
    v
}

fn quaternionic(name: &str, params: &BTreeMap<String, f64>) -> Result<ManifoldSpec> {
    let p = take(params, &[("n", 1.0), ("alpha", 0.0), ("beta", 1.0), ("gamma", 0.0)], name)?;
    let n = p["n"];
    if n != 1.0 && n != 2.0 {
        return Err(Error::Invalid(format!("{name}: n must be 1 or 2, got {n}")));
    }
    let n = n as usize;
    let norm = p["alpha"].powi(2) + p["beta"].powi(2) + p["gamma"].powi(2);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!("{name}: alpha^2 + beta^2 + gamma^2 must be 1, got {norm}")));
    }
    let mut s = base(4 * n, p);
    s.jplus = block_diag(&vec![quaternion_block(["1", "0", "0"]); n]);
    s.jminus = block_diag(&vec![quaternion_block(["alpha", "beta", "gamma"]); n]);
    s.declared_scenarios = suites(n == 1);
    Ok(s)
}

fn kahler_product(params: &BTreeMap<String, f64>) -> Result<ManifoldSpec> {
    let p = take(params, &[("c1", 0.3), ("c2", 0.2)], "Z2")?;
    let mut s = base(4, p);
    let f1 = "exp(2*c1*sin(x1)*cos(x2))".to_string();
    let f2 = "exp(c2*(x3^2 + x4^2))".to_string();
    s.metric = diag(&[f1.clone(), f1, f2.clone(), f2]);
    let j = |sg: &str| -> Vec<Vec<String>> {
        let neg = if sg == "-" { "1" } else { "-1" };
        let pos = if sg == "-" { "-1" } else { "1" };
        vec![vec!["0".into(), neg.into()], vec![pos.into(), "0".into()]]
    };
    s.jplus = block_diag(&[j("+"), j("+")]);
    s.jminus = block_diag(&[j("+"), j("-")]);
    // J- reverses the orientation of the second factor
    s.declared_scenarios = GENERIC_SUITES.iter().map(|x| x.to_string()).collect();
    Ok(s)
}

fn two_blocks(name: &str, params: &BTreeMap<String, f64>) -> Result<ManifoldSpec> {
    let p = take(params, &[("a1", 0.0), ("a2", 0.5)], name)?;
    for k in ["a1", "a2"] {
        if !(p[k].abs() < 1.0) {
            return Err(Error::Invalid(format!("{name}: |{k}| must be below 1, got {}", p[k])));
        }
    }
    if p["a1"] == p["a2"] {
        return Err(Error::Invalid(format!("{name}: a1 and a2 must differ")));
    }
    let mut s = base(16, p);
    let jp = quaternion_block(["1", "0", "0"]);
    let jm = |a: &str| quaternion_block([a, &format!("sqrt(1 - {a}^2)"), "0"]);
    s.jplus = block_diag(&vec![jp; 4]);
    s.jminus = block_diag(&[jm("a1"), jm("a1"), jm("a2"), jm("a2")]);
    s.declared_scenarios = suites(false);
    Ok(s)
}

/// Spec of a named example with parameter overrides.
pub fn generate(name: &str, params: &BTreeMap<String, f64>) -> Result<ManifoldSpec> {
    match name {
        "Z1" => quaternionic(name, params),
        "Z2" => kahler_product(params),
        "Z3" => two_blocks(name, params),
        "Z4" => {
            let mut s = two_blocks(name, params)?;
            s.b[1][2] = "x1".into();
            s.b[2][1] = "-x1".into();
            Ok(s)
        }
        "Z5" => {
            let mut rest = params.clone();
            let count = rest.remove("count").unwrap_or(1000.0);
            let seed = rest.remove("seed").unwrap_or(0.0);
            if !(count >= 1.0 && count.fract() == 0.0 && seed >= 0.0 && seed.fract() == 0.0) {
                return Err(Error::Invalid("Z5: count and seed must be non-negative integers".into()));
            }
            if rest.get("n").is_some_and(|n| *n != 1.0) {
                return Err(Error::Invalid("Z5: the carrier patch is four-dimensional".into()));
            }
            let mut s = quaternionic(name, &rest)?;
            s.declared_scenarios = vec!["fourdim".into()];
            s.pointwise_sampler = Some(PointwiseSampler {
                count: count as usize,
                seed: seed as u64,
            });
            Ok(s)
        }
        _ => Err(Error::Invalid(format!("unknown zoo example '{name}' (expected one of {NAMES:?})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bihermitian::quaternion_left;

    fn p(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn blocks_match_quaternion_multiplication() {
        let s = generate("Z1", &p(&[("alpha", 0.36), ("beta", 0.48), ("gamma", 0.8)])).unwrap();
        let q = s.quadruple().unwrap();
        let jm = q.jminus.0.eval(&[0.0; 4]).unwrap();
        assert!((jm - quaternion_left([0.0, 0.36, 0.48, 0.8])).amax() < 1e-15);
        let jp = q.jplus.0.eval(&[0.0; 4]).unwrap();
        assert_eq!(jp, quaternion_left([0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn a_is_alpha_and_sigma_vanishes_for_j() {
        let s = generate("Z1", &p(&[("n", 2.0)])).unwrap();
        let q = s.quadruple().unwrap();
        let qp = q.at(&q.patch.center()).unwrap();
        assert_eq!(qp.dim(), 8);
        assert_eq!(qp.a().value, 0.0);
        assert_eq!(qp.sigma().val.amax(), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate("Z1", &p(&[("alpha", 0.5)])).is_err());
        assert!(generate("Z1", &p(&[("n", 3.0)])).is_err());
        assert!(generate("Z3", &p(&[("a1", 0.5)])).is_err());
        assert!(generate("Z2", &p(&[("alpha", 0.5)])).is_err());
        assert!(generate("Z9", &p(&[])).is_err());
    }

    #[test]
    fn z4_perturbs_b() {
        let q = generate("Z4", &p(&[])).unwrap().quadruple().unwrap();
        let qp = q.at(&[0.5; 16]).unwrap();
        assert_eq!(qp.b.val[(1, 2)], 0.5);
        assert_eq!(qp.h().get(0, 1, 2), 1.0);
    }
}
