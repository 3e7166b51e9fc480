//! Levi-Civita connection, covariant derivatives of endomorphisms, Lie
//! brackets and the Nijenhuis tensor.

use nalgebra::DMatrix;

use super::{JetMat, MetricPair};
use crate::error::{Error, Result};
use crate::expr::Jet;

/// `Γ^k_ij`, symmetric in `i, j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffels {
    pub n: usize,
    data: Vec<f64>,
}

impl Christoffels {
    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn flat(n: usize) -> Self {
        Christoffels {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn christoffels(metric: &MetricPair) -> Christoffels {
    let n = metric.g.nrows();
    let dg = &metric.g.d;
    let gi = &metric.g_inv.val;
    // lowered symbols Γ_lij
    let mut lower = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                lower[(l * n + i) * n + j] =
                    0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
            }
        }
    }
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                data[(k * n + i) * n + j] =
                    (0..n).map(|l| gi[(k, l)] * lower[(l * n + i) * n + j]).sum();
            }
        }
    }
    Christoffels { n, data }
}

/// `max |∇_i g_jk|`.
pub fn metric_compatibility_residual(metric: &MetricPair, gamma: &Christoffels) -> f64 {
    let n = gamma.n;
    let g = &metric.g.val;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = metric.g.d[i][(j, k)];
                for l in 0..n {
                    v -= gamma.get(l, i, j) * g[(l, k)] + gamma.get(l, i, k) * g[(j, l)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// `(∇_i A)^k_j = ∂_i A^k_j + Γ^k_il A^l_j − Γ^l_ij A^k_l`, returned as one
/// matrix per direction `i`.
pub fn covariant_deriv_endo(a: &JetMat, gamma: &Christoffels) -> Vec<DMatrix<f64>> {
    let n = gamma.n;
    let av = &a.val;
    (0..n)
        .map(|i| {
            let gi = DMatrix::from_fn(n, n, |k, l| gamma.get(k, i, l));
            &a.d[i] + &gi * av - av * &gi
        })
        .collect()
}

/// Metric norm of a (1,2)-tensor `T_i^k_j` stored as `t[i][(k, j)]`.
pub fn full_norm_3(t: &[DMatrix<f64>], g: &DMatrix<f64>, g_inv: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for ip in 0..n {
            let gii = g_inv[(i, ip)];
            if gii == 0.0 {
                continue;
            }
            // Σ g_kk' g^jj' T_i^k_j T_i'^k'_j' = tr(Tᵢᵀ g T_i' g⁻¹)
            let m = t[i].transpose() * g * &t[ip] * g_inv;
            s += gii * m.trace();
        }
    }
    s.max(0.0).sqrt()
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket(x: &[Jet], y: &[Jet]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| x[j].value * y[i].d(j) - y[j].value * x[i].d(j))
                .sum()
        })
        .collect()
}

/// Nijenhuis tensor on coordinate fields, `N(∂_i, ∂_j)^k` stored at
/// `[(i * n + j) * n + k]`.
///
/// `N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]`.
pub fn nijenhuis(j: &JetMat, point: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = j.nrows();
    let sq = &j.val * &j.val + DMatrix::identity(n, n);
    if sq.amax() > tol {
        return Err(Error::Validation {
            check: "almost complex structure (J² = −Id)".into(),
            residual: sq.amax(),
            point: point.to_vec(),
        });
    }
    let dim = j.dim();
    let coord = |i: usize| -> Vec<Jet> {
        (0..n)
            .map(|k| Jet::constant(if k == i { 1.0 } else { 0.0 }, dim))
            .collect()
    };
    let cols: Vec<Vec<Jet>> = (0..n).map(|i| j.column(i)).collect();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|r| (0..n).map(|c| j.val[(r, c)] * v[c]).sum())
            .collect()
    };
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            let t1 = lie_bracket(&cols[a], &cols[b]);
            let t2 = apply(&lie_bracket(&cols[a], &coord(b)));
            let t3 = apply(&lie_bracket(&coord(a), &cols[b]));
            for k in 0..n {
                out[(a * n + b) * n + k] = t1[k] - t2[k] - t3[k];
            }
        }
    }
    Ok(out)
}
