//! Tensor calculus on a single coordinate patch.
//!
//! Fields are arrays of [`Expr`]; evaluating them at a point yields jets, so
//! every exterior derivative, bracket, and connection term below is exact up
//! to floating point.

mod connection;
mod forms;
mod jetmat;

pub use connection::{
    christoffels, covariant_deriv_endo, full_norm_3, lie_bracket, metric_compatibility_residual,
    nijenhuis, Christoffels,
};
pub use forms::{
    d0, d1, d2, hodge_star, interior_1, interior_2, interior_3, wedge_11, wedge_12, Form,
    ThreeForm,
};
pub use jetmat::JetMat;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr_with_params, Expr, Jet, Params};

/// How sample points are laid out over the patch box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SamplePlan {
    /// Points per axis of the interior grid.
    pub grid: usize,
    /// Number of seeded uniform random points.
    pub random: usize,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            grid: 5,
            random: 64,
            seed: 0,
        }
    }
}

/// Full tensor grids are used while they stay below this many points;
/// beyond that the grid degrades to per-axis lines through the centre.
pub const MAX_TENSOR_GRID: usize = 1024;

/// Fraction of each box side kept clear of the boundary.
const BOUNDARY_OFFSET: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub dim: usize,
    pub coords: Vec<String>,
    pub domain: Vec<(f64, f64)>,
    pub plan: SamplePlan,
}

impl Patch {
    pub fn new(coords: Vec<String>, domain: Vec<(f64, f64)>, plan: SamplePlan) -> Result<Self> {
        let dim = coords.len();
        if dim < 2 {
            return Err(Error::Invalid(format!("patch dimension must be at least 2, got {dim}")));
        }
        if domain.len() != dim {
            return Err(Error::Shape(format!(
                "domain has {} intervals for {dim} coordinates",
                domain.len()
            )));
        }
        if let Some((i, (lo, hi))) = domain.iter().enumerate().find(|(_, (lo, hi))| !(lo < hi)) {
            return Err(Error::Invalid(format!(
                "empty domain interval [{lo}, {hi}] for coordinate {}",
                coords[i]
            )));
        }
        Ok(Patch {
            dim,
            coords,
            domain,
            plan,
        })
    }

    /// Coordinates `x1..xn` on `[-1, 1]^n` with the default plan.
    pub fn standard(dim: usize) -> Result<Self> {
        Patch::new(
            (1..=dim).map(|i| format!("x{i}")).collect(),
            vec![(-1.0, 1.0); dim],
            SamplePlan::default(),
        )
    }

    fn inner(&self, axis: usize) -> (f64, f64) {
        let (lo, hi) = self.domain[axis];
        let w = hi - lo;
        (lo + BOUNDARY_OFFSET * w, hi - BOUNDARY_OFFSET * w)
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dim).map(|a| {
            let (lo, hi) = self.domain[a];
            0.5 * (lo + hi)
        }).collect()
    }

    fn axis_values(&self, axis: usize, n: usize) -> Vec<f64> {
        let (lo, hi) = self.inner(axis);
        if n <= 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|t| lo + (hi - lo) * t as f64 / (n - 1) as f64)
            .collect()
    }

    fn grid_points(&self, n: usize) -> Vec<Vec<f64>> {
        if n == 0 {
            return Vec::new();
        }
        let axes: Vec<Vec<f64>> = (0..self.dim).map(|a| self.axis_values(a, n)).collect();
        let total = (n as f64).powi(self.dim as i32);
        if total <= MAX_TENSOR_GRID as f64 {
            let mut pts = vec![Vec::new()];
            for ax in &axes {
                pts = pts
                    .into_iter()
                    .flat_map(|p| {
                        ax.iter().map(move |&x| {
                            let mut q = p.clone();
                            q.push(x);
                            q
                        })
                    })
                    .collect();
            }
            pts
        } else {
            let c = self.center();
            let mut pts = vec![c.clone()];
            for (a, ax) in axes.iter().enumerate() {
                for &x in ax {
                    let mut q = c.clone();
                    q[a] = x;
                    if q != c {
                        pts.push(q);
                    }
                }
            }
            pts
        }
    }

    fn random_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                (0..self.dim)
                    .map(|a| {
                        let (lo, hi) = self.inner(a);
                        rng.gen_range(lo..hi)
                    })
                    .collect()
            })
            .collect()
    }

    /// All sample points of the plan, in a fixed order.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let mut pts = self.grid_points(self.plan.grid);
        pts.extend(self.random_points(self.plan.random, self.plan.seed));
        pts
    }

    /// Small point set used for load-time validation.
    pub fn pre_grid(&self) -> Vec<Vec<f64>> {
        let mut pts = self.grid_points(3);
        pts.extend(self.random_points(16, self.plan.seed ^ 0x5eed));
        pts
    }
}

/// Square or rectangular array of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Expr>,
}

impl ExprMatrix {
    pub fn parse(
        text: &[Vec<String>],
        coords: &[String],
        params: &Params,
        what: &str,
    ) -> Result<Self> {
        let n = coords.len();
        if text.len() != n || text.iter().any(|r| r.len() != n) {
            let shape: Vec<usize> = text.iter().map(Vec::len).collect();
            return Err(Error::Shape(format!(
                "{what} must be {n}x{n}, got {} rows with lengths {shape:?}",
                text.len()
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in text.iter().enumerate() {
            for (c, s) in row.iter().enumerate() {
                let e = parse_expr_with_params(s, coords, params).map_err(|e| {
                    Error::Invalid(format!("{what}[{r}][{c}] = \"{s}\": {e}"))
                })?;
                entries.push(e);
            }
        }
        Ok(ExprMatrix {
            rows: n,
            cols: n,
            entries,
        })
    }

    pub fn from_constant(m: &DMatrix<f64>) -> Self {
        ExprMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            entries: (0..m.nrows())
                .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
                .map(|(r, c)| Expr::Const(m[(r, c)]))
                .collect(),
        }
    }

    pub fn eval_jet(&self, p: &[f64]) -> Result<JetMat> {
        let jets = self
            .entries
            .iter()
            .map(|e| e.eval_jet(p))
            .collect::<Result<Vec<_>>>()?;
        if jets.is_empty() {
            return Ok(JetMat::zeros(self.rows, self.cols, p.len()));
        }
        Ok(JetMat::from_jets(self.rows, self.cols, &jets))
    }

    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let vals = self
            .entries
            .iter()
            .map(|e| e.eval(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &vals))
    }

    /// Printable entries (row-major) for emitting spec files.
    pub fn to_strings(&self, coords: &[String]) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.entries[r * self.cols + c].display_with(coords).to_string())
                    .collect()
            })
            .collect()
    }
}

/// Vector of expressions: a vector field or a one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprVector(pub Vec<Expr>);

impl ExprVector {
    pub fn parse(text: &[String], coords: &[String], params: &Params, what: &str) -> Result<Self> {
        if text.len() != coords.len() {
            return Err(Error::Shape(format!(
                "{what} must have {} components, got {}",
                coords.len(),
                text.len()
            )));
        }
        text.iter()
            .map(|s| {
                parse_expr_with_params(s, coords, params)
                    .map_err(|e| Error::Invalid(format!("{what} = \"{s}\": {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(ExprVector)
    }

    pub fn eval_jet(&self, p: &[f64]) -> Result<Vec<Jet>> {
        self.0.iter().map(|e| e.eval_jet(p)).collect()
    }
}

/// Riemannian metric `g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField(pub ExprMatrix);

/// Two-form `b_ij`, antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormField(pub ExprMatrix);

/// Endomorphism `J^i_j` (row = upper index).
#[derive(Debug, Clone, PartialEq)]
pub struct EndoField(pub ExprMatrix);

/// Complex two-form given by real and imaginary component arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTwoFormField {
    pub re: ExprMatrix,
    pub im: ExprMatrix,
}

/// Metric and its inverse, both as jets.
#[derive(Debug, Clone)]
pub struct MetricPair {
    pub g: JetMat,
    pub g_inv: JetMat,
}

/// Evaluate `g` and `g⁻¹` at `p`, failing if `g` is not positive definite.
pub fn metric_sharp_flat(g: &MetricField, p: &[f64]) -> Result<MetricPair> {
    let g = g.0.eval_jet(p)?;
    metric_pair(g, p)
}

pub fn metric_pair(g: JetMat, p: &[f64]) -> Result<MetricPair> {
    check_positive_definite(&g.val, p)?;
    let g_inv = g.inverse("metric", p)?;
    Ok(MetricPair { g, g_inv })
}

/// Minimum-norm least-squares solution of `A x = b` and an orthonormal basis
/// of `ker A`, from the symmetric eigen-decomposition of `AᵀA`. Eigenvalues
/// below `rel_tol · λ_max` count as zero.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> (DVector<f64>, Vec<DVector<f64>>) {
    let eig = (a.transpose() * a).symmetric_eigen();
    let cut = rel_tol * eig.eigenvalues.amax();
    let atb = a.transpose() * b;
    let mut x = DVector::zeros(a.ncols());
    let mut kernel = Vec::new();
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        if *lam > cut && *lam > 0.0 {
            x += v * (v.dot(&atb) / lam);
        } else {
            kernel.push(v.into_owned());
        }
    }
    (x, kernel)
}

pub fn check_positive_definite(g: &DMatrix<f64>, p: &[f64]) -> Result<()> {
    let sym = (g + g.transpose()) * 0.5;
    if (g - &sym).amax() > 1e-12 * (1.0 + g.amax()) || sym.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite { point: p.to_vec() });
    }
    Ok(())
}

/// `g(u, v)` for value vectors.
pub fn inner(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += u[i] * g[(i, j)] * v[j];
        }
    }
    s
}

pub fn mat_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * v[c]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_inverse_has_zero_gradient() {
        let m = MetricField(ExprMatrix::from_constant(&DMatrix::identity(3, 3)));
        let pair = metric_sharp_flat(&m, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(pair.g_inv.val, DMatrix::identity(3, 3));
        assert!(pair.g_inv.d.iter().all(|d| d.amax() == 0.0));
    }

    #[test]
    fn conformal_inverse_gradient() {
        let coords = vec!["x1".to_string(), "x2".to_string()];
        let text = vec![
            vec!["exp(2*x1)".to_string(), "0".to_string()],
            vec!["0".to_string(), "exp(2*x1)".to_string()],
        ];
        let m = MetricField(ExprMatrix::parse(&text, &coords, &Params::new(), "metric").unwrap());
        let pair = metric_sharp_flat(&m, &[0.0, 0.4]).unwrap();
        assert!((&pair.g_inv.val - DMatrix::identity(2, 2)).amax() < 1e-15);
        assert!((&pair.g_inv.d[0] + DMatrix::identity(2, 2) * 2.0).amax() < 1e-15);
        assert!(pair.g_inv.d[1].amax() == 0.0);
    }

    /// Gaussian elimination with partial pivoting, independent of nalgebra's inverse.
    fn gauss_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                let mut row: Vec<f64> = (0..n).map(|c| a[(r, c)]).collect();
                row.extend((0..n).map(|c| if c == r { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            let d = m[col][col];
            for v in m[col].iter_mut() {
                *v /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = m[r][col];
                    let pivot_row = m[col].clone();
                    for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        DMatrix::from_fn(n, n, |r, c| m[r][n + c])
    }

    #[test]
    fn random_spd_inverse_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let spd = &a * a.transpose() + DMatrix::identity(4, 4) * 0.5;
        let pair = metric_pair(JetMat::constant(spd.clone(), 4), &[0.0; 4]).unwrap();
        assert!((&pair.g_inv.val - gauss_inverse(&spd)).amax() < 1e-12);
        assert!((&spd * &pair.g_inv.val - DMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn indefinite_metric_rejected() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(
            metric_pair(JetMat::constant(g, 2), &[0.3, 0.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_interior() {
        let p = Patch::standard(3).unwrap();
        let a = p.sample_points();
        assert_eq!(a, p.sample_points());
        assert_eq!(a.len(), 125 + 64);
        assert!(a.iter().flatten().all(|x| x.abs() <= 0.9 + 1e-15));
        let big = Patch::standard(8).unwrap();
        assert_eq!(big.sample_points().len(), 1 + 8 * 4 + 64);
    }

    #[test]
    fn shape_errors() {
        let coords = vec!["x1".to_string(), "x2".to_string()];
        let text = vec![vec!["1".to_string(); 3]; 2];
        assert!(matches!(
            ExprMatrix::parse(&text, &coords, &Params::new(), "metric"),
            Err(Error::Shape(_))
        ));
        assert!(Patch::new(coords.clone(), vec![(0.0, 0.0), (0.0, 1.0)], SamplePlan::default()).is_err());
    }
}
