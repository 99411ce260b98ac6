//! Direction quadrature, Herglotz waves, the discrete far-field operator and
//! regularized Herglotz approximation of interior fields.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, IncidentField, LsSolver, Medium, SolverOptions};
use crate::geometry::{GridSpec, Point};
use crate::linalg::DenseLu;
use crate::specialfn::check_wavenumber;

/// Equispaced trapezoidal rule on the unit circle, `φ_j = 2πj/N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct DirectionQuadrature {
    n: usize,
}

pub const MIN_DIRECTIONS: usize = 8;
pub const DEFAULT_DIRECTIONS: usize = 64;

impl DirectionQuadrature {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_DIRECTIONS {
            return Err(Error::Parameter(format!("need at least {MIN_DIRECTIONS} directions, got {n}")));
        }
        Ok(DirectionQuadrature { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n as f64
    }

    pub fn direction(&self, j: usize) -> Point {
        Point::from_polar(1.0, self.angle(j))
    }

    pub fn directions(&self) -> Vec<Point> {
        (0..self.n).map(|j| self.direction(j)).collect()
    }

    /// Index of the antipodal direction `-d_j` (requires even `N`).
    pub fn antipode(&self, j: usize) -> Option<usize> {
        (self.n % 2 == 0).then(|| (j + self.n / 2) % self.n)
    }
}

impl TryFrom<usize> for DirectionQuadrature {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        DirectionQuadrature::new(n)
    }
}

impl From<DirectionQuadrature> for usize {
    fn from(q: DirectionQuadrature) -> usize {
        q.n
    }
}

/// Density `g` of the Herglotz wave `v_g(x) = Σ_j w_j e^{ik x·d_j} g_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HerglotzDensity {
    pub quadrature: DirectionQuadrature,
    pub g: Vec<Complex64>,
}

impl HerglotzDensity {
    pub fn new(quadrature: DirectionQuadrature, g: Vec<Complex64>) -> Result<Self> {
        let d = HerglotzDensity { quadrature, g };
        d.validate()?;
        Ok(d)
    }

    pub fn from_fn(quadrature: DirectionQuadrature, f: impl Fn(f64) -> Complex64) -> Self {
        let g = (0..quadrature.len()).map(|j| f(quadrature.angle(j))).collect();
        HerglotzDensity { quadrature, g }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g.len() != self.quadrature.len() {
            return Err(Error::Shape(format!(
                "density has {} values for {} directions",
                self.g.len(),
                self.quadrature.len()
            )));
        }
        if self.g.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Parameter("density values must be finite".into()));
        }
        Ok(())
    }

    /// `(Σ_j w_j |g_j|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.quadrature.weight() * self.g.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn eval_at(&self, k: f64, p: Point) -> Complex64 {
        let w = self.quadrature.weight();
        let mut s = Complex64::new(0.0, 0.0);
        for (j, gj) in self.g.iter().enumerate() {
            s += Complex64::from_polar(1.0, k * p.dot(self.quadrature.direction(j))) * gj;
        }
        s * w
    }
}

/// Herglotz wave values at the given points.
pub fn herglotz_eval(g: &HerglotzDensity, k: f64, points: &[Point]) -> Result<Vec<Complex64>> {
    check_wavenumber(k)?;
    g.validate()?;
    Ok(points.par_iter().map(|&p| g.eval_at(k, p)).collect())
}

/// Samples `F_ij = u_∞(x̂_i, d_j)` on a direction quadrature, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFieldMatrix {
    pub k: f64,
    pub quadrature: DirectionQuadrature,
    pub entries: Vec<Complex64>,
}

impl FarFieldMatrix {
    pub fn new(k: f64, quadrature: DirectionQuadrature, entries: Vec<Complex64>) -> Result<Self> {
        check_wavenumber(k)?;
        let n = quadrature.len();
        if entries.len() != n * n {
            return Err(Error::Shape(format!("far-field matrix needs {} entries, got {}", n * n, entries.len())));
        }
        if entries.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Parameter("far-field entries must be finite".into()));
        }
        Ok(FarFieldMatrix { k, quadrature, entries })
    }

    pub fn n(&self) -> usize {
        self.quadrature.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n() + j]
    }

    pub fn to_mat(&self) -> Mat<Complex64> {
        Mat::from_fn(self.n(), self.n(), |i, j| self.get(i, j))
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max over offsets of ||F_{i,i+s} - mean_s|| / ||F||` (zero for a
    /// rotation-invariant scatterer).
    pub fn circulant_defect(&self) -> f64 {
        let n = self.n();
        let fro = self.frobenius();
        if fro == 0.0 {
            return 0.0;
        }
        let mut dev = 0.0;
        for s in 0..n {
            let diag: Vec<Complex64> = (0..n).map(|i| self.get(i, (i + s) % n)).collect();
            let mean = diag.iter().sum::<Complex64>() / n as f64;
            dev += diag.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>();
        }
        dev.sqrt() / fro
    }

    /// `||F - P Fᵀ P|| / ||F||` with `P` the antipodal permutation.
    pub fn reciprocity_defect(&self) -> Result<f64> {
        let n = self.n();
        let q = &self.quadrature;
        if q.antipode(0).is_none() {
            return Err(Error::Shape("reciprocity check needs an even number of directions".into()));
        }
        let fro = self.frobenius();
        if fro == 0.0 {
            return Ok(0.0);
        }
        let mut d = 0.0;
        for i in 0..n {
            for j in 0..n {
                // u_inf(x, d) = u_inf(-d, -x)
                let pt = self.get(q.antipode(j).unwrap(), q.antipode(i).unwrap());
                d += (self.get(i, j) - pt).norm_sqr();
            }
        }
        Ok(d.sqrt() / fro)
    }
}

/// Builds the far-field matrix with one factorization reused for all `N`
/// plane-wave directions.
pub fn assemble_far_field_matrix(
    med: &Medium,
    k: f64,
    quad: &DirectionQuadrature,
    spec: &GridSpec,
    opts: &SolverOptions,
) -> Result<FarFieldMatrix> {
    let solver = LsSolver::new(med, k, spec, opts)?;
    far_field_matrix_with(&solver, quad)
}

/// Far-field matrix from an existing solver.
pub fn far_field_matrix_with(solver: &LsSolver, quad: &DirectionQuadrature) -> Result<FarFieldMatrix> {
    let n = quad.len();
    let k = solver.system.k;
    let nodes = solver.system.unknowns();
    let dirs = quad.directions();
    if nodes == 0 {
        return FarFieldMatrix::new(k, *quad, vec![Complex64::new(0.0, 0.0); n * n]);
    }
    let pts: Vec<Point> = solver.system.nodes.iter().map(|&i| solver.system.spec.point(i)).collect();
    let mut rhs = Mat::from_fn(nodes, n, |p, j| Complex64::from_polar(1.0, k * pts[p].dot(dirs[j])));
    solver.solve_many(&mut rhs).map_err(|e| Error::Column { column: 0, source: Box::new(e) })?;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(j, col)| {
        let u: Vec<Complex64> = (0..nodes).map(|p| rhs[(p, j)]).collect();
        let ff = solver.system.far_field(&u, &dirs);
        col.copy_from_slice(&ff);
    });
    // entries currently hold column j in chunk j; transpose into row-major
    let mut row_major = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            row_major[i * n + j] = entries[j * n + i];
        }
    }
    FarFieldMatrix::new(k, *quad, row_major)
}

/// `(Fg)(x̂_i) = Σ_j F_ij w_j g_j`.
pub fn apply_f(f: &FarFieldMatrix, g: &HerglotzDensity) -> Result<Vec<Complex64>> {
    if f.quadrature != g.quadrature {
        return Err(Error::Shape(format!(
            "far-field matrix has {} directions, density {}",
            f.n(),
            g.quadrature.len()
        )));
    }
    g.validate()?;
    let n = f.n();
    let w = f.quadrature.weight();
    Ok((0..n).map(|i| (0..n).map(|j| f.get(i, j) * g.g[j]).sum::<Complex64>() * w).collect())
}

/// Result of a regularized Herglotz fit.
#[derive(Clone, Debug, Serialize)]
pub struct HerglotzFit {
    pub alpha: f64,
    pub density: HerglotzDensity,
    /// `||H g - target||_{L2(Ω)}`.
    pub error: f64,
    /// `error / ||target||_{L2(Ω)}` (0 for a zero target).
    pub relative_error: f64,
    pub density_norm: f64,
    pub objective: f64,
    /// Relative residual of the normal equations.
    pub normal_residual: f64,
}

/// Precomputed normal-equation data for fitting one target.
pub struct FitProblem {
    k: f64,
    quad: DirectionQuadrature,
    /// `H` restricted to the mask, row-major `(mask node, direction)`.
    h: Vec<Complex64>,
    target: Vec<Complex64>,
    cell: f64,
    gram: Mat<Complex64>,
    rhs: Vec<Complex64>,
}

impl FitProblem {
    pub fn new(target: &ComplexField2D, k: f64, quad: &DirectionQuadrature) -> Result<Self> {
        check_wavenumber(k)?;
        let idx: Vec<usize> = (0..target.len()).filter(|&i| target.mask[i]).collect();
        if idx.is_empty() {
            return Err(Error::Domain("target mask is empty".into()));
        }
        let n = quad.len();
        let w = quad.weight();
        let dirs = quad.directions();
        let h: Vec<Complex64> = idx
            .par_iter()
            .flat_map_iter(|&p| {
                let x = target.spec.point(p);
                dirs.iter().map(move |d| Complex64::from_polar(w, k * x.dot(*d))).collect::<Vec<_>>()
            })
            .collect();
        let t: Vec<Complex64> = idx.iter().map(|&p| target.values[p]).collect();
        let cell = target.spec.cell_area();
        let m = idx.len();
        let gram_rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| (0..m).map(|p| h[p * n + a].conj() * h[p * n + b]).sum::<Complex64>() * cell)
                    .collect()
            })
            .collect();
        let gram = Mat::from_fn(n, n, |a, b| gram_rows[a][b]);
        let rhs = (0..n).map(|a| (0..m).map(|p| h[p * n + a].conj() * t[p]).sum::<Complex64>() * cell).collect();
        Ok(FitProblem { k, quad: *quad, h, target: t, cell, gram, rhs })
    }

    fn apply_h(&self, g: &[Complex64]) -> Vec<Complex64> {
        let n = self.quad.len();
        (0..self.target.len()).map(|p| (0..n).map(|j| self.h[p * n + j] * g[j]).sum()).collect()
    }

    pub fn target_norm(&self) -> f64 {
        (self.cell * self.target.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Objective `||Hg - t||²_{L2(Ω)} + α ||g||²` and its two terms.
    pub fn objective(&self, g: &[Complex64], alpha: f64) -> (f64, f64, f64) {
        let r = self.apply_h(g);
        let err2 = self.cell * r.iter().zip(&self.target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        let norm2 = self.quad.weight() * g.iter().map(|v| v.norm_sqr()).sum::<f64>();
        (err2 + alpha * norm2, err2.sqrt(), norm2.sqrt())
    }

    pub fn solve(&self, alpha: f64) -> Result<HerglotzFit> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("regularization must be > 0, got {alpha}")));
        }
        let n = self.quad.len();
        let w = self.quad.weight();
        let g = if self.rhs.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            vec![Complex64::new(0.0, 0.0); n]
        } else {
            let a = Mat::from_fn(n, n, |i, j| self.gram[(i, j)] + if i == j { alpha * w } else { 0.0 });
            DenseLu::new(a.as_ref())?.solve_vec(&self.rhs)
        };
        let mut res = 0.0;
        for i in 0..n {
            let mut s = g[i] * (alpha * w) - self.rhs[i];
            for j in 0..n {
                s += self.gram[(i, j)] * g[j];
            }
            res += s.norm_sqr();
        }
        let rn = self.rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let normal_residual = if rn == 0.0 { 0.0 } else { res.sqrt() / rn };
        let (objective, error, density_norm) = self.objective(&g, alpha);
        let tn = self.target_norm();
        Ok(HerglotzFit {
            alpha,
            density: HerglotzDensity { quadrature: self.quad, g },
            error,
            relative_error: if tn == 0.0 { 0.0 } else { error / tn },
            density_norm,
            objective,
            normal_residual,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Minimizes `||H g - target||²_{L2(Ω)} + α ||g||²` over densities.
pub fn herglotz_fit(target: &ComplexField2D, k: f64, quad: &DirectionQuadrature, alpha: f64) -> Result<HerglotzFit> {
    FitProblem::new(target, k, quad)?.solve(alpha)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub alpha: f64,
    pub error: f64,
    pub relative_error: f64,
    pub density_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityGrowthProfile {
    pub rows: Vec<GrowthRow>,
    pub error_nonincreasing: bool,
    pub norm_nondecreasing: bool,
    pub norm_strictly_increasing: bool,
    /// `||g||` at the last α over `||g||` at the first (NaN when both vanish).
    pub growth_ratio: f64,
}

/// The default sweep `10^-2, ..., 10^-8`.
pub fn default_alpha_sweep() -> Vec<f64> {
    (2..=8).map(|e| 10f64.powi(-e)).collect()
}

/// One fit per α of a strictly decreasing sequence, with monotonicity flags.
pub fn density_growth_profile(
    target: &ComplexField2D,
    k: f64,
    quad: &DirectionQuadrature,
    alphas: &[f64],
) -> Result<DensityGrowthProfile> {
    if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0)) || alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("alpha sequence must be positive and strictly decreasing".into()));
    }
    let problem = FitProblem::new(target, k, quad)?;
    let rows: Vec<GrowthRow> = alphas
        .iter()
        .map(|&a| {
            problem.solve(a).map(|f| GrowthRow {
                alpha: a,
                error: f.error,
                relative_error: f.relative_error,
                density_norm: f.density_norm,
            })
        })
        .collect::<Result<_>>()?;
    // relative slack absorbs rounding when consecutive fits coincide
    let slack = 1e-9;
    let error_nonincreasing = rows.windows(2).all(|w| w[1].error <= w[0].error * (1.0 + slack) + 1e-300);
    let norm_nondecreasing = rows.windows(2).all(|w| w[1].density_norm >= w[0].density_norm * (1.0 - slack));
    let norm_strictly_increasing = rows.windows(2).all(|w| w[1].density_norm > w[0].density_norm);
    let first = rows[0].density_norm;
    let last = rows[rows.len() - 1].density_norm;
    Ok(DensityGrowthProfile {
        growth_ratio: if first == 0.0 { f64::NAN } else { last / first },
        rows,
        error_nonincreasing,
        norm_nondecreasing,
        norm_strictly_increasing,
    })
}

/// Herglotz incident field descriptor for a density.
pub fn herglotz_incident(g: &HerglotzDensity) -> IncidentField {
    IncidentField::Herglotz { density: g.clone() }
}
