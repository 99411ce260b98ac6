//! Discrete Lippmann–Schwinger equation `u = u^i + k² ∫ Φ(·,y) V(y) u(y) dy`
//! collocated at the grid nodes carrying nonzero contrast.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::field::ComplexField2D;
use crate::forward::incident::IncidentField;
use crate::forward::medium::Medium;
use crate::geometry::{GridSpec, Point};
use crate::linalg::{gmres, norm2, DenseLu, GmresReport};
use crate::specialfn::{check_wavenumber, hankel1_seq, phi_radial};

/// Largest `k h` accepted in strict mode.
pub const MAX_KH: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub strict: bool,
    /// Dense LU up to this many unknowns, matrix-free GMRES above.
    pub dense_limit: usize,
    pub gmres_tol: f64,
    pub gmres_max_iter: usize,
    pub gmres_restart: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { strict: false, dense_limit: 4000, gmres_tol: 1e-10, gmres_max_iter: 2000, gmres_restart: 80 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Trivial,
    DenseLu,
    Gmres,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub unknowns: usize,
    pub method: SolveMethod,
    pub relative_residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Translation-invariant Lippmann–Schwinger operator on one grid.
pub struct LsSystem {
    pub spec: GridSpec,
    pub k: f64,
    /// Grid indices of the unknowns (nodes with `V != 0`).
    pub nodes: Vec<usize>,
    /// Contrast at each unknown.
    pub contrast: Vec<f64>,
    /// Contrast on every grid node.
    pub contrast_grid: Vec<f64>,
    /// `G(|di|, |dj|)`: `h² Φ` off the diagonal, the self-cell integral at 0.
    table: Vec<Complex64>,
    ij: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

/// `∫_{|y| < a} Φ(0, y) dy` for the disk of radius `a`.
pub fn self_cell_integral(k: f64, a: f64) -> Complex64 {
    let h1 = hankel1_seq(1, k * a).expect("positive argument")[1];
    Complex64::new(0.0, PI * a / (2.0 * k)) * h1 - Complex64::new(1.0 / (k * k), 0.0)
}

/// Resolution check shared by every grid-based solver.
pub fn check_resolution(k: f64, h: f64, strict: bool, warnings: &mut Vec<String>) -> Result<()> {
    if k * h > MAX_KH {
        let msg = format!("k h = {:.3} exceeds {MAX_KH} (fewer than ~12 points per wavelength)", k * h);
        if strict {
            return Err(Error::Resolution(msg));
        }
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(())
}

impl LsSystem {
    pub fn new(med: &Medium, k: f64, spec: &GridSpec, opts: &SolverOptions) -> Result<Self> {
        check_wavenumber(k)?;
        spec.check_covers(&med.domain)?;
        let mut warnings = Vec::new();
        check_resolution(k, spec.h, opts.strict, &mut warnings)?;
        let contrast_grid = med.sample(spec);
        let nodes: Vec<usize> = (0..spec.len()).filter(|&i| contrast_grid[i] != 0.0).collect();
        let contrast = nodes.iter().map(|&i| contrast_grid[i]).collect();
        let ij = nodes.iter().map(|&i| spec.coords(i)).collect();
        let h = spec.h;
        let nx = spec.nx;
        let table: Vec<Complex64> = (0..spec.len())
            .into_par_iter()
            .map(|t| {
                let (di, dj) = (t % nx, t / nx);
                if di == 0 && dj == 0 {
                    self_cell_integral(k, h / PI.sqrt())
                } else {
                    let r = h * ((di * di + dj * dj) as f64).sqrt();
                    phi_radial(k * r) * (h * h)
                }
            })
            .collect();
        Ok(LsSystem { spec: *spec, k, nodes, contrast, contrast_grid, table, ij, warnings })
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    fn kernel(&self, a: (usize, usize), b: (usize, usize)) -> Complex64 {
        let di = a.0.abs_diff(b.0);
        let dj = a.1.abs_diff(b.1);
        self.table[dj * self.spec.nx + di]
    }

    /// `y = (I - k² G V) x` on the unknowns.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let k2 = self.k * self.k;
        let vx: Vec<Complex64> = x.iter().zip(&self.contrast).map(|(a, &v)| a * v).collect();
        y.par_iter_mut().enumerate().for_each(|(p, out)| {
            let a = self.ij[p];
            let mut s = Complex64::new(0.0, 0.0);
            for (q, vq) in vx.iter().enumerate() {
                s += self.kernel(a, self.ij[q]) * vq;
            }
            *out = x[p] - s * k2;
        });
    }

    /// Dense system matrix `I - k² G V`.
    pub fn dense_matrix(&self) -> Mat<Complex64> {
        let n = self.unknowns();
        let k2 = self.k * self.k;
        Mat::from_fn(n, n, |p, q| {
            let g = self.kernel(self.ij[p], self.ij[q]) * (-k2 * self.contrast[q]);
            if p == q {
                g + 1.0
            } else {
                g
            }
        })
    }

    /// `k² Σ_q G(x_p, y_q) V_q u_q` at every grid node.
    pub fn volume_potential(&self, u: &[Complex64]) -> Vec<Complex64> {
        let k2 = self.k * self.k;
        let vu: Vec<Complex64> = u.iter().zip(&self.contrast).map(|(a, &v)| a * v * k2).collect();
        let spec = self.spec;
        (0..spec.len())
            .into_par_iter()
            .map(|p| {
                let a = spec.coords(p);
                let mut s = Complex64::new(0.0, 0.0);
                for (q, w) in vu.iter().enumerate() {
                    s += self.kernel(a, self.ij[q]) * w;
                }
                s
            })
            .collect()
    }

    /// Far field `γ₂ k² h² Σ_q e^{-ik x̂·y_q} V_q u_q` at each direction.
    pub fn far_field(&self, u: &[Complex64], directions: &[Point]) -> Vec<Complex64> {
        let k = self.k;
        let c = gamma2(k) * (k * k * self.spec.cell_area());
        let pts: Vec<Point> = self.nodes.iter().map(|&i| self.spec.point(i)).collect();
        directions
            .iter()
            .map(|d| {
                let mut s = Complex64::new(0.0, 0.0);
                for ((p, &v), uq) in pts.iter().zip(&self.contrast).zip(u) {
                    s += Complex64::from_polar(v, -k * d.dot(*p)) * uq;
                }
                s * c
            })
            .collect()
    }

    /// Incident values at the unknowns.
    pub fn incident_at_nodes(&self, inc: &IncidentField) -> Result<Vec<Complex64>> {
        let pts: Vec<Point> = self.nodes.iter().map(|&i| self.spec.point(i)).collect();
        inc.eval_points(self.k, &pts)
    }
}

/// `γ₂ = e^{iπ/4} / √(8πk)`.
pub fn gamma2(k: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), PI / 4.0)
}

/// Factorized (or iterative) solver reused across right-hand sides.
pub struct LsSolver {
    pub system: LsSystem,
    lu: Option<DenseLu>,
    opts: SolverOptions,
}

impl LsSolver {
    pub fn new(med: &Medium, k: f64, spec: &GridSpec, opts: &SolverOptions) -> Result<Self> {
        let system = LsSystem::new(med, k, spec, opts)?;
        let n = system.unknowns();
        let lu = if n > 0 && n <= opts.dense_limit {
            Some(DenseLu::new(system.dense_matrix().as_ref())?)
        } else {
            None
        };
        Ok(LsSolver { system, lu, opts: opts.clone() })
    }

    pub fn method(&self) -> SolveMethod {
        if self.system.unknowns() == 0 {
            SolveMethod::Trivial
        } else if self.lu.is_some() {
            SolveMethod::DenseLu
        } else {
            SolveMethod::Gmres
        }
    }

    /// Solves `(I - k² G V) u = b` on the unknowns.
    pub fn solve_nodes(&self, b: &[Complex64]) -> Result<(Vec<Complex64>, SolveReport)> {
        let n = self.system.unknowns();
        if b.len() != n {
            return Err(Error::Shape(format!("right-hand side has {} entries, expected {n}", b.len())));
        }
        let (u, iterations) = match (&self.lu, n) {
            (_, 0) => (Vec::new(), 0),
            (Some(lu), _) => (lu.solve_vec(b), 0),
            (None, _) => {
                let (u, GmresReport { iterations, .. }) = gmres(
                    |x, y| self.system.apply(x, y),
                    b,
                    self.opts.gmres_tol,
                    self.opts.gmres_max_iter,
                    self.opts.gmres_restart,
                )?;
                (u, iterations)
            }
        };
        let relative_residual = self.residual(&u, b);
        Ok((
            u,
            SolveReport {
                unknowns: n,
                method: self.method(),
                relative_residual,
                iterations,
                warnings: self.system.warnings.clone(),
            },
        ))
    }

    /// Solves for several right-hand sides (columns of `b`).
    pub fn solve_many(&self, b: &mut Mat<Complex64>) -> Result<()> {
        match &self.lu {
            Some(lu) => {
                lu.solve_mat(b);
                Ok(())
            }
            None => {
                for j in 0..b.ncols() {
                    let col: Vec<Complex64> = (0..b.nrows()).map(|i| b[(i, j)]).collect();
                    let (u, _) = self.solve_nodes(&col)?;
                    for (i, v) in u.into_iter().enumerate() {
                        b[(i, j)] = v;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn residual(&self, u: &[Complex64], b: &[Complex64]) -> f64 {
        let bn = norm2(b);
        if bn == 0.0 {
            return norm2(u);
        }
        let mut au = vec![Complex64::new(0.0, 0.0); u.len()];
        self.system.apply(u, &mut au);
        let d: Vec<Complex64> = au.iter().zip(b).map(|(a, c)| a - c).collect();
        norm2(&d) / bn
    }
}

/// Total and scattered fields of one forward solve.
#[derive(Clone, Debug)]
pub struct ScatteringSolution {
    pub total: ComplexField2D,
    pub scattered: ComplexField2D,
    /// Total field at the unknowns (the far-field density).
    pub nodal: Vec<Complex64>,
    pub report: SolveReport,
}

impl LsSolver {
    /// Full-grid solve for one incident field.
    pub fn solve_incident(&self, inc: &IncidentField, domain_mask: Vec<bool>) -> Result<ScatteringSolution> {
        let spec = self.system.spec;
        let b = self.system.incident_at_nodes(inc)?;
        let (u, report) = self.solve_nodes(&b)?;
        let pts: Vec<Point> = spec.points().collect();
        let ui = inc.eval_points(self.system.k, &pts)?;
        let us = if u.is_empty() { vec![Complex64::new(0.0, 0.0); spec.len()] } else { self.system.volume_potential(&u) };
        let total: Vec<Complex64> = ui.iter().zip(&us).map(|(a, b)| a + b).collect();
        Ok(ScatteringSolution {
            total: ComplexField2D::new(spec, total, domain_mask.clone())?,
            scattered: ComplexField2D::new(spec, us, domain_mask)?,
            nodal: u,
            report,
        })
    }
}
