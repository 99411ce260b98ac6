//! Forward scattering by a penetrable inhomogeneity.

pub mod field;
pub mod incident;
pub mod lippmann;
pub mod medium;
pub mod mie;

use num_complex::Complex64;

pub use field::ComplexField2D;
pub use incident::{incident_eval, IncidentField};
pub use lippmann::{gamma2, LsSolver, LsSystem, ScatteringSolution, SolveMethod, SolveReport, SolverOptions};
pub use medium::{Contrast, ContrastSampling, Medium};
pub use mie::MieDisk;

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point};
use crate::specialfn::check_wavenumber;

/// Solves the scattering problem for one incident field on `spec`.
pub fn solve_scattering(
    med: &Medium,
    k: f64,
    inc: &IncidentField,
    spec: &GridSpec,
    opts: &SolverOptions,
) -> Result<ScatteringSolution> {
    check_wavenumber(k)?;
    inc.validate(&med.domain)?;
    let solver = LsSolver::new(med, k, spec, opts)?;
    let mask = spec.points().map(|p| med.domain.contains(p)).collect();
    solver.solve_incident(inc, mask)
}

fn check_directions(directions: &[Point]) -> Result<()> {
    for d in directions {
        if (d.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("direction ({}, {}) is not unit", d.x, d.y)));
        }
    }
    Ok(())
}

/// `u_∞(x̂) = γ₂ k² ∫_Ω e^{-ik x̂·y} V(y) u(y) dy` by grid quadrature.
pub fn far_field(med: &Medium, k: f64, u: &ComplexField2D, directions: &[Point]) -> Result<Vec<Complex64>> {
    check_wavenumber(k)?;
    check_directions(directions)?;
    let v = med.sample(&u.spec);
    let c = gamma2(k) * (k * k * u.spec.cell_area());
    let support: Vec<(Point, f64, Complex64)> = (0..u.spec.len())
        .filter(|&i| v[i] != 0.0)
        .map(|i| (u.spec.point(i), v[i], u.values[i]))
        .collect();
    Ok(directions
        .iter()
        .map(|d| {
            let mut s = Complex64::new(0.0, 0.0);
            for &(p, vq, uq) in &support {
                s += Complex64::from_polar(vq, -k * d.dot(p)) * uq;
            }
            s * c
        })
        .collect())
}

/// `n` equispaced unit directions starting at angle 0.
pub fn equispaced_directions(n: usize) -> Vec<Point> {
    (0..n).map(|j| Point::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64)).collect()
}
