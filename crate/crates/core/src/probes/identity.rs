//! The Green identity behind corner vanishing: for a transmission pair and
//! a harmonic `u₀ = e^{s ρ·(x - x_c)}` (`ρ·ρ = 0`),
//! `k² ∫_{S_h} (v - (1+V)u) u₀ = ∫_{Λ_h} ∂_ν(u-v) u₀ - (u-v) ∂_ν u₀`
//! with `S_h = B_h(x_c) ∩ Ω` and `Λ_h = ∂B_h(x_c) ∩ Ω`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, Medium};
use crate::geometry::Point;
use crate::teig::TransmissionEigenpair;

/// Fewest grid nodes that must fall inside `S_h`.
pub const MIN_SECTOR_NODES: usize = 20;
const RADIAL_NODES: usize = 24;
const ANGULAR_NODES: usize = 1440;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySample {
    pub s: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub defect: f64,
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, z);
                for j in 2..=n {
                    let q2 = ((2 * j - 1) as f64 * z * q1 - (j - 1) as f64 * q0) / j as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = -z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
    }
    (x, w)
}

fn interp(f: &ComplexField2D, p: Point) -> Result<Complex64> {
    f.interpolate(p).ok_or_else(|| Error::Coverage(format!("({:.4}, {:.4}) lies off the grid", p.x, p.y)))
}

/// Defect of the identity for each `s` in `s_samples`.
///
/// The area integral uses polar Gauss–Legendre × midpoint quadrature with
/// bilinear interpolation; the arc normal derivative is a second-order
/// one-sided difference of step `h_grid` taken inside the ball.
pub fn corner_identity_defect(
    pair: &TransmissionEigenpair,
    x_c: Point,
    h_ball: f64,
    s_samples: &[f64],
    rho: [Complex64; 2],
    med: &Medium,
) -> Result<Vec<IdentitySample>> {
    let rr = rho[0] * rho[0] + rho[1] * rho[1];
    let scale = rho[0].norm_sqr() + rho[1].norm_sqr();
    if rr.norm() > 1e-12 * scale.max(1e-300) {
        return Err(Error::Precondition(format!("ρ·ρ = {rr} ≠ 0, so u₀ is not harmonic")));
    }
    if !(h_ball > 0.0) {
        return Err(Error::Parameter(format!("ball radius must be > 0, got {h_ball}")));
    }
    let spec = pair.u.spec;
    let inside_nodes = spec.points().filter(|p| p.distance(x_c) < h_ball && med.domain.contains(*p)).count();
    if inside_nodes < MIN_SECTOR_NODES {
        return Err(Error::Resolution(format!(
            "B_h ∩ Ω holds {inside_nodes} nodes; at least {MIN_SECTOR_NODES} are needed"
        )));
    }
    let k2 = pair.k * pair.k;
    let (gx, gw) = gauss_legendre(RADIAL_NODES);
    let dphi = 2.0 * PI / ANGULAR_NODES as f64;
    let dirs: Vec<Point> = (0..ANGULAR_NODES).map(|i| Point::from_polar(1.0, (i as f64 + 0.5) * dphi)).collect();
    // integrand samples shared by every s
    let mut area: Vec<(Point, Complex64)> = Vec::new();
    for (x, w) in gx.iter().zip(&gw) {
        let r = 0.5 * h_ball * (x + 1.0);
        let wr = 0.5 * h_ball * w * r * dphi;
        for d in &dirs {
            let p = x_c + r * *d;
            if !med.domain.contains(p) {
                continue;
            }
            let u = interp(&pair.u, p)?;
            let v = interp(&pair.v, p)?;
            area.push((p - x_c, (v - u * (1.0 + med.value_at(p))) * (k2 * wr)));
        }
    }
    let step = spec.h;
    let mut arc: Vec<(Point, Point, Complex64, Complex64)> = Vec::new();
    for d in &dirs {
        let p = x_c + h_ball * *d;
        if !med.domain.contains(p) {
            continue;
        }
        let w = |q: Point| -> Result<Complex64> { Ok(interp(&pair.u, q)? - interp(&pair.v, q)?) };
        let w0 = w(p)?;
        let w1 = w(p - step * *d)?;
        let w2 = w(p - 2.0 * step * *d)?;
        let dw = (w0 * 3.0 - w1 * 4.0 + w2) / (2.0 * step);
        arc.push((p - x_c, *d, w0, dw));
    }
    let harmonic = |s: f64, y: Point| (rho[0] * y.x + rho[1] * y.y).scale(s).exp();
    Ok(s_samples
        .iter()
        .map(|&s| {
            let lhs: Complex64 = area.iter().map(|(y, f)| f * harmonic(s, *y)).sum();
            let rhs: Complex64 = arc
                .iter()
                .map(|(y, n, w0, dw)| {
                    let u0 = harmonic(s, *y);
                    let du0 = u0 * (rho[0] * n.x + rho[1] * n.y) * s;
                    (dw * u0 - w0 * du0) * (h_ball * dphi)
                })
                .sum();
            let defect = (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE);
            IdentitySample { s, lhs, rhs, defect }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridSpec;
    use crate::probes::cgo_pair;
    use crate::teig::radial_eigenpair;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-13);
    }

    #[test]
    fn zero_pair_has_zero_defect() {
        let med = Medium::constant(crate::geometry::Domain::disk(Point::ORIGIN, 1.0).unwrap(), 1.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.05, 3).unwrap();
        let (pair, _) = radial_eigenpair(0, 7.375126, 1.0, 1.0, &spec).unwrap();
        let zero = TransmissionEigenpair::new(
            pair.k,
            pair.u.scale(Complex64::new(0.0, 0.0)),
            pair.v.scale(Complex64::new(0.0, 0.0)),
            None,
        )
        .unwrap();
        let c = cgo_pair(Point::new(1.0, 0.5));
        let out = corner_identity_defect(&zero, Point::new(1.0, 0.0), 0.4, &[1.0], c.rho1, &med).unwrap();
        assert_eq!(out[0].defect, 0.0);
    }

    #[test]
    fn non_null_rho_rejected() {
        let med = Medium::constant(crate::geometry::Domain::disk(Point::ORIGIN, 1.0).unwrap(), 1.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.05, 3).unwrap();
        let (pair, _) = radial_eigenpair(0, 7.375126, 1.0, 1.0, &spec).unwrap();
        let rho = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let r = corner_identity_defect(&pair, Point::new(1.0, 0.0), 0.4, &[1.0], rho, &med);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
