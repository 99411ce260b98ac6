//! Complex geometrical optics exponentials and recovery of a contrast
//! difference from the moments `∫ δV e^{ρ₁·x} e^{ρ₂·x} dx = ∫ δV e^{iξ·x} dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point};

/// `ρ₁, ρ₂ ∈ ℂ²` with `ρ_j·ρ_j = 0` and `ρ₁ + ρ₂ = iξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgoPair {
    pub xi: Point,
    pub rho1: [Complex64; 2],
    pub rho2: [Complex64; 2],
}

pub fn cgo_pair(xi: Point) -> CgoPair {
    let p = xi.perp();
    let rho1 = [Complex64::new(0.5 * p.x, 0.5 * xi.x), Complex64::new(0.5 * p.y, 0.5 * xi.y)];
    let rho2 = [Complex64::new(-0.5 * p.x, 0.5 * xi.x), Complex64::new(-0.5 * p.y, 0.5 * xi.y)];
    CgoPair { xi, rho1, rho2 }
}

/// Complex bilinear product `a·b` (no conjugation).
pub fn bilinear(a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `e^{ρ·x}`.
pub fn cgo_eval(rho: [Complex64; 2], x: Point) -> Complex64 {
    (rho[0] * x.x + rho[1] * x.y).exp()
}

/// Frequencies `ξ_pq = 2π (p / (nx h), q / (ny h))` with centred indices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiLattice {
    pub nx: usize,
    pub ny: usize,
    pub dxi: f64,
    pub dyi: f64,
}

impl XiLattice {
    pub fn conjugate(spec: &GridSpec) -> Self {
        XiLattice {
            nx: spec.nx,
            ny: spec.ny,
            dxi: 2.0 * PI / (spec.nx as f64 * spec.h),
            dyi: 2.0 * PI / (spec.ny as f64 * spec.h),
        }
    }

    fn centred(i: usize, n: usize) -> f64 {
        if i < n.div_ceil(2) {
            i as f64
        } else {
            i as f64 - n as f64
        }
    }

    /// Frequency of FFT bin `(p, q)`.
    pub fn xi(&self, p: usize, q: usize) -> Point {
        Point::new(Self::centred(p, self.nx) * self.dxi, Self::centred(q, self.ny) * self.dyi)
    }

    fn matches(&self, spec: &GridSpec) -> bool {
        let c = XiLattice::conjugate(spec);
        self.nx == c.nx
            && self.ny == c.ny
            && (self.dxi - c.dxi).abs() <= 1e-12 * c.dxi
            && (self.dyi - c.dyi).abs() <= 1e-12 * c.dyi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalderonResult {
    pub recovered: Vec<f64>,
    pub relative_error: f64,
    /// Largest `|Im|` discarded from the inverse transform.
    pub imaginary_residue: f64,
}

/// Moments of `δV` against CGO products for every lattice frequency, then an
/// inverse discrete Fourier transform.
pub fn calderon_recover(spec: &GridSpec, dv: &[f64], lattice: &XiLattice) -> Result<CalderonResult> {
    if dv.len() != spec.len() {
        return Err(Error::Shape(format!("δV has {} samples for {} nodes", dv.len(), spec.len())));
    }
    if !lattice.matches(spec) {
        return Err(Error::Shape("frequency lattice is not the conjugate lattice of the grid".into()));
    }
    let peak = dv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for idx in 0..spec.len() {
        let (i, j) = spec.coords(idx);
        let edge = i == 0 || j == 0 || i + 1 == spec.nx || j + 1 == spec.ny;
        if edge && dv[idx].abs() > 1e-12 * peak {
            return Err(Error::Precondition("δV must vanish on the outer ring of the grid".into()));
        }
    }
    let (nx, ny) = (spec.nx, spec.ny);
    let support: Vec<(Point, f64)> = (0..spec.len()).filter(|&i| dv[i] != 0.0).map(|i| (spec.point(i), dv[i])).collect();
    let area = spec.cell_area();
    // c_pq = M(ξ_pq) e^{-iξ_pq·x₀} so that the inverse is a plain DFT
    let mut coeffs: Vec<Complex64> = (0..nx * ny)
        .into_par_iter()
        .map(|b| {
            let (p, q) = (b % nx, b / nx);
            let pair = cgo_pair(lattice.xi(p, q));
            let m: Complex64 =
                support.iter().map(|&(x, d)| cgo_eval(pair.rho1, x) * cgo_eval(pair.rho2, x) * d).sum::<Complex64>() * area;
            m * Complex64::from_polar(1.0, -pair.xi.dot(spec.origin))
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fx = planner.plan_fft_forward(nx);
    let fy = planner.plan_fft_forward(ny);
    for row in coeffs.chunks_mut(nx) {
        fx.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = coeffs[j * nx + i];
        }
        fy.process(&mut col);
        for j in 0..ny {
            coeffs[j * nx + i] = col[j];
        }
    }
    let norm = 1.0 / ((nx * ny) as f64 * area);
    let recovered: Vec<f64> = coeffs.iter().map(|c| c.re * norm).collect();
    let imaginary_residue = coeffs.iter().map(|c| (c.im * norm).abs()).fold(0.0, f64::max);
    let num: f64 = recovered.iter().zip(dv).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = dv.iter().map(|b| b * b).sum();
    let relative_error = if den == 0.0 { num.sqrt() } else { (num / den).sqrt() };
    Ok(CalderonResult { recovered, relative_error, imaginary_residue })
}

/// Smooth compactly supported bump `a (1 - |x - c|²/r²)³` sampled on `spec`.
pub fn smooth_bump(spec: &GridSpec, center: Point, radius: f64, amplitude: f64) -> Vec<f64> {
    spec.points()
        .map(|p| {
            let t = p.distance(center) / radius;
            if t < 1.0 {
                amplitude * (1.0 - t * t).powi(3)
            } else {
                0.0
            }
        })
        .collect()
}
