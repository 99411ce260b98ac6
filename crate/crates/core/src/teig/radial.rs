//! Transmission eigenvalues of a constant-contrast disk by separation of
//! variables.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, Medium};
use crate::geometry::{Domain, GridSpec, Point};
use crate::specialfn::{bessel_j_seq, check_wavenumber, derivatives};
use crate::teig::pair::TransmissionEigenpair;

/// Scan step of the sign-change search.
pub const SCAN_STEP: f64 = 1e-3;
/// Bisection stops when the bracket is shorter than this.
pub const ROOT_TOL: f64 = 1e-13;

fn check_disk(radius: f64, v: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Parameter(format!("radius must be > 0, got {radius}")));
    }
    if !(1.0 + v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(format!("1 + V must be > 0, got V = {v}")));
    }
    Ok(())
}

/// `d_m(k) = J_m(k₁R) k J_m'(kR) - J_m(kR) k₁ J_m'(k₁R)`, `k₁ = k √(1+V)`.
pub fn radial_determinant(m: usize, k: f64, radius: f64, v: f64) -> Result<f64> {
    check_disk(radius, v)?;
    check_wavenumber(k)?;
    Ok(determinants(m, k, radius, v)[m])
}

/// `d_0(k), ..., d_mmax(k)` from one pair of Bessel sequences.
fn determinants(m_max: usize, k: f64, radius: f64, v: f64) -> Vec<f64> {
    let k1 = k * (1.0 + v).sqrt();
    let j = bessel_j_seq(m_max + 1, k * radius);
    let j1 = bessel_j_seq(m_max + 1, k1 * radius);
    let jp = derivatives(&j);
    let j1p = derivatives(&j1);
    (0..=m_max).map(|m| j1[m] * k * jp[m] - j[m] * k1 * j1p[m]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialRoot {
    pub m: usize,
    pub k: f64,
    /// `|d_m(k)|` at the returned root.
    pub residual: f64,
    /// Largest `|d_m|` seen on the scan grid (for relative checks).
    pub scan_max: f64,
}

/// All sign-change roots of `d_m`, `m <= m_max`, in `[k_min, k_max]`,
/// sorted by `k`.
pub fn radial_te_roots(m_max: usize, k_min: f64, k_max: f64, radius: f64, v: f64) -> Result<Vec<RadialRoot>> {
    check_disk(radius, v)?;
    check_wavenumber(k_min)?;
    if !(k_max > k_min) {
        return Err(Error::Parameter("k_max must exceed k_min".into()));
    }
    if v == 0.0 {
        return Err(Error::DegenerateMedium("V = 0 makes every k a root of d_m".into()));
    }
    let steps = ((k_max - k_min) / SCAN_STEP).ceil() as usize;
    let ks: Vec<f64> = (0..=steps).map(|i| (k_min + i as f64 * SCAN_STEP).min(k_max)).collect();
    let table: Vec<Vec<f64>> = ks.par_iter().map(|&k| determinants(m_max, k, radius, v)).collect();
    let mut roots: Vec<RadialRoot> = (0..=m_max)
        .into_par_iter()
        .flat_map_iter(|m| {
            let scan_max = table.iter().map(|d| d[m].abs()).fold(0.0, f64::max);
            let mut out = Vec::new();
            for i in 0..steps {
                let (da, db) = (table[i][m], table[i + 1][m]);
                if da == 0.0 {
                    // exact grid hit, counted once from the left bracket
                    out.push(RadialRoot { m, k: ks[i], residual: 0.0, scan_max });
                    continue;
                }
                if da * db < 0.0 {
                    let k = bisect(m, ks[i], ks[i + 1], da, radius, v);
                    let residual = determinants(m, k, radius, v)[m].abs();
                    out.push(RadialRoot { m, k, residual, scan_max });
                }
            }
            out
        })
        .collect();
    roots.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap().then(a.m.cmp(&b.m)));
    Ok(roots)
}

fn bisect(m: usize, mut a: f64, mut b: f64, mut fa: f64, radius: f64, v: f64) -> f64 {
    while b - a > ROOT_TOL {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let fc = determinants(m, c, radius, v)[m];
        if fc == 0.0 {
            return c;
        }
        if fa * fc < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
    }
    0.5 * (a + b)
}

/// `∫_0^R J_m(κ r)² r dr` in closed form.
fn bessel_square_integral(m: usize, kappa: f64, radius: f64) -> f64 {
    let x = kappa * radius;
    let j = bessel_j_seq(m + 1, x);
    let jp = derivatives(&j);
    let mf = m as f64;
    0.5 * radius * radius * (jp[m] * jp[m] + (1.0 - mf * mf / (x * x)) * j[m] * j[m])
}

/// How the interior amplitude of `u` was fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMatch {
    Dirichlet,
    Neumann,
}

/// Analytic eigenpair `v = J_m(kr) e^{imθ}`, `u = c J_m(k₁r) e^{imθ}`
/// sampled on `spec`, normalized so that `||v||_{L2(disk)} = 1` exactly.
pub fn radial_eigenpair(
    m: usize,
    k_root: f64,
    radius: f64,
    v: f64,
    spec: &GridSpec,
) -> Result<(TransmissionEigenpair, TraceMatch)> {
    check_disk(radius, v)?;
    check_wavenumber(k_root)?;
    let d = determinants(m, k_root, radius, v);
    let k1 = k_root * (1.0 + v).sqrt();
    let scale = {
        let j = bessel_j_seq(m + 1, k_root * radius);
        let jp = derivatives(&j);
        (j[m].abs() + jp[m].abs()) * k1
    };
    if d[m].abs() > 1e-6 * scale.max(1e-300) {
        return Err(Error::Precondition(format!("k = {k_root} is not a root of d_{m} (|d| = {:.3e})", d[m].abs())));
    }
    let j = bessel_j_seq(m + 1, k_root * radius);
    let j1 = bessel_j_seq(m + 1, k1 * radius);
    let (jp, j1p) = (derivatives(&j), derivatives(&j1));
    let (c, how) = if j1[m].abs() > 1e-8 * j1p[m].abs().max(j1[m].abs()) {
        (j[m] / j1[m], TraceMatch::Dirichlet)
    } else if j1p[m].abs() > 0.0 {
        (k_root * jp[m] / (k1 * j1p[m]), TraceMatch::Neumann)
    } else {
        return Err(Error::Recovery(format!("both interior traces vanish for m = {m}")));
    };
    let norm = (2.0 * PI * bessel_square_integral(m, k_root, radius)).sqrt();
    let domain = Domain::disk(Point::ORIGIN, radius)?;
    let mask: Vec<bool> = spec.points().map(|p| domain.contains(p)).collect();
    let ang = |p: Point| Complex64::from_polar(1.0, m as f64 * p.angle());
    let vf = ComplexField2D::from_fn(*spec, mask.clone(), |p| ang(p) * (bessel_j_seq(m, k_root * p.norm())[m] / norm));
    let uf = ComplexField2D::from_fn(*spec, mask, |p| ang(p) * (c * bessel_j_seq(m, k1 * p.norm())[m] / norm));
    let pair = TransmissionEigenpair::new(k_root, uf, vf, Some(m))?;
    Ok((pair, how))
}

/// Largest Dirichlet and Neumann mismatches of the analytic pair at
/// `n_angles` boundary points (the angular factor is common to both fields).
pub fn radial_trace_mismatch(m: usize, k_root: f64, radius: f64, v: f64, n_angles: usize) -> Result<(f64, f64)> {
    check_disk(radius, v)?;
    check_wavenumber(k_root)?;
    let k1 = k_root * (1.0 + v).sqrt();
    let j = bessel_j_seq(m + 1, k_root * radius);
    let j1 = bessel_j_seq(m + 1, k1 * radius);
    let (jp, j1p) = (derivatives(&j), derivatives(&j1));
    let c = if j1[m].abs() > 1e-8 * j1p[m].abs().max(j1[m].abs()) { j[m] / j1[m] } else { k_root * jp[m] / (k1 * j1p[m]) };
    let norm = (2.0 * PI * bessel_square_integral(m, k_root, radius)).sqrt();
    let (mut dd, mut dn) = (0.0f64, 0.0f64);
    for i in 0..n_angles {
        let e = Complex64::from_polar(1.0, m as f64 * 2.0 * PI * i as f64 / n_angles as f64);
        dd = dd.max((e * ((c * j1[m] - j[m]) / norm)).norm());
        dn = dn.max((e * ((c * k1 * j1p[m] - k_root * jp[m]) / norm)).norm());
    }
    Ok((dd, dn))
}

/// Medium description of the disk used by the radial oracle.
pub fn disk_medium(radius: f64, v: f64) -> Result<Medium> {
    Medium::constant(Domain::disk(Point::ORIGIN, radius)?, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_contrast_is_identically_zero() {
        for m in 0..5 {
            for i in 1..20 {
                assert_eq!(radial_determinant(m, 0.37 * i as f64, 1.0, 0.0).unwrap(), 0.0);
            }
        }
        assert!(matches!(radial_te_roots(3, 1.0, 5.0, 1.0, 0.0), Err(Error::DegenerateMedium(_))));
    }

    // reference roots from scipy brentq on the same determinant
    #[test]
    fn known_roots_unit_disk() {
        let roots = radial_te_roots(3, 1.0, 8.1, 1.0, 1.0).unwrap();
        let expect = [(0, 7.375126), (2, 7.396664), (1, 7.984356), (3, 8.029262)];
        assert_eq!(roots.len(), 4);
        for (r, (m, k)) in roots.iter().zip(expect) {
            assert_eq!(r.m, m);
            assert!((r.k - k).abs() < 1e-6, "{} vs {k}", r.k);
            assert!(r.residual <= 1e-8 * r.scan_max);
        }
    }

    #[test]
    fn scale_invariance() {
        let base = radial_te_roots(4, 1.0, 12.0, 1.0, 3.0).unwrap();
        for &r in &[0.5, 2.0] {
            let scaled = radial_te_roots(4, 1.0 / r, 12.0 / r, r, 3.0).unwrap();
            assert_eq!(scaled.len(), base.len());
            for (a, b) in base.iter().zip(&scaled) {
                assert_eq!(a.m, b.m);
                assert!((a.k - b.k * r).abs() <= 1e-10, "{} vs {}", a.k, b.k * r);
            }
        }
    }

    #[test]
    fn disjoint_windows_partition_roots() {
        let all = radial_te_roots(6, 2.0, 10.0, 1.0, 2.0).unwrap();
        let mut parts = radial_te_roots(6, 2.0, 6.0, 1.0, 2.0).unwrap();
        parts.extend(radial_te_roots(6, 6.0, 10.0, 1.0, 2.0).unwrap());
        parts.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap());
        assert_eq!(all.len(), parts.len());
        for (a, b) in all.iter().zip(&parts) {
            assert_eq!(a.m, b.m);
            assert!((a.k - b.k).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_traces_match_at_roots() {
        for r in radial_te_roots(6, 1.0, 9.0, 1.0, 2.0).unwrap() {
            let (d, n) = radial_trace_mismatch(r.m, r.k, 1.0, 2.0, 360).unwrap();
            assert!(d <= 1e-8 && n <= 1e-8, "m = {} k = {}: {d:e} {n:e}", r.m, r.k);
        }
    }

    #[test]
    fn non_root_rejected() {
        let spec = GridSpec::covering(&Domain::disk(Point::ORIGIN, 1.0).unwrap(), 0.1, 3).unwrap();
        assert!(matches!(radial_eigenpair(0, 7.0, 1.0, 1.0, &spec), Err(Error::Precondition(_))));
    }

    #[test]
    fn closed_form_norm() {
        let (m, kappa, r) = (3, 4.2, 1.3);
        let n = 20000;
        let mut s = 0.0;
        for i in 0..n {
            let x = r * (i as f64 + 0.5) / n as f64;
            s += crate::specialfn::bessel_j(m, kappa * x).powi(2) * x * r / n as f64;
        }
        assert!((s - bessel_square_integral(m, kappa, r)).abs() < 1e-8);
    }
}
