//! Boundary-layer mass fractions and the radial localization scan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, Medium};
use crate::geometry::{boundary_band, Domain, GridSpec};
use crate::specialfn::{bessel_j_seq, derivatives};
use crate::teig::radial::{radial_determinant, radial_eigenpair};

/// `||f||_{L²(N_ε(∂Ω))} / ||f||_{L²(Ω)}` by grid quadrature.
pub fn surface_ratio(field: &ComplexField2D, med: &Medium, eps: f64) -> Result<f64> {
    let band = boundary_band(&med.domain, &field.spec, eps)?;
    if !band.iter().any(|&b| b) {
        return Err(Error::Resolution(format!("band of width {eps} contains no grid node")));
    }
    let inside: Vec<bool> = field.spec.points().map(|p| med.domain.contains(p)).collect();
    let total = field.l2_norm_on(&inside);
    if total == 0.0 {
        return Err(Error::UndefinedRatio("field vanishes on the domain".into()));
    }
    Ok((field.l2_norm_on(&band) / total).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRecord {
    pub m: usize,
    pub k: f64,
    pub eps: f64,
    pub rho_u: f64,
    pub rho_v: f64,
    /// Running maximum over orders `<= m` of `max(rho_u, rho_v)`.
    pub running_max: f64,
}

/// Smallest positive root of `d_m` by a `10⁻³` scan and bisection.
pub fn smallest_radial_root(m: usize, radius: f64, v: f64) -> Result<f64> {
    if v == 0.0 {
        return Err(Error::DegenerateMedium("V = 0 has no isolated transmission eigenvalues".into()));
    }
    // below the first zero of J_m' neither trace can turn over
    let step = 1e-3 / radius;
    let k_hi = (2.0 * m as f64 + 60.0) / radius;
    let start = (m as f64 / (radius * (1.0 + v.abs()).sqrt() * 2.0)).max(step);
    let mut a = start;
    let mut fa = radial_determinant(m, a, radius, v)?;
    while a < k_hi {
        let b = a + step;
        let fb = radial_determinant(m, b, radius, v)?;
        if fa == 0.0 {
            return Ok(a);
        }
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > crate::teig::radial::ROOT_TOL {
                let c = 0.5 * (lo + hi);
                let fc = radial_determinant(m, c, radius, v)?;
                if fc == 0.0 {
                    return Ok(c);
                }
                if flo * fc < 0.0 {
                    hi = c;
                } else {
                    lo = c;
                    flo = fc;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Err(Error::Convergence(format!("no root of d_{m} below k = {k_hi}")))
}

/// For each `m <= m_max`: smallest root of `d_m` and the band fractions of
/// both eigenfunctions on `spec`.
pub fn localization_scan(med: &Medium, m_max: usize, eps: f64, spec: &GridSpec) -> Result<Vec<LocalizationRecord>> {
    let Domain::Disk { center, radius } = med.domain else {
        return Err(Error::Precondition("localization scan needs a disk".into()));
    };
    if center.norm() != 0.0 {
        return Err(Error::Precondition("localization scan expects a disk centred at the origin".into()));
    }
    let Some(v) = med.constant_value() else {
        return Err(Error::Precondition("localization scan needs a constant contrast".into()));
    };
    if v == 0.0 {
        return Err(Error::DegenerateMedium("V = 0 has no isolated transmission eigenvalues".into()));
    }
    let mut out: Vec<LocalizationRecord> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let k = smallest_radial_root(m, radius, v)?;
        let (pair, _) = radial_eigenpair(m, k, radius, v, spec)?;
        let rho_u = surface_ratio(&pair.u, med, eps)?;
        let rho_v = surface_ratio(&pair.v, med, eps)?;
        let prev = out.last().map_or(0.0, |r| r.running_max);
        out.push(LocalizationRecord { m, k, eps, rho_u, rho_v, running_max: prev.max(rho_u.max(rho_v)) });
    }
    Ok(out)
}

/// Exact `ρ` of `J_m(κ r)` on a disk of radius `R` for a band of width `ε`.
pub fn radial_band_ratio(m: usize, kappa: f64, radius: f64, eps: f64) -> f64 {
    let integral = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let x = kappa * r;
        let j = bessel_j_seq(m + 1, x);
        let jp = derivatives(&j);
        let mf = m as f64;
        0.5 * r * r * (jp[m] * jp[m] + (1.0 - mf * mf / (x * x)) * j[m] * j[m])
    };
    let whole = integral(radius);
    ((whole - integral((radius - eps).max(0.0))) / whole).max(0.0).sqrt()
}
