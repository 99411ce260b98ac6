//! Transmission eigenpairs on a grid and their residual diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, Medium};
use crate::geometry::Point;

/// `(u, v)` with `(Δ + k²(1+V))u = 0`, `(Δ + k²)v = 0` in Ω and matching
/// Cauchy data on ∂Ω; `w = u - v`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransmissionEigenpair {
    pub lambda: f64,
    pub k: f64,
    pub u: ComplexField2D,
    pub v: ComplexField2D,
    pub w: ComplexField2D,
    /// Angular order, radial pairs only.
    pub order: Option<usize>,
    pub residuals: Option<TeResiduals>,
}

impl TransmissionEigenpair {
    pub fn new(k: f64, u: ComplexField2D, v: ComplexField2D, order: Option<usize>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Parameter(format!("eigen-wavenumber must be > 0, got {k}")));
        }
        if u.mask != v.mask {
            return Err(Error::Shape("u and v carry different masks".into()));
        }
        let w = u.sub(&v)?;
        Ok(TransmissionEigenpair { lambda: k * k, k, u, v, w, order, residuals: None })
    }

    /// Largest `|w - (u - v)|` on the mask.
    pub fn difference_defect(&self) -> f64 {
        (0..self.w.len())
            .filter(|&i| self.w.mask[i])
            .map(|i| (self.w.values[i] - (self.u.values[i] - self.v.values[i])).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeResiduals {
    /// `||(Δ_h + k²(1+V)) u||` over nodes at least two cells inside.
    pub pde_u: f64,
    /// `||(Δ_h + k²) v||` over the same nodes.
    pub pde_v: f64,
    /// Boundary `L²` size of `u - v` extrapolated to ∂Ω.
    pub trace_dirichlet: f64,
    /// Boundary `L²` size of `∂(u - v)` extrapolated to ∂Ω.
    pub trace_neumann: f64,
    pub interior_nodes: usize,
    pub boundary_samples: usize,
    /// Both fields vanish identically.
    pub trivial: bool,
}

impl TeResiduals {
    pub fn pde(&self) -> f64 {
        self.pde_u.max(self.pde_v)
    }

    pub fn trace(&self) -> f64 {
        self.trace_dirichlet.max(self.trace_neumann)
    }
}

/// Distance from `inside` along the segment to `outside` at which the
/// boundary is crossed.
fn crossing(med: &Medium, inside: Point, outside: Point) -> f64 {
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..48 {
        let c = 0.5 * (a + b);
        if med.domain.contains(inside + c * (outside - inside)) {
            a = c;
        } else {
            b = c;
        }
    }
    0.5 * (a + b) * inside.distance(outside)
}

/// Interior five-point residuals and boundary trace mismatches.
///
/// Traces use the cubic through four nodes on an inward grid line,
/// extrapolated to where that line crosses ∂Ω, so an exact pair gives
/// `O(h⁴)` Dirichlet and `O(h³)` Neumann mismatches.
pub fn te_residual(pair: &TransmissionEigenpair, med: &Medium, k: f64) -> Result<TeResiduals> {
    pair.u.check_same_grid(&pair.v)?;
    let spec = pair.u.spec;
    let h = spec.h;
    let k2 = k * k;
    let trivial = pair.u.values.iter().chain(&pair.v.values).all(|z| z.norm() == 0.0);
    let (mut ru, mut rv, mut n_in) = (0.0, 0.0, 0usize);
    for idx in 0..spec.len() {
        let p = spec.point(idx);
        if med.domain.signed_distance(p) > -2.0 * h {
            continue;
        }
        let (Some(lu), Some(lv)) = (pair.u.laplacian_at(idx), pair.v.laplacian_at(idx)) else {
            continue;
        };
        let vq = med.value_at(p);
        ru += (lu + pair.u.values[idx] * (k2 * (1.0 + vq))).norm_sqr();
        rv += (lv + pair.v.values[idx] * k2).norm_sqr();
        n_in += 1;
    }
    let (mut td, mut tn, mut n_bd) = (0.0, 0.0, 0usize);
    let w = |i: usize| pair.u.values[i] - pair.v.values[i];
    for idx in 0..spec.len() {
        let p = spec.point(idx);
        if !med.domain.contains(p) {
            continue;
        }
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let Some(out) = spec.offset(idx, di, dj) else { continue };
            if med.domain.contains(spec.point(out)) {
                continue;
            }
            // four samples at s = d, d+h, d+2h, d+3h along the inward line
            let mut line = [idx; 4];
            let mut ok = true;
            for (j, slot) in line.iter_mut().enumerate().skip(1) {
                match spec.offset(idx, -(j as isize) * di, -(j as isize) * dj) {
                    Some(q) if med.domain.contains(spec.point(q)) => *slot = q,
                    _ => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let d = crossing(med, p, spec.point(out));
            let s: [f64; 4] = std::array::from_fn(|j| d + j as f64 * h);
            let (mut value, mut slope) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for j in 0..4 {
                // Lagrange basis l_j and its derivative, both at the crossing
                let others: Vec<f64> = (0..4).filter(|&i| i != j).map(|i| s[i]).collect();
                let den: f64 = others.iter().map(|o| s[j] - o).product();
                let l0 = others.iter().map(|o| -o).product::<f64>() / den;
                let dl0 = (0..3)
                    .map(|a| (0..3).filter(|&b| b != a).map(|b| -others[b]).product::<f64>())
                    .sum::<f64>()
                    / den;
                value += w(line[j]) * l0;
                slope += w(line[j]) * dl0;
            }
            td += value.norm_sqr();
            tn += slope.norm_sqr();
            n_bd += 1;
        }
    }
    Ok(TeResiduals {
        pde_u: (ru * h * h).sqrt(),
        pde_v: (rv * h * h).sqrt(),
        trace_dirichlet: (td * h).sqrt(),
        trace_neumann: (tn * h).sqrt(),
        interior_nodes: n_in,
        boundary_samples: n_bd,
        trivial,
    })
}

/// Attaches [`te_residual`] to the pair, logging a warning for a trivial pair.
pub fn with_residuals(mut pair: TransmissionEigenpair, med: &Medium) -> Result<TransmissionEigenpair> {
    let r = te_residual(&pair, med, pair.k)?;
    if r.trivial {
        log::warn!("transmission pair at k = {} vanishes identically", pair.k);
    }
    pair.residuals = Some(r);
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, GridSpec};
    use crate::teig::radial::{disk_medium, radial_eigenpair};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk_pair(m: usize, k: f64, h: f64) -> (TransmissionEigenpair, Medium) {
        let med = disk_medium(1.0, 1.0).unwrap();
        let spec = GridSpec::covering(&med.domain, h, 3).unwrap();
        (radial_eigenpair(m, k, 1.0, 1.0, &spec).unwrap().0, med)
    }

    #[test]
    fn radial_pair_residuals_are_second_order() {
        let mut prev: Option<TeResiduals> = None;
        for h in [0.04, 0.02, 0.01] {
            let (pair, med) = disk_pair(2, 7.396664, h);
            assert!(pair.difference_defect() <= 1e-12);
            let r = te_residual(&pair, &med, pair.k).unwrap();
            assert!(!r.trivial);
            // balanced accuracy: traces no worse than 10x the interior residuals
            assert!(r.trace() <= 10.0 * r.pde(), "{r:?}");
            if let Some(p) = prev {
                assert!(p.pde_u / r.pde_u > 3.0 && p.pde_v / r.pde_v > 3.0, "{p:?} {r:?}");
                assert!(p.trace_neumann / r.trace_neumann > 3.0, "{p:?} {r:?}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn radial_pair_normalization_and_symmetry() {
        let (pair, _) = disk_pair(0, 7.375126, 0.01);
        let n = pair.v.l2_norm();
        assert!((n - 1.0).abs() < 2e-2, "{n}");
        for &r in &[0.2, 0.5, 0.9] {
            for t in 0..8 {
                let a = Point::from_polar(r, 0.3 * t as f64);
                let b = Point::from_polar(r, 0.3 * t as f64 + std::f64::consts::FRAC_PI_2);
                let va = crate::specialfn::bessel_j(0, 7.375126 * a.norm());
                let vb = crate::specialfn::bessel_j(0, 7.375126 * b.norm());
                assert!((va - vb).abs() <= 1e-12);
            }
        }
        let spec = pair.v.spec;
        for idx in 0..spec.len() {
            let p = spec.point(idx);
            let (i, j) = spec.coords(idx);
            // the grid is symmetric about the origin: (x, y) -> (-y, x)
            let q = crate::geometry::Point::new(-p.y, p.x);
            let ii = ((q.x - spec.origin.x) / spec.h).round() as usize;
            let jj = ((q.y - spec.origin.y) / spec.h).round() as usize;
            if ii < spec.nx && jj < spec.ny && spec.point(spec.index(ii, jj)).distance(q) < 1e-9 {
                let _ = (i, j);
                assert!((pair.v.values[idx] - pair.v.values[spec.index(ii, jj)]).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_fields_flagged_trivial() {
        let (pair, med) = disk_pair(0, 7.375126, 0.05);
        let z = ComplexField2D::zeros(pair.u.spec, pair.u.mask.clone());
        let zero = TransmissionEigenpair::new(pair.k, z.clone(), z, None).unwrap();
        let r = te_residual(&zero, &med, zero.k).unwrap();
        assert!(r.trivial);
        assert_eq!((r.pde_u, r.pde_v, r.trace_dirichlet, r.trace_neumann), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn random_fields_are_far_from_eigenpairs() {
        let (pair, med) = disk_pair(0, 7.375126, 0.02);
        let good = te_residual(&pair, &med, pair.k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut field = || {
            let mut f = pair.v.clone();
            for x in f.values.iter_mut() {
                *x = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let n = f.l2_norm();
            f.scale(Complex64::new(1.0 / n, 0.0))
        };
        let bad = TransmissionEigenpair::new(pair.k, field(), field(), None).unwrap();
        let r = te_residual(&bad, &med, bad.k).unwrap();
        assert!(r.pde() >= 100.0 * good.pde(), "{r:?} vs {good:?}");
        assert!(r.trace() >= 100.0 * good.trace(), "{r:?} vs {good:?}");
    }

    #[test]
    fn mismatched_masks_rejected() {
        let (pair, _) = disk_pair(0, 7.375126, 0.1);
        let mut v = pair.v.clone();
        v.mask[0] = !v.mask[0];
        assert!(TransmissionEigenpair::new(pair.k, pair.u.clone(), v, None).is_err());
        let _ = Domain::disk(Point::ORIGIN, 1.0);
    }
}
