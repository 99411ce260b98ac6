//! Far-field size of the wave scattered by a Herglotz incident field that
//! approximates a transmission eigenfunction.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forward::{LsSolver, Medium, SolverOptions};
use crate::geometry::GridSpec;
use crate::herglotz::{herglotz_incident, DirectionQuadrature, HerglotzDensity};
use crate::specialfn::check_wavenumber;

/// Relative distance to the nearest known eigen-wavenumber beyond which a
/// warning is attached.
pub const NEAR_TE_TOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvisibilityReport {
    pub k: f64,
    /// `||u_∞||_{L²(S¹)}` of the scattered wave.
    pub far_field_norm: f64,
    /// `||v_g - v||_{L²(Ω)}` as reported by the fit (0 when unknown).
    pub fit_error: f64,
    pub density_norm: f64,
    pub warning: Option<String>,
}

/// Forward solves reusing one factorization across densities.
pub struct InvisibilityProbe<'a> {
    solver: LsSolver,
    med: &'a Medium,
    quad: DirectionQuadrature,
    pub k: f64,
    warning: Option<String>,
}

impl<'a> InvisibilityProbe<'a> {
    /// `known_te` lists eigen-wavenumbers the caller trusts; when `k` is not
    /// within [`NEAR_TE_TOL`] of one of them, reports carry a warning.
    pub fn new(
        med: &'a Medium,
        k: f64,
        spec: &GridSpec,
        opts: &SolverOptions,
        directions: usize,
        known_te: Option<&[f64]>,
    ) -> Result<Self> {
        check_wavenumber(k)?;
        let warning = known_te.and_then(|tes| {
            let near = tes.iter().any(|t| (t - k).abs() <= NEAR_TE_TOL * t);
            (!near).then(|| {
                let msg = format!("k = {k} is not near a known transmission eigenvalue; the defect need not be small");
                log::warn!("{msg}");
                msg
            })
        });
        Ok(InvisibilityProbe {
            solver: LsSolver::new(med, k, spec, opts)?,
            med,
            quad: DirectionQuadrature::new(directions)?,
            k,
            warning,
        })
    }

    pub fn defect(&self, g: &HerglotzDensity, fit_error: f64) -> Result<InvisibilityReport> {
        g.validate()?;
        let far_field_norm = if self.med.is_trivial() {
            0.0
        } else {
            let b = self.solver.system.incident_at_nodes(&herglotz_incident(g))?;
            let (u, _) = self.solver.solve_nodes(&b)?;
            let ff = self.solver.system.far_field(&u, &self.quad.directions());
            (ff.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.quad.weight()).sqrt()
        };
        Ok(InvisibilityReport {
            k: self.k,
            far_field_norm,
            fit_error,
            density_norm: g.norm(),
            warning: self.warning.clone(),
        })
    }
}

/// One-shot version of [`InvisibilityProbe::defect`] with 64 far-field
/// directions.
pub fn invisibility_defect(
    med: &Medium,
    k: f64,
    g: &HerglotzDensity,
    fit_error: f64,
    spec: &GridSpec,
    opts: &SolverOptions,
) -> Result<InvisibilityReport> {
    InvisibilityProbe::new(med, k, spec, opts, 64, None)?.defect(g, fit_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Domain, Point};
    use num_complex::Complex64;

    #[test]
    fn zero_contrast_has_zero_defect() {
        let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0).unwrap(), 0.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.1, 3).unwrap();
        let g = HerglotzDensity::from_fn(DirectionQuadrature::new(32).unwrap(), |_| Complex64::new(1.0, 0.0));
        let r = invisibility_defect(&med, 2.0, &g, 0.0, &spec, &SolverOptions::default()).unwrap();
        assert_eq!(r.far_field_norm, 0.0);
    }

    #[test]
    fn far_from_te_warns() {
        let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0).unwrap(), 1.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.1, 3).unwrap();
        let p = InvisibilityProbe::new(&med, 2.0, &spec, &SolverOptions::default(), 32, Some(&[7.375])).unwrap();
        let g = HerglotzDensity::from_fn(DirectionQuadrature::new(32).unwrap(), |_| Complex64::new(1.0, 0.0));
        let r = p.defect(&g, 0.0).unwrap();
        assert!(r.warning.is_some());
        assert!(r.far_field_norm > 0.0);
    }
}
