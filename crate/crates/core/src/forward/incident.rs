use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::field::ComplexField2D;
use crate::geometry::{Domain, GridSpec, Point};
use crate::herglotz::HerglotzDensity;
use crate::specialfn::{check_wavenumber, fundamental_solution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IncidentField {
    /// `e^{ik x·d}`.
    PlaneWave { direction: Point },
    /// `Φ(x, z)` with the source strictly outside Ω.
    PointSource { source: Point },
    /// `v_g(x) = Σ_j w_j e^{ik x·d_j} g_j`.
    Herglotz { density: HerglotzDensity },
}

impl IncidentField {
    pub fn plane_wave_angle(theta: f64) -> Self {
        IncidentField::PlaneWave { direction: Point::from_polar(1.0, theta) }
    }

    /// Checks the descriptor against the scatterer.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        match self {
            IncidentField::PlaneWave { direction } => {
                if (direction.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::Parameter(format!(
                        "plane-wave direction must be unit, |d| = {}",
                        direction.norm()
                    )));
                }
            }
            IncidentField::PointSource { source } => {
                if domain.signed_distance(*source) <= 0.0 {
                    return Err(Error::Placement(format!(
                        "point source ({}, {}) lies in the closure of the scatterer",
                        source.x, source.y
                    )));
                }
            }
            IncidentField::Herglotz { density } => density.validate()?,
        }
        Ok(())
    }

    /// Value at a single point. Point sources return an error at the source.
    pub fn eval_at(&self, k: f64, p: Point) -> Result<Complex64> {
        Ok(match self {
            IncidentField::PlaneWave { direction } => Complex64::from_polar(1.0, k * p.dot(*direction)),
            IncidentField::PointSource { source } => fundamental_solution(k, p, *source)?,
            IncidentField::Herglotz { density } => density.eval_at(k, p),
        })
    }

    /// Values at a list of points.
    pub fn eval_points(&self, k: f64, points: &[Point]) -> Result<Vec<Complex64>> {
        check_wavenumber(k)?;
        points.iter().map(|&p| self.eval_at(k, p)).collect()
    }
}

/// Samples the incident field on every node of `spec`; the mask marks Ω.
pub fn incident_eval(inc: &IncidentField, k: f64, spec: &GridSpec, domain: &Domain) -> Result<ComplexField2D> {
    check_wavenumber(k)?;
    inc.validate(domain)?;
    let points: Vec<Point> = spec.points().collect();
    let values = inc.eval_points(k, &points)?;
    let mask = points.iter().map(|&p| domain.contains(p)).collect();
    ComplexField2D::new(*spec, values, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> Domain {
        Domain::disk(Point::ORIGIN, 1.0).unwrap()
    }

    #[test]
    fn plane_wave_is_one_at_origin() {
        for t in 0..8 {
            let inc = IncidentField::plane_wave_angle(t as f64 * 0.7);
            assert_eq!(inc.eval_at(3.0, Point::ORIGIN).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    fn plane_wave_residual(h: f64) -> f64 {
        let k = 2.5;
        let inc = IncidentField::plane_wave_angle(0.4);
        let spec = GridSpec::new(Point::new(-0.5, -0.5), h, (1.0 / h) as usize + 1, (1.0 / h) as usize + 1).unwrap();
        let f = incident_eval(&inc, k, &spec, &disk()).unwrap();
        let mut worst: f64 = 0.0;
        for idx in 0..spec.len() {
            if let Some(lap) = f.laplacian_at(idx) {
                worst = worst.max((lap + f.values[idx] * (k * k)).norm());
            }
        }
        worst
    }

    #[test]
    fn plane_wave_discrete_helmholtz_second_order() {
        let ratio = plane_wave_residual(0.05) / plane_wave_residual(0.025);
        assert!(ratio > 3.6 && ratio < 4.4, "{ratio}");
    }

    #[test]
    fn point_source_inside_rejected() {
        let spec = GridSpec::covering(&disk(), 0.1, 2).unwrap();
        let inc = IncidentField::PointSource { source: Point::new(0.2, 0.1) };
        assert!(matches!(incident_eval(&inc, 2.0, &spec, &disk()), Err(Error::Placement(_))));
        let bad = IncidentField::PlaneWave { direction: Point::new(1.0, 1.0) };
        assert!(matches!(incident_eval(&bad, 2.0, &spec, &disk()), Err(Error::Parameter(_))));
    }
}
