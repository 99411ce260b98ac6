//! Mean `|v|` over shrinking corner neighbourhoods compared with the same
//! average at an interior point and near an edge midpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::ComplexField2D;
use crate::geometry::{CornerDescriptor, Domain, Point};

/// Fewest inside nodes a probe ball may contain.
pub const MIN_BALL_NODES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerProbeResult {
    pub corner: Point,
    pub radii: Vec<f64>,
    /// `A(r)` at the corner.
    pub corner_avg: Vec<f64>,
    pub interior_point: Point,
    pub interior_avg: Vec<f64>,
    /// Edge midpoint moved inward by `r`, one per radius.
    pub edge_points: Vec<Point>,
    pub edge_avg: Vec<f64>,
}

impl CornerProbeResult {
    /// `A_corner(r) / A_interior(r)`; infinite when the interior average vanishes.
    pub fn corner_to_interior(&self) -> Vec<f64> {
        self.corner_avg
            .iter()
            .zip(&self.interior_avg)
            .map(|(c, i)| if *i > 0.0 { c / i } else { f64::INFINITY })
            .collect()
    }
}

/// Nodes of `field` inside Ω (by its mask) within distance `r` of `center`.
fn ball_nodes(field: &ComplexField2D, center: Point, r: f64) -> Vec<usize> {
    let s = &field.spec;
    let lo_i = ((center.x - r - s.origin.x) / s.h).floor().max(0.0) as usize;
    let lo_j = ((center.y - r - s.origin.y) / s.h).floor().max(0.0) as usize;
    let hi_i = (((center.x + r - s.origin.x) / s.h).ceil().max(0.0) as usize).min(s.nx - 1);
    let hi_j = (((center.y + r - s.origin.y) / s.h).ceil().max(0.0) as usize).min(s.ny - 1);
    let mut out = Vec::new();
    for j in lo_j..=hi_j {
        for i in lo_i..=hi_i {
            let idx = s.index(i, j);
            if field.mask[idx] && s.point(idx).distance(center) < r {
                out.push(idx);
            }
        }
    }
    out
}

/// Grid-quadrature mean of `|v|` over `B_r(center) ∩ Ω`.
pub fn ball_average(field: &ComplexField2D, center: Point, r: f64) -> Result<f64> {
    let nodes = ball_nodes(field, center, r);
    if nodes.len() < MIN_BALL_NODES {
        return Err(Error::Resolution(format!(
            "ball of radius {r} at ({:.4}, {:.4}) holds {} inside nodes, need {MIN_BALL_NODES}",
            center.x,
            center.y,
            nodes.len()
        )));
    }
    Ok(nodes.iter().map(|&i| field.values[i].norm()).sum::<f64>() / nodes.len() as f64)
}

/// Smallest radius whose corner ball contains [`MIN_BALL_NODES`] inside nodes.
pub fn min_admissible_radius(field: &ComplexField2D, corner: Point) -> f64 {
    let mut d: Vec<f64> =
        (0..field.len()).filter(|&i| field.mask[i]).map(|i| field.spec.point(i).distance(corner)).collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d.get(MIN_BALL_NODES - 1).map_or(f64::INFINITY, |x| x * (1.0 + 1e-9))
}

pub fn corner_profile(
    field: &ComplexField2D,
    domain: &Domain,
    corner: &CornerDescriptor,
    radii: &[f64],
) -> Result<CornerProbeResult> {
    let Domain::Polygon { vertices } = domain else {
        return Err(Error::Precondition("corner probes need a polygonal domain".into()));
    };
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::Parameter("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("radii must be strictly decreasing".into()));
    }
    let far = vertices.iter().map(|v| v.distance(corner.vertex)).fold(0.0, f64::max);
    if radii[0] >= 0.5 * far {
        return Err(Error::Precondition(format!(
            "largest radius {} must stay below half the distance to the farthest vertex ({})",
            radii[0],
            0.5 * far
        )));
    }
    let rmin = min_admissible_radius(field, corner.vertex);
    if *radii.last().unwrap() < rmin {
        return Err(Error::Resolution(format!(
            "radius {} is under-resolved at the corner; the minimum admissible radius is {rmin:.6}",
            radii.last().unwrap()
        )));
    }
    let next = vertices[(corner.index + 1) % vertices.len()];
    let midpoint = 0.5 * (corner.vertex + next);
    let inward = corner.outgoing.perp();
    let interior_point = domain.centroid();
    let mut out = CornerProbeResult {
        corner: corner.vertex,
        radii: radii.to_vec(),
        corner_avg: Vec::new(),
        interior_point,
        interior_avg: Vec::new(),
        edge_points: Vec::new(),
        edge_avg: Vec::new(),
    };
    for &r in radii {
        let edge = midpoint + r * inward;
        out.corner_avg.push(ball_average(field, corner.vertex, r)?);
        out.interior_avg.push(ball_average(field, interior_point, r)?);
        out.edge_avg.push(ball_average(field, edge, r)?);
        out.edge_points.push(edge);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{corners, GridSpec};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn square_field(cells: usize, f: impl Fn(Point) -> Complex64) -> (Domain, ComplexField2D) {
        let d = Domain::square(Point::ORIGIN, 1.0).unwrap();
        let h = 1.0 / cells as f64;
        let spec = GridSpec::new(Point::new(-3.0 * h, -3.0 * h), h, cells + 7, cells + 7).unwrap();
        let mask = spec.points().map(|p| d.contains(p)).collect();
        (d.clone(), ComplexField2D::from_fn(spec, mask, f))
    }

    #[test]
    fn constant_field_averages_one() {
        let (d, f) = square_field(80, |_| Complex64::new(1.0, 0.0));
        for c in corners(&d) {
            let r = corner_profile(&f, &d, &c, &[0.2, 0.1, 0.05]).unwrap();
            for a in r.corner_avg.iter().chain(&r.interior_avg).chain(&r.edge_avg) {
                assert!((a - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn oversize_and_undersized_radii_rejected() {
        let (d, f) = square_field(40, |_| Complex64::new(1.0, 0.0));
        let c = corners(&d)[0];
        assert!(matches!(corner_profile(&f, &d, &c, &[0.8]), Err(Error::Precondition(_))));
        match corner_profile(&f, &d, &c, &[0.1, 0.01]) {
            Err(Error::Resolution(msg)) => assert!(msg.contains("minimum admissible")),
            other => panic!("{other:?}"),
        }
        assert!(corner_profile(&f, &d, &c, &[0.05, 0.1]).is_err());
    }

    #[test]
    fn disk_is_rejected() {
        let d = Domain::disk(Point::ORIGIN, 1.0).unwrap();
        let (sq, f) = square_field(40, |_| Complex64::new(1.0, 0.0));
        let c = corners(&sq)[0];
        assert!(corner_profile(&f, &d, &c, &[0.1]).is_err());
    }

    proptest! {
        #[test]
        fn averages_bounded_by_sup(a in -3.0f64..3.0, b in -3.0f64..3.0, m in 0.1f64..5.0) {
            let (d, f) = square_field(40, |p| Complex64::from_polar(m * (a * p.x + b * p.y).sin().abs(), p.x));
            let sup = f.values.iter().zip(&f.mask).filter(|(_, &k)| k).map(|(v, _)| v.norm()).fold(0.0, f64::max);
            for c in corners(&d) {
                let r = corner_profile(&f, &d, &c, &[0.3, 0.2, 0.1]).unwrap();
                for x in r.corner_avg.iter().chain(&r.interior_avg).chain(&r.edge_avg) {
                    prop_assert!(*x <= sup * (1.0 + 1e-12) && *x >= 0.0);
                }
            }
        }
    }
}
