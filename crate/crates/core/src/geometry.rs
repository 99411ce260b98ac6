//! Scatterer domains, Cartesian grids and corner descriptors.
//!
//! A [`Domain`] is either a disk or a simple counterclockwise polygon. Grids
//! are uniform node lattices ([`GridSpec`]); rasterization marks a node as
//! inside when its center lies in the open domain and records the exact
//! signed distance to the boundary (negative inside).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertices whose interior angle is within this many radians of π are flat.
pub const CORNER_ANGLE_TOL: f64 = 1e-6;

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Point::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by π/2.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

/// Scatterer support Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Disk { center: Point, radius: f64 },
    Polygon { vertices: Vec<Point> },
}

impl Domain {
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        let d = Domain::Disk { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let d = Domain::Polygon { vertices };
        d.validate()?;
        Ok(d)
    }

    /// Axis-aligned square `[x0, x0+side] x [y0, y0+side]`.
    pub fn square(lower_left: Point, side: f64) -> Result<Self> {
        let Point { x, y } = lower_left;
        Domain::polygon(vec![
            Point::new(x, y),
            Point::new(x + side, y),
            Point::new(x + side, y + side),
            Point::new(x, y + side),
        ])
    }

    /// Regular `n`-gon inscribed in the circle of radius `radius`.
    pub fn regular_polygon(center: Point, radius: f64, n: usize) -> Result<Self> {
        let vertices = (0..n)
            .map(|i| center + Point::from_polar(radius, 2.0 * PI * i as f64 / n as f64))
            .collect();
        Domain::polygon(vertices)
    }

    /// Checks the type invariants: positive radius, or a simple,
    /// counterclockwise polygon with at least three vertices.
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Disk { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Domain(format!("disk radius must be > 0, got {radius}")));
                }
                if !(center.x.is_finite() && center.y.is_finite()) {
                    return Err(Error::Domain("disk center must be finite".into()));
                }
                Ok(())
            }
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::Domain(format!("polygon needs at least 3 vertices, got {n}")));
                }
                if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
                    return Err(Error::Domain("polygon vertices must be finite".into()));
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(Error::Domain("polygon must be counterclockwise with positive area".into()));
                }
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if a.distance(b) == 0.0 {
                        return Err(Error::Domain(format!("repeated vertex at index {i}")));
                    }
                    for j in (i + 1)..n {
                        // adjacent edges share a vertex
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                        if segments_intersect(a, b, c, d) {
                            return Err(Error::Domain(format!("edges {i} and {j} intersect")));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn bounding_box(&self) -> BoundingBox {
        match self {
            Domain::Disk { center, radius } => BoundingBox {
                min: Point::new(center.x - radius, center.y - radius),
                max: Point::new(center.x + radius, center.y + radius),
            },
            Domain::Polygon { vertices } => {
                let mut min = Point::new(f64::INFINITY, f64::INFINITY);
                let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    min.x = min.x.min(v.x);
                    min.y = min.y.min(v.y);
                    max.x = max.x.max(v.x);
                    max.y = max.y.max(v.y);
                }
                BoundingBox { min, max }
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Disk { radius, .. } => PI * radius * radius,
            Domain::Polygon { vertices } => signed_area(vertices),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Disk { radius, .. } => 2.0 * radius,
            Domain::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        d = d.max(a.distance(*b));
                    }
                }
                d
            }
        }
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        match self {
            Domain::Disk { center, .. } => *center,
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                    let c = p.cross(q);
                    a2 += c;
                    cx += (p.x + q.x) * c;
                    cy += (p.y + q.y) * c;
                }
                Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
            }
        }
    }

    /// Membership in the open domain.
    pub fn contains(&self, p: Point) -> bool {
        self.signed_distance(p) < 0.0
    }

    /// Exact signed distance to ∂Ω, negative inside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match self {
            Domain::Disk { center, radius } => p.distance(*center) - radius,
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut dist = f64::INFINITY;
                for i in 0..n {
                    dist = dist.min(point_segment_distance(p, vertices[i], vertices[(i + 1) % n]));
                }
                if dist == 0.0 {
                    0.0
                } else if winding_inside(vertices, p) {
                    -dist
                } else {
                    dist
                }
            }
        }
    }

    /// Outward unit normal at the boundary point nearest to `p`.
    pub fn outward_normal_near(&self, p: Point) -> Point {
        match self {
            Domain::Disk { center, .. } => (p - *center).normalized(),
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut best = (f64::INFINITY, Point::new(1.0, 0.0));
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let d = point_segment_distance(p, a, b);
                    if d < best.0 {
                        // outward normal of a ccw edge is the clockwise perpendicular
                        best = (d, -((b - a).normalized().perp()));
                    }
                }
                best.1
            }
        }
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum::<f64>() / 2.0
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.distance(a + t * ab)
}

fn orientation(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2) = (orientation(a, b, c), orientation(a, b, d));
    let (o3, o4) = (orientation(c, d, a), orientation(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn winding_inside(vertices: &[Point], p: Point) -> bool {
    let n = vertices.len();
    let mut winding = 0i32;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if a.y <= p.y {
            if b.y > p.y && orientation(a, b, p) > 0.0 {
                winding += 1;
            }
        } else if b.y <= p.y && orientation(a, b, p) < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// Uniform node lattice `x_ij = origin + (i h, j h)`, `0 <= i < nx`, `0 <= j < ny`.
///
/// Node `(i, j)` has linear index `j * nx + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { origin, h, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// Smallest grid with spacing `h` covering the domain's bounding box with
    /// `margin` extra cells on every side.
    pub fn covering(domain: &Domain, h: f64, margin: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Coverage(format!("spacing must be > 0, got {h}")));
        }
        let bb = domain.bounding_box();
        let cells_x = ((bb.max.x - bb.min.x) / h - 1e-9).ceil().max(0.0) as usize;
        let cells_y = ((bb.max.y - bb.min.y) / h - 1e-9).ceil().max(0.0) as usize;
        let m = margin as f64 * h;
        // center the lattice on the bounding box
        let pad_x = (cells_x as f64 * h - (bb.max.x - bb.min.x)) / 2.0;
        let pad_y = (cells_y as f64 * h - (bb.max.y - bb.min.y)) / 2.0;
        GridSpec::new(
            Point::new(bb.min.x - m - pad_x, bb.min.y - m - pad_y),
            h,
            cells_x + 2 * margin + 1,
            cells_y + 2 * margin + 1,
        )
    }

    /// Grid whose nodes are `x0 + i h` exactly for the given square window.
    pub fn square_window(lower_left: Point, side: f64, cells: usize) -> Result<Self> {
        GridSpec::new(lower_left, side / cells as f64, cells + 1, cells + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::Coverage(format!("spacing must be > 0, got {}", self.h)));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Coverage(format!(
                "grid needs at least 2 nodes per direction, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Checks the ≥ 2-cell margin around the domain's bounding box.
    pub fn check_covers(&self, domain: &Domain) -> Result<()> {
        self.validate()?;
        let bb = domain.bounding_box();
        let tol = 1e-9 * self.h;
        let lo = Point::new(self.origin.x + 2.0 * self.h, self.origin.y + 2.0 * self.h);
        let hi = Point::new(
            self.origin.x + (self.nx as f64 - 3.0) * self.h,
            self.origin.y + (self.ny as f64 - 3.0) * self.h,
        );
        if bb.min.x < lo.x - tol || bb.min.y < lo.y - tol || bb.max.x > hi.x + tol || bb.max.y > hi.y + tol {
            return Err(Error::Coverage(format!(
                "domain box [{}, {}]x[{}, {}] needs a 2-cell margin inside [{}, {}]x[{}, {}]",
                bb.min.x, bb.max.x, bb.min.y, bb.max.y, lo.x, hi.x, lo.y, hi.y
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + i as f64 * self.h, self.origin.y + j as f64 * self.h)
    }

    pub fn point(&self, idx: usize) -> Point {
        let (i, j) = self.coords(idx);
        self.node(i, j)
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    /// Iterator over all node positions in index order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |idx| self.point(idx))
    }

    /// Neighbor of `idx` shifted by `(di, dj)`, if it lies on the grid.
    pub fn offset(&self, idx: usize, di: isize, dj: isize) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let (ii, jj) = (i as isize + di, j as isize + dj);
        if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
            None
        } else {
            Some(self.index(ii as usize, jj as usize))
        }
    }
}

/// Rasterized domain: node membership plus signed distance samples.
#[derive(Clone, Debug)]
pub struct Raster {
    pub spec: GridSpec,
    pub inside: Vec<bool>,
    pub distance: Vec<f64>,
}

impl Raster {
    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Node-count area estimate `#inside * h^2`.
    pub fn area(&self) -> f64 {
        self.inside_count() as f64 * self.spec.cell_area()
    }

    /// Mask of `{x ∈ Ω : dist(x, ∂Ω) < eps}`. Nodes at distance exactly `eps`
    /// are kept so that `eps` equal to the inradius yields the whole mask.
    pub fn band(&self, eps: f64) -> Result<Vec<bool>> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("band width must be > 0, got {eps}")));
        }
        Ok(self
            .inside
            .iter()
            .zip(&self.distance)
            .map(|(&inside, &d)| inside && -d <= eps)
            .collect())
    }
}

/// Marks nodes whose center lies in Ω and records signed distances.
pub fn rasterize(domain: &Domain, spec: &GridSpec) -> Result<Raster> {
    spec.check_covers(domain)?;
    let distance: Vec<f64> = spec.points().map(|p| domain.signed_distance(p)).collect();
    let inside = distance.iter().map(|&d| d < 0.0).collect();
    Ok(Raster { spec: *spec, inside, distance })
}

/// Mask of the boundary band `N_eps(∂Ω)` on the grid.
pub fn boundary_band(domain: &Domain, spec: &GridSpec, eps: f64) -> Result<Vec<bool>> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("band width must be > 0, got {eps}")));
    }
    rasterize(domain, spec)?.band(eps)
}

/// A polygon vertex whose interior opening angle differs from π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerDescriptor {
    pub vertex: Point,
    pub index: usize,
    /// Interior opening angle in (0, 2π).
    pub angle: f64,
    /// Unit direction of the edge arriving at the vertex.
    pub incoming: Point,
    /// Unit direction of the edge leaving the vertex.
    pub outgoing: Point,
    /// Shorter of the two adjacent edge lengths (local corner size).
    pub size: f64,
}

impl CornerDescriptor {
    /// Unit vector bisecting the interior opening.
    pub fn inward_bisector(&self) -> Point {
        let a = self.outgoing;
        let b = -self.incoming;
        let s = a + b;
        if s.norm() < 1e-12 {
            // flat vertex: interior side is to the left of the edge
            self.outgoing.perp()
        } else if self.angle < PI {
            s.normalized()
        } else {
            (-s).normalized()
        }
    }
}

/// Corner descriptors of a polygon; disks have none.
pub fn corners(domain: &Domain) -> Vec<CornerDescriptor> {
    let Domain::Polygon { vertices } = domain else {
        return Vec::new();
    };
    let n = vertices.len();
    let mut out = Vec::new();
    for i in 0..n {
        let prev = vertices[(i + n - 1) % n];
        let v = vertices[i];
        let next = vertices[(i + 1) % n];
        let e_in = v - prev;
        let e_out = next - v;
        let turn = e_in.cross(e_out).atan2(e_in.dot(e_out));
        let angle = PI - turn;
        if (angle - PI).abs() > CORNER_ANGLE_TOL {
            out.push(CornerDescriptor {
                vertex: v,
                index: i,
                angle,
                incoming: e_in.normalized(),
                outgoing: e_out.normalized(),
                size: e_in.norm().min(e_out.norm()),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_disk() -> Domain {
        Domain::disk(Point::ORIGIN, 1.0).unwrap()
    }

    fn l_shape() -> Domain {
        Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn unit_disk_area_from_raster() {
        let d = unit_disk();
        let spec = GridSpec::covering(&d, 0.02, 3).unwrap();
        let r = rasterize(&d, &spec).unwrap();
        assert!((r.area() - PI).abs() / PI < 0.01, "area {}", r.area());
    }

    #[test]
    fn center_node_distance_is_minus_radius() {
        let d = Domain::disk(Point::new(0.3, -0.2), 0.7).unwrap();
        let spec = GridSpec::new(Point::new(-1.7, -2.2), 0.1, 41, 41).unwrap();
        let r = rasterize(&d, &spec).unwrap();
        let idx = spec.index(20, 20);
        assert!(spec.point(idx).distance(Point::new(0.3, -0.2)) < 1e-12);
        assert!((r.distance[idx] + 0.7).abs() < 1e-12);
    }

    #[test]
    fn too_few_nodes_is_coverage_error() {
        let spec = GridSpec { origin: Point::new(-2.0, -2.0), h: 0.1, nx: 1, ny: 40 };
        assert!(matches!(rasterize(&unit_disk(), &spec), Err(Error::Coverage(_))));
        let small = GridSpec::new(Point::new(-1.0, -1.0), 0.1, 21, 21).unwrap();
        assert!(matches!(rasterize(&unit_disk(), &small), Err(Error::Coverage(_))));
    }

    #[test]
    fn square_corners() {
        let c = corners(&Domain::square(Point::ORIGIN, 1.0).unwrap());
        assert_eq!(c.len(), 4);
        for corner in &c {
            assert!((corner.angle - PI / 2.0).abs() < 1e-12);
        }
        assert!(corners(&unit_disk()).is_empty());
    }

    #[test]
    fn l_shape_has_one_reflex_corner() {
        let c = corners(&l_shape());
        assert_eq!(c.len(), 6);
        let reflex: Vec<_> = c.iter().filter(|c| (c.angle - 1.5 * PI).abs() < 1e-12).collect();
        assert_eq!(reflex.len(), 1);
        assert_eq!(reflex[0].vertex, Point::new(1.0, 1.0));
        let b = reflex[0].inward_bisector();
        assert!(l_shape().contains(Point::new(1.0, 1.0) + 0.1 * b));
    }

    #[test]
    fn flat_vertices_are_not_corners() {
        let d = Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(corners(&d).len(), 4);
    }

    #[test]
    fn invalid_polygons_rejected() {
        let cw = vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)];
        assert!(Domain::polygon(cw).is_err());
        let bowtie = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        assert!(Domain::polygon(bowtie).is_err());
        assert!(Domain::polygon(vec![Point::ORIGIN, Point::new(1.0, 0.0)]).is_err());
        assert!(Domain::disk(Point::ORIGIN, 0.0).is_err());
    }

    #[test]
    fn band_of_unit_disk() {
        let d = unit_disk();
        let spec = GridSpec::covering(&d, 0.005, 3).unwrap();
        let band = boundary_band(&d, &spec, 0.1).unwrap();
        let area = band.iter().filter(|&&b| b).count() as f64 * spec.cell_area();
        let exact = PI * (1.0 - 0.81);
        assert!((area - exact).abs() / exact < 0.02, "band area {area} vs {exact}");
    }

    #[test]
    fn wide_band_is_whole_domain() {
        let d = unit_disk();
        let spec = GridSpec::covering(&d, 0.05, 2).unwrap();
        let r = rasterize(&d, &spec).unwrap();
        assert_eq!(r.band(1.0).unwrap(), r.inside);
        assert!(matches!(boundary_band(&d, &spec, -0.1), Err(Error::Parameter(_))));
    }

    #[test]
    fn polygon_signed_distance_and_centroid() {
        let sq = Domain::square(Point::ORIGIN, 2.0).unwrap();
        assert!((sq.signed_distance(Point::new(1.0, 1.0)) + 1.0).abs() < 1e-15);
        assert!((sq.signed_distance(Point::new(3.0, 1.0)) - 1.0).abs() < 1e-15);
        assert_eq!(sq.centroid(), Point::new(1.0, 1.0));
        assert!((sq.area() - 4.0).abs() < 1e-15);
        let l = l_shape();
        assert!(l.contains(Point::new(0.5, 1.5)));
        assert!(!l.contains(Point::new(1.5, 1.5)));
        assert!((l.area() - 3.0).abs() < 1e-14);
        let n = sq.outward_normal_near(Point::new(1.9, 1.0));
        assert!((n.x - 1.0).abs() < 1e-15 && n.y.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn regular_ngon_angles(n in 3usize..24, r in 0.1f64..5.0) {
            let d = Domain::regular_polygon(Point::new(0.2, 0.1), r, n).unwrap();
            let c = corners(&d);
            prop_assert_eq!(c.len(), n);
            let expected = (n as f64 - 2.0) * PI / n as f64;
            for corner in c {
                prop_assert!((corner.angle - expected).abs() < 1e-10);
            }
        }

        #[test]
        fn bands_are_nested(e1 in 0.01f64..1.0, e2 in 0.01f64..1.0) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let d = Domain::regular_polygon(Point::ORIGIN, 1.0, 5).unwrap();
            let spec = GridSpec::covering(&d, 0.04, 2).unwrap();
            let r = rasterize(&d, &spec).unwrap();
            let (a, b) = (r.band(lo).unwrap(), r.band(hi).unwrap());
            for ((&x, &y), &inside) in a.iter().zip(&b).zip(&r.inside) {
                prop_assert!(!x || y);
                prop_assert!(!y || inside);
            }
        }
    }
}
