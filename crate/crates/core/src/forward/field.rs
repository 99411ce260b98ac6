use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Point};

/// Complex samples on a uniform grid together with an inside-Ω mask.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexField2D {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
    pub mask: Vec<bool>,
}

impl ComplexField2D {
    pub fn new(spec: GridSpec, values: Vec<Complex64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != spec.len() || mask.len() != spec.len() {
            return Err(Error::Shape(format!(
                "field has {} values and {} mask flags for a {}x{} grid",
                values.len(),
                mask.len(),
                spec.nx,
                spec.ny
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Parameter("field values must be finite".into()));
        }
        Ok(ComplexField2D { spec, values, mask })
    }

    pub fn zeros(spec: GridSpec, mask: Vec<bool>) -> Self {
        ComplexField2D { values: vec![Complex64::new(0.0, 0.0); spec.len()], spec, mask }
    }

    /// Samples `f` at every node.
    pub fn from_fn(spec: GridSpec, mask: Vec<bool>, f: impl Fn(Point) -> Complex64) -> Self {
        let values = spec.points().map(f).collect();
        ComplexField2D { spec, values, mask }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn sub(&self, other: &ComplexField2D) -> Result<Self> {
        self.check_same_grid(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexField2D) -> Result<Self> {
        self.check_same_grid(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    pub fn check_same_grid(&self, other: &ComplexField2D) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Grid quadrature of `||f||_{L2}` over the nodes selected by `select`.
    pub fn l2_norm_on(&self, select: &[bool]) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(select)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.norm_sqr())
            .sum();
        (s * self.spec.cell_area()).sqrt()
    }

    /// `||f||_{L2(Ω)}` using the field's own mask.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_on(&self.mask)
    }

    /// `||f||_{L2}` over all nodes.
    pub fn l2_norm_all(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell_area()).sqrt()
    }

    /// Relative discrete L2 distance `||f - g|| / ||g||` over `select`.
    pub fn relative_error_on(&self, reference: &ComplexField2D, select: &[bool]) -> Result<f64> {
        self.check_same_grid(reference)?;
        let (mut num, mut den) = (0.0, 0.0);
        for ((a, b), &m) in self.values.iter().zip(&reference.values).zip(select) {
            if m {
                num += (a - b).norm_sqr();
                den += b.norm_sqr();
            }
        }
        if den == 0.0 {
            return Err(Error::UndefinedRatio("reference field vanishes on the selection".into()));
        }
        Ok((num / den).sqrt())
    }

    /// Five-point Laplacian at an interior node.
    pub fn laplacian_at(&self, idx: usize) -> Option<Complex64> {
        let s = &self.spec;
        let e = s.offset(idx, 1, 0)?;
        let w = s.offset(idx, -1, 0)?;
        let n = s.offset(idx, 0, 1)?;
        let so = s.offset(idx, 0, -1)?;
        let v = &self.values;
        Some((v[e] + v[w] + v[n] + v[so] - v[idx] * 4.0) / (s.h * s.h))
    }

    /// Bilinear interpolation at an arbitrary point inside the grid.
    pub fn interpolate(&self, p: Point) -> Option<Complex64> {
        let s = &self.spec;
        let fx = (p.x - s.origin.x) / s.h;
        let fy = (p.y - s.origin.y) / s.h;
        if fx < 0.0 || fy < 0.0 || fx > (s.nx - 1) as f64 || fy > (s.ny - 1) as f64 {
            return None;
        }
        let i = (fx.floor() as usize).min(s.nx - 2);
        let j = (fy.floor() as usize).min(s.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a, b| self.values[s.index(a, b)];
        Some(
            v(i, j) * ((1.0 - tx) * (1.0 - ty))
                + v(i + 1, j) * (tx * (1.0 - ty))
                + v(i, j + 1) * ((1.0 - tx) * ty)
                + v(i + 1, j + 1) * (tx * ty),
        )
    }
}
