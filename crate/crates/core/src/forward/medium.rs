use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, GridSpec, Point};

/// Contrast `V = η² - 1` inside Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Contrast {
    Constant(f64),
    /// Piecewise-linear profile in `|x - center|`, given as `(r, V)` knots
    /// sorted by `r`; constant beyond the last knot.
    Radial { center: Point, knots: Vec<(f64, f64)> },
    /// Samples on their own grid, bilinearly interpolated.
    Grid { spec: GridSpec, values: Vec<f64> },
}

/// How the contrast is turned into per-node values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ContrastSampling {
    /// `V(x_p)` if the node center lies in Ω, else 0.
    #[default]
    NodeCenter,
    /// Mean of `V·1_Ω` over `sub x sub` points of the cell around each node.
    CellAverage { sub: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub domain: Domain,
    pub contrast: Contrast,
    #[serde(default)]
    pub sampling: ContrastSampling,
}

impl Medium {
    pub fn new(domain: Domain, contrast: Contrast) -> Result<Self> {
        let m = Medium { domain, contrast, sampling: ContrastSampling::NodeCenter };
        m.validate()?;
        Ok(m)
    }

    pub fn constant(domain: Domain, v: f64) -> Result<Self> {
        Medium::new(domain, Contrast::Constant(v))
    }

    pub fn with_sampling(mut self, sampling: ContrastSampling) -> Result<Self> {
        self.sampling = sampling;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let check = |v: f64| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("contrast must be finite, got {v}")));
            }
            if 1.0 + v <= 0.0 {
                return Err(Error::Parameter(format!("1 + V must be > 0, got V = {v}")));
            }
            Ok(())
        };
        match &self.contrast {
            Contrast::Constant(v) => check(*v)?,
            Contrast::Radial { knots, .. } => {
                if knots.is_empty() {
                    return Err(Error::Parameter("radial contrast needs at least one knot".into()));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Parameter("radial knots must be strictly increasing in r".into()));
                }
                for &(_, v) in knots {
                    check(v)?;
                }
            }
            Contrast::Grid { spec, values } => {
                spec.validate()?;
                if values.len() != spec.len() {
                    return Err(Error::Shape(format!(
                        "contrast grid has {} samples for {} nodes",
                        values.len(),
                        spec.len()
                    )));
                }
                for &v in values {
                    check(v)?;
                }
            }
        }
        if let ContrastSampling::CellAverage { sub } = self.sampling {
            if sub == 0 {
                return Err(Error::Parameter("cell-average sub-sampling must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Contrast at `p`, zero outside Ω.
    pub fn value_at(&self, p: Point) -> f64 {
        if !self.domain.contains(p) {
            return 0.0;
        }
        self.contrast_profile(p)
    }

    fn contrast_profile(&self, p: Point) -> f64 {
        match &self.contrast {
            Contrast::Constant(v) => *v,
            Contrast::Radial { center, knots } => {
                let r = p.distance(*center);
                if r <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let ((r0, v0), (r1, v1)) = (w[0], w[1]);
                    if r <= r1 {
                        return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
                    }
                }
                knots[knots.len() - 1].1
            }
            Contrast::Grid { spec, values } => {
                let fx = ((p.x - spec.origin.x) / spec.h).clamp(0.0, (spec.nx - 1) as f64);
                let fy = ((p.y - spec.origin.y) / spec.h).clamp(0.0, (spec.ny - 1) as f64);
                let i = (fx.floor() as usize).min(spec.nx - 2);
                let j = (fy.floor() as usize).min(spec.ny - 2);
                let (tx, ty) = (fx - i as f64, fy - j as f64);
                let v = |a, b| values[spec.index(a, b)];
                v(i, j) * (1.0 - tx) * (1.0 - ty)
                    + v(i + 1, j) * tx * (1.0 - ty)
                    + v(i, j + 1) * (1.0 - tx) * ty
                    + v(i + 1, j + 1) * tx * ty
            }
        }
    }

    /// Per-node contrast on `spec` according to the sampling rule.
    pub fn sample(&self, spec: &GridSpec) -> Vec<f64> {
        match self.sampling {
            ContrastSampling::NodeCenter => spec.points().map(|p| self.value_at(p)).collect(),
            ContrastSampling::CellAverage { sub } => {
                let h = spec.h;
                let reach = std::f64::consts::SQRT_2 * h;
                spec.points()
                    .map(|p| {
                        let d = self.domain.signed_distance(p);
                        if d > reach {
                            return 0.0;
                        }
                        if d < -reach {
                            return self.contrast_profile(p);
                        }
                        let mut acc = 0.0;
                        for a in 0..sub {
                            for b in 0..sub {
                                let q = Point::new(
                                    p.x + h * ((a as f64 + 0.5) / sub as f64 - 0.5),
                                    p.y + h * ((b as f64 + 0.5) / sub as f64 - 0.5),
                                );
                                acc += self.value_at(q);
                            }
                        }
                        acc / (sub * sub) as f64
                    })
                    .collect()
            }
        }
    }

    /// True when the contrast vanishes identically.
    pub fn is_trivial(&self) -> bool {
        match &self.contrast {
            Contrast::Constant(v) => *v == 0.0,
            Contrast::Radial { knots, .. } => knots.iter().all(|k| k.1 == 0.0),
            Contrast::Grid { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Constant contrast value, if the medium has one.
    pub fn constant_value(&self) -> Option<f64> {
        match self.contrast {
            Contrast::Constant(v) => Some(v),
            _ => None,
        }
    }
}
