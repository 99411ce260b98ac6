//! Separation-of-variables solution for a plane wave hitting a disk of
//! constant contrast centered at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specialfn::{bessel_j_seq, check_wavenumber, derivatives, hankel1_seq};

#[derive(Clone, Debug, Serialize)]
pub struct MieDisk {
    pub radius: f64,
    pub contrast: f64,
    pub k: f64,
    /// Incidence angle of the plane-wave direction.
    pub theta_d: f64,
    pub order: usize,
    /// Exterior coefficients `a_0..=a_M` (`a_{-m} = a_m`).
    pub a: Vec<Complex64>,
    /// Interior coefficients `b_0..=b_M`.
    pub b: Vec<Complex64>,
}

fn i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl MieDisk {
    pub fn new(radius: f64, contrast: f64, k: f64, direction: Point, order: usize) -> Result<Self> {
        check_wavenumber(k)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("radius must be > 0, got {radius}")));
        }
        if !(1.0 + contrast > 0.0) || !contrast.is_finite() {
            return Err(Error::Parameter(format!("1 + V must be > 0, got V = {contrast}")));
        }
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter("incidence direction must be unit".into()));
        }
        let min_order = (k * radius).ceil() as usize + 15;
        if order < min_order {
            return Err(Error::Precondition(format!("truncation order {order} below ceil(kR) + 15 = {min_order}")));
        }
        let k1 = k * (1.0 + contrast).sqrt();
        let j = bessel_j_seq(order + 1, k * radius);
        let j1 = bessel_j_seq(order + 1, k1 * radius);
        let h = hankel1_seq(order + 1, k * radius)?;
        let (jp, j1p, hp) = (derivatives(&j), derivatives(&j1), derivatives(&h));
        let mut a = Vec::with_capacity(order + 1);
        let mut b = Vec::with_capacity(order + 1);
        for m in 0..=order {
            // a H - b J1 = -J ;  a k H' - b k1 J1' = -k J'
            let det = -h[m] * (k1 * j1p[m]) + hp[m] * (k * j1[m]);
            let scale = h[m].norm() * k1 * j1p[m].abs().max(j1[m].abs()) + 1e-300;
            if det.norm() <= 1e-14 * scale {
                return Err(Error::DegenerateOrder {
                    order: m as i64,
                    reason: "interface matching matrix is singular".into(),
                });
            }
            let am = (-j[m] * (-k1 * j1p[m]) - (-k * jp[m]) * (-j1[m])) / det;
            let bm = (h[m] * (-k * jp[m]) - hp[m] * k * (-j[m])) / det;
            a.push(am);
            b.push(bm);
        }
        Ok(MieDisk { radius, contrast, k, theta_d: direction.angle(), order, a, b })
    }

    pub fn interior_wavenumber(&self) -> f64 {
        self.k * (1.0 + self.contrast).sqrt()
    }

    fn angular_sum(&self, coeffs: impl Fn(usize) -> Complex64, phi: f64) -> Complex64 {
        let mut s = coeffs(0);
        for m in 1..=self.order {
            s += coeffs(m) * (2.0 * (m as f64 * phi).cos());
        }
        s
    }

    /// Incident plane wave `e^{ik x·d}` (exact, not truncated).
    pub fn incident(&self, p: Point) -> Complex64 {
        Complex64::from_polar(1.0, self.k * p.dot(Point::from_polar(1.0, self.theta_d)))
    }

    /// Scattered field; `None` inside the disk.
    pub fn scattered(&self, p: Point) -> Option<Complex64> {
        let r = p.norm();
        if r < self.radius {
            return None;
        }
        let h = hankel1_seq(self.order, self.k * r).ok()?;
        let phi = p.angle() - self.theta_d;
        Some(self.angular_sum(|m| i_pow(m) * self.a[m] * h[m], phi))
    }

    /// Total field: interior series inside, incident plus scattered outside.
    pub fn total(&self, p: Point) -> Complex64 {
        let r = p.norm();
        let phi = p.angle() - self.theta_d;
        if r < self.radius {
            let j1 = bessel_j_seq(self.order, self.interior_wavenumber() * r);
            self.angular_sum(|m| i_pow(m) * self.b[m] * j1[m], phi)
        } else {
            self.incident(p) + self.scattered(p).expect("exterior point")
        }
    }

    /// Truncated series for the incident wave inside the disk (for trace checks).
    pub fn incident_series(&self, p: Point) -> Complex64 {
        let j = bessel_j_seq(self.order, self.k * p.norm());
        self.angular_sum(|m| i_pow(m) * j[m], p.angle() - self.theta_d)
    }

    /// Far-field pattern at observation angle `phi`.
    pub fn far_field(&self, phi: f64) -> Complex64 {
        let c = Complex64::from_polar((2.0 / (PI * self.k)).sqrt(), -PI / 4.0);
        c * self.angular_sum(|m| self.a[m], phi - self.theta_d)
    }

    /// Largest mismatch of value and radial derivative across `r = R` over
    /// `n` equispaced angles, relative to the incident amplitude.
    pub fn boundary_residual(&self, n: usize) -> f64 {
        let (k, k1, r) = (self.k, self.interior_wavenumber(), self.radius);
        let j = bessel_j_seq(self.order + 1, k * r);
        let j1 = bessel_j_seq(self.order + 1, k1 * r);
        let h = hankel1_seq(self.order + 1, k * r).expect("positive radius");
        let (jp, j1p, hp) = (derivatives(&j), derivatives(&j1), derivatives(&h));
        let mut worst: f64 = 0.0;
        for t in 0..n {
            let phi = 2.0 * PI * t as f64 / n as f64;
            let out = self.angular_sum(|m| i_pow(m) * (j[m] + self.a[m] * h[m]), phi);
            let inn = self.angular_sum(|m| i_pow(m) * self.b[m] * j1[m], phi);
            let dout = self.angular_sum(|m| i_pow(m) * (jp[m] + self.a[m] * hp[m]) * k, phi);
            let dinn = self.angular_sum(|m| i_pow(m) * self.b[m] * j1p[m] * k1, phi);
            worst = worst.max((out - inn).norm()).max((dout - dinn).norm() / k);
        }
        worst
    }
}
