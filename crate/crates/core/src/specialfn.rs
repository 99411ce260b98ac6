//! Integer-order Bessel functions and the outgoing 2D fundamental solution.
//!
//! `J_m` comes from the ascending series for `x < 1` and from Miller's
//! backward recurrence (normalized by `J_0 + 2 sum J_2k = 1`) otherwise.
//! `Y_0` and `Y_1` are Neumann series over the same `J` sequence, higher
//! orders use the stable forward recurrence.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_AT: f64 = 1e250;

/// Real wavenumber `k > 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Wavenumber(f64);

impl Wavenumber {
    pub fn new(k: f64) -> Result<Self> {
        check_wavenumber(k)?;
        Ok(Wavenumber(k))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Wavenumber {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        Wavenumber::new(k)
    }
}

impl From<Wavenumber> for f64 {
    fn from(k: Wavenumber) -> f64 {
        k.0
    }
}

pub fn check_wavenumber(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("wavenumber must be finite and > 0, got {k}")))
    }
}

fn series_j(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 1usize;
    loop {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
        k += 1;
    }
    sum
}

/// Normalized Miller sequence `J_0..=J_n` for `x > 0`, where `n >= nmax` is
/// the recurrence start (so the tail is available for Neumann sums).
fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let top = nmax.max(x.ceil() as usize) as f64;
    let mut start = (top + 20.0 + (160.0 * top).sqrt()) as usize;
    start += start % 2;
    let mut out = vec![0.0; start + 1];
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    out[start] = j;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        let jm1 = (2.0 * n as f64 / x) * j - jp1;
        out[n - 1] = jm1;
        jp1 = j;
        j = jm1;
        if n - 1 > 0 && (n - 1) % 2 == 0 {
            norm += 2.0 * jm1;
        }
        if jm1.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            j *= s;
            jp1 *= s;
            norm *= s;
            for v in &mut out[n - 1..] {
                *v *= s;
            }
        }
    }
    norm += out[0];
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// `J_0(x), ..., J_nmax(x)` for real `x`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let ax = x.abs();
    let mut out = if ax == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        v
    } else if ax < 1.0 {
        (0..=nmax).map(|m| series_j(m, ax)).collect()
    } else {
        let mut v = miller(nmax, ax);
        v.truncate(nmax + 1);
        v
    };
    if x < 0.0 {
        for (m, v) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_m(x)`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    if x.abs() < 1.0 {
        let v = series_j(m, x.abs());
        return if x < 0.0 && m % 2 == 1 { -v } else { v };
    }
    bessel_j_seq(m, x)[m]
}

/// `J_m'(x)`.
pub fn bessel_jp(m: usize, x: f64) -> f64 {
    let j = bessel_j_seq(m + 1, x);
    derivative_from_seq(&j, m)
}

fn derivative_from_seq<T>(seq: &[T], m: usize) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Neg<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if m == 0 {
        -seq[1]
    } else {
        (seq[m - 1] - seq[m + 1]) * 0.5
    }
}

fn check_positive_arg(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::FunctionDomain(format!("Y_m and H_m need finite x > 0, got {x}")))
    }
}

/// `(J_0..=J_nmax, Y_0..=Y_nmax)` at `x > 0`.
pub fn bessel_jy_seq(nmax: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_positive_arg(x)?;
    let full = miller(nmax.max(1), x);
    let ln_term = (0.5 * x).ln() + EULER_GAMMA;

    let mut s0 = 0.0;
    let mut k = 1;
    while 2 * k < full.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * full[2 * k] / k as f64;
        k += 1;
    }
    let y0 = (2.0 / PI) * ln_term * full[0] - (4.0 / PI) * s0;

    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < full.len() {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s1 += sign * (2.0 * kf + 1.0) / (kf * (kf + 1.0)) * full[2 * k + 1];
        k += 1;
    }
    let y1 = -2.0 / (PI * x) * full[0] + (2.0 / PI) * (ln_term - 1.0) * full[1] - (2.0 / PI) * s1;

    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    y.push(y1);
    for n in 1..nmax {
        let next = (2.0 * n as f64 / x) * y[n] - y[n - 1];
        y.push(next);
    }
    y.truncate(nmax + 1);

    let j = if x < 1.0 {
        (0..=nmax).map(|m| series_j(m, x)).collect()
    } else {
        full[..=nmax].to_vec()
    };
    Ok((j, y))
}

/// `Y_m(x)` for `x > 0`.
pub fn bessel_y(m: usize, x: f64) -> Result<f64> {
    Ok(bessel_jy_seq(m, x)?.1[m])
}

/// `Y_m'(x)` for `x > 0`.
pub fn bessel_yp(m: usize, x: f64) -> Result<f64> {
    let (_, y) = bessel_jy_seq(m + 1, x)?;
    Ok(derivative_from_seq(&y, m))
}

/// `H^(1)_0..=H^(1)_nmax` at `x > 0`.
pub fn hankel1_seq(nmax: usize, x: f64) -> Result<Vec<Complex64>> {
    let (j, y) = bessel_jy_seq(nmax, x)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// `H^(1)_m(x) = J_m(x) + i Y_m(x)` for `x > 0`.
pub fn hankel1(m: usize, x: f64) -> Result<Complex64> {
    Ok(hankel1_seq(m, x)?[m])
}

/// `H^(1)_m'(x)` for `x > 0`.
pub fn hankel1p(m: usize, x: f64) -> Result<Complex64> {
    let h = hankel1_seq(m + 1, x)?;
    Ok(derivative_from_seq(&h, m))
}

/// Derivatives of a Bessel-type sequence `f_0..=f_n` from the recurrence
/// `f_m' = (f_{m-1} - f_{m+1})/2`; the result has one element fewer.
pub fn derivatives<T>(seq: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Neg<Output = T> + std::ops::Mul<f64, Output = T>,
{
    (0..seq.len().saturating_sub(1)).map(|m| derivative_from_seq(seq, m)).collect()
}

/// Leading large-argument term `sqrt(2/(pi x)) e^{i(x - m pi/2 - pi/4)}`.
pub fn hankel1_asymptotic(m: usize, x: f64) -> Complex64 {
    let phase = x - m as f64 * FRAC_PI_2 - FRAC_PI_4;
    Complex64::from_polar((2.0 / (PI * x)).sqrt(), phase)
}

/// `Phi(x, z) = (i/4) H^(1)_0(k |x - z|)`.
pub fn fundamental_solution(k: f64, x: Point, z: Point) -> Result<Complex64> {
    check_wavenumber(k)?;
    let r = x.distance(z);
    if r == 0.0 {
        return Err(Error::Singularity("fundamental solution evaluated at x = z".into()));
    }
    Ok(phi_radial(k * r))
}

/// `(i/4) H^(1)_0(t)` for `t > 0`.
pub(crate) fn phi_radial(t: f64) -> Complex64 {
    let (j, y) = bessel_jy_seq(0, t).expect("positive argument");
    Complex64::new(-0.25 * y[0], 0.25 * j[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // scipy.special.jv / yv
    const REFERENCE: &[(usize, f64, f64, f64)] = &[
        (0, 0.3, 0.9776262465382961, -0.8072735778045197),
        (1, 0.3, 0.148318816273104, -2.2931051383885293),
        (5, 0.3, 6.304432633771069e-07, -101169.65735231196),
        (0, 2.5, -0.04838377646819792, 0.49807035961523194),
        (3, 2.5, 0.21660039103911358, -0.7560554967536711),
        (10, 2.5, 2.224728417398381e-06, -14782.847716021066),
        (0, 17.3, -0.13370064707576432, -0.13750521344352498),
        (7, 17.3, 0.15813826349007562, 0.12323115366731956),
        (40, 17.3, 5.7300872546605645e-12, -1540452381.5459375),
        (0, 100.0, 0.01998585030422312, -0.07724431336508318),
        (1, 100.0, -0.07714535201411214, -0.02037231200275981),
        (60, 100.0, 0.0010631563042275555, -0.08919469415037781),
        (100, 100.0, 0.09636667329586157, -0.16692141141757655),
        (2, 1000.0, -0.02477722952860599, -0.004765486640207518),
        (100, 1000.0, 0.011676135007793324, -0.02243868825772318),
        (30, 45.0, 0.04579930955404108, 0.12986219863426496),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn matches_reference_table() {
        for &(m, x, j, y) in REFERENCE {
            let (js, ys) = bessel_jy_seq(m, x).unwrap();
            // the large-x values sit near zeros of the oscillation, where
            // absolute accuracy is the meaningful measure
            let jtol = if x >= 100.0 { 1e-9 } else { 1e-10 };
            assert!(rel(bessel_j(m, x), j) < jtol, "J_{m}({x}) = {} vs {j}", bessel_j(m, x));
            assert!(rel(js[m], j) < jtol, "seq J_{m}({x})");
            assert!(rel(ys[m], y) < jtol, "Y_{m}({x}) = {} vs {y}", ys[m]);
        }
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for m in 1..20 {
            assert_eq!(bessel_j(m, 0.0), 0.0);
        }
    }

    #[test]
    fn three_term_recurrence() {
        let x = 3.7;
        let m = 4;
        let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
        let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn first_zero_of_j0_by_bisection() {
        let (mut a, mut b) = (2.0, 3.0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if bessel_j(0, a) * bessel_j(0, c) <= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        let root = 0.5 * (a + b);
        assert!(bessel_j(0, root).abs() < 1e-10);
        assert!((root - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn wronskian() {
        let x = 2.5;
        for m in 0..30 {
            let (j, y) = bessel_jy_seq(m + 1, x).unwrap();
            let jp = derivatives(&j);
            let yp = derivatives(&y);
            let w = j[m] * yp[m] - jp[m] * y[m];
            let expected = 2.0 / (PI * x);
            assert!((w - expected).abs() < 1e-9 * expected.max(1.0), "m={m}: {w}");
        }
    }

    // Hankel's expansion: sum_k i^k a_k(m) / x^k times the leading term.
    fn hankel_series(m: usize, x: f64, terms: usize) -> Complex64 {
        let mu = 4.0 * (m * m) as f64;
        let mut a = 1.0;
        let mut sum = Complex64::new(1.0, 0.0);
        let mut ik = Complex64::new(1.0, 0.0);
        for k in 1..terms {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
            ik *= Complex64::i();
            sum += ik * a;
        }
        hankel1_asymptotic(m, x) * sum
    }

    #[test]
    fn large_argument_asymptotic() {
        for m in 0..6 {
            let h = hankel1(m, 100.0).unwrap();
            let a = hankel_series(m, 100.0, 8);
            assert!((h - a).norm() / h.norm() < 1e-4, "m={m}");
        }
    }

    #[test]
    fn nonpositive_argument_is_domain_error() {
        assert!(matches!(hankel1(0, 0.0), Err(Error::FunctionDomain(_))));
        assert!(matches!(bessel_y(2, -1.0), Err(Error::FunctionDomain(_))));
    }

    #[test]
    fn fundamental_solution_properties() {
        let (x, z) = (Point::new(0.3, -1.2), Point::new(-0.7, 0.4));
        let a = fundamental_solution(2.0, x, z).unwrap();
        let b = fundamental_solution(2.0, z, x).unwrap();
        assert_eq!(a, b);
        assert!(matches!(fundamental_solution(2.0, x, x), Err(Error::Singularity(_))));
        assert!(matches!(fundamental_solution(0.0, x, z), Err(Error::Parameter(_))));
    }

    fn helmholtz_residual(k: f64, h: f64) -> f64 {
        let z = Point::ORIGIN;
        let x = Point::new(0.8, 0.5);
        let phi = |p: Point| fundamental_solution(k, p, z).unwrap();
        let lap = (phi(x + Point::new(h, 0.0)) + phi(x - Point::new(h, 0.0)) + phi(x + Point::new(0.0, h))
            + phi(x - Point::new(0.0, h))
            - phi(x) * 4.0)
            / (h * h);
        (lap + phi(x) * (k * k)).norm()
    }

    #[test]
    fn fundamental_solution_discrete_helmholtz_is_second_order() {
        let r1 = helmholtz_residual(3.0, 0.02);
        let r2 = helmholtz_residual(3.0, 0.01);
        let ratio = r1 / r2;
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn hankel_recurrence_on_range() {
        for &x in &[0.5, 1.0, 3.3, 10.0, 27.0, 64.0, 100.0] {
            let h = hankel1_seq(61, x).unwrap();
            for m in 1..=60 {
                let lhs = h[m - 1] + h[m + 1];
                let rhs = h[m] * (2.0 * m as f64 / x);
                assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(lhs.norm()), "x={x} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn j_bounded_by_one(m in 0usize..100, x in -300.0f64..300.0) {
            prop_assert!(bessel_j(m, x).abs() <= 1.0 + 1e-12);
        }

        #[test]
        fn sequence_agrees_with_pointwise(m in 0usize..60, x in 0.0f64..200.0) {
            let s = bessel_j_seq(m + 5, x);
            let v = bessel_j(m, x);
            prop_assert!((s[m] - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }

        #[test]
        fn normalization_identity(x in 0.1f64..500.0) {
            let j = bessel_j_seq(2 * (x as usize) + 60, x);
            let s = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
