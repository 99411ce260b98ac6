//! Linear Sampling Method: Tikhonov solves of the far-field equation,
//! indicator maps, threshold classification and transmission-eigenvalue
//! detection from far-field data.

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{gamma2, Medium, SolverOptions};
use crate::geometry::{GridSpec, Point};
use crate::herglotz::{assemble_far_field_matrix, DirectionQuadrature, FarFieldMatrix, HerglotzDensity};
use crate::linalg::DenseLu;
use crate::specialfn::check_wavenumber;

/// Default ratio `ε / σ₁²`.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-3;
/// Default peak prominence threshold in units of the median curve level.
pub const DEFAULT_PROMINENCE_FACTOR: f64 = 3.0;

/// Rectangular lattice of sampling points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingMesh {
    pub spec: GridSpec,
}

impl SamplingMesh {
    /// `n x n` points covering `[lo, hi]²`.
    pub fn square(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Parameter("sampling mesh needs n >= 2 and hi > lo".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        Ok(SamplingMesh { spec: GridSpec::new(Point::new(lo, lo), h, n, n)? })
    }

    pub fn points(&self) -> Vec<Point> {
        self.spec.points().collect()
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }
}

/// Samples of `Φ_∞(x̂_i, z) = γ₂ e^{-ik x̂_i·z}`.
pub fn phi_infty_rhs(z: Point, k: f64, quad: &DirectionQuadrature) -> Result<Vec<Complex64>> {
    check_wavenumber(k)?;
    let g = gamma2(k);
    Ok((0..quad.len()).map(|i| g * Complex64::from_polar(1.0, -k * quad.direction(i).dot(z))).collect())
}

/// Largest singular value of the discrete operator `A = F w`.
pub fn operator_norm(f: &FarFieldMatrix) -> Result<f64> {
    let w = f.quadrature.weight();
    let a = Mat::from_fn(f.n(), f.n(), |i, j| f.get(i, j) * w);
    let s = a.singular_values().map_err(|e| Error::Convergence(format!("SVD failed: {e:?}")))?;
    Ok(s.iter().cloned().fold(0.0, f64::max))
}

/// Default regularization `10⁻³ σ₁(A)²`.
pub fn default_epsilon(f: &FarFieldMatrix) -> Result<f64> {
    Ok(DEFAULT_EPS_FACTOR * operator_norm(f)?.powi(2))
}

/// Factorized Tikhonov normal operator `εI + A*A`, `A = F w`.
pub struct Tikhonov {
    quad: DirectionQuadrature,
    a: Mat<Complex64>,
    lu: DenseLu,
    pub eps: f64,
}

impl Tikhonov {
    pub fn new(f: &FarFieldMatrix, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Parameter(format!("regularization must be > 0, got {eps}")));
        }
        let n = f.n();
        let w = f.quadrature.weight();
        let a = Mat::from_fn(n, n, |i, j| f.get(i, j) * w);
        let normal = Mat::from_fn(n, n, |i, j| {
            let mut s: Complex64 = (0..n).map(|l| a[(l, i)].conj() * a[(l, j)]).sum();
            if i == j {
                s += eps;
            }
            s
        });
        // εI + A*A is Hermitian positive definite; the LU pivot test only
        // trips when ε underflows relative to ||A||²
        let lu = DenseLu::new(normal.as_ref())?;
        Ok(Tikhonov { quad: f.quadrature, a, lu, eps })
    }

    fn adjoint_apply(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.quad.len();
        (0..n).map(|j| (0..n).map(|i| self.a[(i, j)].conj() * rhs[i]).sum()).collect()
    }

    pub fn apply(&self, g: &[Complex64]) -> Vec<Complex64> {
        let n = self.quad.len();
        (0..n).map(|i| (0..n).map(|j| self.a[(i, j)] * g[j]).sum()).collect()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<HerglotzDensity> {
        if rhs.len() != self.quad.len() {
            return Err(Error::Shape(format!(
                "right-hand side has {} entries for {} directions",
                rhs.len(),
                self.quad.len()
            )));
        }
        let b = self.adjoint_apply(rhs);
        let g = self.lu.solve_vec(&b);
        Ok(HerglotzDensity { quadrature: self.quad, g })
    }

    /// Relative residual of `(εI + A*A) g = A* rhs`.
    pub fn normal_residual(&self, g: &[Complex64], rhs: &[Complex64]) -> f64 {
        let ag = self.apply(g);
        let lhs = self.adjoint_apply(&ag);
        let b = self.adjoint_apply(rhs);
        let num: f64 = lhs.iter().zip(g).zip(&b).map(|((l, gi), bi)| (l + gi * self.eps - bi).norm_sqr()).sum();
        let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    /// `||A g - rhs||`.
    pub fn misfit(&self, g: &[Complex64], rhs: &[Complex64]) -> f64 {
        self.apply(g).iter().zip(rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||A g - rhs||² + ε ||g||²`.
    pub fn objective(&self, g: &[Complex64], rhs: &[Complex64]) -> f64 {
        self.misfit(g, rhs).powi(2) + self.eps * g.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// `g = (εI + A*A)⁻¹ A* rhs` with `A = F w` the discrete far-field operator.
pub fn tikhonov_solve(f: &FarFieldMatrix, rhs: &[Complex64], eps: f64) -> Result<HerglotzDensity> {
    Tikhonov::new(f, eps)?.solve(rhs)
}

/// Threshold selection for [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Value(f64),
    Auto,
}

#[derive(Clone, Debug, Serialize)]
pub struct LsmResult {
    pub k: f64,
    pub eps: f64,
    pub mesh: SamplingMesh,
    pub indicator: Vec<f64>,
    pub cutoff: Option<f64>,
    pub mask: Option<Vec<bool>>,
}

/// `I(z) = ||g_z^ε||` at every mesh point; `eps = None` uses the default.
pub fn indicator_map(f: &FarFieldMatrix, mesh: &SamplingMesh, eps: Option<f64>) -> Result<LsmResult> {
    let eps = match eps {
        Some(e) => e,
        None => default_epsilon(f)?,
    };
    let tik = Tikhonov::new(f, eps)?;
    let indicator = indicator_values(&tik, f, &mesh.points())?;
    Ok(LsmResult { k: f.k, eps, mesh: *mesh, indicator, cutoff: None, mask: None })
}

fn indicator_values(tik: &Tikhonov, f: &FarFieldMatrix, points: &[Point]) -> Result<Vec<f64>> {
    points
        .par_iter()
        .map(|&z| {
            let rhs = phi_infty_rhs(z, f.k, &f.quadrature)?;
            Ok(tik.solve(&rhs)?.norm())
        })
        .collect()
}

/// Threshold maximizing the between-class variance of `log I`.
pub fn otsu_log_threshold(values: &[f64]) -> Result<f64> {
    if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Cutoff("indicator values must be positive and finite".into()));
    }
    let mut logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = logs.len();
    if n < 2 || logs[n - 1] - logs[0] <= 1e-12 * logs[0].abs().max(1.0) {
        return Err(Error::Cutoff("indicator is constant; no two-class split exists".into()));
    }
    let total: f64 = logs.iter().sum();
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut left = 0.0;
    for i in 0..n - 1 {
        left += logs[i];
        if logs[i + 1] == logs[i] {
            continue;
        }
        let n0 = (i + 1) as f64;
        let n1 = (n - i - 1) as f64;
        let m0 = left / n0;
        let m1 = (total - left) / n1;
        let between = n0 * n1 * (m0 - m1).powi(2);
        if between > best.0 {
            best = (between, i);
        }
    }
    // the class boundary: everything <= logs[i] is "inside"
    Ok(logs[best.1].exp())
}

/// Classification `{z : I(z) <= c₀}`; returns the mask and the cutoff used.
pub fn classify(result: &mut LsmResult, cutoff: Cutoff) -> Result<(Vec<bool>, f64)> {
    let c0 = match cutoff {
        Cutoff::Value(c) => {
            if !c.is_finite() {
                return Err(Error::Parameter("cutoff must be finite".into()));
            }
            c
        }
        Cutoff::Auto => otsu_log_threshold(&result.indicator)?,
    };
    let mask: Vec<bool> = result.indicator.iter().map(|&v| v <= c0).collect();
    result.cutoff = Some(c0);
    result.mask = Some(mask.clone());
    Ok((mask, c0))
}

/// Jaccard overlap of two masks.
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Multiplies every entry by `1 + level (ξ + iη)/√2` with standard normal
/// `ξ, η`, deterministically from `seed`.
pub fn add_relative_noise(f: &FarFieldMatrix, level: f64, seed: u64) -> FarFieldMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = f.clone();
    let s = level / std::f64::consts::SQRT_2;
    for v in &mut out.entries {
        let xi: f64 = StandardNormal.sample(&mut rng);
        let eta: f64 = StandardNormal.sample(&mut rng);
        *v *= Complex64::new(1.0 + s * xi, s * eta);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeScanOptions {
    /// Fixed regularization; `None` uses `eps_factor · σ₁²` at every `k`.
    pub eps: Option<f64>,
    pub eps_factor: f64,
    pub prominence_factor: f64,
    pub directions: usize,
    pub noise_level: f64,
    pub seed: u64,
}

impl Default for TeScanOptions {
    fn default() -> Self {
        TeScanOptions {
            eps: None,
            eps_factor: DEFAULT_EPS_FACTOR,
            prominence_factor: DEFAULT_PROMINENCE_FACTOR, directions: 64, noise_level: 0.0, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Location refined by a 3-point quadratic fit.
    pub k: f64,
    /// Grid sample at the maximum.
    pub k_grid: f64,
    pub value: f64,
    pub prominence: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TeScanResult {
    pub ks: Vec<f64>,
    pub curve: Vec<f64>,
    pub median: f64,
    pub peaks: Vec<Peak>,
}

/// Topographic prominence of local maxima.
pub fn find_peaks(ks: &[f64], curve: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = curve.len();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(curve[i] > curve[i - 1] && curve[i] >= curve[i + 1]) {
            continue;
        }
        let mut left_min = curve[i];
        let mut j = i;
        while j > 0 {
            j -= 1;
            if curve[j] > curve[i] {
                break;
            }
            left_min = left_min.min(curve[j]);
        }
        let mut right_min = curve[i];
        let mut j = i;
        while j + 1 < n {
            j += 1;
            if curve[j] > curve[i] {
                break;
            }
            right_min = right_min.min(curve[j]);
        }
        let prominence = curve[i] - left_min.max(right_min);
        if prominence < min_prominence {
            continue;
        }
        let (y0, y1, y2) = (curve[i - 1], curve[i], curve[i + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        let step = ks[i + 1] - ks[i];
        let shift = if denom < 0.0 { (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5) } else { 0.0 };
        peaks.push(Peak { k: ks[i] + shift * step, k_grid: ks[i], value: curve[i], prominence });
    }
    peaks
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Scans `k` over `[k_min, k_max]` and reports peaks of the probe-averaged
/// LSM indicator.
pub fn te_scan(
    med: &Medium,
    k_range: (f64, f64),
    step: f64,
    probes: &[Point],
    spec: &GridSpec,
    solver: &SolverOptions,
    opts: &TeScanOptions,
) -> Result<TeScanResult> {
    if med.is_trivial() {
        return Err(Error::DegenerateMedium("zero contrast scatters nothing; every k is degenerate".into()));
    }
    let (k_min, k_max) = k_range;
    check_wavenumber(k_min)?;
    if !(k_max > k_min) {
        return Err(Error::Parameter("k range must satisfy k_max > k_min".into()));
    }
    if !(step > 0.0 && step <= 0.02 + 1e-12) {
        return Err(Error::Parameter(format!("scan step must lie in (0, 0.02], got {step}")));
    }
    if probes.is_empty() || probes.iter().any(|&p| med.domain.signed_distance(p) >= 0.0) {
        return Err(Error::Precondition("probes must be nonempty and strictly inside the domain".into()));
    }
    let quad = DirectionQuadrature::new(opts.directions)?;
    let count = ((k_max - k_min) / step + 1e-9).floor() as usize + 1;
    let ks: Vec<f64> = (0..count).map(|i| k_min + step * i as f64).collect();
    let mut curve = Vec::with_capacity(count);
    for (idx, &k) in ks.iter().enumerate() {
        let mut f = assemble_far_field_matrix(med, k, &quad, spec, solver)?;
        if opts.noise_level > 0.0 {
            f = add_relative_noise(&f, opts.noise_level, opts.seed.wrapping_add(idx as u64));
        }
        let eps = match opts.eps {
            Some(e) => e,
            None => opts.eps_factor * operator_norm(&f)?.powi(2),
        };
        let tik = Tikhonov::new(&f, eps)?;
        let vals = indicator_values(&tik, &f, probes)?;
        curve.push(vals.iter().sum::<f64>() / vals.len() as f64);
    }
    let med_level = median(&curve);
    let peaks = find_peaks(&ks, &curve, opts.prominence_factor * med_level);
    Ok(TeScanResult { ks, curve, median: med_level, peaks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::Medium;
    use crate::geometry::Domain;
    use crate::herglotz::apply_f;
    use rand::Rng;

    fn identity_matrix(n: usize, scale: f64) -> FarFieldMatrix {
        let q = DirectionQuadrature::new(n).unwrap();
        let mut e = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            e[i * n + i] = Complex64::new(scale / q.weight(), 0.0);
        }
        FarFieldMatrix::new(1.0, q, e).unwrap()
    }

    #[test]
    fn rhs_at_origin_and_modulus() {
        let q = DirectionQuadrature::new(32).unwrap();
        let r = phi_infty_rhs(Point::ORIGIN, 2.0, &q).unwrap();
        assert!(r.iter().all(|v| *v == gamma2(2.0)));
        let r = phi_infty_rhs(Point::new(0.4, -1.3), 2.0, &q).unwrap();
        assert!(r.iter().all(|v| (v.norm() - gamma2(2.0).norm()).abs() < 1e-15));
    }

    #[test]
    fn rhs_is_far_field_of_point_source() {
        let (k, z) = (2.0, Point::new(0.3, -0.2));
        let q = DirectionQuadrature::new(16).unwrap();
        let rhs = phi_infty_rhs(z, k, &q).unwrap();
        let r = 1e5 / k;
        for (i, v) in rhs.iter().enumerate() {
            let x = r * q.direction(i);
            let phi = crate::specialfn::fundamental_solution(k, x, z).unwrap();
            let est = phi * r.sqrt() * Complex64::from_polar(1.0, -k * r);
            assert!((est - v).norm() / v.norm() < 2e-2);
        }
    }

    #[test]
    fn identity_operator_scalar_solution() {
        // A = F w = I
        let f = identity_matrix(16, 1.0);
        let b: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let eps = 0.25;
        let g = tikhonov_solve(&f, &b, eps).unwrap();
        for (gi, bi) in g.g.iter().zip(&b) {
            assert!((gi - bi / (1.0 + eps)).norm() < 1e-14);
        }
    }

    fn disk_matrix(k: f64, n: usize) -> FarFieldMatrix {
        let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0).unwrap(), 1.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.1, 2).unwrap();
        let q = DirectionQuadrature::new(n).unwrap();
        assemble_far_field_matrix(&med, k, &q, &spec, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn penalty_dominance() {
        let f = disk_matrix(2.0, 16);
        let q = f.quadrature;
        let rhs = phi_infty_rhs(Point::new(0.2, 0.1), 2.0, &q).unwrap();
        let s1 = operator_norm(&f).unwrap();
        let eps = 1e6 * s1 * s1;
        let tik = Tikhonov::new(&f, eps).unwrap();
        let g = tik.solve(&rhs).unwrap();
        let gl2 = g.g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let at_rhs = tik.adjoint_apply(&rhs).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let rhs_norm = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(gl2 <= at_rhs / eps * (1.0 + 1e-3));
        assert!(gl2 <= 1e-5 * rhs_norm / s1);
        assert!(tik.normal_residual(&g.g, &rhs) <= 1e-10);
    }

    #[test]
    fn misfit_monotone_in_eps_and_minimizer() {
        let f = disk_matrix(2.0, 16);
        let rhs = phi_infty_rhs(Point::new(0.1, 0.3), 2.0, &f.quadrature).unwrap();
        let s1 = operator_norm(&f).unwrap();
        let mut prev = f64::INFINITY;
        for e in 0..10 {
            let eps = s1 * s1 * 10f64.powi(-e);
            let tik = Tikhonov::new(&f, eps).unwrap();
            let g = tik.solve(&rhs).unwrap();
            let m = tik.misfit(&g.g, &rhs);
            assert!(m <= prev * (1.0 + 1e-9), "eps={eps}: {m} > {prev}");
            prev = m;
            assert!(tik.normal_residual(&g.g, &rhs) <= 1e-10);
            let direct = apply_f(&f, &g).unwrap();
            let via = tik.apply(&g.g);
            for (a, b) in direct.iter().zip(&via) {
                assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }
        let tik = Tikhonov::new(&f, 1e-3 * s1 * s1).unwrap();
        let g = tik.solve(&rhs).unwrap();
        let base = tik.objective(&g.g, &rhs);
        let gn = g.g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d: Vec<Complex64> = (0..16).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let dn = d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let g2: Vec<Complex64> = g.g.iter().zip(&d).map(|(a, b)| a + b * (1e-3 * gn / dn)).collect();
            assert!(tik.objective(&g2, &rhs) >= base * (1.0 - 1e-12));
        }
    }

    #[test]
    fn shape_mismatch() {
        let f = identity_matrix(16, 1.0);
        assert!(matches!(tikhonov_solve(&f, &[Complex64::new(1.0, 0.0); 8], 1.0), Err(Error::Shape(_))));
    }

    #[test]
    fn otsu_separates_two_levels() {
        let mut r = LsmResult {
            k: 1.0,
            eps: 1.0,
            mesh: SamplingMesh::square(-1.0, 1.0, 4).unwrap(),
            indicator: (0..16).map(|i| if i % 3 == 0 { 1.0 } else { 100.0 }).collect(),
            cutoff: None,
            mask: None,
        };
        let (mask, c0) = classify(&mut r, Cutoff::Auto).unwrap();
        for (i, m) in mask.iter().enumerate() {
            assert_eq!(*m, i % 3 == 0);
        }
        assert!(c0 >= 1.0 && c0 < 100.0);
        r.indicator = vec![5.0; 16];
        assert!(matches!(classify(&mut r, Cutoff::Auto), Err(Error::Cutoff(_))));
    }

    #[test]
    fn indicator_is_linear_in_rhs_and_pointwise() {
        let f = disk_matrix(2.0, 16);
        let mesh = SamplingMesh::square(-1.5, 1.5, 5).unwrap();
        let res = indicator_map(&f, &mesh, None).unwrap();
        let tik = Tikhonov::new(&f, res.eps).unwrap();
        for (z, &val) in mesh.points().iter().zip(&res.indicator) {
            let rhs: Vec<Complex64> = phi_infty_rhs(*z, 2.0, &f.quadrature).unwrap().iter().map(|v| v * 2.0).collect();
            let g = tik.solve(&rhs).unwrap();
            assert!((g.norm() - 2.0 * val).abs() <= 1e-12 * val);
        }
        // relabeling: reversed point order yields reversed values
        let mut pts = mesh.points();
        pts.reverse();
        let rev = indicator_values(&tik, &f, &pts).unwrap();
        let mut expect = res.indicator.clone();
        expect.reverse();
        assert_eq!(rev, expect);
    }

    #[test]
    fn peaks_and_refinement() {
        let ks: Vec<f64> = (0..41).map(|i| 1.0 + 0.01 * i as f64).collect();
        let curve: Vec<f64> = ks.iter().map(|k| 1.0 + 20.0 * (-((k - 1.203) / 0.02).powi(2)).exp()).collect();
        let peaks = find_peaks(&ks, &curve, 3.0 * median(&curve));
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].k - 1.203).abs() < 0.003);
        let flat = vec![1.0; 41];
        assert!(find_peaks(&ks, &flat, 3.0).is_empty());
    }

    #[test]
    fn zero_contrast_scan_is_degenerate() {
        let med = Medium::constant(Domain::disk(Point::ORIGIN, 1.0).unwrap(), 0.0).unwrap();
        let spec = GridSpec::covering(&med.domain, 0.1, 2).unwrap();
        let r = te_scan(&med, (1.0, 1.1), 0.02, &[Point::ORIGIN], &spec, &SolverOptions::default(), &TeScanOptions::default());
        assert!(matches!(r, Err(Error::DegenerateMedium(_))));
    }
}
