//! Fourth-order reformulation: with `w = u - v ∈ H₀²(Ω)` and `λ = k²`,
//! `λ²(1+V) w + λ(2+V) Δw + Δ²w = 0`, discretized by five-point differences
//! with clamped conditions imposed through ghost reflection.

use std::collections::VecDeque;

use faer::linalg::solvers::Eigen;
use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{ComplexField2D, Medium};
use crate::geometry::GridSpec;
use crate::linalg::{dot, norm2, CsrMatrix, SparseLu, C64};
use crate::teig::pair::{with_residuals, TransmissionEigenpair};

/// Minimum number of unknown columns and rows.
pub const MIN_NODES_PER_DIRECTION: usize = 10;
/// `|V|` below this makes the algebraic recovery of `u` ill-defined.
pub const RECOVERY_MIN_CONTRAST: f64 = 1e-8;

/// Discrete pencil on the unknown nodes `U = {x : dist(x, ∂Ω) > h/2 inside}`.
///
/// Nodes adjacent to `U` but outside it form the boundary layer `B` where
/// `w = 0`; the clamped Laplacian there is `(2/h²) Σ_{U-neighbours} w`,
/// which is what a ghost value `w_ghost = w_mirror` produces.
#[derive(Clone, Debug)]
pub struct QepDiscretization {
    pub spec: GridSpec,
    pub medium: Medium,
    /// Grid index of each unknown.
    pub unknowns: Vec<usize>,
    /// Grid index of each boundary-layer node.
    pub boundary: Vec<usize>,
    /// Grid index → unknown number.
    pub index: Vec<Option<usize>>,
    /// `V` at the unknowns and at the boundary layer.
    pub v: Vec<f64>,
    pub v_boundary: Vec<f64>,
    /// Dirichlet five-point Laplacian on `U` (`w = 0` off `U`).
    pub lap: CsrMatrix,
    /// Clamped Laplacian evaluated on `B` (rows) from values on `U`.
    pub lap_boundary: CsrMatrix,
    /// `Δ_h²` with clamped conditions.
    pub bilap: CsrMatrix,
}

const NEIGHBOURS: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

pub fn qep_assemble(med: &Medium, spec: &GridSpec) -> Result<QepDiscretization> {
    med.validate()?;
    spec.check_covers(&med.domain)?;
    let h = spec.h;
    let ih2 = 1.0 / (h * h);
    let mut index = vec![None; spec.len()];
    let mut unknowns = Vec::new();
    for idx in 0..spec.len() {
        if med.domain.signed_distance(spec.point(idx)) < -0.5 * h {
            index[idx] = Some(unknowns.len());
            unknowns.push(idx);
        }
    }
    let cols: std::collections::BTreeSet<usize> = unknowns.iter().map(|&i| spec.coords(i).0).collect();
    let rows: std::collections::BTreeSet<usize> = unknowns.iter().map(|&i| spec.coords(i).1).collect();
    if cols.len() < MIN_NODES_PER_DIRECTION || rows.len() < MIN_NODES_PER_DIRECTION {
        return Err(Error::Resolution(format!(
            "clamped mask spans {}x{} nodes; at least {MIN_NODES_PER_DIRECTION} per direction needed",
            cols.len(),
            rows.len()
        )));
    }
    check_connected(spec, &index, &unknowns)?;

    let mut bindex = vec![None; spec.len()];
    let mut boundary = Vec::new();
    for &idx in &unknowns {
        for (di, dj) in NEIGHBOURS {
            let nb = spec.offset(idx, di, dj).expect("coverage margin keeps neighbours on the grid");
            if index[nb].is_none() && bindex[nb].is_none() {
                bindex[nb] = Some(boundary.len());
                boundary.push(nb);
            }
        }
    }
    let n = unknowns.len();
    let lap_rows: Vec<Vec<(usize, f64)>> = unknowns
        .iter()
        .map(|&idx| {
            let mut row = vec![(index[idx].unwrap(), -4.0 * ih2)];
            for (di, dj) in NEIGHBOURS {
                if let Some(c) = spec.offset(idx, di, dj).and_then(|nb| index[nb]) {
                    row.push((c, ih2));
                }
            }
            row
        })
        .collect();
    let lap = CsrMatrix::from_rows(n, lap_rows);
    let bd_rows: Vec<Vec<(usize, f64)>> = boundary
        .iter()
        .map(|&idx| {
            NEIGHBOURS
                .iter()
                .filter_map(|&(di, dj)| spec.offset(idx, di, dj).and_then(|nb| index[nb]))
                .map(|c| (c, 2.0 * ih2))
                .collect()
        })
        .collect();
    let lap_boundary = CsrMatrix::from_rows(n, bd_rows);
    // Δ_h applied to the clamped extension (values on U ∪ B)
    let bilap_rows: Vec<Vec<(usize, f64)>> = unknowns
        .iter()
        .map(|&idx| {
            let mut row: Vec<(usize, f64)> = lap.row(index[idx].unwrap()).map(|(c, a)| (c, -4.0 * ih2 * a)).collect();
            for (di, dj) in NEIGHBOURS {
                let nb = spec.offset(idx, di, dj).unwrap();
                if let Some(r) = index[nb] {
                    row.extend(lap.row(r).map(|(c, a)| (c, ih2 * a)));
                } else if let Some(r) = bindex[nb] {
                    row.extend(lap_boundary.row(r).map(|(c, a)| (c, ih2 * a)));
                }
            }
            row
        })
        .collect();
    let bilap = CsrMatrix::from_rows(n, bilap_rows);
    let v = unknowns.iter().map(|&i| med.value_at(spec.point(i))).collect();
    let v_boundary = boundary.iter().map(|&i| med.value_at(spec.point(i))).collect();
    Ok(QepDiscretization {
        spec: *spec,
        medium: med.clone(),
        unknowns,
        boundary,
        index,
        v,
        v_boundary,
        lap,
        lap_boundary,
        bilap,
    })
}

fn check_connected(spec: &GridSpec, index: &[Option<usize>], unknowns: &[usize]) -> Result<()> {
    let mut seen = vec![false; unknowns.len()];
    let mut queue = VecDeque::from([unknowns[0]]);
    seen[0] = true;
    let mut count = 1;
    while let Some(idx) = queue.pop_front() {
        for (di, dj) in NEIGHBOURS {
            if let Some(c) = spec.offset(idx, di, dj).and_then(|nb| index[nb]) {
                if !seen[c] {
                    seen[c] = true;
                    count += 1;
                    queue.push_back(unknowns[c]);
                }
            }
        }
    }
    if count != unknowns.len() {
        return Err(Error::Domain(format!(
            "clamped mask splits into several components ({count} of {} nodes reachable)",
            unknowns.len()
        )));
    }
    Ok(())
}

impl QepDiscretization {
    pub fn dim(&self) -> usize {
        self.unknowns.len()
    }

    /// `M₀ w = Δ_h² w`.
    pub fn m0(&self, w: &[C64]) -> Vec<C64> {
        self.bilap.mul_vec(w)
    }

    /// `M₁ w = (2+V) Δ_h w`.
    pub fn m1(&self, w: &[C64]) -> Vec<C64> {
        self.lap.mul_vec(w).into_iter().zip(&self.v).map(|(x, v)| x * (2.0 + v)).collect()
    }

    /// `M₂ w = (1+V) w`.
    pub fn m2(&self, w: &[C64]) -> Vec<C64> {
        w.iter().zip(&self.v).map(|(x, v)| x * (1.0 + v)).collect()
    }

    /// `(λ² M₂ + λ M₁ + M₀) w`.
    pub fn pencil(&self, lambda: C64, w: &[C64]) -> Vec<C64> {
        let (a, b, c) = (self.m2(w), self.m1(w), self.m0(w));
        (0..w.len()).map(|i| a[i] * lambda * lambda + b[i] * lambda + c[i]).collect()
    }

    /// Clamped Laplacian of `w`: values on `U` followed by values on `B`.
    pub fn clamped_laplacian(&self, w: &[C64]) -> (Vec<C64>, Vec<C64>) {
        (self.lap.mul_vec(w), self.lap_boundary.mul_vec(w))
    }

    /// `Δ_h` of the clamped extension, computed node by node; equals
    /// `M₀ w` by construction.
    pub fn bilaplacian_by_composition(&self, w: &[C64]) -> Vec<C64> {
        let (lu, lb) = self.clamped_laplacian(w);
        let mut ext = vec![C64::new(0.0, 0.0); self.spec.len()];
        for (k, &idx) in self.unknowns.iter().enumerate() {
            ext[idx] = lu[k];
        }
        for (k, &idx) in self.boundary.iter().enumerate() {
            ext[idx] = lb[k];
        }
        let ih2 = 1.0 / (self.spec.h * self.spec.h);
        self.unknowns
            .iter()
            .map(|&idx| {
                let s: C64 = NEIGHBOURS.iter().map(|&(di, dj)| ext[self.spec.offset(idx, di, dj).unwrap()]).sum();
                (s - ext[idx] * 4.0) * ih2
            })
            .collect()
    }

    /// Operator norms used to scale pencil residuals.
    pub fn norms(&self) -> (f64, f64, f64) {
        let m2 = self.v.iter().map(|v| (1.0 + v).abs()).fold(0.0, f64::max);
        let vmax = self.v.iter().map(|v| (2.0 + v).abs()).fold(0.0, f64::max);
        (self.bilap.norm_inf(), vmax * self.lap.norm_inf(), m2)
    }

    /// `||Q(λ) w|| / ||w||`.
    pub fn pencil_residual(&self, lambda: C64, w: &[C64]) -> f64 {
        norm2(&self.pencil(lambda, w)) / norm2(w)
    }

    fn shifted(&self, sigma: f64) -> Result<SparseLu> {
        let mut t: Vec<(usize, usize, f64)> = self.bilap.triplets().collect();
        t.extend(self.lap.triplets().map(|(i, j, a)| (i, j, sigma * (2.0 + self.v[i]) * a)));
        t.extend(self.v.iter().enumerate().map(|(i, v)| (i, i, sigma * sigma * (1.0 + v))));
        SparseLu::from_triplets(self.dim(), &t)
    }

    /// Real companion matrix `[[0, I], [-M₂⁻¹M₀, -M₂⁻¹M₁]]`.
    pub fn companion(&self) -> Mat<f64> {
        let n = self.dim();
        let mut a = Mat::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            a[(i, n + i)] = 1.0;
            let s = 1.0 / (1.0 + self.v[i]);
            for (j, x) in self.bilap.row(i) {
                a[(n + i, j)] = -s * x;
            }
            for (j, x) in self.lap.row(i) {
                a[(n + i, n + j)] = -s * (2.0 + self.v[i]) * x;
            }
        }
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QepOptions {
    /// Largest linearized dimension `2n` handled by the dense eigensolver.
    pub dense_limit: usize,
    /// Shifts spread evenly over the window.
    pub shifts: usize,
    /// Krylov vectors per shift.
    pub krylov_dim: usize,
    /// Block size; must exceed the largest multiplicity of interest.
    pub block: usize,
    /// Ritz pairs are accepted below this scaled pencil residual.
    pub tol: f64,
    pub seed: u64,
}

impl Default for QepOptions {
    fn default() -> Self {
        QepOptions { dense_limit: 1600, shifts: 4, krylov_dim: 96, block: 4, tol: 1e-9, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QepMode {
    pub lambda: C64,
    /// Unit-norm eigenvector on the unknowns.
    pub w: Vec<C64>,
    /// `||Q(λ)w|| / ||w||`.
    pub residual: f64,
}

impl QepMode {
    pub fn is_real(&self) -> bool {
        self.lambda.im.abs() <= 1e-6 * self.lambda.norm().max(1.0)
    }
}

/// Eigenpairs with `Re λ` in `window`, sorted by real part, at most
/// `max_modes` of them.
pub fn qep_solve(disc: &QepDiscretization, window: (f64, f64), max_modes: usize, opts: &QepOptions) -> Result<Vec<QepMode>> {
    let (a, b) = window;
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::Parameter(format!("eigenvalue window must satisfy 0 < a < b, got [{a}, {b}]")));
    }
    let (n0, n1, n2) = disc.norms();
    let scale = |l: C64| l.norm_sqr() * n2 + l.norm() * n1 + n0;
    let accept = |m: &QepMode| m.residual <= opts.tol * scale(m.lambda) && m.residual <= 1e-6 * n0;
    let mut modes = if 2 * disc.dim() <= opts.dense_limit {
        dense_modes(disc)?
    } else {
        let width = (b - a) / opts.shifts.max(1) as f64;
        let sigmas: Vec<f64> = (0..opts.shifts.max(1)).map(|i| a + (i as f64 + 0.5) * width).collect();
        let runs: Vec<Result<Vec<QepMode>>> = sigmas
            .par_iter()
            .enumerate()
            .map(|(i, &sigma)| {
                let mut dim = opts.krylov_dim;
                loop {
                    let ritz = shift_invert(disc, sigma, dim, opts.block, opts.seed.wrapping_add(i as u64))?;
                    // Ritz values inside this shift's slice must converge
                    let stuck: Vec<f64> = ritz
                        .iter()
                        .filter(|m| (m.lambda.re - sigma).abs() <= 0.5 * width && !accept(m))
                        .map(|m| m.lambda.re)
                        .collect();
                    if stuck.is_empty() {
                        return Ok(ritz);
                    }
                    if dim >= 4 * opts.krylov_dim || dim >= 2 * disc.dim() {
                        return Err(Error::Convergence(format!(
                            "shift {sigma:.4}: {} Ritz values near {:?} did not converge with {dim} Krylov vectors",
                            stuck.len(),
                            stuck
                        )));
                    }
                    dim *= 2;
                }
            })
            .collect();
        let mut all = Vec::new();
        for r in runs {
            all.extend(r?);
        }
        all
    };
    modes.retain(|m| m.lambda.re >= a && m.lambda.re <= b && accept(m));
    modes.sort_by(|x, y| x.lambda.re.partial_cmp(&y.lambda.re).unwrap().then(x.lambda.im.partial_cmp(&y.lambda.im).unwrap()));
    let modes = deduplicate(modes);
    Ok(modes.into_iter().take(max_modes).collect())
}

/// Scales `w` to unit norm with its largest entry real and positive.
fn normalize(w: &mut [C64]) {
    let big = w.iter().copied().max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap()).unwrap_or_default();
    let nrm = norm2(w);
    if nrm == 0.0 || big.norm() == 0.0 {
        return;
    }
    let s = big.conj() / (big.norm() * nrm);
    for x in w.iter_mut() {
        *x *= s;
    }
}

fn dense_modes(disc: &QepDiscretization) -> Result<Vec<QepMode>> {
    let n = disc.dim();
    let evd = Eigen::new_from_real(disc.companion().as_ref())
        .map_err(|e| Error::Convergence(format!("dense eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    Ok((0..2 * n)
        .map(|j| {
            let lambda = C64::new(s[j].re, s[j].im);
            let mut w: Vec<C64> = (0..n).map(|i| C64::new(u[(i, j)].re, u[(i, j)].im)).collect();
            normalize(&mut w);
            let residual = disc.pencil_residual(lambda, &w);
            QepMode { lambda, w, residual }
        })
        .collect())
}

/// Block Krylov on `(A - σ)⁻¹` of the companion form, Rayleigh–Ritz on the
/// whole basis.
fn shift_invert(disc: &QepDiscretization, sigma: f64, dim: usize, block: usize, seed: u64) -> Result<Vec<QepMode>> {
    let n = disc.dim();
    let lu = disc.shifted(sigma)?;
    let op = |x: &[C64]| -> Vec<C64> {
        let (a, b) = x.split_at(n);
        let m2b = disc.m2(b);
        let m1a = disc.m1(a);
        let m2a = disc.m2(a);
        let rhs: Vec<C64> = (0..n).map(|i| -(m2b[i] + m1a[i] + m2a[i] * sigma)).collect();
        let top = lu.solve_complex(&rhs);
        let mut out = top.clone();
        out.extend((0..n).map(|i| a[i] + top[i] * sigma));
        out
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut pending: VecDeque<Vec<C64>> = (0..block)
        .map(|_| (0..2 * n).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect())
        .collect();
    while basis.len() < dim.min(2 * n) {
        let Some(mut x) = pending.pop_front() else { break };
        let before = norm2(&x);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &x);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= c * qi;
                }
            }
        }
        let nrm = norm2(&x);
        if nrm <= 1e-10 * before {
            continue; // deflated direction
        }
        for xi in x.iter_mut() {
            *xi /= nrm;
        }
        let y = op(&x);
        pending.push_back(y.clone());
        basis.push(x);
        images.push(y);
    }
    let d = basis.len();
    let h = Mat::<C64>::from_fn(d, d, |i, j| dot(&basis[i], &images[j]));
    let evd = Eigen::new(h.as_ref()).map_err(|e| Error::Convergence(format!("Ritz eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let y = evd.U();
    let modes = (0..d)
        .filter(|&j| s[j].norm() > 0.0)
        .map(|j| {
            let theta = s[j];
            let lambda = C64::new(sigma, 0.0) + C64::new(1.0, 0.0) / theta;
            let mut w = vec![C64::new(0.0, 0.0); n];
            for (c, q) in basis.iter().enumerate() {
                let yc = y[(c, j)];
                for i in 0..n {
                    w[i] += q[i] * yc;
                }
            }
            normalize(&mut w);
            let residual = disc.pencil_residual(lambda, &w);
            QepMode { lambda, w, residual }
        })
        .collect();
    Ok(modes)
}

/// Merges copies of the same eigenpair found from different shifts, keeping
/// linearly independent vectors of (numerically) repeated eigenvalues.
fn deduplicate(sorted: Vec<QepMode>) -> Vec<QepMode> {
    let mut out: Vec<QepMode> = Vec::new();
    for m in sorted {
        let close: Vec<&QepMode> =
            out.iter().filter(|o| (o.lambda - m.lambda).norm() <= 1e-5 * m.lambda.norm().max(1.0)).collect();
        if close.is_empty() {
            out.push(m);
            continue;
        }
        // Gram–Schmidt against the vectors already kept for this eigenvalue
        let mut r = m.w.clone();
        let mut q: Vec<Vec<C64>> = Vec::new();
        for o in &close {
            let mut v = o.w.clone();
            for p in &q {
                let c = dot(p, &v);
                v.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
            }
            let nv = norm2(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|a| *a /= nv);
                q.push(v);
            }
        }
        for p in &q {
            let c = dot(p, &r);
            r.iter_mut().zip(p).for_each(|(a, b)| *a -= c * b);
        }
        if norm2(&r) > 0.1 {
            out.push(m);
        }
    }
    out
}

/// `u = -(Δ_h w + λ w)/(λ V)`, `v = u - w`, normalized with `||v||_{L²(Ω)} = 1`
/// and `v` real-positive at the first inside node where it is not negligible.
pub fn recover_pair(w: &[C64], lambda: f64, disc: &QepDiscretization) -> Result<TransmissionEigenpair> {
    if w.len() != disc.dim() {
        return Err(Error::Shape(format!("w has {} entries for {} unknowns", w.len(), disc.dim())));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("λ must be > 0, got {lambda}")));
    }
    let spec = disc.spec;
    let domain = &disc.medium.domain;
    let mask: Vec<bool> = spec.points().map(|p| domain.contains(p)).collect();
    for (idx, &inside) in mask.iter().enumerate() {
        if inside && disc.medium.value_at(spec.point(idx)).abs() < RECOVERY_MIN_CONTRAST {
            let p = spec.point(idx);
            return Err(Error::Recovery(format!("V vanishes at ({:.4}, {:.4}) inside the domain", p.x, p.y)));
        }
    }
    let (lu, lb) = disc.clamped_laplacian(w);
    let zero = C64::new(0.0, 0.0);
    let mut u = vec![zero; spec.len()];
    let mut wf = vec![zero; spec.len()];
    for (k, &idx) in disc.unknowns.iter().enumerate() {
        u[idx] = -(lu[k] + w[k] * lambda) / (lambda * disc.v[k]);
        wf[idx] = w[k];
    }
    for (k, &idx) in disc.boundary.iter().enumerate() {
        let vb = disc.v_boundary[k];
        if vb.abs() >= RECOVERY_MIN_CONTRAST {
            u[idx] = -lb[k] / (lambda * vb);
        }
    }
    let mut v: Vec<C64> = u.iter().zip(&wf).map(|(a, b)| a - b).collect();
    let nrm = (v.iter().zip(&mask).filter(|(_, &m)| m).map(|(x, _)| x.norm_sqr()).sum::<f64>() * spec.cell_area()).sqrt();
    if nrm == 0.0 {
        return Err(Error::Recovery("recovered v vanishes on the domain".into()));
    }
    let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let anchor = (0..spec.len()).find(|&i| mask[i] && v[i].norm() >= 1e-6 * vmax).unwrap();
    let phase = v[anchor].conj() / v[anchor].norm();
    let s = phase / nrm;
    for x in v.iter_mut().chain(u.iter_mut()) {
        *x *= s;
    }
    let uf = ComplexField2D::new(spec, u, mask.clone())?;
    let vf = ComplexField2D::new(spec, v, mask)?;
    let pair = TransmissionEigenpair::new(lambda.sqrt(), uf, vf, None)?;
    with_residuals(pair, &disc.medium)
}

/// Real-valued modes in the window recovered as eigenpairs.
pub fn qep_pairs(disc: &QepDiscretization, window: (f64, f64), max_modes: usize, opts: &QepOptions) -> Result<Vec<TransmissionEigenpair>> {
    qep_solve(disc, window, usize::MAX, opts)?
        .into_iter()
        .filter(QepMode::is_real)
        .take(max_modes)
        .map(|m| recover_pair(&m.w, m.lambda.re, disc))
        .collect()
}
