//! Thin wrappers over faer factorizations plus restarted GMRES.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm2_real(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense LU with partial pivoting of a complex square matrix.
pub struct DenseLu {
    lu: PartialPivLu<C64>,
    n: usize,
    /// Ratio max|U_ii| / min|U_ii|, a cheap lower bound on the condition number.
    pub pivot_growth: f64,
}

/// Factorizations whose pivot ratio exceeds this are reported as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e14;

impl DenseLu {
    pub fn new(a: MatRef<'_, C64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape(format!("LU needs a square matrix, got {}x{}", n, a.ncols())));
        }
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = u[(i, i)].norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let pivot_growth = if n == 0 { 1.0 } else { hi / lo };
        if !pivot_growth.is_finite() || pivot_growth > SINGULAR_PIVOT_RATIO {
            return Err(Error::Singular { condition: pivot_growth });
        }
        Ok(DenseLu { lu, n, pivot_growth })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(&mut x);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Solves for every column of `b` in place.
    pub fn solve_mat(&self, b: &mut Mat<C64>) {
        self.lu.solve_in_place(b);
    }
}

/// Sparse real LU used for shift-invert operators.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl SparseLu {
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let triplets: Vec<Triplet<usize, usize, f64>> =
            entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Shape(format!("sparse assembly: {e:?}")))?;
        let lu = mat.sp_lu().map_err(|_| Error::Singular { condition: f64::INFINITY })?;
        Ok(SparseLu { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` for a complex right-hand side (real and imaginary
    /// parts as two columns).
    pub fn solve_complex(&self, b: &[C64]) -> Vec<C64> {
        let mut x = Mat::from_fn(self.n, 2, |i, j| if j == 0 { b[i].re } else { b[i].im });
        self.lu.solve_in_place(&mut x);
        (0..self.n).map(|i| C64::new(x[(i, 0)], x[(i, 1)])).collect()
    }
}

/// Real sparse matrix in compressed-row form.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rowptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row entry lists; duplicate columns are summed and
    /// explicit zeros dropped.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut rowptr = vec![0];
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            rowptr.push(cols.len());
        }
        CsrMatrix { nrows: rowptr.len() - 1, ncols, rowptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.rowptr[i]..self.rowptr[i + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.nrows).map(|i| self.row(i).map(|(j, a)| x[j] * a).sum()).collect()
    }

    pub fn mul_vec_real(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).map(|(j, a)| x[j] * a).sum()).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).map(|(_, a)| a.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, a)| (i, j, a)))
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets().map(|(i, j, a)| (a - self.get(j, i)).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct GmresReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Restarted GMRES for `A x = b` with `A` given as a matrix-vector product.
pub fn gmres<F>(apply: F, b: &[C64], tol: f64, max_iter: usize, restart: usize) -> Result<(Vec<C64>, GmresReport)>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return Ok((x, GmresReport { iterations: 0, relative_residual: 0.0 }));
    }
    let mut total = 0;
    let mut r = b.to_vec();
    let mut ax = vec![C64::new(0.0, 0.0); n];
    loop {
        let beta = norm2(&r);
        let rel = beta / bnorm;
        if rel <= tol {
            return Ok((x, GmresReport { iterations: total, relative_residual: rel }));
        }
        if total >= max_iter {
            return Err(Error::Convergence(format!(
                "GMRES stopped after {total} iterations at relative residual {rel:.3e} (target {tol:.1e})"
            )));
        }
        let m = restart.min(max_iter - total).max(1);
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
        let mut cs = vec![C64::new(0.0, 0.0); m];
        let mut sn = vec![C64::new(0.0, 0.0); m];
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut steps = 0;
        for j in 0..m {
            let mut w = vec![C64::new(0.0, 0.0); n];
            apply(&basis[j], &mut w);
            // modified Gram-Schmidt, applied twice for stability
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(q, &w);
                    hess[i][j] += c;
                    for (wk, qk) in w.iter_mut().zip(q) {
                        *wk -= c * qk;
                    }
                }
            }
            let hn = norm2(&w);
            hess[j + 1][j] = C64::new(hn, 0.0);
            for i in 0..j {
                let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                hess[i + 1][j] = -sn[i].conj() * hess[i][j] + cs[i].conj() * hess[i + 1][j];
                hess[i][j] = t;
            }
            let (a, bb) = (hess[j][j], hess[j + 1][j]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if den == 0.0 {
                cs[j] = C64::new(1.0, 0.0);
                sn[j] = C64::new(0.0, 0.0);
            } else {
                cs[j] = a.conj() / den;
                sn[j] = bb.conj() / den;
            }
            hess[j][j] = cs[j] * a + sn[j] * bb;
            hess[j + 1][j] = C64::new(0.0, 0.0);
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            steps = j + 1;
            total += 1;
            if g[j + 1].norm() / bnorm <= tol || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hn).collect());
        }
        let mut y = vec![C64::new(0.0, 0.0); steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in (i + 1)..steps {
                s -= hess[i][k] * y[k];
            }
            y[i] = s / hess[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, qi) in x.iter_mut().zip(&basis[k]) {
                *xi += yk * qi;
            }
        }
        apply(&x, &mut ax);
        for i in 0..n {
            r[i] = b[i] - ax[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(n: usize, seed: u64) -> (Mat<C64>, Vec<C64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::from_fn(n, n, |i, j| {
            let d = if i == j { 4.0 } else { 0.0 };
            C64::new(d + rng.random_range(-0.5..0.5) / n as f64 * 4.0, rng.random_range(-0.5..0.5) / n as f64 * 4.0)
        });
        let b = (0..n).map(|_| C64::new(rng.random(), rng.random())).collect();
        (a, b)
    }

    fn matvec(a: &Mat<C64>, x: &[C64], y: &mut [C64]) {
        for i in 0..a.nrows() {
            y[i] = (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum();
        }
    }

    #[test]
    fn dense_lu_solves() {
        let (a, b) = random_system(40, 1);
        let lu = DenseLu::new(a.as_ref()).unwrap();
        let x = lu.solve_vec(&b);
        let mut ax = vec![C64::new(0.0, 0.0); 40];
        matvec(&a, &x, &mut ax);
        let err: Vec<C64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&err) < 1e-12 * norm2(&b));
    }

    #[test]
    fn singular_matrix_reported() {
        let a = Mat::from_fn(3, 3, |i, _| C64::new(i as f64, 0.0));
        assert!(matches!(DenseLu::new(a.as_ref()), Err(Error::Singular { .. })));
    }

    #[test]
    fn gmres_matches_lu() {
        let (a, b) = random_system(60, 7);
        let (x, rep) = gmres(|v, out| matvec(&a, v, out), &b, 1e-12, 500, 30).unwrap();
        assert!(rep.relative_residual <= 1e-12);
        let xd = DenseLu::new(a.as_ref()).unwrap().solve_vec(&b);
        let d: Vec<C64> = x.iter().zip(&xd).map(|(p, q)| p - q).collect();
        assert!(norm2(&d) < 1e-10 * norm2(&xd));
    }

    #[test]
    fn sparse_lu_solves_tridiagonal() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.5));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let lu = SparseLu::from_triplets(n, &t).unwrap();
        let b: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0)).collect();
        let x = lu.solve_complex(&b);
        for i in 0..n {
            let mut s = 2.5 * x[i];
            if i > 0 {
                s -= x[i - 1];
            }
            if i + 1 < n {
                s -= x[i + 1];
            }
            assert!((s - b[i]).norm() < 1e-12);
        }
    }
}
