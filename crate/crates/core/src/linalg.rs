//! Small dense linear algebra: symmetric tridiagonal eigenproblems (for the
//! Gauss rules), cyclic Jacobi for dense symmetric matrices, and a one-sided
//! Jacobi SVD for complex matrices.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;
const MAX_JACOBI_SWEEPS: usize = 80;

/// Eigen-decomposition of a symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    /// Eigenvalues, unsorted (in the order the QL iteration deflates them).
    pub values: Vec<f64>,
    /// For each requested row index `k`, the `k`-th component of every
    /// eigenvector: `rows[r][j]` is component `track[r]` of eigenvector `j`.
    pub rows: Vec<Vec<f64>>,
}

/// Implicit-shift QL on the tridiagonal matrix with diagonal `diag` and
/// sub/super-diagonal `off` (`off.len() == diag.len() - 1`).
///
/// `track` lists the eigenvector components to accumulate; Gauss rules need
/// only component 0, a full decomposition passes `0..n`.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64], track: &[usize]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::Dimension(format!(
            "tridiagonal: diag {} / off {}",
            diag.len(),
            off.len()
        )));
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut z: Vec<Vec<f64>> = track
        .iter()
        .map(|&k| {
            let mut row = vec![0.0; n];
            row[k] = 1.0;
            row
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    routine: "tridiagonal QL",
                    iterations: iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(TridiagonalEigen { values: d, rows: z })
}

/// Eigenvalues of a dense real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    for sweep in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= (f64::EPSILON * f64::EPSILON) * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            let mut vals: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
            vals.sort_by(f64::total_cmp);
            return Ok(vals);
        }
        let _ = sweep;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        routine: "Jacobi eigenvalues",
        iterations: MAX_JACOBI_SWEEPS,
    })
}

/// Eigenvalues of a complex Hermitian matrix (via the real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, whose spectrum doubles each value).
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    let n = h.rows;
    if h.cols != n {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            big[i][j] = v.re;
            big[i + n][j + n] = v.re;
            big[i][j + n] = -v.im;
            big[i + n][j] = v.im;
        }
    }
    let all = symmetric_eigenvalues(&big)?;
    Ok(all.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Thin SVD `A = U diag(sigma) V^H` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.sigma.len();
        let mut us = self.u.clone();
        for i in 0..us.rows {
            for j in 0..k {
                us[(i, j)] *= self.sigma[j];
            }
        }
        &us * &self.v.adjoint()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are rotated pairwise until mutually orthogonal to relative level
/// `tol`; singular values are the final column norms.
pub fn svd_one_sided_jacobi(a: &CMatrix, tol: f64) -> Result<Svd> {
    if a.rows < a.cols {
        let t = svd_one_sided_jacobi(&a.adjoint(), tol)?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let (m, n) = (a.rows, a.cols);
    let tol = tol.max(f64::EPSILON * m as f64);
    // column-major working copies
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut c = vec![Complex64::new(0.0, 0.0); n];
            c[j] = Complex64::new(1.0, 0.0);
            c
        })
        .collect();

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                rotate(&mut cols, p, q, c, s, ph);
                rotate(&mut v, p, q, c, s, ph);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "one-sided Jacobi SVD",
            iterations: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut u = CMatrix::zeros(m, n);
    let mut vm = CMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..m {
            u[(i, k)] = if s > 0.0 { cols[j][i] / s } else { Complex64::new(0.0, 0.0) };
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Ok(Svd { u, sigma, v: vm })
}

fn rotate(cols: &mut [Vec<Complex64>], p: usize, q: usize, c: f64, s: f64, ph: Complex64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yp = *y * ph;
        let nx = *x * c - yp * s;
        let ny = *x * s + yp * c;
        *x = nx;
        *y = ny;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_two_by_two() {
        // [[2, 1], [1, 2]] -> 1, 3
        let r = tridiagonal_eigen(&[2.0, 2.0], &[1.0], &[0]).unwrap();
        let mut v = r.values.clone();
        v.sort_by(f64::total_cmp);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 3.0).abs() < 1e-15);
        for j in 0..2 {
            assert!((r.rows[0][j].abs() - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn tridiagonal_full_vectors_are_orthonormal() {
        let n = 12;
        let diag: Vec<f64> = (0..n).map(|k| (k as f64).sin() * 3.0).collect();
        let off: Vec<f64> = (1..n).map(|k| 1.0 + k as f64 * 0.1).collect();
        let track: Vec<usize> = (0..n).collect();
        let r = tridiagonal_eigen(&diag, &off, &track).unwrap();
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n).map(|k| r.rows[k][a] * r.rows[k][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-13);
            }
            // T v = lambda v
            for i in 0..n {
                let mut tv = diag[i] * r.rows[i][a];
                if i > 0 {
                    tv += off[i - 1] * r.rows[i - 1][a];
                }
                if i + 1 < n {
                    tv += off[i] * r.rows[i + 1][a];
                }
                assert!((tv - r.values[a] * r.rows[i][a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_eigenvalues_known() {
        let a = vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let v = symmetric_eigenvalues(&a).unwrap();
        // characteristic roots: 3, 3 +- sqrt(3)
        let want = [3.0 - 3f64.sqrt(), 3.0, 3.0 + 3f64.sqrt()];
        for (x, w) in v.iter().zip(want) {
            assert!((x - w).abs() < 1e-13);
        }
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let s = svd_one_sided_jacobi(&CMatrix::identity(5), 1e-15).unwrap();
        assert!(s.sigma.iter().all(|&x| (x - 1.0).abs() < 1e-15));

        let d = CMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let s = svd_one_sided_jacobi(&d, 1e-15).unwrap();
        assert_eq!(s.sigma, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn svd_reconstructs_complex_matrix() {
        let a = CMatrix::from_fn(7, 5, |i, j| {
            Complex64::new(((i * 5 + j) as f64).sin(), ((i + 2 * j) as f64).cos() * 0.5)
        });
        let s = svd_one_sided_jacobi(&a, 1e-15).unwrap();
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        let err = s.reconstruct().max_abs_diff(&a);
        assert!(err <= 1e-13 * a.frobenius(), "{err}");
        let uhu = &s.u.adjoint() * &s.u;
        assert!(uhu.max_abs_diff(&CMatrix::identity(5)) < 1e-13);

        // wide input goes through the adjoint
        let w = a.adjoint();
        let sw = svd_one_sided_jacobi(&w, 1e-15).unwrap();
        for (x, y) in s.sigma.iter().zip(&sw.sigma) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!(sw.reconstruct().max_abs_diff(&w) < 1e-13 * a.frobenius());
    }

    #[test]
    fn hermitian_eigenvalues_match_real_case() {
        let h = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(2.0, 0.0),
            (1, 1) => Complex64::new(2.0, 0.0),
            (0, 1) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, -1.0),
        });
        let v = hermitian_eigenvalues(&h).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }
}
