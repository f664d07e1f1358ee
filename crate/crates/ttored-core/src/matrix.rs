//! Small dense complex matrices and the handful of factorizations the
//! library needs: Hermitian Jacobi eigendecomposition, singular values via
//! the Gram matrix, shifted QR on Hessenberg matrices, and LU determinants.
//!
//! Dimensions stay below ~64, so everything is plain O(n^3) with no
//! blocking and no external solver.

use crate::{Complex64, Error, Result};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // needed for the no_std build
use num_traits::Float;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `self^p` by repeated squaring (square matrices).
    pub fn pow(&self, p: usize) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues ascending and the unitary `V` whose
    /// columns are the eigenvectors (`A = V diag(w) V^H`).
    ///
    /// The input is symmetrized as `(A + A^H)/2` first.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMatrix) {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = CMatrix::from_fn(n, n, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        let mut v = CMatrix::identity(n);
        if n <= 1 {
            let w = if n == 1 { vec![a.get(0, 0).re] } else { vec![] };
            return (w, v);
        }

        let scale = a.frobenius().max(f64::MIN_POSITIVE);
        let tol = 1e-15 * scale;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.get(p, q).norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    let b = apq.norm();
                    if b <= 1e-18 * scale {
                        continue;
                    }
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    // phase so the 2x2 block becomes real symmetric
                    let u = apq / b;
                    // rotation angle for [[app, b], [b, aqq]]
                    let theta = 0.5 * f64::atan2(2.0 * b, app - aqq);
                    let cth = theta.cos();
                    let sth = theta.sin();
                    // combined unitary acting on columns (p, q):
                    //   col_p' =  c * col_p + s * conj(u) * col_q
                    //   col_q' = -s * u * col_p + c * col_q
                    let s_cu = Complex64::new(sth, 0.0) * u.conj();
                    let s_u = Complex64::new(sth, 0.0) * u;
                    // A <- G^H A G
                    for i in 0..n {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        a.set(i, p, aip * cth + aiq * s_cu);
                        a.set(i, q, aiq * cth - aip * s_u);
                    }
                    for j in 0..n {
                        let apj = a.get(p, j);
                        let aqj = a.get(q, j);
                        a.set(p, j, apj * cth + aqj * s_cu.conj());
                        a.set(q, j, aqj * cth - apj * s_u.conj());
                    }
                    for i in 0..n {
                        let vip = v.get(i, p);
                        let viq = v.get(i, q);
                        v.set(i, p, vip * cth + viq * s_cu);
                        v.set(i, q, viq * cth - vip * s_u);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let w_raw: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        order.sort_by(|&i, &j| w_raw[i].partial_cmp(&w_raw[j]).expect("finite"));
        let w: Vec<f64> = order.iter().map(|&i| w_raw[i]).collect();
        let v_sorted = CMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
        (w, v_sorted)
    }

    /// Singular values in descending order, as square roots of the
    /// eigenvalues of `A^H A`.
    pub fn singular_values(&self) -> Vec<f64> {
        let gram = self.adjoint().mul(self);
        let (w, _) = gram.hermitian_eigen();
        let mut s: Vec<f64> = w.iter().rev().map(|&x| x.max(0.0).sqrt()).collect();
        // guard against -0.0 artifacts
        for v in s.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        s
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm2(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let (pivot, pmax) = (k..n)
                .map(|i| (i, a.get(i, k).norm()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))
                .expect("nonempty");
            if pmax == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != k {
                for j in 0..n {
                    let t = a.get(k, j);
                    a.set(k, j, a.get(pivot, j));
                    a.set(pivot, j, t);
                }
                det = -det;
            }
            let akk = a.get(k, k);
            det *= akk;
            for i in (k + 1)..n {
                let f = a.get(i, k) / akk;
                for j in (k + 1)..n {
                    let v = a.get(i, j) - f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        det
    }

    /// Eigenvalues of an upper Hessenberg matrix by explicit single-shift
    /// QR with Wilkinson shifts and deflation.
    pub fn hessenberg_eigenvalues(&self) -> Result<Vec<Complex64>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut h = self.clone();
        let mut eigs = Vec::with_capacity(n);
        let mut hi = n;
        let mut iter_guard = 0usize;
        let max_iters = 60 * n.max(1);

        while hi > 0 {
            if hi == 1 {
                eigs.push(h.get(0, 0));
                hi = 0;
                continue;
            }
            // deflate negligible subdiagonals
            for m in 1..hi {
                let sub = h.get(m, m - 1).norm();
                let local = h.get(m - 1, m - 1).norm() + h.get(m, m).norm();
                if sub <= 1e-15 * local.max(f64::MIN_POSITIVE) {
                    h.set(m, m - 1, Complex64::new(0.0, 0.0));
                }
            }
            if h.get(hi - 1, hi - 2).norm() == 0.0 {
                eigs.push(h.get(hi - 1, hi - 1));
                hi -= 1;
                continue;
            }
            // start of the trailing unreduced block
            let mut lo = hi - 1;
            while lo > 0 && h.get(lo, lo - 1).norm() != 0.0 {
                lo -= 1;
            }

            iter_guard += 1;
            if iter_guard > max_iters {
                return Err(Error::RootSolveFailure);
            }

            // Wilkinson shift: eigenvalue of the trailing 2x2 closest to the corner
            let a = h.get(hi - 2, hi - 2);
            let b = h.get(hi - 2, hi - 1);
            let c = h.get(hi - 1, hi - 2);
            let d = h.get(hi - 1, hi - 1);
            let tr_half = (a + d) * 0.5;
            let disc = (tr_half * tr_half - (a * d - b * c)).sqrt();
            let e1 = tr_half + disc;
            let e2 = tr_half - disc;
            let mu = if (e1 - d).norm() <= (e2 - d).norm() { e1 } else { e2 };
            // exceptional shift every 12 stalls
            let mu = if iter_guard % 12 == 0 {
                mu + Complex64::new(h.get(hi - 1, hi - 2).norm(), 0.0)
            } else {
                mu
            };

            // explicit shifted QR step on the active block [lo, hi)
            for i in lo..hi {
                let v = h.get(i, i) - mu;
                h.set(i, i, v);
            }
            let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo - 1);
            for k in lo..(hi - 1) {
                let f = h.get(k, k);
                let g = h.get(k + 1, k);
                let (cth, s) = givens(f, g);
                rot.push((cth, s));
                // apply G^H to rows k, k+1
                for j in k..hi {
                    let hk = h.get(k, j);
                    let hk1 = h.get(k + 1, j);
                    h.set(k, j, hk * cth + hk1 * s);
                    h.set(k + 1, j, hk1 * cth - hk * s.conj());
                }
            }
            for (k, &(cth, s)) in (lo..(hi - 1)).zip(rot.iter()) {
                // apply G to columns k, k+1
                let top = (k + 2).min(hi);
                for i in lo..top {
                    let hik = h.get(i, k);
                    let hik1 = h.get(i, k + 1);
                    h.set(i, k, hik * cth + hik1 * s.conj());
                    h.set(i, k + 1, hik1 * cth - hik * s);
                }
            }
            for i in lo..hi {
                let v = h.get(i, i) + mu;
                h.set(i, i, v);
            }
        }
        Ok(eigs)
    }
}

/// Complex Givens rotation: returns `(c, s)` with `c` real such that
/// `[c, s; -conj(s), c]^H [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let denom = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / denom;
    let s = (f / fn_) * g.conj() / denom;
    (c, s)
}
