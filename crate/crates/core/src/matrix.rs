//! Dense complex matrices of small fixed dimension.
//!
//! Everything downstream works with `m x m` blocks for small `m`, so the
//! algorithms favour robustness and determinism over asymptotic speed: LU
//! with partial pivoting for solves, Faddeev-LeVerrier for characteristic
//! polynomial plus adjugate, and a cyclic complex Jacobi iteration on
//! Hermitian matrices for spectral norms and singular triplets.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Relative pivot threshold below which a factorization counts as singular.
pub const SINGULAR_PIVOT_REL: f64 = 1e-14;

/// Row-major dense complex matrix with square shape.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of dimension `dim >= 1`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self { dim, entries: vec![Complex64::zero(); dim * dim] }
    }

    /// Identity matrix of dimension `dim >= 1`.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::one());
        }
        m
    }

    /// Builds from row-major entries; `entries.len()` must equal `dim * dim`
    /// and every entry must be finite.
    pub fn from_vec(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput("entry count does not match dimension"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite"));
        }
        Ok(Self { dim, entries })
    }

    /// Builds from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("rows must form a square matrix"));
        }
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(dim, entries)
    }

    /// Builds from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, entries }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, entries }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, x.len());
        (0..self.dim)
            .map(|i| {
                let mut acc = Complex64::zero();
                for j in 0..self.dim {
                    acc += self.get(i, j) * x[j];
                }
                acc
            })
            .collect()
    }

    /// Writes `self * x` into `out`; no allocation, same summation order as
    /// [`Self::mul_vec`].
    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(self.dim, x.len());
        assert_eq!(self.dim, out.len());
        for i in 0..self.dim {
            let mut acc = Complex64::zero();
            for j in 0..self.dim {
                acc += self.get(i, j) * x[j];
            }
            out[i] = acc;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximal column sum of entry moduli (operator 1-norm).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// LU factorization with partial pivoting. A pivot of modulus at most
    /// `SINGULAR_PIVOT_REL * max_norm` counts as singular.
    pub fn lu(&self) -> Result<Lu> {
        let n = self.dim;
        let mut lu = self.entries.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let threshold = SINGULAR_PIVOT_REL * self.max_norm();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= threshold {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        Ok(Lu { dim: n, lu, piv, swaps })
    }

    /// Matrix inverse via LU.
    pub fn inverse(&self) -> Result<Self> {
        Ok(self.lu()?.solve_mat(&Self::identity(self.dim)))
    }

    /// Characteristic polynomial of `self` together with the coefficients of
    /// the adjugate of `lambda I - self`, by the Faddeev-LeVerrier
    /// recurrence. The polynomial is monic of degree `dim`; the returned
    /// matrices `B` satisfy `adj(lambda I - self) = sum_j B[j] lambda^j`
    /// with `j = 0..dim`, so that
    /// `resolvent(self, lambda) = (sum_j B[j] lambda^j) / charpoly(lambda)`.
    pub fn adjugate_resolvent(&self) -> (Polynomial, Vec<ComplexMatrix>) {
        let n = self.dim;
        let mut coeffs = vec![Complex64::zero(); n + 1];
        coeffs[n] = Complex64::one();
        let mut adj: Vec<ComplexMatrix> = Vec::with_capacity(n);
        let mut nk = ComplexMatrix::identity(n);
        for k in 0..n {
            adj.push(nk.clone());
            let mnk = self.mul(&nk);
            let c = -mnk.trace() / Complex64::new((k + 1) as f64, 0.0);
            coeffs[n - 1 - k] = c;
            if k + 1 < n {
                let mut next = mnk;
                for i in 0..n {
                    let v = next.get(i, i) + c;
                    next.set(i, i, v);
                }
                nk = next;
            }
        }
        // adj[k] multiplies lambda^{n-1-k}; reorder to ascending powers.
        adj.reverse();
        (Polynomial::new(coeffs), adj)
    }

    /// Eigenvalues of a Hermitian matrix, ascending. `self` must be
    /// Hermitian; only the lower triangle and real diagonal are trusted.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        self.jacobi(false).0
    }

    /// Eigenvalues (ascending) and an orthonormal set of eigenvectors
    /// (columns, in the same order) of a Hermitian matrix.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let (vals, vecs) = self.jacobi(true);
        (vals, vecs.expect("eigenvectors requested"))
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let h = self.adjoint().mul(self);
        let mut s: Vec<f64> = h
            .hermitian_eigenvalues()
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect();
        s.reverse();
        s
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm2(&self) -> f64 {
        *self.singular_values().first().expect("dim >= 1")
    }

    /// Numerical rank: singular values above `rel_tol` times the largest.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let s = self.singular_values();
        let cut = rel_tol * s[0];
        s.iter().filter(|&&v| v > cut).count()
    }

    /// Leading singular triplet `(sigma, u, v)` with `self v = sigma u`.
    /// For the zero matrix, `sigma = 0` and `u`, `v` are unit coordinate
    /// vectors.
    pub fn leading_singular_triplet(&self) -> (f64, Vec<Complex64>, Vec<Complex64>) {
        let n = self.dim;
        let h = self.adjoint().mul(self);
        let (vals, vecs) = h.hermitian_eigen();
        let mut best = 0;
        for (i, &l) in vals.iter().enumerate() {
            if l > vals[best] {
                best = i;
            }
        }
        let sigma = vals[best].max(0.0).sqrt();
        let v = vecs.col(best);
        if sigma > 0.0 {
            let u = self.mul_vec(&v).iter().map(|z| z / sigma).collect();
            (sigma, u, v)
        } else {
            let mut u = vec![Complex64::zero(); n];
            u[0] = Complex64::one();
            (0.0, u.clone(), u)
        }
    }

    /// Cyclic complex Jacobi on a Hermitian matrix. Each rotation is the
    /// product of a phase that makes the off-diagonal pair real and a real
    /// Givens rotation that annihilates it.
    fn jacobi(&self, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
        let n = self.dim;
        let mut h = self.clone();
        let mut v = if want_vectors { Some(ComplexMatrix::identity(n)) } else { None };
        let scale: f64 = h.max_norm().max(f64::MIN_POSITIVE);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(h.get(p, q).norm());
                }
            }
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = h.get(p, q);
                    let w = apq.norm();
                    if w <= 1e-18 * scale {
                        continue;
                    }
                    let app = h.get(p, p).re;
                    let aqq = h.get(q, q).re;
                    let phase = apq / w;
                    let tau = (aqq - app) / (2.0 * w);
                    // Small-magnitude root of t^2 - 2 tau t - 1 = 0: the
                    // sign convention follows the column rotation below,
                    // whose (p, q) block is [[c, -s phase], [s conj(phase), c]].
                    let t = if tau >= 0.0 {
                        -1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Column update with U = P G, P = diag(1, conj(phase)).
                    let (cs, sp, spc) =
                        (Complex64::new(c, 0.0), s * phase.conj(), s * phase);
                    for r in 0..n {
                        let hrp = h.get(r, p);
                        let hrq = h.get(r, q);
                        h.set(r, p, cs * hrp + sp * hrq);
                        h.set(r, q, cs * hrq - sp.conj() * hrp);
                    }
                    for r in 0..n {
                        let hpr = h.get(p, r);
                        let hqr = h.get(q, r);
                        h.set(p, r, cs * hpr + spc * hqr);
                        h.set(q, r, cs * hqr - spc.conj() * hpr);
                    }
                    if let Some(vm) = v.as_mut() {
                        for r in 0..n {
                            let vrp = vm.get(r, p);
                            let vrq = vm.get(r, q);
                            vm.set(r, p, cs * vrp + sp * vrq);
                            vm.set(r, q, cs * vrq - sp.conj() * vrp);
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let vals = order.iter().map(|&i| diag[i]).collect();
        let vecs = v.map(|vm| {
            let mut out = ComplexMatrix::zeros(n);
            for (new_j, &old_j) in order.iter().enumerate() {
                for i in 0..n {
                    out.set(i, new_j, vm.get(i, old_j));
                }
            }
            out
        });
        (vals, vecs)
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    dim: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.dim);
        let n = self.dim;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(b.dim(), self.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = self.solve_vec(&b.col(j));
            for i in 0..n {
                out.set(i, j, col[i]);
            }
        }
        out
    }

    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut d = if self.swaps % 2 == 0 { Complex64::one() } else { -Complex64::one() };
        for i in 0..n {
            d *= self.lu[i * n + i];
        }
        d
    }
}

impl ComplexMatrix {
    /// Minimum-norm least-squares solution of `self c = rhs` through the
    /// singular value decomposition, dropping singular values at or below
    /// `rel_tol` times the largest.
    pub fn pinv_apply(&self, rhs: &[Complex64], rel_tol: f64) -> Vec<Complex64> {
        assert_eq!(self.dim, rhs.len());
        let h = self.adjoint().mul(self);
        let (vals, vecs) = h.hermitian_eigen();
        let sigma_max = vals.iter().fold(0.0f64, |a, &l| a.max(l.max(0.0).sqrt()));
        let mut c = vec![Complex64::zero(); self.dim];
        if sigma_max == 0.0 {
            return c;
        }
        for (j, &l) in vals.iter().enumerate() {
            let sigma = l.max(0.0).sqrt();
            if sigma <= rel_tol * sigma_max {
                continue;
            }
            let v = vecs.col(j);
            let u = self.mul_vec(&v);
            // u / sigma is the left singular vector; coefficient <u, rhs>/sigma.
            let mut coeff = Complex64::zero();
            for (ui, ri) in u.iter().zip(rhs) {
                coeff += (ui / sigma).conj() * ri;
            }
            coeff /= sigma;
            for (ci, vi) in c.iter_mut().zip(&v) {
                *ci += coeff * vi;
            }
        }
        c
    }

    /// Orthogonal projection of `y` onto the range of `self` (the span of
    /// left singular vectors with singular value above `rel_tol` times the
    /// largest).
    pub fn range_projection(&self, y: &[Complex64], rel_tol: f64) -> Vec<Complex64> {
        assert_eq!(self.dim, y.len());
        let h = self.mul(&self.adjoint());
        let (vals, vecs) = h.hermitian_eigen();
        let sigma_max = vals.iter().fold(0.0f64, |a, &l| a.max(l.max(0.0).sqrt()));
        let mut p = vec![Complex64::zero(); self.dim];
        if sigma_max == 0.0 {
            return p;
        }
        for (j, &l) in vals.iter().enumerate() {
            let sigma = l.max(0.0).sqrt();
            if sigma <= rel_tol * sigma_max {
                continue;
            }
            let u = vecs.col(j);
            let mut coeff = Complex64::zero();
            for (ui, yi) in u.iter().zip(y) {
                coeff += ui.conj() * yi;
            }
            for (pi, ui) in p.iter_mut().zip(&u) {
                *pi += coeff * ui;
            }
        }
        p
    }
}

/// `m^n` by binary powering.
pub fn matrix_pow(m: &ComplexMatrix, n: u64) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.dim());
    let mut base = m.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    result
}

/// `(lambda I - m)^{-1}` via LU; fails with `SpectrumHit` when `lambda` is
/// in the spectrum of `m` to working precision.
pub fn resolvent(m: &ComplexMatrix, lambda: Complex64) -> Result<ComplexMatrix> {
    let n = m.dim();
    let mut shifted = m.scale(-Complex64::one());
    for i in 0..n {
        let v = shifted.get(i, i) + lambda;
        shifted.set(i, i, v);
    }
    match shifted.lu() {
        Ok(f) => Ok(f.solve_mat(&ComplexMatrix::identity(n))),
        Err(Error::Singular) => Err(Error::SpectrumHit),
        Err(e) => Err(e),
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm2(x: &[Complex64]) -> f64 {
    if x.len() == 1 {
        return x[0].norm();
    }
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Complex64], c: Complex64) -> Vec<Complex64> {
    a.iter().map(|x| x * c).collect()
}

pub fn vec_is_finite(a: &[Complex64]) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_and_det_matches_cofactor() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 1.0), c(0.0, -1.0)],
            vec![c(1.0, 0.0), c(3.0, 0.5)],
        ])
        .unwrap();
        let f = m.lu().unwrap();
        let b = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let x = f.solve_vec(&b);
        let r = vec_sub(&m.mul_vec(&x), &b);
        assert!(vec_norm2(&r) < 1e-14);
        let det_cofactor = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
        assert!((f.det() - det_cofactor).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = ComplexMatrix::from_real(2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(m.lu().err(), Some(Error::Singular));
        let z = ComplexMatrix::zeros(1);
        assert_eq!(z.lu().err(), Some(Error::Singular));
    }

    #[test]
    fn resolvent_satisfies_defining_identity() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(-0.25, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let lambda = c(2.0, 0.5);
        let r = resolvent(&m, lambda).unwrap();
        // (lambda I - m) r = I
        let mut shifted = m.scale(-Complex64::one());
        for i in 0..2 {
            let v = shifted.get(i, i) + lambda;
            shifted.set(i, i, v);
        }
        let prod = shifted.mul(&r);
        let err = prod.sub(&ComplexMatrix::identity(2)).max_norm();
        assert!(err < 1e-13, "residual {err}");
    }

    #[test]
    fn resolvent_on_eigenvalue_is_spectrum_hit() {
        let m = ComplexMatrix::from_real(2, &[0.5, 0.0, 0.0, 0.25]).unwrap();
        assert_eq!(resolvent(&m, c(0.5, 0.0)).err(), Some(Error::SpectrumHit));
    }

    #[test]
    fn faddeev_leverrier_matches_lu_determinant() {
        // Characteristic polynomial evaluated at lambda equals
        // det(lambda I - M); check at several points against LU.
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.2), c(-0.3, 0.0), c(0.0, 1.0)],
            vec![c(0.5, 0.0), c(0.1, -0.4), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(1.5, 0.1), c(-0.7, 0.0)],
        ])
        .unwrap();
        let (p, adj) = m.adjugate_resolvent();
        assert_eq!(p.degree(), Some(3));
        for &lam in &[c(2.0, 0.0), c(-1.0, 1.0), c(0.3, -2.2), c(4.0, 4.0)] {
            let mut shifted = m.scale(-Complex64::one());
            for i in 0..3 {
                let v = shifted.get(i, i) + lam;
                shifted.set(i, i, v);
            }
            let det = shifted.lu().unwrap().det();
            let pv = p.eval(lam);
            assert!((det - pv).norm() < 1e-12 * det.norm().max(1.0));
            // Adjugate identity: adj(lambda I - M) = p(lambda) resolvent.
            let r = resolvent(&m, lam).unwrap();
            let mut adj_eval = ComplexMatrix::zeros(3);
            let mut pw = Complex64::one();
            for b in &adj {
                adj_eval = adj_eval.add(&b.scale(pw));
                pw *= lam;
            }
            let err = adj_eval.sub(&r.scale(pv)).max_norm();
            assert!(err < 1e-10 * adj_eval.max_norm().max(1.0), "adjugate residual {err}");
        }
    }

    #[test]
    fn hermitian_jacobi_finds_known_eigenvalues() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let vals = h.hermitian_eigenvalues();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        let (vals, vecs) = h.hermitian_eigen();
        for (j, &l) in vals.iter().enumerate() {
            let v = vecs.col(j);
            let hv = h.mul_vec(&v);
            let r = vec_sub(&hv, &vec_scale(&v, c(l, 0.0)));
            assert!(vec_norm2(&r) < 1e-13);
            assert!((vec_norm2(&v) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_norm_of_diagonal_and_rank_one() {
        let d = ComplexMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -4.0)],
        ])
        .unwrap();
        assert!((d.op_norm2() - 4.0).abs() < 1e-13);
        // Rank-one [[0, -1], [0, 0]] has a single singular value 1.
        let n = ComplexMatrix::from_real(2, &[0.0, -1.0, 0.0, 0.0]).unwrap();
        let s = n.singular_values();
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-14);
        assert_eq!(n.rank(1e-10), 1);
        let (sigma, u, v) = n.leading_singular_triplet();
        assert!((sigma - 1.0).abs() < 1e-14);
        let r = vec_sub(&n.mul_vec(&v), &vec_scale(&u, c(sigma, 0.0)));
        assert!(vec_norm2(&r) < 1e-13);
    }

    #[test]
    fn op_norm2_matches_max_abs_for_scalar() {
        let m = ComplexMatrix::from_rows(&[vec![c(-0.3, 0.4)]]).unwrap();
        assert!((m.op_norm2() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn binary_powering_matches_iterated_product() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.4, 0.1), c(0.3, 0.0)],
            vec![c(0.0, -0.2), c(0.5, 0.0)],
        ])
        .unwrap();
        let mut iterated = ComplexMatrix::identity(2);
        for _ in 0..13 {
            iterated = iterated.mul(&m);
        }
        let fast = matrix_pow(&m, 13);
        assert!(fast.sub(&iterated).max_norm() < 1e-13);
        assert_eq!(matrix_pow(&m, 0), ComplexMatrix::identity(2));
    }

    #[test]
    fn pinv_solves_rank_deficient_system() {
        // sub x = (-1, 0) with sub = [[0, -1], [0, 0]] has minimum-norm
        // solution (0, 1).
        let sub = ComplexMatrix::from_real(2, &[0.0, -1.0, 0.0, 0.0]).unwrap();
        let rhs = vec![c(-1.0, 0.0), c(0.0, 0.0)];
        let x = sub.pinv_apply(&rhs, 1e-10);
        assert!((x[0]).norm() < 1e-13);
        assert!((x[1] - c(1.0, 0.0)).norm() < 1e-13);
        // Range projection keeps vectors in span{e1} and kills e2.
        let p = sub.range_projection(&vec![c(2.0, 1.0), c(3.0, 0.0)], 1e-10);
        assert!((p[0] - c(2.0, 1.0)).norm() < 1e-13);
        assert!(p[1].norm() < 1e-13);
    }
}
