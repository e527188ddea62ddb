//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Kronecker product `a ⊗ b` (first factor most significant).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-stacking vectorisation.
pub fn vectorize(x: &CMat) -> CVec {
    CVec::from_column_slice(x.as_slice())
}

pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

pub fn trace(x: &CMat) -> C64 {
    x.trace()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Hermitian imaginary part `(X − X†) / 2i`.
pub fn herm_im(x: &CMat) -> CMat {
    (x - x.adjoint()) * c(0.0, -0.5)
}

/// Frobenius norm.
pub fn norm(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(x: &CMat) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `⟨a|b⟩` with the first argument conjugated.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.dotc(b)
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted in
/// decreasing order. Each eigenvector is rescaled so that its
/// largest-modulus entry (first one on ties) is real and positive.
pub fn hermitian_eigen(x: &CMat) -> (Vec<f64>, CMat) {
    let h = (x + x.adjoint()) * c(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let d = x.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut vecs = CMat::zeros(d, d);
    let mut vals = Vec::with_capacity(d);
    for (col, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        let mut v = eig.eigenvectors.column(src).into_owned();
        let mut best = 0;
        for i in 0..d {
            if v[i].norm() > v[best].norm() + 1e-12 {
                best = i;
            }
        }
        let phase = v[best] / v[best].norm();
        v /= phase;
        vecs.set_column(col, &v);
    }
    (vals, vecs)
}

/// Square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(x: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(x);
    let d = x.nrows();
    let mut diag = CMat::zeros(d, d);
    for (i, v) in vals.iter().enumerate() {
        diag[(i, i)] = c(v.max(0.0).sqrt(), 0.0);
    }
    &vecs * diag * vecs.adjoint()
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(x: &CMat) -> Vec<C64> {
    let schur = nalgebra::linalg::Schur::new(x.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Inverse through a fully pivoted LU factorisation.
pub fn inverse(x: &CMat) -> Option<CMat> {
    x.clone().full_piv_lu().try_inverse()
}

/// Matrix exponential of `i H` for Hermitian `H`.
pub fn expi_hermitian(h: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let d = h.nrows();
    let mut diag = CMat::zeros(d, d);
    for (i, v) in vals.iter().enumerate() {
        diag[(i, i)] = C64::from_polar(1.0, *v);
    }
    &vecs * diag * vecs.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorization_round_trip_and_kron_identity() {
        let a = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64 * 0.5));
        assert_eq!(unvectorize(&vectorize(&a), 3), a);
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let x = CMat::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0));
        let b = CMat::from_fn(3, 3, |i, j| c(1.0 + j as f64, i as f64));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_phase_convention() {
        let h = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.3), c(0.0, -0.3), c(0.5, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals[0] >= vals[1]);
        for j in 0..2 {
            let col = vecs.column(j);
            let big = col.iter().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
            assert!(big.im.abs() < 1e-12 && big.re > 0.0);
        }
        let rebuilt = &vecs * CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|v| c(*v, 0.0)))) * vecs.adjoint();
        assert!(norm(&(rebuilt - h)) < 1e-12);
    }

    #[test]
    fn inverse_of_rotation() {
        let r = CMat::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        assert!(norm(&(inverse(&r).unwrap() - r.adjoint())) < 1e-15);
        assert!(inverse(&CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])).is_none());
    }
}
