//! Dense complex linear algebra helpers on top of nalgebra.
//!
//! Complex products are split into four real GEMMs so that nalgebra can hand
//! them to `matrixmultiply`; the generic complex kernel is several times
//! slower at the truncation sizes used here (dim 64..256).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub(crate) fn split(a: &CMat) -> (RMat, RMat) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

pub(crate) fn join(re: &RMat, im: &RMat) -> CMat {
    re.zip_map(im, Complex64::new)
}

/// `a * b` for complex matrices.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// `v * x` with `v` real.
pub fn rmul(v: &RMat, x: &CMat) -> CMat {
    let (xr, xi) = split(x);
    join(&(v * xr), &(v * xi))
}

/// `x * v` with `v` real.
pub fn mulr(x: &CMat, v: &RMat) -> CMat {
    let (xr, xi) = split(x);
    join(&(xr * v), &(xi * v))
}

/// `v^T x v` with `v` real orthogonal: the change of basis into the columns of `v`.
pub fn congruence_t(v: &RMat, x: &CMat) -> CMat {
    let (xr, xi) = split(x);
    let vt = v.transpose();
    join(&(&vt * xr * v), &(&vt * xi * v))
}

/// `v x v^T` with `v` real.
pub fn congruence(v: &RMat, x: &CMat) -> CMat {
    let (xr, xi) = split(x);
    let vt = v.transpose();
    join(&(v * xr * &vt), &(v * xi * &vt))
}

/// `(m + m^†) / 2`.
pub fn hermitize(m: &CMat) -> CMat {
    let mut out = m.clone();
    let n = m.nrows();
    for j in 0..n {
        for k in 0..n {
            out[(j, k)] = (m[(j, k)] + m[(k, j)].conj()) * 0.5;
        }
    }
    out
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Largest entrywise deviation from hermiticity.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
/// decreasing order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(m: &CMat) -> Self {
        let eig = SymmetricEigen::new(hermitize(m));
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// `V diag(f(λ)) V^†`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let w = f(self.values[c]);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        matmul(&scaled, &self.vectors.adjoint())
    }
}

/// Eigendecomposition of a real symmetric matrix (ascending eigenvalues).
pub fn real_symmetric_eigen(m: &RMat) -> (DVector<f64>, RMat) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        CMat::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    #[test]
    fn split_matmul_matches_generic_product() {
        let a = sample(17, 1);
        let b = sample(17, 2);
        let diff = frobenius(&(matmul(&a, &b) - &a * &b));
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let a = sample(9, 3);
        let h = hermitize(&(&a * a.adjoint()));
        let eig = HermitianEigen::new(&h);
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let back = eig.apply(|x| x);
        assert!(frobenius(&(back - &h)) < 1e-12);
    }
}
