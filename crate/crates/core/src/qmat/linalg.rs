use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance, also used for trace and normalization checks.
pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_NORM: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;
pub const TOL_EIG: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise modulus of `m - m*`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let scale = m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let residual = hermitian_residual(m);
    if residual > TOL_HERM * scale {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Rebuilds `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            out += (v * v.adjoint()) * c(w, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Spectral decomposition of a Hermitian matrix.
pub fn spectral_decomp(m: &CMatrix) -> Result<Spectrum> {
    check_hermitian(m)?;
    Ok(spectral_decomp_unchecked(m))
}

/// Same as [`spectral_decomp`] but skips the Hermiticity check; the input is
/// symmetrized first so round-off asymmetry never reaches the solver.
pub fn spectral_decomp_unchecked(m: &CMatrix) -> Spectrum {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Spectrum { values, vectors }
}

/// Eigenvalues of a real symmetric matrix with eigenvectors, ascending.
pub fn real_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps solver order among exact ties
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr[A* B]`.
pub fn inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Tr[A B]` for Hermitian `A`, `B`, returned as a real number.
pub fn trace_product_real(a: &CMatrix, b: &CMatrix) -> f64 {
    // Tr[AB] = sum_ij A_ij B_ji = sum_ij conj(A_ji) B_ji for Hermitian A
    inner(a, b).re
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Schatten-1 norm of a Hermitian matrix.
pub fn trace_norm(h: &CMatrix) -> f64 {
    spectral_decomp_unchecked(h)
        .values
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn operator_norm(h: &CMatrix) -> f64 {
    let s = spectral_decomp_unchecked(h);
    s.min().abs().max(s.max().abs())
}

/// Positive square root of a PSD matrix; eigenvalues below `TOL_PSD` in
/// magnitude are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let s = spectral_decomp(m)?;
    if s.min() < -TOL_PSD {
        return Err(Error::NotPositive {
            min_eigenvalue: s.min(),
        });
    }
    Ok(s.map(|x| x.max(0.0).sqrt()))
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `|v><v|`.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Kronecker product of two square matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    #[test]
    fn identity_spectrum_is_flat() {
        let s = spectral_decomp(&identity(4)).unwrap();
        for v in s.values.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn pauli_z_eigenvalues_ascending() {
        let s = spectral_decomp(&pauli_z()).unwrap();
        assert_abs_diff_eq!(s.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.values[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            spectral_decomp(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_squares_back() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let r = psd_sqrt(&m).unwrap();
        assert!(frobenius_norm(&(&r * &r - &m)) < 1e-12);
    }
}
