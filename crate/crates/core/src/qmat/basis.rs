use nalgebra::{DMatrix, DVector};

use super::linalg::{c, trace_product_real, CMatrix};
use crate::error::{Error, Result};

/// Orthonormal basis of the real space of `d x d` Hermitian matrices under
/// `<A, B> = Tr[A* B]`.
///
/// Elements are the generalized Gell-Mann matrices: for each pair `j < k` the
/// symmetric and antisymmetric off-diagonal generators, then the `d - 1`
/// diagonal generators, and finally `1/sqrt(d)` times the identity. Every
/// element but the last is traceless.
#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn generalized_gell_mann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension {
                dim: d,
                reason: "Hermitian basis needs d >= 2",
            });
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in (j + 1)..d {
                let mut sym = CMatrix::zeros(d, d);
                sym[(j, k)] = c(s, 0.0);
                sym[(k, j)] = c(s, 0.0);
                elements.push(sym);
                let mut anti = CMatrix::zeros(d, d);
                anti[(j, k)] = c(0.0, -s);
                anti[(k, j)] = c(0.0, s);
                elements.push(anti);
            }
        }
        for k in 1..d {
            let norm = 1.0 / ((k * (k + 1)) as f64).sqrt();
            let mut diag = CMatrix::zeros(d, d);
            for l in 0..k {
                diag[(l, l)] = c(norm, 0.0);
            }
            diag[(k, k)] = c(-(k as f64) * norm, 0.0);
            elements.push(diag);
        }
        elements.push(CMatrix::identity(d, d) * c(1.0 / (d as f64).sqrt(), 0.0));
        Ok(Self { dim: d, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements, `d^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> &CMatrix {
        &self.elements[j]
    }

    /// The `d^2 - 1` traceless elements.
    pub fn traceless(&self) -> &[CMatrix] {
        &self.elements[..self.elements.len() - 1]
    }

    /// Coordinates `Tr[V_j A]` of a Hermitian matrix.
    pub fn expand(&self, a: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.elements.iter().map(|v| trace_product_real(v, a)),
        )
    }

    /// `sum_j coeffs[j] V_j`.
    pub fn reconstruct(&self, coeffs: &[f64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (v, &w) in self.elements.iter().zip(coeffs) {
            if w != 0.0 {
                out += v * c(w, 0.0);
            }
        }
        out
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            super::linalg::inner(&self.elements[i], &self.elements[j]).re
        })
    }
}

/// Convenience wrapper for [`HermitianBasis::generalized_gell_mann`].
pub fn hermitian_basis(d: usize) -> Result<HermitianBasis> {
    HermitianBasis::generalized_gell_mann(d)
}
