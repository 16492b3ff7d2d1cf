use crate::designs::TwoDesign;
use crate::error::{Error, Result};
use crate::povm::GentlePovm;
use crate::qmat::linalg::{
    c, check_hermitian, projector, spectral_decomp_unchecked, CMatrix, CVector, TOL_PSD,
};
use crate::qmat::DensityMatrix;

const TOL_COMPLETE: f64 = 1e-9;

/// A finite POVM given by its elements `E_y`.
#[derive(Debug, Clone)]
pub struct ExplicitPovm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl ExplicitPovm {
    /// Checks that the elements are Hermitian, positive and sum to the identity.
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let povm = Self::unchecked(elements)?;
        for e in &povm.elements {
            check_hermitian(e)?;
            let min = spectral_decomp_unchecked(e).min();
            if min < -TOL_PSD {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
        }
        let resid = povm.completeness_residual();
        if resid > TOL_COMPLETE {
            return Err(Error::Config(format!(
                "POVM elements sum to identity only within {resid:e}"
            )));
        }
        Ok(povm)
    }

    /// Only checks shapes; lets deliberately broken POVMs through.
    pub fn unchecked(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements.first().ok_or(Error::Empty("POVM elements"))?;
        let dim = first.nrows();
        for e in &elements {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.nrows().max(e.ncols()),
                });
            }
        }
        Ok(Self { dim, elements })
    }

    /// `{I}`.
    pub fn trivial(d: usize) -> Self {
        Self {
            dim: d,
            elements: vec![CMatrix::identity(d, d)],
        }
    }

    /// Projectors onto the given orthonormal basis.
    pub fn projective(basis: &[CVector]) -> Result<Self> {
        Self::new(basis.iter().map(projector).collect())
    }

    pub fn computational(d: usize) -> Self {
        let basis: Vec<CVector> = (0..d)
            .map(|k| {
                let mut v = CVector::zeros(d);
                v[k] = c(1.0, 0.0);
                v
            })
            .collect();
        Self {
            dim: d,
            elements: basis.iter().map(projector).collect(),
        }
    }

    /// `{(d/D) |v_m><v_m|}`, the non-gentle 2-design measurement.
    pub fn rank_one_design(design: &TwoDesign) -> Result<Self> {
        let w = design.dim() as f64 / design.count() as f64;
        Self::new(
            (0..design.count())
                .map(|m| design.projector(m) * c(w, 0.0))
                .collect(),
        )
    }

    /// All `2^D` elements of a gentle POVM; `D <= 20`.
    pub fn from_gentle(povm: &GentlePovm) -> Result<Self> {
        Ok(Self {
            dim: povm.dim(),
            elements: povm.materialize()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// `||sum_y E_y - I||_F`.
    pub fn completeness_residual(&self) -> f64 {
        let mut total = CMatrix::identity(self.dim, self.dim) * c(-1.0, 0.0);
        for e in &self.elements {
            total += e;
        }
        total.norm()
    }

    /// `Tr[rho E_y]` for every `y`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(self.elements.iter().map(|e| rho.expectation(e)).collect())
    }

    /// Copy with element `y` multiplied by `factor`.
    pub fn with_scaled_element(&self, y: usize, factor: f64) -> Self {
        let mut elements = self.elements.clone();
        elements[y] *= c(factor, 0.0);
        Self {
            dim: self.dim,
            elements,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::build_mub_design;

    #[test]
    fn constructors_are_complete() {
        let design = build_mub_design(3).unwrap();
        assert!(
            ExplicitPovm::rank_one_design(&design)
                .unwrap()
                .completeness_residual()
                < 1e-12
        );
        assert!(ExplicitPovm::computational(4).completeness_residual() < 1e-15);
        assert!(ExplicitPovm::projective(&design.vectors()[3..6]).is_ok());
        let g = GentlePovm::new(build_mub_design(2).unwrap(), 0.1).unwrap();
        let e = ExplicitPovm::from_gentle(&g).unwrap();
        assert_eq!(e.len(), 64);
        assert!(e.completeness_residual() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(ExplicitPovm::new(vec![]).is_err());
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(ExplicitPovm::new(vec![half.clone()]).is_err());
        assert!(ExplicitPovm::new(vec![half.clone(), half.clone()]).is_ok());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        let rest = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-0.5, 0.0), c(1.5, 0.0)]));
        assert!(matches!(
            ExplicitPovm::new(vec![neg, rest]),
            Err(Error::NotPositive { .. })
        ));
        assert!(ExplicitPovm::unchecked(vec![half.clone(), CMatrix::identity(3, 3)]).is_err());
    }
}
