use serde::{Deserialize, Serialize};

use super::json::MatrixJson;
use super::linalg::{
    c, check_hermitian, frobenius_norm, projector, spectral_decomp_unchecked, trace, CMatrix,
    CVector, TOL_NORM, TOL_PSD, TOL_TRACE,
};
use crate::error::{Error, Result};

/// A quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        let tr = trace(&m);
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let min = spectral_decomp_unchecked(&m).min();
        if min < -TOL_PSD {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { m })
    }

    /// `1/d` times the identity.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidDimension {
                dim: d,
                reason: "need d >= 1",
            });
        }
        Ok(Self {
            m: CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0),
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            m: projector(psi.amplitudes()),
        }
    }

    /// `|k><k|` in the computational basis.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(d, k)?))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        spectral_decomp_unchecked(&self.m)
            .values
            .iter()
            .copied()
            .collect()
    }

    /// `Tr[rho A]` for Hermitian `A`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        super::linalg::trace_product_real(&self.m, a)
    }
}

impl TryFrom<MatrixJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        Self::new(j.try_into()?)
    }
}

impl From<DensityMatrix> for MatrixJson {
    fn from(rho: DensityMatrix) -> Self {
        MatrixJson::from(&rho.m)
    }
}

/// A unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: v.unscale(norm),
        })
    }

    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: k + 1,
            });
        }
        let mut v = CVector::zeros(d);
        v[k] = c(1.0, 0.0);
        Ok(Self { amps: v })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.amps.dotc(&other.amps).norm_sqr()
    }
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `1/2 Tr|a - b|`.
pub fn trace_norm_dist(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * super::linalg::trace_norm(&diff))
}

/// `Tr[(a - b)^2]^{1/2}`.
pub fn frobenius_dist(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    Ok(frobenius_norm(&(a.matrix() - b.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_density, random_pure_state, SimRng};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn plus() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap()
    }

    #[test]
    fn identical_states_are_at_distance_zero() {
        let mut rng = SimRng::new(1, 0);
        let rho = random_density(3, &mut rng).unwrap();
        assert_abs_diff_eq!(trace_norm_dist(&rho, &rho).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(frobenius_dist(&rho, &rho).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = DensityMatrix::basis_state(2, 0).unwrap();
        let b = DensityMatrix::basis_state(2, 1).unwrap();
        assert_abs_diff_eq!(trace_norm_dist(&a, &b).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            frobenius_dist(&a, &b).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn zero_vs_plus() {
        let a = DensityMatrix::basis_state(2, 0).unwrap();
        let b = DensityMatrix::from_pure(&plus());
        assert_abs_diff_eq!(
            trace_norm_dist(&a, &b).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn frobenius_matches_eigenvalue_sum() {
        let mut rng = SimRng::new(7, 3);
        let a = random_density(4, &mut rng).unwrap();
        let b = random_density(4, &mut rng).unwrap();
        let diff = a.matrix() - b.matrix();
        let mu = spectral_decomp_unchecked(&diff).values;
        let from_spec = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(frobenius_dist(&a, &b).unwrap(), from_spec, epsilon = 1e-12);
        let half_abs = 0.5 * mu.iter().map(|x| x.abs()).sum::<f64>();
        assert_abs_diff_eq!(trace_norm_dist(&a, &b).unwrap(), half_abs, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(trace_norm_dist(&a, &b).is_err());
        assert!(frobenius_dist(&a, &b).is_err());
    }

    #[test]
    fn rejects_invalid_states() {
        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::InvalidTrace { .. })
        ));
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn maximally_mixed_qubit() {
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(m.matrix()[(0, 0)], c(0.5, 0.0));
        assert_eq!(m.matrix()[(1, 1)], c(0.5, 0.0));
        assert_eq!(m.matrix()[(0, 1)], c(0.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pure_state_distances_follow_overlap(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = SimRng::new(seed, 0);
            let p1 = random_pure_state(d, &mut rng).unwrap();
            let p2 = random_pure_state(d, &mut rng).unwrap();
            let r1 = DensityMatrix::from_pure(&p1);
            let r2 = DensityMatrix::from_pure(&p2);
            let expected = (1.0 - p1.fidelity(&p2)).max(0.0).sqrt();
            let tr = trace_norm_dist(&r1, &r2).unwrap();
            let fr = frobenius_dist(&r1, &r2).unwrap();
            prop_assert!((tr - expected).abs() < 1e-10);
            prop_assert!((fr - 2f64.sqrt() * tr).abs() < 1e-10);
        }

        #[test]
        fn distances_obey_triangle_inequality(seed in any::<u64>(), d in 2usize..5) {
            let mut rng = SimRng::new(seed, 1);
            let a = random_density(d, &mut rng).unwrap();
            let b = random_density(d, &mut rng).unwrap();
            let x = random_density(d, &mut rng).unwrap();
            let t = |u: &DensityMatrix, v: &DensityMatrix| trace_norm_dist(u, v).unwrap();
            let f = |u: &DensityMatrix, v: &DensityMatrix| frobenius_dist(u, v).unwrap();
            prop_assert!(t(&a, &b) <= t(&a, &x) + t(&x, &b) + 1e-12);
            prop_assert!(f(&a, &b) <= f(&a, &x) + f(&x, &b) + 1e-12);
            let tab = t(&a, &b);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&tab));
            prop_assert!((tab - t(&b, &a)).abs() < 1e-12);
        }
    }
}
