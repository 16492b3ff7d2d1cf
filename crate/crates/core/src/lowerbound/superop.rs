use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExplicitPovm;
use crate::error::{Error, Result};
use crate::qmat::linalg::{c, real_symmetric_eigen, trace, trace_product_real, CMatrix};
use crate::qmat::{random_hermitian, DensityMatrix, HermitianBasis, SimRng};

/// Elements with trace below this are refused.
const TOL_TRACE_ELEMENT: f64 = 1e-300;
const TOL_CHANNEL: f64 = 1e-9;

/// Matrix `H[j,k] = <V_j, H(V_k)>` of the super-operator
/// `H(A) = sum_y Tr[A E_y] E_y / Tr[E_y]` in a Hermitian basis whose last
/// element is `I/sqrt(d)`, with its spectrum.
///
/// `eigenvalues` is the spectrum of the full matrix. The traceless
/// eigenvectors come from diagonalizing the block on the first `d^2 - 1`
/// coordinates, so an eigenvalue-1 space shared with the identity never mixes
/// it in; `identity_coupling` measures how far that block structure holds.
#[derive(Debug, Clone)]
pub struct SuperOpMatrix {
    basis: HermitianBasis,
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    traceless_eigenvalues: DVector<f64>,
    traceless_coords: DMatrix<f64>,
}

impl SuperOpMatrix {
    pub fn from_matrix(basis: HermitianBasis, matrix: DMatrix<f64>) -> Result<Self> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        let (eigenvalues, _) = real_symmetric_eigen(&matrix);
        let block = matrix.view((0, 0), (n - 1, n - 1)).into_owned();
        let (traceless_eigenvalues, traceless_coords) = real_symmetric_eigen(&block);
        Ok(Self {
            basis,
            matrix,
            eigenvalues,
            traceless_eigenvalues,
            traceless_coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// All `d^2` eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// The `d^2 - 1` eigenvalues on the traceless subspace, ascending.
    pub fn traceless_eigenvalues(&self) -> &DVector<f64> {
        &self.traceless_eigenvalues
    }

    /// Coordinates (first `d^2 - 1` basis elements) of the traceless
    /// eigenvectors, one per column, matching [`Self::traceless_eigenvalues`].
    pub fn traceless_coords(&self) -> &DMatrix<f64> {
        &self.traceless_coords
    }

    /// Traceless eigenvector `i` as a Hermitian matrix.
    pub fn eigenvector(&self, i: usize) -> CMatrix {
        let mut coeffs: Vec<f64> = self.traceless_coords.column(i).iter().copied().collect();
        coeffs.push(0.0);
        self.basis.reconstruct(&coeffs)
    }

    /// `H[d^2, d^2]`, the eigenvalue on `I/sqrt(d)` when it is an eigenvector.
    pub fn identity_eigenvalue(&self) -> f64 {
        let n = self.matrix.nrows();
        self.matrix[(n - 1, n - 1)]
    }

    /// `max_j |H[j, d^2]|` over `j < d^2`.
    pub fn identity_coupling(&self) -> f64 {
        let n = self.matrix.nrows();
        (0..n - 1)
            .map(|j| self.matrix[(j, n - 1)].abs())
            .fold(0.0, f64::max)
    }

    /// `max |H - H^T|`.
    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Applies the super-operator to a Hermitian matrix through the
    /// representation.
    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        let coords = self.basis.expand(a);
        let out = &self.matrix * coords;
        self.basis.reconstruct(out.as_slice())
    }

    /// `<A, H(B)>` through the representation.
    pub fn pairing(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        let ca = self.basis.expand(a);
        let cb = self.basis.expand(b);
        ca.dot(&(&self.matrix * cb))
    }

    pub fn to_json(&self) -> SuperOpJson {
        SuperOpJson {
            dim: self.dim(),
            matrix: self.matrix.transpose().iter().copied().collect(),
            eigenvalues: self.eigenvalues.iter().copied().collect(),
            traceless_eigenvalues: self.traceless_eigenvalues.iter().copied().collect(),
        }
    }
}

/// Wire form; `matrix` is row-major `d^2 x d^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperOpJson {
    pub dim: usize,
    pub matrix: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub traceless_eigenvalues: Vec<f64>,
}

fn check_basis(povm: &ExplicitPovm, basis: &HermitianBasis) -> Result<()> {
    if basis.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: basis.dim(),
        });
    }
    Ok(())
}

fn accumulate(
    povm: &ExplicitPovm,
    basis: &HermitianBasis,
    weight: impl Fn(&CMatrix) -> f64 + Sync,
) -> Result<DMatrix<f64>> {
    let n = basis.len();
    povm.elements()
        .par_iter()
        .enumerate()
        .map(|(y, e)| {
            let w = weight(e);
            if !(w > TOL_TRACE_ELEMENT) {
                return Err(Error::ZeroTraceElement { index: y });
            }
            let t = basis.expand(e);
            Ok(&t * t.transpose() / w)
        })
        .try_reduce(|| DMatrix::zeros(n, n), |a, b| Ok(a + b))
}

/// `H[j,k] = sum_y Tr[V_j E_y] Tr[V_k E_y] / Tr[E_y]`.
pub fn superop_from_povm(povm: &ExplicitPovm, basis: &HermitianBasis) -> Result<SuperOpMatrix> {
    check_basis(povm, basis)?;
    let m = accumulate(povm, basis, |e| trace(e).re)?;
    SuperOpMatrix::from_matrix(basis.clone(), m)
}

/// Variant with `d Tr[rho0 E_y]` in place of `Tr[E_y]`; equal to
/// [`superop_from_povm`] at `rho0 = I/d`.
pub fn superop_with_reference(
    povm: &ExplicitPovm,
    basis: &HermitianBasis,
    rho0: &DensityMatrix,
) -> Result<SuperOpMatrix> {
    check_basis(povm, basis)?;
    let d = povm.dim() as f64;
    let m = accumulate(povm, basis, |e| d * rho0.expectation(e))?;
    SuperOpMatrix::from_matrix(basis.clone(), m)
}

/// Entrywise mean of per-copy super-operators.
pub fn average_superop(povms: &[ExplicitPovm], basis: &HermitianBasis) -> Result<SuperOpMatrix> {
    if povms.is_empty() {
        return Err(Error::Empty("POVM list"));
    }
    let n = basis.len();
    let mut total = DMatrix::zeros(n, n);
    for p in povms {
        total += superop_from_povm(p, basis)?.matrix;
    }
    SuperOpMatrix::from_matrix(basis.clone(), total / povms.len() as f64)
}

/// `sum_y Tr[A E_y] E_y / Tr[E_y]`, evaluated directly on the elements.
pub fn apply_superop(povm: &ExplicitPovm, a: &CMatrix) -> CMatrix {
    let d = povm.dim();
    let mut out = CMatrix::zeros(d, d);
    for e in povm.elements() {
        let w = trace_product_real(a, e) / trace(e).re;
        out += e * c(w, 0.0);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub symmetry_residual: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `max |Tr[H(A)] - Tr[A]|` over random `A`.
    pub trace_preservation_residual: f64,
    /// `||H(I) - I||_F`.
    pub unitality_residual: f64,
    /// `|H[d^2,d^2] - 1|` together with the coupling of `I` to the traceless
    /// block.
    pub identity_eigen_residual: f64,
    /// `max_i |Tr V_i|` over traceless eigenvectors.
    pub traceless_residual: f64,
    /// `max |<A, H(B)>_matrix - <A, H(B)>_direct|` over random `A, B`.
    pub representation_residual: f64,
    pub passed: bool,
}

/// Self-adjointness, positivity, trace preservation, unitality and the
/// identity eigenvector, each within `1e-9`.
pub fn verify_channel_properties(
    s: &SuperOpMatrix,
    povm: &ExplicitPovm,
    trials: usize,
    rng: &mut SimRng,
) -> ChannelReport {
    let d = s.dim();
    let ident = CMatrix::identity(d, d);
    let mut tp: f64 = 0.0;
    let mut rep: f64 = 0.0;
    for _ in 0..trials {
        let a = random_hermitian(d, rng);
        let b = random_hermitian(d, rng);
        let ha = s.apply(&a);
        tp = tp.max((trace(&ha).re - trace(&a).re).abs());
        let direct = trace_product_real(&a, &apply_superop(povm, &b));
        rep = rep.max((s.pairing(&a, &b) - direct).abs());
    }
    let unitality = (s.apply(&ident) - &ident).norm();
    let id_resid = (s.identity_eigenvalue() - 1.0)
        .abs()
        .max(s.identity_coupling());
    let traceless = (0..d * d - 1)
        .map(|i| trace(&s.eigenvector(i)).norm())
        .fold(0.0, f64::max);
    let min = s.eigenvalues()[0];
    let max = s.eigenvalues()[d * d - 1];
    let sym = s.symmetry_residual();
    let passed = sym <= 1e-10
        && min >= -TOL_CHANNEL
        && max <= 1.0 + TOL_CHANNEL
        && tp <= TOL_CHANNEL
        && unitality <= TOL_CHANNEL
        && id_resid <= TOL_CHANNEL
        && traceless <= TOL_CHANNEL
        && rep <= TOL_CHANNEL;
    ChannelReport {
        symmetry_residual: sym,
        min_eigenvalue: min,
        max_eigenvalue: max,
        trace_preservation_residual: tp,
        unitality_residual: unitality,
        identity_eigen_residual: id_resid,
        traceless_residual: traceless,
        representation_residual: rep,
        passed,
    }
}

/// `16 alpha^2 / (1 - 4 alpha^2)^2`.
pub fn eigenvalue_sum_bound(alpha: f64) -> f64 {
    16.0 * alpha * alpha / (1.0 - 4.0 * alpha * alpha).powi(2)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSumReport {
    pub alpha: f64,
    pub sum: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Sum of the traceless eigenvalues against `16 alpha^2/(1 - 4 alpha^2)^2`.
pub fn eigenvalue_sum_check(s: &SuperOpMatrix, alpha: f64) -> EigenSumReport {
    let sum = s.traceless_eigenvalues().sum();
    let bound = eigenvalue_sum_bound(alpha);
    EigenSumReport {
        alpha,
        sum,
        bound,
        passed: sum <= bound + 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::build_mub_design;
    use crate::povm::GentlePovm;
    use crate::qmat::hermitian_basis;

    fn spectrum(s: &SuperOpMatrix) -> Vec<f64> {
        s.eigenvalues().iter().copied().collect()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn trivial_povm_keeps_only_identity() {
        for d in [2, 3] {
            let basis = hermitian_basis(d).unwrap();
            let s = superop_from_povm(&ExplicitPovm::trivial(d), &basis).unwrap();
            let mut want = vec![0.0; d * d - 1];
            want.push(1.0);
            assert!(close(&spectrum(&s), &want, 1e-12));
        }
    }

    #[test]
    fn computational_qubit_kills_x_and_y() {
        let basis = hermitian_basis(2).unwrap();
        let s = superop_from_povm(&ExplicitPovm::computational(2), &basis).unwrap();
        assert!(close(&spectrum(&s), &[0.0, 0.0, 1.0, 1.0], 1e-12));
        // traceless spectrum is {X: 0, Y: 0, Z: 1}
        assert!(close(
            s.traceless_eigenvalues().as_slice(),
            &[0.0, 0.0, 1.0],
            1e-12
        ));
        assert!((s.identity_eigenvalue() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn averaging() {
        let basis = hermitian_basis(2).unwrap();
        let design = build_mub_design(2).unwrap();
        let z = ExplicitPovm::computational(2);
        let x = ExplicitPovm::projective(&design.vectors()[2..4]).unwrap();
        let avg = average_superop(&[z.clone(), x], &basis).unwrap();
        assert!(close(&spectrum(&avg), &[0.0, 0.5, 0.5, 1.0], 1e-12));
        assert!(avg.symmetry_residual() < 1e-15);
        let single = superop_from_povm(&z, &basis).unwrap();
        let rep = average_superop(&[z.clone(), z.clone(), z], &basis).unwrap();
        assert!((single.matrix() - rep.matrix()).amax() < 1e-15);
        assert!(average_superop(&[], &basis).is_err());
    }

    #[test]
    fn channel_properties() {
        let mut rng = SimRng::new(2, 0);
        let basis = hermitian_basis(2).unwrap();
        let g = GentlePovm::new(build_mub_design(2).unwrap(), 0.1).unwrap();
        let gentle = ExplicitPovm::from_gentle(&g).unwrap();
        let s = superop_from_povm(&gentle, &basis).unwrap();
        let r = verify_channel_properties(&s, &gentle, 10, &mut rng);
        assert!(r.passed, "{r:?}");
        assert!(r.unitality_residual <= 1e-10);

        let rank_one = ExplicitPovm::rank_one_design(&build_mub_design(3).unwrap()).unwrap();
        let b3 = hermitian_basis(3).unwrap();
        let s = superop_from_povm(&rank_one, &b3).unwrap();
        assert!(verify_channel_properties(&s, &rank_one, 10, &mut rng).passed);

        let bad = gentle.with_scaled_element(5, 1.01);
        let s = superop_from_povm(&bad, &basis).unwrap();
        let r = verify_channel_properties(&s, &bad, 10, &mut rng);
        assert!(!r.passed && r.trace_preservation_residual > 1e-9, "{r:?}");
    }

    #[test]
    fn zero_trace_element_rejected() {
        let basis = hermitian_basis(2).unwrap();
        let povm =
            ExplicitPovm::unchecked(vec![CMatrix::identity(2, 2), CMatrix::zeros(2, 2)]).unwrap();
        assert!(matches!(
            superop_from_povm(&povm, &basis),
            Err(Error::ZeroTraceElement { index: 1 })
        ));
    }

    #[test]
    fn eigenvalue_sum_bound_values() {
        assert!((eigenvalue_sum_bound(0.1) - 0.16 / 0.9216).abs() < 1e-15);
        assert!((eigenvalue_sum_bound(0.25) - 16.0 * 0.0625 / 0.5625).abs() < 1e-12);
        let basis = hermitian_basis(2).unwrap();
        let g = GentlePovm::new(build_mub_design(2).unwrap(), 0.0).unwrap();
        let s = superop_from_povm(&ExplicitPovm::from_gentle(&g).unwrap(), &basis).unwrap();
        let r = eigenvalue_sum_check(&s, 0.0);
        assert!(r.sum.abs() < 1e-12 && r.passed);
        for alpha in [0.05, 0.1, 0.2, 0.3] {
            let g = GentlePovm::new(build_mub_design(2).unwrap(), alpha).unwrap();
            let s = superop_from_povm(&ExplicitPovm::from_gentle(&g).unwrap(), &basis).unwrap();
            assert!(eigenvalue_sum_check(&s, alpha).passed);
        }
    }

    #[test]
    fn non_uniform_reference_stays_self_adjoint() {
        let mut rng = SimRng::new(3, 0);
        let basis = hermitian_basis(2).unwrap();
        let g = GentlePovm::new(build_mub_design(2).unwrap(), 0.2).unwrap();
        let povm = ExplicitPovm::from_gentle(&g).unwrap();
        let rho0 = crate::qmat::random_density(2, &mut rng).unwrap();
        let s = superop_with_reference(&povm, &basis, &rho0).unwrap();
        assert!(s.symmetry_residual() < 1e-12);
        assert!(s.eigenvalues()[0] > -1e-12);
        let flat =
            superop_with_reference(&povm, &basis, &DensityMatrix::maximally_mixed(2).unwrap())
                .unwrap();
        let plain = superop_from_povm(&povm, &basis).unwrap();
        assert!((flat.matrix() - plain.matrix()).amax() < 1e-12);
    }

    #[test]
    fn json_is_row_major() {
        let basis = hermitian_basis(2).unwrap();
        let s = superop_from_povm(&ExplicitPovm::computational(2), &basis).unwrap();
        let j = s.to_json();
        assert_eq!(j.matrix.len(), 16);
        for r in 0..4 {
            for k in 0..4 {
                assert_eq!(j.matrix[r * 4 + k], s.matrix()[(r, k)]);
            }
        }
    }
}
