use rand::Rng;
use serde::Serialize;

use super::SuperOpMatrix;
use crate::error::{Error, Result};
use crate::qmat::linalg::{c, inner, spectral_decomp_unchecked, trace, trace_norm, CMatrix};
use crate::qmat::random::random_orthogonal;
use crate::qmat::SimRng;

/// Amplitude constant of the perturbation ensemble, `10 sqrt(2)`.
pub const C_CONSTANT: f64 = 14.142_135_623_730_951;

/// Which traceless directions the perturbations use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SelectionMode {
    /// Eigenvectors of the super-operator with the smallest eigenvalues.
    Fixed,
    /// A uniformly random orthonormal frame of the traceless subspace.
    Randomized,
}

/// `rho_nu = I/d + (c eps / sqrt(d D')) sum_i nu_i V_i` over sign vectors
/// `nu in {-1, 1}^{D'}`.
#[derive(Debug, Clone)]
pub struct AlternativeEnsemble {
    dim: usize,
    directions: Vec<CMatrix>,
    eigenvalues: Option<Vec<f64>>,
    epsilon: f64,
    c: f64,
}

impl AlternativeEnsemble {
    /// Checks only that the directions are Hermitian, traceless and
    /// orthonormal; no constraint ties `epsilon` to `c`.
    pub fn new(directions: Vec<CMatrix>, epsilon: f64, c: f64) -> Result<Self> {
        let dim = directions
            .first()
            .ok_or(Error::Empty("directions"))?
            .nrows();
        for (i, v) in directions.iter().enumerate() {
            crate::qmat::linalg::check_hermitian(v)?;
            if trace(v).norm() > 1e-10 {
                return Err(Error::Config(format!("direction {i} is not traceless")));
            }
            for (j, w) in directions.iter().enumerate().take(i + 1) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (inner(v, w).re - want).abs() > 1e-10 {
                    return Err(Error::Config(format!(
                        "directions {j} and {i} not orthonormal"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            directions,
            eigenvalues: None,
            epsilon,
            c,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D'`.
    pub fn count(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[CMatrix] {
        &self.directions
    }

    /// Super-operator eigenvalues of the directions, for fixed selection.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `c eps / sqrt(d D')`.
    pub fn amplitude(&self) -> f64 {
        self.c * self.epsilon / ((self.dim * self.count()) as f64).sqrt()
    }

    pub fn delta(&self, nu: &[i8]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (v, &s) in self.directions.iter().zip(nu) {
            out += v * c(s as f64, 0.0);
        }
        out * c(self.amplitude(), 0.0)
    }

    /// `I/d + Delta_nu`; not necessarily positive.
    pub fn rho(&self, nu: &[i8]) -> CMatrix {
        CMatrix::identity(self.dim, self.dim) * c(1.0 / self.dim as f64, 0.0) + self.delta(nu)
    }

    /// Whether `rho_nu` is a state at trace distance above `epsilon` from
    /// `I/d`.
    pub fn is_admissible(&self, nu: &[i8]) -> bool {
        let delta = self.delta(nu);
        let min = spectral_decomp_unchecked(&delta).min();
        let psd = min + 1.0 / self.dim as f64 >= -crate::qmat::linalg::TOL_PSD;
        psd && 0.5 * trace_norm(&delta) > self.epsilon
    }

    pub fn random_signs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i8> {
        (0..self.count())
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect()
    }
}

fn check_count(d: usize, count: usize) -> Result<()> {
    let lo = (d * d).div_ceil(2);
    if count < lo || count > d * d - 1 {
        return Err(Error::Config(format!(
            "perturbation count {count} outside [{lo}, {}] for d = {d}",
            d * d - 1
        )));
    }
    Ok(())
}

/// Builds the ensemble from a super-operator. Requires
/// `ceil(d^2/2) <= D' <= d^2 - 1` and `epsilon < 1/c^2`.
pub fn build_alternatives(
    s: &SuperOpMatrix,
    epsilon: f64,
    count: usize,
    mode: SelectionMode,
    rng: &mut SimRng,
) -> Result<AlternativeEnsemble> {
    let d = s.dim();
    check_count(d, count)?;
    let gate = 1.0 / (C_CONSTANT * C_CONSTANT);
    if !(epsilon > 0.0 && epsilon < gate) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1/c^2) with c = 10 sqrt(2)",
        });
    }
    let (directions, eigenvalues) = match mode {
        SelectionMode::Fixed => (
            (0..count).map(|i| s.eigenvector(i)).collect(),
            Some(
                s.traceless_eigenvalues()
                    .iter()
                    .take(count)
                    .copied()
                    .collect(),
            ),
        ),
        SelectionMode::Randomized => {
            let q = random_orthogonal(d * d - 1, rng);
            let dirs = (0..count)
                .map(|i| {
                    let mut coeffs: Vec<f64> = q.column(i).iter().copied().collect();
                    coeffs.push(0.0);
                    s.basis().reconstruct(&coeffs)
                })
                .collect();
            (dirs, None)
        }
    };
    let mut ens = AlternativeEnsemble::new(directions, epsilon, C_CONSTANT)?;
    ens.eigenvalues = eigenvalues;
    Ok(ens)
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub samples: usize,
    pub admissible: usize,
    pub fraction: f64,
    /// `1 - 2 e^{-d}`.
    pub lemma_bound: f64,
    /// `sqrt(b (1 - b) / samples)` at the lemma bound `b`.
    pub sigma: f64,
}

/// Fraction of uniformly drawn sign vectors giving admissible states.
pub fn admissibility_stats(
    ens: &AlternativeEnsemble,
    samples: usize,
    rng: &mut SimRng,
) -> AdmissibilityReport {
    let admissible = (0..samples)
        .filter(|_| {
            let nu = ens.random_signs(rng);
            ens.is_admissible(&nu)
        })
        .count();
    let bound = 1.0 - 2.0 * (-(ens.dim() as f64)).exp();
    AdmissibilityReport {
        samples,
        admissible,
        fraction: admissible as f64 / samples.max(1) as f64,
        lemma_bound: bound,
        sigma: (bound * (1.0 - bound) / samples.max(1) as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowerbound::{superop_from_povm, ExplicitPovm};
    use crate::qmat::hermitian_basis;

    fn superop(povm: &ExplicitPovm) -> SuperOpMatrix {
        superop_from_povm(povm, &hermitian_basis(povm.dim()).unwrap()).unwrap()
    }

    #[test]
    fn fixed_selection_picks_unseen_paulis() {
        let s = superop(&ExplicitPovm::computational(2));
        let mut rng = SimRng::new(0, 0);
        let ens = build_alternatives(&s, 0.001, 2, SelectionMode::Fixed, &mut rng).unwrap();
        // both directions lie in span{X, Y}/sqrt(2): no diagonal part
        for v in ens.directions() {
            assert!(v[(0, 0)].norm() < 1e-12 && v[(1, 1)].norm() < 1e-12);
        }
        assert_eq!(ens.eigenvalues().unwrap(), &[0.0, 0.0]);
    }

    #[test]
    fn deltas_are_traceless_with_fixed_norm_and_odd() {
        let mut rng = SimRng::new(1, 0);
        for d in [2, 3, 4] {
            let s = superop(&ExplicitPovm::computational(d));
            for mode in [SelectionMode::Fixed, SelectionMode::Randomized] {
                let count = (d * d).div_ceil(2);
                let ens = build_alternatives(&s, 0.004, count, mode, &mut rng).unwrap();
                for _ in 0..5 {
                    let nu = ens.random_signs(&mut rng);
                    let delta = ens.delta(&nu);
                    assert!(trace(&delta).norm() < 1e-12);
                    let want = C_CONSTANT * 0.004 / (d as f64).sqrt();
                    assert!((delta.norm() - want).abs() < 1e-10);
                    let neg: Vec<i8> = nu.iter().map(|x| -x).collect();
                    assert!((ens.delta(&neg) + &delta).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn domain_gates() {
        let s = superop(&ExplicitPovm::computational(3));
        let mut rng = SimRng::new(0, 0);
        assert!(build_alternatives(&s, 0.001, 4, SelectionMode::Fixed, &mut rng).is_err());
        assert!(build_alternatives(&s, 0.001, 9, SelectionMode::Fixed, &mut rng).is_err());
        assert!(build_alternatives(&s, 0.001, 5, SelectionMode::Fixed, &mut rng).is_ok());
        assert!(build_alternatives(&s, 0.01, 5, SelectionMode::Fixed, &mut rng).is_err());
        assert!(build_alternatives(&s, 0.0, 5, SelectionMode::Fixed, &mut rng).is_err());
    }

    #[test]
    fn admissibility_regimes() {
        let mut rng = SimRng::new(5, 0);
        let s = superop(&ExplicitPovm::computational(3));
        let ens = build_alternatives(&s, 1e-6, 8, SelectionMode::Fixed, &mut rng).unwrap();
        assert!(ens.is_admissible(&[1; 8]));
        let r = admissibility_stats(&ens, 2000, &mut rng);
        assert!(r.fraction >= r.lemma_bound - 3.0 * r.sigma);

        let wide = AlternativeEnsemble::new(ens.directions().to_vec(), 1.0, C_CONSTANT).unwrap();
        assert_eq!(admissibility_stats(&wide, 200, &mut rng).admissible, 0);
    }

    #[test]
    fn rejects_bad_directions() {
        let ident = CMatrix::identity(2, 2);
        assert!(AlternativeEnsemble::new(vec![ident], 0.1, 1.0).is_err());
        let s = superop(&ExplicitPovm::computational(2));
        let v = s.eigenvector(0);
        assert!(AlternativeEnsemble::new(vec![v.clone(), v], 0.1, 1.0).is_err());
    }
}
