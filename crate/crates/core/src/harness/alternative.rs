use super::config::AlternativeSpec;
use crate::error::{Error, Result};
use crate::lowerbound::{superop_from_povm, ExplicitPovm};
use crate::povm::{GentlePovm, MAX_DISTRIBUTION_BITS};
use crate::qmat::linalg::{c, spectral_decomp_unchecked, trace_norm, CMatrix};
use crate::qmat::{hermitian_basis, DensityMatrix, SimRng};

// Scales alternatives slightly past epsilon so round-off never lands them
// inside the null ball.
const SEPARATION_MARGIN: f64 = 1.0 + 1e-6;
const MAX_RESAMPLES: usize = 1000;

/// Draws alternative states for one `(d, epsilon)` cell.
#[derive(Debug, Clone)]
pub enum AlternativeGenerator {
    Fixed(DensityMatrix),
    RandomAdmissible {
        dim: usize,
        epsilon: f64,
        directions: Vec<CMatrix>,
    },
}

impl AlternativeGenerator {
    pub fn new(spec: AlternativeSpec, povm: &GentlePovm, epsilon: f64) -> Result<Self> {
        let d = povm.dim();
        match spec {
            AlternativeSpec::FixedPure => Ok(Self::Fixed(DensityMatrix::basis_state(d, 0)?)),
            AlternativeSpec::RandomAdmissible => Ok(Self::RandomAdmissible {
                dim: d,
                epsilon,
                directions: hermitian_basis(d)?.traceless().to_vec(),
            }),
            AlternativeSpec::WorstCaseEigendirection => {
                let v = least_sensitive_direction(povm)?;
                Ok(Self::Fixed(scaled_alternative(&v, epsilon).ok_or_else(|| {
                    Error::Config(format!(
                        "epsilon {epsilon} too large for a positive worst-case alternative at d = {d}"
                    ))
                })?))
            }
        }
    }

    pub fn draw(&self, rng: &mut SimRng) -> Result<DensityMatrix> {
        match self {
            Self::Fixed(rho) => Ok(rho.clone()),
            Self::RandomAdmissible {
                dim,
                epsilon,
                directions,
            } => {
                use rand::Rng;
                for _ in 0..MAX_RESAMPLES {
                    let mut delta = CMatrix::zeros(*dim, *dim);
                    for v in directions {
                        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        delta += v * c(s, 0.0);
                    }
                    if let Some(rho) = scaled_alternative(&delta, *epsilon) {
                        return Ok(rho);
                    }
                }
                Err(Error::Config(format!(
                    "no positive random alternative at epsilon {epsilon}, d = {dim}"
                )))
            }
        }
    }
}

/// `I/d + t delta` with `t` chosen for trace distance `epsilon` (times a
/// tiny margin); `None` if that state is not positive.
pub fn scaled_alternative(delta: &CMatrix, epsilon: f64) -> Option<DensityMatrix> {
    let d = delta.nrows();
    let t = SEPARATION_MARGIN * 2.0 * epsilon / trace_norm(delta);
    let scaled = delta * c(t, 0.0);
    if spectral_decomp_unchecked(&scaled).min() < -1.0 / d as f64 {
        return None;
    }
    let rho = CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0) + scaled;
    DensityMatrix::new(rho).ok()
}

/// Traceless eigenvector with the smallest eigenvalue of the gentle POVM's
/// super-operator; for `D > 20` the rank-one design measurement stands in.
pub fn least_sensitive_direction(povm: &GentlePovm) -> Result<CMatrix> {
    let basis = hermitian_basis(povm.dim())?;
    let explicit = if povm.bits() <= MAX_DISTRIBUTION_BITS {
        ExplicitPovm::from_gentle(povm)?
    } else {
        ExplicitPovm::rank_one_design(povm.design())?
    };
    Ok(superop_from_povm(&explicit, &basis)?.eigenvector(0))
}
