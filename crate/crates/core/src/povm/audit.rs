use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{GentlePovm, Outcome};
use crate::error::{Error, Result};
use crate::qmat::linalg::{c, spectral_decomp_unchecked, CMatrix, CVector, TOL_PSD};
use crate::qmat::{random_density, random_pure_state, trace_norm_dist, PureState, SimRng};

/// How outcomes are chosen for an audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutcomeSpec {
    /// Every `z` in `{0,1}^D`.
    All,
    /// `count` uniformly random bitstrings plus all one-hot and weight-0/`D`
    /// outcomes.
    Sample(usize),
    /// `All` when `D <= 16`, otherwise `Sample(4096)`.
    Auto,
}

const AUTO_ENUMERATE_BITS: usize = 16;
const AUTO_SAMPLE: usize = 4096;

impl OutcomeSpec {
    pub fn outcomes(self, bits: usize, rng: &mut SimRng) -> Result<Vec<Outcome>> {
        match self {
            OutcomeSpec::All => {
                if bits > super::MAX_EXACT_BITS {
                    return Err(Error::TooManyOutcomes {
                        count: bits,
                        limit: super::MAX_EXACT_BITS,
                    });
                }
                Ok((0..1u64 << bits)
                    .map(|i| Outcome::from_index(i, bits))
                    .collect())
            }
            OutcomeSpec::Auto if bits <= AUTO_ENUMERATE_BITS => {
                OutcomeSpec::All.outcomes(bits, rng)
            }
            OutcomeSpec::Auto => OutcomeSpec::Sample(AUTO_SAMPLE).outcomes(bits, rng),
            OutcomeSpec::Sample(count) => {
                let mut out: Vec<Outcome> = (0..bits).map(|m| Outcome::one_hot(m, bits)).collect();
                out.push(Outcome::zeros(bits));
                out.push(Outcome::new(vec![true; bits]));
                out.extend(
                    (0..count)
                        .map(|_| Outcome::new((0..bits).map(|_| rng.random_bool(0.5)).collect())),
                );
                Ok(out)
            }
        }
    }
}

/// Ensemble sizes for [`gentleness_audit`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditConfig {
    pub pure_states: usize,
    pub mixed_states: usize,
    /// Outcomes tried per mixed state, drawn from the audit outcome set.
    pub mixed_outcomes: usize,
    pub outcomes: OutcomeSpec,
    /// Add, for every audited outcome, the extremal state of its measurement
    /// operator and the operator's eigenvectors.
    pub structured_states: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            pure_states: 1000,
            mixed_states: 100,
            mixed_outcomes: 64,
            outcomes: OutcomeSpec::Auto,
            structured_states: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateKind {
    Haar,
    Extremal,
    Eigenvector,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct GentlenessReport {
    pub alpha: f64,
    /// `tanh(delta/4)`, the guarantee for positive square-root operators.
    pub bound: f64,
    pub max_pure: f64,
    pub max_mixed: f64,
    pub max_distance: f64,
    pub argmax_kind: StateKind,
    pub argmax_outcome: String,
    pub states_checked: usize,
    pub outcomes_checked: usize,
    pub passed: bool,
}

/// `1 - |<psi|M|psi>|^2 / <psi|M^2|psi>`, the squared trace distance between
/// `psi` and its normalized image under Hermitian `M`.
pub fn pure_disturbance(m: &CMatrix, psi: &CVector) -> f64 {
    // squared norm of the part of M psi orthogonal to psi, relative to |M psi|^2
    let mpsi = m * psi;
    let along = psi.dotc(&mpsi);
    let perp = &mpsi - psi * along;
    (perp.norm_squared() / mpsi.norm_squared()).min(1.0)
}

fn extremal_state(values: &nalgebra::DVector<f64>, vectors: &CMatrix) -> CVector {
    let n = values.len();
    let (lo, hi) = (values[0].max(0.0), values[n - 1].max(0.0));
    let v1 = vectors.column(0).into_owned();
    let vd = vectors.column(n - 1).into_owned();
    (v1 * c(hi.sqrt(), 0.0) + vd * c(lo.sqrt(), 0.0)) * c(1.0 / (lo + hi).sqrt(), 0.0)
}

/// Largest trace distance between a state and its post-measurement state
/// over an ensemble of Haar pure states, structured pure states and random
/// mixed states.
pub fn gentleness_audit(
    povm: &GentlePovm,
    config: &AuditConfig,
    rng: &mut SimRng,
) -> Result<GentlenessReport> {
    let d = povm.dim();
    let outcomes = config.outcomes.outcomes(povm.bits(), rng)?;
    let operators: Vec<(CMatrix, Spectrum2)> = outcomes
        .par_iter()
        .map(|z| {
            let spec = spectral_decomp_unchecked(&povm.povm_element(z)?);
            let sqrt = spec.map(|x| x.max(0.0).sqrt());
            Ok((sqrt, (spec.values.map(|x| x.max(0.0).sqrt()), spec.vectors)))
        })
        .collect::<Result<_>>()?;

    let haar: Vec<CVector> = (0..config.pure_states)
        .map(|_| random_pure_state(d, rng).map(|p| p.amplitudes().clone()))
        .collect::<Result<_>>()?;

    let mut best = (0.0f64, StateKind::Haar, 0usize);
    let consider = |dist: f64, kind: StateKind, idx: usize, best: &mut (f64, StateKind, usize)| {
        if dist > best.0 {
            *best = (dist, kind, idx);
        }
    };

    let per_outcome: Vec<(f64, usize)> = operators
        .par_iter()
        .map(|(m, _)| {
            haar.iter()
                .map(|psi| pure_disturbance(m, psi).sqrt())
                .fold((0.0, 0), |acc, x| if x > acc.0 { (x, 0) } else { acc })
        })
        .collect();
    for (i, (dist, _)) in per_outcome.iter().enumerate() {
        consider(*dist, StateKind::Haar, i, &mut best);
    }

    let mut states_checked = haar.len();
    if config.structured_states {
        for (i, (m, (values, vectors))) in operators.iter().enumerate() {
            let ext = extremal_state(values, vectors);
            consider(
                pure_disturbance(m, &ext).sqrt(),
                StateKind::Extremal,
                i,
                &mut best,
            );
            for k in 0..d {
                let v = vectors.column(k).into_owned();
                consider(
                    pure_disturbance(m, &v).sqrt(),
                    StateKind::Eigenvector,
                    i,
                    &mut best,
                );
            }
        }
        states_checked += outcomes.len() * (d + 1);
    }
    let max_pure = best.0;

    let mut max_mixed: f64 = 0.0;
    let mut mixed_arg = 0usize;
    for _ in 0..config.mixed_states {
        let rho = random_density(d, rng)?;
        for _ in 0..config.mixed_outcomes.min(outcomes.len()) {
            let i = rng.random_range(0..outcomes.len());
            let post = povm.post_measurement_state(&rho, &outcomes[i])?;
            let dist = trace_norm_dist(&rho, &post)?;
            if dist > max_mixed {
                max_mixed = dist;
                mixed_arg = i;
            }
        }
    }
    states_checked += config.mixed_states;
    if max_mixed > best.0 {
        best = (max_mixed, StateKind::Mixed, mixed_arg);
    }

    let bound = (povm.delta() / 4.0).tanh();
    Ok(GentlenessReport {
        alpha: povm.alpha(),
        bound,
        max_pure,
        max_mixed,
        max_distance: best.0,
        argmax_kind: best.1,
        argmax_outcome: outcomes[best.2].to_string(),
        states_checked,
        outcomes_checked: outcomes.len(),
        passed: best.0 <= bound + 1e-9,
    })
}

type Spectrum2 = (nalgebra::DVector<f64>, CMatrix);

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyReport {
    pub delta: f64,
    pub max_log_ratio: f64,
    pub argmax_outcome: Option<String>,
    pub outcomes_checked: usize,
    pub passed: bool,
}

/// `ln(lambda_max / lambda_min)`; infinite when the element is singular.
pub fn log_eigen_ratio(e: &CMatrix) -> f64 {
    let spec = spectral_decomp_unchecked(e);
    let (lo, hi) = (spec.min(), spec.max());
    if hi <= 0.0 || lo <= TOL_PSD * hi {
        return f64::INFINITY;
    }
    (hi / lo).ln()
}

/// Largest log eigenvalue ratio across the given elements, checked against
/// `delta`.
pub fn privacy_of_elements(elements: &[CMatrix], delta: f64) -> PrivacyReport {
    let ratios: Vec<f64> = elements.par_iter().map(log_eigen_ratio).collect();
    let (arg, max) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold(
            (None, 0.0f64),
            |acc, (i, r)| if r > acc.1 { (Some(i), r) } else { acc },
        );
    PrivacyReport {
        delta,
        max_log_ratio: max,
        argmax_outcome: arg.map(|i| i.to_string()),
        outcomes_checked: elements.len(),
        passed: max <= delta + 1e-9,
    }
}

/// `max_z ln(lambda_max(E_z)/lambda_min(E_z))` over the chosen outcomes.
pub fn privacy_audit(
    povm: &GentlePovm,
    outcomes: OutcomeSpec,
    rng: &mut SimRng,
) -> Result<PrivacyReport> {
    let zs = outcomes.outcomes(povm.bits(), rng)?;
    let elements = zs
        .par_iter()
        .map(|z| povm.povm_element(z))
        .collect::<Result<Vec<_>>>()?;
    let mut report = privacy_of_elements(&elements, povm.delta());
    report.argmax_outcome = report
        .argmax_outcome
        .and_then(|i| i.parse::<usize>().ok())
        .map(|i| zs[i].to_string());
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct KantorovichReport {
    /// `1 - |<psi|M|psi>|^2 / <psi|M^2|psi>` at the given state.
    pub lhs: f64,
    /// `((lambda_max - lambda_min)/(lambda_max + lambda_min))^2`.
    pub rhs: f64,
    /// The left side evaluated at the extremal state.
    pub extremal_lhs: f64,
    pub holds: bool,
    pub extremal_tight: bool,
}

/// Kantorovich-type bound on the disturbance of `psi` under `m`, and its
/// attainment at `(sqrt(l_d) v_1 + sqrt(l_1) v_d)/sqrt(l_1 + l_d)`.
pub fn kantorovich_gentleness_bound(m: &CMatrix, psi: &PureState) -> Result<KantorovichReport> {
    crate::qmat::linalg::check_hermitian(m)?;
    if psi.dim() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: psi.dim(),
        });
    }
    let spec = spectral_decomp_unchecked(m);
    let (lo, hi) = (spec.min(), spec.max());
    if lo <= TOL_PSD {
        return Err(Error::Singular { min_eigenvalue: lo });
    }
    let rhs = ((hi - lo) / (hi + lo)).powi(2);
    let lhs = pure_disturbance(m, psi.amplitudes());
    let ext = extremal_state(&spec.values, &spec.vectors);
    let extremal_lhs = pure_disturbance(m, &ext);
    Ok(KantorovichReport {
        lhs,
        rhs,
        extremal_lhs,
        holds: lhs <= rhs + 1e-10,
        extremal_tight: (extremal_lhs - rhs).abs() <= 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::build_mub_design;
    use crate::qmat::linalg::{projector, psd_sqrt};
    use crate::qmat::{random_hermitian, DensityMatrix};

    fn povm(d: usize, alpha: f64) -> GentlePovm {
        GentlePovm::new(build_mub_design(d).unwrap(), alpha).unwrap()
    }

    #[test]
    fn closed_form_disturbance_matches_post_measurement_state() {
        let p = povm(2, 0.2);
        let mut rng = SimRng::new(3, 3);
        for idx in [0u64, 9, 33, 63] {
            let z = Outcome::from_index(idx, 6);
            let m = p.measurement_operator(&z).unwrap();
            let psi = random_pure_state(2, &mut rng).unwrap();
            let rho = DensityMatrix::from_pure(&psi);
            let post = p.post_measurement_state(&rho, &z).unwrap();
            let direct = trace_norm_dist(&rho, &post).unwrap();
            let closed = pure_disturbance(&m, psi.amplitudes()).sqrt();
            assert!((closed - direct).abs() < 1e-9, "{closed} vs {direct}");
        }
    }

    #[test]
    fn zero_alpha_disturbs_nothing() {
        let mut rng = SimRng::new(1, 1);
        let cfg = AuditConfig {
            pure_states: 50,
            mixed_states: 5,
            ..AuditConfig::default()
        };
        let r = gentleness_audit(&povm(2, 0.0), &cfg, &mut rng).unwrap();
        assert!(r.max_distance < 1e-12);
        let pr = privacy_audit(&povm(2, 0.0), OutcomeSpec::All, &mut rng).unwrap();
        assert!(pr.max_log_ratio.abs() < 1e-12);
    }

    #[test]
    fn qubit_audit_respects_alpha_and_mixed_states_do_not_exceed_pure() {
        let mut rng = SimRng::new(2, 0);
        let cfg = AuditConfig {
            pure_states: 300,
            mixed_states: 200,
            ..AuditConfig::default()
        };
        for alpha in [0.05, 0.1, 0.2] {
            let r = gentleness_audit(&povm(2, alpha), &cfg, &mut rng).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.max_mixed <= r.max_pure + 1e-9);
            assert_eq!(r.outcomes_checked, 64);
        }
    }

    #[test]
    fn audit_is_monotone_in_alpha() {
        let cfg = AuditConfig {
            pure_states: 50,
            mixed_states: 0,
            ..AuditConfig::default()
        };
        let mut last = 0.0;
        for alpha in [0.02, 0.05, 0.1, 0.2, 0.3] {
            let mut rng = SimRng::new(6, 0);
            let r = gentleness_audit(&povm(2, alpha), &cfg, &mut rng).unwrap();
            assert!(r.max_distance >= last);
            last = r.max_distance;
        }
    }

    #[test]
    fn privacy_holds_and_rank_one_fails() {
        let mut rng = SimRng::new(0, 0);
        let p = povm(2, 0.1);
        let r = privacy_audit(&p, OutcomeSpec::All, &mut rng).unwrap();
        assert!(r.passed && r.max_log_ratio <= p.delta());
        let e0 = projector(&build_mub_design(2).unwrap().vectors()[0]);
        let bad = privacy_of_elements(&[e0], p.delta());
        assert!(bad.max_log_ratio.is_infinite() && !bad.passed);
    }

    #[test]
    fn kantorovich_cases() {
        let ident = CMatrix::identity(3, 3);
        let psi = PureState::basis(3, 0).unwrap();
        let r = kantorovich_gentleness_bound(&ident, &psi).unwrap();
        assert!(r.lhs.abs() < 1e-14 && r.rhs.abs() < 1e-14);

        let mut rng = SimRng::new(10, 0);
        for _ in 0..20 {
            let h = random_hermitian(3, &mut rng);
            let pd = &h * h.adjoint() + CMatrix::identity(3, 3) * c(0.1, 0.0);
            let psi = random_pure_state(3, &mut rng).unwrap();
            let r = kantorovich_gentleness_bound(&pd, &psi).unwrap();
            assert!(r.holds && r.extremal_tight, "{r:?}");
        }
        let singular = projector(&PureState::basis(2, 0).unwrap().amplitudes().clone());
        assert!(matches!(
            kantorovich_gentleness_bound(&singular, &PureState::basis(2, 1).unwrap()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn extremal_state_saturates_element_bound() {
        // disturbance at the extremal state of sqrt(E) equals
        // (sqrt(l_max) - sqrt(l_min)) / (sqrt(l_max) + sqrt(l_min)) with l of E
        let p = povm(3, 0.2);
        let z = Outcome::from_index(0b1010_0110_0001, 12);
        let e = p.povm_element(&z).unwrap();
        let spec = spectral_decomp_unchecked(&e);
        let (lo, hi) = (spec.min().sqrt(), spec.max().sqrt());
        let m = psd_sqrt(&e).unwrap();
        let ext = extremal_state(&spec.values.map(|x| x.sqrt()), &spec.vectors);
        let got = pure_disturbance(&m, &ext).sqrt();
        assert!((got - (hi - lo) / (hi + lo)).abs() < 1e-9);
    }
}
