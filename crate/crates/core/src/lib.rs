//! Simulation and verification toolkit for locally-gentle quantum state
//! certification.
//!
//! The crate builds a gentle POVM on top of a mutually-unbiased-bases 2-design,
//! samples it through its classical randomized-response equivalent, runs the
//! collision-statistic certification test, and exposes the super-operator and
//! chi-square machinery behind the matching lower bound.
//!
//! ```
//! use lgcert_core::{build_mub_design, Certifier, DensityMatrix, GentlePovm, SamplingMode, SimRng};
//!
//! let povm = GentlePovm::new(build_mub_design(2)?, 0.2)?;
//! let rho0 = DensityMatrix::maximally_mixed(2)?;
//! let test = Certifier::new(povm, &rho0, 0.3)?;
//! let mut rng = SimRng::new(7, 0);
//! let result = test.run(&DensityMatrix::basis_state(2, 0)?, 20_000, SamplingMode::Counts, &mut rng)?;
//! assert!(result.reject);
//! # Ok::<(), lgcert_core::Error>(())
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod designs;
pub mod error;
pub mod harness;
pub mod lowerbound;
pub mod povm;
pub mod qmat;

pub use certify::{
    counts_from_outcomes, run_certification, statistic_tn, threshold, Certifier, CountVector,
    SamplingMode, TestResult,
};
pub use designs::{build_mub_design, design_probabilities, verify_two_design, TwoDesign};
pub use error::{Error, Result};
pub use harness::{SweepConfig, TrialRecord};
pub use lowerbound::{ExplicitPovm, SuperOpMatrix};
pub use povm::{GentlePovm, Outcome, OutcomeSampler};
pub use qmat::{
    frobenius_dist, hermitian_basis, maximally_mixed, random_density, random_pure_state,
    spectral_decomp, trace_norm_dist, CMatrix, CVector, DensityMatrix, HermitianBasis, PureState,
    SimRng, Spectrum,
};
