//! Lower-bound diagnostics: the averaged measurement super-operator, the
//! perturbation ensemble around the maximally mixed state, and chi-square
//! bounds on copies needed to detect it.

mod chi2;
mod ensemble;
mod explicit;
mod superop;

pub use chi2::{
    chi2_decoupled, conditioning_factor, lower_bound_sample_size, pairing_matrices,
    randomized_mu_sq_bound, BoundMode, Chi2Mode, Chi2Report,
};
pub use ensemble::{
    admissibility_stats, build_alternatives, AdmissibilityReport, AlternativeEnsemble,
    SelectionMode, C_CONSTANT,
};
pub use explicit::ExplicitPovm;
pub use superop::{
    apply_superop, average_superop, eigenvalue_sum_bound, eigenvalue_sum_check, superop_from_povm,
    superop_with_reference, verify_channel_properties, ChannelReport, EigenSumReport, SuperOpJson,
    SuperOpMatrix,
};
