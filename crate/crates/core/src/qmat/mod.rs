//! Complex Hermitian matrix foundation: states, distances, spectral tools,
//! the generalized Gell-Mann operator basis and seedable randomness.

mod basis;
mod json;
pub mod linalg;
pub mod random;
mod state;

pub use basis::{hermitian_basis, HermitianBasis};
pub use json::MatrixJson;
pub use linalg::{spectral_decomp, CMatrix, CVector, Spectrum};
pub use random::{maximally_mixed, random_density, random_hermitian, random_pure_state, SimRng};
pub use state::{frobenius_dist, trace_norm_dist, DensityMatrix, PureState};
