//! The gentle POVM built from a 2-design: outcome bitstrings, element
//! materialization, the randomized-response sampler and the audits.

mod audit;
mod duality;
mod io;
mod sampler;

use std::fmt;
use std::str::FromStr;

use crate::designs::TwoDesign;
use crate::error::{Error, Result};
use crate::qmat::linalg::{c, psd_sqrt, spectral_decomp_unchecked, trace_product_real, CMatrix};
use crate::qmat::DensityMatrix;

pub use audit::{
    gentleness_audit, kantorovich_gentleness_bound, log_eigen_ratio, privacy_audit,
    privacy_of_elements, pure_disturbance, AuditConfig, GentlenessReport, KantorovichReport,
    OutcomeSpec, PrivacyReport, StateKind,
};
pub use duality::{duality_convert, Duality};
pub use io::{read_outcomes, write_outcomes, DesignRef, PovmDescriptor};
pub use sampler::{sample_outcome, OutcomeSampler};

/// Outcome enumeration above this many bits is refused.
pub const MAX_EXACT_BITS: usize = 24;
/// Full outcome distributions are only built up to this many bits.
pub const MAX_DISTRIBUTION_BITS: usize = 20;
/// Conditioning on outcomes whose probability is below this fraction of the
/// element's largest eigenvalue is refused.
pub const TOL_PROB: f64 = 1e-15;

/// A bitstring `z` in `{0,1}^D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    bits: Vec<bool>,
}

impl Outcome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// The unit vector `e_m`.
    pub fn one_hot(m: usize, len: usize) -> Self {
        let mut z = Self::zeros(len);
        z.bits[m] = true;
        z
    }

    /// Bit `j` of `index` becomes bit `j` of the outcome.
    pub fn from_index(index: u64, len: usize) -> Self {
        Self {
            bits: (0..len).map(|j| (index >> j) & 1 == 1).collect(),
        }
    }

    pub fn to_index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as u64) << j))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits[j]
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid outcome character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Outcome::new)
    }
}

/// Per-bit randomized response: the reported bit agrees with the one-hot
/// input with probability `e^{delta/2}/(e^{delta/2}+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RapporKernel {
    delta: f64,
}

impl RapporKernel {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Domain {
                name: "delta",
                value: delta,
                domain: "[0, inf)",
            });
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `beta = 1/(e^{delta/2}+1)`, the probability of reporting a 1 off the
    /// input position.
    pub fn beta(&self) -> f64 {
        1.0 / ((0.5 * self.delta).exp() + 1.0)
    }

    /// `1 - beta`, the probability of reporting a 1 at the input position.
    pub fn keep(&self) -> f64 {
        1.0 / (1.0 + (-0.5 * self.delta).exp())
    }

    /// `ln(1 - beta)`, evaluated without cancellation.
    pub fn log_keep(&self) -> f64 {
        -(-0.5 * self.delta).exp().ln_1p()
    }

    /// `ln Q(z | m)`.
    pub fn log_likelihood(&self, z: &Outcome, m: usize) -> f64 {
        let dist = (z.weight() + 1) as f64 - 2.0 * z.bit(m) as u8 as f64;
        z.len() as f64 * self.log_keep() - 0.5 * self.delta * dist
    }

    pub fn likelihood(&self, z: &Outcome, m: usize) -> f64 {
        self.log_likelihood(z, m).exp()
    }
}

/// Which completeness computation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletenessMode {
    /// Sum every element; `D <= 24`.
    Exact,
    /// Closed-form binomial sum of the element weights.
    Analytic,
}

/// The family `E_{delta,z} = keep^D (d/D) sum_m e^{-(delta/2)|z - e_m|_1} |v_m><v_m|`,
/// held implicitly as its design and parameter.
#[derive(Debug, Clone)]
pub struct GentlePovm {
    design: TwoDesign,
    alpha: f64,
    kernel: RapporKernel,
}

impl GentlePovm {
    /// `alpha` in `[0, 1/2)`; sets `delta = 4 artanh(alpha)`.
    pub fn new(design: TwoDesign, alpha: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&alpha) {
            return Err(Error::Domain {
                name: "alpha",
                value: alpha,
                domain: "[0, 1/2)",
            });
        }
        let kernel = RapporKernel::new(4.0 * alpha.atanh())?;
        Ok(Self {
            design,
            alpha,
            kernel,
        })
    }

    pub fn design(&self) -> &TwoDesign {
        &self.design
    }

    pub fn dim(&self) -> usize {
        self.design.dim()
    }

    /// `D`, the number of outcome bits.
    pub fn bits(&self) -> usize {
        self.design.count()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.kernel.delta()
    }

    pub fn beta(&self) -> f64 {
        self.kernel.beta()
    }

    pub fn kernel(&self) -> &RapporKernel {
        &self.kernel
    }

    fn check_outcome(&self, z: &Outcome) -> Result<()> {
        if z.len() != self.bits() {
            return Err(Error::OutcomeLength {
                expected: self.bits(),
                found: z.len(),
            });
        }
        Ok(())
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// Coefficient of `|v_m><v_m|` in `E_z`, for every `m`; this is
    /// `(d/D) Q(z|m)`.
    pub fn element_weights(&self, z: &Outcome) -> Result<Vec<f64>> {
        self.check_outcome(z)?;
        let scale = (self.dim() as f64 / self.bits() as f64).ln();
        Ok((0..self.bits())
            .map(|m| (scale + self.kernel.log_likelihood(z, m)).exp())
            .collect())
    }

    pub fn povm_element(&self, z: &Outcome) -> Result<CMatrix> {
        let w = self.element_weights(z)?;
        let d = self.dim();
        let mut e = CMatrix::zeros(d, d);
        for (m, wm) in w.into_iter().enumerate() {
            e += self.design.projector(m) * c(wm, 0.0);
        }
        Ok(e)
    }

    /// `M_z = sqrt(E_z)`.
    pub fn measurement_operator(&self, z: &Outcome) -> Result<CMatrix> {
        psd_sqrt(&self.povm_element(z)?)
    }

    /// `Tr[rho E_z]` without materializing `E_z`.
    pub fn outcome_probability(&self, rho: &DensityMatrix, z: &Outcome) -> Result<f64> {
        self.check_state(rho)?;
        let w = self.element_weights(z)?;
        let ex = self.design.expectations(rho.matrix());
        Ok(w.iter().zip(&ex).map(|(a, b)| a * b).sum())
    }

    /// Residual of `sum_z E_z = I`.
    ///
    /// Exact mode enumerates all `2^D` outcomes, accumulating each element's
    /// projector weights before forming the matrix sum; analytic mode returns
    /// `|keep^D (1 + e^{-delta/2})^D - 1| sqrt(d)`.
    pub fn completeness_check(&self, mode: CompletenessMode) -> Result<f64> {
        let d = self.dim();
        let nb = self.bits();
        match mode {
            CompletenessMode::Analytic => {
                // keep^D ((e^{-delta/2}+1)^{D-1} + (e^{-delta/2}+1)^{D-1} e^{-delta/2}),
                // evaluated in the log domain
                let k = &self.kernel;
                let half = (-0.5 * k.delta()).exp();
                let log_tail = (nb - 1) as f64 * half.ln_1p();
                let log_scalar = nb as f64 * k.log_keep() + log_tail + half.ln_1p();
                Ok(log_scalar.exp_m1().abs() * (d as f64).sqrt())
            }
            CompletenessMode::Exact => {
                if nb > MAX_EXACT_BITS {
                    return Err(Error::TooManyOutcomes {
                        count: nb,
                        limit: MAX_EXACT_BITS,
                    });
                }
                use rayon::prelude::*;
                let coeffs = (0..1u64 << nb)
                    .into_par_iter()
                    .fold(
                        || vec![0.0; nb],
                        |mut acc, idx| {
                            let z = Outcome::from_index(idx, nb);
                            let w = self.element_weights(&z).expect("length matches");
                            for (a, x) in acc.iter_mut().zip(w) {
                                *a += x;
                            }
                            acc
                        },
                    )
                    .reduce(
                        || vec![0.0; nb],
                        |mut a, b| {
                            for (x, y) in a.iter_mut().zip(b) {
                                *x += y;
                            }
                            a
                        },
                    );
                let mut total = CMatrix::zeros(d, d);
                for (m, w) in coeffs.into_iter().enumerate() {
                    total += self.design.projector(m) * c(w, 0.0);
                }
                Ok((total - CMatrix::identity(d, d)).norm())
            }
        }
    }

    /// `M_z rho M_z / Tr[rho E_z]`.
    pub fn post_measurement_state(
        &self,
        rho: &DensityMatrix,
        z: &Outcome,
    ) -> Result<DensityMatrix> {
        self.check_state(rho)?;
        let e = self.povm_element(z)?;
        let spec = spectral_decomp_unchecked(&e);
        let prob = trace_product_real(rho.matrix(), &e);
        if !(prob > TOL_PROB * spec.max()) {
            return Err(Error::NegligibleOutcome { probability: prob });
        }
        let m = spec.map(|x| x.max(0.0).sqrt());
        let post = &m * rho.matrix() * &m;
        let post = (&post + post.adjoint()) * c(0.5 / prob, 0.0);
        let tr = crate::qmat::linalg::trace(&post).re;
        DensityMatrix::new(post * c(1.0 / tr, 0.0))
    }

    /// Exact law of the two-stage chain over all `2^D` outcomes, indexed by
    /// [`Outcome::to_index`].
    pub fn chain_distribution(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check_state(rho)?;
        self.check_distribution_size()?;
        let p = crate::designs::design_probabilities(&self.design, rho)?;
        let nb = self.bits();
        Ok((0..1u64 << nb)
            .map(|idx| {
                let z = Outcome::from_index(idx, nb);
                p.iter()
                    .enumerate()
                    .map(|(m, pm)| pm * self.kernel.likelihood(&z, m))
                    .sum()
            })
            .collect())
    }

    /// `z -> Tr[rho E_z]` over all `2^D` outcomes, with each `E_z`
    /// materialized.
    pub fn trace_distribution(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check_state(rho)?;
        self.check_distribution_size()?;
        let nb = self.bits();
        (0..1u64 << nb)
            .map(|idx| {
                let e = self.povm_element(&Outcome::from_index(idx, nb))?;
                Ok(trace_product_real(rho.matrix(), &e))
            })
            .collect()
    }

    fn check_distribution_size(&self) -> Result<()> {
        if self.bits() > MAX_DISTRIBUTION_BITS {
            return Err(Error::TooManyOutcomes {
                count: self.bits(),
                limit: MAX_DISTRIBUTION_BITS,
            });
        }
        Ok(())
    }

    /// Every element, indexed by [`Outcome::to_index`]; `D <= 20`.
    pub fn materialize(&self) -> Result<Vec<CMatrix>> {
        self.check_distribution_size()?;
        let nb = self.bits();
        (0..1u64 << nb)
            .map(|idx| self.povm_element(&Outcome::from_index(idx, nb)))
            .collect()
    }
}
