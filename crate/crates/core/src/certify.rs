//! The collision-statistic certification test on gentle-POVM outcomes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::designs::design_probabilities;
use crate::error::{Error, Result};
use crate::povm::{GentlePovm, Outcome, OutcomeSampler};
use crate::qmat::DensityMatrix;

/// Column sums `N_m` of `n` outcome bitstrings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountVector {
    counts: Vec<u64>,
    n: u64,
}

impl CountVector {
    pub fn new(counts: Vec<u64>, n: u64) -> Result<Self> {
        if let Some(&bad) = counts.iter().find(|&&k| k > n) {
            return Err(Error::Config(format!(
                "count {bad} exceeds sample size {n}"
            )));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn bits(&self) -> usize {
        self.counts.len()
    }
}

/// Counts the set bits per position; every outcome must have `bits` entries.
pub fn counts_from_outcomes(outcomes: &[Outcome], bits: usize) -> Result<CountVector> {
    let mut counts = vec![0u64; bits];
    for z in outcomes {
        if z.len() != bits {
            return Err(Error::OutcomeLength {
                expected: bits,
                found: z.len(),
            });
        }
        for (k, &b) in counts.iter_mut().zip(z.bits()) {
            *k += b as u64;
        }
    }
    Ok(CountVector {
        counts,
        n: outcomes.len() as u64,
    })
}

/// `T_n = sum_m (N_m - n q_m)^2 - N_m (1 - 2 q_m) - n q_m^2` with
/// `q_m = alpha p0(m) + beta`, `beta = (1 - alpha)/2`.
///
/// Its mean is `n(n-1) alpha^2 |p - p0|^2` when each bit `m` of every outcome
/// is 1 with probability `alpha p(m) + beta`.
pub fn statistic_tn(counts: &CountVector, alpha: f64, p0: &[f64]) -> Result<f64> {
    if counts.n < 2 {
        return Err(Error::TooFewSamples { n: counts.n });
    }
    if p0.len() != counts.bits() {
        return Err(Error::DimensionMismatch {
            expected: counts.bits(),
            found: p0.len(),
        });
    }
    let total: f64 = p0.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm: total });
    }
    let beta = 0.5 * (1.0 - alpha);
    let n = counts.n as f64;
    Ok(counts
        .counts
        .iter()
        .zip(p0)
        .map(|(&k, &p)| {
            let q = alpha * p + beta;
            let k = k as f64;
            (k - n * q).powi(2) - k * (1.0 - 2.0 * q) - n * q * q
        })
        .sum())
}

/// `c = n(n-1) alpha^2 epsilon^2 / (2 D d)`.
pub fn threshold(n: u64, alpha: f64, epsilon: f64, bits: usize, d: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewSamples { n });
    }
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1/2]",
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1]",
        });
    }
    let n = n as f64;
    Ok(n * (n - 1.0) * alpha * alpha * epsilon * epsilon / (2.0 * bits as f64 * d as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
}

impl TestResult {
    pub fn new(statistic: f64, threshold: f64) -> Self {
        Self {
            statistic,
            threshold,
            reject: statistic > threshold,
        }
    }
}

/// How the `n` outcomes are produced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Draw every bitstring through the two-stage chain.
    Outcomes,
    /// Draw the column sums directly from their exact joint law.
    #[default]
    Counts,
}

/// A test against a fixed null `rho0` at separation `epsilon`.
#[derive(Debug, Clone)]
pub struct Certifier {
    povm: GentlePovm,
    p0: Vec<f64>,
    epsilon: f64,
}

impl Certifier {
    pub fn new(povm: GentlePovm, rho0: &DensityMatrix, epsilon: f64) -> Result<Self> {
        let p0 = design_probabilities(povm.design(), rho0)?;
        if povm.alpha() <= 0.0 {
            return Err(Error::Domain {
                name: "alpha",
                value: povm.alpha(),
                domain: "(0, 1/2)",
            });
        }
        threshold(2, povm.alpha(), epsilon, povm.bits(), povm.dim())?;
        Ok(Self { povm, p0, epsilon })
    }

    pub fn povm(&self) -> &GentlePovm {
        &self.povm
    }

    pub fn null_probabilities(&self) -> &[f64] {
        &self.p0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn threshold(&self, n: u64) -> Result<f64> {
        threshold(
            n,
            self.povm.alpha(),
            self.epsilon,
            self.povm.bits(),
            self.povm.dim(),
        )
    }

    pub fn decide(&self, counts: &CountVector) -> Result<TestResult> {
        let t = statistic_tn(counts, self.povm.alpha(), &self.p0)?;
        Ok(TestResult::new(t, self.threshold(counts.n())?))
    }

    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        sampler: &OutcomeSampler,
        n: u64,
        mode: SamplingMode,
        rng: &mut R,
    ) -> Result<CountVector> {
        match mode {
            SamplingMode::Outcomes => {
                let mut counts = vec![0u64; self.povm.bits()];
                for _ in 0..n {
                    for (k, &b) in counts.iter_mut().zip(sampler.sample(rng).bits()) {
                        *k += b as u64;
                    }
                }
                CountVector::new(counts, n)
            }
            SamplingMode::Counts => CountVector::new(sampler.sample_counts(n, rng), n),
        }
    }

    /// Samples `n` copies of `rho` and applies the test.
    pub fn run<R: Rng + ?Sized>(
        &self,
        rho: &DensityMatrix,
        n: u64,
        mode: SamplingMode,
        rng: &mut R,
    ) -> Result<TestResult> {
        if n < 2 {
            return Err(Error::TooFewSamples { n });
        }
        let sampler = OutcomeSampler::new(&self.povm, rho)?;
        let counts = self.sample_counts(&sampler, n, mode, rng)?;
        self.decide(&counts)
    }

    /// `n(n-1) alpha^2 |p_rho - p0|^2`.
    pub fn expected_statistic(&self, rho: &DensityMatrix, n: u64) -> Result<f64> {
        let gap = self.sq_gap(rho)?;
        let a = self.povm.alpha();
        let n = n as f64;
        Ok(n * (n - 1.0) * a * a * gap)
    }

    /// `2 D n^2 + 5 n^3 alpha^2 |p_rho - p0|^2`.
    pub fn variance_bound(&self, rho: &DensityMatrix, n: u64) -> Result<f64> {
        let gap = self.sq_gap(rho)?;
        let a = self.povm.alpha();
        let n = n as f64;
        Ok(2.0 * self.povm.bits() as f64 * n * n + 5.0 * n.powi(3) * a * a * gap)
    }

    fn sq_gap(&self, rho: &DensityMatrix) -> Result<f64> {
        let p = design_probabilities(self.povm.design(), rho)?;
        Ok(p.iter().zip(&self.p0).map(|(a, b)| (a - b).powi(2)).sum())
    }
}

/// Draws `n` outcomes of `povm` on `rho_true` one by one and tests them
/// against `rho0`.
pub fn run_certification<R: Rng + ?Sized>(
    povm: &GentlePovm,
    rho_true: &DensityMatrix,
    rho0: &DensityMatrix,
    n: u64,
    epsilon: f64,
    rng: &mut R,
) -> Result<TestResult> {
    Certifier::new(povm.clone(), rho0, epsilon)?.run(rho_true, n, SamplingMode::Outcomes, rng)
}

/// One persisted certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationRow {
    pub d: usize,
    #[serde(rename = "D")]
    pub bits: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub n: u64,
    pub seed: u64,
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub truth_distance: f64,
}
