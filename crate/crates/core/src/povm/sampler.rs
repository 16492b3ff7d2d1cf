use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Binomial;

use super::{GentlePovm, Outcome};
use crate::designs::design_probabilities;
use crate::error::{Error, Result};
use crate::qmat::DensityMatrix;

/// Two-stage sampler for one `(povm, rho)` pair: draw `m ~ p_rho`, then
/// randomize each bit of `e_m` independently.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
    beta: f64,
    keep: f64,
}

impl OutcomeSampler {
    pub fn new(povm: &GentlePovm, rho: &DensityMatrix) -> Result<Self> {
        let probs = design_probabilities(povm.design(), rho)?;
        let index = WeightedIndex::new(&probs)
            .map_err(|e| Error::Config(format!("design probabilities unusable: {e}")))?;
        Ok(Self {
            probs,
            index,
            beta: povm.beta(),
            keep: povm.kernel().keep(),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn bits(&self) -> usize {
        self.probs.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Outcome {
        let m = self.index.sample(rng);
        let bits = (0..self.bits())
            .map(|j| rng.random_bool(if j == m { self.keep } else { self.beta }))
            .collect();
        Outcome::new(bits)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Outcome> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Column sums of `n` outcomes drawn in distribution without forming
    /// them: `K ~ Multinomial(n, p)`, then independently
    /// `N_j = Bin(K_j, 1 - beta) + Bin(n - K_j, beta)`.
    pub fn sample_counts<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Vec<u64> {
        let mut remaining = n;
        let mut mass = 1.0;
        let mut hits = Vec::with_capacity(self.bits());
        for (j, &p) in self.probs.iter().enumerate() {
            let k = if j + 1 == self.bits() || remaining == 0 {
                remaining
            } else {
                let q = (p / mass).clamp(0.0, 1.0);
                binomial(remaining, q, rng)
            };
            hits.push(k);
            remaining -= k;
            mass -= p;
        }
        hits.into_iter()
            .map(|k| binomial(k, self.keep, rng) + binomial(n - k, self.beta, rng))
            .collect()
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p in (0,1)").sample(rng)
}

/// One outcome of `povm` on `rho`.
pub fn sample_outcome<R: Rng + ?Sized>(
    povm: &GentlePovm,
    rho: &DensityMatrix,
    rng: &mut R,
) -> Result<Outcome> {
    Ok(OutcomeSampler::new(povm, rho)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::build_mub_design;
    use crate::qmat::{DensityMatrix, SimRng};

    #[test]
    fn bit_marginals_match_attenuated_probabilities() {
        let povm = GentlePovm::new(build_mub_design(2).unwrap(), 0.2).unwrap();
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let sampler = OutcomeSampler::new(&povm, &rho).unwrap();
        let mut rng = SimRng::new(31, 0);
        let n = 100_000;
        let mut ones = [0u64; 6];
        for _ in 0..n {
            for (j, &b) in sampler.sample(&mut rng).bits().iter().enumerate() {
                ones[j] += b as u64;
            }
        }
        for (j, &k) in ones.iter().enumerate() {
            let q = 0.2 * sampler.probabilities()[j] + povm.beta();
            let sigma = (q * (1.0 - q) / n as f64).sqrt();
            let got = k as f64 / n as f64;
            assert!(
                (got - q).abs() < 3.0 * sigma + 1e-12,
                "bit {j}: {got} vs {q}"
            );
        }
    }

    #[test]
    fn count_sampler_matches_outcome_sampler_in_mean() {
        let povm = GentlePovm::new(build_mub_design(3).unwrap(), 0.3).unwrap();
        let rho = DensityMatrix::basis_state(3, 1).unwrap();
        let sampler = OutcomeSampler::new(&povm, &rho).unwrap();
        let mut rng = SimRng::new(4, 2);
        let reps = 4000;
        let n = 50;
        let mut mean = [0.0; 12];
        for _ in 0..reps {
            for (j, k) in sampler.sample_counts(n, &mut rng).into_iter().enumerate() {
                assert!(k <= n);
                mean[j] += k as f64 / reps as f64;
            }
        }
        for (j, m) in mean.iter().enumerate() {
            let q = 0.3 * sampler.probabilities()[j] + povm.beta();
            let sigma = (n as f64 * q * (1.0 - q) / reps as f64).sqrt();
            assert!((m - n as f64 * q).abs() < 4.0 * sigma, "bit {j}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let povm = GentlePovm::new(build_mub_design(2).unwrap(), 0.1).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let a: Vec<_> = {
            let mut rng = SimRng::new(77, 1);
            (0..10)
                .map(|_| sample_outcome(&povm, &rho, &mut rng).unwrap())
                .collect()
        };
        let b: Vec<_> = {
            let mut rng = SimRng::new(77, 1);
            (0..10)
                .map(|_| sample_outcome(&povm, &rho, &mut rng).unwrap())
                .collect()
        };
        assert_eq!(a, b);
    }
}
