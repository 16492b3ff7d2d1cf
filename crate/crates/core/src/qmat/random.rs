use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, StandardNormal};

use super::linalg::{c, projector, CMatrix, CVector};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};

/// Seedable generator addressed by `(seed, stream)`; equal pairs give equal
/// sequences.
#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha12Rng,
    seed: u64,
    stream: u64,
}

impl SimRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            inner,
            seed,
            stream,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// An independent generator for a sub-task, keyed by `key`.
    pub fn fork(&self, key: u64) -> Self {
        Self::new(mix_seed(&[self.seed, self.stream, key]), key)
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic hash of a sequence of words, used to derive per-trial seeds.
pub fn mix_seed(words: &[u64]) -> u64 {
    words.iter().fold(0x243f_6a88_85a3_08d3u64, |acc, &w| {
        splitmix(acc ^ splitmix(w))
    })
}

fn check_dim(d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "need d >= 1",
        });
    }
    Ok(())
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    check_dim(d)?;
    loop {
        let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
        if v.norm() > 1e-300 {
            return PureState::normalized(v);
        }
    }
}

/// Mixture of `d` Haar-random pure states with flat Dirichlet weights.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(d)?;
    let weights: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(d, d);
    for w in weights {
        let psi = random_pure_state(d, rng)?;
        m += projector(psi.amplitudes()) * c(w / total, 0.0);
    }
    // exact Hermitian symmetrization against round-off
    let m = (&m + m.adjoint()) * c(0.5, 0.0);
    let tr = super::linalg::trace(&m).re;
    DensityMatrix::new(m * c(1.0 / tr, 0.0))
}

pub fn maximally_mixed(d: usize) -> Result<DensityMatrix> {
    DensityMatrix::maximally_mixed(d)
}

/// GUE-style random Hermitian matrix with unit-variance entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-random orthogonal `n x n` matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> nalgebra::DMatrix<f64> {
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
