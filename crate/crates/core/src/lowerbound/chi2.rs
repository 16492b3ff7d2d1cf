use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::ensemble::C_CONSTANT;
use super::{AlternativeEnsemble, SuperOpMatrix};
use crate::error::{Error, Result};
use crate::qmat::SimRng;

/// Largest perturbation count accepted by exact enumeration.
pub const MAX_EXACT_DIRECTIONS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chi2Mode {
    /// Average over all `4^{D'}` sign-vector pairs.
    Exact,
    /// Average over the given number of sampled pairs.
    MonteCarlo { pairs: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Chi2Report {
    /// `E_{nu1,nu2}[prod_i (1 + H_i(nu1, nu2))] - 1`.
    pub chi2: f64,
    /// `(e^d / (e^d - 2))^2` from restricting to admissible sign vectors.
    pub conditioning_factor: f64,
    /// `factor * (chi2 + 1) - 1`.
    pub conditioned: f64,
    pub pairs: u64,
}

/// `(e^d / (e^d - 2))^2`.
pub fn conditioning_factor(d: usize) -> f64 {
    let e = (d as f64).exp();
    (e / (e - 2.0)).powi(2)
}

/// Per-copy matrices `G_i[a, b] = d <Delta-direction a, H_i(direction b)>`
/// scaled by the squared amplitude, so `H_i(nu1, nu2) = nu1^T G_i nu2`.
pub fn pairing_matrices(
    s_list: &[SuperOpMatrix],
    ens: &AlternativeEnsemble,
) -> Result<Vec<DMatrix<f64>>> {
    let first = s_list.first().ok_or(Error::Empty("super-operator list"))?;
    let d = first.dim();
    if ens.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ens.dim(),
        });
    }
    let coords: Vec<DVector<f64>> = ens
        .directions()
        .iter()
        .map(|v| first.basis().expand(v))
        .collect();
    let k = ens.count();
    let u = DMatrix::from_fn(first.basis().len(), k, |r, col| coords[col][r]);
    let scale = d as f64 * ens.amplitude().powi(2);
    s_list
        .iter()
        .map(|s| {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.dim(),
                });
            }
            Ok(u.transpose() * s.matrix() * &u * scale)
        })
        .collect()
}

fn signs(index: u64, k: usize) -> DVector<f64> {
    DVector::from_fn(k, |i, _| if (index >> i) & 1 == 1 { 1.0 } else { -1.0 })
}

fn pair_product(
    g: &[DMatrix<f64>],
    n: usize,
    nu1: &DVector<f64>,
    nu2: &DVector<f64>,
) -> Result<f64> {
    let term = |gi: &DMatrix<f64>| {
        let t = 1.0 + nu1.dot(&(gi * nu2));
        if t <= 0.0 {
            Err(Error::InvalidRegime { value: t })
        } else {
            Ok(t)
        }
    };
    if g.len() == 1 {
        return Ok(term(&g[0])?.powi(n as i32));
    }
    g.iter().try_fold(1.0, |prod, gi| Ok(prod * term(gi)?))
}

/// Chi-square divergence between the sign-averaged alternative and the null
/// for `n` product measurements. `s_list` holds one super-operator per copy,
/// or a single one reused for all copies; the null is `I/d`.
pub fn chi2_decoupled(
    s_list: &[SuperOpMatrix],
    ens: &AlternativeEnsemble,
    n: usize,
    mode: Chi2Mode,
    rng: &mut SimRng,
) -> Result<Chi2Report> {
    if s_list.len() != 1 && s_list.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s_list.len(),
        });
    }
    let g = pairing_matrices(s_list, ens)?;
    let k = ens.count();
    let (mean, pairs) = match mode {
        Chi2Mode::Exact => {
            if k > MAX_EXACT_DIRECTIONS {
                return Err(Error::TooManyOutcomes {
                    count: k,
                    limit: MAX_EXACT_DIRECTIONS,
                });
            }
            let total = 1u64 << k;
            let mut sum = 0.0;
            for a in 0..total {
                let nu1 = signs(a, k);
                for b in 0..total {
                    sum += pair_product(&g, n, &nu1, &signs(b, k))?;
                }
            }
            (sum / (total * total) as f64, total * total)
        }
        Chi2Mode::MonteCarlo { pairs } => {
            let mut sum = 0.0;
            for _ in 0..pairs {
                let nu1 =
                    DVector::from_iterator(k, ens.random_signs(rng).into_iter().map(f64::from));
                let nu2 =
                    DVector::from_iterator(k, ens.random_signs(rng).into_iter().map(f64::from));
                sum += pair_product(&g, n, &nu1, &nu2)?;
            }
            (sum / pairs.max(1) as f64, pairs as u64)
        }
    };
    let factor = conditioning_factor(ens.dim());
    Ok(Chi2Report {
        chi2: mean - 1.0,
        conditioning_factor: factor,
        conditioned: factor * mean - 1.0,
        pairs,
    })
}

/// Which closed-form bound drives [`lower_bound_sample_size`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundMode {
    /// Directions matched to the least-sensitive eigenvectors, `D = d^2/2`.
    Fixed,
    /// Directions blind to the measurement, `D = d^2 - 1`.
    Randomized,
}

/// Bound on `sum_i mu_i^2` for blind directions: the largest of the three
/// forms the derivation passes through, `256 alpha^4` over `(1 - 4 alpha)^4`,
/// `(1 + 4 alpha^2)^4` and `(1 - 4 alpha^2)^4`.
pub fn randomized_mu_sq_bound(alpha: f64) -> f64 {
    let num = 256.0 * alpha.powi(4);
    [
        (1.0 - 4.0 * alpha).powi(4),
        (1.0 + 4.0 * alpha * alpha).powi(4),
        (1.0 - 4.0 * alpha * alpha).powi(4),
    ]
    .into_iter()
    .map(|den| num / den)
    .fold(0.0, f64::max)
}

/// Sample size at which the closed-form chi-square bound `e^X - 1` reaches
/// `4/9`, the level below which no test has error under `1/3`.
///
/// Fixed: `X = 512 n^2 c^4 eps^4 alpha^4 / (2 D^2 d^2)` with `D = d^2/2`.
/// Randomized: `X = (1/2) n^2 c^4 eps^4 S / D^2` with `D = d^2 - 1` and `S`
/// from [`randomized_mu_sq_bound`].
pub fn lower_bound_sample_size(d: usize, epsilon: f64, alpha: f64, mode: BoundMode) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "need d >= 2",
        });
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1/2)",
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1)",
        });
    }
    let target = (13.0f64 / 9.0).ln();
    let c2 = C_CONSTANT * C_CONSTANT;
    let df = d as f64;
    let e2 = epsilon * epsilon;
    Ok(match mode {
        BoundMode::Fixed => {
            let big_d = df * df / 2.0;
            big_d * df * (2.0 * target / 512.0).sqrt() / (c2 * e2 * alpha * alpha)
        }
        BoundMode::Randomized => {
            let big_d = df * df - 1.0;
            big_d * (2.0 * target / randomized_mu_sq_bound(alpha)).sqrt() / (c2 * e2)
        }
    })
}
