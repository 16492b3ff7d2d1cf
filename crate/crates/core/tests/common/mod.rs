//! Reference computations shared by the integration and acceptance tests.
//! Everything here works from raw matrices and probabilities, not from the
//! library's own shortcuts.

#![allow(dead_code)]

use lgcert_core::lowerbound::AlternativeEnsemble;
use lgcert_core::qmat::linalg::{c, trace, trace_product_real, CMatrix};
use lgcert_core::{DensityMatrix, Outcome, TwoDesign};

/// `P(z) = sum_m p(m) prod_j P(z_j | m)` with `p(m) = (d/D) <v_m|rho|v_m>`,
/// bit `m` set with probability `e^{delta/2}/(e^{delta/2}+1)` and the rest
/// with `1/(e^{delta/2}+1)`.
pub fn chain_oracle(design: &TwoDesign, delta: f64, rho: &DensityMatrix) -> Vec<f64> {
    let d = design.dim() as f64;
    let nb = design.count();
    let p: Vec<f64> = design
        .vectors()
        .iter()
        .map(|v| d / nb as f64 * v.dotc(&(rho.matrix() * v)).re)
        .collect();
    let on = (delta / 2.0).exp() / ((delta / 2.0).exp() + 1.0);
    let off = 1.0 / ((delta / 2.0).exp() + 1.0);
    (0..1u64 << nb)
        .map(|idx| {
            let z = Outcome::from_index(idx, nb);
            (0..nb)
                .map(|m| {
                    let lik: f64 = (0..nb)
                        .map(|j| {
                            let q = if j == m { on } else { off };
                            if z.bit(j) {
                                q
                            } else {
                                1.0 - q
                            }
                        })
                        .product();
                    p[m] * lik
                })
                .sum()
        })
        .collect()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn all_signs(k: usize) -> Vec<Vec<i8>> {
    (0..1u32 << k)
        .map(|idx| {
            (0..k)
                .map(|i| if (idx >> i) & 1 == 1 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

/// Chi-square divergence between `E_nu P_{rho_nu}^{(x) n}` and
/// `P_{I/d}^{(x) n}` for the product POVM with the given elements.
///
/// Enumerates the joint outcome space `Y^n` outright when it has at most
/// `joint_limit` points; otherwise uses independence across copies to write
/// the second moment as a product of per-copy sums.
pub fn brute_force_chi2(
    elements: &[CMatrix],
    ens: &AlternativeEnsemble,
    n: usize,
    joint_limit: usize,
) -> f64 {
    let d = elements[0].nrows() as f64;
    let p0: Vec<f64> = elements.iter().map(|e| trace(e).re / d).collect();
    let signs = all_signs(ens.count());
    let p_nu: Vec<Vec<f64>> = signs
        .iter()
        .map(|nu| {
            let rho = ens.rho(nu);
            elements
                .iter()
                .map(|e| trace_product_real(&rho, e))
                .collect()
        })
        .collect();
    let ny = elements.len();
    let joint = (ny as f64).powi(n as i32);
    if joint <= joint_limit as f64 {
        let total = ny.pow(n as u32);
        let mut chi = -1.0;
        let mut ys = vec![0usize; n];
        for idx in 0..total {
            let mut rem = idx;
            for y in ys.iter_mut() {
                *y = rem % ny;
                rem /= ny;
            }
            let null: f64 = ys.iter().map(|&y| p0[y]).product();
            let mix: f64 = p_nu
                .iter()
                .map(|p| ys.iter().map(|&y| p[y]).product::<f64>())
                .sum::<f64>()
                / p_nu.len() as f64;
            chi += mix * mix / null;
        }
        chi
    } else {
        let mut acc = 0.0;
        for a in &p_nu {
            for b in &p_nu {
                let per_copy: f64 = (0..ny).map(|y| a[y] * b[y] / p0[y]).sum();
                acc += per_copy.powi(n as i32);
            }
        }
        acc / (p_nu.len() * p_nu.len()) as f64 - 1.0
    }
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    mean_and_se(xs).1.powi(2) * xs.len() as f64
}

/// `I/d` as a bare matrix.
pub fn flat(d: usize) -> CMatrix {
    CMatrix::identity(d, d) * c(1.0 / d as f64, 0.0)
}
