use std::f64::consts::PI;

use num_complex::Complex64;

use super::TwoDesign;
use crate::error::{Error, Result};
use crate::qmat::linalg::{c, CVector};

const MAX_PRIME: usize = 61;

// Symmetric matrices over GF(2) whose pairwise differences are all
// invertible. Each one yields a stabilizer basis; together with the
// computational basis they form a complete MUB set for d = 2^q.
const SPREAD_Q1: [[[u8; 1]; 1]; 2] = [[[0]], [[1]]];
const SPREAD_Q2: [[[u8; 2]; 2]; 4] = [
    [[0, 0], [0, 0]],
    [[0, 1], [1, 1]],
    [[1, 0], [0, 1]],
    [[1, 1], [1, 0]],
];
const SPREAD_Q3: [[[u8; 3]; 3]; 8] = [
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
    [[0, 1, 0], [1, 1, 0], [0, 0, 1]],
    [[0, 1, 1], [1, 0, 0], [1, 0, 1]],
    [[1, 0, 0], [0, 0, 1], [0, 1, 1]],
    [[1, 0, 1], [0, 1, 1], [1, 1, 1]],
    [[1, 1, 0], [1, 1, 1], [0, 1, 0]],
    [[1, 1, 1], [1, 0, 1], [1, 1, 0]],
];

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

pub fn is_supported_dim(d: usize) -> bool {
    d == 4 || d == 8 || (is_prime(d) && d <= MAX_PRIME)
}

/// All dimensions [`build_mub_design`] accepts, ascending.
pub fn supported_dims() -> Vec<usize> {
    (2..=MAX_PRIME).filter(|&d| is_supported_dim(d)).collect()
}

pub fn supported_dims_label() -> String {
    supported_dims()
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The `d + 1` mutually unbiased bases of `C^d`, computational basis first,
/// as a 2-design with `D = d(d + 1)` vectors.
pub fn build_mub_design(d: usize) -> Result<TwoDesign> {
    if !is_supported_dim(d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            supported: supported_dims_label(),
        });
    }
    let mut vectors = Vec::with_capacity(d * (d + 1));
    for j in 0..d {
        let mut e = CVector::zeros(d);
        e[j] = c(1.0, 0.0);
        vectors.push(e);
    }
    match d {
        2 => binary_bases(1, &flatten(&SPREAD_Q1), &mut vectors),
        4 => binary_bases(2, &flatten(&SPREAD_Q2), &mut vectors),
        8 => binary_bases(3, &flatten(&SPREAD_Q3), &mut vectors),
        _ => prime_bases(d, &mut vectors),
    }
    TwoDesign::new(d, vectors)
}

fn flatten<const Q: usize, const N: usize>(table: &[[[u8; Q]; Q]; N]) -> Vec<Vec<Vec<u8>>> {
    table
        .iter()
        .map(|s| s.iter().map(|row| row.to_vec()).collect())
        .collect()
}

// Basis k, vector j: components exp(2 pi i (k t^2 + j t)/p) / sqrt(p).
fn prime_bases(p: usize, out: &mut Vec<CVector>) {
    let norm = 1.0 / (p as f64).sqrt();
    for k in 0..p {
        for j in 0..p {
            out.push(CVector::from_fn(p, |t, _| {
                let phase = (k * t * t + j * t) % p;
                Complex64::from_polar(norm, 2.0 * PI * phase as f64 / p as f64)
            }));
        }
    }
}

// Basis S, vector b: components i^(t^T S t mod 4) (-1)^(b.t) / sqrt(2^q), with
// t read as a bit vector and t^T S t evaluated over the integers.
fn binary_bases(q: usize, spread: &[Vec<Vec<u8>>], out: &mut Vec<CVector>) {
    let d = 1usize << q;
    let norm = 1.0 / (d as f64).sqrt();
    let powers_of_i = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    let bit = |t: usize, k: usize| (t >> k) & 1;
    for s in spread {
        for b in 0..d {
            out.push(CVector::from_fn(d, |t, _| {
                let mut quad = 0usize;
                for k in 0..q {
                    for l in 0..q {
                        quad += bit(t, k) * s[k][l] as usize * bit(t, l);
                    }
                }
                let sign = if (b & t).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                powers_of_i[quad % 4] * (sign * norm)
            }));
        }
    }
}
