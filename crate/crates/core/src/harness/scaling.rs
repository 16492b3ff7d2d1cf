use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::AlternativeSpec;
use super::summary::CellSummary;
use super::sweep::Cell;
use crate::certify::SamplingMode;
use crate::error::{Error, Result};

/// Least-squares fit of `ln n* = intercept + slope ln d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn scaling_fit(points: &[(usize, f64)]) -> Result<ScalingFit> {
    let mut dims: Vec<usize> = points.iter().map(|p| p.0).collect();
    dims.sort_unstable();
    dims.dedup();
    if dims.len() < 3 {
        return Err(Error::Config(format!(
            "scaling fit needs at least 3 distinct dimensions, got {}",
            dims.len()
        )));
    }
    if let Some(&(_, n)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Domain {
            name: "n*",
            value: n,
            domain: "(0, inf)",
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(ScalingFit {
        slope,
        intercept,
        residual,
        points: points.to_vec(),
    })
}

/// Settings for the bisection over `n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchSettings {
    pub target: f64,
    pub trials: usize,
    pub seed: u64,
    pub sampling: SamplingMode,
    /// Stop once `hi / lo` drops below this.
    pub relative_tolerance: f64,
    pub start: u64,
    pub max_n: u64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            target: 1.0 / 3.0,
            trials: 400,
            seed: 0,
            sampling: SamplingMode::Counts,
            relative_tolerance: 1.03,
            start: 16,
            max_n: 1 << 32,
        }
    }
}

/// Smallest `n` whose empirical total error is at most the target, found by
/// doubling then bisection. Every `n` reuses the same trial seeds.
pub fn minimal_sample_size(
    d: usize,
    alpha: f64,
    epsilon: f64,
    alternative: AlternativeSpec,
    settings: &SearchSettings,
) -> Result<u64> {
    let cell = Cell::new(d, alpha, epsilon, alternative)?;
    let err = |n: u64| cell.total_error(settings.seed, n, settings.trials, settings.sampling);
    let mut lo = settings.start.max(2);
    if err(lo)? <= settings.target {
        return Ok(lo);
    }
    let mut hi = lo * 2;
    while err(hi)? > settings.target {
        lo = hi;
        hi *= 2;
        if hi > settings.max_n {
            return Err(Error::Config(format!(
                "total error stays above {} up to n = {}",
                settings.target, settings.max_n
            )));
        }
    }
    while hi as f64 / lo as f64 > settings.relative_tolerance && hi - lo > 1 {
        let mid = ((lo as f64) * (hi as f64)).sqrt().round() as u64;
        let mid = mid.clamp(lo + 1, hi - 1);
        if err(mid)? <= settings.target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `C = n* epsilon^2 alpha^2 / d^3` from a bisection at one dimension.
pub fn calibrate_constant(
    d: usize,
    alpha: f64,
    epsilon: f64,
    alternative: AlternativeSpec,
    settings: &SearchSettings,
) -> Result<f64> {
    let n = minimal_sample_size(d, alpha, epsilon, alternative, settings)?;
    Ok(n as f64 * epsilon * epsilon * alpha * alpha / (d as f64).powi(3))
}

/// `((alpha, epsilon), [(d, n*)])`.
pub type ScalingGroup = ((f64, f64), Vec<(usize, f64)>);

/// Per-`(alpha, epsilon)` group of summaries, the first `n` per dimension
/// reaching the target total error, interpolated log-linearly against the
/// largest smaller `n` that missed it.
pub fn minimal_n_from_summaries(rows: &[CellSummary], target: f64) -> Vec<ScalingGroup> {
    let mut groups: BTreeMap<(u64, u64), BTreeMap<usize, Vec<&CellSummary>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.alpha.to_bits(), r.epsilon.to_bits()))
            .or_default()
            .entry(r.d)
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((a, e), by_d)| {
            let points = by_d
                .into_iter()
                .filter_map(|(d, mut rs)| {
                    rs.sort_by_key(|r| r.n);
                    let hit = rs.iter().position(|r| r.total <= target)?;
                    if hit == 0 {
                        return Some((d, rs[0].n as f64));
                    }
                    let (below, above) = (rs[hit - 1], rs[hit]);
                    let frac = if below.total > above.total {
                        (below.total - target) / (below.total - above.total)
                    } else {
                        1.0
                    };
                    let ln = (below.n as f64).ln()
                        + frac * ((above.n as f64).ln() - (below.n as f64).ln());
                    Some((d, ln.exp()))
                })
                .collect();
            ((f64::from_bits(a), f64::from_bits(e)), points)
        })
        .collect()
}
