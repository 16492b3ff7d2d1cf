use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sweep::{Label, TrialRecord};
use crate::error::{Error, Result};

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Error rates of one `(d, alpha, epsilon, n)` cell. The total-error interval
/// adds the endpoints of the two Wilson intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub d: usize,
    #[serde(rename = "D")]
    pub bits: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub n: u64,
    pub trials: usize,
    pub type1: f64,
    pub type2: f64,
    pub total: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Default)]
struct Tally {
    bits: usize,
    null: usize,
    null_reject: usize,
    alt: usize,
    alt_accept: usize,
}

/// Per-cell type-I, type-II and total error, cells in ascending order.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<CellSummary>> {
    if records.is_empty() {
        return Err(Error::Empty("records"));
    }
    let mut cells: BTreeMap<(usize, u64, u64, u64), Tally> = BTreeMap::new();
    for r in records {
        // positive floats order like their bit patterns
        let t = cells
            .entry((r.d, r.alpha.to_bits(), r.epsilon.to_bits(), r.n))
            .or_default();
        t.bits = r.bits;
        match r.label {
            Label::Null => {
                t.null += 1;
                t.null_reject += r.reject as usize;
            }
            Label::Alt => {
                t.alt += 1;
                t.alt_accept += !r.reject as usize;
            }
        }
    }
    Ok(cells
        .into_iter()
        .map(|((d, a, e, n), t)| {
            let rate = |k: usize, m: usize| if m == 0 { 0.0 } else { k as f64 / m as f64 };
            let type1 = rate(t.null_reject, t.null);
            let type2 = rate(t.alt_accept, t.alt);
            let (l1, h1) = wilson_interval(t.null_reject, t.null);
            let (l2, h2) = wilson_interval(t.alt_accept, t.alt);
            CellSummary {
                d,
                bits: t.bits,
                alpha: f64::from_bits(a),
                epsilon: f64::from_bits(e),
                n,
                trials: t.null.max(t.alt),
                type1,
                type2,
                total: type1 + type2,
                ci_low: l1 + l2,
                ci_high: h1 + h2,
            }
        })
        .collect())
}

/// CSV with header `d,D,alpha,epsilon,n,trials,type1,type2,total,ci_low,ci_high`.
pub fn write_summary_csv<W: Write>(out: W, rows: &[CellSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
