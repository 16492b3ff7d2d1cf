use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alternative::AlternativeGenerator;
use super::config::{AlternativeSpec, SweepConfig};
use crate::certify::{Certifier, SamplingMode};
use crate::designs::build_mub_design;
use crate::error::Result;
use crate::povm::GentlePovm;
use crate::qmat::random::mix_seed;
use crate::qmat::{trace_norm_dist, DensityMatrix, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Null,
    Alt,
}

impl Label {
    fn code(self) -> u64 {
        match self {
            Label::Null => 0,
            Label::Alt => 1,
        }
    }
}

/// One certification run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub d: usize,
    #[serde(rename = "D")]
    pub bits: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub n: u64,
    pub trial: usize,
    pub label: Label,
    pub seed: u64,
    pub truth_distance: f64,
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub wall_ms: f64,
}

/// Identity of a record for resumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RecordKey {
    pub d: usize,
    pub alpha: u64,
    pub epsilon: u64,
    pub n: u64,
    pub trial: usize,
    pub label: Label,
}

impl TrialRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            d: self.d,
            alpha: self.alpha.to_bits(),
            epsilon: self.epsilon.to_bits(),
            n: self.n,
            trial: self.trial,
            label: self.label,
        }
    }

    /// Same record with the timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Seed of one trial: a hash of the base seed and the trial coordinates.
pub fn trial_seed(
    base: u64,
    d: usize,
    alpha: f64,
    epsilon: f64,
    n: u64,
    trial: usize,
    label: Label,
) -> u64 {
    mix_seed(&[
        base,
        d as u64,
        alpha.to_bits(),
        epsilon.to_bits(),
        n,
        trial as u64,
        label.code(),
    ])
}

/// A `(d, alpha, epsilon)` triple with its POVM, test and alternative
/// generator prepared once.
pub struct Cell {
    pub d: usize,
    pub alpha: f64,
    pub epsilon: f64,
    certifier: Certifier,
    rho0: DensityMatrix,
    alternative: AlternativeGenerator,
}

impl Cell {
    pub fn new(d: usize, alpha: f64, epsilon: f64, spec: AlternativeSpec) -> Result<Self> {
        let povm = GentlePovm::new(build_mub_design(d)?, alpha)?;
        let rho0 = DensityMatrix::maximally_mixed(d)?;
        let alternative = AlternativeGenerator::new(spec, &povm, epsilon)?;
        let certifier = Certifier::new(povm, &rho0, epsilon)?;
        Ok(Self {
            d,
            alpha,
            epsilon,
            certifier,
            rho0,
            alternative,
        })
    }

    pub fn bits(&self) -> usize {
        self.certifier.povm().bits()
    }

    /// Runs one trial; the alternative state (if random) and all outcomes
    /// come from the trial's own seed.
    pub fn run_trial(
        &self,
        base_seed: u64,
        n: u64,
        trial: usize,
        label: Label,
        sampling: SamplingMode,
    ) -> Result<TrialRecord> {
        let start = Instant::now();
        let seed = trial_seed(base_seed, self.d, self.alpha, self.epsilon, n, trial, label);
        let mut rng = SimRng::new(seed, 0);
        let rho = match label {
            Label::Null => self.rho0.clone(),
            Label::Alt => self.alternative.draw(&mut rng)?,
        };
        let result = self.certifier.run(&rho, n, sampling, &mut rng)?;
        Ok(TrialRecord {
            d: self.d,
            bits: self.bits(),
            alpha: self.alpha,
            epsilon: self.epsilon,
            n,
            trial,
            label,
            seed,
            truth_distance: trace_norm_dist(&rho, &self.rho0)?,
            statistic: result.statistic,
            threshold: result.threshold,
            reject: result.reject,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    }

    /// Empirical type-I plus type-II error at `n` over `trials` of each.
    pub fn total_error(
        &self,
        base_seed: u64,
        n: u64,
        trials: usize,
        sampling: SamplingMode,
    ) -> Result<f64> {
        let errors: Vec<bool> = (0..trials)
            .into_par_iter()
            .flat_map_iter(|t| [(t, Label::Null), (t, Label::Alt)])
            .map(|(t, label)| {
                let r = self.run_trial(base_seed, n, t, label, sampling)?;
                Ok(match label {
                    Label::Null => r.reject,
                    Label::Alt => !r.reject,
                })
            })
            .collect::<Result<_>>()?;
        Ok(errors.iter().filter(|&&e| e).count() as f64 / trials as f64)
    }
}

/// Reads NDJSON records; a truncated final line from an interrupted run is
/// ignored.
pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
    let mut out = Vec::with_capacity(lines.len());
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if i == last => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn append(writer: &mut BufWriter<File>, records: &[TrialRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Runs every cell of the sweep, `trials` null and `trials` alternative runs
/// per cell. With an output path, records already present there are skipped
/// and new ones are appended cell by cell. Returns all records of the sweep
/// in canonical order.
pub fn run_sweep(config: &SweepConfig, out: Option<&Path>) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let mut existing = Vec::new();
    if let Some(path) = out {
        if path.exists() {
            existing = read_records(path)?;
            // rewrite without any torn tail so appends start on a fresh line
            let mut w = BufWriter::new(File::create(path)?);
            append(&mut w, &existing)?;
        }
    }
    let done: HashSet<RecordKey> = existing.iter().map(TrialRecord::key).collect();
    let mut writer = match out {
        Some(path) => Some(BufWriter::new(
            OpenOptions::new().create(true).append(true).open(path)?,
        )),
        None => None,
    };

    let mut all = Vec::new();
    for &d in &config.dims {
        for &alpha in &config.alphas {
            for &epsilon in &config.epsilons {
                let cell = Cell::new(d, alpha, epsilon, config.alternative)?;
                for n in config.sample_size.sizes(d, alpha, epsilon) {
                    let tasks: Vec<(usize, Label)> = (0..config.trials)
                        .flat_map(|t| [(t, Label::Null), (t, Label::Alt)])
                        .collect();
                    let fresh: Vec<TrialRecord> = tasks
                        .par_iter()
                        .filter(|(t, label)| {
                            !done.contains(&RecordKey {
                                d,
                                alpha: alpha.to_bits(),
                                epsilon: epsilon.to_bits(),
                                n,
                                trial: *t,
                                label: *label,
                            })
                        })
                        .map(|&(t, label)| {
                            cell.run_trial(config.seed, n, t, label, config.sampling)
                        })
                        .collect::<Result<_>>()?;
                    if let Some(w) = writer.as_mut() {
                        append(w, &fresh)?;
                    }
                    all.extend(fresh);
                }
            }
        }
    }
    all.extend(existing);
    all.sort_by(|a, b| {
        canonical(a)
            .partial_cmp(&canonical(b))
            .expect("finite keys")
    });
    all.dedup_by(|a, b| a.key() == b.key());
    Ok(all)
}

fn canonical(r: &TrialRecord) -> (usize, f64, f64, u64, usize, u64) {
    (r.d, r.alpha, r.epsilon, r.n, r.trial, r.label.code())
}
