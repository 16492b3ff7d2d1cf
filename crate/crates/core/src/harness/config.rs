use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certify::SamplingMode;
use crate::designs::{is_supported_dim, supported_dims_label};
use crate::error::{Error, Result};

/// How many copies each cell uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SampleSizeRule {
    /// The same list of `n` for every `(d, alpha, epsilon)`.
    Explicit { values: Vec<u64> },
    /// `n = ceil(C d^3 / (epsilon^2 alpha^2))`.
    Rate { constant: f64 },
}

impl SampleSizeRule {
    pub fn sizes(&self, d: usize, alpha: f64, epsilon: f64) -> Vec<u64> {
        match self {
            SampleSizeRule::Explicit { values } => values.clone(),
            SampleSizeRule::Rate { constant } => {
                vec![rate_sample_size(*constant, d, alpha, epsilon)]
            }
        }
    }
}

/// `max(2, ceil(C d^3 / (epsilon^2 alpha^2)))`.
pub fn rate_sample_size(constant: f64, d: usize, alpha: f64, epsilon: f64) -> u64 {
    let n = constant * (d as f64).powi(3) / (epsilon * epsilon * alpha * alpha);
    (n.ceil() as u64).max(2)
}

/// Generator for the alternative state of each alternative trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlternativeSpec {
    /// `|0><0|`.
    FixedPure,
    /// `I/d + t sum_i nu_i V_i` over all traceless basis directions with
    /// fresh random signs per trial, `t` set so the trace distance is
    /// `epsilon`.
    #[default]
    RandomAdmissible,
    /// `I/d + t V` with `V` the least-sensitive traceless eigenvector of the
    /// averaged super-operator.
    WorstCaseEigendirection,
}

fn default_trials() -> usize {
    100
}

/// A sweep over `(d, alpha, epsilon, n)` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub sample_size: SampleSizeRule,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub alternative: AlternativeSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampling: SamplingMode,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.alphas.is_empty() || self.epsilons.is_empty() {
            return Err(Error::Config(
                "dims, alphas and epsilons must be non-empty".into(),
            ));
        }
        for &d in &self.dims {
            if !is_supported_dim(d) {
                return Err(Error::UnsupportedDimension {
                    dim: d,
                    supported: supported_dims_label(),
                });
            }
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 0.5) {
                return Err(Error::Domain {
                    name: "alpha",
                    value: a,
                    domain: "(0, 1/2)",
                });
            }
        }
        for &e in &self.epsilons {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Domain {
                    name: "epsilon",
                    value: e,
                    domain: "(0, 1)",
                });
            }
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        match &self.sample_size {
            SampleSizeRule::Explicit { values } => {
                if values.is_empty() {
                    return Err(Error::Config(
                        "explicit sample sizes must be non-empty".into(),
                    ));
                }
                if let Some(&n) = values.iter().find(|&&n| n < 2) {
                    return Err(Error::TooFewSamples { n });
                }
            }
            SampleSizeRule::Rate { constant } => {
                if !(*constant > 0.0 && constant.is_finite()) {
                    return Err(Error::Domain {
                        name: "constant",
                        value: *constant,
                        domain: "(0, inf)",
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
dims = [2, 3]
alphas = [0.1, 0.2]
epsilons = [0.3]
trials = 50
seed = 7
sampling = "outcomes"
output = "records.ndjson"

[sample_size]
rule = "rate"
constant = 1.5

[alternative]
kind = "worst-case-eigendirection"
"#;

    #[test]
    fn parses_full_example() {
        let cfg = SweepConfig::from_toml(FULL).unwrap();
        assert_eq!(cfg.dims, vec![2, 3]);
        assert_eq!(cfg.sampling, SamplingMode::Outcomes);
        assert_eq!(cfg.alternative, AlternativeSpec::WorstCaseEigendirection);
        assert_eq!(cfg.sample_size, SampleSizeRule::Rate { constant: 1.5 });
        assert_eq!(cfg.sample_size.sizes(2, 0.1, 0.3), vec![13334]);
    }

    #[test]
    fn defaults_and_explicit_sizes() {
        let cfg = SweepConfig::from_toml(
            "dims=[2]\nalphas=[0.1]\nepsilons=[0.3]\n[sample_size]\nrule=\"explicit\"\nvalues=[100, 200]\n",
        )
        .unwrap();
        assert_eq!(cfg.trials, 100);
        assert_eq!(cfg.alternative, AlternativeSpec::RandomAdmissible);
        assert_eq!(cfg.sampling, SamplingMode::Counts);
        assert_eq!(cfg.sample_size.sizes(5, 0.2, 0.1), vec![100, 200]);
    }

    #[test]
    fn validation_errors() {
        let base = "alphas=[0.1]\nepsilons=[0.3]\n[sample_size]\nrule=\"explicit\"\nvalues=[100]\n";
        let err = SweepConfig::from_toml(&format!("dims=[6]\n{base}")).unwrap_err();
        match err {
            Error::UnsupportedDimension { dim, supported } => {
                assert_eq!(dim, 6);
                assert!(supported.starts_with("2, 3, 4, 5, 7, 8"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(SweepConfig::from_toml(&format!("dims=[2]\ntrials=0\n{base}")).is_err());
        assert!(SweepConfig::from_toml(
            "dims=[2]\nalphas=[0.5]\nepsilons=[0.3]\n[sample_size]\nrule=\"rate\"\nconstant=1\n"
        )
        .is_err());
        assert!(SweepConfig::from_toml(
            "dims=[2]\nalphas=[0.1]\nepsilons=[1.0]\n[sample_size]\nrule=\"rate\"\nconstant=1\n"
        )
        .is_err());
        assert!(SweepConfig::from_toml(&format!("dims=[2]\nbogus=1\n{base}")).is_err());
    }
}
