use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lgcert_core::harness::{
    minimal_n_from_summaries, minimal_sample_size, read_records, run_sweep, scaling_fit, summarize,
    write_summary_csv, AlternativeSpec, SearchSettings,
};
use lgcert_core::lowerbound::{
    eigenvalue_sum_check, lower_bound_sample_size, superop_from_povm, verify_channel_properties,
    BoundMode,
};
use lgcert_core::povm::{
    gentleness_audit, privacy_audit, AuditConfig, CompletenessMode, OutcomeSpec,
    MAX_DISTRIBUTION_BITS, MAX_EXACT_BITS,
};
use lgcert_core::{
    build_mub_design, hermitian_basis, verify_two_design, Certifier, DensityMatrix, ExplicitPovm,
    GentlePovm, SamplingMode, SimRng, SweepConfig,
};

/// Certification of quantum states with gentle, private measurements.
#[derive(Parser)]
#[command(name = "lgcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the 2-design identities of the basis design in dimension d.
    VerifyDesign {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Completeness, gentleness and privacy audit of the gentle POVM.
    AuditPovm {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        /// Enumerate every outcome instead of a sampled subset.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 1000)]
        pure_states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the test once on a state against I/d (or --null).
    Certify {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        n: u64,
        /// `mixed`, `pure0`, or a path to a density-matrix JSON file.
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "mixed")]
        null: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Sampling::Outcomes)]
        sampling: Sampling,
    },
    /// Super-operator of the gentle POVM, its channel properties and the
    /// lower-bound sample sizes.
    AnalyzeSuperop {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.004)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a sweep from a TOML config, appending NDJSON records.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Records file; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-cell summary CSV here instead of stdout.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Fit the exponent of d in the minimal sample size from sweep records.
    Scaling {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        target: f64,
    },
    /// Bisect the minimal n at one dimension and report C = n eps^2 alpha^2 / d^3.
    Calibrate {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 400)]
        trials: usize,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        target: f64,
        #[arg(long, value_enum, default_value_t = Alternative::RandomAdmissible)]
        alternative: Alternative,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampling {
    Outcomes,
    Counts,
}

impl From<Sampling> for SamplingMode {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Outcomes => SamplingMode::Outcomes,
            Sampling::Counts => SamplingMode::Counts,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Alternative {
    FixedPure,
    RandomAdmissible,
    WorstCaseEigendirection,
}

impl From<Alternative> for AlternativeSpec {
    fn from(a: Alternative) -> Self {
        match a {
            Alternative::FixedPure => AlternativeSpec::FixedPure,
            Alternative::RandomAdmissible => AlternativeSpec::RandomAdmissible,
            Alternative::WorstCaseEigendirection => AlternativeSpec::WorstCaseEigendirection,
        }
    }
}

fn load_state(spec: &str, d: usize) -> anyhow::Result<DensityMatrix> {
    let rho = match spec {
        "mixed" => DensityMatrix::maximally_mixed(d)?,
        "pure0" => DensityMatrix::basis_state(d, 0)?,
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading state file {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("parsing state file {path}"))?
        }
    };
    if rho.dim() != d {
        bail!("state has dimension {}, expected {d}", rho.dim());
    }
    Ok(rho)
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_json(path: &Path, v: &serde_json::Value) -> anyhow::Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

/// Returns whether every check passed.
fn run(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::VerifyDesign { dim, trials, seed } => {
            let design = build_mub_design(dim)?;
            let report = verify_two_design(&design, trials, &mut SimRng::new(seed, 0));
            print_json(&serde_json::to_value(&report)?)?;
            Ok(report.passed)
        }
        Command::AuditPovm {
            dim,
            alpha,
            exact,
            pure_states,
            seed,
        } => {
            let povm = GentlePovm::new(build_mub_design(dim)?, alpha)?;
            if exact && povm.bits() > MAX_EXACT_BITS {
                bail!(
                    "--exact enumerates 2^{} outcomes; at most 2^{MAX_EXACT_BITS} are supported",
                    povm.bits()
                );
            }
            let mut rng = SimRng::new(seed, 0);
            let (mode, outcomes) = if exact {
                (CompletenessMode::Exact, OutcomeSpec::All)
            } else {
                (CompletenessMode::Analytic, OutcomeSpec::Auto)
            };
            let completeness = povm.completeness_check(mode)?;
            let cfg = AuditConfig {
                pure_states,
                outcomes,
                ..AuditConfig::default()
            };
            let gentle = gentleness_audit(&povm, &cfg, &mut rng)?;
            let private = privacy_audit(&povm, outcomes, &mut rng)?;
            let complete = completeness <= 1e-10;
            print_json(&json!({
                "dim": dim,
                "D": povm.bits(),
                "alpha": alpha,
                "delta": povm.delta(),
                "completeness_residual": completeness,
                "gentleness": gentle,
                "privacy": private,
            }))?;
            Ok(complete && gentle.passed && private.passed)
        }
        Command::Certify {
            dim,
            alpha,
            epsilon,
            n,
            state,
            null,
            seed,
            sampling,
        } => {
            if n < 2 {
                bail!("--n must be at least 2");
            }
            let rho = load_state(&state, dim)?;
            let rho0 = load_state(&null, dim)?;
            let povm = GentlePovm::new(build_mub_design(dim)?, alpha)?;
            let cert = Certifier::new(povm, &rho0, epsilon)?;
            let result = cert.run(&rho, n, sampling.into(), &mut SimRng::new(seed, 0))?;
            print_json(&json!({
                "dim": dim,
                "alpha": alpha,
                "epsilon": epsilon,
                "n": n,
                "seed": seed,
                "statistic": result.statistic,
                "threshold": result.threshold,
                "reject": result.reject,
                "decision": if result.reject { "reject" } else { "accept" },
            }))?;
            Ok(!result.reject)
        }
        Command::AnalyzeSuperop {
            dim,
            alpha,
            out,
            epsilon,
            seed,
        } => {
            let gentle = GentlePovm::new(build_mub_design(dim)?, alpha)?;
            if gentle.bits() > MAX_DISTRIBUTION_BITS {
                bail!(
                    "materializing 2^{} elements is not supported; use d <= 4",
                    gentle.bits()
                );
            }
            let povm = ExplicitPovm::from_gentle(&gentle)?;
            let s = superop_from_povm(&povm, &hermitian_basis(dim)?)?;
            let channel = verify_channel_properties(&s, &povm, 50, &mut SimRng::new(seed, 0));
            let sums = eigenvalue_sum_check(&s, alpha);
            let fixed = lower_bound_sample_size(dim, epsilon, alpha, BoundMode::Fixed)?;
            let randomized = lower_bound_sample_size(dim, epsilon, alpha, BoundMode::Randomized)?;
            let body = json!({
                "dim": dim,
                "alpha": alpha,
                "epsilon": epsilon,
                "superop": s.to_json(),
                "eigenvalues": s.eigenvalues().as_slice(),
                "channel": channel,
                "eigenvalue_sum": sums,
                "lower_bound_n": { "fixed": fixed, "randomized": randomized },
            });
            write_json(&out, &body)?;
            print_json(&json!({
                "channel": channel,
                "eigenvalue_sum": sums,
                "lower_bound_n": { "fixed": fixed, "randomized": randomized },
                "out": out,
            }))?;
            Ok(channel.passed)
        }
        Command::Sweep {
            config,
            out,
            summary,
        } => {
            let cfg = SweepConfig::load(&config)?;
            let Some(path) = out.or_else(|| cfg.output.clone()) else {
                bail!("no output path: pass --out or set `output` in the config");
            };
            let records = run_sweep(&cfg, Some(&path))?;
            let rows = summarize(&records)?;
            match summary {
                Some(p) => write_summary_csv(File::create(&p)?, &rows)?,
                None => write_summary_csv(std::io::stdout().lock(), &rows)?,
            }
            eprintln!("{} records in {}", records.len(), path.display());
            Ok(true)
        }
        Command::Scaling { input, out, target } => {
            let records = read_records(&input)?;
            let rows = summarize(&records)?;
            let mut fits = Vec::new();
            for ((alpha, epsilon), points) in minimal_n_from_summaries(&rows, target) {
                let fit = scaling_fit(&points)
                    .with_context(|| format!("alpha = {alpha}, epsilon = {epsilon}"))?;
                fits.push(
                    json!({ "alpha": alpha, "epsilon": epsilon, "target": target, "fit": fit }),
                );
            }
            let body = serde_json::Value::Array(fits);
            write_json(&out, &body)?;
            print_json(&body)?;
            Ok(true)
        }
        Command::Calibrate {
            dim,
            alpha,
            epsilon,
            trials,
            target,
            alternative,
            seed,
        } => {
            let settings = SearchSettings {
                target,
                trials,
                seed,
                ..SearchSettings::default()
            };
            let n = minimal_sample_size(dim, alpha, epsilon, alternative.into(), &settings)?;
            let constant = n as f64 * epsilon * epsilon * alpha * alpha / (dim as f64).powi(3);
            print_json(&json!({
                "dim": dim,
                "alpha": alpha,
                "epsilon": epsilon,
                "target": target,
                "trials": trials,
                "n_star": n,
                "constant": constant,
            }))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
