use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{GentlePovm, Outcome};
use crate::designs::build_mub_design;
use crate::error::{Error, Result};

/// One bitstring per line.
pub fn write_outcomes<W: Write>(mut out: W, outcomes: &[Outcome]) -> Result<()> {
    for z in outcomes {
        writeln!(out, "{z}")?;
    }
    Ok(())
}

/// Reads one bitstring per line, skipping blank lines; every line must have
/// `bits` characters.
pub fn read_outcomes<R: BufRead>(input: R, bits: usize) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let z: Outcome = line.parse()?;
        if z.len() != bits {
            return Err(Error::OutcomeLength {
                expected: bits,
                found: z.len(),
            });
        }
        out.push(z);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DesignRef {
    Mub { dim: usize },
}

/// Serializable description of a gentle POVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmDescriptor {
    pub design: DesignRef,
    pub alpha: f64,
    pub delta: f64,
}

impl PovmDescriptor {
    pub fn mub(povm: &GentlePovm) -> Self {
        Self {
            design: DesignRef::Mub { dim: povm.dim() },
            alpha: povm.alpha(),
            delta: povm.delta(),
        }
    }

    /// Rebuilds the POVM; `delta` must agree with `alpha`.
    pub fn build(&self) -> Result<GentlePovm> {
        let DesignRef::Mub { dim } = self.design;
        let povm = GentlePovm::new(build_mub_design(dim)?, self.alpha)?;
        if (povm.delta() - self.delta).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "descriptor delta {} disagrees with 4 artanh(alpha) = {}",
                self.delta,
                povm.delta()
            )));
        }
        Ok(povm)
    }
}
