//! Complete sets of mutually unbiased bases as weighted-free 2-designs.

mod mub;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::linalg::{c, kron, projector, trace, CMatrix, CVector, TOL_NORM};
use crate::qmat::{random_hermitian, DensityMatrix, SimRng};

pub use mub::{build_mub_design, is_supported_dim, supported_dims, supported_dims_label};

/// Tolerance for the frame, moment and overlap identities.
pub const TOL_DESIGN: f64 = 1e-9;

/// `D` unit vectors in `C^d` whose second moment matches the Haar measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DesignJson", into = "DesignJson")]
pub struct TwoDesign {
    dim: usize,
    vectors: Vec<CVector>,
}

impl TwoDesign {
    /// Checks vector lengths and norms only; call [`verify_two_design`] for
    /// the moment identity.
    pub fn new(dim: usize, vectors: Vec<CVector>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "need d >= 1",
            });
        }
        if vectors.is_empty() {
            return Err(Error::Empty("design vectors"));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > TOL_NORM {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D`, the number of vectors.
    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, m: usize) -> &CVector {
        &self.vectors[m]
    }

    /// `|v_m><v_m|`.
    pub fn projector(&self, m: usize) -> CMatrix {
        projector(&self.vectors[m])
    }

    /// `<v_m| A |v_m>` (real part) for every `m`.
    pub fn expectations(&self, a: &CMatrix) -> Vec<f64> {
        self.vectors.iter().map(|v| v.dotc(&(a * v)).re).collect()
    }

    /// Copy with vector `m` replaced; used to build corrupted candidates.
    pub fn with_vector(&self, m: usize, v: CVector) -> Result<Self> {
        let mut vectors = self.vectors.clone();
        vectors[m] = v;
        Self::new(self.dim, vectors)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DesignJson {
    dim: usize,
    count: usize,
    vectors: Vec<[Vec<f64>; 2]>,
}

impl From<TwoDesign> for DesignJson {
    fn from(d: TwoDesign) -> Self {
        let vectors = d
            .vectors
            .iter()
            .map(|v| {
                [
                    v.iter().map(|z| z.re).collect(),
                    v.iter().map(|z| z.im).collect(),
                ]
            })
            .collect();
        Self {
            dim: d.dim,
            count: d.vectors.len(),
            vectors,
        }
    }
}

impl TryFrom<DesignJson> for TwoDesign {
    type Error = Error;

    fn try_from(j: DesignJson) -> Result<Self> {
        if j.count != j.vectors.len() {
            return Err(Error::Parse(format!(
                "design declares {} vectors but lists {}",
                j.count,
                j.vectors.len()
            )));
        }
        let mut vectors = Vec::with_capacity(j.count);
        for [re, im] in j.vectors {
            if re.len() != im.len() {
                return Err(Error::Parse(
                    "re/im length mismatch in design vector".into(),
                ));
            }
            vectors.push(CVector::from_iterator(
                re.len(),
                re.iter().zip(&im).map(|(&a, &b)| c(a, b)),
            ));
        }
        TwoDesign::new(j.dim, vectors)
    }
}

/// Residuals of the 2-design identities.
#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub dim: usize,
    pub count: usize,
    pub trials: usize,
    /// `max_M |(1/D) sum_m <v_m|M|v_m>^2 - (Tr M^2 + (Tr M)^2)/(d(d+1))|` over
    /// random Hermitian `M` with unit Frobenius norm.
    pub max_moment_residual: f64,
    /// `||sum_m |v_m><v_m| - (D/d) I||_F`.
    pub frame_residual: f64,
    /// Frobenius distance between the empirical second moment and
    /// `2/(d(d+1))` times the symmetric projector; only computed for `d <= 16`.
    pub projector_residual: Option<f64>,
    pub passed: bool,
}

/// Tests the squared-form moment identity on `trials` random Hermitian
/// matrices, plus the frame identity and (for small `d`) the full
/// symmetric-subspace identity.
pub fn verify_two_design(design: &TwoDesign, trials: usize, rng: &mut SimRng) -> DesignReport {
    let d = design.dim();
    let df = d as f64;
    let nd = design.count() as f64;

    let mut max_moment: f64 = 0.0;
    for _ in 0..trials {
        let mut m = random_hermitian(d, rng);
        let norm = m.norm();
        if norm > 0.0 {
            m.unscale_mut(norm);
        }
        max_moment = max_moment.max(moment_residual(design, &m));
    }

    let mut frame = CMatrix::zeros(d, d);
    for m in 0..design.count() {
        frame += design.projector(m);
    }
    let frame_residual = (frame - CMatrix::identity(d, d) * c(nd / df, 0.0)).norm();

    let projector_residual = (d <= 16).then(|| {
        let mut second = CMatrix::zeros(d * d, d * d);
        for m in 0..design.count() {
            let p = design.projector(m);
            second += kron(&p, &p);
        }
        second.unscale_mut(nd);
        let target = symmetric_projector(d) * c(2.0 / (df * (df + 1.0)), 0.0);
        (second - target).norm()
    });

    let passed = max_moment <= TOL_DESIGN
        && frame_residual <= TOL_DESIGN
        && projector_residual.is_none_or(|r| r <= TOL_DESIGN);
    DesignReport {
        dim: d,
        count: design.count(),
        trials,
        max_moment_residual: max_moment,
        frame_residual,
        projector_residual,
        passed,
    }
}

/// `|(1/D) sum_m <v_m|M|v_m>^2 - (Tr M^2 + (Tr M)^2)/(d(d+1))|`.
pub fn moment_residual(design: &TwoDesign, m: &CMatrix) -> f64 {
    let d = design.dim() as f64;
    let lhs = design.expectations(m).iter().map(|x| x * x).sum::<f64>() / design.count() as f64;
    let tr = trace(m).re;
    let tr2 = crate::qmat::linalg::trace_product_real(m, m);
    (lhs - (tr2 + tr * tr) / (d * (d + 1.0))).abs()
}

/// `(I + SWAP)/2` on `C^d (x) C^d`, index `i*d + j` for `|i>|j>`.
pub fn symmetric_projector(d: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let row = i * d + j;
            p[(row, row)] += c(0.5, 0.0);
            p[(row, j * d + i)] += c(0.5, 0.0);
        }
    }
    p
}

/// Max deviation from orthonormality within a basis and from `1/d` across
/// bases, assuming consecutive blocks of `d` vectors form the bases.
pub fn mub_overlap_residual(design: &TwoDesign) -> f64 {
    let d = design.dim();
    let v = design.vectors();
    let mut worst: f64 = 0.0;
    for a in 0..v.len() {
        for b in a..v.len() {
            let ov = v[a].dotc(&v[b]).norm_sqr();
            let want = if a / d != b / d {
                1.0 / d as f64
            } else if a == b {
                1.0
            } else {
                0.0
            };
            worst = worst.max((ov - want).abs());
        }
    }
    worst
}

/// `p(m) = (d/D) <v_m|rho|v_m>`.
pub fn design_probabilities(design: &TwoDesign, rho: &DensityMatrix) -> Result<Vec<f64>> {
    if rho.dim() != design.dim() {
        return Err(Error::DimensionMismatch {
            expected: design.dim(),
            found: rho.dim(),
        });
    }
    let scale = design.dim() as f64 / design.count() as f64;
    Ok(design
        .expectations(rho.matrix())
        .into_iter()
        .map(|x| (scale * x).max(0.0))
        .collect())
}
