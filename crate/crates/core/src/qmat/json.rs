use serde::{Deserialize, Serialize};

use super::linalg::{c, CMatrix};
use crate::error::{Error, Result};

/// Wire form of a complex square matrix: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let d = m.nrows();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { dim: d, re, im }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let n = j.dim * j.dim;
        if j.re.len() != n || j.im.len() != n {
            return Err(Error::Parse(format!(
                "matrix of dim {} needs {} entries, got re={} im={}",
                j.dim,
                n,
                j.re.len(),
                j.im.len()
            )));
        }
        Ok(CMatrix::from_fn(j.dim, j.dim, |r, col| {
            c(j.re[r * j.dim + col], j.im[r * j.dim + col])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random::{random_density, SimRng};
    use crate::qmat::DensityMatrix;

    #[test]
    fn density_round_trips_through_json() {
        let mut rng = SimRng::new(9, 0);
        let rho = random_density(3, &mut rng).unwrap();
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn wire_layout_is_row_major() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 3.0), c(4.0, 5.0), c(6.0, 0.0)]);
        let j = MatrixJson::from(&m);
        assert_eq!(j.re, vec![1.0, 2.0, 4.0, 6.0]);
        assert_eq!(j.im, vec![0.0, 3.0, 5.0, 0.0]);
    }

    #[test]
    fn rejects_wrong_length_and_invalid_states() {
        let bad = r#"{"dim":2,"re":[1,0,0],"im":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<DensityMatrix>(bad).is_err());
        let not_state = r#"{"dim":2,"re":[1,0,0,1],"im":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<DensityMatrix>(not_state).is_err());
    }
}
