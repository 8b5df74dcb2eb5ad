use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, DensityMatrix, HermitianOperator, QubitRegister, UnitaryOperator};
use crate::error::{Error, Result};

/// On-disk matrix format: `{"n": qubits, "re": [[...]], "im": [[...]]}`,
/// row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(register: QubitRegister, m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            n: register.n(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<(QubitRegister, CMatrix)> {
        let register = QubitRegister::new(self.n)?;
        let d = register.dim();
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::param(format!(
                "matrix file for n = {} must hold {d}x{d} \"re\" and \"im\" arrays",
                self.n
            )));
        }
        let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("matrix file contains non-finite entries"));
        }
        Ok((register, m))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

macro_rules! matrix_json_conversions {
    ($ty:ty) => {
        impl TryFrom<MatrixJson> for $ty {
            type Error = Error;

            fn try_from(j: MatrixJson) -> Result<Self> {
                let (register, m) = j.to_matrix()?;
                <$ty>::new(register, m)
            }
        }

        impl From<$ty> for MatrixJson {
            fn from(op: $ty) -> MatrixJson {
                MatrixJson::from_matrix(op.register(), op.matrix())
            }
        }

        impl $ty {
            pub fn to_json_string(&self) -> String {
                serde_json::to_string(&MatrixJson::from_matrix(self.register(), self.matrix()))
                    .expect("matrix serialization cannot fail")
            }

            pub fn from_json_str(s: &str) -> Result<Self> {
                MatrixJson::from_json_str(s)?.try_into()
            }
        }
    };
}

matrix_json_conversions!(HermitianOperator);
matrix_json_conversions!(DensityMatrix);
matrix_json_conversions!(UnitaryOperator);
