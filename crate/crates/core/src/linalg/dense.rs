use nalgebra::DMatrix;

use super::CsrMatrix;
use crate::error::{Error, Result};

/// Largest dimension accepted by the dense diagnostics.
pub const DENSE_LIMIT: usize = 5000;

/// Spectral condition number of a densified matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    /// `σ_max / σ_min`, infinite when singular.
    pub value: f64,
    pub singular: bool,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

pub fn condition_number_dense(a: &CsrMatrix) -> Result<Conditioning> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.n_cols(),
        });
    }
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let dense = DMatrix::from_row_slice(n, n, &a.to_dense());
    let sv = dense.singular_values();
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    let singular = !(sigma_min > sigma_max * f64::EPSILON);
    Ok(Conditioning {
        value: if singular {
            f64::INFINITY
        } else {
            sigma_max / sigma_min
        },
        singular,
        sigma_max,
        sigma_min,
    })
}
