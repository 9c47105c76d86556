//! Kernel evaluation and Gram-matrix assembly.
//!
//! The RBF kernel is parameterized as `K(x, x') = exp(-gamma * ||x - x'||^2)`,
//! so `gamma` is an inverse squared length-scale. All estimators in this crate
//! go through [`gram`] so that kernel choices stay in one place.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported kernel families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    #[serde(rename = "RBF")]
    Rbf,
}

/// A validated kernel choice: family plus parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    gamma: f64,
}

impl KernelSpec {
    /// RBF kernel `exp(-gamma * ||x - x'||^2)` with `gamma > 0`.
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::invalid_input(format!(
                "RBF gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(KernelSpec {
            family: KernelFamily::Rbf,
            gamma,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

#[inline]
fn squared_distance(x: ArrayView1<'_, f64>, z: ArrayView1<'_, f64>) -> f64 {
    x.iter()
        .zip(z.iter())
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Evaluate the kernel at a single pair of points.
///
/// The result lies in `(0, 1]` for the RBF family.
pub fn eval_kernel(spec: &KernelSpec, x: ArrayView1<'_, f64>, x2: ArrayView1<'_, f64>) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::invalid_input(format!(
            "kernel arguments have mismatched dimensions {} vs {}",
            x.len(),
            x2.len()
        )));
    }
    Ok((-spec.gamma * squared_distance(x, x2)).exp())
}

/// Number of rows each worker fills at a time when assembling a Gram matrix.
const GRAM_PANEL_ROWS: usize = 64;

/// Cross Gram matrix with entry `(i, j) = K(rows_i, cols_j)`.
///
/// The output is `rows.nrows() x cols.nrows()` and is assembled in independent
/// row panels, so an `n x m` request only ever allocates `n x m`. With
/// `rows == cols` the result is symmetric with unit diagonal.
pub fn gram(spec: &KernelSpec, rows: ArrayView2<'_, f64>, cols: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if rows.nrows() == 0 || cols.nrows() == 0 {
        return Err(Error::invalid_input("gram requires nonempty point sets"));
    }
    if rows.ncols() != cols.ncols() {
        return Err(Error::invalid_input(format!(
            "gram point sets have mismatched feature dimensions {} vs {}",
            rows.ncols(),
            cols.ncols()
        )));
    }
    let n = rows.nrows();
    let m = cols.nrows();
    let gamma = spec.gamma;

    let mut data = vec![0.0f64; n * m];
    data.par_chunks_mut(m * GRAM_PANEL_ROWS)
        .enumerate()
        .for_each(|(panel, chunk)| {
            let row0 = panel * GRAM_PANEL_ROWS;
            for (local, out_row) in chunk.chunks_mut(m).enumerate() {
                let xi = rows.row(row0 + local);
                for (j, out) in out_row.iter_mut().enumerate() {
                    *out = (-gamma * squared_distance(xi, cols.row(j))).exp();
                }
            }
        });

    Ok(Array2::from_shape_vec((n, m), data).expect("gram shape is consistent by construction"))
}
