use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::p_norm;
use crate::orlicz::OrliczFunction;

/// A square matrix, row-major. Serialises as a 2-D array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(domain!("matrix must be square and nonempty"));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(domain!("matrix entries must be finite"));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::new(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.rows()
    }
}

/// `‖a‖ = ‖(‖(a_ij)_i‖_r)_j‖_outer`: an `r`-norm down each column, then the
/// Orlicz norm across columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSpaceNorm {
    pub outer: OrliczFunction,
    pub inner_exponent: f64,
    pub n: usize,
}

impl MatrixSpaceNorm {
    pub fn new(outer: OrliczFunction, inner_exponent: f64, n: usize) -> Result<Self> {
        if !(inner_exponent >= 1.0) {
            return Err(domain!("inner exponent must be ≥ 1, got {inner_exponent}"));
        }
        Ok(MatrixSpaceNorm {
            outer,
            inner_exponent,
            n,
        })
    }

    /// The column norms `‖(a_ij)_i‖_r`, `j = 1..=n`.
    pub fn column_norms(&self, a: &Matrix) -> Vec<f64> {
        let n = a.n();
        (0..n)
            .map(|j| p_norm((0..n).map(|i| a.get(i, j)), self.inner_exponent))
            .collect()
    }
}

pub fn matrix_norm(a: &Matrix, norm: &MatrixSpaceNorm) -> Result<f64> {
    if a.n() != norm.n {
        return Err(domain!("matrix is {0}×{0} but the norm expects n = {1}", a.n(), norm.n));
    }
    crate::average::orlicz_norm(&norm.outer, &norm.column_norms(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::luxemburg_norm;
    use crate::rng::{stream, RngExt};
    use alloc::vec;

    #[test]
    fn single_entry() {
        let f = OrliczFunction::scaled_power(1.5, 8.0).unwrap();
        let norm = MatrixSpaceNorm::new(f.clone(), 1.7, 3).unwrap();
        let a = Matrix::from_fn(3, |i, j| if (i, j) == (0, 0) { 2.5 } else { 0.0 });
        let want = 2.5 / f.inverse(1.0).unwrap();
        assert!((matrix_norm(&a, &norm).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn nesting_collapses_for_equal_exponents() {
        let mut rng = stream(4, 0);
        let a = Matrix::from_fn(4, |_, _| rng.normal());
        let norm = MatrixSpaceNorm::new(OrliczFunction::power(1.6).unwrap(), 1.6, 4).unwrap();
        let flat = p_norm(a.as_slice().iter().copied(), 1.6);
        assert!((matrix_norm(&a, &norm).unwrap() - flat).abs() < 1e-12 * flat);
    }

    #[test]
    fn matches_term_by_term_definition() {
        let mut rng = stream(8, 0);
        let a = Matrix::from_fn(3, |_, _| rng.normal());
        let outer = OrliczFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)], crate::orlicz::Tail::Slope(3.0)).unwrap();
        let norm = MatrixSpaceNorm::new(outer.clone(), 1.3, 3).unwrap();
        let cols: Vec<f64> = (0..3)
            .map(|j| {
                let s: f64 = (0..3).map(|i| libm::pow(a.get(i, j).abs(), 1.3)).sum();
                libm::pow(s, 1.0 / 1.3)
            })
            .collect();
        let want = luxemburg_norm(&outer, &cols).unwrap();
        assert!((matrix_norm(&a, &norm).unwrap() - want).abs() < 1e-12 * want);
        let wrong = MatrixSpaceNorm::new(outer, 1.3, 4).unwrap();
        assert!(matrix_norm(&a, &wrong).is_err());
    }

    #[test]
    fn json_is_two_dimensional() {
        let a = Matrix::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[[1.0,2.0],[3.0,4.0]]");
        let b: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<Matrix>("[[1.0,2.0]]").is_err());
    }
}
