use ndarray::{Array1, Array2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LuError {
    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {col})")]
    Singular { col: usize, pivot: f64 },
}

/// LU factorization with partial pivoting, PA = LU stored in place.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Array2<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &Array2<f64>) -> Result<Self, LuError> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU requires a square matrix");
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = lu[[col, col]].abs();
            for row in col + 1..n {
                let v = lu[[row, col]].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = row;
                }
            }
            if pivot_val < f64::MIN_POSITIVE * 16.0 || !pivot_val.is_finite() {
                return Err(LuError::Singular {
                    col,
                    pivot: lu[[pivot_row, col]],
                });
            }
            if pivot_row != col {
                perm.swap(col, pivot_row);
                for j in 0..n {
                    let tmp = lu[[col, j]];
                    lu[[col, j]] = lu[[pivot_row, j]];
                    lu[[pivot_row, j]] = tmp;
                }
            }
            let inv = 1.0 / lu[[col, col]];
            for row in col + 1..n {
                let factor = lu[[row, col]] * inv;
                lu[[row, col]] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        lu[[row, j]] -= factor * lu[[col, j]];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        let mut x = Array1::zeros(n);
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        // forward substitution, unit lower triangle
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s / self.lu[[i, i]];
        }
        x
    }

    /// Solves A^T x = b using the same factorization.
    pub fn solve_transpose(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.lu.nrows();
        assert_eq!(b.len(), n);
        let mut y = b.clone();
        // U^T y = b (forward)
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[[j, i]] * y[j];
            }
            y[i] = s / self.lu[[i, i]];
        }
        // L^T z = y (backward, unit diagonal)
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[[j, i]] * y[j];
            }
            y[i] = s;
        }
        // undo row permutation: x[perm[i]] = z[i]
        let mut x = Array1::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}
