use ndarray::{s, Array1, Array2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LdltError {
    #[error("pivot {pivot:.3e} at position {position} has the wrong sign for a quasi-definite system")]
    WrongInertia { position: usize, pivot: f64 },
    #[error("pivot at position {position} is numerically zero ({pivot:.3e})")]
    TinyPivot { position: usize, pivot: f64 },
}

const BLOCK: usize = 64;
const PIVOT_FLOOR: f64 = 1e-13;

/// Blocked LDL^T factorization without pivoting for symmetric quasi-definite
/// matrices: the leading `n_pos` pivots must come out positive and the
/// remaining ones negative, which holds for regularized interior-point KKT
/// systems under any ordering. A sign violation is reported so the caller can
/// bump the regularization and retry.
pub struct BlockLdlt {
    a: Array2<f64>,
    n: usize,
}

impl BlockLdlt {
    pub fn factor(mut a: Array2<f64>, n_pos: usize) -> Result<Self, LdltError> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let scale = (0..n)
            .map(|i| a[[i, i]].abs())
            .fold(1.0f64, f64::max);
        let floor = PIVOT_FLOOR * scale;

        let mut kb = 0;
        while kb < n {
            let ke = (kb + BLOCK).min(n);
            let w = ke - kb;

            // factor the diagonal block in place (unblocked)
            for j in kb..ke {
                let mut dj = a[[j, j]];
                for t in kb..j {
                    let l = a[[j, t]];
                    dj -= l * l * a[[t, t]];
                }
                if dj.abs() < floor || !dj.is_finite() {
                    return Err(LdltError::TinyPivot {
                        position: j,
                        pivot: dj,
                    });
                }
                let want_positive = j < n_pos;
                if (dj > 0.0) != want_positive {
                    return Err(LdltError::WrongInertia {
                        position: j,
                        pivot: dj,
                    });
                }
                a[[j, j]] = dj;
                for i in j + 1..ke {
                    let mut v = a[[i, j]];
                    for t in kb..j {
                        v -= a[[i, t]] * a[[t, t]] * a[[j, t]];
                    }
                    a[[i, j]] = v / dj;
                }
            }

            if ke < n {
                // panel solve: rows below the block, columns of the block
                for j in kb..ke {
                    let dj = a[[j, j]];
                    for t in kb..j {
                        let c = a[[t, t]] * a[[j, t]];
                        if c != 0.0 {
                            let (col_t, mut col_j) =
                                a.multi_slice_mut((s![ke..n, t], s![ke..n, j]));
                            col_j.scaled_add(-c, &col_t);
                        }
                    }
                    a.slice_mut(s![ke..n, j]).mapv_inplace(|v| v / dj);
                }

                // trailing update, block column strips of the lower triangle
                let panel = a.slice(s![ke..n, kb..ke]).to_owned();
                let mut scaled = panel.clone();
                for (c, mut col) in scaled.columns_mut().into_iter().enumerate() {
                    let d = a[[kb + c, kb + c]];
                    col.mapv_inplace(|v| v * d);
                }
                let mut jb = ke;
                while jb < n {
                    let je = (jb + BLOCK).min(n);
                    let lhs = scaled.slice(s![jb - ke.., ..]);
                    let rhs = panel.slice(s![jb - ke..je - ke, ..]);
                    let mut target = a.slice_mut(s![jb..n, jb..je]);
                    ndarray::linalg::general_mat_mul(-1.0, &lhs, &rhs.t(), 1.0, &mut target);
                    jb = je;
                }
            }
            let _ = w;
            kb = ke;
        }
        Ok(Self { a, n })
    }

    /// Solves L D L^T x = b.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = b.clone();
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                for i in j + 1..n {
                    x[i] -= self.a[[i, j]] * xj;
                }
            }
        }
        for j in 0..n {
            x[j] /= self.a[[j, j]];
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for i in j + 1..n {
                s -= self.a[[i, j]] * x[i];
            }
            x[j] = s;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_quasi_definite(n_pos: usize, n_neg: usize, rng: &mut StdRng) -> Array2<f64> {
        let n = n_pos + n_neg;
        // A = [P, B^T; B, -Q] with P, Q diagonally dominant SPD
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-0.4..0.4);
                a[[i, j]] = v;
                a[[j, i]] = v;
            }
        }
        for i in 0..n {
            let sign = if i < n_pos { 1.0 } else { -1.0 };
            a[[i, i]] = sign * (2.0 + (n as f64) * 0.4);
        }
        a
    }

    #[test]
    fn factors_and_solves_quasi_definite() {
        let mut rng = StdRng::seed_from_u64(7);
        for &(np, nn) in &[(5usize, 3usize), (40, 25), (130, 70)] {
            let a = random_quasi_definite(np, nn, &mut rng);
            let b = Array1::from_iter((0..np + nn).map(|i| (i as f64 * 0.37).sin()));
            let f = BlockLdlt::factor(a.clone(), np).unwrap();
            let x = f.solve(&b);
            let r = a.dot(&x) - &b;
            for v in r.iter() {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn reports_wrong_inertia() {
        // claims 2 positive pivots but the second diagonal entry is negative
        let a = ndarray::array![[2.0, 0.0], [0.0, -1.0]];
        match BlockLdlt::factor(a, 2) {
            Err(LdltError::WrongInertia { position, .. }) => assert_eq!(position, 1),
            other => panic!("expected inertia error, got {:?}", other.err()),
        }
    }
}
