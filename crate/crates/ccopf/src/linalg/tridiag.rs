use thiserror::Error;

#[derive(Debug, Error)]
pub enum TridiagError {
    #[error("eigenvalue {index} did not converge within {sweeps} QL sweeps (residual {residual:.3e})")]
    NoConvergence {
        index: usize,
        sweeps: usize,
        residual: f64,
    },
}

const MAX_SWEEPS: usize = 50;
const TOL: f64 = 1e-14;

/// Eigendecomposition of a symmetric tridiagonal matrix by implicit-shift QL.
///
/// `diag` holds the diagonal, `off` the subdiagonal (length one less). Returns
/// eigenvalues in ascending order together with the first component of each
/// normalized eigenvector, which is all Golub-Welsch needs for quadrature
/// weights.
pub fn symmetric_tridiagonal_eig(
    diag: &[f64],
    off: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), TridiagError> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // first row of the accumulated rotation product
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            // locate a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                return Err(TridiagError::NoConvergence {
                    index: l,
                    sweeps,
                    residual: e[l].abs(),
                });
            }
            sweeps += 1;

            // Wilkinson-style shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // rotate the tracked eigenvector row
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // sort ascending, carrying first components along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values = order.iter().map(|&i| d[i]).collect();
    let firsts = order.iter().map(|&i| z[i]).collect();
    Ok((values, firsts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two_known_eigenvalues() {
        // [[2,1],[1,2]] -> eigenvalues 1, 3
        let (vals, firsts) = symmetric_tridiagonal_eig(&[2.0, 2.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-13);
        // eigenvectors (1,-1)/sqrt(2) and (1,1)/sqrt(2)
        assert_abs_diff_eq!(firsts[0].abs(), 1.0 / 2f64.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(firsts[1].abs(), 1.0 / 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn first_components_have_unit_norm_sum() {
        // squared first components over all eigenvectors sum to 1
        let diag = [0.3, -0.1, 0.7, 0.2, 0.0];
        let off = [0.4, 0.2, 0.6, 0.1];
        let (_, firsts) = symmetric_tridiagonal_eig(&diag, &off).unwrap();
        let total: f64 = firsts.iter().map(|z| z * z).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}
