use super::multivariate::MultiIndex;
use super::tensors::{UnivariateProducts, TENSOR_DROP_TOL};
use super::MultivariateBasis;

/// Expansion of squares of degree-`Nd` expansions in the degree-`2 Nd` basis
/// over the same germ.
///
/// For `x` with coefficients `x_k` in the base basis, the square `x^2` is a
/// polynomial of degree at most `2 Nd` and has the exact representation
/// `u_m = (1/gamma'_m) sum_{k1,k2} <psi_k1 psi_k2, psi'_m> x_k1 x_k2` in the
/// extended basis. Second moments of squares follow by Parseval, e.g.
/// `Var[x^2] = sum_{m>=1} gamma'_m u_m^2`, equal to the quadruple-product
/// formula.
#[derive(Debug, Clone)]
pub struct SquareExpansion {
    /// Squared norms of the extended basis.
    pub ext_norms: Vec<f64>,
    /// Per extended index `m`: pairs `(k1 <= k2, <psi_k1 psi_k2, psi'_m>)`.
    pub cross_by_m: Vec<Vec<(usize, usize, f64)>>,
}

impl SquareExpansion {
    pub fn build(basis: &MultivariateBasis) -> Self {
        let nd = basis.max_degree();
        let dims = basis.germ_dim();
        let products: Vec<UnivariateProducts> = (0..dims)
            .map(|d| UnivariateProducts::new(basis, d, 2 * nd))
            .collect();

        let ext_indices = extended_indices(basis);
        let ext_norms: Vec<f64> = ext_indices
            .iter()
            .map(|idx| {
                idx.0
                    .iter()
                    .enumerate()
                    .map(|(d, &k)| {
                        let rec = super::univariate::recurrence_coeffs(
                            &basis.germ()[d],
                            k + 1,
                        );
                        (1..=k).map(|j| rec[j].1).product::<f64>()
                    })
                    .product()
            })
            .collect();

        let n = basis.n_terms();
        let base = basis.indices();
        let mut cross_by_m: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); ext_indices.len()];
        for (m, em) in ext_indices.iter().enumerate() {
            for k1 in 0..n {
                for k2 in k1..n {
                    let mut v = 1.0;
                    for d in 0..dims {
                        v *= products[d].integral(&[base[k1].0[d], base[k2].0[d], em.0[d]]);
                        if v == 0.0 {
                            break;
                        }
                    }
                    if v.abs() > TENSOR_DROP_TOL {
                        cross_by_m[m].push((k1, k2, v));
                    }
                }
            }
        }
        Self {
            ext_norms,
            cross_by_m,
        }
    }

    pub fn n_ext(&self) -> usize {
        self.ext_norms.len()
    }

    /// Extended-basis coefficients of `a(w)^2 + b(w)^2` for two expansions
    /// sharing the base basis.
    pub fn square_pair_coeffs(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.n_ext())
            .map(|m| {
                let mut s = 0.0;
                for &(k1, k2, v) in &self.cross_by_m[m] {
                    let prod = a[k1] * a[k2] + b[k1] * b[k2];
                    s += v * if k1 == k2 { prod } else { 2.0 * prod };
                }
                s / self.ext_norms[m]
            })
            .collect()
    }

    /// Mean and variance of `a(w)^2 + b(w)^2`.
    pub fn moments_of_square_pair(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let u = self.square_pair_coeffs(a, b);
        let mean = u[0];
        let var = u
            .iter()
            .zip(&self.ext_norms)
            .skip(1)
            .map(|(&um, &gm)| gm * um * um)
            .sum();
        (mean, var)
    }
}

fn extended_indices(basis: &MultivariateBasis) -> Vec<MultiIndex> {
    // same graded enumeration as the base basis, at twice the degree
    let dims = basis.germ_dim();
    let mut out = Vec::new();
    let mut current = vec![0usize; dims];
    for total in 0..=(2 * basis.max_degree()) {
        extend(0, total, &mut current, &mut out);
    }
    out
}

fn extend(dim: usize, remaining: usize, current: &mut [usize], out: &mut Vec<MultiIndex>) {
    if dim + 1 == current.len() {
        current[dim] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[dim] = v;
        extend(dim + 1, remaining - v, current, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::{compute_tensors, GermComponent, MultivariateBasis};
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_moments_agree_with_quadruple_products() {
        let germ = vec![
            GermComponent::GaussianStandard,
            GermComponent::BetaShifted {
                support: (0.0, 1.0),
                shape: (2.0, 5.0),
            },
        ];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let tensors = compute_tensors(&basis);
        let sq = SquareExpansion::build(&basis);
        let n = basis.n_terms();
        let a: Vec<f64> = (0..n).map(|i| 1.0 - 0.07 * i as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| 0.02 * (i as f64 + 1.0)).collect();

        let (mean, var) = sq.moments_of_square_pair(&a, &b);

        // quadruple-product route
        let gam = basis.norms();
        let mean_q: f64 = (0..n).map(|k| gam[k] * (a[k] * a[k] + b[k] * b[k])).sum();
        let mut fourth = 0.0;
        for k1 in 0..n {
            for k2 in 0..n {
                for k3 in 0..n {
                    for k4 in 0..n {
                        let q = tensors.quad(k1, k2, k3, k4);
                        if q != 0.0 {
                            fourth += q
                                * (a[k1] * a[k2] * a[k3] * a[k4]
                                    + 2.0 * a[k1] * a[k2] * b[k3] * b[k4]
                                    + b[k1] * b[k2] * b[k3] * b[k4]);
                        }
                    }
                }
            }
        }
        let var_q = fourth - mean_q * mean_q;
        assert_abs_diff_eq!(mean, mean_q, epsilon = 1e-10);
        assert_abs_diff_eq!(var, var_q, epsilon = 1e-10);
    }

    #[test]
    fn square_of_gaussian_affine_matches_closed_form() {
        // x = 1 + 0.1 w: E[x^2] = 1.01, Var[x^2] = E[x^4] - E[x^2]^2
        // E[x^4] = 1 + 6*0.01 + 3*0.0001 = 1.0603 -> Var = 1.0603 - 1.0201 = 0.0402
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], 1).unwrap();
        let sq = SquareExpansion::build(&basis);
        let a = [1.0, 0.1];
        let b = [0.0, 0.0];
        let (mean, var) = sq.moments_of_square_pair(&a, &b);
        assert_abs_diff_eq!(mean, 1.01, epsilon = 1e-14);
        assert_abs_diff_eq!(var, 0.0402, epsilon = 1e-14);
    }
}
