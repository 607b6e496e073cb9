use super::univariate::{build_univariate, UnivariateBasis};
use super::{gauss_rule, GermComponent, PceError};
use serde::{Deserialize, Serialize};

/// Exponent vector of one multivariate basis polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Total-degree multivariate basis over the stochastic germ.
///
/// Indices are ordered by non-decreasing total degree and graded
/// lexicographically within a degree, with `indices[0]` the all-zero index.
#[derive(Debug, Clone)]
pub struct MultivariateBasis {
    germ: Vec<GermComponent>,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    norms: Vec<f64>,
    univariate: Vec<UnivariateBasis>,
    quadrature: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Default per-component node count: exact for the quartic basis products
/// needed by the scalar-product tensors, with margin.
pub(crate) fn default_node_count(max_degree: usize) -> usize {
    2 * max_degree + 2
}

impl MultivariateBasis {
    pub fn build(germ: &[GermComponent], max_degree: usize) -> Result<Self, PceError> {
        assert!(!germ.is_empty(), "germ must have at least one component");
        let univariate: Vec<UnivariateBasis> = germ
            .iter()
            .map(|c| build_univariate(c, max_degree))
            .collect::<Result<_, _>>()?;
        let n_nodes = default_node_count(max_degree);
        let quadrature: Vec<(Vec<f64>, Vec<f64>)> = univariate
            .iter()
            .map(|b| gauss_rule(b, n_nodes))
            .collect::<Result<_, _>>()?;

        let indices = enumerate_graded(germ.len(), max_degree);
        let norms = indices
            .iter()
            .map(|idx| {
                idx.0
                    .iter()
                    .zip(&univariate)
                    .map(|(&k, b)| b.norms()[k])
                    .product()
            })
            .collect();
        Ok(Self {
            germ: germ.to_vec(),
            max_degree,
            indices,
            norms,
            univariate,
            quadrature,
        })
    }

    pub fn germ(&self) -> &[GermComponent] {
        &self.germ
    }

    pub fn germ_dim(&self) -> usize {
        self.germ.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Number of basis polynomials, `K + 1`.
    pub fn n_terms(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Squared norms `gamma_0..gamma_K`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn univariate(&self) -> &[UnivariateBasis] {
        &self.univariate
    }

    /// Per-component Gauss nodes and weights backing the tensor computation.
    pub fn quadrature(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.quadrature
    }

    /// Position of the degree-one index along germ component `dim`, if the
    /// basis degree admits it.
    pub fn first_order_index(&self, dim: usize) -> Option<usize> {
        self.indices.iter().position(|idx| {
            idx.total_degree() == 1 && idx.0.get(dim).copied() == Some(1)
        })
    }

    /// Evaluates `[psi_0(w), ..., psi_K(w)]` at a germ realization.
    pub fn eval(&self, omega: &[f64]) -> Result<Vec<f64>, PceError> {
        if omega.len() != self.germ.len() {
            return Err(PceError::DimensionMismatch {
                expected: self.germ.len(),
                got: omega.len(),
            });
        }
        let tables: Vec<Vec<f64>> = self
            .univariate
            .iter()
            .zip(omega)
            .map(|(b, &w)| b.eval_all(w, self.max_degree))
            .collect();
        Ok(self
            .indices
            .iter()
            .map(|idx| idx.0.iter().zip(&tables).map(|(&k, t)| t[k]).product())
            .collect())
    }
}

fn enumerate_graded(dims: usize, max_degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0usize; dims];
    for total in 0..=max_degree {
        push_degree(0, total, &mut current, &mut out);
    }
    out
}

fn push_degree(dim: usize, remaining: usize, current: &mut [usize], out: &mut Vec<MultiIndex>) {
    if dim + 1 == current.len() {
        current[dim] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[dim] = v;
        push_degree(dim + 1, remaining - v, current, out);
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn beta22() -> GermComponent {
        GermComponent::BetaShifted {
            support: (0.0, 1.0),
            shape: (2.0, 2.0),
        }
    }

    #[test]
    fn bivariate_degree_two_has_six_polynomials() {
        let basis =
            MultivariateBasis::build(&[GermComponent::GaussianStandard, beta22()], 2).unwrap();
        assert_eq!(basis.n_terms(), 6);
        let idx: Vec<Vec<usize>> = basis.indices().iter().map(|i| i.0.clone()).collect();
        assert_eq!(
            idx,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn four_germs_degree_two_has_fifteen_polynomials() {
        let germ = vec![GermComponent::GaussianStandard; 4];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        assert_eq!(basis.n_terms(), 15);
        assert_eq!(basis.n_terms(), binomial(4 + 2, 2));
    }

    #[test]
    fn degree_zero_basis_is_the_constant() {
        let basis = MultivariateBasis::build(&[beta22()], 0).unwrap();
        assert_eq!(basis.n_terms(), 1);
        assert_eq!(basis.norms(), &[1.0]);
        assert_eq!(basis.eval(&[0.77]).unwrap(), vec![1.0]);
    }

    #[test]
    fn graded_ordering_is_non_decreasing() {
        let germ = vec![GermComponent::GaussianStandard, beta22(), beta22()];
        let basis = MultivariateBasis::build(&germ, 3).unwrap();
        let mut last = 0;
        for idx in basis.indices() {
            assert!(idx.total_degree() >= last);
            last = idx.total_degree();
        }
        assert_eq!(basis.indices()[0].total_degree(), 0);
    }

    #[test]
    fn norms_match_full_tensor_quadrature() {
        let germ = vec![
            GermComponent::GaussianStandard,
            GermComponent::BetaShifted {
                support: (0.0, 1.0),
                shape: (2.0, 5.0),
            },
        ];
        let basis = MultivariateBasis::build(&germ, 3).unwrap();
        // independent route: tensor-product quadrature of psi_k^2
        for (k, idx) in basis.indices().iter().enumerate() {
            let (nodes0, w0) = &basis.quadrature()[0];
            let (nodes1, w1) = &basis.quadrature()[1];
            let mut q = 0.0;
            for (x0, a0) in nodes0.iter().zip(w0) {
                for (x1, a1) in nodes1.iter().zip(w1) {
                    let v = basis.eval(&[*x0, *x1]).unwrap();
                    let _ = idx;
                    q += a0 * a1 * v[k] * v[k];
                }
            }
            let g = basis.norms()[k];
            assert!(
                (q - g).abs() <= 1e-10 * g.max(1e-30),
                "norm mismatch at {k}: {q} vs {g}"
            );
        }
    }

    #[test]
    fn eval_zero_entry_is_one_and_products_factor() {
        let germ = vec![GermComponent::GaussianStandard, beta22()];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let w = [0.3, 0.8];
        let v = basis.eval(&w).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-15);
        // entry for index (1,1) equals the product of the univariate
        // degree-one polynomials
        let p0 = basis.univariate()[0].eval_all(w[0], 1)[1];
        let p1 = basis.univariate()[1].eval_all(w[1], 1)[1];
        let pos = basis
            .indices()
            .iter()
            .position(|i| i.0 == vec![1, 1])
            .unwrap();
        assert_abs_diff_eq!(v[pos], p0 * p1, epsilon = 1e-14);
    }

    #[test]
    fn hermite_eval_at_zero() {
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], 2).unwrap();
        let v = basis.eval(&[0.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], 2).unwrap();
        assert!(basis.eval(&[0.0, 1.0]).is_err());
    }
}
