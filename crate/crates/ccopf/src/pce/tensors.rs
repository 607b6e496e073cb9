use super::MultivariateBasis;

/// Entries below this magnitude are exact zeros up to quadrature roundoff
/// (e.g. by parity) and are dropped from the sparse storage.
pub const TENSOR_DROP_TOL: f64 = 1e-12;

/// Precomputed scalar products of basis polynomials.
///
/// `triple` holds `<psi_k1 psi_k2, psi_k>` and `quad` holds
/// `<psi_k1 psi_k2 psi_k3, psi_k4>`, both fully symmetric in their indices
/// and stored once per sorted index tuple.
#[derive(Debug, Clone)]
pub struct GalerkinTensors {
    norms: Vec<f64>,
    triple: Vec<([usize; 3], f64)>,
    quad: Vec<([usize; 4], f64)>,
    /// Per projection order `k`: pairs `(k1 <= k2, value)` of the triple
    /// products `<psi_k1 psi_k2, psi_k>`, the layout the projected power flow
    /// consumes.
    by_k: Vec<Vec<(usize, usize, f64)>>,
}

/// Univariate product integrals `<p_a p_b p_c ...>` for one germ component,
/// by Gauss quadrature over the component's rule.
pub(crate) struct UnivariateProducts {
    table: Vec<Vec<f64>>, // per node: values p_0..p_deg
    weights: Vec<f64>,
}

impl UnivariateProducts {
    pub(crate) fn new(basis: &MultivariateBasis, dim: usize, max_deg: usize) -> Self {
        let (nodes, weights) = &basis.quadrature()[dim];
        let table = nodes
            .iter()
            .map(|&x| basis.univariate()[dim].eval_all(x, max_deg))
            .collect();
        Self {
            table,
            weights: weights.clone(),
        }
    }

    pub(crate) fn integral(&self, degs: &[usize]) -> f64 {
        self.table
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| w * degs.iter().map(|&d| p[d]).product::<f64>())
            .sum()
    }
}

/// Computes the triple and quadruple scalar products over the whole index
/// set. Multivariate products factor into per-component univariate integrals.
pub fn compute_tensors(basis: &MultivariateBasis) -> GalerkinTensors {
    let n = basis.n_terms();
    let dims = basis.germ_dim();
    let nd = basis.max_degree();
    let products: Vec<UnivariateProducts> = (0..dims)
        .map(|d| UnivariateProducts::new(basis, d, nd))
        .collect();

    let idx = basis.indices();
    let mut triple = Vec::new();
    for k1 in 0..n {
        for k2 in k1..n {
            for k3 in k2..n {
                let mut v = 1.0;
                for d in 0..dims {
                    v *= products[d].integral(&[idx[k1].0[d], idx[k2].0[d], idx[k3].0[d]]);
                    if v == 0.0 {
                        break;
                    }
                }
                if v.abs() > TENSOR_DROP_TOL {
                    triple.push(([k1, k2, k3], v));
                }
            }
        }
    }

    let mut quad = Vec::new();
    for k1 in 0..n {
        for k2 in k1..n {
            for k3 in k2..n {
                for k4 in k3..n {
                    let mut v = 1.0;
                    for d in 0..dims {
                        v *= products[d].integral(&[
                            idx[k1].0[d],
                            idx[k2].0[d],
                            idx[k3].0[d],
                            idx[k4].0[d],
                        ]);
                        if v == 0.0 {
                            break;
                        }
                    }
                    if v.abs() > TENSOR_DROP_TOL {
                        quad.push(([k1, k2, k3, k4], v));
                    }
                }
            }
        }
    }

    let mut by_k: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); n];
    for &([a, b, c], v) in &triple {
        // distribute each canonical entry to its projection slices,
        // deduplicating coincident (slice, pair) assignments
        let assignments = [(c, (a, b)), (b, (a, c)), (a, (b, c))];
        for (pos, &(k, pair)) in assignments.iter().enumerate() {
            if assignments[..pos].contains(&(k, pair)) {
                continue;
            }
            by_k[k].push((pair.0, pair.1, v));
        }
    }
    for slice in &mut by_k {
        slice.sort_unstable_by_key(|&(a, b, _)| (a, b));
    }

    GalerkinTensors {
        norms: basis.norms().to_vec(),
        triple,
        quad,
        by_k,
    }
}

impl GalerkinTensors {
    pub fn n_terms(&self) -> usize {
        self.norms.len()
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `<psi_k1 psi_k2, psi_k3>` in any index order.
    pub fn triple(&self, k1: usize, k2: usize, k3: usize) -> f64 {
        let mut key = [k1, k2, k3];
        key.sort_unstable();
        self.triple
            .binary_search_by(|probe| probe.0.cmp(&key))
            .map(|i| self.triple[i].1)
            .unwrap_or(0.0)
    }

    /// `<psi_k1 psi_k2 psi_k3, psi_k4>` in any index order.
    pub fn quad(&self, k1: usize, k2: usize, k3: usize, k4: usize) -> f64 {
        let mut key = [k1, k2, k3, k4];
        key.sort_unstable();
        self.quad
            .binary_search_by(|probe| probe.0.cmp(&key))
            .map(|i| self.quad[i].1)
            .unwrap_or(0.0)
    }

    /// Pairs `(k1 <= k2, <psi_k1 psi_k2, psi_k>)` for a projection order `k`.
    pub fn pairs_for(&self, k: usize) -> &[(usize, usize, f64)] {
        &self.by_k[k]
    }

    pub fn triple_entries(&self) -> &[([usize; 3], f64)] {
        &self.triple
    }

    pub fn quad_entries(&self) -> &[([usize; 4], f64)] {
        &self.quad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::{GermComponent, MultivariateBasis};
    use approx::assert_abs_diff_eq;

    fn hermite(nd: usize) -> (MultivariateBasis, GalerkinTensors) {
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], nd).unwrap();
        let t = compute_tensors(&basis);
        (basis, t)
    }

    #[test]
    fn hermite_triple_psi1_psi1_psi2_is_two() {
        // x * x = psi_2 + psi_0, so <psi_1 psi_1, psi_2> = gamma_2 = 2
        let (_, t) = hermite(2);
        assert_abs_diff_eq!(t.triple(1, 1, 2), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_triple_is_one() {
        let basis = MultivariateBasis::build(
            &[
                GermComponent::BetaShifted {
                    support: (0.0, 1.0),
                    shape: (2.0, 5.0),
                },
                GermComponent::GaussianStandard,
            ],
            2,
        )
        .unwrap();
        let t = compute_tensors(&basis);
        assert_abs_diff_eq!(t.triple(0, 0, 0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(t.quad(0, 0, 0, 0), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn uniform_triple_psi1_psi1_psi0_is_gamma1() {
        let basis =
            MultivariateBasis::build(&[GermComponent::Uniform { support: (0.0, 1.0) }], 1).unwrap();
        let t = compute_tensors(&basis);
        assert_abs_diff_eq!(t.triple(1, 1, 0), 1.0 / 12.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_order_slices_reduce_to_norms() {
        let germ = vec![
            GermComponent::GaussianStandard,
            GermComponent::BetaShifted {
                support: (0.0, 1.0),
                shape: (2.0, 2.0),
            },
        ];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let t = compute_tensors(&basis);
        let n = basis.n_terms();
        for k2 in 0..n {
            for k in 0..n {
                let expect = if k2 == k { basis.norms()[k] } else { 0.0 };
                assert_abs_diff_eq!(t.triple(0, k2, k), expect, epsilon = 1e-12);
            }
        }
        for k3 in 0..n {
            for k4 in 0..n {
                let expect = if k3 == k4 { basis.norms()[k4] } else { 0.0 };
                assert_abs_diff_eq!(t.quad(0, 0, k3, k4), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tensors_match_dense_brute_force_on_small_instance() {
        let germ = vec![
            GermComponent::BetaShifted {
                support: (0.0, 1.0),
                shape: (2.0, 5.0),
            },
            GermComponent::GaussianStandard,
        ];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let t = compute_tensors(&basis);
        let n = basis.n_terms();
        // dense oracle: full tensor-product quadrature of the polynomial products
        let (n0, w0) = &basis.quadrature()[0];
        let (n1, w1) = &basis.quadrature()[1];
        let mut evals = Vec::new();
        let mut wts = Vec::new();
        for (x0, a0) in n0.iter().zip(w0) {
            for (x1, a1) in n1.iter().zip(w1) {
                evals.push(basis.eval(&[*x0, *x1]).unwrap());
                wts.push(a0 * a1);
            }
        }
        for k1 in 0..n {
            for k2 in 0..n {
                for k3 in 0..n {
                    let brute: f64 = evals
                        .iter()
                        .zip(&wts)
                        .map(|(p, w)| w * p[k1] * p[k2] * p[k3])
                        .sum();
                    let stored = t.triple(k1, k2, k3);
                    assert!(
                        (brute - stored).abs() <= 1e-10,
                        "triple ({k1},{k2},{k3}): {brute} vs {stored}"
                    );
                    for k4 in 0..n {
                        let brute4: f64 = evals
                            .iter()
                            .zip(&wts)
                            .map(|(p, w)| w * p[k1] * p[k2] * p[k3] * p[k4])
                            .sum();
                        let stored4 = t.quad(k1, k2, k3, k4);
                        assert!(
                            (brute4 - stored4).abs() <= 1e-10,
                            "quad ({k1},{k2},{k3},{k4}): {brute4} vs {stored4}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn getters_are_permutation_invariant() {
        let germ = vec![GermComponent::GaussianStandard, GermComponent::GaussianStandard];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let t = compute_tensors(&basis);
        let v = t.triple(1, 3, 2);
        assert_eq!(v, t.triple(3, 1, 2));
        assert_eq!(v, t.triple(2, 3, 1));
        let q = t.quad(1, 2, 3, 4);
        assert_eq!(q, t.quad(4, 3, 2, 1));
        assert_eq!(q, t.quad(2, 4, 1, 3));
    }

    #[test]
    fn slices_reproduce_the_double_sum() {
        // sum over all ordered pairs equals slice expansion with symmetry
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], 3).unwrap();
        let t = compute_tensors(&basis);
        let n = basis.n_terms();
        let a: Vec<f64> = (0..n).map(|i| 0.3 + 0.1 * i as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| -0.2 + 0.05 * (i as f64).powi(2)).collect();
        for k in 0..n {
            let mut dense = 0.0;
            for k1 in 0..n {
                for k2 in 0..n {
                    dense += t.triple(k1, k2, k) * a[k1] * b[k2];
                }
            }
            let mut sliced = 0.0;
            for &(k1, k2, v) in t.pairs_for(k) {
                sliced += v * (a[k1] * b[k2] + if k1 != k2 { a[k2] * b[k1] } else { 0.0 });
            }
            assert_abs_diff_eq!(dense, sliced, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonality_via_triple_with_zero() {
        let germ = vec![
            GermComponent::BetaShifted {
                support: (0.5, 2.25),
                shape: (2.0, 2.0),
            },
            GermComponent::Uniform { support: (0.0, 1.0) },
        ];
        let basis = MultivariateBasis::build(&germ, 3).unwrap();
        let t = compute_tensors(&basis);
        let n = basis.n_terms();
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    let bound = 1e-10 * basis.norms()[k].max(basis.norms()[l]);
                    assert!(
                        t.triple(0, k, l).abs() < bound.max(1e-14),
                        "orthogonality violated at ({k},{l})"
                    );
                }
            }
        }
    }
}
