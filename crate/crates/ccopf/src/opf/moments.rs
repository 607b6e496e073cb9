use crate::grid::NetworkCase;
use crate::pce::GalerkinTensors;

/// Mean and variance of a scalar expansion: `E[x] = x_0`,
/// `Var[x] = sum_{k>=1} gamma_k x_k^2`.
pub fn scalar_moments(coeffs: &[f64], norms: &[f64]) -> (f64, f64) {
    let mean = coeffs[0];
    let var = coeffs
        .iter()
        .zip(norms)
        .skip(1)
        .map(|(&c, &g)| g * c * c)
        .sum();
    (mean, var)
}

/// Mean and variance of the squared magnitude `a(w)^2 + b(w)^2` from the
/// quadruple products: the mean is `sum_k gamma_k (a_k^2 + b_k^2)` and the
/// second moment the full quadruple contraction of
/// `(aaaa + 2 aabb + bbbb)` terms.
pub fn squared_magnitude_moments(
    a: &[f64],
    b: &[f64],
    tensors: &GalerkinTensors,
) -> (f64, f64) {
    let norms = tensors.norms();
    let mean: f64 = a
        .iter()
        .zip(b)
        .zip(norms)
        .map(|((&ak, &bk), &g)| g * (ak * ak + bk * bk))
        .sum();

    let mut second = 0.0;
    for &(key, v) in tensors.quad_entries() {
        for_each_distinct_permutation(key, |[k1, k2, k3, k4]| {
            second += v
                * (a[k1] * a[k2] * a[k3] * a[k4]
                    + 2.0 * a[k1] * a[k2] * b[k3] * b[k4]
                    + b[k1] * b[k2] * b[k3] * b[k4]);
        });
    }
    // cancellation can drive a tiny negative variance
    (mean, (second - mean * mean).max(0.0))
}

/// Calls `f` once per distinct permutation of the sorted 4-tuple.
fn for_each_distinct_permutation(key: [usize; 4], mut f: impl FnMut([usize; 4])) {
    let mut perms: Vec<[usize; 4]> = Vec::with_capacity(24);
    let order = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    for p in order {
        let t = [key[p[0]], key[p[1]], key[p[2]], key[p[3]]];
        if !perms.contains(&t) {
            perms.push(t);
            f(t);
        }
    }
}

/// Moment report for a full solution: generator powers, squared voltage
/// magnitudes per bus, squared current magnitudes per line.
#[derive(Debug, Clone)]
pub struct SolutionMoments {
    /// (mean, std) per generator.
    pub pg: Vec<(f64, f64)>,
    pub qg: Vec<(f64, f64)>,
    /// (mean, std) of v_i^2 per bus.
    pub v2: Vec<(f64, f64)>,
    /// (mean, std) of i_l^2 per line with a limit, keyed by line index.
    pub i2: Vec<(usize, f64, f64)>,
}

pub fn solution_moments(
    case: &NetworkCase,
    tensors: &GalerkinTensors,
    pg: &[Vec<f64>],
    qg: &[Vec<f64>],
    v_re: &[Vec<f64>],
    v_im: &[Vec<f64>],
) -> SolutionMoments {
    let norms = tensors.norms();
    let scalar = |c: &Vec<f64>| {
        let (m, v) = scalar_moments(c, norms);
        (m, v.sqrt())
    };
    let pg_m = pg.iter().map(scalar).collect();
    let qg_m = qg.iter().map(scalar).collect();
    let v2 = (0..case.n_buses())
        .map(|i| {
            let (m, v) = squared_magnitude_moments(&v_re[i], &v_im[i], tensors);
            (m, v.sqrt())
        })
        .collect();
    let mut i2 = Vec::new();
    for (l, line) in case.lines.iter().enumerate() {
        if line.i_max <= 0.0 {
            continue;
        }
        let fi = case.bus_index(line.from).expect("validated");
        let ti = case.bus_index(line.to).expect("validated");
        let n_terms = norms.len();
        let de: Vec<f64> = (0..n_terms).map(|k| v_re[fi][k] - v_re[ti][k]).collect();
        let df: Vec<f64> = (0..n_terms).map(|k| v_im[fi][k] - v_im[ti][k]).collect();
        let y2 = {
            let den = line.r * line.r + line.x * line.x;
            1.0 / den
        };
        let (m, v) = squared_magnitude_moments(&de, &df, tensors);
        i2.push((l, y2 * m, (y2 * y2 * v).sqrt()));
    }
    SolutionMoments {
        pg: pg_m,
        qg: qg_m,
        v2,
        i2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::{compute_tensors, GermComponent, MultivariateBasis, SquareExpansion};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn scalar_case_from_two_terms() {
        let (mean, var) = scalar_moments(&[2.5, 0.3], &[1.0, 0.25]);
        assert_abs_diff_eq!(mean, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(var.sqrt(), 0.3 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn squared_voltage_mean_matches_monte_carlo() {
        // v_re = 1 + 0.1 w, v_im = 0 under a Gaussian germ:
        // E[v^2] = 1.01 exactly; check against a image-side Monte Carlo oracle
        let basis = MultivariateBasis::build(&[GermComponent::GaussianStandard], 1).unwrap();
        let tensors = compute_tensors(&basis);
        let (mean, var) = squared_magnitude_moments(&[1.0, 0.1], &[0.0, 0.0], &tensors);
        assert_abs_diff_eq!(mean, 1.01, epsilon = 1e-12);

        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let n = 1_000_000usize;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>().clamp(1e-12, 1.0 - 1e-12);
            let w = crate::stats::normal_inverse_cdf(u);
            let v = (1.0 + 0.1 * w).powi(2);
            acc += v;
            acc2 += v * v;
        }
        let mc_mean = acc / n as f64;
        let mc_var = acc2 / n as f64 - mc_mean * mc_mean;
        let se_mean = (mc_var / n as f64).sqrt();
        assert!(
            (mean - mc_mean).abs() < 4.0 * se_mean,
            "mean {mean} vs MC {mc_mean} (se {se_mean})"
        );
        // sample variance of v^2 against the quadruple-product variance
        let se_var = mc_var * (2.0 / (n as f64 - 1.0)).sqrt() * 2.0;
        assert!(
            (var - mc_var).abs() < 4.0 * se_var.max(1e-4),
            "var {var} vs MC {mc_var}"
        );
    }

    #[test]
    fn quadruple_route_equals_square_expansion_route() {
        let germ = vec![
            GermComponent::BetaShifted {
                support: (0.0, 1.0),
                shape: (2.0, 2.0),
            },
            GermComponent::GaussianStandard,
        ];
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let tensors = compute_tensors(&basis);
        let sq = SquareExpansion::build(&basis);
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..5 {
            let a: Vec<f64> = (0..basis.n_terms()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..basis.n_terms()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (m1, v1) = squared_magnitude_moments(&a, &b, &tensors);
            let (m2, v2) = sq.moments_of_square_pair(&a, &b);
            assert_abs_diff_eq!(m1, m2, epsilon = 1e-10);
            assert_abs_diff_eq!(v1, v2, epsilon = 1e-9);
        }
    }
}
