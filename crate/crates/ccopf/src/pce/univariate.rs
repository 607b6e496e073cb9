use super::{GermComponent, PceError};

/// Univariate orthogonal basis in monic form.
///
/// The polynomials satisfy `p_{k+1}(t) = (t - a_k) p_k(t) - b_k p_{k-1}(t)`
/// with `p_0 = 1`, and the squared norms under the probability measure are
/// `gamma_k = b_1 * ... * b_k` (so `gamma_0 = 1`).
#[derive(Debug, Clone)]
pub struct UnivariateBasis {
    component: GermComponent,
    degree: usize,
    recurrence: Vec<(f64, f64)>,
    norms: Vec<f64>,
}

/// Monic three-term recurrence of the classical family matching the germ
/// component: probabilists' Hermite for the standard Gaussian, Jacobi mapped
/// affinely onto the support for Beta, Legendre for Uniform.
pub fn build_univariate(
    component: &GermComponent,
    degree: usize,
) -> Result<UnivariateBasis, PceError> {
    component.validate()?;
    let recurrence = recurrence_coeffs(component, degree + 1);
    let mut norms = Vec::with_capacity(degree + 1);
    let mut g = 1.0;
    norms.push(g);
    for k in 1..=degree {
        g *= recurrence[k].1;
        norms.push(g);
    }
    Ok(UnivariateBasis {
        component: component.clone(),
        degree,
        recurrence,
        norms,
    })
}

/// Recurrence pairs `(a_k, b_k)` for `k = 0..count-1`. `b_0` is set to 1,
/// reflecting the unit total mass of a probability measure.
pub(crate) fn recurrence_coeffs(component: &GermComponent, count: usize) -> Vec<(f64, f64)> {
    match component {
        GermComponent::GaussianStandard => {
            (0..count).map(|k| (0.0, if k == 0 { 1.0 } else { k as f64 })).collect()
        }
        GermComponent::BetaShifted { support, shape } => {
            jacobi_mapped(shape.0 - 1.0, shape.1 - 1.0, *support, count)
        }
        GermComponent::Uniform { support } => jacobi_mapped(0.0, 0.0, *support, count),
    }
}

/// Monic Jacobi recurrence for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`,
/// mapped affinely onto `[l, u]`.
fn jacobi_mapped(a: f64, b: f64, (l, u): (f64, f64), count: usize) -> Vec<(f64, f64)> {
    let c = 0.5 * (l + u);
    let h = 0.5 * (u - l);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let kf = k as f64;
        let ak = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            let s = 2.0 * kf + a + b;
            (b * b - a * a) / (s * (s + 2.0))
        };
        let bk = if k == 0 {
            1.0
        } else if k == 1 {
            let s = a + b + 2.0;
            4.0 * (a + 1.0) * (b + 1.0) / (s * s * (s + 1.0))
        } else {
            let s = 2.0 * kf + a + b;
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
        };
        let ak_mapped = c + h * ak;
        let bk_mapped = if k == 0 { 1.0 } else { h * h * bk };
        out.push((ak_mapped, bk_mapped));
    }
    out
}

impl UnivariateBasis {
    pub fn component(&self) -> &GermComponent {
        &self.component
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(a_k, b_k)` pairs, available for `k = 0..=degree`.
    pub fn recurrence(&self) -> &[(f64, f64)] {
        &self.recurrence
    }

    /// Squared norms `gamma_0..gamma_degree`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Evaluates `[p_0(t), ..., p_max_deg(t)]` by the recurrence.
    pub fn eval_all(&self, t: f64, max_deg: usize) -> Vec<f64> {
        let rec = if max_deg < self.recurrence.len() {
            self.recurrence.clone()
        } else {
            recurrence_coeffs(&self.component, max_deg + 1)
        };
        eval_monic(&rec, t, max_deg)
    }
}

pub(crate) fn eval_monic(rec: &[(f64, f64)], t: f64, max_deg: usize) -> Vec<f64> {
    let mut vals = Vec::with_capacity(max_deg + 1);
    vals.push(1.0);
    if max_deg >= 1 {
        vals.push(t - rec[0].0);
    }
    for k in 1..max_deg {
        let next = (t - rec[k].0) * vals[k] - rec[k].1 * vals[k - 1];
        vals.push(next);
    }
    vals
}
