use super::{GridError, NetworkCase};
use crate::pce::{GermComponent, MultivariateBasis};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Stochastic germ declaration from the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermConfig {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<(f64, f64)>,
}

impl GermConfig {
    pub fn to_component(&self) -> Result<GermComponent, GridError> {
        let component = match self.family.as_str() {
            "gaussian" => {
                if self.support.is_some() || self.shape.is_some() {
                    return Err(GridError::Uncertainty(
                        "gaussian germ carries no support or shape".into(),
                    ));
                }
                GermComponent::GaussianStandard
            }
            "beta" => GermComponent::BetaShifted {
                support: self.support.ok_or_else(|| {
                    GridError::Uncertainty("beta germ needs a support".into())
                })?,
                shape: self
                    .shape
                    .ok_or_else(|| GridError::Uncertainty("beta germ needs shape parameters".into()))?,
            },
            "uniform" => GermComponent::Uniform {
                support: self.support.ok_or_else(|| {
                    GridError::Uncertainty("uniform germ needs a support".into())
                })?,
            },
            other => {
                return Err(GridError::Uncertainty(format!(
                    "unknown germ family {other:?}"
                )))
            }
        };
        component.validate()?;
        Ok(component)
    }

    pub fn from_component(c: &GermComponent) -> Self {
        match c {
            GermComponent::GaussianStandard => GermConfig {
                family: "gaussian".into(),
                support: None,
                shape: None,
            },
            GermComponent::BetaShifted { support, shape } => GermConfig {
                family: "beta".into(),
                support: Some(*support),
                shape: Some(*shape),
            },
            GermComponent::Uniform { support } => GermConfig {
                family: "uniform".into(),
                support: Some(*support),
                shape: None,
            },
        }
    }
}

/// One uncertain active-power demand. The demand at `bus` is driven by germ
/// component `germ` (1-based). Its spread comes from exactly one of:
/// `support` (the demand is the germ mapped affinely onto `[l, u]`),
/// `std` (absolute), or `rel_std` (fraction of the nominal case demand).
/// `p_coeffs`/`q_coeffs` give raw injection coefficient vectors instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionConfig {
    pub bus: usize,
    #[serde(default)]
    pub germ: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_coeffs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyConfig {
    pub germ: Vec<GermConfig>,
    #[serde(default)]
    pub injection: Vec<InjectionConfig>,
}

impl UncertaintyConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, GridError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| GridError::Uncertainty(e.to_string()))
    }

    pub fn germ_components(&self) -> Result<Vec<GermComponent>, GridError> {
        self.germ.iter().map(|g| g.to_component()).collect()
    }
}

/// Per-bus PCE coefficient vectors of the uncontrollable injections, in the
/// sign convention of net injections: an uncertain demand `d` enters as
/// `p_u = -d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySpec {
    pub germ: Vec<GermComponent>,
    /// K+1 coefficients per dense bus index.
    pub p_inj: Vec<Vec<f64>>,
    pub q_inj: Vec<Vec<f64>>,
}

impl UncertaintySpec {
    /// Deterministic spec: nominal demands at order zero, nothing else.
    pub fn deterministic(case: &NetworkCase, basis: &MultivariateBasis) -> Self {
        let n_terms = basis.n_terms();
        let mut p_inj = Vec::with_capacity(case.n_buses());
        let mut q_inj = Vec::with_capacity(case.n_buses());
        for b in &case.buses {
            let mut p = vec![0.0; n_terms];
            let mut q = vec![0.0; n_terms];
            p[0] = -b.p_d_nom;
            q[0] = -b.q_d_nom;
            p_inj.push(p);
            q_inj.push(q);
        }
        Self {
            germ: basis.germ().to_vec(),
            p_inj,
            q_inj,
        }
    }

    /// Realized injections at a germ sample, via the basis polynomials.
    pub fn realize(&self, basis: &MultivariateBasis, omega: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let psi = basis.eval(omega).expect("dimension checked by caller");
        let dot = |c: &Vec<f64>| c.iter().zip(&psi).map(|(a, b)| a * b).sum::<f64>();
        (
            self.p_inj.iter().map(dot).collect(),
            self.q_inj.iter().map(dot).collect(),
        )
    }

    /// Mean and standard deviation of the demand (-p_u) at a dense bus index.
    pub fn demand_moments(&self, basis: &MultivariateBasis, bus_idx: usize) -> (f64, f64) {
        let c = &self.p_inj[bus_idx];
        let mean = -c[0];
        let var: f64 = c
            .iter()
            .zip(basis.norms())
            .skip(1)
            .map(|(&x, &g)| g * x * x)
            .sum();
        (mean, var.sqrt())
    }
}

pub fn load_uncertainty(
    path: impl AsRef<Path>,
    case: &NetworkCase,
    basis: &MultivariateBasis,
) -> Result<UncertaintySpec, GridError> {
    let config = UncertaintyConfig::from_path(path)?;
    build_uncertainty(&config, case, basis)
}

pub fn build_uncertainty(
    config: &UncertaintyConfig,
    case: &NetworkCase,
    basis: &MultivariateBasis,
) -> Result<UncertaintySpec, GridError> {
    let germ = config.germ_components()?;
    if germ != basis.germ() {
        return Err(GridError::Uncertainty(
            "germ in the uncertainty config does not match the basis".into(),
        ));
    }
    let n_terms = basis.n_terms();
    let mut spec = UncertaintySpec::deterministic(case, basis);

    for inj in &config.injection {
        let bus_idx = case.bus_index(inj.bus).ok_or_else(|| {
            GridError::Uncertainty(format!("injection references unknown bus {}", inj.bus))
        })?;

        if let Some(p_coeffs) = &inj.p_coeffs {
            if p_coeffs.len() != n_terms {
                return Err(GridError::Uncertainty(format!(
                    "bus {}: p_coeffs has length {}, basis needs {}",
                    inj.bus,
                    p_coeffs.len(),
                    n_terms
                )));
            }
            spec.p_inj[bus_idx] = p_coeffs.clone();
            if let Some(q_coeffs) = &inj.q_coeffs {
                if q_coeffs.len() != n_terms {
                    return Err(GridError::Uncertainty(format!(
                        "bus {}: q_coeffs has length {}, basis needs {}",
                        inj.bus,
                        q_coeffs.len(),
                        n_terms
                    )));
                }
                spec.q_inj[bus_idx] = q_coeffs.clone();
            }
            continue;
        }

        let germ_no = inj.germ.ok_or_else(|| {
            GridError::Uncertainty(format!("bus {}: injection needs a germ index", inj.bus))
        })?;
        if germ_no == 0 || germ_no > germ.len() {
            return Err(GridError::Uncertainty(format!(
                "bus {}: germ index {} out of range 1..={}",
                inj.bus,
                germ_no,
                germ.len()
            )));
        }
        let dim = germ_no - 1;
        let component = &germ[dim];

        // mean and absolute sigma of the demand
        let (mean, sigma) = match (inj.support, inj.std, inj.rel_std) {
            (Some((l, u)), None, None) => {
                let (gl, gu) = match component {
                    GermComponent::BetaShifted { support, .. }
                    | GermComponent::Uniform { support } => *support,
                    GermComponent::GaussianStandard => {
                        return Err(GridError::Uncertainty(format!(
                            "bus {}: support mapping needs a bounded germ",
                            inj.bus
                        )))
                    }
                };
                let scale = (u - l) / (gu - gl);
                let mean = l + scale * (component.mean() - gl);
                (mean, scale * component.std_dev())
            }
            (None, Some(std), None) => (case.buses[bus_idx].p_d_nom, std),
            (None, None, Some(s)) => {
                let nom = case.buses[bus_idx].p_d_nom;
                (nom, s * nom)
            }
            _ => {
                return Err(GridError::Uncertainty(format!(
                    "bus {}: specify exactly one of support, std, rel_std",
                    inj.bus
                )))
            }
        };

        let mut p = vec![0.0; n_terms];
        p[0] = -mean;
        if sigma != 0.0 {
            if basis.max_degree() < 1 {
                return Err(GridError::Uncertainty(format!(
                    "bus {}: degree-0 basis cannot carry a nonzero std",
                    inj.bus
                )));
            }
            let k1 = basis.first_order_index(dim).expect("degree >= 1");
            p[k1] = -sigma / basis.norms()[k1].sqrt();
        }
        spec.p_inj[bus_idx] = p;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_case_str;
    use crate::pce::MultivariateBasis;
    use approx::assert_abs_diff_eq;

    fn case5() -> NetworkCase {
        parse_case_str(include_str!("../../../../cases/case5.case"), "case5").unwrap()
    }

    fn beta_config() -> UncertaintyConfig {
        toml::from_str(
            r#"
            [[germ]]
            family = "beta"
            support = [0.0, 1.0]
            shape = [2.0, 2.0]

            [[injection]]
            bus = 2
            germ = 1
            support = [0.50, 2.25]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn beta_demand_reproduces_declared_moments() {
        let case = case5();
        let config = beta_config();
        let germ = config.germ_components().unwrap();
        let basis = MultivariateBasis::build(&germ, 2).unwrap();
        let spec = build_uncertainty(&config, &case, &basis).unwrap();
        let (mean, sigma) = spec.demand_moments(&basis, case.bus_index(2).unwrap());
        assert_abs_diff_eq!(mean, 1.375, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma, 1.75 / 20f64.sqrt(), epsilon = 1e-12);
        // matches the rounded values 1.375 and 0.391
        assert!((sigma - 0.391).abs() < 5e-4);
        // sign convention: the uncertain injection is the negative demand
        assert!(spec.p_inj[case.bus_index(2).unwrap()][0] < 0.0);
    }

    #[test]
    fn zero_rel_std_is_deterministic() {
        let case = case5();
        let config: UncertaintyConfig = toml::from_str(
            r#"
            [[germ]]
            family = "gaussian"

            [[injection]]
            bus = 3
            germ = 1
            rel_std = 0.0
            "#,
        )
        .unwrap();
        let basis = MultivariateBasis::build(&config.germ_components().unwrap(), 2).unwrap();
        let spec = build_uncertainty(&config, &case, &basis).unwrap();
        let idx = case.bus_index(3).unwrap();
        assert_eq!(spec.p_inj[idx][0], -3.0);
        assert!(spec.p_inj[idx][1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shared_germ_component_affects_multiple_buses() {
        let case = parse_case_str(include_str!("../../../../cases/case30.case"), "case30").unwrap();
        let config: UncertaintyConfig = toml::from_str(
            r#"
            [[germ]]
            family = "beta"
            support = [0.0, 1.0]
            shape = [2.0, 2.0]

            [[germ]]
            family = "gaussian"

            [[injection]]
            bus = 2
            germ = 1
            rel_std = 0.15

            [[injection]]
            bus = 3
            germ = 1
            rel_std = 0.15
            "#,
        )
        .unwrap();
        let basis = MultivariateBasis::build(&config.germ_components().unwrap(), 2).unwrap();
        let spec = build_uncertainty(&config, &case, &basis).unwrap();
        let k1 = basis.first_order_index(0).unwrap();
        let i2 = case.bus_index(2).unwrap();
        let i3 = case.bus_index(3).unwrap();
        assert!(spec.p_inj[i2][k1] != 0.0);
        assert!(spec.p_inj[i3][k1] != 0.0);
        // both moments check out against declared nominal and rel_std
        for (bus, idx) in [(2usize, i2), (3usize, i3)] {
            let (mean, sigma) = spec.demand_moments(&basis, idx);
            let nom = case.buses[idx].p_d_nom;
            assert!(
                (mean - nom).abs() <= 1e-10 * nom.abs(),
                "bus {bus} mean {mean} vs nominal {nom}"
            );
            assert!((sigma - 0.15 * nom).abs() <= 1e-10 * nom.abs());
        }
    }

    #[test]
    fn unknown_germ_index_is_rejected() {
        let case = case5();
        let config: UncertaintyConfig = toml::from_str(
            r#"
            [[germ]]
            family = "gaussian"

            [[injection]]
            bus = 2
            germ = 3
            rel_std = 0.1
            "#,
        )
        .unwrap();
        let basis = MultivariateBasis::build(&config.germ_components().unwrap(), 1).unwrap();
        assert!(matches!(
            build_uncertainty(&config, &case, &basis),
            Err(GridError::Uncertainty(_))
        ));
    }

    #[test]
    fn coefficient_length_mismatch_is_rejected() {
        let case = case5();
        let config: UncertaintyConfig = toml::from_str(
            r#"
            [[germ]]
            family = "gaussian"

            [[injection]]
            bus = 2
            p_coeffs = [1.0, 0.5]
            "#,
        )
        .unwrap();
        let basis = MultivariateBasis::build(&config.germ_components().unwrap(), 2).unwrap();
        assert!(matches!(
            build_uncertainty(&config, &case, &basis),
            Err(GridError::Uncertainty(_))
        ));
    }
}
