use super::PceError;
use serde::{Deserialize, Serialize};

/// One independent component of the stochastic germ.
///
/// `BetaShifted { support: (l, u), shape: (alpha, beta) }` is the Beta law on
/// `[l, u]` with density proportional to `(u - w)^(alpha-1) (w - l)^(beta-1)`,
/// i.e. `alpha` shapes the upper end of the support and `beta` the lower end,
/// so the mean is `l + (u - l) * beta / (alpha + beta)`. This matches the
/// Jacobi weight `(1-x)^(alpha-1) (1+x)^(beta-1)` under the affine map from
/// `[-1, 1]` onto `[l, u]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GermComponent {
    GaussianStandard,
    BetaShifted { support: (f64, f64), shape: (f64, f64) },
    Uniform { support: (f64, f64) },
}

impl GermComponent {
    pub fn validate(&self) -> Result<(), PceError> {
        match self {
            GermComponent::GaussianStandard => Ok(()),
            GermComponent::BetaShifted { support, shape } => {
                check_support(*support)?;
                let (a, b) = *shape;
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(PceError::InvalidComponent(format!(
                        "Beta shape parameters must be positive, got ({a}, {b})"
                    )));
                }
                Ok(())
            }
            GermComponent::Uniform { support } => check_support(*support),
        }
    }

    /// Mean of the component under its probability measure.
    pub fn mean(&self) -> f64 {
        match self {
            GermComponent::GaussianStandard => 0.0,
            GermComponent::BetaShifted {
                support: (l, u),
                shape: (a, b),
            } => l + (u - l) * b / (a + b),
            GermComponent::Uniform { support: (l, u) } => 0.5 * (l + u),
        }
    }

    /// Standard deviation of the component.
    pub fn std_dev(&self) -> f64 {
        match self {
            GermComponent::GaussianStandard => 1.0,
            GermComponent::BetaShifted {
                support: (l, u),
                shape: (a, b),
            } => {
                let s = a + b;
                (u - l) * (a * b / (s * s * (s + 1.0))).sqrt()
            }
            GermComponent::Uniform { support: (l, u) } => (u - l) / 12f64.sqrt(),
        }
    }
}

fn check_support(support: (f64, f64)) -> Result<(), PceError> {
    let (l, u) = support;
    if !(l < u) || !l.is_finite() || !u.is_finite() {
        return Err(PceError::InvalidComponent(format!(
            "support must satisfy l < u, got [{l}, {u}]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn beta_moments_follow_the_shape_convention() {
        let c = GermComponent::BetaShifted {
            support: (0.0, 1.0),
            shape: (2.0, 5.0),
        };
        assert_abs_diff_eq!(c.mean(), 5.0 / 7.0, epsilon = 1e-15);
        let var: f64 = 10.0 / (49.0 * 8.0);
        assert_abs_diff_eq!(c.std_dev(), var.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn symmetric_beta_std() {
        let c = GermComponent::BetaShifted {
            support: (0.5, 2.25),
            shape: (2.0, 2.0),
        };
        assert_abs_diff_eq!(c.mean(), 1.375, epsilon = 1e-15);
        assert_abs_diff_eq!(c.std_dev(), 1.75 / 20f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_degenerate_support() {
        let c = GermComponent::Uniform { support: (1.0, 1.0) };
        assert!(c.validate().is_err());
    }
}
