use super::OpfError;
use crate::stats::normal_inverse_cdf;
use serde::{Deserialize, Serialize};

/// Rule mapping an acceptable violation probability to the moment weight
/// lambda in the reformulated chance constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum LambdaRule {
    /// Exact for Gaussian quantities, a good heuristic otherwise.
    GaussianInverseCdf,
    /// Distribution-free one-sided Chebyshev bound, sqrt((1-eps)/eps).
    ChebyshevOneSided,
    Fixed(f64),
}

/// Acceptable violation probabilities per constraint class and the lambda
/// rule shared by all of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskConfig {
    pub epsilon_p: f64,
    pub epsilon_q: f64,
    pub epsilon_v: f64,
    pub epsilon_i: f64,
    pub lambda_rule: LambdaRule,
}

impl RiskConfig {
    pub fn uniform(epsilon: f64, lambda_rule: LambdaRule) -> Self {
        Self {
            epsilon_p: epsilon,
            epsilon_q: epsilon,
            epsilon_v: epsilon,
            epsilon_i: epsilon,
            lambda_rule,
        }
    }

    pub fn validate(&self) -> Result<(), OpfError> {
        for (name, eps) in [
            ("epsilon_p", self.epsilon_p),
            ("epsilon_q", self.epsilon_q),
            ("epsilon_v", self.epsilon_v),
            ("epsilon_i", self.epsilon_i),
        ] {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(OpfError::Risk(format!(
                    "{name} must lie in (0, 0.5], got {eps}"
                )));
            }
        }
        Ok(())
    }

    pub fn lambda_p(&self) -> Result<f64, OpfError> {
        lambda_of_epsilon(self.lambda_rule, self.epsilon_p)
    }
    pub fn lambda_q(&self) -> Result<f64, OpfError> {
        lambda_of_epsilon(self.lambda_rule, self.epsilon_q)
    }
    pub fn lambda_v(&self) -> Result<f64, OpfError> {
        lambda_of_epsilon(self.lambda_rule, self.epsilon_v)
    }
    pub fn lambda_i(&self) -> Result<f64, OpfError> {
        lambda_of_epsilon(self.lambda_rule, self.epsilon_i)
    }
}

pub fn lambda_of_epsilon(rule: LambdaRule, epsilon: f64) -> Result<f64, OpfError> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(OpfError::Risk(format!(
            "epsilon must lie in (0, 0.5], got {epsilon}"
        )));
    }
    Ok(match rule {
        LambdaRule::GaussianInverseCdf => normal_inverse_cdf(1.0 - epsilon),
        LambdaRule::ChebyshevOneSided => ((1.0 - epsilon) / epsilon).sqrt(),
        LambdaRule::Fixed(v) => v,
    })
}
