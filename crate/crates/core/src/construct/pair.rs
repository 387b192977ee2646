use serde::{Deserialize, Serialize};

use crate::fields::expr::{prod, rpow, scale};
use crate::fields::{FieldError, ProblemSpec, RadialProfile};
use crate::quad::IntegralVerdict;

/// Which conclusion a pair exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Ground state of a critical operator against a Hardy-weight on the complement.
    CriticalComplement,
    /// Minimal-growth solution against a Hardy-weight of a subcritical operator.
    SubcriticalMinimalGrowth,
    /// Product measure `φ φ*` of the linear case.
    LinearProduct,
    /// Ground state of `L - W` for an optimal `W`.
    NullCriticality,
    /// λ∞ trace against the null-criticality verdict.
    OptimalityProbe,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::CriticalComplement => "CriticalComplement",
            Role::SubcriticalMinimalGrowth => "SubcriticalMinimalGrowth",
            Role::LinearProduct => "LinearProduct",
            Role::NullCriticality => "NullCriticality",
            Role::OptimalityProbe => "OptimalityProbe",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expected {
    Convergent,
    Divergent,
}

impl Expected {
    pub fn as_str(&self) -> &'static str {
        match self {
            Expected::Convergent => "Convergent",
            Expected::Divergent => "Divergent",
        }
    }

    pub fn matches(&self, verdict: &IntegralVerdict) -> bool {
        match self {
            Expected::Convergent => verdict.is_convergent(),
            Expected::Divergent => verdict.is_divergent(),
        }
    }
}

/// A weight `W` with the reference function `φ` whose `∫ W φ^p` is in question.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyPair {
    pub label: String,
    pub role: Role,
    pub problem: ProblemSpec,
    pub weight: RadialProfile,
    pub reference: RadialProfile,
    /// Second reference `φ*` for the product measure of the linear case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<RadialProfile>,
    pub exponent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
    /// Default inner radius of the tail (a depth for strips).
    pub rho: f64,
    /// Leading constant of the weight; `weight / hardy_constant` is its shape.
    pub hardy_constant: f64,
}

impl HardyPair {
    /// `W φ^p`, or `W φ φ*` when a dual reference is present.
    pub fn weighted_integrand(&self) -> Result<RadialProfile, FieldError> {
        let mut factors = vec![self.weight.form().clone()];
        let mut lo = self.weight.r_min().max(self.reference.r_min());
        let mut hi = self.weight.r_max().min(self.reference.r_max());
        match &self.dual {
            Some(dual) => {
                factors.push(self.reference.form().clone());
                factors.push(dual.form().clone());
                lo = lo.max(dual.r_min());
                hi = hi.min(dual.r_max());
            }
            None => factors.push(rpow(self.exponent, self.reference.form().clone())),
        }
        RadialProfile::new(prod(factors), lo, hi)
    }

    /// `W / C` for the leading constant `C`.
    pub fn shape(&self) -> RadialProfile {
        self.weight
            .map(|w| scale(1.0 / self.hardy_constant, w))
            .expect("a rescaled weight stays well formed")
    }

    /// The same pair with the weight multiplied by `c > 0`.
    pub fn with_scaled_weight(&self, c: f64) -> HardyPair {
        let weight = self.weight.map(|w| scale(c, w)).expect("a rescaled weight stays well formed");
        HardyPair { weight, hardy_constant: self.hardy_constant * c, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pairs always serialize")
    }
}
