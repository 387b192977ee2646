//! Radial integrals: finite shells, tail verdicts and Morrey norms.

pub(crate) mod asymptotic;
pub mod gk;
pub mod morrey;
pub mod tail;

pub use morrey::{morrey_norm, MorreyGrid};
pub use tail::{classify_tail, tail_report, Shell, ShellScheme, TailReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::HardyPair;
use crate::fields::{DomainSpec, FieldError, Point, RadialProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not integrable at the endpoint r = {at}")]
    SingularEndpoint { at: f64 },
    #[error("integrand is negative ({value}) at r = {r}")]
    NegativeIntegrand { r: f64, value: f64 },
    #[error("integrand is undefined at r = {r}")]
    NonFinite { r: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("Morrey exponent q = {0} is not supported")]
    UnsupportedQ(f64),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How a divergent tail grows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum DivergenceRate {
    /// Shell sums grow like `2^{exponent·k}`.
    PowerLike { exponent: f64 },
    /// Shell sums decay like `k^{-power}` with `power ≤ 1`; `power = 0` is `∫ dr/r`.
    LogLike { power: f64 },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IntegralVerdict {
    Convergent { value: f64, error_bound: f64 },
    Divergent { rate: DivergenceRate },
    Inconclusive { partials: Vec<f64> },
}

impl IntegralVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            IntegralVerdict::Convergent { .. } => "Convergent",
            IntegralVerdict::Divergent { .. } => "Divergent",
            IntegralVerdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn value(&self) -> Option<(f64, f64)> {
        match self {
            IntegralVerdict::Convergent { value, error_bound } => Some((*value, *error_bound)),
            _ => None,
        }
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self, IntegralVerdict::Convergent { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, IntegralVerdict::Divergent { .. })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts always serialize")
    }
}

/// Chunks of the substituted variable `t = ln|r - endpoint|`, at most this far down.
const LOWEST_LOG_OFFSET: f64 = -700.0;

/// `∫_a^b f σ r^m dr` to absolute tolerance `tol`.
///
/// When `a` (or `b`) is the edge of the profile's validity interval the
/// endpoint is treated as a possible power singularity through the substitution
/// `r = a + e^t`, integrating downward in `t` until the chunks become negligible.
pub fn integrate_shell(
    f: &RadialProfile,
    domain: &DomainSpec,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64), QuadError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if !(tol > 0.0) {
        return Err(QuadError::Precondition(format!("tolerance {tol} must be positive")));
    }
    let (lo, hi) = domain.interval();
    if a < f.r_min() || b > f.r_max() || a < lo || b > hi {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let left = a == f.r_min();
    let right = b == f.r_max();
    match (left, right) {
        (true, true) => {
            let mid = 0.5 * (a + b);
            let (v1, e1) = singular_side(f, domain, a, mid - a, 1.0, 0.5 * tol)?;
            let (v2, e2) = singular_side(f, domain, b, b - mid, -1.0, 0.5 * tol)?;
            Ok((v1 + v2, e1 + e2))
        }
        (true, false) => singular_side(f, domain, a, b - a, 1.0, tol),
        (false, true) => singular_side(f, domain, b, b - a, -1.0, tol),
        (false, false) => regular(f, domain, a, b, tol),
    }
}

fn regular(f: &RadialProfile, domain: &DomainSpec, a: f64, b: f64, tol: f64) -> Result<(f64, f64), QuadError> {
    let est = if a > 0.0 && b / a > 4.0 {
        gk::integrate(
            |s| {
                let r = s.exp();
                f.value(r) * domain.measure(r) * r
            },
            a.ln(),
            b.ln(),
            tol,
            0.0,
            2000,
        )
    } else {
        gk::integrate(|r| f.value(r) * domain.measure(r), a, b, tol, 0.0, 2000)
    };
    est.map(|e| (e.value, e.error)).map_err(|e| QuadError::NonFinite { r: e.x })
}

/// Integral over `{anchor + side·d : 0 < d < width}` in the variable `t = ln d`.
fn singular_side(
    f: &RadialProfile,
    domain: &DomainSpec,
    anchor: f64,
    width: f64,
    side: f64,
    tol: f64,
) -> Result<(f64, f64), QuadError> {
    let h = |t: f64| {
        let d = t.exp();
        let x = Point::near(anchor, side * d);
        f.value_at(&x) * domain.measure(x.r) * d
    };
    let singular = QuadError::SingularEndpoint { at: anchor };
    let mut t_hi = width.ln();
    let (mut value, mut error) = (0.0, 0.0);
    let mut previous = f64::INFINITY;
    let mut growing = 0;
    for k in 0.. {
        let w = (1u64 << k.min(9)) as f64;
        let t_lo = (t_hi - w).max(LOWEST_LOG_OFFSET);
        let est = gk::integrate(h, t_lo, t_hi, tol / 16.0, 0.0, 400).map_err(|_| singular.clone())?;
        value += est.value;
        error += est.error;
        let size = est.value.abs();
        if size <= 0.25 * tol && size <= previous {
            error += size;
            return Ok((value, error));
        }
        growing = if size > previous { growing + 1 } else { 0 };
        if growing >= 3 || t_lo <= LOWEST_LOG_OFFSET {
            return Err(singular);
        }
        previous = size;
        t_hi = t_lo;
    }
    unreachable!()
}

/// `∫ W φ^p dμ` (or `∫ W φ φ* dμ`) over the tail of the pair's domain beyond `rho`.
pub fn weighted_mass(pair: &HardyPair, rho: f64) -> Result<IntegralVerdict, QuadError> {
    weighted_mass_report(pair, rho, &ShellScheme::default()).map(|r| r.verdict)
}

pub fn weighted_mass_report(pair: &HardyPair, rho: f64, scheme: &ShellScheme) -> Result<TailReport, QuadError> {
    let (lo, _) = pair.problem.domain.interval();
    if pair.problem.domain.tail() == crate::fields::TailEnd::Infinity && !(rho > lo) {
        return Err(QuadError::Precondition(format!("ρ = {rho} must exceed the inner radius {lo}")));
    }
    let integrand = pair.weighted_integrand()?;
    tail_report(&integrand, &pair.problem.domain, rho, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{parse_expr, Expr};
    use std::f64::consts::{E, PI};

    fn profile(src: &str, r_min: f64) -> RadialProfile {
        RadialProfile::on(parse_expr(src).unwrap(), r_min).unwrap()
    }

    #[test]
    fn shell_examples() {
        let line = DomainSpec::HalfLine { start: 0.0 };
        let (v, e) = integrate_shell(&profile("r^-2", 0.0), &line, 1.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() <= 1e-12 && e <= 1e-12);
        let plane = DomainSpec::ExteriorBall { n: 2, radius: 1.0 };
        let leray = profile("0.25*r^-2*log(r/1)^-2", 1.0);
        let (v, _) = integrate_shell(&leray, &plane, E, E * E, 1e-12).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-11);
        let zero = RadialProfile::on(Expr::zero(), 0.0).unwrap();
        assert_eq!(integrate_shell(&zero, &line, 1.0, 3.0, 1e-12).unwrap().0, 0.0);
    }

    #[test]
    fn singular_endpoints() {
        let line = DomainSpec::HalfLine { start: 1.0 };
        // ∫_1^2 (r-1)^{-1/2} dr = 2
        let f = profile("(r-1)^-0.5", 1.0);
        let (v, e) = integrate_shell(&f, &line, 1.0, 2.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v} ± {e}");
        let g = profile("(r-1)^-2", 1.0);
        assert!(matches!(
            integrate_shell(&g, &line, 1.0, 2.0, 1e-10),
            Err(QuadError::SingularEndpoint { .. })
        ));
        // right endpoint: ∫_0^1 (1-r)^{-1/2} dr written on (0, 1)
        let h = RadialProfile::new(parse_expr("(r-1)^2").unwrap(), 0.0, 1.0).unwrap();
        let (v, _) = integrate_shell(&h, &DomainSpec::HalfLine { start: 0.0 }, 0.5, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_json_shape() {
        let v = IntegralVerdict::Divergent { rate: DivergenceRate::LogLike { power: 1.0 } };
        let s = v.to_json();
        assert!(s.contains("\"kind\":\"Divergent\"") && s.contains("\"class\":\"LogLike\""), "{s}");
        let c = IntegralVerdict::Convergent { value: 1.5, error_bound: 1e-9 };
        assert_eq!(serde_json::from_str::<IntegralVerdict>(&c.to_json()).unwrap(), c);
    }
}
