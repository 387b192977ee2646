use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::expr::Point;
use super::profile::RadialProfile;
use super::FieldError;

/// Surface area of the unit sphere in `ℝ^n`.
pub fn sphere_area(n: u32) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(n - 2) / (n - 2) as f64,
    }
}

/// Where the integrals of interest accumulate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailEnd {
    Infinity,
    /// `r → c` from above.
    Above(f64),
    /// `r → c` from below.
    Below(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    /// `|x| > radius` in `ℝ^n`.
    ExteriorBall { n: u32, radius: f64 },
    PuncturedSpace { n: u32 },
    Annulus { n: u32, r_in: f64, r_out: f64 },
    /// Distance variable `δ ∈ (0, depth)` near a flat piece of boundary in `ℝ^n`.
    BoundaryStrip { n: u32, depth: f64 },
    /// `(start, ∞)` with unit measure.
    HalfLine { start: f64 },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<(), FieldError> {
        let bad = |m: &str| Err(FieldError::InvalidDomain(m.to_string()));
        match *self {
            DomainSpec::ExteriorBall { n, radius } => {
                if n < 2 {
                    return bad("dimension must be at least 2");
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return bad("radius must be positive");
                }
            }
            DomainSpec::PuncturedSpace { n } => {
                if n < 2 {
                    return bad("dimension must be at least 2");
                }
            }
            DomainSpec::Annulus { n, r_in, r_out } => {
                if n < 2 {
                    return bad("dimension must be at least 2");
                }
                if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
                    return bad("annulus radii must satisfy 0 < r_in < r_out");
                }
            }
            DomainSpec::BoundaryStrip { n, depth } => {
                if n < 1 {
                    return bad("dimension must be at least 1");
                }
                if !(depth > 0.0) {
                    return bad("strip depth must be positive");
                }
            }
            DomainSpec::HalfLine { start } => {
                if !(start >= 0.0 && start.is_finite()) {
                    return bad("half-line start must be finite and non-negative");
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> u32 {
        match *self {
            DomainSpec::ExteriorBall { n, .. }
            | DomainSpec::PuncturedSpace { n }
            | DomainSpec::Annulus { n, .. }
            | DomainSpec::BoundaryStrip { n, .. } => n,
            DomainSpec::HalfLine { .. } => 1,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(
            self,
            DomainSpec::ExteriorBall { .. }
                | DomainSpec::PuncturedSpace { .. }
                | DomainSpec::Annulus { .. }
        )
    }

    /// Constant prefactor of the measure.
    pub fn sigma(&self) -> f64 {
        if self.is_radial() {
            sphere_area(self.dimension())
        } else {
            1.0
        }
    }

    /// Exponent `m` of the measure `σ r^m dr`.
    pub fn measure_power(&self) -> f64 {
        if self.is_radial() {
            (self.dimension() - 1) as f64
        } else {
            0.0
        }
    }

    pub fn measure(&self, r: f64) -> f64 {
        self.sigma() * r.powf(self.measure_power())
    }

    pub fn measure_at(&self, x: &Point) -> f64 {
        self.measure(x.r)
    }

    pub fn interval(&self) -> (f64, f64) {
        match *self {
            DomainSpec::ExteriorBall { radius, .. } => (radius, f64::INFINITY),
            DomainSpec::PuncturedSpace { .. } => (0.0, f64::INFINITY),
            DomainSpec::Annulus { r_in, r_out, .. } => (r_in, r_out),
            DomainSpec::BoundaryStrip { depth, .. } => (0.0, depth),
            DomainSpec::HalfLine { start } => (start, f64::INFINITY),
        }
    }

    pub fn tail(&self) -> TailEnd {
        match *self {
            DomainSpec::BoundaryStrip { .. } => TailEnd::Above(0.0),
            DomainSpec::Annulus { r_out, .. } => TailEnd::Below(r_out),
            _ => TailEnd::Infinity,
        }
    }

    /// Radius of the inner boundary sphere for exterior-type domains.
    pub fn inner_radius(&self) -> f64 {
        self.interval().0
    }
}

/// Operator data for `-Δ_p + V` on a radial domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub p: f64,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<RadialProfile>,
}

impl ProblemSpec {
    pub fn new(
        p: f64,
        domain: DomainSpec,
        potential: Option<RadialProfile>,
    ) -> Result<Self, FieldError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(FieldError::InvalidDomain(format!("exponent p = {p} must exceed 1")));
        }
        domain.validate()?;
        if let Some(v) = &potential {
            let (lo, hi) = domain.interval();
            if v.r_min() > lo || v.r_max() < hi {
                return Err(FieldError::InvalidDomain(format!(
                    "potential valid on ({}, {}) does not cover ({lo}, {hi})",
                    v.r_min(),
                    v.r_max()
                )));
            }
        }
        Ok(ProblemSpec { p, domain, potential })
    }

    pub fn laplacian(p: f64, domain: DomainSpec) -> Result<Self, FieldError> {
        Self::new(p, domain, None)
    }

    pub fn potential_value(&self, r: f64) -> f64 {
        self.potential.as_ref().map_or(0.0, |v| v.value(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(5), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn domain_validation() {
        assert!(DomainSpec::ExteriorBall { n: 1, radius: 1.0 }.validate().is_err());
        assert!(DomainSpec::Annulus { n: 3, r_in: 2.0, r_out: 1.0 }.validate().is_err());
        assert!(ProblemSpec::laplacian(1.0, DomainSpec::PuncturedSpace { n: 3 }).is_err());
        let d = DomainSpec::ExteriorBall { n: 2, radius: 1.0 };
        assert_relative_eq!(d.measure(3.0), 6.0 * PI, max_relative = 1e-15);
        assert_eq!(DomainSpec::BoundaryStrip { n: 2, depth: 1.0 }.tail(), TailEnd::Above(0.0));
    }

    #[test]
    fn potential_must_cover_domain() {
        let v = RadialProfile::on(crate::fields::expr::Expr::pow(-2.0), 1.0).unwrap();
        let r = ProblemSpec::new(2.0, DomainSpec::PuncturedSpace { n: 3 }, Some(v));
        assert!(r.is_err());
    }
}
