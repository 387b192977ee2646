use super::ConstructError;
use crate::fields::{sphere_area, RadialProfile};
use crate::quad::gk;

const ABS_TOL: f64 = 1e-12;

/// Newtonian potential of a compactly supported radial density in `ℝ^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenPotential {
    density: RadialProfile,
    n: u32,
    support: f64,
    mass: f64,
}

/// The density is taken to vanish beyond the end of its validity interval.
pub fn green_potential_radial(density: &RadialProfile, n: u32) -> Result<GreenPotential, ConstructError> {
    if n < 3 {
        return Err(ConstructError::UnsupportedDimension(n));
    }
    if density.r_min() > 0.0 || !density.r_max().is_finite() {
        return Err(ConstructError::Precondition(format!(
            "density must live on (0, s_max), got ({}, {})",
            density.r_min(),
            density.r_max()
        )));
    }
    let mut g = GreenPotential { density: density.clone(), n, support: density.r_max(), mass: 0.0 };
    let moment = g.inner_moment(g.support)?;
    g.mass = sphere_area(n) * moment;
    for k in 0..=32 {
        let s = g.support * k as f64 / 32.0;
        let v = density.value(s.clamp(1e-300, g.support * (1.0 - 1e-15)));
        if v < 0.0 {
            return Err(ConstructError::Precondition(format!("density is negative at s = {s}")));
        }
    }
    Ok(g)
}

impl GreenPotential {
    /// Total mass `∫ ρ dx`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    /// `M c_N` with `c_N = 1 / ((N-2) σ_{N-1})`: the coefficient of `r^{2-N}` outside the support.
    pub fn exterior_coefficient(&self) -> f64 {
        self.mass / ((self.n - 2) as f64 * sphere_area(self.n))
    }

    fn quad(&self, a: f64, b: f64, power: f64) -> Result<f64, ConstructError> {
        gk::integrate(|s| self.density.value(s) * s.powf(power), a, b, ABS_TOL, 1e-14, 500)
            .map(|e| e.value)
            .map_err(|e| ConstructError::Quadrature(e.x))
    }

    fn inner_moment(&self, r: f64) -> Result<f64, ConstructError> {
        self.quad(0.0, r.min(self.support), (self.n - 1) as f64)
    }

    pub fn value(&self, r: f64) -> Result<f64, ConstructError> {
        if !(r > 0.0) {
            return Err(ConstructError::Precondition(format!("radius {r} must be positive")));
        }
        let nd = self.n as f64;
        if r >= self.support {
            return Ok(self.exterior_coefficient() * r.powf(2.0 - nd));
        }
        let inner = r.powf(2.0 - nd) * self.inner_moment(r)?;
        let outer = self.quad(r, self.support, 1.0)?;
        Ok((inner + outer) / (nd - 2.0))
    }

    /// Radial Laplacian by fourth-order differences with step `h`.
    pub fn laplacian_fd(&self, r: f64, h: f64) -> Result<f64, ConstructError> {
        let u = |x: f64| self.value(x);
        let (a, b, c, d, e) = (u(r - 2.0 * h)?, u(r - h)?, u(r)?, u(r + h)?, u(r + 2.0 * h)?);
        let second = (-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h);
        let first = (a - 8.0 * b + 8.0 * d - e) / (12.0 * h);
        Ok(second + (self.n - 1) as f64 * first / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_expr;
    use std::f64::consts::PI;

    /// `c (1 - s^2)^3` on `(0, 1)` with unit mass in `ℝ^3`.
    fn bump() -> RadialProfile {
        // ∫_0^1 (1-s^2)^3 s^2 ds = 16/315
        let c = 315.0 / (16.0 * 4.0 * PI);
        RadialProfile::new(parse_expr(&format!("{c}*(1-r^2)^3")).unwrap(), 0.0, 1.0).unwrap()
    }

    #[test]
    fn point_mass_outside_the_support() {
        let g = green_potential_radial(&bump(), 3).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-12);
        assert!((g.value(2.0).unwrap() - 1.0 / (8.0 * PI)).abs() < 1e-12);
        // continuity across the edge of the support
        let inside = g.value(1.0 - 1e-9).unwrap();
        assert!((inside - g.value(1.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn recovers_the_density() {
        let rho = bump();
        let g = green_potential_radial(&rho, 3).unwrap();
        for r in [0.2, 0.5, 0.8] {
            let lap = g.laplacian_fd(r, 1e-2).unwrap();
            assert!((-lap - rho.value(r)).abs() <= 1e-4 * rho.value(r), "r = {r}");
        }
    }

    #[test]
    fn rejects_the_plane() {
        assert!(matches!(green_potential_radial(&bump(), 2), Err(ConstructError::UnsupportedDimension(2))));
        let zero = RadialProfile::new(parse_expr("0").unwrap(), 0.0, 1.0).unwrap();
        assert_eq!(green_potential_radial(&zero, 4).unwrap().value(0.5).unwrap(), 0.0);
    }
}
