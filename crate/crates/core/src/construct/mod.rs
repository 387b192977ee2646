//! Hardy-weights built from positive p-harmonic profiles, the linear
//! logarithmic weight, Green potentials and the iterated-log family.

mod catalogue;
mod green;
mod pair;

pub use catalogue::{catalogue_entry, catalogue_ids, example_catalogue};
pub use green::{green_potential_radial, GreenPotential};
pub use pair::{Expected, HardyPair, Role};

use thiserror::Error;

use crate::fields::expr::{prod, rpow, scale, sum};
use crate::fields::{Expr, FieldError, ProblemSpec, RadialProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Green potential needs dimension at least 3, got {0}")]
    UnsupportedDimension(u32),
    #[error("quadrature failed at r = {0}")]
    Quadrature(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A positive p-harmonic `G` with its limits `gamma1` at the inner boundary and
/// `gamma2` at infinity (either may be `f64::INFINITY`).
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicProfileSpec {
    pub g: RadialProfile,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl HarmonicProfileSpec {
    pub fn new(g: RadialProfile, gamma1: f64, gamma2: f64) -> Result<Self, ConstructError> {
        let ok = |x: f64| x >= 0.0;
        if !ok(gamma1) || !ok(gamma2) || gamma1 == gamma2 {
            return Err(ConstructError::Precondition(format!(
                "limits {gamma1} and {gamma2} must be distinct points of [0, ∞]"
            )));
        }
        let spec = HarmonicProfileSpec { g, gamma1, gamma2 };
        spec.slope_sign()?;
        Ok(spec)
    }

    pub fn m(&self) -> f64 {
        self.gamma1.min(self.gamma2)
    }

    pub fn big_m(&self) -> f64 {
        self.gamma1.max(self.gamma2)
    }

    /// Sign of `G'`, checked to be constant on sample radii.
    fn slope_sign(&self) -> Result<f64, ConstructError> {
        let radii = probe_radii(self.g.r_min(), self.g.r_max(), 64);
        let first = self.g.slope(radii[0]).signum();
        for &r in &radii {
            let s = self.g.slope(r);
            if !(s != 0.0 && s.signum() == first) {
                return Err(ConstructError::Precondition(format!(
                    "G = {} is not strictly monotone (G'({r}) = {s})",
                    self.g
                )));
            }
        }
        Ok(first)
    }
}

/// `v1`, the supersolution `v = v1^{(p-1)/p}` and the weight `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct Supersolution {
    pub v1: RadialProfile,
    pub v: RadialProfile,
    pub weight: RadialProfile,
}

/// Radii inside `(lo, hi)`, geometric in the distance to `lo` and, for finite
/// `hi`, in the distance to `hi`.
pub(crate) fn probe_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    if hi.is_infinite() {
        let unit = lo.max(1.0);
        (0..count)
            .map(|k| lo + unit * 10f64.powf(-2.0 + 8.0 * k as f64 / (count - 1) as f64))
            .collect()
    } else {
        let w = hi - lo;
        (0..count)
            .map(|k| lo + w * (0.01 + 0.98 * k as f64 / (count - 1) as f64))
            .collect()
    }
}

fn coefficient(p: f64) -> f64 {
    ((p - 1.0) / p).powf(p)
}

/// Weight for a bounded harmonic profile, `M < ∞`.
pub fn supersolution_weight_finite(h: &HarmonicProfileSpec, p: f64) -> Result<Supersolution, ConstructError> {
    let (m, big_m) = (h.m(), h.big_m());
    if big_m.is_infinite() {
        return Err(ConstructError::Precondition("M = ∞; use the unbounded construction".into()));
    }
    if !(p > 1.0) || (m > 0.0 && p < 2.0) {
        return Err(ConstructError::Precondition(format!("needs m = 0 or p ≥ 2 (m = {m}, p = {p})")));
    }
    let g = h.g.form().clone();
    let below = sum(vec![g.clone(), Expr::constant(-m)]);
    let above = sum(vec![Expr::constant(big_m), scale(-1.0, g.clone())]);
    let v1 = prod(vec![below.clone(), above.clone()]);
    let e = (p - 1.0) / p;
    let v = prod(vec![rpow(e, below.clone()), rpow(e, above.clone())]);
    let slope = scale(h.slope_sign()?, h.g.derivative_form().clone());
    let mut factors = vec![
        Expr::constant(coefficient(p)),
        rpow(p, slope),
        rpow(-p, below),
        rpow(-p, above),
        sum(vec![scale(2.0 * (p - 2.0), v1.clone()), Expr::constant((big_m - m).powi(2))]),
    ];
    if p != 2.0 {
        let mid = sum(vec![Expr::constant(m + big_m), scale(-2.0, g)]);
        factors.push(rpow(0.5 * (p - 2.0), Expr::Prod { factors: vec![mid.clone(), mid] }));
    }
    let (lo, hi) = (h.g.r_min(), h.g.r_max());
    Ok(Supersolution {
        v1: RadialProfile::new(v1, lo, hi)?,
        v: RadialProfile::new(v, lo, hi)?,
        weight: RadialProfile::new(prod(factors), lo, hi)?,
    })
}

/// Weight for an unbounded harmonic profile, `M = ∞`.
pub fn supersolution_weight_infinite(h: &HarmonicProfileSpec, p: f64) -> Result<Supersolution, ConstructError> {
    if h.big_m().is_finite() {
        return Err(ConstructError::Precondition("M < ∞; use the bounded construction".into()));
    }
    if !(p > 1.0) {
        return Err(ConstructError::Precondition(format!("p = {p} must exceed 1")));
    }
    let m = h.m();
    let v1 = sum(vec![h.g.form().clone(), Expr::constant(-m)]);
    let v = rpow((p - 1.0) / p, v1.clone());
    let slope = scale(h.slope_sign()?, h.g.derivative_form().clone());
    let weight = prod(vec![Expr::constant(coefficient(p)), rpow(p, slope), rpow(-p, v1.clone())]);
    let (lo, hi) = (h.g.r_min(), h.g.r_max());
    Ok(Supersolution {
        v1: RadialProfile::new(v1, lo, hi)?,
        v: RadialProfile::new(v, lo, hi)?,
        weight: RadialProfile::new(weight, lo, hi)?,
    })
}

/// `W = (1/4) (d/dr log(G/u))^2` on the common validity interval.
pub fn linear_log_weight(g: &RadialProfile, u: &RadialProfile) -> Result<RadialProfile, ConstructError> {
    let lo = g.r_min().max(u.r_min());
    let hi = g.r_max().min(u.r_max());
    if !(lo < hi) {
        return Err(ConstructError::Precondition("G and u share no interval".into()));
    }
    if hi.is_finite() {
        return Err(ConstructError::Precondition("G/u must decay towards infinity".into()));
    }
    let ratios: Vec<f64> = (0..4)
        .map(|k| {
            let r = lo.max(1.0) * 10f64.powi(3 * (k + 1));
            g.value(r) / u.value(r)
        })
        .collect();
    if ratios.iter().any(|q| !(q.is_finite() && *q > 0.0)) || ratios.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(ConstructError::Precondition(format!(
            "G/u = ({}) / ({}) does not decay at infinity",
            g, u
        )));
    }
    let d = sum(vec![g.form().log_derivative(), scale(-1.0, u.form().log_derivative())]);
    let w = scale(0.25, prod(vec![d.clone(), d]));
    Ok(RadialProfile::new(w, lo, hi)?)
}

/// `W_i`, `u_i` and `R_i = W_{i+1} - W_i` of the iterated-log family.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedLog {
    pub weight: RadialProfile,
    pub solution: RadialProfile,
    pub remainder: RadialProfile,
}

pub fn iterated_log_family(i: u32, g: &RadialProfile) -> Result<IteratedLog, ConstructError> {
    for r in probe_radii(g.r_min(), g.r_max(), 64) {
        let v = g.value(r);
        if !(v > 0.0 && v < 1.0) {
            return Err(ConstructError::Precondition(format!("G({r}) = {v} is outside (0, 1)")));
        }
    }
    let form = g.form();
    let d = form.log_derivative();
    let base = scale(0.25, prod(vec![d.clone(), d]));
    let squares = |k: u32| -> Expr { prod((1..=k).map(|j| rpow(2.0, Expr::xlog(j, form.clone()))).collect()) };
    let weight = prod(vec![base.clone(), sum((0..=i).map(squares).collect())]);
    let remainder = prod(vec![base, squares(i + 1)]);
    let mut inner = vec![form.clone()];
    inner.extend((1..=i).map(|j| rpow(-1.0, Expr::xlog(j, form.clone()))));
    let solution = rpow(0.5, prod(inner));
    let (lo, hi) = (g.r_min(), g.r_max());
    Ok(IteratedLog {
        weight: RadialProfile::new(weight, lo, hi)?,
        solution: RadialProfile::new(solution, lo, hi)?,
        remainder: RadialProfile::new(remainder, lo, hi)?,
    })
}

/// Relative residual of `-Δ_p v + V v^{p-1} - W v^{p-1}` at `r`, with the
/// p-Laplacian taken by centred differences of `v` and of the flux.
pub fn supersolution_residual(problem: &ProblemSpec, v: &RadialProfile, weight: &RadialProfile, r: f64) -> f64 {
    let p = problem.p;
    let m = problem.domain.measure_power();
    let dist = (r - v.r_min()).min(v.r_max() - r).min(r);
    let h = 1e-3 * dist;
    let flux = |x: f64, y0: f64, y1: f64| {
        let d = (y1 - y0) / h;
        x.powf(m) * d.abs().powf(p - 2.0) * d
    };
    let (vm, v0, vp) = (v.value(r - h), v.value(r), v.value(r + h));
    let div = (flux(r + 0.5 * h, v0, vp) - flux(r - 0.5 * h, vm, v0)) / h;
    let laplacian = -div / r.powf(m);
    let power = v0.powf(p - 1.0);
    let potential = problem.potential_value(r) * power;
    let weighted = weight.value(r) * power;
    let residual = laplacian + potential - weighted;
    residual.abs() / laplacian.abs().max(potential.abs()).max(weighted.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{parse_expr, DomainSpec};
    use std::f64::consts::E;

    fn profile(src: &str, lo: f64) -> RadialProfile {
        RadialProfile::on(parse_expr(src).unwrap(), lo).unwrap()
    }

    #[test]
    fn bounded_profile_in_three_dimensions() {
        let h = HarmonicProfileSpec::new(profile("r^-1", 1.0), 1.0, 0.0).unwrap();
        let s = supersolution_weight_finite(&h, 2.0).unwrap();
        assert!((s.weight.value(3.0) - 0.0625).abs() < 1e-15);
        for r in [1.5, 2.0, 7.0] {
            assert!((s.weight.value(r) - 0.25 / (r - 1.0).powi(2)).abs() < 1e-14 * s.weight.value(r));
        }
        assert!((s.v.value(2.0) - 0.5).abs() < 1e-15);
        assert!(matches!(supersolution_weight_infinite(&h, 2.0), Err(ConstructError::Precondition(_))));
    }

    #[test]
    fn bounded_profile_needs_p_two_when_m_positive() {
        let h = HarmonicProfileSpec::new(profile("r^-1+1", 1.0), 2.0, 1.0).unwrap();
        assert!(supersolution_weight_finite(&h, 1.5).is_err());
        assert!(supersolution_weight_finite(&h, 3.0).is_ok());
    }

    #[test]
    fn leray_and_exterior_power_weights() {
        let h = HarmonicProfileSpec::new(profile("log(r/1)", 1.0), 0.0, f64::INFINITY).unwrap();
        let s = supersolution_weight_infinite(&h, 2.0).unwrap();
        assert!((s.weight.value(E) - 0.25 / (E * E)).abs() < 1e-15);
        let h = HarmonicProfileSpec::new(profile("r^0.5", 1.0), 1.0, f64::INFINITY).unwrap();
        let s = supersolution_weight_infinite(&h, 3.0).unwrap();
        let expected = (1.0 / 27.0) * (1.0 / 8.0) / (1.0 - 0.5f64.sqrt()).powi(3);
        assert!((s.weight.value(2.0) - expected).abs() < 1e-13 * expected);
        assert!((expected - 0.184_254_6).abs() < 1e-7);
    }

    #[test]
    fn residual_vanishes_for_constructed_pairs() {
        let plane = ProblemSpec::laplacian(3.0, DomainSpec::ExteriorBall { n: 2, radius: 1.0 }).unwrap();
        let h = HarmonicProfileSpec::new(profile("r^0.5", 1.0), 1.0, f64::INFINITY).unwrap();
        let s = supersolution_weight_infinite(&h, 3.0).unwrap();
        for r in [1.1, 2.0, 10.0, 1e3] {
            let res = supersolution_residual(&plane, &s.v, &s.weight, r);
            assert!(res < 1e-5, "r = {r}: {res}");
        }
        let space = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }).unwrap();
        let h = HarmonicProfileSpec::new(profile("r^-1", 1.0), 1.0, 0.0).unwrap();
        let s = supersolution_weight_finite(&h, 2.0).unwrap();
        for r in [1.05, 2.0, 30.0] {
            assert!(supersolution_residual(&space, &s.v, &s.weight, r) < 1e-5);
        }
    }

    #[test]
    fn log_weight_of_the_fundamental_solution() {
        for n in [3, 4, 5] {
            let g = profile(&format!("r^{}", 2 - n as i32), 0.0);
            let w = linear_log_weight(&g, &profile("1", 0.0)).unwrap();
            let c = ((n - 2) * (n - 2)) as f64 / 4.0;
            assert!((w.value(2.0) - c / 4.0).abs() < 1e-15);
        }
        let g = profile("r^-1", 0.0);
        assert!(linear_log_weight(&g, &g).is_err());
    }

    #[test]
    fn iterated_log_remainder_is_the_difference() {
        let g = profile("0.5*r^-1", 1.0);
        for i in 0..3 {
            let a = iterated_log_family(i, &g).unwrap();
            let b = iterated_log_family(i + 1, &g).unwrap();
            for r in [1.01, 1.5, 10.0, 1e4] {
                let diff = b.weight.value(r) - a.weight.value(r);
                let rem = a.remainder.value(r);
                assert!((diff - rem).abs() <= 1e-10 * rem, "i = {i}, r = {r}");
            }
        }
        assert!(iterated_log_family(0, &profile("r^-1", 0.5)).is_err());
    }
}
