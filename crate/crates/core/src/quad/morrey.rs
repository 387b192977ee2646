//! Morrey norms of radial functions on a centered ball.

use super::gk;
use super::QuadError;
use crate::fields::{sphere_area, RadialProfile};

/// Sampling of centers `|y| ∈ [0, ρ]` and radii `r ∈ (0, 2ρ]` (log-spaced).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorreyGrid {
    pub centers: usize,
    pub radii: usize,
    /// Smallest radius as a fraction of the diameter.
    pub min_radius: f64,
}

impl MorreyGrid {
    /// A grid with `n` radii and about `√n` centers.
    pub fn resolution(n: usize) -> Self {
        MorreyGrid { centers: (n as f64).sqrt().ceil() as usize + 1, radii: n.max(2), min_radius: 1e-6 }
    }
}

/// `sup_{y,r} r^{-N(q-1)/q} ∫_{B_r(y) ∩ B_ρ} |f| dx` for radial `f` on `B_ρ ⊂ ℝ^n`.
///
/// Centers are taken on one ray, which loses nothing for radial `f`. The grid
/// maximum is polished by a golden-section search in `r` and `|y|`; every value
/// reported is attained, so the result is a lower bound for the supremum.
pub fn morrey_norm(f: &RadialProfile, n: u32, rho: f64, q: f64, grid: MorreyGrid) -> Result<f64, QuadError> {
    if q.is_infinite() {
        return Err(QuadError::UnsupportedQ(q));
    }
    if !(q >= 1.0) {
        return Err(QuadError::Precondition(format!("Morrey exponent q = {q} must be at least 1")));
    }
    if n < 1 || !(rho > 0.0) || grid.centers < 1 || grid.radii < 2 || !(grid.min_radius > 0.0 && grid.min_radius < 1.0) {
        return Err(QuadError::Precondition("invalid Morrey grid or ball".into()));
    }
    if f.r_min() > 0.0 || f.r_max() < rho {
        return Err(QuadError::Precondition("profile must be valid on the whole ball".into()));
    }
    let nd = n as f64;
    let expo = nd * (q - 1.0) / q;
    let diam = 2.0 * rho;
    let scaled = |c: f64, r: f64| -> Result<f64, QuadError> {
        Ok(r.powf(-expo) * ball_mass(f, n, rho, c, r)?)
    };
    let center = |i: usize| if grid.centers == 1 { 0.0 } else { rho * i as f64 / (grid.centers - 1) as f64 };
    let lmin = (grid.min_radius * diam).ln();
    let lmax = diam.ln();
    let radius = |j: usize| (lmin + (lmax - lmin) * j as f64 / (grid.radii - 1) as f64).exp();

    let mut best = (0.0, 0usize, 0usize);
    for i in 0..grid.centers {
        for j in 0..grid.radii {
            let v = scaled(center(i), radius(j))?;
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    if best.0 == 0.0 {
        return Ok(0.0);
    }
    let (mut value, i, j) = best;
    let mut c = center(i);
    let mut lr = radius(j).ln();
    let step_r = (lmax - lmin) / (grid.radii - 1) as f64;
    let step_c = if grid.centers > 1 { rho / (grid.centers - 1) as f64 } else { 0.0 };
    for _ in 0..3 {
        let (a, b) = ((lr - step_r).max(lmin), (lr + step_r).min(lmax));
        let (x, v) = golden(|x| scaled(c, x.exp()), a, b)?;
        if v > value {
            value = v;
            lr = x;
        }
        if step_c > 0.0 {
            let (a, b) = ((c - step_c).max(0.0), (c + step_c).min(rho));
            let (x, v) = golden(|x| scaled(x, lr.exp()), a, b)?;
            if v > value {
                value = v;
                c = x;
            }
        }
    }
    Ok(value)
}

fn golden<F: Fn(f64) -> Result<f64, QuadError>>(g: F, mut a: f64, mut b: f64) -> Result<(f64, f64), QuadError> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut g1, mut g2) = (g(x1)?, g(x2)?);
    for _ in 0..60 {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (b - a);
            g2 = g(x2)?;
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - phi * (b - a);
            g1 = g(x1)?;
        }
    }
    Ok(if g1 > g2 { (x1, g1) } else { (x2, g2) })
}

/// Area of `{x : |x| = s, |x - y| ≤ r}` for `|y| = c` in `ℝ^n`.
fn cap_area(n: u32, s: f64, c: f64, r: f64) -> f64 {
    let full = sphere_area(n) * s.powi(n as i32 - 1);
    if c == 0.0 || s == 0.0 {
        return if s <= r { full } else { 0.0 };
    }
    let kappa = (s * s + c * c - r * r) / (2.0 * s * c);
    if kappa <= -1.0 {
        return full;
    }
    if kappa >= 1.0 {
        return 0.0;
    }
    match n {
        1 => 1.0,
        2 => 2.0 * s * kappa.acos(),
        3 => 2.0 * std::f64::consts::PI * s * s * (1.0 - kappa),
        _ => {
            let theta = kappa.acos();
            let e = gk::integrate(|t: f64| t.sin().powi(n as i32 - 2), 0.0, theta, 1e-14, 1e-14, 50)
                .map(|e| e.value)
                .unwrap_or(f64::NAN);
            sphere_area(n - 1) * s.powi(n as i32 - 1) * e
        }
    }
}

/// `∫_{B_r(y) ∩ B_ρ} |f| dx` with `|y| = c`.
fn ball_mass(f: &RadialProfile, n: u32, rho: f64, c: f64, r: f64) -> Result<f64, QuadError> {
    let lo = (c - r).abs();
    let hi = (c + r).min(rho);
    if n == 1 {
        // the interval [c - r, c + r] ∩ [-ρ, ρ], split by sign
        let a = (c - r).max(-rho);
        let b = (c + r).min(rho);
        let mut total = 0.0;
        if b > 0.0 && a < b {
            total += line(f, a.max(0.0), b)?;
        }
        if a < 0.0 {
            total += line(f, 0.0, (-a).min(rho))?;
        }
        return Ok(total);
    }
    let mut total = 0.0;
    if r > c {
        // the whole ball of radius r - c about the origin
        let inner = (r - c).min(rho);
        total += radial(f, n, 0.0, inner, |s| sphere_area(n) * s.powi(n as i32 - 1))?;
    }
    if hi > lo && lo < rho {
        total += radial(f, n, lo, hi, |s| cap_area(n, s, c, r))?;
    }
    Ok(total)
}

fn line(f: &RadialProfile, a: f64, b: f64) -> Result<f64, QuadError> {
    gk::integrate(|s| f.value(s).abs(), a, b, 0.0, 1e-12, 200)
        .map(|e| e.value)
        .map_err(|e| QuadError::NonFinite { r: e.x })
}

fn radial<A: Fn(f64) -> f64>(f: &RadialProfile, _n: u32, a: f64, b: f64, area: A) -> Result<f64, QuadError> {
    if !(b > a) {
        return Ok(0.0);
    }
    gk::integrate(|s| f.value(s).abs() * area(s), a, b, 0.0, 1e-12, 200)
        .map(|e| e.value)
        .map_err(|e| QuadError::NonFinite { r: e.x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Expr;
    use std::f64::consts::PI;

    #[test]
    fn cap_areas_cover_the_sphere() {
        // centre far away and a huge radius: the whole sphere
        assert!((cap_area(3, 1.0, 0.5, 10.0) - 4.0 * PI).abs() < 1e-12);
        assert_eq!(cap_area(3, 1.0, 5.0, 1.0), 0.0);
        // generic dimension agrees with the closed form in n = 3
        let c3 = cap_area(3, 0.7, 0.4, 0.5);
        let theta = ((0.49 + 0.16 - 0.25) / (2.0 * 0.7 * 0.4) as f64).acos();
        assert!((c3 - 2.0 * PI * 0.49 * (1.0 - theta.cos())).abs() < 1e-14);
    }

    #[test]
    fn unit_ball_volume() {
        let one = RadialProfile::on(Expr::one(), 0.0).unwrap();
        let m = morrey_norm(&one, 3, 1.0, 2.0, MorreyGrid::resolution(1000)).unwrap();
        assert!((m - 4.0 * PI / 3.0).abs() < 0.02 * 4.0 * PI / 3.0, "{m}");
        // mass of a half-overlapping ball via the cap formula
        let lens = ball_mass(&one, 3, 1.0, 1.0, 1.0).unwrap();
        // |B_1(e) ∩ B_1(0)| = 5π/12
        assert!((lens - 5.0 * PI / 12.0).abs() < 1e-10, "{lens}");
    }

    #[test]
    fn rejects_infinite_q() {
        let one = RadialProfile::on(Expr::one(), 0.0).unwrap();
        assert!(matches!(
            morrey_norm(&one, 3, 1.0, f64::INFINITY, MorreyGrid::resolution(10)),
            Err(QuadError::UnsupportedQ(_))
        ));
    }
}
