//! Discrete Rayleigh quotients on log-graded meshes: best constants,
//! null-sequences and probes of optimality at infinity.

pub mod mesh;
mod solve;

pub use mesh::{Coordinate, Grading, Mesh1D, MeshDescriptor};
pub use solve::{
    best_constant, best_constant_with, eigen_residual, q_functional, weighted_norm, BestConstantResult, SolveOptions,
    TracePoint,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{FieldError, ProblemSpec, RadialProfile, TailEnd};
use crate::report::{svg_plot, Series};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RayleighError {
    #[error("invalid mesh or trial function: {0}")]
    Mesh(String),
    #[error("no convergence after {iterations} iterations (last relative change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("λ = {lambda} is outside (0, {max})")]
    Range { lambda: f64, max: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The root `α ∈ ((p-1)/p, 1)` of `λ = (p-1) α^{p-1} (1-α)`.
pub fn alpha_exponent(lambda: f64, p: f64) -> Result<f64, RayleighError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(RayleighError::Precondition(format!("p = {p} must exceed 1")));
    }
    let c = ((p - 1.0) / p).powf(p);
    if !(lambda > 0.0 && lambda < c) {
        return Err(RayleighError::Range { lambda, max: c });
    }
    let g = |a: f64| (p - 1.0) * a.powf(p - 1.0) * (1.0 - a) - lambda;
    // g decreases from C - λ > 0 to -λ < 0 on the interval
    let (mut lo, mut hi) = ((p - 1.0) / p, 1.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // finish on the floating-point grid so the residual is as small as it can be
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

/// `φ_n = 1` on `[R, plateau]`, `1 - log(r/plateau)/width` up to `plateau·e^width`, then 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullSequenceSpec {
    pub plateau: f64,
    pub width: f64,
}

impl NullSequenceSpec {
    pub fn value(&self, r: f64) -> f64 {
        if r <= self.plateau {
            1.0
        } else {
            (1.0 - (r / self.plateau).ln() / self.width).max(0.0)
        }
    }
}

/// `Q[φ_n] = σ L^{1-N}` for `-Δ_N` in `ℝ^N` (exact: `|φ_n'| = 1/(L r)` on the ramp).
pub fn null_sequence_q(problem: &ProblemSpec, spec: &NullSequenceSpec) -> Result<f64, RayleighError> {
    let n = problem.domain.dimension() as f64;
    if !problem.domain.is_radial() || problem.p != n {
        return Err(RayleighError::Precondition(format!("null sequences need p = N (p = {}, N = {n})", problem.p)));
    }
    if problem.potential.is_some() {
        return Err(RayleighError::Precondition("null sequences need V = 0".into()));
    }
    if !(spec.width > 0.0 && spec.plateau > 0.0) {
        return Err(RayleighError::Precondition("plateau and width must be positive".into()));
    }
    Ok(problem.domain.sigma() * spec.width.powf(1.0 - n))
}

/// Mesh layout for `λ∞` probes.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSettings {
    /// Log-width `L` of every truncated support.
    pub width: f64,
    pub elements: usize,
    pub grading: Grading,
    pub options: SolveOptions,
}

impl ProbeSettings {
    pub fn new(width: f64, elements: usize, grading: Grading) -> Self {
        ProbeSettings { width, elements, grading, options: SolveOptions::default() }
    }

    /// Mesh for supports beyond `rho` (below `rho` on strips).
    pub fn mesh(&self, problem: &ProblemSpec, rho: f64) -> Result<Mesh1D, RayleighError> {
        let (n, width) = (self.elements, self.width);
        match (problem.domain.tail(), self.grading) {
            (TailEnd::Infinity, Grading::Uniform) => Mesh1D::log_uniform(rho, width, n),
            (TailEnd::Infinity, Grading::Geometric) => {
                if !(rho > 1.0) {
                    return Err(RayleighError::Precondition(format!("graded probes need ρ > 1, got {rho}")));
                }
                let t0 = rho.ln();
                Mesh1D::geometric(Coordinate::LogRadius { r0: 1.0 }, t0, t0 * width.exp(), n)
            }
            (TailEnd::Above(c), _) if c == 0.0 => Mesh1D::strip(rho, width, n),
            _ => Err(RayleighError::Precondition("probes need an exterior domain or a strip".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub rho: f64,
    pub lambda_h: f64,
}

/// Best constants restricted to supports beyond each `rho`, solved concurrently.
pub fn lambda_infinity_probe(
    problem: &ProblemSpec,
    weight: &RadialProfile,
    rho_list: &[f64],
    settings: &ProbeSettings,
) -> Result<Vec<ProbePoint>, RayleighError> {
    if rho_list.is_empty() {
        return Err(RayleighError::Precondition("no radii to probe".into()));
    }
    let increasing = rho_list.windows(2).all(|w| w[0] < w[1]);
    let decreasing = rho_list.windows(2).all(|w| w[0] > w[1]);
    let strip = problem.domain.tail() != TailEnd::Infinity;
    if !(increasing || (strip && decreasing)) {
        return Err(RayleighError::Precondition("probe radii must be strictly monotone towards the tail".into()));
    }
    rho_list
        .par_iter()
        .map(|&rho| {
            let mesh = settings.mesh(problem, rho)?;
            let res = best_constant_with(problem, weight, &mesh, &settings.options)?;
            Ok(ProbePoint { rho, lambda_h: res.lambda_h })
        })
        .collect()
}

pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("n,L,lambda_h\n");
    for t in trace {
        out.push_str(&format!("{},{},{:.15e}\n", t.n, t.width, t.lambda_h));
    }
    out
}

/// `λ_h` against `1/L²`, with an optional oracle `λ(L)` overlaid.
pub fn trace_svg(title: &str, trace: &[TracePoint], oracle: Option<&dyn Fn(f64) -> f64>) -> String {
    let mut series = vec![Series::new("lambda_h", trace.iter().map(|t| (1.0 / (t.width * t.width), t.lambda_h)).collect())];
    if let Some(o) = oracle {
        let mut widths: Vec<f64> = trace.iter().map(|t| t.width).collect();
        widths.sort_by(f64::total_cmp);
        widths.dedup();
        series.push(Series::new("oracle", widths.iter().map(|&l| (1.0 / (l * l), o(l))).collect()));
    }
    svg_plot(title, "1/L^2", "lambda_h", &series)
}

pub fn probe_csv(points: &[ProbePoint]) -> String {
    let mut out = String::from("rho,lambda_h\n");
    for p in points {
        out.push_str(&format!("{},{:.15e}\n", p.rho, p.lambda_h));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::DomainSpec;
    use std::f64::consts::PI;

    #[test]
    fn alpha_roots() {
        assert!((alpha_exponent(3.0 / 16.0, 2.0).unwrap() - 0.75).abs() < 1e-12);
        assert!(alpha_exponent(0.25, 2.0).is_err());
        assert!(alpha_exponent(0.0, 2.0).is_err());
        let near = alpha_exponent(0.25 - 1e-10, 2.0).unwrap();
        assert!((near - 0.5).abs() < 1e-4);
        assert!(alpha_exponent(1e-12, 2.0).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn null_sequence_closed_form() {
        let plane = ProblemSpec::laplacian(2.0, DomainSpec::PuncturedSpace { n: 2 }).unwrap();
        for k in 1..=6 {
            let l = 10f64.powi(k);
            let q = null_sequence_q(&plane, &NullSequenceSpec { plateau: std::f64::consts::E, width: l }).unwrap();
            assert!((q * l - 2.0 * PI).abs() < 1e-10);
        }
        let wrong = ProblemSpec::laplacian(3.0, DomainSpec::PuncturedSpace { n: 2 }).unwrap();
        assert!(null_sequence_q(&wrong, &NullSequenceSpec { plateau: 1.0, width: 10.0 }).is_err());
    }

    #[test]
    fn null_sequence_matches_the_mesh_energy() {
        // the ramp is linear in t = log(r/plateau), so the discrete energy is exact
        let plane = ProblemSpec::laplacian(2.0, DomainSpec::PuncturedSpace { n: 2 }).unwrap();
        let spec = NullSequenceSpec { plateau: 3.0, width: 10.0 };
        let mesh = Mesh1D::uniform(Coordinate::LogRadius { r0: 3.0 }, 0.0, 10.0, 16).unwrap();
        let f: Vec<f64> = mesh.nodes().iter().map(|&t| spec.value(3.0 * t.exp())).collect();
        let mut f = f;
        f[0] = 0.0; // the plateau side is not part of the ramp energy
        let ramp = q_functional(&plane, &mesh, &f).unwrap();
        // dropping the plateau value adds one steep element; compare the other fifteen
        let steep = 2.0 * PI * (1.0 - 1.0 / 16.0f64).powi(2) / (10.0 / 16.0);
        let expected = 2.0 * PI / 10.0 * (15.0 / 16.0);
        assert!((ramp - steep - expected).abs() < 1e-12, "{ramp}");
    }
}
