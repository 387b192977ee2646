use serde::{Deserialize, Serialize};

use super::mesh::{Coordinate, MeshDescriptor};
use super::{Mesh1D, RayleighError};
use crate::fields::{Expr, ProblemSpec, RadialProfile, TailEnd};
use crate::quad::asymptotic::Frame;

const GAUSS_X: [f64; 4] = [-0.861136311594052575, -0.339981043584856265, 0.339981043584856265, 0.861136311594052575];
const GAUSS_W: [f64; 4] = [0.347854845137453857, 0.652145154862546143, 0.652145154862546143, 0.347854845137453857];

/// `σ Π e_i^{k_i} x^{x_power}` at mesh coordinate `t`, where `x` is the physical
/// variable; evaluated through log-monomials so that `x` may exceed `f64`.
fn density(coord: Coordinate, sigma: f64, factors: &[(&Expr, f64)], x_power: f64, t: f64) -> f64 {
    let frame = match coord {
        Coordinate::Radius => {
            let mut v = sigma * t.powf(x_power);
            for (e, k) in factors {
                let f = e.eval(t);
                v *= if *k == 1.0 { f } else { f.powf(*k) };
            }
            return v;
        }
        Coordinate::LogRadius { r0 } => Frame::new(0, t, TailEnd::Infinity).with_radius_scale(r0),
        Coordinate::LogDistance => Frame::new(0, -t, TailEnd::Above(0.0)),
    };
    let mut m = frame.r().powf(x_power).scale(sigma);
    for (e, k) in factors {
        let f = frame.eval(e);
        m = m.mul(&if *k == 1.0 { f } else { f.powf(*k) });
    }
    frame.to_f64(&m)
}

fn jacobian_power(coord: Coordinate) -> f64 {
    match coord {
        Coordinate::Radius => 0.0,
        _ => 1.0,
    }
}

/// Element data of `Q[f] = Σ κ_e |f'_e|^p + ∫ V|f|^p` and `∫ W|f|^p` for
/// piecewise-linear `f`.
#[derive(Clone, Debug)]
pub(crate) struct Discrete {
    pub p: f64,
    pub widths: Vec<f64>,
    pub stiffness: Vec<f64>,
    pub mass: Vec<[f64; 4]>,
    pub potential: Option<Vec<[f64; 4]>>,
}

fn local(q: usize) -> f64 {
    0.5 * (1.0 + GAUSS_X[q])
}

impl Discrete {
    pub fn new(
        problem: &ProblemSpec,
        weight: Option<&RadialProfile>,
        mesh: &Mesh1D,
        ground_state: Option<&RadialProfile>,
    ) -> Result<Self, RayleighError> {
        let p = problem.p;
        if ground_state.is_some() && p != 2.0 {
            return Err(RayleighError::Precondition("the ground-state transform needs p = 2".into()));
        }
        let domain = &problem.domain;
        let coord = mesh.coordinate();
        let sigma = domain.sigma();
        let m = domain.measure_power();
        let jac = jacobian_power(coord);
        let nodes = mesh.nodes();
        let (lo, hi) = domain.interval();
        let (x0, x1) = (mesh.physical(nodes[0]), mesh.physical(nodes[mesh.elements()]));
        if x0 < lo || x1 > hi {
            return Err(RayleighError::Mesh(format!("mesh covers ({x0}, {x1}), outside the domain ({lo}, {hi})")));
        }
        let gs = ground_state.map(|g| g.form());
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let points = |e: usize| -> [f64; 4] {
            let (a, h) = (nodes[e], widths[e]);
            [0, 1, 2, 3].map(|q| a + h * local(q))
        };
        let quad = |e: usize, f: &dyn Fn(f64) -> f64| -> [f64; 4] {
            let ts = points(e);
            [0, 1, 2, 3].map(|q| 0.5 * widths[e] * GAUSS_W[q] * f(ts[q]))
        };
        let stiffness: Vec<f64> = (0..widths.len())
            .map(|e| {
                let (a, b) = (nodes[e], nodes[e + 1]);
                match (gs, coord) {
                    (Some(g), _) => {
                        let d = |t: f64| density(coord, sigma, &[(g, 2.0)], m + jac * (1.0 - p), t);
                        quad(e, &d).iter().sum()
                    }
                    (None, Coordinate::Radius) => sigma * (b.powf(m + 1.0) - a.powf(m + 1.0)) / (m + 1.0),
                    (None, _) => {
                        let scale = match coord {
                            Coordinate::LogRadius { r0 } => r0,
                            _ => 1.0,
                        };
                        let c = m + 1.0 - p;
                        let integral = if c == 0.0 { b - a } else { (c * a).exp() * (c * (b - a)).exp_m1() / c };
                        sigma * scale.powf(c) * integral
                    }
                }
            })
            .collect();
        if stiffness.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(RayleighError::Mesh("stiffness coefficients are not finite and positive".into()));
        }
        let mass_of = |w: &RadialProfile| -> Vec<[f64; 4]> {
            let mut factors = vec![(w.form(), 1.0)];
            if let Some(g) = gs {
                factors.push((g, 2.0));
            }
            (0..widths.len())
                .map(|e| quad(e, &|t| density(coord, sigma, &factors, m + jac, t)))
                .collect()
        };
        let mass = match weight {
            Some(w) => {
                let mass = mass_of(w);
                if mass.iter().flatten().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(RayleighError::Precondition(format!("weight {w} is not positive on the mesh")));
                }
                mass
            }
            None => vec![[0.0; 4]; widths.len()],
        };
        let potential = match (&problem.potential, gs) {
            (Some(v), None) => {
                let pot = mass_of(v);
                if pot.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(RayleighError::Precondition("potential is not finite on the mesh".into()));
                }
                Some(pot)
            }
            _ => None,
        };
        Ok(Discrete { p, widths, stiffness, mass, potential })
    }

    pub fn elements(&self) -> usize {
        self.widths.len()
    }

    fn at(f: &[f64], e: usize, q: usize) -> f64 {
        let xi = local(q);
        (1.0 - xi) * f[e] + xi * f[e + 1]
    }

    /// `Q[f]` for the full nodal vector.
    pub fn energy(&self, f: &[f64]) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for e in 0..self.elements() {
            let d = (f[e + 1] - f[e]) / self.widths[e];
            total += self.stiffness[e] * d.abs().powf(p);
        }
        if let Some(pot) = &self.potential {
            for (e, w) in pot.iter().enumerate() {
                for q in 0..4 {
                    total += w[q] * Self::at(f, e, q).abs().powf(p);
                }
            }
        }
        total
    }

    /// `∫ W|f|^p`.
    pub fn norm(&self, f: &[f64]) -> f64 {
        let mut total = 0.0;
        for (e, w) in self.mass.iter().enumerate() {
            for q in 0..4 {
                total += w[q] * Self::at(f, e, q).abs().powf(self.p);
            }
        }
        total
    }

    /// Quadratic forms over the interior nodes with per-element stiffness
    /// factors and per-point mass factors.
    fn assemble(&self, stiff: &[f64], mass_factor: &dyn Fn(usize, usize) -> f64, pot_factor: &dyn Fn(usize, usize) -> f64) -> (Tri, Tri) {
        let n = self.elements();
        let mut k = Tri::zeros(n - 1);
        let mut m = Tri::zeros(n - 1);
        for e in 0..n {
            let s = stiff[e] / (self.widths[e] * self.widths[e]);
            let mut ml = [0.0; 3];
            let mut kl = [s, -s, s];
            for q in 0..4 {
                let xi = local(q);
                let basis = [(1.0 - xi) * (1.0 - xi), xi * (1.0 - xi), xi * xi];
                let wm = self.mass[e][q] * mass_factor(e, q);
                for j in 0..3 {
                    ml[j] += wm * basis[j];
                }
                if let Some(pot) = &self.potential {
                    let wp = pot[e][q] * pot_factor(e, q);
                    for j in 0..3 {
                        kl[j] += wp * basis[j];
                    }
                }
            }
            // interior indices of the element's nodes e and e + 1
            let left = if e >= 1 { Some(e - 1) } else { None };
            let right = if e + 1 <= n - 1 { Some(e) } else { None };
            for (mat, loc) in [(&mut k, kl), (&mut m, ml)] {
                if let Some(i) = left {
                    mat.diag[i] += loc[0];
                }
                if let Some(j) = right {
                    mat.diag[j] += loc[2];
                }
                if let (Some(i), Some(_)) = (left, right) {
                    mat.off[i] += loc[1];
                }
            }
        }
        (k, m)
    }

    /// The `p = 2` matrices.
    pub fn quadratic(&self) -> (Tri, Tri) {
        self.assemble(&self.stiffness, &|_, _| 1.0, &|_, _| 1.0)
    }

    /// Matrices of the quadratic form that agrees with `Q` and `∫ W|·|^p` to
    /// first order at `f`.
    pub fn linearized(&self, f: &[f64]) -> (Tri, Tri) {
        let p = self.p;
        let n = self.elements();
        let slopes: Vec<f64> = (0..n).map(|e| ((f[e + 1] - f[e]) / self.widths[e]).abs()).collect();
        let smax = slopes.iter().cloned().fold(0.0, f64::max);
        let stiff: Vec<f64> = (0..n).map(|e| self.stiffness[e] * slopes[e].max(1e-12 * smax).powf(p - 2.0)).collect();
        let fmax = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let factor = |e: usize, q: usize| Self::at(f, e, q).abs().max(1e-12 * fmax).powf(p - 2.0);
        self.assemble(&stiff, &factor, &factor)
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub(crate) struct Tri {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tri {
    fn zeros(n: usize) -> Tri {
        Tri { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            out[i] = v;
        }
    }

    fn dot(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        y.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `L D Lᵀ` factorization of a symmetric tridiagonal matrix.
struct Ldl {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl Ldl {
    fn new(a: &Tri) -> Result<Ldl, RayleighError> {
        let n = a.diag.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = a.diag[0];
        for i in 0..n - 1 {
            if d[i] == 0.0 || !d[i].is_finite() {
                return Err(RayleighError::Precondition("stiffness matrix is singular".into()));
            }
            l[i] = a.off[i] / d[i];
            d[i + 1] = a.diag[i + 1] - l[i] * a.off[i];
        }
        if d[n - 1] == 0.0 || !d[n - 1].is_finite() {
            return Err(RayleighError::Precondition("stiffness matrix is singular".into()));
        }
        Ok(Ldl { d, l })
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 1..n {
            b[i] -= self.l[i - 1] * b[i - 1];
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.l[i] * b[i + 1];
        }
    }
}

pub(crate) struct Eigen {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest eigenpair of `K x = λ M x` by inverse iteration with shift 0.
pub(crate) fn inverse_iteration(k: &Tri, m: &Tri, start: &[f64], tol: f64, max_iter: usize) -> Result<Eigen, RayleighError> {
    let n = k.diag.len();
    let ldl = Ldl::new(k)?;
    let mut x = start.to_vec();
    let mut mx = vec![0.0; n];
    let mut kx = vec![0.0; n];
    let normalize = |x: &mut Vec<f64>| {
        let s = m.dot(x).sqrt();
        x.iter_mut().for_each(|v| *v /= s);
    };
    normalize(&mut x);
    let residual_of = |x: &[f64], lambda: f64, kx: &mut [f64], mx: &mut [f64]| {
        k.apply(x, kx);
        m.apply(x, mx);
        let r: f64 = kx.iter().zip(mx.iter()).map(|(a, b)| (a - lambda * b).powi(2)).sum();
        let s: f64 = mx.iter().map(|b| b * b).sum();
        (r / s).sqrt()
    };
    let mut lambda = k.dot(&x) / m.dot(&x);
    let mut settled = false;
    let mut best_residual = f64::INFINITY;
    for it in 1..=max_iter {
        m.apply(&x, &mut mx);
        let mut y = mx.clone();
        ldl.solve(&mut y);
        normalize(&mut y);
        // fixed sign for determinism
        let pivot = y.iter().cloned().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
        x = y;
        let next = k.dot(&x) / m.dot(&x);
        let change = (next - lambda).abs();
        lambda = next;
        if !lambda.is_finite() {
            return Err(RayleighError::NonConvergence { iterations: it, change: f64::NAN });
        }
        if change <= tol * lambda.abs() {
            settled = true;
        }
        if settled {
            // keep polishing the vector while the residual still improves
            let r = residual_of(&x, lambda, &mut kx, &mut mx);
            if r <= 1e-10 || r > 0.9 * best_residual {
                return Ok(Eigen { value: lambda, vector: x, residual: r.min(best_residual), iterations: it });
            }
            best_residual = r;
        }
    }
    Err(RayleighError::NonConvergence { iterations: max_iter, change: f64::NAN })
}

/// One point of a refinement trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: usize,
    #[serde(rename = "L")]
    pub width: f64,
    pub lambda_h: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestConstantResult {
    pub lambda_h: f64,
    pub mesh: MeshDescriptor,
    pub p: f64,
    /// Nodal values, including the Dirichlet zeros at both ends.
    pub minimizer: Vec<f64>,
    pub refinement_trace: Vec<TracePoint>,
    pub iterations: usize,
    /// `‖Kx - λMx‖ / ‖Mx‖` for `p = 2`; relative change of `λ` otherwise.
    pub residual: f64,
}

/// Solver controls.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Positive solution `φ` of the operator used to factor trial functions as
    /// `φ g` (`p = 2` only); the potential then drops out of the energy.
    pub ground_state: Option<RadialProfile>,
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { ground_state: None, eigen_tol: 1e-12, eigen_max_iter: 200_000, outer_tol: 1e-8, outer_max_iter: 500 }
    }
}

fn padded(inner: &[f64]) -> Vec<f64> {
    let mut f = Vec::with_capacity(inner.len() + 2);
    f.push(0.0);
    f.extend_from_slice(inner);
    f.push(0.0);
    f
}

/// Discrete minimum of `Q[f] / ∫ W|f|^p` over piecewise-linear `f` vanishing
/// at both ends of the mesh.
pub fn best_constant(problem: &ProblemSpec, weight: &RadialProfile, mesh: &Mesh1D) -> Result<BestConstantResult, RayleighError> {
    best_constant_with(problem, weight, mesh, &SolveOptions::default())
}

pub fn best_constant_with(
    problem: &ProblemSpec,
    weight: &RadialProfile,
    mesh: &Mesh1D,
    options: &SolveOptions,
) -> Result<BestConstantResult, RayleighError> {
    let disc = Discrete::new(problem, Some(weight), mesh, options.ground_state.as_ref())?;
    let n = disc.elements();
    let mut start = vec![0.0; n - 1];
    start[0] = 1.0;
    let (k, m) = disc.quadratic();
    let first = inverse_iteration(&k, &m, &start, options.eigen_tol, options.eigen_max_iter)?;
    let (lambda, vector, residual, iterations) = if disc.p == 2.0 {
        (first.value, padded(&first.vector), first.residual, first.iterations)
    } else {
        sequential(&disc, padded(&first.vector), options)?
    };
    let descriptor = mesh.descriptor();
    Ok(BestConstantResult {
        lambda_h: lambda,
        mesh: descriptor,
        p: problem.p,
        minimizer: vector,
        refinement_trace: vec![TracePoint { n, width: descriptor.width, lambda_h: lambda }],
        iterations,
        residual,
    })
}

/// Sequential minimization for `p ≠ 2`: solve the quadratic problem linearized
/// at the current iterate, renormalize, repeat.
fn sequential(disc: &Discrete, mut f: Vec<f64>, options: &SolveOptions) -> Result<(f64, Vec<f64>, f64, usize), RayleighError> {
    let quotient = |f: &[f64]| disc.energy(f) / disc.norm(f);
    let normalize = |f: &mut Vec<f64>| {
        let s = disc.norm(f).powf(1.0 / disc.p);
        f.iter_mut().for_each(|v| *v /= s);
    };
    normalize(&mut f);
    let mut lambda = quotient(&f);
    let mut change = f64::INFINITY;
    for it in 1..=options.outer_max_iter {
        let (k, m) = disc.linearized(&f);
        let eig = inverse_iteration(&k, &m, &f[1..f.len() - 1], options.eigen_tol, options.eigen_max_iter)?;
        let mut g = padded(&eig.vector);
        normalize(&mut g);
        let mut next = quotient(&g);
        let mut theta = 1.0;
        while !(next <= lambda) && theta > 1e-3 {
            theta *= 0.5;
            let mut h: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + theta * (b - a)).collect();
            normalize(&mut h);
            let q = quotient(&h);
            if q <= lambda {
                g = h;
                next = q;
                break;
            }
        }
        if !(next <= lambda) {
            // no descent along the linearized direction: stationary to working precision
            return Ok((lambda, f, 0.0, it));
        }
        change = (lambda - next) / next;
        f = g;
        lambda = next;
        if change < options.outer_tol {
            return Ok((lambda, f, change, it));
        }
    }
    Err(RayleighError::NonConvergence { iterations: options.outer_max_iter, change })
}

/// `Q_{A,V}[f]` of a nodal function that vanishes at both mesh ends: exact
/// per element for the gradient term, 4-point Gauss for the potential.
pub fn q_functional(problem: &ProblemSpec, mesh: &Mesh1D, f: &[f64]) -> Result<f64, RayleighError> {
    if f.len() != mesh.nodes().len() {
        return Err(RayleighError::Mesh(format!("{} values for {} nodes", f.len(), mesh.nodes().len())));
    }
    if f[0] != 0.0 || f[f.len() - 1] != 0.0 {
        return Err(RayleighError::Mesh("trial function must vanish at both ends".into()));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(RayleighError::Mesh("trial function must be finite".into()));
    }
    Ok(Discrete::new(problem, None, mesh, None)?.energy(f))
}

/// `∫ W|f|^p` of a nodal function.
pub fn weighted_norm(problem: &ProblemSpec, weight: &RadialProfile, mesh: &Mesh1D, f: &[f64]) -> Result<f64, RayleighError> {
    if f.len() != mesh.nodes().len() {
        return Err(RayleighError::Mesh(format!("{} values for {} nodes", f.len(), mesh.nodes().len())));
    }
    Ok(Discrete::new(problem, Some(weight), mesh, None)?.norm(f))
}

/// `‖K x - λ M x‖ / ‖M x‖` of a `p = 2` result.
pub fn eigen_residual(problem: &ProblemSpec, weight: &RadialProfile, mesh: &Mesh1D, result: &BestConstantResult) -> Result<f64, RayleighError> {
    let disc = Discrete::new(problem, Some(weight), mesh, None)?;
    let (k, m) = disc.quadratic();
    let x = &result.minimizer[1..result.minimizer.len() - 1];
    let mut kx = vec![0.0; x.len()];
    let mut mx = vec![0.0; x.len()];
    k.apply(x, &mut kx);
    m.apply(x, &mut mx);
    let r: f64 = kx.iter().zip(&mx).map(|(a, b)| (a - result.lambda_h * b).powi(2)).sum();
    let s: f64 = mx.iter().map(|b| b * b).sum();
    Ok((r / s).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{parse_expr, DomainSpec};
    use std::f64::consts::PI;

    fn shape(src: &str, lo: f64) -> RadialProfile {
        RadialProfile::on(parse_expr(src).unwrap(), lo).unwrap()
    }

    #[test]
    fn tent_energy() {
        let plane = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 2, radius: 0.5 }).unwrap();
        let mesh = Mesh1D::uniform(Coordinate::Radius, 1.0, 3.0, 8).unwrap();
        let f: Vec<f64> = mesh.nodes().iter().map(|r| 1.0 - (r - 2.0).abs()).collect();
        let q = q_functional(&plane, &mesh, &f).unwrap();
        assert!((q - 8.0 * PI).abs() < 1e-12);
        let g: Vec<f64> = f.iter().map(|v| -2.5 * v).collect();
        assert!((q_functional(&plane, &mesh, &g).unwrap() - 2.5f64.powi(2) * q).abs() < 1e-12 * q);
        assert_eq!(q_functional(&plane, &mesh, &vec![0.0; 9]).unwrap(), 0.0);
        let mut bad = f.clone();
        bad[0] = 0.1;
        assert!(q_functional(&plane, &mesh, &bad).is_err());
    }

    #[test]
    fn leray_against_the_truncation_oracle() {
        let plane = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 2, radius: 1.0 }).unwrap();
        let w = shape("r^-2*log(r/1)^-2", 1.0);
        let res = best_constant(&plane, &w, &Mesh1D::leray(10.0, 1024).unwrap()).unwrap();
        let oracle = 0.25 + PI * PI / 100.0;
        assert!((res.lambda_h - oracle).abs() < 1e-3, "{}", res.lambda_h);
        let doubled = w.map(|e| crate::fields::expr::scale(2.0, e)).unwrap();
        let half = best_constant(&plane, &doubled, &Mesh1D::leray(10.0, 1024).unwrap()).unwrap();
        assert!((half.lambda_h - 0.5 * res.lambda_h).abs() < 1e-10 * res.lambda_h);
    }

    #[test]
    fn residual_of_the_eigenpair() {
        let space = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }).unwrap();
        let w = shape("r^-2", 1.0);
        let mesh = Mesh1D::log_uniform(1.0, 10.0, 256).unwrap();
        let res = best_constant(&space, &w, &mesh).unwrap();
        assert!(eigen_residual(&space, &w, &mesh, &res).unwrap() <= 1e-10);
        assert!((res.lambda_h - (0.25 + PI * PI / 100.0)).abs() < 1e-3);
    }

    #[test]
    fn strip_with_p_three() {
        // λ_h approaches C_{3,1} = 8/27 from above for δ^{-3}
        let strip = ProblemSpec::laplacian(3.0, DomainSpec::BoundaryStrip { n: 1, depth: 1.0 }).unwrap();
        let w = RadialProfile::new(parse_expr("d^-3").unwrap(), 0.0, 1.0).unwrap();
        let res = best_constant(&strip, &w, &Mesh1D::strip(0.5, 30.0, 600).unwrap()).unwrap();
        let c = 8.0 / 27.0;
        assert!(res.lambda_h >= c && res.lambda_h < c + 0.05, "{}", res.lambda_h);
    }

    #[test]
    fn ground_state_transform_agrees() {
        // -Δ - (1/4) r^{-2} in R^3 against r^{-2} log^{-2} r: same Leray oracle as the plane
        let v = shape("-0.25*r^-2", 0.0);
        let space = ProblemSpec::new(2.0, DomainSpec::PuncturedSpace { n: 3 }, Some(v)).unwrap();
        let w = shape("r^-2*log(r/1)^-2", 1.0);
        let options = SolveOptions { ground_state: Some(shape("r^-0.5", 0.0)), ..SolveOptions::default() };
        let mesh = Mesh1D::leray(10.0, 1024).unwrap();
        let t = best_constant_with(&space, &w, &mesh, &options).unwrap();
        assert!((t.lambda_h - (0.25 + PI * PI / 100.0)).abs() < 1e-3, "{}", t.lambda_h);
    }
}
