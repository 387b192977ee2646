//! Convergence classification of tail integrals by dyadic shells on a ladder
//! of iterated-logarithmic scales.

use serde::{Deserialize, Serialize};

use super::asymptotic::{Frame, Mono};
use super::gk;
use super::{DivergenceRate, IntegralVerdict, QuadError};
use crate::fields::{DomainSpec, Expr, RadialProfile, TailEnd};

const LN2: f64 = std::f64::consts::LN_2;

/// Shell layout and decision thresholds.
///
/// Level `ℓ` integrates in `z = ln^{ℓ+1}(y_0)` over shells of width `ln 2`, so
/// level 0 uses the dyadic shells `[ρ 2^k, ρ 2^{k+1}]` and each further level
/// spreads the same number of shells over an exponentially longer range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellScheme {
    pub k_max: usize,
    /// Number of trailing shells entering the decay fit.
    pub window: usize,
    pub converge_ratio: f64,
    pub diverge_ratio: f64,
    pub max_level: usize,
    pub rel_tol: f64,
    /// Shells below this fraction of the running sum end the run.
    pub negligible: f64,
    pub negative_tol: f64,
}

impl Default for ShellScheme {
    fn default() -> Self {
        ShellScheme {
            k_max: 48,
            window: 16,
            converge_ratio: 0.9,
            diverge_ratio: 0.995,
            max_level: 3,
            rel_tol: 1e-12,
            negligible: 1e-17,
            negative_tol: 1e-14,
        }
    }
}

impl ShellScheme {
    pub fn validate(&self) -> Result<(), QuadError> {
        if self.k_max < 32 || self.window < 4 || self.window > self.k_max {
            return Err(QuadError::Precondition("shell scheme needs k_max ≥ 32 and 4 ≤ window ≤ k_max".into()));
        }
        if !(self.rel_tol > 0.0 && self.negligible > 0.0 && self.negative_tol > 0.0) {
            return Err(QuadError::Precondition("tolerances must be positive".into()));
        }
        if !(0.0 < self.converge_ratio && self.converge_ratio < self.diverge_ratio && self.diverge_ratio <= 1.0) {
            return Err(QuadError::Precondition("need 0 < converge_ratio < diverge_ratio ≤ 1".into()));
        }
        if self.max_level > 5 {
            return Err(QuadError::Precondition("max_level is at most 5".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub level: usize,
    pub k: usize,
    pub z_lo: f64,
    pub z_hi: f64,
    /// Radii of the shell ends; infinite or zero when not representable.
    pub r_lo: f64,
    pub r_hi: f64,
    pub sum: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub verdict: IntegralVerdict,
    /// Level at which the verdict was reached.
    pub level: usize,
    /// Fitted shell ratio at that level.
    pub ratio: f64,
    pub shells: Vec<Shell>,
}

impl TailReport {
    /// CSV with header `level,k,z_lo,z_hi,r_lo,r_hi,S_k,error`.
    pub fn shells_csv(&self) -> String {
        let mut out = String::from("level,k,z_lo,z_hi,r_lo,r_hi,S_k,error\n");
        for s in &self.shells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.level, s.k, s.z_lo, s.z_hi, s.r_lo, s.r_hi, s.sum, s.error
            ));
        }
        out
    }
}

struct Integrand<'a> {
    form: &'a Expr,
    tail: TailEnd,
    sigma: f64,
    power: f64,
    max_abs: f64,
    worst: Option<(f64, f64)>,
    negative_tol: f64,
}

impl Integrand<'_> {
    /// Integrand in the level-`level` variable, and the radius it sits at.
    fn at(&mut self, level: usize, z: f64) -> (f64, f64) {
        let frame = Frame::new(level, z, self.tail);
        let mut v = frame.eval(self.form);
        if self.power != 0.0 {
            v = v.mul(&frame.r().powf(self.power));
        }
        let mut jac = Mono::constant(self.sigma);
        for j in 0..=level {
            jac = jac.mul(&frame.slot(j));
        }
        if self.tail != TailEnd::Infinity {
            jac = jac.mul(&frame.slot(0).powf(-2.0));
        }
        let h = frame.to_f64(&v.mul(&jac));
        let r = frame.to_f64(frame.r());
        if h.is_finite() {
            self.max_abs = self.max_abs.max(h.abs());
            if h < 0.0 && self.worst.map_or(true, |(_, w)| h < w) {
                self.worst = Some((r, h));
            }
        }
        (h, r)
    }

    fn check_sign(&self) -> Result<(), QuadError> {
        match self.worst {
            Some((r, value)) if value < -self.negative_tol * self.max_abs => {
                Err(QuadError::NegativeIntegrand { r, value })
            }
            _ => Ok(()),
        }
    }

    fn integrate(&mut self, level: usize, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<gk::Estimate, Blowup> {
        let mut nan_at = None;
        let est = gk::integrate(
            |z| {
                let (h, r) = self.at(level, z);
                if h.is_nan() && nan_at.is_none() {
                    nan_at = Some(r);
                }
                h
            },
            lo,
            hi,
            abs_tol,
            rel_tol,
            64,
        );
        match (est, nan_at) {
            (_, Some(r)) => Err(Blowup::Undefined(r)),
            (Ok(e), None) => Ok(e),
            (Err(_), None) => Err(Blowup::Infinite),
        }
    }
}

enum Blowup {
    Infinite,
    Undefined(f64),
}

enum Outcome {
    Converged { value: f64, error: f64, ratio: f64 },
    NonDecaying { ratio: f64 },
    Ambiguous { ratio: f64 },
}

/// `exp` applied `n` times to 1.
fn tower(n: usize) -> f64 {
    (0..n).fold(1.0, |acc: f64, _| acc.exp())
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Fitted per-shell ratio over the trailing positive shells.
fn fitted_ratio(shells: &[Shell], window: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .rev()
        .filter(|s| s.sum > 0.0 && s.sum.is_finite())
        .take(window)
        .map(|s| (s.k as f64, s.sum.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Some(slope(&xs, &ys).exp())
}

/// Power `β` in `S_k ~ z_k^{-β}` over trailing level-0 shells.
fn log_power(shells: &[Shell], window: usize) -> f64 {
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.level == 0 && s.sum > 0.0 && s.sum.is_finite())
        .rev()
        .take(window)
        .filter(|s| 0.5 * (s.z_lo + s.z_hi) > 0.0)
        .map(|s| ((0.5 * (s.z_lo + s.z_hi)).ln(), s.sum.ln()))
        .collect();
    if pts.len() < 3 {
        return f64::NAN;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    -slope(&xs, &ys)
}

fn y0_of(tail: TailEnd, rho: f64) -> f64 {
    match tail {
        TailEnd::Infinity => rho,
        TailEnd::Above(c) => 1.0 / (rho - c),
        TailEnd::Below(c) => 1.0 / (c - rho),
    }
}

fn check_inputs(f: &RadialProfile, domain: &DomainSpec, rho: f64) -> Result<TailEnd, QuadError> {
    domain.validate()?;
    let (lo, hi) = domain.interval();
    if !(rho > lo && rho < hi) {
        return Err(QuadError::Precondition(format!("ρ = {rho} is not inside the domain ({lo}, {hi})")));
    }
    let tail = domain.tail();
    let covered = match tail {
        TailEnd::Infinity => f.r_min() < rho && f.r_max() == f64::INFINITY,
        TailEnd::Above(c) => f.r_min() <= c && f.r_max() > rho,
        TailEnd::Below(c) => f.r_min() < rho && f.r_max() >= c,
    };
    if !covered {
        return Err(QuadError::Precondition(format!(
            "profile valid on ({}, {}) does not cover the tail beyond ρ = {rho}",
            f.r_min(),
            f.r_max()
        )));
    }
    Ok(tail)
}

/// Classifies `∫ f dμ` over the tail of `domain` beyond `rho` (towards
/// infinity, or towards the boundary point for strips and annuli).
pub fn classify_tail(f: &RadialProfile, domain: &DomainSpec, rho: f64) -> Result<IntegralVerdict, QuadError> {
    tail_report(f, domain, rho, &ShellScheme::default()).map(|r| r.verdict)
}

pub fn tail_report(
    f: &RadialProfile,
    domain: &DomainSpec,
    rho: f64,
    scheme: &ShellScheme,
) -> Result<TailReport, QuadError> {
    scheme.validate()?;
    let tail = check_inputs(f, domain, rho)?;
    let mut integrand = Integrand {
        form: f.form(),
        tail,
        sigma: domain.sigma(),
        power: domain.measure_power(),
        max_abs: 0.0,
        worst: None,
        negative_tol: scheme.negative_tol,
    };
    let y0 = y0_of(tail, rho);
    let mut shells: Vec<Shell> = Vec::new();
    let mut tentative: Option<usize> = None;
    let mut last = (0usize, f64::NAN);

    for level in 0..=scheme.max_level {
        let (z0, head) = if level == 0 || y0 >= tower(level) {
            ((0..=level).fold(y0, |acc, _| acc.ln()), None)
        } else {
            (0.0, Some((y0.ln(), tower(level - 1))))
        };
        let (mut total, mut error) = (0.0, 0.0);
        if let Some((lo, hi)) = head {
            let est = integrand
                .integrate(0, lo, hi, 0.0, scheme.rel_tol)
                .map_err(|b| blowup_error(b, rho))?;
            total += est.value;
            error += est.error;
        }
        let start = shells.len();
        let mut outcome = None;
        for k in 0..scheme.k_max {
            let z_lo = z0 + k as f64 * LN2;
            let z_hi = z_lo + LN2;
            let r_lo = integrand.at(level, z_lo).1;
            let r_hi = integrand.at(level, z_hi).1;
            let est = match integrand.integrate(level, z_lo, z_hi, scheme.rel_tol * total.abs(), scheme.rel_tol) {
                Ok(e) => e,
                Err(Blowup::Infinite) => {
                    shells.push(Shell { level, k, z_lo, z_hi, r_lo, r_hi, sum: f64::INFINITY, error: f64::INFINITY });
                    outcome = Some(Outcome::NonDecaying { ratio: f64::INFINITY });
                    break;
                }
                Err(Blowup::Undefined(r)) => return Err(QuadError::NonFinite { r }),
            };
            integrand.check_sign()?;
            shells.push(Shell { level, k, z_lo, z_hi, r_lo, r_hi, sum: est.value, error: est.error });
            total += est.value;
            error += est.error;
            if !(total.is_finite()) || total > 1e300 {
                outcome = Some(Outcome::NonDecaying { ratio: f64::INFINITY });
                break;
            }
            if k >= 1 && est.value.abs() <= scheme.negligible * total.abs() {
                let ratio = fitted_ratio(&shells[start..], scheme.window).unwrap_or(0.0);
                let tail_bound = if ratio < scheme.converge_ratio {
                    est.value.abs() * ratio / (1.0 - ratio)
                } else {
                    est.value.abs()
                };
                outcome = Some(Outcome::Converged { value: total, error: error + tail_bound, ratio });
                break;
            }
        }
        let outcome = outcome.unwrap_or_else(|| {
            let run = &shells[start..];
            match fitted_ratio(run, scheme.window) {
                None => {
                    // every shell vanished
                    Outcome::Converged { value: total, error, ratio: 0.0 }
                }
                Some(q) if q <= scheme.converge_ratio => {
                    let s_last = run.last().map_or(0.0, |s| s.sum);
                    let extrapolated = s_last * q / (1.0 - q);
                    Outcome::Converged { value: total + extrapolated, error: error + extrapolated.abs(), ratio: q }
                }
                Some(q) if q >= scheme.diverge_ratio => Outcome::NonDecaying { ratio: q },
                Some(q) => Outcome::Ambiguous { ratio: q },
            }
        });
        match outcome {
            Outcome::Converged { value, error, ratio } => {
                return Ok(TailReport {
                    verdict: IntegralVerdict::Convergent { value, error_bound: error },
                    level,
                    ratio,
                    shells,
                });
            }
            Outcome::NonDecaying { ratio } => {
                if tentative.is_none() {
                    tentative = Some(level);
                    last = (level, ratio);
                }
                if level > tentative.unwrap() || level == scheme.max_level {
                    let (first, q) = last;
                    let rate = match first {
                        0 if q > 2.0 - scheme.diverge_ratio => DivergenceRate::PowerLike { exponent: q.log2() },
                        0 => DivergenceRate::LogLike { power: 0.0 },
                        1 => DivergenceRate::LogLike { power: log_power(&shells, scheme.window) },
                        _ => DivergenceRate::Unknown,
                    };
                    return Ok(TailReport { verdict: IntegralVerdict::Divergent { rate }, level: first, ratio: q, shells });
                }
            }
            Outcome::Ambiguous { ratio } => {
                tentative = None;
                last = (level, ratio);
            }
        }
    }
    let partials = shells.iter().filter(|s| s.level == scheme.max_level).map(|s| s.sum).collect();
    Ok(TailReport {
        verdict: IntegralVerdict::Inconclusive { partials },
        level: scheme.max_level,
        ratio: last.1,
        shells,
    })
}

fn blowup_error(b: Blowup, rho: f64) -> QuadError {
    match b {
        Blowup::Infinite => QuadError::NonFinite { r: rho },
        Blowup::Undefined(r) => QuadError::NonFinite { r },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_expr;
    use std::f64::consts::E;

    fn half_line(src: &str, r_min: f64, rho: f64) -> TailReport {
        let f = RadialProfile::on(parse_expr(src).unwrap(), r_min).unwrap();
        tail_report(&f, &DomainSpec::HalfLine { start: r_min }, rho, &ShellScheme::default()).unwrap()
    }

    #[test]
    fn inverse_square_converges_to_one() {
        let r = half_line("r^-2", 0.0, 1.0);
        match r.verdict {
            IntegralVerdict::Convergent { value, error_bound } => {
                assert!((value - 1.0).abs() < 1e-9, "{value}");
                assert!((value - 1.0).abs() <= error_bound.max(1e-12));
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(r.level, 0);
    }

    #[test]
    fn log_squared_tail() {
        let r = half_line("r^-1*log(r/1)^-2", 1.0, E);
        match r.verdict {
            IntegralVerdict::Convergent { value, .. } => assert!((value - 1.0).abs() < 1e-6, "{value}"),
            v => panic!("{v:?}"),
        }
        assert_eq!(r.level, 1);
    }

    #[test]
    fn harmonic_log_tail_diverges() {
        let r = half_line("r^-1*log(r/1)^-1", 1.0, 2.0);
        match r.verdict {
            IntegralVerdict::Divergent { rate: DivergenceRate::LogLike { power } } => {
                assert!((power - 1.0).abs() < 0.1, "{power}")
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn growth_is_power_like() {
        let r = half_line("r^-0.5", 0.0, 1.0);
        match r.verdict {
            IntegralVerdict::Divergent { rate: DivergenceRate::PowerLike { exponent } } => {
                assert!((exponent - 0.5).abs() < 1e-6, "{exponent}")
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn double_log_tail_converges() {
        // ∫_ρ^∞ X_1(1/r) X_2(1/r)^2 dr/r = X_2(1/ρ), an integrand ~ 1/(r log r (log log r)^2)
        let r = half_line("r^-1*X_1(1/r)*X_2(1/r)^2", 0.0, 1.0);
        match r.verdict {
            IntegralVerdict::Convergent { value, error_bound } => {
                assert!((value - 1.0).abs() < 1e-6, "{value} ± {error_bound}");
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(r.level, 2);
    }

    #[test]
    fn negative_integrand_is_rejected() {
        let f = RadialProfile::on(parse_expr("-1*r^-2").unwrap(), 0.0).unwrap();
        let err = classify_tail(&f, &DomainSpec::HalfLine { start: 0.0 }, 1.0).unwrap_err();
        assert!(matches!(err, QuadError::NegativeIntegrand { .. }));
    }

    #[test]
    fn strip_tail_at_zero() {
        // ∫_0^{1/2} δ^{-1/2} dδ = √2
        let f = RadialProfile::new(Expr::pow(-0.5), 0.0, 1.0).unwrap();
        let d = DomainSpec::BoundaryStrip { n: 1, depth: 1.0 };
        match classify_tail(&f, &d, 0.5).unwrap() {
            IntegralVerdict::Convergent { value, .. } => assert!((value - 2f64.sqrt()).abs() < 1e-9),
            v => panic!("{v:?}"),
        }
        let g = RadialProfile::new(Expr::pow(-1.0), 0.0, 1.0).unwrap();
        assert!(matches!(classify_tail(&g, &d, 0.5).unwrap(), IntegralVerdict::Divergent { .. }));
    }
}
