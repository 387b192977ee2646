//! Verdict engine: tail-integral verdicts for catalogue pairs, cross-checked
//! against probes of optimality at infinity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{example_catalogue, Expected, HardyPair, Role};
use crate::fields::{Expr, RadialProfile, TailEnd};
use crate::quad::{weighted_mass, weighted_mass_report, IntegralVerdict, QuadError, ShellScheme};
use crate::rayleigh::{lambda_infinity_probe, Grading, ProbePoint, ProbeSettings, RayleighError};
use crate::report::{csv_field, svg_plot, Series};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("pair {0} has no λ∞ trace")]
    MissingTrace(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Rayleigh(#[from] RayleighError),
}

/// Probe values and the largest value compatible with optimality at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrace {
    pub points: Vec<ProbePoint>,
    pub bound: f64,
}

impl ProbeTrace {
    pub fn max_lambda(&self) -> f64 {
        self.points.iter().map(|p| p.lambda_h).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub pair_id: String,
    pub role: Role,
    pub expected: Option<Expected>,
    pub verdict: IntegralVerdict,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DecayReport {
    fn new(pair_id: &str, role: Role, expected: Option<Expected>, verdict: IntegralVerdict) -> Self {
        let consistent = expected.is_some_and(|e| e.matches(&verdict));
        DecayReport { pair_id: pair_id.to_string(), role, expected, verdict, consistent, probe: None, error: None }
    }

    fn failed(pair_id: &str, role: Role, expected: Option<Expected>, err: &DecayError) -> Self {
        DecayReport {
            pair_id: pair_id.to_string(),
            role,
            expected,
            verdict: IntegralVerdict::Inconclusive { partials: Vec::new() },
            consistent: false,
            probe: None,
            error: Some(err.to_string()),
        }
    }
}

/// Weighted-mass verdict beyond `rho`, checked against the pair's expectation.
pub fn decay_test(pair: &HardyPair, rho: f64) -> Result<DecayReport, DecayError> {
    let verdict = weighted_mass(pair, rho)?;
    Ok(DecayReport::new(&pair.label, pair.role, pair.expected, verdict))
}

/// Like [`decay_test`], but the reference must carry infinite weighted mass.
pub fn null_criticality_test(pair: &HardyPair, rho: f64) -> Result<DecayReport, DecayError> {
    let verdict = weighted_mass(pair, rho)?;
    Ok(DecayReport::new(&pair.label, Role::NullCriticality, Some(Expected::Divergent), verdict))
}

/// A divergent null-criticality verdict requires every probe value to stay
/// within the trace's bound. A convergent one asserts nothing.
pub fn optimality_consistency(pair: &HardyPair, probe: Option<&ProbeTrace>) -> Result<DecayReport, DecayError> {
    let probe = match probe {
        Some(t) if !t.points.is_empty() => t,
        _ => return Err(DecayError::MissingTrace(pair.label.clone())),
    };
    let null = null_criticality_test(pair, pair.rho)?;
    let consistent = match &null.verdict {
        IntegralVerdict::Divergent { .. } => probe.points.iter().all(|p| p.lambda_h <= probe.bound),
        IntegralVerdict::Convergent { .. } => true,
        IntegralVerdict::Inconclusive { .. } => false,
    };
    Ok(DecayReport {
        pair_id: pair.label.clone(),
        role: Role::OptimalityProbe,
        expected: Some(Expected::Divergent),
        verdict: null.verdict,
        consistent,
        probe: Some(probe.clone()),
        error: None,
    })
}

fn has_log(e: &Expr) -> bool {
    match e {
        Expr::Log { .. } | Expr::XLog { .. } => true,
        Expr::Pow { .. } | Expr::ShiftPow { .. } => false,
        Expr::Scale { arg, .. } | Expr::RPow { arg, .. } => has_log(arg),
        Expr::Sum { terms: v } | Expr::Prod { factors: v } => v.iter().any(has_log),
    }
}

/// How a pair's λ∞ trace is computed.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbePlan {
    pub settings: ProbeSettings,
    pub rho_list: Vec<f64>,
    pub bound: f64,
}

pub const PROBE_WIDTH: f64 = 40.0;
pub const PROBE_ELEMENTS: usize = 4096;
pub const PROBE_MESH_TOLERANCE: f64 = 1e-3;

/// Mesh layout for Rayleigh quotients of a pair on supports of log-width
/// `width` near its tail, on exterior domains and strips.
///
/// Weights with logarithmic factors get meshes uniform in `log log r`. For
/// `p = 2` the critical inverse-square potential is factored out through its
/// ground state `r^{(2-N)/2}`.
pub fn probe_settings(pair: &HardyPair, width: f64, elements: usize) -> Option<ProbeSettings> {
    let domain = &pair.problem.domain;
    let mut settings = ProbeSettings::new(width, elements, Grading::Uniform);
    match domain.tail() {
        TailEnd::Infinity => {
            if has_log(pair.weight.form()) {
                settings.grading = Grading::Geometric;
            }
            if let (Some(v), true) = (&pair.problem.potential, pair.problem.p == 2.0) {
                let n = domain.dimension() as f64;
                let critical = -((n - 2.0) / 2.0).powi(2);
                let inverse_square = [2.0, 5.0, 11.0].iter().all(|&r| (v.value(r) * r * r - critical).abs() < 1e-12);
                if inverse_square {
                    let ground = RadialProfile::new(Expr::pow((2.0 - n) / 2.0), 0.0, f64::INFINITY).ok()?;
                    settings.options.ground_state = Some(ground);
                }
            }
        }
        TailEnd::Above(c) if c == 0.0 => {}
        _ => return None,
    }
    Some(settings)
}

/// `ρ, 2ρ, 4ρ, 8ρ` outward (halving on strips).
pub fn probe_radii(pair: &HardyPair) -> Vec<f64> {
    let step: f64 = if pair.problem.domain.tail() == TailEnd::Infinity { 2.0 } else { 0.5 };
    (0..4).map(|k| pair.rho * step.powi(k)).collect()
}

/// `1 + π²/(C L²)` plus the mesh tolerance: the truncated first eigenvalue in
/// units of an optimal weight with constant `C`.
pub fn probe_bound(hardy_constant: f64, width: f64) -> f64 {
    1.0 + std::f64::consts::PI.powi(2) / (hardy_constant * width * width) + PROBE_MESH_TOLERANCE
}

/// Probes run for `p = 2` null-criticality pairs without potential or with
/// the critical inverse-square one.
pub fn probe_plan(pair: &HardyPair) -> Option<ProbePlan> {
    if pair.role != Role::NullCriticality || pair.problem.p != 2.0 {
        return None;
    }
    let settings = probe_settings(pair, PROBE_WIDTH, PROBE_ELEMENTS)?;
    if pair.problem.potential.is_some() && settings.options.ground_state.is_none() {
        return None;
    }
    Some(ProbePlan { settings, rho_list: probe_radii(pair), bound: probe_bound(pair.hardy_constant, PROBE_WIDTH) })
}

pub fn probe_trace(pair: &HardyPair, plan: &ProbePlan) -> Result<ProbeTrace, DecayError> {
    let points = lambda_infinity_probe(&pair.problem, &pair.weight, &plan.rho_list, &plan.settings)?;
    Ok(ProbeTrace { points, bound: plan.bound })
}

fn primary_row(pair: &HardyPair) -> DecayReport {
    let run = if pair.role == Role::NullCriticality {
        null_criticality_test(pair, pair.rho)
    } else {
        decay_test(pair, pair.rho)
    };
    run.unwrap_or_else(|e| DecayReport::failed(&pair.label, pair.role, pair.expected, &e))
}

fn probe_row(pair: &HardyPair, plan: &ProbePlan) -> DecayReport {
    probe_trace(pair, plan)
        .and_then(|t| optimality_consistency(pair, Some(&t)))
        .unwrap_or_else(|e| DecayReport::failed(&pair.label, Role::OptimalityProbe, Some(Expected::Divergent), &e))
}

/// Rows of a verdict table, in input order with probe rows after their pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyMatrix {
    pub rows: Vec<DecayReport>,
}

impl ConsistencyMatrix {
    pub fn all_consistent(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.consistent)
    }

    pub fn inconsistent(&self) -> impl Iterator<Item = &DecayReport> {
        self.rows.iter().filter(|r| !r.consistent)
    }

    /// Columns `pair_id,role,expected,verdict,value,error_bound,consistent`.
    /// Probe rows report the largest `λ_h` as value and the bound it must
    /// respect as error_bound.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair_id,role,expected,verdict,value,error_bound,consistent\n");
        for r in &self.rows {
            let (value, bound) = match (&r.probe, r.verdict.value()) {
                (Some(t), _) => (format!("{:.12e}", t.max_lambda()), format!("{:.12e}", t.bound)),
                (None, Some((v, e))) => (format!("{v:.12e}"), format!("{e:.3e}")),
                (None, None) => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_field(&r.pair_id),
                r.role.as_str(),
                r.expected.map(|e| e.as_str()).unwrap_or(""),
                r.verdict.kind(),
                value,
                bound,
                r.consistent
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Verdict rows for `pairs`, computed concurrently.
pub fn consistency_matrix_for(pairs: &[HardyPair]) -> ConsistencyMatrix {
    let rows = pairs
        .par_iter()
        .map(|pair| {
            let mut rows = vec![primary_row(pair)];
            if let Some(plan) = probe_plan(pair) {
                rows.push(probe_row(pair, &plan));
            }
            rows
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    ConsistencyMatrix { rows }
}

pub fn consistency_matrix() -> ConsistencyMatrix {
    consistency_matrix_for(&example_catalogue())
}

/// Shell sums `S_k` of the pair's weighted mass against the shell index.
pub fn shell_svg(pair: &HardyPair) -> Result<String, DecayError> {
    let report = weighted_mass_report(pair, pair.rho, &ShellScheme::default())?;
    let mut levels: Vec<usize> = report.shells.iter().map(|s| s.level).collect();
    levels.dedup();
    let series: Vec<Series> = levels
        .iter()
        .map(|&l| {
            let pts = report
                .shells
                .iter()
                .filter(|s| s.level == l && s.sum > 0.0)
                .map(|s| (s.k as f64, s.sum.log10()))
                .collect();
            Series::new(&format!("level {l}"), pts)
        })
        .collect();
    let title = format!("{}: {}", pair.label, report.verdict.kind());
    Ok(svg_plot(&title, "shell k", "log10 S_k", &series))
}
