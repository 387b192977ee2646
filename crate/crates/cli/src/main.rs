mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use hardy_core::construct::{
    catalogue_entry, catalogue_ids, example_catalogue, iterated_log_family, linear_log_weight,
    supersolution_weight_finite, supersolution_weight_infinite, HardyPair, HarmonicProfileSpec,
};
use hardy_core::decay::{consistency_matrix_for, probe_bound, probe_settings, shell_svg};
use hardy_core::fields::{parse_expr, DomainSpec, RadialProfile};
use hardy_core::rayleigh::{
    best_constant_with, lambda_infinity_probe, trace_svg, BestConstantResult, RayleighError, TracePoint,
};

use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// Reported after all outputs are written.
    #[error("{0}")]
    Inconsistent(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Inconsistent(_) | CliError::NonConvergence(_) => 2,
        }
    }
}

fn solver_error(e: RayleighError) -> CliError {
    match e {
        RayleighError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

#[derive(Parser, Debug)]
#[command(name = "hardy", version, about = "Optimal Hardy-weights: verdicts, best constants and constructions")]
struct Cli {
    /// `key = value` config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to the number of logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct RunArgs {
    /// Catalogue id (repeatable).
    #[arg(long = "pair")]
    pair: Vec<String>,
    /// A pair descriptor in JSON instead of a catalogue id.
    #[arg(long)]
    pair_file: Option<PathBuf>,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    /// Log-widths of the truncated supports, comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    width: Vec<f64>,
    /// Mesh elements, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    eigen_tol: Option<f64>,
    #[arg(long)]
    outer_tol: Option<f64>,
    /// Outer iterations of the `p ≠ 2` solver.
    #[arg(long)]
    max_iter: Option<usize>,
}

impl RunArgs {
    fn overrides(&self, jobs: Option<usize>, scale: Option<f64>) -> Overrides {
        Overrides {
            pair: self.pair.clone(),
            pair_file: self.pair_file.clone(),
            rho: self.rho.clone(),
            width: self.width.clone(),
            n: self.n.clone(),
            jobs,
            out: self.out.clone(),
            eigen_tol: self.eigen_tol,
            outer_tol: self.outer_tol,
            max_iter: self.max_iter,
            scale,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Case {
    /// Profiles with `M = ∞`.
    Infinite,
    /// Profiles with finite limits at both ends.
    Finite,
    /// `W = (1/4)(log(G/u))'^2` for a second solution `u`.
    LogWeight,
    /// The iterated-log family built on a profile `0 < G < 1`.
    Iterated,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the example catalogue.
    Catalog {
        id: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Verdict table over the catalogue, with CSV, JSON and SVG reports.
    Verify(RunArgs),
    /// Discrete best constants for the weight shape `W/C` on truncated supports.
    BestConstant(RunArgs),
    /// Best constants of `W` on supports beyond each radius.
    LambdaInf {
        #[command(flatten)]
        run: RunArgs,
        /// Multiplies the weight.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Closed-form weight descriptors from a profile.
    Construct {
        /// The profile `G` as an expression in `r`.
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Case::Infinite)]
        case: Case,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        /// Limit of `G` at the inner end (defaults to `G(r_min)`).
        #[arg(long)]
        gamma1: Option<f64>,
        /// Limit of `G` at the outer end (defaults to infinity).
        #[arg(long)]
        gamma2: Option<f64>,
        /// Second solution for `log-weight`.
        #[arg(long)]
        u: Option<String>,
        /// Family index for `iterated`.
        #[arg(long, default_value_t = 1)]
        i: u32,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn lookup(id: &str) -> Result<HardyPair, CliError> {
    catalogue_entry(id)
        .ok_or_else(|| CliError::Usage(format!("unknown pair {id}; known: {}", catalogue_ids().join(", "))))
}

fn selected_pairs(config: &RunConfig) -> Result<Vec<HardyPair>, CliError> {
    let mut pairs = Vec::new();
    if let Some(path) = &config.pair_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let pair: HardyPair =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        pairs.push(pair);
    }
    for id in &config.pairs {
        pairs.push(lookup(id)?);
    }
    Ok(pairs)
}

fn single_pair(config: &RunConfig) -> Result<HardyPair, CliError> {
    let mut pairs = selected_pairs(config)?;
    match pairs.len() {
        1 => Ok(pairs.remove(0)),
        0 => Err(CliError::Usage("name a pair with --pair or --pair-file".into())),
        _ => Err(CliError::Usage("this command takes a single pair".into())),
    }
}

fn outer_radius(domain: &DomainSpec) -> String {
    match domain {
        DomainSpec::ExteriorBall { radius, .. } => format!("R={radius}"),
        DomainSpec::PuncturedSpace { .. } => "R=0".into(),
        DomainSpec::Annulus { r_in, r_out, .. } => format!("R={r_in}..{r_out}"),
        DomainSpec::BoundaryStrip { depth, .. } => format!("depth={depth}"),
        DomainSpec::HalfLine { start } => format!("start={start}"),
    }
}

fn cmd_catalog(id: Option<String>, json: bool) -> Result<(), CliError> {
    let pairs = match id {
        Some(id) => vec![lookup(&id)?],
        None => example_catalogue(),
    };
    if json {
        let text = serde_json::to_string_pretty(&pairs).map_err(|e| CliError::Io(e.to_string()))?;
        println!("{text}");
        return Ok(());
    }
    for pair in &pairs {
        let group = pair.label.split('-').next().unwrap_or("");
        println!(
            "{:<17} N={} p={} {:<9} {:<25} {:<11} group={group}  W = {}  φ = {}",
            pair.label,
            pair.problem.domain.dimension(),
            pair.problem.p,
            outer_radius(&pair.problem.domain),
            pair.role.as_str(),
            pair.expected.map(|e| e.as_str()).unwrap_or("-"),
            pair.weight,
            pair.reference,
        );
    }
    Ok(())
}

fn cmd_verify(config: &RunConfig) -> Result<(), CliError> {
    let mut pairs = selected_pairs(config)?;
    if pairs.is_empty() {
        pairs = example_catalogue();
    }
    if let Some(&rho) = config.rho.first() {
        for p in &mut pairs {
            p.rho = rho;
        }
    }
    let out = config.prepare_out()?;
    let matrix = consistency_matrix_for(&pairs);
    let plots: Vec<(String, Result<String, String>)> = pairs
        .par_iter()
        .map(|p| (p.label.clone(), shell_svg(p).map_err(|e| e.to_string())))
        .collect();
    write_file(&out.join("report.csv"), &matrix.to_csv())?;
    write_file(&out.join("report.json"), &matrix.to_json())?;
    let shells = out.join("shells");
    std::fs::create_dir_all(&shells).map_err(|e| CliError::Io(format!("{}: {e}", shells.display())))?;
    for (label, svg) in &plots {
        if let Ok(svg) = svg {
            write_file(&shells.join(format!("{label}.svg")), svg)?;
        }
    }
    for r in &matrix.rows {
        let value = match (&r.probe, r.verdict.value()) {
            (Some(t), _) => format!("max λ_h = {:.6} (bound {:.6})", t.max_lambda(), t.bound),
            (None, Some((v, e))) => format!("{v:.10} ± {e:.1e}"),
            (None, None) => String::new(),
        };
        println!(
            "{:<17} {:<25} expected {:<10} got {:<12} {:<5} {value}{}",
            r.pair_id,
            r.role.as_str(),
            r.expected.map(|e| e.as_str()).unwrap_or("-"),
            r.verdict.kind(),
            if r.consistent { "ok" } else { "FAIL" },
            r.error.as_ref().map(|e| format!(" [{e}]")).unwrap_or_default()
        );
    }
    let bad: Vec<&str> = matrix.inconsistent().map(|r| r.pair_id.as_str()).collect();
    println!("{} rows, {} inconsistent; reports in {}", matrix.rows.len(), bad.len(), out.display());
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Inconsistent(format!("inconsistent rows: {}", bad.join(", "))))
    }
}

fn options(config: &RunConfig, base: hardy_core::rayleigh::SolveOptions) -> hardy_core::rayleigh::SolveOptions {
    hardy_core::rayleigh::SolveOptions {
        eigen_tol: config.eigen_tol,
        outer_tol: config.outer_tol,
        outer_max_iter: config.max_iter,
        ..base
    }
}

fn cmd_best_constant(config: &RunConfig) -> Result<(), CliError> {
    let pair = single_pair(config)?;
    let out = config.prepare_out()?;
    let rho = config.rho.first().copied().unwrap_or(pair.rho);
    let shape = pair.shape();
    let mut jobs = Vec::new();
    for &width in &config.widths {
        for &n in &config.elements {
            let settings = probe_settings(&pair, width, n)
                .ok_or_else(|| CliError::Usage(format!("{} has no supported tail for truncation", pair.label)))?;
            let mesh = settings.mesh(&pair.problem, rho).map_err(solver_error)?;
            jobs.push((mesh, options(config, settings.options)));
        }
    }
    let results: Vec<Result<BestConstantResult, RayleighError>> = jobs
        .par_iter()
        .map(|(mesh, opts)| best_constant_with(&pair.problem, &shape, mesh, opts))
        .collect();
    let mut trace: Vec<TracePoint> = Vec::new();
    let mut summary = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(res) => {
                println!(
                    "L = {:<8} n = {:<6} λ_h = {:.9}  (iterations {}, residual {:.1e})",
                    res.mesh.width, res.mesh.elements, res.lambda_h, res.iterations, res.residual
                );
                trace.extend(res.refinement_trace.iter().copied());
                summary.push(serde_json::json!({
                    "L": res.mesh.width,
                    "n": res.mesh.elements,
                    "lambda_h": res.lambda_h,
                    "iterations": res.iterations,
                    "residual": res.residual,
                    "mesh": res.mesh,
                }));
            }
            Err(e) => {
                failure = Some(solver_error(e));
                break;
            }
        }
    }
    let mut csv = String::from("n,L,lambda_h,oracle\n");
    let c = pair.hardy_constant;
    let oracle = |l: f64| c + std::f64::consts::PI.powi(2) / (l * l);
    for t in &trace {
        let o = if pair.problem.p == 2.0 { format!("{:.15e}", oracle(t.width)) } else { String::new() };
        let _ = writeln!(csv, "{},{},{:.15e},{o}", t.n, t.width, t.lambda_h);
    }
    write_file(&out.join("best_constant.csv"), &csv)?;
    let report = serde_json::json!({ "pair": pair.label, "rho": rho, "weight": "W/C", "runs": summary });
    write_file(&out.join("best_constant.json"), &serde_json::to_string_pretty(&report).expect("json values serialize"))?;
    let overlay: Option<&dyn Fn(f64) -> f64> = if pair.problem.p == 2.0 { Some(&oracle) } else { None };
    write_file(&out.join("best_constant.svg"), &trace_svg(&format!("{}: λ_h of W/C", pair.label), &trace, overlay))?;
    failure.map_or(Ok(()), Err)
}

fn cmd_lambda_inf(config: &RunConfig) -> Result<(), CliError> {
    let pair = single_pair(config)?;
    let out = config.prepare_out()?;
    let rho_list = if config.rho.is_empty() { hardy_core::decay::probe_radii(&pair) } else { config.rho.clone() };
    let width = config.widths[0];
    let n = config.elements[0];
    let mut settings = probe_settings(&pair, width, n)
        .ok_or_else(|| CliError::Usage(format!("{} has no supported tail for probes", pair.label)))?;
    settings.options = options(config, settings.options);
    let weight = if config.scale == 1.0 { pair.weight.clone() } else { pair.with_scaled_weight(config.scale).weight };
    let points = lambda_infinity_probe(&pair.problem, &weight, &rho_list, &settings).map_err(solver_error)?;
    let bound = probe_bound(pair.hardy_constant, width);
    let mut csv = String::from("rho,lambda_h,bound,within_bound\n");
    for p in &points {
        println!("ρ = {:<10} λ_h = {:.9}  bound {:.9}", p.rho, p.lambda_h, bound);
        let _ = writeln!(csv, "{},{:.15e},{:.15e},{}", p.rho, p.lambda_h, bound, p.lambda_h <= bound);
    }
    write_file(&out.join("lambda_inf.csv"), &csv)?;
    write_file(
        &out.join("lambda_inf.json"),
        &serde_json::to_string_pretty(&serde_json::json!({
            "pair": pair.label,
            "scale": config.scale,
            "L": width,
            "n": n,
            "bound": bound,
            "points": points,
        }))
        .expect("json values serialize"),
    )?;
    Ok(())
}

fn profile_from(src: &str, r_min: Option<f64>, r_max: Option<f64>) -> Result<RadialProfile, CliError> {
    let form = parse_expr(src).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut anchors = Vec::new();
    form.anchors(&mut anchors);
    let lo = r_min.unwrap_or_else(|| anchors.into_iter().fold(0.0, f64::max));
    RadialProfile::new(form, lo, r_max.unwrap_or(f64::INFINITY)).map_err(|e| CliError::Usage(e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    g: &str,
    p: f64,
    case: Case,
    r_min: Option<f64>,
    r_max: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    u: Option<&str>,
    i: u32,
) -> Result<(), CliError> {
    let usage = |e: hardy_core::construct::ConstructError| CliError::Usage(e.to_string());
    let g = profile_from(g, r_min, r_max)?;
    let json = match case {
        Case::Infinite | Case::Finite => {
            let gamma1 = gamma1.unwrap_or_else(|| g.value(g.r_min()));
            let default_outer = if matches!(case, Case::Infinite) { Some(f64::INFINITY) } else { None };
            let gamma2 = gamma2
                .or(default_outer)
                .ok_or_else(|| CliError::Usage("the finite case needs --gamma2".into()))?;
            let spec = HarmonicProfileSpec::new(g.clone(), gamma1, gamma2).map_err(usage)?;
            let s = match case {
                Case::Infinite => supersolution_weight_infinite(&spec, p),
                _ => supersolution_weight_finite(&spec, p),
            }
            .map_err(usage)?;
            serde_json::json!({
                "case": if matches!(case, Case::Infinite) { "infinite" } else { "finite" },
                "p": p, "g": g, "v1": s.v1, "v": s.v, "weight": s.weight,
            })
        }
        Case::LogWeight => {
            let u = profile_from(u.ok_or_else(|| CliError::Usage("log-weight needs --u".into()))?, r_min, r_max)?;
            let w = linear_log_weight(&g, &u).map_err(usage)?;
            serde_json::json!({ "case": "log-weight", "p": 2.0, "g": g, "u": u, "weight": w })
        }
        Case::Iterated => {
            let family = iterated_log_family(i, &g).map_err(usage)?;
            serde_json::json!({
                "case": "iterated", "i": i, "g": g,
                "weight": family.weight, "solution": family.solution, "remainder": family.remainder,
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&json).expect("json values serialize"));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let resolve = |run: &RunArgs, scale: Option<f64>, widths: &[f64]| {
        RunConfig::resolve(cli.config.as_deref(), run.overrides(cli.jobs, scale), widths)
    };
    let config = match &cli.command {
        Command::Verify(run) => Some(resolve(run, None, &[40.0])?),
        Command::BestConstant(run) => Some(resolve(run, None, &[10.0, 20.0, 40.0])?),
        Command::LambdaInf { run, scale } => Some(resolve(run, *scale, &[200.0])?),
        _ => None,
    };
    if let Some(jobs) = config.as_ref().and_then(|c| c.jobs).or(cli.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    match (&cli.command, &config) {
        (Command::Catalog { id, json }, _) => cmd_catalog(id.clone(), *json),
        (Command::Verify(_), Some(c)) => cmd_verify(c),
        (Command::BestConstant(_), Some(c)) => cmd_best_constant(c),
        (Command::LambdaInf { .. }, Some(c)) => cmd_lambda_inf(c),
        (Command::Construct { g, p, case, r_min, r_max, gamma1, gamma2, u, i }, _) => {
            cmd_construct(g, *p, *case, *r_min, *r_max, *gamma1, *gamma2, u.as_deref(), *i)
        }
        _ => unreachable!("run configs exist for every solver command"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
