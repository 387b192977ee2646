//! One check per acceptance criterion; every criterion prints a PASS/FAIL line
//! and the target exits non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use hardy_core::construct::{
    catalogue_entry, green_potential_radial, supersolution_residual, supersolution_weight_infinite,
    HarmonicProfileSpec,
};
use hardy_core::decay::{decay_test, probe_settings, ConsistencyMatrix};
use hardy_core::fields::{parse_expr, DomainSpec, Expr, ProblemSpec, RadialProfile};
use hardy_core::quad::{classify_tail, morrey_norm, MorreyGrid};
use hardy_core::rayleigh::{
    alpha_exponent, best_constant, lambda_infinity_probe, null_sequence_q, Mesh1D, NullSequenceSpec,
};
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn profile(src: &str, lo: f64) -> RadialProfile {
    RadialProfile::on(parse_expr(src).unwrap(), lo).unwrap()
}

fn truncation_oracle(width: f64) -> f64 {
    0.25 + PI * PI / (width * width)
}

fn verify_matrix() -> Outcome {
    let out = std::env::temp_dir().join(format!("hardy-acceptance-{}", std::process::id()));
    let start = Instant::now();
    let run = Command::new(env!("CARGO_BIN_EXE_hardy")).args(["verify", "--out"]).arg(&out).output().unwrap();
    let elapsed = start.elapsed();
    let json = std::fs::read_to_string(out.join("report.json")).unwrap_or_default();
    let _ = std::fs::remove_dir_all(&out);
    let Ok(matrix) = serde_json::from_str::<ConsistencyMatrix>(&json) else {
        return outcome(false, format!("no report (exit {:?})", run.status.code()));
    };
    let inconclusive = matrix.rows.iter().filter(|r| r.verdict.kind() == "Inconclusive").count();
    let pass = run.status.success()
        && matrix.rows.len() >= 13
        && matrix.all_consistent()
        && inconclusive == 0
        && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} rows, {} inconsistent, {} inconclusive, {:.2} s",
            matrix.rows.len(),
            matrix.inconsistent().count(),
            inconclusive,
            elapsed.as_secs_f64()
        ),
    )
}

fn leray_mass() -> Outcome {
    let report = decay_test(&catalogue_entry("ex1-leray").unwrap(), E).unwrap();
    match report.verdict.value() {
        Some((v, _)) => outcome((v - PI / 2.0).abs() < 1e-6, format!("value {v:.12}, |Δ| = {:.1e}", (v - PI / 2.0).abs())),
        None => outcome(false, format!("verdict {}", report.verdict.kind())),
    }
}

fn oracle_grid() -> Outcome {
    let line = DomainSpec::HalfLine { start: 1.0 };
    let mut agree = 0;
    let mut total = 0;
    for a in [0.5, 1.0, 1.5, 2.0] {
        for b in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let f = profile(&format!("r^-{a}*log(r/1)^-{b}"), 1.0);
            let convergent = a > 1.0 || (a == 1.0 && b > 1.0);
            let ok = match classify_tail(&f, &line, E * E) {
                Ok(v) => v.is_convergent() == convergent && v.is_divergent() == !convergent,
                Err(_) => false,
            };
            agree += ok as usize;
            total += 1;
        }
    }
    outcome(agree == total, format!("{agree}/{total} grid points agree"))
}

fn leray_best_constant() -> Outcome {
    let plane = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 2, radius: 1.0 }).unwrap();
    let shape = profile("r^-2*log(r/1)^-2", 1.0);
    let mut pass = true;
    let mut notes = Vec::new();
    let mut previous = f64::INFINITY;
    for width in [10.0, 20.0, 40.0] {
        let start = Instant::now();
        let res = best_constant(&plane, &shape, &Mesh1D::leray(width, 8192).unwrap()).unwrap();
        let elapsed = start.elapsed();
        let err = (res.lambda_h - truncation_oracle(width)).abs();
        pass &= err < 1e-3 && elapsed < Duration::from_secs(10) && res.lambda_h <= previous;
        previous = res.lambda_h;
        let mut by_n = f64::INFINITY;
        for n in [1024, 2048, 4096, 8192] {
            let l = best_constant(&plane, &shape, &Mesh1D::leray(width, n).unwrap()).unwrap().lambda_h;
            pass &= l <= by_n * (1.0 + 1e-12);
            by_n = l;
        }
        notes.push(format!("L={width}: {:.6} ({:.2} s)", res.lambda_h, elapsed.as_secs_f64()));
    }
    outcome(pass, notes.join(", "))
}

fn hardy_best_constant() -> Outcome {
    let space = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }).unwrap();
    let shape = profile("r^-2", 0.0);
    let mut pass = true;
    let mut notes = Vec::new();
    for width in [10.0, 20.0, 40.0] {
        let res = best_constant(&space, &shape, &Mesh1D::log_uniform(1.0, width, 8192).unwrap()).unwrap();
        pass &= (res.lambda_h - truncation_oracle(width)).abs() < 1e-3;
        notes.push(format!("L={width}: {:.6}", res.lambda_h));
    }
    outcome(pass, notes.join(", "))
}

fn null_sequence() -> Outcome {
    let plane = ProblemSpec::laplacian(2.0, DomainSpec::PuncturedSpace { n: 2 }).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let width = 10f64.powi(k);
        let q = null_sequence_q(&plane, &NullSequenceSpec { plateau: E, width }).unwrap();
        worst = worst.max((q * width - 2.0 * PI).abs());
    }
    outcome(worst < 1e-10, format!("max |Q·L - 2π| = {worst:.1e}"))
}

fn supersolution_residuals() -> Outcome {
    let radii: Vec<f64> = (0..100).map(|k| 1.0 + 10f64.powf(-1.0 + 5.0 * k as f64 / 99.0)).collect();
    let leray = catalogue_entry("ex1-leray-null").unwrap();
    let plane3 = ProblemSpec::laplacian(3.0, DomainSpec::ExteriorBall { n: 2, radius: 1.0 }).unwrap();
    let h = HarmonicProfileSpec::new(profile("r^0.5", 1.0), 1.0, f64::INFINITY).unwrap();
    let above = supersolution_weight_infinite(&h, 3.0).unwrap();
    let ex3 = catalogue_entry("ex3-log").unwrap();
    let cases = [
        ("p=N", &leray.problem, &leray.reference, &leray.weight),
        ("p>N", &plane3, &above.v, &above.weight),
        ("linear", &ex3.problem, &ex3.reference, &ex3.weight),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, problem, v, w) in cases {
        let worst = radii.iter().map(|&r| supersolution_residual(problem, v, w, r)).fold(0.0, f64::max);
        pass &= worst <= 1e-5;
        notes.push(format!("{name}: {worst:.1e}"));
    }
    outcome(pass, format!("max relative residual {}", notes.join(", ")))
}

fn green_bump() -> Outcome {
    let c = 315.0 / (64.0 * PI);
    let density = RadialProfile::new(parse_expr(&format!("{c}*(1-r^2)^3")).unwrap(), 0.0, 1.0).unwrap();
    let g = green_potential_radial(&density, 3).unwrap();
    let at_two = g.value(2.0).unwrap();
    let err = (at_two - 1.0 / (8.0 * PI)).abs();
    let mut worst: f64 = 0.0;
    for k in 1..20 {
        let r = 0.05 * k as f64 * 0.95;
        let lap = g.laplacian_fd(r, 1e-2).unwrap();
        worst = worst.max((-lap - density.value(r)).abs() / density.value(r));
    }
    outcome(err < 1e-8 && worst < 1e-4, format!("|G(2) - 1/(8π)| = {err:.1e}, FD relative error {worst:.1e}"))
}

fn alpha_roots() -> Outcome {
    let centre = alpha_exponent(3.0 / 16.0, 2.0).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for p in [1.5f64, 2.0, 3.0] {
        let c = ((p - 1.0) / p).powf(p);
        for _ in 0..100 {
            let lambda = c * rng.random_range(1e-6..1.0 - 1e-6);
            let a = alpha_exponent(lambda, p).unwrap();
            worst = worst.max(((p - 1.0) * a.powf(p - 1.0) * (1.0 - a) - lambda).abs());
        }
    }
    let err = (centre - 0.75).abs();
    outcome(err < 1e-12 && worst <= 1e-12, format!("|α - 0.75| = {err:.1e}, max residual {worst:.1e}"))
}

fn morrey_unit_ball() -> Outcome {
    let one = RadialProfile::on(Expr::one(), 0.0).unwrap();
    let m = morrey_norm(&one, 3, 1.0, 2.0, MorreyGrid::resolution(1000)).unwrap();
    let rel = (m - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0);
    outcome(rel < 0.02, format!("norm {m:.6}, relative error {rel:.2e}"))
}

fn lambda_infinity() -> Outcome {
    let pair = catalogue_entry("ex1-leray").unwrap();
    let width = 200.0;
    let settings = probe_settings(&pair, width, 8192).unwrap();
    let rhos = [2.0, 4.0, 8.0, 16.0];
    let full = lambda_infinity_probe(&pair.problem, &pair.weight, &rhos, &settings).unwrap();
    let half = pair.with_scaled_weight(0.5);
    let halved = lambda_infinity_probe(&half.problem, &half.weight, &rhos, &settings).unwrap();
    let bound = 1.0 + PI * PI / (width * width) + 1e-3;
    let within = full.iter().all(|p| p.lambda_h <= bound);
    let doubling = full
        .iter()
        .zip(&halved)
        .map(|(a, b)| (b.lambda_h - 2.0 * a.lambda_h).abs() / (2.0 * a.lambda_h))
        .fold(0.0, f64::max);
    let max = full.iter().map(|p| p.lambda_h).fold(0.0, f64::max);
    outcome(within && doubling <= 1e-10, format!("max λ_h {max:.6} ≤ {bound:.6}, doubling error {doubling:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("verdict matrix", verify_matrix),
        ("Leray weighted mass", leray_mass),
        ("tail oracle grid", oracle_grid),
        ("Leray best constant", leray_best_constant),
        ("Hardy best constant", hardy_best_constant),
        ("null sequence", null_sequence),
        ("supersolution residual", supersolution_residuals),
        ("Green potential", green_bump),
        ("alpha exponent", alpha_roots),
        ("Morrey norm", morrey_unit_ball),
        ("lambda infinity probes", lambda_infinity),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
