use hardy_core::construct::{catalogue_entry, example_catalogue, green_potential_radial};
use hardy_core::decay::decay_test;
use hardy_core::fields::{parse_expr, DomainSpec, Expr, ProblemSpec, RadialProfile, TailEnd};
use hardy_core::quad::{classify_tail, integrate_shell, IntegralVerdict};
use hardy_core::rayleigh::{alpha_exponent, best_constant, q_functional, weighted_norm, Mesh1D};
use proptest::prelude::*;

fn profile(src: &str, lo: f64) -> RadialProfile {
    RadialProfile::on(parse_expr(src).unwrap(), lo).unwrap()
}

#[test]
fn tail_oracle_grid() {
    let line = DomainSpec::HalfLine { start: 1.0 };
    let rho = std::f64::consts::E.powi(2);
    for a in [0.5, 1.0, 1.5, 2.0] {
        for b in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let f = profile(&format!("r^-{a}*log(r/1)^-{b}"), 1.0);
            let verdict = classify_tail(&f, &line, rho).unwrap();
            let convergent = a > 1.0 || (a == 1.0 && b > 1.0);
            assert_eq!(verdict.is_convergent(), convergent, "a = {a}, b = {b}: {verdict:?}");
            assert_eq!(verdict.is_divergent(), !convergent, "a = {a}, b = {b}: {verdict:?}");
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_rho() {
    for pair in example_catalogue() {
        let moved = if pair.problem.domain.tail() == TailEnd::Infinity { 4.0 * pair.rho } else { pair.rho / 4.0 };
        let near = decay_test(&pair, pair.rho).unwrap();
        let far = decay_test(&pair, moved).unwrap();
        assert_eq!(near.verdict.kind(), far.verdict.kind(), "{}", pair.label);
        assert!(far.consistent, "{}", pair.label);
    }
}

#[test]
fn convergent_values_scale_with_the_weight() {
    for pair in example_catalogue() {
        let base = decay_test(&pair, pair.rho).unwrap();
        let scaled = decay_test(&pair.with_scaled_weight(3.5), pair.rho).unwrap();
        assert_eq!(base.verdict.kind(), scaled.verdict.kind(), "{}", pair.label);
        if let (Some((v, e)), Some((w, f))) = (base.verdict.value(), scaled.verdict.value()) {
            assert!((w - 3.5 * v).abs() <= 3.5 * e + f + 1e-13 * w, "{}: {w} vs {}", pair.label, 3.5 * v);
        }
    }
}

#[test]
fn leray_mass_matches_the_antiderivative() {
    let pair = catalogue_entry("ex1-leray").unwrap();
    for rho in [std::f64::consts::E, 5.0, 100.0] {
        match decay_test(&pair, rho).unwrap().verdict {
            IntegralVerdict::Convergent { value, error_bound } => {
                let exact = std::f64::consts::FRAC_PI_2 / rho.ln();
                assert!((value - exact).abs() <= error_bound.max(1e-12) * 10.0, "{value} vs {exact}");
            }
            other => panic!("{other:?}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rayleigh_quotients_bound_the_best_constant(seed in proptest::collection::vec(-1.0f64..1.0, 31)) {
        let space = ProblemSpec::laplacian(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }).unwrap();
        let mesh = Mesh1D::log_uniform(2.0, 6.0, 32).unwrap();
        let w = profile("r^-2", 0.0);
        let lambda = best_constant(&space, &w, &mesh).unwrap().lambda_h;
        let mut f = vec![0.0];
        f.extend(seed.iter().copied());
        f.push(0.0);
        let norm = weighted_norm(&space, &w, &mesh, &f).unwrap();
        prop_assume!(norm > 1e-12);
        let q = q_functional(&space, &mesh, &f).unwrap();
        prop_assert!(q / norm >= lambda * (1.0 - 1e-10));
        let doubled: Vec<f64> = f.iter().map(|x| 2.0 * x).collect();
        let q2 = q_functional(&space, &mesh, &doubled).unwrap();
        prop_assert!((q2 - 4.0 * q).abs() <= 1e-12 * q2.abs());
    }

    #[test]
    fn p_homogeneity_of_the_energy(c in 0.1f64..10.0, p in 1.5f64..4.0) {
        let plane = ProblemSpec::laplacian(p, DomainSpec::PuncturedSpace { n: 2 }).unwrap();
        let mesh = Mesh1D::log_uniform(1.0, 4.0, 16).unwrap();
        let f: Vec<f64> = (0..=16).map(|k| (std::f64::consts::PI * k as f64 / 16.0).sin().abs()).collect();
        let mut f = f;
        f[16] = 0.0;
        let g: Vec<f64> = f.iter().map(|x| c * x).collect();
        let (qf, qg) = (q_functional(&plane, &mesh, &f).unwrap(), q_functional(&plane, &mesh, &g).unwrap());
        prop_assert!((qg - c.powf(p) * qf).abs() <= 1e-11 * qg);
    }

    #[test]
    fn alpha_solves_its_equation(t in 0.001f64..0.999, pick in 0usize..3) {
        let p: f64 = [1.5, 2.0, 3.0][pick];
        let c = ((p - 1.0) / p).powf(p);
        let lambda = t * c;
        let alpha = alpha_exponent(lambda, p).unwrap();
        prop_assert!(alpha > (p - 1.0) / p && alpha < 1.0);
        let residual = ((p - 1.0) * alpha.powf(p - 1.0) * (1.0 - alpha) - lambda).abs();
        prop_assert!(residual <= 1e-12, "residual {}", residual);
    }

    #[test]
    fn shells_are_additive(a in 1.0f64..3.0, w1 in 0.1f64..5.0, w2 in 0.1f64..5.0, s in -3.0f64..1.0) {
        let f = RadialProfile::on(Expr::pow(s), 0.0).unwrap();
        let d = DomainSpec::PuncturedSpace { n: 3 };
        let (b, c) = (a + w1, a + w1 + w2);
        let tol = 1e-10;
        let (whole, e0) = integrate_shell(&f, &d, a, c, tol).unwrap();
        let (left, e1) = integrate_shell(&f, &d, a, b, tol).unwrap();
        let (right, e2) = integrate_shell(&f, &d, b, c, tol).unwrap();
        prop_assert!((whole - left - right).abs() <= e0 + e1 + e2 + 1e-13 * whole.abs());
    }

    #[test]
    fn derivatives_match_differences(a in -3.0f64..3.0, b in -2.0f64..2.0, r in 1.5f64..50.0) {
        let f = profile(&format!("r^({a})*log(r/1)^({b})"), 1.0);
        let h = 1e-5 * r;
        let fd = (f.value(r + h) - f.value(r - h)) / (2.0 * h);
        let exact = f.slope(r);
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(f.value(r) / r), "{} vs {}", fd, exact);
    }

    #[test]
    fn green_potentials_are_linear(c in 0.1f64..20.0, r in 0.05f64..4.0) {
        let bump = RadialProfile::new(parse_expr("(1-r^2)^3").unwrap(), 0.0, 1.0).unwrap();
        let scaled = RadialProfile::new(parse_expr(&format!("{c}*(1-r^2)^3")).unwrap(), 0.0, 1.0).unwrap();
        let (g, h) = (green_potential_radial(&bump, 3).unwrap(), green_potential_radial(&scaled, 3).unwrap());
        let (u, v) = (g.value(r).unwrap(), h.value(r).unwrap());
        prop_assert!((v - c * u).abs() <= 1e-11 * v.abs());
    }
}
