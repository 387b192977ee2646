use std::f64::consts::E;

use super::{
    iterated_log_family, linear_log_weight, supersolution_weight_infinite, Expected, HardyPair,
    HarmonicProfileSpec, Role,
};
use crate::fields::expr::{prod, rpow, scale, sum};
use crate::fields::{DomainSpec, Expr, ProblemSpec, RadialProfile};
use crate::rayleigh::alpha_exponent;

/// `|(N - p) / p|^p`.
fn hardy_constant(p: f64, n: f64) -> f64 {
    ((n - p) / p).abs().powf(p)
}

fn on(form: Expr, lo: f64) -> RadialProfile {
    RadialProfile::on(form, lo).expect("catalogue profiles are well formed")
}

fn problem(p: f64, domain: DomainSpec, potential: Option<RadialProfile>) -> ProblemSpec {
    ProblemSpec::new(p, domain, potential).expect("catalogue problems are valid")
}

struct Entry {
    label: &'static str,
    role: Role,
    expected: Expected,
    problem: ProblemSpec,
    weight: RadialProfile,
    reference: RadialProfile,
    rho: f64,
    hardy_constant: f64,
}

impl Entry {
    fn pair(self) -> HardyPair {
        HardyPair {
            label: self.label.to_string(),
            role: self.role,
            exponent: self.problem.p,
            problem: self.problem,
            weight: self.weight,
            reference: self.reference,
            dual: None,
            expected: Some(self.expected),
            rho: self.rho,
            hardy_constant: self.hardy_constant,
        }
    }
}

fn example1() -> Vec<HardyPair> {
    let plane = DomainSpec::ExteriorBall { n: 2, radius: 1.0 };
    let g = HarmonicProfileSpec::new(on(Expr::log(1.0), 1.0), 0.0, f64::INFINITY).expect("log is monotone");
    let leray = supersolution_weight_infinite(&g, 2.0).expect("M = ∞");
    let g = HarmonicProfileSpec::new(on(Expr::pow(0.5), 1.0), 1.0, f64::INFINITY).expect("power is monotone");
    let above = supersolution_weight_infinite(&g, 3.0).expect("M = ∞");
    vec![
        Entry {
            label: "ex1-leray",
            role: Role::CriticalComplement,
            expected: Expected::Convergent,
            problem: problem(2.0, plane.clone(), None),
            weight: leray.weight.clone(),
            reference: on(Expr::one(), 0.0),
            rho: E,
            hardy_constant: 0.25,
        }
        .pair(),
        Entry {
            label: "ex1-leray-null",
            role: Role::NullCriticality,
            expected: Expected::Divergent,
            problem: problem(2.0, plane.clone(), None),
            weight: leray.weight,
            reference: leray.v,
            rho: E,
            hardy_constant: 0.25,
        }
        .pair(),
        Entry {
            label: "ex1-pgtN",
            role: Role::CriticalComplement,
            expected: Expected::Convergent,
            problem: problem(3.0, plane, None),
            weight: above.weight,
            reference: on(Expr::one(), 0.0),
            rho: 2.0,
            hardy_constant: 1.0 / 27.0,
        }
        .pair(),
    ]
}

fn example2() -> Vec<HardyPair> {
    let c = hardy_constant(2.0, 3.0);
    let potential = on(scale(-c, Expr::pow(-2.0)), 0.0);
    let phi = on(Expr::pow(-0.5), 0.0);
    // C ((r-1)^{-2} - r^{-2}) = C (2r - 1) r^{-2} (r-1)^{-2}
    let shifted = prod(vec![
        Expr::constant(c),
        sum(vec![scale(2.0, Expr::pow(1.0)), Expr::constant(-1.0)]),
        Expr::pow(-2.0),
        Expr::shift_pow(1.0, -2.0),
    ]);
    vec![
        Entry {
            label: "ex2-potential",
            role: Role::NullCriticality,
            expected: Expected::Divergent,
            problem: problem(2.0, DomainSpec::PuncturedSpace { n: 3 }, None),
            weight: on(scale(c, Expr::pow(-2.0)), 0.0),
            reference: phi.clone(),
            rho: 2.0,
            hardy_constant: c,
        }
        .pair(),
        Entry {
            label: "ex2-shifted",
            role: Role::CriticalComplement,
            expected: Expected::Convergent,
            problem: problem(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }, Some(potential)),
            weight: on(shifted, 1.0),
            reference: phi,
            rho: 2.0,
            hardy_constant: c,
        }
        .pair(),
    ]
}

fn example3() -> Vec<HardyPair> {
    let n = 3.0;
    let c = hardy_constant(2.0, n);
    let domain = DomainSpec::ExteriorBall { n: 3, radius: 1.0 };
    let potential = on(scale(-c, Expr::pow(-2.0)), 0.0);
    let phi = on(Expr::pow((2.0 - n) / 2.0), 0.0);
    let psi = on(prod(vec![Expr::pow((2.0 - n) / 2.0), Expr::log(1.0)]), 1.0);
    let weight = linear_log_weight(&phi, &psi).expect("φ/ψ decays");
    let ground = on(rpow(0.5, prod(vec![phi.form().clone(), psi.form().clone()])), 1.0);
    let p = problem(2.0, domain, Some(potential));
    let base = Entry {
        label: "ex3-base",
        role: Role::CriticalComplement,
        expected: Expected::Convergent,
        problem: p.clone(),
        weight: weight.clone(),
        reference: phi.clone(),
        rho: 2.0,
        hardy_constant: 0.25,
    }
    .pair();
    let mut product = HardyPair { label: "ex3-product".into(), role: Role::LinearProduct, ..base.clone() };
    product.dual = Some(phi);
    let log = Entry {
        label: "ex3-log",
        role: Role::NullCriticality,
        expected: Expected::Divergent,
        problem: p,
        weight,
        reference: ground,
        rho: 2.0,
        hardy_constant: 0.25,
    }
    .pair();
    vec![base, log, product]
}

fn example4() -> Vec<HardyPair> {
    let (p, n) = (2.0, 3.0);
    let c = hardy_constant(p, n);
    let space = DomainSpec::PuncturedSpace { n: 3 };
    let global = prod(vec![Expr::constant(c), rpow(-1.0, sum(vec![Expr::one(), Expr::pow(p)]))]);
    vec![
        Entry {
            label: "ex4-global",
            role: Role::SubcriticalMinimalGrowth,
            expected: Expected::Convergent,
            problem: problem(p, space.clone(), None),
            weight: on(global, 0.0),
            reference: on(Expr::pow((p - n) / (p - 1.0)), 0.0),
            rho: 2.0,
            hardy_constant: c,
        }
        .pair(),
        Entry {
            label: "ex4-critical",
            role: Role::NullCriticality,
            expected: Expected::Divergent,
            problem: problem(p, space, None),
            weight: on(scale(c, Expr::pow(-p)), 0.0),
            reference: on(Expr::pow((p - n) / p), 0.0),
            rho: 2.0,
            hardy_constant: c,
        }
        .pair(),
    ]
}

/// The Green function of the catalogue's bounded model: `G = 1/(2r)` outside the unit ball in `ℝ^3`.
pub(crate) fn example5_green() -> RadialProfile {
    on(scale(0.5, Expr::pow(-1.0)), 1.0)
}

fn example5() -> Vec<HardyPair> {
    let g = example5_green();
    let domain = DomainSpec::ExteriorBall { n: 3, radius: 1.0 };
    let labels = ["ex5-i0", "ex5-i1", "ex5-i2"];
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let family = iterated_log_family(i as u32, &g).expect("G < 1 outside the unit ball");
            let potential = family.weight.map(|w| scale(-1.0, w)).expect("negated weight is well formed");
            let potential = on(potential.form().clone(), 1.0);
            Entry {
                label,
                role: Role::SubcriticalMinimalGrowth,
                expected: Expected::Convergent,
                problem: problem(2.0, domain.clone(), Some(potential)),
                weight: family.remainder,
                reference: family.solution,
                rho: 2.0,
                hardy_constant: 0.25,
            }
            .pair()
        })
        .collect()
}

fn example6() -> Vec<HardyPair> {
    let strip = DomainSpec::BoundaryStrip { n: 1, depth: 1.0 };
    let mut out = Vec::new();
    for (p, critical, sub, lambda) in [
        (2.0, "ex6-critical", "ex6-sub", 3.0 / 16.0),
        (3.0, "ex6-critical-p3", "ex6-sub-p3", 0.5 * hardy_constant(3.0, 1.0)),
    ] {
        let c = hardy_constant(p, 1.0);
        let alpha = alpha_exponent(lambda, p).expect("λ lies inside (0, C)");
        let profile = |form: Expr| RadialProfile::new(form, 0.0, 1.0).expect("strip profiles are well formed");
        out.push(
            Entry {
                label: critical,
                role: Role::NullCriticality,
                expected: Expected::Divergent,
                problem: problem(p, strip.clone(), None),
                weight: profile(scale(c, Expr::pow(-p))),
                reference: profile(Expr::pow((p - 1.0) / p)),
                rho: 0.5,
                hardy_constant: c,
            }
            .pair(),
        );
        out.push(
            Entry {
                label: sub,
                role: Role::SubcriticalMinimalGrowth,
                expected: Expected::Convergent,
                problem: problem(p, strip.clone(), Some(profile(scale(-lambda, Expr::pow(-p))))),
                weight: profile(scale(c - lambda, Expr::pow(-p))),
                reference: profile(Expr::pow(alpha)),
                rho: 0.5,
                hardy_constant: c - lambda,
            }
            .pair(),
        );
    }
    out
}

/// Every pair of the six examples, in a fixed order.
pub fn example_catalogue() -> Vec<HardyPair> {
    let mut all = example1();
    all.extend(example2());
    all.extend(example3());
    all.extend(example4());
    all.extend(example5());
    all.extend(example6());
    all
}

pub fn catalogue_ids() -> Vec<String> {
    example_catalogue().into_iter().map(|p| p.label).collect()
}

pub fn catalogue_entry(id: &str) -> Option<HardyPair> {
    example_catalogue().into_iter().find(|p| p.label == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::supersolution_residual;

    #[test]
    fn ids_are_unique_and_complete() {
        let ids = catalogue_ids();
        assert!(ids.len() >= 13);
        for id in [
            "ex1-leray", "ex1-pgtN", "ex2-potential", "ex2-shifted", "ex3-base", "ex3-log", "ex4-global",
            "ex4-critical", "ex5-i0", "ex5-i1", "ex5-i2", "ex6-critical", "ex6-sub",
        ] {
            assert_eq!(ids.iter().filter(|x| *x == id).count(), 1, "{id}");
        }
    }

    #[test]
    fn pinned_values() {
        let leray = catalogue_entry("ex1-leray").unwrap();
        assert!((leray.weight.value(E) - 1.0 / (4.0 * E * E)).abs() < 1e-16);
        assert_eq!(hardy_constant(2.0, 3.0), 0.25);
        assert_eq!(hardy_constant(2.0, 1.0), 0.25);
        let shifted = catalogue_entry("ex2-shifted").unwrap();
        for r in [1.001, 2.0, 1e3] {
            let direct = 0.25 * ((r - 1.0f64).powi(-2) - r.powi(-2));
            assert!((shifted.weight.value(r) - direct).abs() < 1e-12 * direct);
        }
        let ex3 = catalogue_entry("ex3-base").unwrap();
        let r = 5.0f64;
        let w = 1.0 / (4.0 * r * r * r.ln().powi(2));
        assert!((ex3.weight.value(r) - w).abs() < 1e-14 * w);
        let sub = catalogue_entry("ex6-sub").unwrap();
        assert!((sub.reference.value(0.5) - 0.5f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn example5_solutions_solve_their_equation() {
        let g = example5_green();
        let free = problem(2.0, DomainSpec::ExteriorBall { n: 3, radius: 1.0 }, None);
        for i in 0..3 {
            let f = iterated_log_family(i, &g).unwrap();
            for r in [1.2, 3.0, 50.0] {
                let res = supersolution_residual(&free, &f.solution, &f.weight, r);
                assert!(res < 1e-5, "i = {i}, r = {r}: {res}");
            }
        }
    }

    #[test]
    fn pairs_round_trip_through_json() {
        for pair in example_catalogue() {
            let back: HardyPair = serde_json::from_str(&pair.to_json()).unwrap();
            assert_eq!(back, pair);
        }
    }
}
