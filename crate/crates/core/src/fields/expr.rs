//! Closed-form radial expressions and their symbolic derivatives.

use serde::{Deserialize, Serialize};
use std::fmt;


/// A node of the radial expression grammar. The variable is the radius `r`
/// (or the boundary distance `δ` on strip domains).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
pub enum Expr {
    /// `r^a`
    Pow { a: f64 },
    /// `log(r / r0)`
    Log { r0: f64 },
    /// `(r - r0)^a`
    ShiftPow { r0: f64, a: f64 },
    /// `X_i(arg)` with `X_0 = 1`, `X_1(t) = 1 / (1 - log t)`, `X_{i+1} = X_1 ∘ X_i`.
    XLog { i: u32, arg: Box<Expr> },
    Sum { terms: Vec<Expr> },
    Prod { factors: Vec<Expr> },
    Scale { c: f64, arg: Box<Expr> },
    /// `arg^a` for a positive subexpression.
    RPow { a: f64, arg: Box<Expr> },
}

/// Evaluation point. `near = Some((c, d))` carries `d = r - c` exactly so that
/// `(r - c)^a` and `log(r / c)` stay accurate as `r → c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub r: f64,
    pub near: Option<(f64, f64)>,
}

impl Point {
    pub fn at(r: f64) -> Self {
        Point { r, near: None }
    }

    pub fn near(anchor: f64, offset: f64) -> Self {
        Point { r: anchor + offset, near: Some((anchor, offset)) }
    }

    fn offset_from(&self, c: f64) -> f64 {
        match self.near {
            Some((a, d)) if a == c => d,
            _ => self.r - c,
        }
    }
}

impl Expr {
    pub fn pow(a: f64) -> Expr {
        Expr::Pow { a }
    }

    pub fn one() -> Expr {
        Expr::Pow { a: 0.0 }
    }

    pub fn constant(c: f64) -> Expr {
        scale(c, Expr::one())
    }

    pub fn zero() -> Expr {
        Expr::Scale { c: 0.0, arg: Box::new(Expr::one()) }
    }

    pub fn log(r0: f64) -> Expr {
        Expr::Log { r0 }
    }

    pub fn shift_pow(r0: f64, a: f64) -> Expr {
        if a == 0.0 {
            Expr::one()
        } else {
            Expr::ShiftPow { r0, a }
        }
    }

    pub fn xlog(i: u32, arg: Expr) -> Expr {
        if i == 0 {
            Expr::one()
        } else {
            Expr::XLog { i, arg: Box::new(arg) }
        }
    }

    /// Value of the subtree if it does not depend on `r`.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Pow { a } if *a == 0.0 => Some(1.0),
            Expr::Pow { .. } | Expr::Log { .. } | Expr::ShiftPow { .. } => None,
            Expr::XLog { i, arg } => arg.as_const().map(|t| xlog_value(*i, t)),
            Expr::Sum { terms } => terms.iter().map(Expr::as_const).sum(),
            Expr::Prod { factors } => factors.iter().map(Expr::as_const).product(),
            Expr::Scale { c, arg } => {
                if *c == 0.0 {
                    Some(0.0)
                } else {
                    arg.as_const().map(|v| c * v)
                }
            }
            Expr::RPow { a, arg } => arg.as_const().map(|v| v.powf(*a)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Every float parameter is finite and every composite node non-empty.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Expr::Pow { a } => a.is_finite(),
            Expr::Log { r0 } => r0.is_finite() && *r0 > 0.0,
            Expr::ShiftPow { r0, a } => r0.is_finite() && a.is_finite(),
            Expr::XLog { arg, .. } => arg.is_well_formed(),
            Expr::Sum { terms } => !terms.is_empty() && terms.iter().all(Expr::is_well_formed),
            Expr::Prod { factors } => {
                !factors.is_empty() && factors.iter().all(Expr::is_well_formed)
            }
            Expr::Scale { c, arg } => c.is_finite() && arg.is_well_formed(),
            Expr::RPow { a, arg } => a.is_finite() && arg.is_well_formed(),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_at(&Point::at(r))
    }

    pub fn eval_at(&self, x: &Point) -> f64 {
        match self {
            Expr::Pow { a } => {
                if *a == 0.0 {
                    1.0
                } else {
                    x.r.powf(*a)
                }
            }
            Expr::Log { r0 } => match x.near {
                Some((c, d)) if c == *r0 => (d / c).ln_1p(),
                _ => (x.r / r0).ln(),
            },
            Expr::ShiftPow { r0, a } => x.offset_from(*r0).powf(*a),
            Expr::XLog { i, arg } => xlog_value(*i, arg.eval_at(x)),
            Expr::Sum { terms } => terms.iter().map(|e| e.eval_at(x)).sum(),
            Expr::Prod { factors } => factors.iter().map(|e| e.eval_at(x)).product(),
            Expr::Scale { c, arg } => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * arg.eval_at(x)
                }
            }
            Expr::RPow { a, arg } => {
                if *a == 0.0 {
                    1.0
                } else {
                    arg.eval_at(x).powf(*a)
                }
            }
        }
    }

    /// Symbolic derivative with respect to `r`, in the same grammar.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Pow { a } => {
                if *a == 0.0 {
                    Expr::zero()
                } else {
                    scale(*a, Expr::pow(a - 1.0))
                }
            }
            Expr::Log { .. } => Expr::pow(-1.0),
            Expr::ShiftPow { r0, a } => scale(*a, Expr::shift_pow(*r0, a - 1.0)),
            Expr::XLog { i, arg } => {
                // X_i'(t) = X_i(t)^2 * prod_{j=1}^{i-1} X_j(t) / t
                let mut factors = vec![rpow(2.0, Expr::xlog(*i, (**arg).clone()))];
                for j in 1..*i {
                    factors.push(Expr::xlog(j, (**arg).clone()));
                }
                factors.push(rpow(-1.0, (**arg).clone()));
                factors.push(arg.derivative());
                prod(factors)
            }
            Expr::Sum { terms } => sum(terms.iter().map(Expr::derivative).collect()),
            Expr::Prod { factors } => {
                let mut terms = Vec::with_capacity(factors.len());
                for k in 0..factors.len() {
                    let dk = factors[k].derivative();
                    if dk.is_zero() {
                        continue;
                    }
                    let mut fs: Vec<Expr> = Vec::with_capacity(factors.len());
                    for (j, f) in factors.iter().enumerate() {
                        fs.push(if j == k { dk.clone() } else { f.clone() });
                    }
                    terms.push(prod(fs));
                }
                sum(terms)
            }
            Expr::Scale { c, arg } => scale(*c, arg.derivative()),
            Expr::RPow { a, arg } => {
                if *a == 0.0 {
                    Expr::zero()
                } else {
                    prod(vec![scale(*a, rpow(a - 1.0, (**arg).clone())), arg.derivative()])
                }
            }
        }
    }

    /// `d/dr log|e|`, expanded over products and powers so that cancelling
    /// contributions of numerator and denominator merge symbolically.
    pub fn log_derivative(&self) -> Expr {
        match self {
            Expr::Pow { a } => scale(*a, Expr::pow(-1.0)),
            Expr::Log { .. } => prod(vec![Expr::pow(-1.0), rpow(-1.0, self.clone())]),
            Expr::ShiftPow { r0, a } => scale(*a, Expr::shift_pow(*r0, -1.0)),
            Expr::Scale { arg, .. } => arg.log_derivative(),
            Expr::RPow { a, arg } => scale(*a, arg.log_derivative()),
            Expr::Prod { factors } => sum(factors.iter().map(Expr::log_derivative).collect()),
            Expr::XLog { i, arg } => {
                let mut factors: Vec<Expr> =
                    (1..=*i).map(|j| Expr::xlog(j, (**arg).clone())).collect();
                factors.push(arg.log_derivative());
                prod(factors)
            }
            Expr::Sum { .. } => prod(vec![self.derivative(), rpow(-1.0, self.clone())]),
        }
    }

    /// Anchors `r0` of `log(r/r0)` and `(r-r0)^a` nodes with `a < 0`.
    pub fn anchors(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Log { r0 } => out.push(*r0),
            Expr::ShiftPow { r0, a } if *a < 0.0 => out.push(*r0),
            Expr::ShiftPow { .. } | Expr::Pow { .. } => {}
            Expr::XLog { arg, .. } | Expr::Scale { arg, .. } | Expr::RPow { arg, .. } => {
                arg.anchors(out)
            }
            Expr::Sum { terms: v } | Expr::Prod { factors: v } => {
                v.iter().for_each(|e| e.anchors(out))
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Pow { .. } | Expr::Log { .. } | Expr::ShiftPow { .. } => 1,
            Expr::XLog { arg, .. } | Expr::Scale { arg, .. } | Expr::RPow { arg, .. } => {
                1 + arg.node_count()
            }
            Expr::Sum { terms: v } | Expr::Prod { factors: v } => {
                1 + v.iter().map(Expr::node_count).sum::<usize>()
            }
        }
    }
}

/// `X_i(t)` for a plain argument.
pub fn xlog_value(i: u32, t: f64) -> f64 {
    (0..i).fold(t, |acc, _| 1.0 / (1.0 - acc.ln()))
}

/// `c * e`, folding constants and nested scales.
pub fn scale(c: f64, e: Expr) -> Expr {
    if c == 0.0 || e.is_zero() {
        return Expr::zero();
    }
    if c == 1.0 {
        return e;
    }
    match e {
        Expr::Scale { c: d, arg } => scale(c * d, *arg),
        other => match other.as_const() {
            Some(v) if v == 1.0 => Expr::Scale { c, arg: Box::new(Expr::one()) },
            _ => Expr::Scale { c, arg: Box::new(other) },
        },
    }
}

/// Product with flattening, constant folding and merging of plain powers.
pub fn prod(factors: Vec<Expr>) -> Expr {
    let mut coef = 1.0;
    let mut power = 0.0;
    let mut has_power = false;
    let mut rest = Vec::new();
    let mut stack: Vec<Expr> = factors.into_iter().rev().collect();
    while let Some(f) = stack.pop() {
        if let Some(v) = f.as_const() {
            coef *= v;
            continue;
        }
        match f {
            Expr::Prod { factors } => stack.extend(factors.into_iter().rev()),
            Expr::Scale { c, arg } => {
                coef *= c;
                stack.push(*arg);
            }
            Expr::Pow { a } => {
                power += a;
                has_power = true;
            }
            other => rest.push(other),
        }
    }
    if coef == 0.0 {
        return Expr::zero();
    }
    if has_power && power != 0.0 {
        rest.insert(0, Expr::pow(power));
    }
    let body = match rest.len() {
        0 => Expr::one(),
        1 => rest.pop().unwrap(),
        _ => Expr::Prod { factors: rest },
    };
    scale(coef, body)
}

/// Sum with flattening, merging of like terms and removal of zero terms.
pub fn sum(terms: Vec<Expr>) -> Expr {
    let mut constant = 0.0;
    let mut merged: Vec<(f64, Expr)> = Vec::new();
    let mut stack: Vec<Expr> = terms.into_iter().rev().collect();
    while let Some(t) = stack.pop() {
        if let Some(v) = t.as_const() {
            constant += v;
            continue;
        }
        let (c, body) = match t {
            Expr::Sum { terms } => {
                stack.extend(terms.into_iter().rev());
                continue;
            }
            Expr::Scale { c, arg } => match *arg {
                Expr::Sum { terms } => {
                    stack.extend(terms.into_iter().rev().map(|t| scale(c, t)));
                    continue;
                }
                body => (c, body),
            },
            other => (1.0, other),
        };
        match merged.iter_mut().find(|(_, b)| *b == body) {
            Some(slot) => slot.0 += c,
            None => merged.push((c, body)),
        }
    }
    let mut rest: Vec<Expr> = merged
        .into_iter()
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, b)| scale(c, b))
        .collect();
    if constant != 0.0 {
        rest.push(Expr::constant(constant));
    }
    match rest.len() {
        0 => Expr::zero(),
        1 => rest.pop().unwrap(),
        _ => Expr::Sum { terms: rest },
    }
}

/// `e^a` for positive `e`.
pub fn rpow(a: f64, e: Expr) -> Expr {
    if a == 0.0 {
        return Expr::one();
    }
    if a == 1.0 {
        return e;
    }
    if let Some(v) = e.as_const() {
        return Expr::constant(v.powf(a));
    }
    match e {
        Expr::Pow { a: b } => Expr::pow(a * b),
        Expr::ShiftPow { r0, a: b } => Expr::shift_pow(r0, a * b),
        Expr::RPow { a: b, arg } => rpow(a * b, *arg),
        Expr::Scale { c, arg } if c > 0.0 => scale(c.powf(a), rpow(a, *arg)),
        other => Expr::RPow { a, arg: Box::new(other) },
    }
}

fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Pow { a } => {
                if *a == 0.0 {
                    write!(f, "1")
                } else if *a == 1.0 {
                    write!(f, "r")
                } else {
                    write!(f, "r^{}", fmt_num(*a))
                }
            }
            Expr::Log { r0 } => write!(f, "log(r/{})", fmt_num(*r0)),
            Expr::ShiftPow { r0, a } => {
                if *a == 1.0 {
                    write!(f, "(r-{})", fmt_num(*r0))
                } else {
                    write!(f, "(r-{})^{}", fmt_num(*r0), fmt_num(*a))
                }
            }
            Expr::XLog { i, arg } => write!(f, "X_{i}({arg})"),
            Expr::Sum { terms } => {
                write!(f, "(")?;
                for (k, t) in terms.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Prod { factors } => {
                for (k, t) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    match t {
                        Expr::Sum { .. } => write!(f, "{t}")?,
                        _ => write!(f, "{t}")?,
                    }
                }
                Ok(())
            }
            Expr::Scale { c, arg } => match arg.as_const() {
                Some(v) if v == 1.0 => write!(f, "{}", fmt_num(*c)),
                _ => write!(f, "{}*{arg}", fmt_num(*c)),
            },
            Expr::RPow { a, arg } => write!(f, "({arg})^{}", fmt_num(*a)),
        }
    }
}
