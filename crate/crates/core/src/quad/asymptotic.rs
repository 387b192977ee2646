//! Evaluation of profiles at points far beyond the range of `f64`.
//!
//! A point is described by an iterated-logarithm chain `y_0 = r` (or `1/δ`),
//! `y_{j+1} = ln y_j`, given through its deepest member. Values are kept as
//! log-monomials `c · Π y_j^{e_j}` over the members too large for a float, so
//! products and powers are exact in the exponents and sums collapse onto their
//! dominant monomial. This is what makes tails such as
//! `∫ dr / (r log r (log log r)^2)` decidable from a few dozen shells.

use crate::fields::{Expr, TailEnd};

pub(crate) const SLOTS: usize = 8;
/// A chain member `y_j` is kept symbolic once `ln y_j` exceeds this.
const SYMBOLIC_LOG: f64 = 40.0;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mono {
    pub c: f64,
    pub e: [f64; SLOTS],
}

impl Mono {
    pub fn constant(c: f64) -> Mono {
        Mono { c, e: [0.0; SLOTS] }
    }

    fn nan() -> Mono {
        Mono::constant(f64::NAN)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(o.e.iter()) {
            *x += y;
        }
        Mono { c: self.c * o.c, e }
    }

    pub fn scale(&self, k: f64) -> Mono {
        Mono { c: self.c * k, e: self.e }
    }

    pub fn recip(&self) -> Mono {
        Mono { c: 1.0 / self.c, e: self.e.map(|x| -x) }
    }

    pub fn powf(&self, a: f64) -> Mono {
        if a == 0.0 {
            return Mono::constant(1.0);
        }
        if self.c < 0.0 {
            return Mono::nan();
        }
        Mono { c: self.c.powf(a), e: self.e.map(|x| x * a) }
    }
}

/// A point of the chain, with the offset from a finite anchor when the tail
/// approaches one.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    /// `ln y_j`, possibly `+inf`.
    ln_y: [f64; SLOTS],
    /// `y_j` as a float where representable.
    y: [f64; SLOTS],
    symbolic: [bool; SLOTS],
    r: Mono,
    near: Option<(f64, Mono)>,
}

impl Frame {
    /// The point whose chain member `y_{level+1}` equals `z`.
    pub fn new(level: usize, z: f64, tail: TailEnd) -> Frame {
        assert!(level + 1 < SLOTS);
        let mut y = [f64::NAN; SLOTS];
        y[level + 1] = z;
        for j in (0..=level).rev() {
            y[j] = y[j + 1].exp();
        }
        for j in level + 2..SLOTS {
            y[j] = y[j - 1].ln();
        }
        let mut ln_y = [f64::NAN; SLOTS];
        let mut symbolic = [false; SLOTS];
        for j in 0..SLOTS {
            ln_y[j] = if j + 1 < SLOTS { y[j + 1] } else { y[j].ln() };
            symbolic[j] = j <= level && ln_y[j] > SYMBOLIC_LOG;
        }
        let mut frame = Frame { ln_y, y, symbolic, r: Mono::constant(f64::NAN), near: None };
        let y0 = frame.slot(0);
        match tail {
            TailEnd::Infinity => frame.r = y0,
            TailEnd::Above(c) => {
                let d = y0.recip();
                frame.r = frame.add(&Mono::constant(c), &d);
                frame.near = Some((c, d));
            }
            TailEnd::Below(c) => {
                let d = y0.recip().scale(-1.0);
                frame.r = frame.add(&Mono::constant(c), &d);
                frame.near = Some((c, d));
            }
        }
        frame
    }

    /// The point `r = r0 · y_0` of an `Infinity` frame.
    pub fn with_radius_scale(mut self, r0: f64) -> Frame {
        self.r = self.r.scale(r0);
        self
    }

    /// The chain member `y_j`.
    pub fn slot(&self, j: usize) -> Mono {
        if j < SLOTS && self.symbolic[j] {
            let mut e = [0.0; SLOTS];
            e[j] = 1.0;
            Mono { c: 1.0, e }
        } else if j < SLOTS {
            Mono::constant(self.y[j])
        } else {
            Mono::constant(f64::NAN)
        }
    }

    pub fn r(&self) -> &Mono {
        &self.r
    }

    /// `ln Π y_j^{e_j}`, with an infinite leading term deciding the result.
    fn log_magnitude(&self, e: &[f64; SLOTS]) -> f64 {
        let mut s = 0.0;
        for j in 0..SLOTS {
            if e[j] == 0.0 {
                continue;
            }
            let l = self.ln_y[j];
            if l.is_infinite() {
                return if e[j] > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
            }
            s += e[j] * l;
        }
        s
    }

    fn ratio(&self, num: &Mono, den: &Mono) -> f64 {
        let c = num.c / den.c;
        if c == 0.0 || c.is_nan() {
            return c;
        }
        let mut e = num.e;
        for (x, y) in e.iter_mut().zip(den.e.iter()) {
            *x -= y;
        }
        c * self.log_magnitude(&e).exp()
    }

    pub fn to_f64(&self, m: &Mono) -> f64 {
        if m.c == 0.0 || m.c.is_nan() {
            return m.c;
        }
        m.c * self.log_magnitude(&m.e).exp()
    }

    pub fn add(&self, a: &Mono, b: &Mono) -> Mono {
        if a.c.is_nan() || b.c.is_nan() {
            return Mono::nan();
        }
        if b.c == 0.0 {
            return *a;
        }
        if a.c == 0.0 {
            return *b;
        }
        let q = self.ratio(b, a);
        if q.abs() <= 1.0 {
            Mono { c: a.c * (1.0 + q), e: a.e }
        } else {
            Mono { c: b.c * (1.0 + 1.0 / q), e: b.e }
        }
    }

    pub fn ln(&self, m: &Mono) -> Mono {
        if !(m.c > 0.0) {
            return Mono::nan();
        }
        let mut acc = Mono::constant(0.0);
        for j in 0..SLOTS {
            if m.e[j] != 0.0 {
                acc = self.add(&acc, &self.slot(j + 1).scale(m.e[j]));
            }
        }
        self.add(&acc, &Mono::constant(m.c.ln()))
    }

    pub fn eval(&self, e: &Expr) -> Mono {
        match e {
            Expr::Pow { a } => self.r.powf(*a),
            Expr::Log { r0 } => match &self.near {
                Some((c, d)) if c == r0 => {
                    let x = d.scale(1.0 / c);
                    let xv = self.to_f64(&x);
                    if xv == 0.0 {
                        x
                    } else if xv.abs() < 0.5 {
                        x.scale(xv.ln_1p() / xv)
                    } else {
                        self.ln(&self.r.scale(1.0 / r0))
                    }
                }
                _ => self.ln(&self.r.scale(1.0 / r0)),
            },
            Expr::ShiftPow { r0, a } => match &self.near {
                Some((c, d)) if c == r0 => d.powf(*a),
                _ => self.add(&self.r, &Mono::constant(-r0)).powf(*a),
            },
            Expr::XLog { i, arg } => {
                let mut t = self.eval(arg);
                for _ in 0..*i {
                    let one_minus_log = self.add(&Mono::constant(1.0), &self.ln(&t).scale(-1.0));
                    t = one_minus_log.recip();
                }
                t
            }
            Expr::Sum { terms } => terms
                .iter()
                .fold(Mono::constant(0.0), |acc, t| self.add(&acc, &self.eval(t))),
            Expr::Prod { factors } => {
                factors.iter().fold(Mono::constant(1.0), |acc, f| acc.mul(&self.eval(f)))
            }
            Expr::Scale { c, arg } => {
                if *c == 0.0 {
                    Mono::constant(0.0)
                } else {
                    self.eval(arg).scale(*c)
                }
            }
            Expr::RPow { a, arg } => self.eval(arg).powf(*a),
        }
    }
}
