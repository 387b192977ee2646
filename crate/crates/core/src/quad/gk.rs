//! Globally adaptive 21-point Gauss–Kronrod quadrature.

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077841467564937,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// The integrand returned a non-finite value at `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonFinite {
    pub x: f64,
}

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rule<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment, NonFinite> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(NonFinite { x: center });
    }
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(NonFinite { x: x2 });
        }
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment { a, b, value, error })
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)` or `max_intervals` is reached.
///
/// The reported error is the sum of `|K21 - G10|` over the final partition,
/// which bounds the Kronrod error by a wide margin for smooth integrands.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate, NonFinite> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut segments = vec![rule(&mut f, a, b)?];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || segments.len() >= max_intervals {
            return Ok(Estimate { value, error, intervals: segments.len() });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            // interval exhausted at double precision
            segments.push(Segment { error: s.error, ..s });
            return Ok(Estimate {
                value: segments.iter().map(|s| s.value).sum(),
                error: segments.iter().map(|s| s.error).sum(),
                intervals: segments.len(),
            });
        }
        segments.push(rule(&mut f, s.a, mid)?);
        segments.push(rule(&mut f, mid, s.b)?);
    }
}
