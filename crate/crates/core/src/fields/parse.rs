//! Text syntax for profiles: `r`, numbers, `+ - * / ^`, parentheses,
//! `log(r/c)`, `sqrt(..)` and `X_i(..)`.

use super::expr::{prod, rpow, scale, sum, Expr};
use super::FieldError;

pub fn parse_expr(src: &str) -> Result<Expr, FieldError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, FieldError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| FieldError::Parse(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(FieldError::Parse(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> FieldError {
        FieldError::Parse(format!("{msg} at token {}", self.pos))
    }

    fn peek_op(&self, c: char) -> bool {
        self.tokens.get(self.pos) == Some(&Tok::Op(c))
    }

    fn expect(&mut self, c: char) -> Result<(), FieldError> {
        if self.peek_op(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, FieldError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.peek_op('+') {
                self.pos += 1;
                terms.push(self.term()?);
            } else if self.peek_op('-') {
                self.pos += 1;
                terms.push(scale(-1.0, self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, FieldError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.peek_op('*') {
                self.pos += 1;
                factors.push(self.unary()?);
            } else if self.peek_op('/') {
                self.pos += 1;
                let d = self.unary()?;
                factors.push(rpow(-1.0, d));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { prod(factors) })
    }

    fn unary(&mut self) -> Result<Expr, FieldError> {
        if self.peek_op('-') {
            self.pos += 1;
            return Ok(scale(-1.0, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, FieldError> {
        let base = self.atom()?;
        if !self.peek_op('^') {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.unary()?;
        let a = exponent.as_const().ok_or_else(|| self.error("exponent must be constant"))?;
        Ok(match shift_of(&base) {
            Some(r0) if r0 != 0.0 => Expr::shift_pow(r0, a),
            _ => rpow(a, base),
        })
    }

    fn call_arg(&mut self) -> Result<Expr, FieldError> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, FieldError> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| self.error("unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::constant(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "r" | "d" => Ok(Expr::pow(1.0)),
                "log" | "ln" => {
                    let arg = self.call_arg()?;
                    log_of(&arg).ok_or_else(|| self.error("log argument must be r/c"))
                }
                "sqrt" => Ok(rpow(0.5, self.call_arg()?)),
                _ => {
                    if let Some(idx) = name.strip_prefix("X_") {
                        let i: u32 = idx.parse().map_err(|_| self.error("bad X_ index"))?;
                        Ok(Expr::xlog(i, self.call_arg()?))
                    } else {
                        Err(self.error(&format!("unknown identifier '{name}'")))
                    }
                }
            },
            Tok::Op(c) => Err(self.error(&format!("unexpected '{c}'"))),
        }
    }
}

/// `r0` if `e` is `r - r0`.
fn shift_of(e: &Expr) -> Option<f64> {
    match e {
        Expr::Sum { terms } if terms.len() == 2 => match (&terms[0], terms[1].as_const()) {
            (Expr::Pow { a }, Some(c)) if *a == 1.0 => Some(-c),
            _ => None,
        },
        _ => None,
    }
}

fn log_of(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Pow { a } if *a == 1.0 => Some(Expr::log(1.0)),
        Expr::Scale { c, arg } if *c > 0.0 => match **arg {
            Expr::Pow { a } if a == 1.0 => Some(Expr::log(1.0 / c)),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalogue_shapes() {
        assert_eq!(parse_expr("log(r/1)").unwrap(), Expr::log(1.0));
        assert_eq!(parse_expr("log(r/2)").unwrap(), Expr::log(2.0));
        assert_eq!(parse_expr("(r-1)^-2").unwrap(), Expr::shift_pow(1.0, -2.0));
        assert_eq!(parse_expr("r^-2").unwrap(), Expr::pow(-2.0));
        let e = parse_expr("0.25*((r-1)^-2 - r^-2)").unwrap();
        assert!((e.eval(2.0) - 0.25 * (1.0 - 0.25)).abs() < 1e-15);
        let x = parse_expr("X_1(1/(2*r))").unwrap();
        assert!((x.eval(5.0) - 1.0 / (1.0 - (0.1f64).ln())).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_expr("r^").is_err());
        assert!(parse_expr("log(r+1)").is_err());
        assert!(parse_expr("r^r").is_err());
        assert!(parse_expr("foo(r)").is_err());
        assert!(parse_expr("(r").is_err());
    }
}
