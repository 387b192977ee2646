use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use super::expr::{Expr, Point};
use super::FieldError;

/// A closed-form radial function with its symbolic derivative and an explicit
/// validity interval `(r_min, r_max)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    form: Expr,
    derivative: Expr,
    r_min: f64,
    r_max: f64,
}

impl RadialProfile {
    pub fn new(form: Expr, r_min: f64, r_max: f64) -> Result<Self, FieldError> {
        if !form.is_well_formed() {
            return Err(FieldError::UnsupportedForm(form.to_string()));
        }
        if r_min.is_nan() || r_max.is_nan() || r_min < 0.0 || r_min >= r_max {
            return Err(FieldError::InvalidInterval { r_min, r_max });
        }
        let derivative = form.derivative();
        Ok(RadialProfile { form, derivative, r_min, r_max })
    }

    /// Profile valid on `(r_min, ∞)`.
    pub fn on(form: Expr, r_min: f64) -> Result<Self, FieldError> {
        Self::new(form, r_min, f64::INFINITY)
    }

    pub fn form(&self) -> &Expr {
        &self.form
    }

    pub fn derivative_form(&self) -> &Expr {
        &self.derivative
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.r_min && r < self.r_max
    }

    /// Checked evaluation.
    pub fn eval(&self, r: f64) -> Result<f64, FieldError> {
        if !self.contains(r) {
            return Err(FieldError::Domain { r, r_min: self.r_min, r_max: self.r_max });
        }
        Ok(self.form.eval(r))
    }

    /// Unchecked evaluation; callers keep `r` inside the validity interval.
    pub fn value(&self, r: f64) -> f64 {
        self.form.eval(r)
    }

    pub fn value_at(&self, x: &Point) -> f64 {
        self.form.eval_at(x)
    }

    pub fn slope(&self, r: f64) -> f64 {
        self.derivative.eval(r)
    }

    pub fn slope_at(&self, x: &Point) -> f64 {
        self.derivative.eval_at(x)
    }

    pub fn derivative(&self) -> RadialProfile {
        RadialProfile {
            derivative: self.derivative.derivative(),
            form: self.derivative.clone(),
            r_min: self.r_min,
            r_max: self.r_max,
        }
    }

    /// Same form on a narrower interval.
    pub fn restrict(&self, r_min: f64, r_max: f64) -> Result<Self, FieldError> {
        Self::new(self.form.clone(), r_min.max(self.r_min), r_max.min(self.r_max))
    }

    pub fn map(&self, f: impl FnOnce(Expr) -> Expr) -> Result<Self, FieldError> {
        Self::new(f(self.form.clone()), self.r_min, self.r_max)
    }

    /// `r0` of the `(r - r0)^a` factor (`a < 0`) or `log(r/r0)` factor sitting on
    /// the inner boundary, if any.
    pub fn inner_singularity(&self) -> Option<f64> {
        let mut anchors = Vec::new();
        self.form.anchors(&mut anchors);
        anchors.into_iter().find(|&a| a == self.r_min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profiles always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, FieldError> {
        serde_json::from_str(s).map_err(|e| FieldError::Parse(e.to_string()))
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

#[derive(Serialize, Deserialize)]
struct Descriptor {
    form: Expr,
    r_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_max: Option<f64>,
}

impl Serialize for RadialProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Descriptor {
            form: self.form.clone(),
            r_min: self.r_min,
            r_max: self.r_max.is_finite().then_some(self.r_max),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let desc = Descriptor::deserialize(d)?;
        RadialProfile::new(desc.form, desc.r_min, desc.r_max.unwrap_or(f64::INFINITY))
            .map_err(serde::de::Error::custom)
    }
}
