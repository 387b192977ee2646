//! Radial profiles, domains and operator descriptors.

pub mod domain;
pub mod expr;
pub mod parse;
pub mod profile;

pub use domain::{sphere_area, DomainSpec, ProblemSpec, TailEnd};
pub use expr::{Expr, Point};
pub use parse::parse_expr;
pub use profile::RadialProfile;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("r = {r} outside the validity interval ({r_min}, {r_max})")]
    Domain { r: f64, r_min: f64, r_max: f64 },
    #[error("unsupported or malformed expression: {0}")]
    UnsupportedForm(String),
    #[error("invalid validity interval ({r_min}, {r_max})")]
    InvalidInterval { r_min: f64, r_max: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("parse error: {0}")]
    Parse(String),
}
