//! Optimal Hardy-weights for radial p-Laplacian problems, tail-integral verdicts
//! and discrete best constants.

pub mod fields;
pub mod quad;
pub mod construct;
pub mod rayleigh;
pub mod report;
pub mod decay;
