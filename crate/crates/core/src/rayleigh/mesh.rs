use serde::{Deserialize, Serialize};

use super::RayleighError;

/// How mesh nodes map to the physical variable `x` (a radius or a boundary
/// distance).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Coordinate {
    /// `x = t`.
    Radius,
    /// `x = r0 e^t`.
    LogRadius { r0: f64 },
    /// `x = δ = e^t`.
    LogDistance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grading {
    Uniform,
    /// Equal ratios `t_{k+1} / t_k`.
    Geometric,
}

/// Nodes `t_0 < … < t_n` with homogeneous Dirichlet conditions at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D {
    coordinate: Coordinate,
    grading: Grading,
    nodes: Vec<f64>,
}

/// Summary of a mesh for reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshDescriptor {
    pub coordinate: Coordinate,
    pub grading: Grading,
    pub t_start: f64,
    pub t_end: f64,
    pub elements: usize,
    /// Log-width `L` of the truncation.
    pub width: f64,
}

pub const MIN_ELEMENTS: usize = 8;

impl Mesh1D {
    pub fn new(coordinate: Coordinate, grading: Grading, nodes: Vec<f64>) -> Result<Self, RayleighError> {
        if nodes.len() < MIN_ELEMENTS + 1 {
            return Err(RayleighError::Mesh(format!("{} nodes, need at least {}", nodes.len(), MIN_ELEMENTS + 1)));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(RayleighError::Mesh("nodes must be finite and strictly increasing".into()));
        }
        match coordinate {
            Coordinate::Radius if nodes[0] < 0.0 => {
                return Err(RayleighError::Mesh("radii must be non-negative".into()));
            }
            Coordinate::LogRadius { r0 } if !(r0 > 0.0 && r0.is_finite()) => {
                return Err(RayleighError::Mesh(format!("scale r0 = {r0} must be positive")));
            }
            _ => {}
        }
        Ok(Mesh1D { coordinate, grading, nodes })
    }

    pub fn uniform(coordinate: Coordinate, t0: f64, t1: f64, n: usize) -> Result<Self, RayleighError> {
        if !(t0 < t1) {
            return Err(RayleighError::Mesh(format!("empty range ({t0}, {t1})")));
        }
        let nodes = (0..=n).map(|k| if k == n { t1 } else { t0 + (t1 - t0) * k as f64 / n as f64 }).collect();
        Self::new(coordinate, Grading::Uniform, nodes)
    }

    /// Nodes `t0 (t1/t0)^{k/n}`; needs `0 < t0 < t1`.
    pub fn geometric(coordinate: Coordinate, t0: f64, t1: f64, n: usize) -> Result<Self, RayleighError> {
        if !(t0 > 0.0 && t0 < t1) {
            return Err(RayleighError::Mesh(format!("geometric range ({t0}, {t1}) must be positive")));
        }
        let width = (t1 / t0).ln();
        let nodes = (0..=n)
            .map(|k| if k == n { t1 } else { t0 * (width * k as f64 / n as f64).exp() })
            .collect();
        Self::new(coordinate, Grading::Geometric, nodes)
    }

    /// `r = e^t` with `t = log r` geometric on `(1, e^width)`: the graded mesh for
    /// weights like `r^{-2} log^{-2} r`, uniform in `log log r`.
    pub fn leray(width: f64, n: usize) -> Result<Self, RayleighError> {
        Self::geometric(Coordinate::LogRadius { r0: 1.0 }, 1.0, width.exp(), n)
    }

    /// `r = r0 e^t` with `t` uniform on `(0, width)`.
    pub fn log_uniform(r0: f64, width: f64, n: usize) -> Result<Self, RayleighError> {
        Self::uniform(Coordinate::LogRadius { r0 }, 0.0, width, n)
    }

    /// `δ = e^t` with `t` uniform on `(log top - width, log top)`.
    pub fn strip(top: f64, width: f64, n: usize) -> Result<Self, RayleighError> {
        Self::uniform(Coordinate::LogDistance, top.ln() - width, top.ln(), n)
    }

    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> f64 {
        let (a, b) = (self.nodes[0], self.nodes[self.elements()]);
        match self.grading {
            Grading::Uniform => b - a,
            Grading::Geometric => (b / a).ln(),
        }
    }

    pub fn descriptor(&self) -> MeshDescriptor {
        MeshDescriptor {
            coordinate: self.coordinate,
            grading: self.grading,
            t_start: self.nodes[0],
            t_end: self.nodes[self.elements()],
            elements: self.elements(),
            width: self.width(),
        }
    }

    /// Physical coordinate of `t` (may overflow to infinity).
    pub fn physical(&self, t: f64) -> f64 {
        match self.coordinate {
            Coordinate::Radius => t,
            Coordinate::LogRadius { r0 } => r0 * t.exp(),
            Coordinate::LogDistance => t.exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(Mesh1D::uniform(Coordinate::Radius, 1.0, 3.0, 4).is_err());
        assert!(Mesh1D::uniform(Coordinate::Radius, 3.0, 1.0, 8).is_err());
        assert!(Mesh1D::geometric(Coordinate::Radius, 0.0, 1.0, 8).is_err());
        let m = Mesh1D::leray(40.0, 64).unwrap();
        assert!((m.width() - 40.0).abs() < 1e-12);
        let ratios: Vec<f64> = m.nodes().windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|q| (q - (40.0f64 / 64.0).exp()).abs() < 1e-9));
        let s = Mesh1D::strip(0.5, 20.0, 16).unwrap();
        assert!((s.physical(s.nodes()[16]) - 0.5).abs() < 1e-15);
    }
}
