//! Work-loop audit of linear stiffness fields.
//!
//! A stiffness `K` defines the force field `F(x) = K·x` about the spring
//! equilibrium `x₀ = 0`. The symmetric part of `K` is conservative and does no
//! net work around a closed path; the antisymmetric part does work
//! proportional to the enclosed area, so a non-symmetric spring can pump
//! energy into (or out of) a system indefinitely.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `|net_work|` at or below this value counts as passive (J).
pub const PASSIVE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEGMENTS: usize = 3600;
pub const DEFAULT_RADIUS: f64 = 1.0;

/// Closed polyline through displacement space.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopPath {
    waypoints: Vec<DVector<f64>>,
}

impl LoopPath {
    pub fn new(waypoints: Vec<DVector<f64>>) -> Result<Self> {
        if waypoints.len() < 4 {
            return Err(Error::OpenPath(format!(
                "need at least 4 waypoints, got {}",
                waypoints.len()
            )));
        }
        let dim = waypoints[0].len();
        if let Some(bad) = waypoints.iter().position(|w| w.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: waypoints[bad].len(),
            });
        }
        if waypoints.first() != waypoints.last() {
            return Err(Error::OpenPath("first and last waypoints differ".into()));
        }
        Ok(Self { waypoints })
    }

    /// Counterclockwise circle in the `(i, j)` coordinate plane (0-based,
    /// `i < j`), centered at the origin, with `segments` straight segments.
    pub fn circle(dim: usize, i: usize, j: usize, radius: f64, segments: usize) -> Result<Self> {
        if i >= j || j >= dim {
            return Err(Error::Config(format!(
                "circle plane ({i}, {j}) invalid for dimension {dim}"
            )));
        }
        let mut waypoints: Vec<DVector<f64>> = (0..segments)
            .map(|k| {
                let theta = TAU * k as f64 / segments as f64;
                let mut x = DVector::zeros(dim);
                x[i] = radius * theta.cos();
                x[j] = radius * theta.sin();
                x
            })
            .collect();
        if let Some(first) = waypoints.first().cloned() {
            waypoints.push(first);
        }
        Self::new(waypoints)
    }

    pub fn unit_circle(dim: usize, i: usize, j: usize) -> Result<Self> {
        Self::circle(dim, i, j, DEFAULT_RADIUS, DEFAULT_SEGMENTS)
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn waypoints(&self) -> &[DVector<f64>] {
        &self.waypoints
    }

    pub fn reversed(&self) -> Self {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Self { waypoints }
    }

    /// Coordinates that vary along the path, if there are exactly two.
    fn plane(&self) -> Option<(usize, usize)> {
        let first = &self.waypoints[0];
        let varying: Vec<usize> = (0..self.dim())
            .filter(|&c| self.waypoints.iter().any(|w| w[c] != first[c]))
            .collect();
        match varying.as_slice() {
            &[a, b] => Some((a, b)),
            _ => None,
        }
    }

    /// Signed (counterclockwise-positive) area in the `(i, j)` plane.
    fn signed_area(&self, i: usize, j: usize) -> f64 {
        0.5 * self
            .waypoints
            .windows(2)
            .map(|w| w[0][i] * w[1][j] - w[1][i] * w[0][j])
            .sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyAudit {
    /// Net work done by the field over one traversal (J).
    pub net_work: f64,
    /// `net_work` divided by the signed enclosed area, for planar loops.
    pub work_per_area: Option<f64>,
    pub passive: bool,
    /// Coordinate plane (0-based) of the loop that produced `net_work`.
    pub plane: Option<(usize, usize)>,
}

fn check_square(k: &DMatrix<f64>) -> Result<()> {
    if k.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: k.nrows(),
            cols: k.ncols(),
        })
    }
}

/// Trapezoidal line integral `∮⟨K·x, dx⟩` along `path`.
pub fn loop_work(k: &DMatrix<f64>, path: &LoopPath) -> Result<EnergyAudit> {
    check_square(k)?;
    if k.nrows() != path.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.nrows(),
            actual: path.dim(),
        });
    }
    let forces: Vec<DVector<f64>> = path.waypoints.iter().map(|x| k * x).collect();
    let net_work: f64 = path
        .waypoints
        .windows(2)
        .zip(forces.windows(2))
        .map(|(x, f)| 0.5 * (&f[0] + &f[1]).dot(&(&x[1] - &x[0])))
        .sum();
    let plane = path.plane();
    let work_per_area = plane.and_then(|(i, j)| {
        let area = path.signed_area(i, j);
        (area != 0.0).then(|| net_work / area)
    });
    Ok(EnergyAudit {
        net_work,
        work_per_area,
        passive: net_work.abs() <= PASSIVE_TOLERANCE,
        plane,
    })
}

/// Runs the default unit circle in every coordinate plane and reports the
/// loop with the largest absolute work (sign kept).
pub fn audit_stiffness(k: &DMatrix<f64>) -> Result<EnergyAudit> {
    check_square(k)?;
    let d = k.nrows();
    let mut worst = EnergyAudit {
        net_work: 0.0,
        work_per_area: None,
        passive: true,
        plane: None,
    };
    for i in 0..d {
        for j in i + 1..d {
            let audit = loop_work(k, &LoopPath::unit_circle(d, i, j)?)?;
            if worst.plane.is_none() || audit.net_work.abs() > worst.net_work.abs() {
                worst = audit;
            }
        }
    }
    Ok(worst)
}
