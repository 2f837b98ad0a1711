//! The kinematic (left-invariant) connection on SE(3) and the
//! wrench-dependent correction matrix `Γ^k_{ij} F_k`.
//!
//! The body-frame table is hard-coded. Other frames are derived from it:
//!
//! * [`Frame::Inertial`] swaps the lower indices (right-invariant connection),
//!   matching Jacobians whose columns are spatial twists.
//! * [`Frame::Hybrid`] keeps only the rotational symbols, index-swapped. The
//!   linear rows of a hybrid Jacobian are plain derivatives of the end-effector
//!   position in R³, which carries no connection.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::{check_index, Wrench};

/// Coordinate frame of Jacobians, wrenches and connection tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// End-effector body frame (left-invariant).
    Body,
    /// Fixed inertial frame, spatial twists (right-invariant).
    Inertial,
    /// EE-origin linear velocity and angular velocity, both in inertial axes.
    Hybrid,
}

impl Frame {
    pub const ALL: [Frame; 3] = [Frame::Body, Frame::Inertial, Frame::Hybrid];

    pub fn name(&self) -> &'static str {
        match self {
            Frame::Body => "body",
            Frame::Inertial => "inertial",
            Frame::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "body" => Ok(Frame::Body),
            "inertial" | "spatial" => Ok(Frame::Inertial),
            "hybrid" => Ok(Frame::Hybrid),
            other => Err(Error::Config(format!("unknown frame `{other}`"))),
        }
    }
}

/// Nonzero body-frame Christoffel symbols `Γ^m_{ij}` as `(m, i, j, value)`.
pub const BODY_NONZERO: [(usize, usize, usize, f64); 12] = [
    // translational
    (3, 2, 4, 1.0),
    (1, 3, 5, 1.0),
    (2, 1, 6, 1.0),
    (2, 3, 4, -1.0),
    (3, 1, 5, -1.0),
    (1, 2, 6, -1.0),
    // rotational
    (4, 6, 5, 0.5),
    (4, 5, 6, -0.5),
    (5, 4, 6, 0.5),
    (5, 6, 4, -0.5),
    (6, 5, 4, 0.5),
    (6, 4, 5, -0.5),
];

/// Dense Christoffel table for one frame, stored 0-based as `[m][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChristoffelTable {
    frame: Frame,
    table: [[[f64; 6]; 6]; 6],
}

impl ChristoffelTable {
    pub fn new(frame: Frame) -> Self {
        let mut table = [[[0.0; 6]; 6]; 6];
        for &(m, i, j, v) in BODY_NONZERO.iter() {
            let (m, i, j) = (m - 1, i - 1, j - 1);
            match frame {
                Frame::Body => table[m][i][j] = v,
                Frame::Inertial => table[m][j][i] = v,
                Frame::Hybrid => {
                    if m >= 3 {
                        table[m][j][i] = v;
                    }
                }
            }
        }
        Self { frame, table }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// `Γ^m_{ij}` with 1-based indices.
    pub fn get(&self, m: usize, i: usize, j: usize) -> Result<f64> {
        check_index(m)?;
        check_index(i)?;
        check_index(j)?;
        Ok(self.table[m - 1][i - 1][j - 1])
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        (0..216).filter_map(move |n| {
            let (m, i, j) = (n / 36, (n / 6) % 6, n % 6);
            let v = self.table[m][i][j];
            (v != 0.0).then_some((m + 1, i + 1, j + 1, v))
        })
    }

    /// Contraction `Σ_k Γ^k_{ij} F_k`.
    pub fn contract(&self, wrench: &Wrench) -> Matrix6<f64> {
        let mut out = Matrix6::zeros();
        for (k, slab) in self.table.iter().enumerate() {
            let fk = wrench.0[k];
            if fk == 0.0 {
                continue;
            }
            for i in 0..6 {
                for j in 0..6 {
                    if slab[i][j] != 0.0 {
                        out[(i, j)] += slab[i][j] * fk;
                    }
                }
            }
        }
        out
    }
}

/// `Γ^m_{ij}` in the given frame (1-based indices).
pub fn christoffel(frame: Frame, m: usize, i: usize, j: usize) -> Result<f64> {
    check_index(m)?;
    check_index(i)?;
    check_index(j)?;
    let lookup = |i: usize, j: usize| {
        BODY_NONZERO
            .iter()
            .find(|&&(mm, ii, jj, _)| (mm, ii, jj) == (m, i, j))
            .map_or(0.0, |e| e.3)
    };
    Ok(match frame {
        Frame::Body => lookup(i, j),
        Frame::Inertial => lookup(j, i),
        Frame::Hybrid if m >= 4 => lookup(j, i),
        Frame::Hybrid => 0.0,
    })
}

/// The correction term `Γ^k_{ij} F_k` as a 6x6 matrix tagged with its frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionMatrix {
    pub matrix: Matrix6<f64>,
    pub frame: Frame,
}

pub fn correction_matrix(frame: Frame, wrench: &Wrench) -> CorrectionMatrix {
    CorrectionMatrix {
        matrix: ChristoffelTable::new(frame).contract(wrench),
        frame,
    }
}
