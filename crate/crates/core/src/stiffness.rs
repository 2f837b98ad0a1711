//! Task-space and joint-space stiffness with kinematic-connection corrections.
//!
//! The joint stiffness is assembled as
//!
//! ```text
//! 𝒦 = ∂Jᵀ/∂q·F + Jᵀ·(K + Γ(F))·J
//! ```
//!
//! where `∂Jᵀ/∂q·F` is the kinematic stiffness, `K` the designed task-space
//! Hessian and `Γ(F)` the connection correction for the frame of `J`. Without
//! the correction term the result is the conventional (generally asymmetric)
//! joint stiffness.

use nalgebra::{DMatrix, DVector, Matrix6, Matrix6xX};

use crate::connection::{correction_matrix, Frame};
use crate::error::{Error, Result};
use crate::robot::{
    jacobian_transpose_derivative, link_poses, ChainPoses, JacobianDerivative, RobotModel,
};
use crate::se3::Wrench;

/// Relative symmetry tolerance for a task Hessian.
pub const HESSIAN_SYMMETRY_TOL: f64 = 1e-9;
/// Relative bound on the antisymmetric part of a corrected joint stiffness.
pub const JOINT_SYMMETRY_TOL: f64 = 1e-9;
/// Floor used when normalizing the asymmetry ratio.
pub const RATIO_EPSILON: f64 = 1e-12;

/// Designed task-space spring: the Hessian `∂²U/∂ξ∂ξ` of a potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskStiffness {
    pub hessian: Matrix6<f64>,
    pub frame: Frame,
}

impl TaskStiffness {
    pub fn new(hessian: Matrix6<f64>, frame: Frame) -> Result<Self> {
        let scale = hessian.norm();
        let skew = (hessian - hessian.transpose()).norm();
        if skew > HESSIAN_SYMMETRY_TOL * scale {
            return Err(Error::Config(format!(
                "task Hessian is not symmetric (|K − Kᵀ| = {skew:e})"
            )));
        }
        Ok(Self { hessian, frame })
    }

    /// `diag(k_t·I₃, k_r·I₃)`.
    pub fn diagonal(translational: f64, rotational: f64, frame: Frame) -> Self {
        let d = nalgebra::Vector6::new(
            translational,
            translational,
            translational,
            rotational,
            rotational,
            rotational,
        );
        Self {
            hessian: Matrix6::from_diagonal(&d),
            frame,
        }
    }

    pub fn zero(frame: Frame) -> Self {
        Self {
            hessian: Matrix6::zeros(),
            frame,
        }
    }

    /// Six values give a diagonal Hessian, 36 values a full row-major one.
    pub fn from_values(values: &[f64], frame: Frame) -> Result<Self> {
        match values.len() {
            6 => Self::new(
                Matrix6::from_diagonal(&nalgebra::Vector6::from_column_slice(values)),
                frame,
            ),
            36 => Self::new(Matrix6::from_row_slice(values), frame),
            n => Err(Error::Config(format!(
                "hessian needs 6 or 36 numbers, got {n}"
            ))),
        }
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        let sym = (self.hessian + self.hessian.transpose()) * 0.5;
        let scale = sym.amax().max(1.0);
        nalgebra::SymmetricEigen::new(sym).eigenvalues.min() >= -1e-12 * scale
    }
}

/// Task-space stiffness `K_ij = ∂²U/∂ξⁱ∂ξʲ + Γ^m_{ij} F_m`.
pub fn task_stiffness_corrected(
    hessian: &TaskStiffness,
    wrench: &Wrench,
    frame: Frame,
) -> Result<Matrix6<f64>> {
    if hessian.frame != frame {
        return Err(Error::FrameMismatch {
            expected: frame,
            actual: hessian.frame,
        });
    }
    Ok(hessian.hessian + correction_matrix(frame, wrench).matrix)
}

/// Kinematic stiffness `∂Jᵀ/∂q·F`, torque index on rows.
pub fn kinematic_stiffness(
    model: &RobotModel,
    q: &DVector<f64>,
    wrench: &Wrench,
    frame: Frame,
) -> Result<DMatrix<f64>> {
    Ok(jacobian_transpose_derivative(model, q, frame)?.contract(wrench))
}

/// Joint-space stiffness with the provenance needed to interpret it.
#[derive(Clone, Debug, PartialEq)]
pub struct JointStiffness {
    pub matrix: DMatrix<f64>,
    pub with_correction: bool,
    pub frame: Frame,
    pub wrench: Wrench,
}

impl JointStiffness {
    pub fn report(&self) -> SymmetryReport {
        symmetry_report(&self.matrix).expect("joint stiffness is square")
    }

    /// Whether the antisymmetric part is negligible relative to the symmetric one.
    pub fn is_symmetric(&self) -> bool {
        let r = self.report();
        r.sigma_max_asym <= JOINT_SYMMETRY_TOL * r.sigma_max_sym.max(1.0)
    }
}

/// Matrix-form assembly shared by [`joint_stiffness`] and the simulator.
pub(crate) fn assemble(
    derivative: &JacobianDerivative,
    jac: &Matrix6xX<f64>,
    hessian: &Matrix6<f64>,
    wrench: &Wrench,
    frame: Frame,
    with_correction: bool,
) -> DMatrix<f64> {
    let mut task = *hessian;
    if with_correction {
        task += correction_matrix(frame, wrench).matrix;
    }
    derivative.contract(wrench) + jac.transpose() * task * jac
}

pub(crate) fn joint_stiffness_from_poses(
    model: &RobotModel,
    poses: &ChainPoses,
    hessian: &TaskStiffness,
    wrench: &Wrench,
    frame: Frame,
    with_correction: bool,
) -> Result<(DMatrix<f64>, Matrix6xX<f64>)> {
    if hessian.frame != frame {
        return Err(Error::FrameMismatch {
            expected: frame,
            actual: hessian.frame,
        });
    }
    let jac = crate::robot::jacobian_from_poses(model, poses, frame);
    let derivative = crate::robot::derivative_from_poses(model, poses, frame);
    let k = assemble(
        &derivative,
        &jac,
        &hessian.hessian,
        wrench,
        frame,
        with_correction,
    );
    Ok((k, jac))
}

/// Joint-space stiffness `𝒦 = ∂Jᵀ/∂q·F + Jᵀ(K [+ Γ(F)])J`.
///
/// `wrench` must be expressed in `frame`, the same frame as the Jacobian and
/// the Hessian. In the impedance-control setting it is the measured external
/// wrench.
pub fn joint_stiffness(
    model: &RobotModel,
    q: &DVector<f64>,
    hessian: &TaskStiffness,
    wrench: &Wrench,
    frame: Frame,
    with_correction: bool,
) -> Result<JointStiffness> {
    let poses = link_poses(model, q)?;
    let (matrix, _) =
        joint_stiffness_from_poses(model, &poses, hessian, wrench, frame, with_correction)?;
    Ok(JointStiffness {
        matrix,
        with_correction,
        frame,
        wrench: *wrench,
    })
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Splits `m` into `(½(M+Mᵀ), ½(M−Mᵀ))`.
pub fn symmetry_decompose(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_square(m)?;
    let t = m.transpose();
    Ok(((m + &t) * 0.5, (m - &t) * 0.5))
}

/// Largest singular values of the symmetric and antisymmetric parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    pub sigma_max_sym: f64,
    pub sigma_max_asym: f64,
    pub asym_ratio: f64,
}

pub fn sigma_max(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn symmetry_report(m: &DMatrix<f64>) -> Result<SymmetryReport> {
    let (sym, asym) = symmetry_decompose(m)?;
    let sigma_max_sym = sigma_max(&sym);
    let sigma_max_asym = sigma_max(&asym);
    Ok(SymmetryReport {
        sigma_max_sym,
        sigma_max_asym,
        asym_ratio: sigma_max_asym / sigma_max_sym.max(RATIO_EPSILON),
    })
}
