use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, SymmetricEigen};

use super::kinematics::{jacobian_from_poses, ChainPoses};
use super::{Link, RobotModel};
use crate::connection::Frame;
use crate::error::{Error, Result};
use crate::se3::{adjoint, skew};

/// Smallest eigenvalue accepted for a mass matrix (kg·m²).
pub const MIN_MASS_EIGENVALUE: f64 = 1e-9;

/// 6x6 spatial inertia of a link about its joint-frame origin (linear-first).
pub fn link_spatial_inertia(link: &Link) -> Matrix6<f64> {
    let m = link.mass;
    let c = skew(&link.com);
    let mut out = Matrix6::zeros();
    out.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(Matrix3::identity() * m));
    out.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-c * m));
    out.fixed_view_mut::<3, 3>(3, 0).copy_from(&(c * m));
    out.fixed_view_mut::<3, 3>(3, 3)
        .copy_from(&(link.inertia - c * c * m));
    out
}

/// Composite-rigid-body mass matrix from precomputed poses.
pub(crate) fn mass_matrix_from_poses(model: &RobotModel, poses: &ChainPoses) -> DMatrix<f64> {
    let n = model.dof();
    let js = jacobian_from_poses(model, poses, Frame::Inertial);
    // Link inertias in world spatial coordinates: Ad⁻ᵀ I Ad⁻¹.
    let world: Vec<Matrix6<f64>> = model
        .links
        .iter()
        .zip(&poses.links)
        .map(|(link, pose)| {
            let ad_inv = adjoint(&pose.inverse());
            ad_inv.transpose() * link_spatial_inertia(link) * ad_inv
        })
        .collect();

    let mut m = DMatrix::zeros(n, n);
    let mut composite = Matrix6::zeros();
    for i in (0..n).rev() {
        composite += world[i];
        let f = composite * js.column(i);
        for j in 0..=i {
            let v = js.column(j).dot(&f);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Joint-space inertia matrix `M(q)`.
pub fn mass_matrix(model: &RobotModel, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    let poses = super::link_poses(model, q)?;
    let m = mass_matrix_from_poses(model, &poses);
    check_positive_definite(&m)?;
    Ok(m)
}

pub(crate) fn check_positive_definite(m: &DMatrix<f64>) -> Result<()> {
    let min = SymmetricEigen::new(m.clone()).eigenvalues.min();
    if min < MIN_MASS_EIGENVALUE || !min.is_finite() {
        return Err(Error::NonPositiveDefinite(format!(
            "smallest mass-matrix eigenvalue {min:e}"
        )));
    }
    Ok(())
}
