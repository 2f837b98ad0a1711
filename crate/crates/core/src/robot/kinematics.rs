use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, Matrix6xX};

use super::RobotModel;
use crate::connection::Frame;
use crate::error::Result;
use crate::se3::{adjoint, bracket, skew, Transform, Twist, Wrench};

/// World poses of every link frame and of the end effector.
#[derive(Clone, Debug)]
pub struct ChainPoses {
    pub links: Vec<Transform>,
    pub end_effector: Transform,
}

pub fn link_poses(model: &RobotModel, q: &DVector<f64>) -> Result<ChainPoses> {
    model.check_dim(q.len())?;
    let mut links = Vec::with_capacity(model.dof());
    let mut t = Transform::identity();
    for (joint, &qi) in model.joints.iter().zip(q.iter()) {
        t = t * joint.home * joint.motion(qi);
        links.push(t);
    }
    let end_effector = t * model.end_effector;
    Ok(ChainPoses {
        links,
        end_effector,
    })
}

pub fn forward_kinematics(model: &RobotModel, q: &DVector<f64>) -> Result<Transform> {
    Ok(link_poses(model, q)?.end_effector)
}

fn rotation_block(r: &Matrix3<f64>) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    m
}

fn column(j: &Matrix6xX<f64>, i: usize) -> Twist {
    Twist(j.column(i).into_owned())
}

fn body_jacobian(model: &RobotModel, poses: &ChainPoses) -> Matrix6xX<f64> {
    let ee_inv = poses.end_effector.inverse();
    let mut j = Matrix6xX::zeros(model.dof());
    for (i, (joint, link)) in model.joints.iter().zip(&poses.links).enumerate() {
        let col = adjoint(&(ee_inv * *link)) * joint.axis.0;
        j.set_column(i, &col);
    }
    j
}

fn spatial_jacobian(model: &RobotModel, poses: &ChainPoses) -> Matrix6xX<f64> {
    let mut j = Matrix6xX::zeros(model.dof());
    for (i, (joint, link)) in model.joints.iter().zip(&poses.links).enumerate() {
        j.set_column(i, &(adjoint(link) * joint.axis.0));
    }
    j
}

pub(crate) fn jacobian_from_poses(
    model: &RobotModel,
    poses: &ChainPoses,
    frame: Frame,
) -> Matrix6xX<f64> {
    match frame {
        Frame::Body => body_jacobian(model, poses),
        Frame::Inertial => spatial_jacobian(model, poses),
        Frame::Hybrid => rotation_block(&poses.end_effector.rotation) * body_jacobian(model, poses),
    }
}

/// Geometric Jacobian (6 x n) in the requested frame.
///
/// * `Body`: end-effector twist in the end-effector frame.
/// * `Inertial`: spatial twist (`Ṫ T⁻¹`).
/// * `Hybrid`: velocity of the end-effector origin and angular velocity,
///   both in inertial axes.
pub fn jacobian(model: &RobotModel, q: &DVector<f64>, frame: Frame) -> Result<Matrix6xX<f64>> {
    let poses = link_poses(model, q)?;
    Ok(jacobian_from_poses(model, &poses, frame))
}

/// `∂J[k][β]/∂q_α` for all `α`, stored as one 6 x n slice per `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianDerivative {
    pub frame: Frame,
    slices: Vec<Matrix6xX<f64>>,
}

impl JacobianDerivative {
    pub fn dof(&self) -> usize {
        self.slices.len()
    }

    /// `∂J/∂q_α` (0-based `alpha`).
    pub fn slice(&self, alpha: usize) -> &Matrix6xX<f64> {
        &self.slices[alpha]
    }

    /// `D[α][k][β] = ∂(Jᵀ)_{βk}/∂q_α`, 0-based.
    pub fn get(&self, alpha: usize, k: usize, beta: usize) -> f64 {
        self.slices[alpha][(k, beta)]
    }

    /// Kinematic stiffness `Σₖ ∂J[k][β]/∂q_α F_k`, laid out with the torque
    /// index `β` on rows and the displacement index `α` on columns.
    pub fn contract(&self, wrench: &Wrench) -> DMatrix<f64> {
        let n = self.dof();
        let mut out = DMatrix::zeros(n, n);
        for (alpha, d) in self.slices.iter().enumerate() {
            out.set_column(alpha, &(d.transpose() * wrench.0));
        }
        out
    }
}

pub(crate) fn derivative_from_poses(
    model: &RobotModel,
    poses: &ChainPoses,
    frame: Frame,
) -> JacobianDerivative {
    let n = model.dof();
    let mut slices = vec![Matrix6xX::zeros(n); n];
    match frame {
        Frame::Body => {
            let jb = body_jacobian(model, poses);
            // Column r depends only on distal joints: ∂J_r/∂q_c = [J_r, J_c], c > r.
            for (c, slice) in slices.iter_mut().enumerate() {
                let jc = column(&jb, c);
                for r in 0..c {
                    slice.set_column(r, &bracket(&column(&jb, r), &jc).0);
                }
            }
        }
        Frame::Inertial => {
            let js = spatial_jacobian(model, poses);
            // Column r depends only on proximal joints: ∂J_r/∂q_c = [J_c, J_r], c < r.
            for (c, slice) in slices.iter_mut().enumerate() {
                let jc = column(&js, c);
                for r in c + 1..n {
                    slice.set_column(r, &bracket(&jc, &column(&js, r)).0);
                }
            }
        }
        Frame::Hybrid => {
            // J_h = diag(R, R)·J_b with ∂R/∂q_c = R·ω̂_c (ω_c body angular part).
            let jb = body_jacobian(model, poses);
            let r = poses.end_effector.rotation;
            let rot = rotation_block(&r);
            for (c, slice) in slices.iter_mut().enumerate() {
                let jc = column(&jb, c);
                let d_rot = rotation_block(&(r * skew(&jc.angular())));
                let mut d_body = Matrix6xX::zeros(n);
                for row in 0..c {
                    d_body.set_column(row, &bracket(&column(&jb, row), &jc).0);
                }
                *slice = d_rot * &jb + rot * d_body;
            }
        }
    }
    JacobianDerivative { frame, slices }
}

/// Analytic derivative of the Jacobian with respect to every joint.
pub fn jacobian_transpose_derivative(
    model: &RobotModel,
    q: &DVector<f64>,
    frame: Frame,
) -> Result<JacobianDerivative> {
    let poses = link_poses(model, q)?;
    Ok(derivative_from_poses(model, &poses, frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::load_model;
    use crate::se3::exp_twist;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix4, Vector3};
    use std::f64::consts::FRAC_PI_2;

    pub(crate) fn one_joint() -> RobotModel {
        load_model(
            r#"{"name": "one",
            "joints": [{"axis": [0,0,0,0,0,1], "kind": "revolute",
                "home": {"rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [0,0,0]}}],
            "links": [{"mass": 2.0, "com": [1,0,0], "inertia": [0,0,0, 0,0,0, 0,0,0]}],
            "end_effector": {"rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [1,0,0]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn single_joint_fk_and_jacobian() {
        let m = one_joint();
        let t = forward_kinematics(&m, &DVector::from_element(1, FRAC_PI_2)).unwrap();
        assert_relative_eq!(t.translation, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
        let j = jacobian(&m, &DVector::zeros(1), Frame::Hybrid).unwrap();
        assert_eq!(
            j.column(0).into_owned(),
            nalgebra::Vector6::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        );
        assert!(forward_kinematics(&m, &DVector::zeros(2)).is_err());
    }

    #[test]
    fn anthro_home_pose_is_upright() {
        let m = RobotModel::anthro3r();
        let t = forward_kinematics(&m, &DVector::zeros(3)).unwrap();
        assert_eq!(t.rotation, Matrix3::identity());
        assert_eq!(t.translation.x, 0.0);
        assert_eq!(t.translation.y, 0.0);
        assert!(t.translation.z > 0.5);
    }

    #[test]
    fn iiwa_fk_matches_matrix_chain() {
        let m = RobotModel::iiwa7();
        let q = DVector::from_vec(vec![0.3, -0.7, 1.1, 0.4, -1.9, 0.8, 2.2]);
        // Independent chain of homogeneous matrices, Rodrigues via nalgebra.
        let mut h = Matrix4::identity();
        for (joint, &qi) in m.joints.iter().zip(q.iter()) {
            let rot = nalgebra::Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(joint.axis.angular()),
                qi,
            );
            let mut e = Matrix4::identity();
            e.fixed_view_mut::<3, 3>(0, 0).copy_from(rot.matrix());
            h = h * joint.home.to_homogeneous() * e;
        }
        h *= m.end_effector.to_homogeneous();
        let t = forward_kinematics(&m, &q).unwrap();
        assert!((t.to_homogeneous() - h).amax() <= 1e-12);
    }

    #[test]
    fn iiwa_zero_pose_reach() {
        let m = RobotModel::iiwa7();
        let t = forward_kinematics(&m, &DVector::zeros(7)).unwrap();
        // 0.34 + 0.40 + 0.40 + 0.126 stacked along z.
        assert_relative_eq!(
            t.translation,
            Vector3::new(0.0, 0.0, 1.266),
            epsilon = 1e-12
        );
    }

    #[test]
    fn prismatic_joint_jacobian() {
        let m = load_model(
            r#"{"name": "slider",
            "joints": [{"axis": [1,0,0,0,0,0], "kind": "prismatic",
                "home": {"rotation": [0,-1,0, 1,0,0, 0,0,1], "translation": [0,0,1]}}],
            "links": [{"mass": 1.0, "com": [0,0,0], "inertia": [0,0,0, 0,0,0, 0,0,0]}],
            "end_effector": {"rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [0,0,0]}}"#,
        )
        .unwrap();
        let q = DVector::from_element(1, 0.25);
        let t = forward_kinematics(&m, &q).unwrap();
        assert_relative_eq!(t.translation, Vector3::new(0.0, 0.25, 1.0), epsilon = 1e-15);
        let j = jacobian(&m, &q, Frame::Hybrid).unwrap();
        assert_relative_eq!(
            j.column(0).into_owned(),
            nalgebra::Vector6::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0),
            epsilon = 1e-15
        );
        let d = jacobian_transpose_derivative(&m, &q, Frame::Body).unwrap();
        assert_eq!(d.slice(0).amax(), 0.0);
    }

    #[test]
    fn exp_of_joint_matches_motion() {
        let m = RobotModel::iiwa7();
        for j in &m.joints {
            assert_eq!(j.motion(0.4), exp_twist(&j.axis, 0.4).unwrap());
        }
    }
}
