mod common;

use geostiff::robot::{
    forward_kinematics, jacobian, jacobian_transpose_derivative, link_poses, mass_matrix,
    RobotModel,
};
use geostiff::se3::{adjoint, Transform};
use geostiff::Frame;
use nalgebra::{DVector, Matrix3, Matrix6, Vector3, Vector6};
use rand::Rng;

fn block_diag(r: &Matrix3<f64>) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    m
}

fn vee3(m: &Matrix3<f64>) -> Vector3<f64> {
    let a = (m - m.transpose()) * 0.5;
    Vector3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)])
}

/// Body twist of the pose path `q + s·qdot` at `s = 0`, by central differences.
fn fd_body_twist(t_minus: &Transform, t: &Transform, t_plus: &Transform, h: f64) -> Vector6<f64> {
    let rdot = (t_plus.rotation - t_minus.rotation) / (2.0 * h);
    let pdot = (t_plus.translation - t_minus.translation) / (2.0 * h);
    let rt = t.rotation.transpose();
    let mut out = Vector6::zeros();
    out.fixed_rows_mut::<3>(0).copy_from(&(rt * pdot));
    out.fixed_rows_mut::<3>(3).copy_from(&vee3(&(rt * rdot)));
    out
}

#[test]
fn frames_are_related_by_adjoints() {
    let mut rng = common::rng(11);
    for model in common::models() {
        for _ in 0..500 {
            let q = common::random_q(&model, &mut rng);
            let t = forward_kinematics(&model, &q).unwrap();
            let jb = jacobian(&model, &q, Frame::Body).unwrap();
            let jh = jacobian(&model, &q, Frame::Hybrid).unwrap();
            let js = jacobian(&model, &q, Frame::Inertial).unwrap();
            assert!((jh - block_diag(&t.rotation) * &jb).amax() <= 1e-12);
            assert!((js - adjoint(&t) * &jb).amax() <= 1e-12);
        }
    }
}

#[test]
fn jacobian_matches_pose_differences() {
    let mut rng = common::rng(12);
    let h = 1e-6;
    for model in common::models() {
        for _ in 0..100 {
            let q = common::random_q(&model, &mut rng);
            let qdot = DVector::from_fn(model.dof(), |_, _| rng.gen_range(-1.0..1.0));
            let t = forward_kinematics(&model, &q).unwrap();
            let tp = forward_kinematics(&model, &(&q + &qdot * h)).unwrap();
            let tm = forward_kinematics(&model, &(&q - &qdot * h)).unwrap();
            let fd = fd_body_twist(&tm, &t, &tp, h);
            let analytic = jacobian(&model, &q, Frame::Body).unwrap() * &qdot;
            assert!((analytic - fd).norm() <= 1e-6 * fd.norm().max(1.0));
        }
    }
}

#[test]
fn jacobian_derivative_matches_central_differences() {
    let mut rng = common::rng(13);
    let h = 1e-6;
    for model in common::models() {
        let n = model.dof();
        for frame in Frame::ALL {
            for _ in 0..50 {
                let q = common::random_q(&model, &mut rng);
                let d = jacobian_transpose_derivative(&model, &q, frame).unwrap();
                for alpha in 0..n {
                    let mut dq = DVector::zeros(n);
                    dq[alpha] = h;
                    let fd = (jacobian(&model, &(&q + &dq), frame).unwrap()
                        - jacobian(&model, &(&q - &dq), frame).unwrap())
                        / (2.0 * h);
                    let err = (d.slice(alpha) - &fd).norm();
                    assert!(
                        err <= 1e-6 * fd.norm().max(1.0),
                        "{frame} α={alpha}: {err:e}"
                    );
                }
            }
        }
    }
}

/// Kinetic energy from finite-differenced link poses and the raw link data.
fn link_energy_oracle(model: &RobotModel, q: &DVector<f64>, qdot: &DVector<f64>) -> f64 {
    let h = 1e-6;
    let p0 = link_poses(model, q).unwrap();
    let pp = link_poses(model, &(q + qdot * h)).unwrap();
    let pm = link_poses(model, &(q - qdot * h)).unwrap();
    model
        .links
        .iter()
        .enumerate()
        .map(|(k, link)| {
            let v = fd_body_twist(&pm.links[k], &p0.links[k], &pp.links[k], h);
            let (lin, w) = (v.fixed_rows::<3>(0), v.fixed_rows::<3>(3));
            let vc = lin + w.cross(&link.com);
            0.5 * link.mass * vc.norm_squared() + 0.5 * w.dot(&(link.inertia * w))
        })
        .sum()
}

#[test]
fn mass_matrix_gives_link_kinetic_energy() {
    let mut rng = common::rng(14);
    for model in common::models() {
        for _ in 0..100 {
            let q = common::random_q(&model, &mut rng);
            let qdot = DVector::from_fn(model.dof(), |_, _| rng.gen_range(-2.0..2.0));
            let m = mass_matrix(&model, &q).unwrap();
            let energy = 0.5 * qdot.dot(&(&m * &qdot));
            let oracle = link_energy_oracle(&model, &q, &qdot);
            assert!((energy - oracle).abs() <= 1e-6 * oracle.max(1e-3));
            assert!((&m - m.transpose()).amax() <= 1e-12 * m.amax());
        }
    }
}

#[test]
fn poses_stay_orthonormal_far_from_home() {
    let model = RobotModel::iiwa7();
    let q = DVector::from_element(7, 1e3);
    let t = forward_kinematics(&model, &q).unwrap();
    assert!(t.orthogonality_error() < 1e-9);
}
