//! The 3R anthropomorphic arm under a pure moment, against hand-derived
//! closed forms for its rotational Jacobian.

mod common;

use geostiff::connection::correction_matrix;
use geostiff::robot::{jacobian, RobotModel};
use geostiff::stiffness::{joint_stiffness, kinematic_stiffness, TaskStiffness};
use geostiff::{Frame, Wrench};
use nalgebra::{dmatrix, DVector, Matrix3, Vector3};
use rand::Rng;

fn a_coeff(q1: f64, m: &Vector3<f64>) -> f64 {
    0.5 * (m.x * q1.cos() + m.y * q1.sin())
}

#[test]
fn rotational_jacobian_closed_form() {
    let model = RobotModel::anthro3r();
    let mut rng = common::rng(21);
    for _ in 0..50 {
        let q = common::random_q(&model, &mut rng);
        let (s, c) = q[0].sin_cos();
        let jr = jacobian(&model, &q, Frame::Hybrid)
            .unwrap()
            .rows(3, 3)
            .into_owned();
        let expected = dmatrix![0.0, s, s; 0.0, -c, -c; 1.0, 0.0, 0.0];
        assert!((jr - expected).amax() <= 1e-15);
    }
}

#[test]
fn kinematic_stiffness_and_correction_closed_forms() {
    let model = RobotModel::anthro3r();
    let mut rng = common::rng(22);
    for _ in 0..50 {
        let mut q = common::random_q(&model, &mut rng);
        q[1] = rng.gen_range(-1.5..1.5);
        let m = common::random_vec3(&mut rng, 10.0);
        let f = Wrench::new(Vector3::zeros(), m);
        let a = a_coeff(q[0], &m);

        let k_kin = kinematic_stiffness(&model, &q, &f, Frame::Hybrid).unwrap();
        let expected = dmatrix![0.0, 0.0, 0.0; 2.0 * a, 0.0, 0.0; 2.0 * a, 0.0, 0.0];
        assert!((k_kin - expected).amax() <= 1e-12);

        let gamma = correction_matrix(Frame::Hybrid, &f).matrix;
        let printed = Matrix3::new(
            0.0,
            m.z / 2.0,
            -m.y / 2.0,
            -m.z / 2.0,
            0.0,
            m.x / 2.0,
            m.y / 2.0,
            -m.x / 2.0,
            0.0,
        );
        assert_eq!(gamma.fixed_view::<3, 3>(3, 3).into_owned(), printed);

        let j = jacobian(&model, &q, Frame::Hybrid).unwrap();
        let mapped = j.transpose() * gamma * &j;
        let expected = dmatrix![0.0, a, a; -a, 0.0, 0.0; -a, 0.0, 0.0];
        assert!((mapped - expected).amax() <= 1e-12);

        let k = joint_stiffness(
            &model,
            &q,
            &TaskStiffness::zero(Frame::Hybrid),
            &f,
            Frame::Hybrid,
            true,
        )
        .unwrap();
        let expected = dmatrix![0.0, a, a; a, 0.0, 0.0; a, 0.0, 0.0];
        assert!((&k.matrix - expected).amax() <= 1e-12);
        assert!(k.is_symmetric());
    }
}

#[test]
fn worked_example_at_home() {
    let model = RobotModel::anthro3r();
    let q = DVector::zeros(3);
    let f = Wrench::new(Vector3::zeros(), Vector3::x());
    let k_kin = kinematic_stiffness(&model, &q, &f, Frame::Hybrid).unwrap();
    assert_eq!(k_kin, dmatrix![0.0, 0.0, 0.0; 1.0, 0.0, 0.0; 1.0, 0.0, 0.0]);
    let k = joint_stiffness(
        &model,
        &q,
        &TaskStiffness::zero(Frame::Hybrid),
        &f,
        Frame::Hybrid,
        true,
    )
    .unwrap();
    assert!((k.matrix - dmatrix![0.0, 0.5, 0.5; 0.5, 0.0, 0.0; 0.5, 0.0, 0.0]).amax() < 1e-15);
}
