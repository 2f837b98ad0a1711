#![allow(dead_code)]

use geostiff::robot::RobotModel;
use geostiff::stiffness::TaskStiffness;
use geostiff::{Frame, Wrench};
use nalgebra::{DVector, Matrix6, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample inside the joint limits (±π when unlimited).
pub fn random_q(model: &RobotModel, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_iterator(
        model.dof(),
        model.joints.iter().map(|j| {
            let (lo, hi) = j
                .limits
                .unwrap_or((-std::f64::consts::PI, std::f64::consts::PI));
            rng.gen_range(lo..hi)
        }),
    )
}

pub fn random_vec3(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    if scale == 0.0 {
        return Vector3::zeros();
    }
    Vector3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

pub fn random_wrench(rng: &mut impl Rng, force: f64, moment: f64) -> Wrench {
    Wrench::new(random_vec3(rng, force), random_vec3(rng, moment))
}

/// Wrench whose moment has exactly the given norm.
pub fn wrench_with_moment_norm(rng: &mut impl Rng, force: f64, moment_norm: f64) -> Wrench {
    let m = loop {
        let v = random_vec3(rng, 1.0);
        if v.norm() > 1e-3 {
            break v.normalize() * moment_norm;
        }
    };
    Wrench::new(random_vec3(rng, force), m)
}

/// Symmetric positive-definite Hessian `AAᵀ + εI`.
pub fn random_hessian(rng: &mut impl Rng, scale: f64, frame: Frame) -> TaskStiffness {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let h = (a * a.transpose() + Matrix6::identity() * 0.1) * scale;
    TaskStiffness::new((h + h.transpose()) * 0.5, frame).unwrap()
}

pub fn models() -> [RobotModel; 2] {
    [RobotModel::anthro3r(), RobotModel::iiwa7()]
}
