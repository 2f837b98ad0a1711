//! Built-in wiping task: the end effector sweeps a horizontal semicircle with
//! fixed orientation while an external moment ramps up.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Rotation3, UnitQuaternion, Vector3, Vector6};

use super::series::{JointTrajectory, WrenchProfile};
use super::ControllerConfig;
use crate::connection::Frame;
use crate::error::{Error, Result};
use crate::robot::{jacobian_from_poses, link_poses, RobotModel};
use crate::se3::{Transform, Wrench};
use crate::stiffness::TaskStiffness;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IkOptions {
    /// Damping λ of the least-squares step.
    pub damping: f64,
    pub max_iterations: usize,
    /// Bound on position (m) and orientation (rad) error.
    pub tolerance: f64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            damping: 0.01,
            max_iterations: 200,
            tolerance: 1e-8,
        }
    }
}

/// Position and orientation error of `current` relative to `target`, in
/// inertial axes (hybrid twist ordering).
fn pose_error(current: &Transform, target: &Transform) -> Vector6<f64> {
    let dp = target.translation - current.translation;
    let dr = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
        target.rotation * current.rotation.transpose(),
    ));
    let (w, xyz) = (dr.w, dr.imag());
    let (w, xyz) = if w < 0.0 { (-w, -xyz) } else { (w, xyz) };
    let s = xyz.norm();
    // Rotation vector via atan2, which stays accurate near the identity.
    let rotvec = if s > 0.0 {
        xyz * (2.0 * s.atan2(w) / s)
    } else {
        xyz * 2.0
    };
    let mut e = Vector6::zeros();
    e.fixed_rows_mut::<3>(0).copy_from(&dp);
    e.fixed_rows_mut::<3>(3).copy_from(&rotvec);
    e
}

/// Damped least-squares inverse kinematics for a full end-effector pose.
pub fn inverse_kinematics(
    model: &RobotModel,
    target: &Transform,
    initial: &DVector<f64>,
    options: &IkOptions,
) -> Result<DVector<f64>> {
    let mut q = initial.clone();
    let lambda2 = options.damping * options.damping;
    let mut err_norm = f64::INFINITY;
    for _ in 0..=options.max_iterations {
        let poses = link_poses(model, &q)?;
        let e = pose_error(&poses.end_effector, target);
        let ep = e.fixed_rows::<3>(0).norm();
        let eo = e.fixed_rows::<3>(3).norm();
        err_norm = ep.max(eo);
        if err_norm <= options.tolerance {
            return Ok(q);
        }
        let j = jacobian_from_poses(model, &poses, Frame::Hybrid);
        let jjt = &j * j.transpose() + DMatrix::<f64>::identity(6, 6) * lambda2;
        let y = jjt
            .cholesky()
            .ok_or_else(|| Error::Config("singular IK system".into()))?
            .solve(&DVector::from_column_slice(e.as_slice()));
        q += j.transpose() * y;
    }
    Err(Error::Config(format!(
        "inverse kinematics did not converge (error {err_norm:e})"
    )))
}

/// Smooth 0→1 timing law `½(1 − cos(π·t/T))`.
fn ease(t: f64, duration: f64) -> f64 {
    0.5 * (1.0 - (PI * (t / duration).clamp(0.0, 1.0)).cos())
}

/// Joint trajectory whose end effector traces a semicircle of `radius` in
/// the horizontal plane through the pose at `start`, keeping that
/// orientation. The circle's centre lies `radius` along −x from the start.
pub fn wiping_trajectory(
    model: &RobotModel,
    start: &DVector<f64>,
    radius: f64,
    duration: f64,
    samples: usize,
) -> Result<JointTrajectory> {
    if samples < 2 || !(duration > 0.0) {
        return Err(Error::Config(
            "wiping trajectory needs ≥2 samples and a positive duration".into(),
        ));
    }
    let home = link_poses(model, start)?.end_effector;
    let centre = home.translation - Vector3::new(radius, 0.0, 0.0);
    let options = IkOptions::default();
    let mut q = start.clone();
    let mut times = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for s in 0..samples {
        let t = duration * s as f64 / (samples - 1) as f64;
        let theta = PI * ease(t, duration);
        let target = Transform::new(
            home.rotation,
            centre + radius * Vector3::new(theta.cos(), theta.sin(), 0.0),
        );
        q = inverse_kinematics(model, &target, &q, &options)?;
        times.push(t);
        values.push(q.clone());
    }
    JointTrajectory::new(times, values)
}

/// Moment about base `axis` ramping smoothly from 0 to `peak` over
/// `[0, ramp_end]` and held to `duration`.
pub fn moment_ramp_profile(
    axis: Vector3<f64>,
    peak: f64,
    ramp_end: f64,
    duration: f64,
    samples: usize,
) -> Result<WrenchProfile> {
    if samples < 2 || !(ramp_end > 0.0) || duration < ramp_end {
        return Err(Error::Config("invalid moment ramp".into()));
    }
    let axis = axis
        .try_normalize(1e-12)
        .ok_or_else(|| Error::Config("moment axis is zero".into()))?;
    let mut points: Vec<(f64, Wrench)> = (0..samples)
        .map(|s| {
            let t = ramp_end * s as f64 / (samples - 1) as f64;
            (
                t,
                Wrench::new(Vector3::zeros(), axis * (peak * ease(t, ramp_end))),
            )
        })
        .collect();
    if duration > ramp_end {
        points.push((duration, Wrench::new(Vector3::zeros(), axis * peak)));
    }
    WrenchProfile::new(points)
}

/// Inputs for the bundled 7-DOF wiping run.
#[derive(Clone, Debug)]
pub struct WipingScenario {
    pub model: RobotModel,
    pub controller: ControllerConfig,
    pub trajectory: JointTrajectory,
    pub wrench: WrenchProfile,
    pub duration: f64,
}

pub const WIPING_START: [f64; 7] = [0.0, 0.5, 0.0, -1.4, 0.0, 0.8, 0.0];
pub const WIPING_DURATION: f64 = 20.0;
pub const WIPING_RADIUS: f64 = 0.15;
pub const WIPING_RAMP_END: f64 = 13.0;
/// Task gains of the wiping controller: translation (N/m), tilt and spin
/// about the tool axis (N·m/rad).
pub const WIPING_GAINS: (f64, f64, f64) = (1500.0, 800.0, 50.0);

/// Hybrid-frame Hessian that is soft in spin about the tool axis `z` (unit,
/// base coordinates) and stiff in tilt.
fn tool_hessian(z: &Vector3<f64>, (kt, k_tilt, k_spin): (f64, f64, f64)) -> Result<TaskStiffness> {
    let mut h = nalgebra::Matrix6::zeros();
    h.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(nalgebra::Matrix3::identity() * kt));
    let zz = z * z.transpose();
    h.fixed_view_mut::<3, 3>(3, 3)
        .copy_from(&(nalgebra::Matrix3::identity() * k_tilt + zz * (k_spin - k_tilt)));
    TaskStiffness::new(h, Frame::Hybrid)
}

/// 20 s semicircular wipe on the bundled 7-DOF arm. The external moment
/// ramps to `peak_moment` (N·m) about the base y axis, which is normal to
/// the tool axis along the whole path.
pub fn wiping_scenario(peak_moment: f64, with_correction: bool) -> Result<WipingScenario> {
    let model = RobotModel::iiwa7();
    let start = DVector::from_column_slice(&WIPING_START);
    let tool_axis = link_poses(&model, &start)?
        .end_effector
        .rotation
        .column(2)
        .into_owned();
    let trajectory = wiping_trajectory(&model, &start, WIPING_RADIUS, WIPING_DURATION, 401)?;
    let wrench = moment_ramp_profile(
        Vector3::y(),
        peak_moment,
        WIPING_RAMP_END,
        WIPING_DURATION,
        131,
    )?;
    let mut controller =
        ControllerConfig::new(tool_hessian(&tool_axis, WIPING_GAINS)?, with_correction);
    controller.nullspace_stiffness = 20.0;
    Ok(WipingScenario {
        model,
        controller,
        trajectory,
        wrench,
        duration: WIPING_DURATION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::forward_kinematics;

    #[test]
    fn ik_reaches_reachable_pose() {
        let model = RobotModel::iiwa7();
        let q_true = DVector::from_vec(vec![0.3, 0.6, -0.2, -1.2, 0.4, 0.7, 0.1]);
        let target = forward_kinematics(&model, &q_true).unwrap();
        let q0 = DVector::from_column_slice(&WIPING_START);
        let q = inverse_kinematics(&model, &target, &q0, &IkOptions::default()).unwrap();
        let reached = forward_kinematics(&model, &q).unwrap();
        assert!((reached.translation - target.translation).norm() < 1e-8);
        assert!((reached.rotation - target.rotation).amax() < 1e-8);
    }

    #[test]
    fn wiping_path_is_a_semicircle() {
        let model = RobotModel::iiwa7();
        let start = DVector::from_column_slice(&WIPING_START);
        let traj = wiping_trajectory(&model, &start, 0.15, 20.0, 41).unwrap();
        let p0 = forward_kinematics(&model, &start).unwrap();
        let centre = p0.translation - Vector3::new(0.15, 0.0, 0.0);
        for (t, q) in traj.series().times().iter().zip(traj.series().values()) {
            let p = forward_kinematics(&model, q).unwrap();
            assert!(
                ((p.translation - centre).norm() - 0.15).abs() < 1e-7,
                "t = {t}"
            );
            assert!((p.translation.z - centre.z).abs() < 1e-7);
            assert!((p.rotation - p0.rotation).amax() < 1e-7);
        }
        let end = forward_kinematics(&model, &traj.eval(20.0)).unwrap();
        assert!((end.translation - (centre - Vector3::new(0.15, 0.0, 0.0))).norm() < 1e-7);
    }

    #[test]
    fn ramp_profile_shape() {
        let w = moment_ramp_profile(Vector3::x(), 10.0, 13.0, 20.0, 131).unwrap();
        assert_eq!(w.eval(0.0), Wrench::zero());
        assert!((w.eval(13.0).moment().x - 10.0).abs() < 1e-12);
        assert!((w.eval(19.0).moment().x - 10.0).abs() < 1e-12);
        assert!((w.eval(6.5).moment().x - 5.0).abs() < 1e-9);
        assert_eq!(w.eval(5.0).force(), Vector3::zeros());
    }
}
