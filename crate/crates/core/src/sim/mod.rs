//! Fixed-step impedance-control simulation.
//!
//! The plant is `M(q)·q̈ = τ + Jᵀ·F_ext` (gravity and Coriolis terms are
//! treated as compensated) and the controller is
//!
//! ```text
//! τ = 𝒦(q)·(q₀(t) − q) − B(q)·q̇
//! ```
//!
//! with `𝒦` the joint stiffness at the measured external wrench and `B`
//! designed from `sym(𝒦)` and `M` every step. Integration is semi-implicit
//! Euler.

mod damping;
mod scenario;
mod series;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use damping::{design_damping, NEGATIVE_EIGENVALUE_TOL};
pub use scenario::{
    inverse_kinematics, moment_ramp_profile, wiping_scenario, wiping_trajectory, IkOptions,
    WipingScenario, WIPING_DURATION, WIPING_GAINS, WIPING_RADIUS, WIPING_RAMP_END, WIPING_START,
};
pub use series::{JointTrajectory, TimeSeries, WrenchProfile};

use crate::connection::Frame;
use crate::error::{Error, Result};
use crate::robot::{link_poses, mass_matrix_from_poses, JointState, RobotModel};
use crate::se3::{Transform, Wrench};
use crate::stiffness::{joint_stiffness_from_poses, symmetry_report, TaskStiffness};
use series::fmt_num;

/// `‖q̇‖` above this aborts the run (rad/s).
pub const DIVERGENCE_LIMIT: f64 = 1e3;
pub const DEFAULT_RATE: f64 = 1000.0;
pub const RATE_RANGE: (f64, f64) = (100.0, 10_000.0);

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerConfig {
    pub task_hessian: TaskStiffness,
    /// Modal damping ratio ζ, in `(0, 2]`.
    pub damping_ratio: f64,
    pub frame: Frame,
    pub with_correction: bool,
    /// Control and integration rate (Hz).
    pub rate: f64,
    /// Isotropic joint stiffness added to `𝒦` (N·m/rad); holds the null
    /// space of redundant arms.
    pub nullspace_stiffness: f64,
}

impl ControllerConfig {
    pub fn new(task_hessian: TaskStiffness, with_correction: bool) -> Self {
        Self {
            frame: task_hessian.frame,
            task_hessian,
            damping_ratio: 1.0,
            with_correction,
            rate: DEFAULT_RATE,
            nullspace_stiffness: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping_ratio > 0.0 && self.damping_ratio <= 2.0) {
            return Err(Error::Config(format!(
                "damping_ratio {} outside (0, 2]",
                self.damping_ratio
            )));
        }
        if !(self.rate >= RATE_RANGE.0 && self.rate <= RATE_RANGE.1) {
            return Err(Error::Config(format!(
                "rate {} Hz outside [{}, {}]",
                self.rate, RATE_RANGE.0, RATE_RANGE.1
            )));
        }
        if self.task_hessian.frame != self.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                actual: self.task_hessian.frame,
            });
        }
        if !self.task_hessian.is_positive_semidefinite() {
            return Err(Error::Config(
                "task Hessian is not positive semidefinite".into(),
            ));
        }
        if !(self.nullspace_stiffness.is_finite() && self.nullspace_stiffness >= 0.0) {
            return Err(Error::Config(format!(
                "nullspace_stiffness {} must be non-negative",
                self.nullspace_stiffness
            )));
        }
        Ok(())
    }

    pub fn timestep(&self) -> f64 {
        1.0 / self.rate
    }
}

fn default_zeta() -> f64 {
    1.0
}

fn default_rate() -> f64 {
    DEFAULT_RATE
}

fn default_true() -> bool {
    true
}

/// JSON form of a controller configuration plus optional run settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    /// 6 diagonal or 36 row-major values.
    pub hessian: Vec<f64>,
    #[serde(default = "default_zeta")]
    pub damping_ratio: f64,
    pub frame: Frame,
    #[serde(default = "default_true")]
    pub with_correction: bool,
    #[serde(default = "default_rate")]
    pub rate: f64,
    #[serde(default)]
    pub nullspace_stiffness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_q: Option<Vec<f64>>,
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn controller(&self) -> Result<ControllerConfig> {
        let config = ControllerConfig {
            task_hessian: TaskStiffness::from_values(&self.hessian, self.frame)?,
            damping_ratio: self.damping_ratio,
            frame: self.frame,
            with_correction: self.with_correction,
            rate: self.rate,
            nullspace_stiffness: self.nullspace_stiffness,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Base-frame wrench at the end-effector origin, re-expressed in `frame`
/// for an end effector at pose `ee`.
pub fn wrench_in_frame(base: &Wrench, ee: &Transform, frame: Frame) -> Wrench {
    let (f, m) = (base.force(), base.moment());
    match frame {
        Frame::Hybrid => *base,
        Frame::Body => {
            let rt = ee.rotation.transpose();
            Wrench::new(rt * f, rt * m)
        }
        Frame::Inertial => Wrench::new(f, m + ee.translation.cross(&f)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
    pub tau: DVector<f64>,
    /// Applied wrench as sampled from the profile (base frame).
    pub wrench: Wrench,
    pub sigma_max_sym: f64,
    pub sigma_max_asym: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimTrace {
    pub dof: usize,
    pub timestep: f64,
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub fn header(&self) -> Vec<String> {
        let n = self.dof;
        let mut h = vec!["t".to_string()];
        h.extend((1..=n).map(|i| format!("q{i}")));
        h.extend((1..=n).map(|i| format!("qdot{i}")));
        h.extend((1..=n).map(|i| format!("tau{i}")));
        h.extend((1..=6).map(|i| format!("F{i}")));
        h.push("sigma_max_sym".into());
        h.push("sigma_max_asym".into());
        h
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header().join(","))?;
        for r in &self.rows {
            let fields: Vec<String> = std::iter::once(r.t)
                .chain(r.q.iter().copied())
                .chain(r.qdot.iter().copied())
                .chain(r.tau.iter().copied())
                .chain(r.wrench.0.iter().copied())
                .chain([r.sigma_max_sym, r.sigma_max_asym])
                .map(fmt_num)
                .collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn peak_asymmetry(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.sigma_max_asym)
            .fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> Option<JointState> {
        self.rows
            .last()
            .map(|r| JointState::new(r.q.clone(), r.qdot.clone()).expect("same length"))
    }
}

/// Gnuplot script plotting `sigma_max_asym` over time from `csv_path`.
pub fn plot_script(trace: &SimTrace, csv_path: &str) -> String {
    let col = 1 + 3 * trace.dof + 6 + 2;
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 't (s)'\n\
         set ylabel 'sigma_max (N m/rad)'\n\
         plot '{csv_path}' using 1:{} with lines, '' using 1:{col} with lines\n",
        col - 1
    )
}

/// Runs from `q₀(0)` at rest.
pub fn simulate(
    model: &RobotModel,
    controller: &ControllerConfig,
    trajectory: &JointTrajectory,
    wrench: &WrenchProfile,
    duration: f64,
) -> Result<SimTrace> {
    let start = JointState::at_rest(trajectory.eval(0.0));
    simulate_from(model, controller, trajectory, wrench, duration, start)
}

pub fn simulate_from(
    model: &RobotModel,
    controller: &ControllerConfig,
    trajectory: &JointTrajectory,
    wrench: &WrenchProfile,
    duration: f64,
    initial: JointState,
) -> Result<SimTrace> {
    controller.validate()?;
    let n = model.dof();
    model.check_dim(trajectory.dof())?;
    model.check_dim(initial.q.len())?;
    model.check_dim(initial.qdot.len())?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Config(format!(
            "duration {duration} must be positive"
        )));
    }
    if !initial.is_finite() {
        return Err(Error::Config("initial state is not finite".into()));
    }

    let dt = controller.timestep();
    let steps = (duration * controller.rate).round() as usize;
    let frame = controller.frame;
    let nullspace = DMatrix::identity(n, n) * controller.nullspace_stiffness;
    let JointState { mut q, mut qdot } = initial;
    let mut rows = Vec::with_capacity(steps + 1);

    for step in 0..=steps {
        let t = step as f64 * dt;
        let poses = link_poses(model, &q)?;
        debug_assert!(poses.end_effector.orthogonality_error() < 1e-9);
        let applied = wrench.eval(t);
        let f = wrench_in_frame(&applied, &poses.end_effector, frame);
        let (k_joint, jac) = joint_stiffness_from_poses(
            model,
            &poses,
            &controller.task_hessian,
            &f,
            frame,
            controller.with_correction,
        )?;
        let k_joint = k_joint + &nullspace;
        let mass = mass_matrix_from_poses(model, &poses);
        let b = design_damping(&k_joint, &mass, controller.damping_ratio)?;
        let tau = &k_joint * (trajectory.eval(t) - &q) - &b * &qdot;
        let report = symmetry_report(&k_joint)?;
        rows.push(TraceRow {
            t,
            q: q.clone(),
            qdot: qdot.clone(),
            tau: tau.clone(),
            wrench: applied,
            sigma_max_sym: report.sigma_max_sym,
            sigma_max_asym: report.sigma_max_asym,
        });
        if step == steps {
            break;
        }

        let rhs = &tau + jac.transpose() * f.0;
        let qddot = mass
            .cholesky()
            .ok_or_else(|| Error::NonPositiveDefinite(format!("mass matrix at t = {t}")))?
            .solve(&rhs);
        qdot += qddot * dt;
        q += &qdot * dt;
        let speed = qdot.norm();
        if !(speed <= DIVERGENCE_LIMIT) {
            return Err(Error::IntegrationDiverged {
                t: t + dt,
                qdot_norm: speed,
            });
        }
    }
    Ok(SimTrace {
        dof: n,
        timestep: dt,
        rows,
    })
}
