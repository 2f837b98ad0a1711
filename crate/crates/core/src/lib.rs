//! Geometrically consistent joint-space stiffness for serial-chain robots.
//!
//! Mapping a task-space spring through a Jacobian that depends on the
//! configuration yields a joint stiffness that is generally asymmetric when
//! an external wrench is present. Adding the connection correction `Γ(F)` for
//! the Jacobian's frame restores symmetry, so the resulting impedance is a
//! conservative potential field.
//!
//! Modules, bottom-up: [`se3`] (rigid-body algebra), [`connection`]
//! (Christoffel symbols and wrench corrections), [`robot`] (models,
//! kinematics, inertia), [`stiffness`], [`passivity`] and [`sim`].

// Negated float comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connection;
pub mod error;
pub mod passivity;
pub mod robot;
pub mod se3;
pub mod sim;
pub mod stiffness;

pub use connection::Frame;
pub use error::{Error, Result};
pub use robot::RobotModel;
pub use se3::{Transform, Twist, Wrench};
