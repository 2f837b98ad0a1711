//! Serial-chain robot models.
//!
//! A chain is described in local product-of-exponentials form:
//!
//! ```text
//! T_ee(q) = H₁·exp(ξ₁q₁)·H₂·exp(ξ₂q₂)···Hₙ·exp(ξₙqₙ)·T_offset
//! ```
//!
//! where `Hᵢ` is the home transform of joint `i` relative to the previous
//! joint frame and `ξᵢ` the joint axis expressed in joint frame `i`. Link `i`
//! is rigidly attached to joint frame `i` after its motion.

mod dynamics;
mod kinematics;
mod schema;

use std::path::Path;

use nalgebra::{DVector, Matrix3, Vector3};

pub(crate) use dynamics::mass_matrix_from_poses;
pub use dynamics::{link_spatial_inertia, mass_matrix};
pub(crate) use kinematics::{derivative_from_poses, jacobian_from_poses};
pub use kinematics::{
    forward_kinematics, jacobian, jacobian_transpose_derivative, link_poses, ChainPoses,
    JacobianDerivative,
};

use crate::error::{Error, Result};
use crate::se3::{exp_twist, Transform, Twist};

const ANTHRO3R_JSON: &str = include_str!("../../models/anthro3r.json");
const IIWA7_JSON: &str = include_str!("../../models/iiwa7.json");

/// Names of the models shipped with the crate.
pub const BUNDLED_MODELS: [&str; 2] = ["anthro3r", "iiwa7"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    /// Unit screw axis in the joint's own frame.
    pub axis: Twist,
    pub kind: JointKind,
    /// Pose of this joint frame relative to the previous one at `q = 0`.
    pub home: Transform,
    pub limits: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    pub mass: f64,
    /// Centre of mass in the joint frame (m).
    pub com: Vector3<f64>,
    /// Rotational inertia about the centre of mass (kg·m²).
    pub inertia: Matrix3<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobotModel {
    pub name: String,
    pub joints: Vec<Joint>,
    pub links: Vec<Link>,
    pub end_effector: Transform,
}

impl RobotModel {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    /// Parses and validates a JSON model document.
    pub fn from_json(document: &str) -> Result<Self> {
        load_model(document)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        load_model(&text)
    }

    /// One of the [`BUNDLED_MODELS`]; a trailing `.json` is accepted.
    pub fn bundled(name: &str) -> Result<Self> {
        load_model(
            bundled_document(name)
                .ok_or_else(|| Error::Schema(format!("no bundled model named `{name}`")))?,
        )
    }

    pub fn anthro3r() -> Self {
        Self::bundled("anthro3r").expect("bundled anthro3r model is valid")
    }

    pub fn iiwa7() -> Self {
        Self::bundled("iiwa7").expect("bundled iiwa7 model is valid")
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len == self.dof() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dof(),
                actual: len,
            })
        }
    }

    /// Joints whose declared limits `q` violates (0-based indices).
    pub fn limit_violations(&self, q: &DVector<f64>) -> Vec<usize> {
        self.joints
            .iter()
            .zip(q.iter())
            .enumerate()
            .filter_map(|(i, (j, &qi))| match j.limits {
                Some((lo, hi)) if qi < lo || qi > hi => Some(i),
                _ => None,
            })
            .collect()
    }
}

/// Raw text of a bundled model.
pub fn bundled_document(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".json") {
        "anthro3r" => Some(ANTHRO3R_JSON),
        "iiwa7" => Some(IIWA7_JSON),
        _ => None,
    }
}

/// Parses a model document and checks every model invariant.
pub fn load_model(document: &str) -> Result<RobotModel> {
    let raw: schema::ModelDoc =
        serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    raw.into_model()
}

/// Joint positions and velocities.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
}

impl JointState {
    pub fn new(q: DVector<f64>, qdot: DVector<f64>) -> Result<Self> {
        if q.len() != qdot.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                actual: qdot.len(),
            });
        }
        Ok(Self { q, qdot })
    }

    pub fn at_rest(q: DVector<f64>) -> Self {
        let n = q.len();
        Self {
            q,
            qdot: DVector::zeros(n),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qdot.iter()).all(|x| x.is_finite())
    }
}

impl Joint {
    /// Motion of this joint alone at displacement `q` (no home transform).
    pub fn motion(&self, q: f64) -> Transform {
        exp_twist(&self.axis, q).expect("axis validated at load")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(axis: &str) -> String {
        format!(
            r#"{{
            "name": "one",
            "joints": [{{"axis": {axis}, "kind": "revolute",
                "home": {{"rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [0,0,0]}},
                "limits": [-3, 3]}}],
            "links": [{{"mass": 1.0, "com": [1,0,0], "inertia": [0,0,0, 0,0,0, 0,0,0]}}],
            "end_effector": {{"rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [1,0,0]}}
        }}"#
        )
    }

    #[test]
    fn loads_bundled_models() {
        let a = RobotModel::anthro3r();
        assert_eq!(a.dof(), 3);
        assert!(a.joints.iter().all(|j| j.kind == JointKind::Revolute));
        let k = RobotModel::iiwa7();
        assert_eq!(k.dof(), 7);
        assert_eq!(RobotModel::bundled("iiwa7.json").unwrap(), k);
        assert!(RobotModel::bundled("ur5").is_err());
    }

    #[test]
    fn zero_axis_is_validation_error() {
        let err = load_model(&minimal("[0,0,0,0,0,0]")).unwrap_err();
        match err {
            Error::Validation { path, .. } => assert_eq!(path, "joints[0].axis"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_model(&minimal("[0,0,0,0,0,1]")).is_ok());
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(load_model("{"), Err(Error::Schema(_))));
        let extra = minimal("[0,0,0,0,0,1]").replacen("\"name\"", "\"colour\": 1, \"name\"", 1);
        assert!(matches!(load_model(&extra), Err(Error::Schema(_))));
        let short = minimal("[0,0,0,1]");
        assert!(matches!(load_model(&short), Err(Error::Schema(_))));
    }

    #[test]
    fn invalid_inertia_and_mass() {
        let neg_mass = minimal("[0,0,0,0,0,1]").replace("\"mass\": 1.0", "\"mass\": -1.0");
        assert!(matches!(
            load_model(&neg_mass),
            Err(Error::Validation { ref path, .. }) if path == "links[0].mass"
        ));
        let asym = minimal("[0,0,0,0,0,1]").replace(
            "\"inertia\": [0,0,0, 0,0,0, 0,0,0]",
            "\"inertia\": [1,0.5,0, 0,1,0, 0,0,1]",
        );
        assert!(matches!(
            load_model(&asym),
            Err(Error::Validation { ref path, .. }) if path == "links[0].inertia"
        ));
        let indefinite = minimal("[0,0,0,0,0,1]").replace(
            "\"inertia\": [0,0,0, 0,0,0, 0,0,0]",
            "\"inertia\": [1,0,0, 0,-1,0, 0,0,1]",
        );
        assert!(load_model(&indefinite).is_err());
    }

    #[test]
    fn limit_violations_are_reported_not_rejected() {
        let m = load_model(&minimal("[0,0,0,0,0,1]")).unwrap();
        assert_eq!(m.limit_violations(&DVector::from_element(1, 4.0)), vec![0]);
        assert!(m
            .limit_violations(&DVector::from_element(1, 0.0))
            .is_empty());
    }
}
