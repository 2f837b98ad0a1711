//! JSON document layout for robot models.

use nalgebra::{Matrix3, SymmetricEigen, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use super::{Joint, JointKind, Link, RobotModel};
use crate::error::{Error, Result};
use crate::se3::{Transform, Twist, AXIS_TOLERANCE};

const ROTATION_TOLERANCE: f64 = 1e-9;
const INERTIA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct PoseDoc {
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub(super) enum KindDoc {
    Revolute,
    Prismatic,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct JointDoc {
    pub axis: [f64; 6],
    pub kind: KindDoc,
    pub home: PoseDoc,
    #[serde(default)]
    pub limits: Option<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct LinkDoc {
    pub mass: f64,
    pub com: [f64; 3],
    pub inertia: [f64; 9],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct ModelDoc {
    pub name: String,
    pub joints: Vec<JointDoc>,
    pub links: Vec<LinkDoc>,
    pub end_effector: PoseDoc,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn finite(path: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid(path, "non-finite number"))
    }
}

impl PoseDoc {
    fn to_transform(&self, path: &str) -> Result<Transform> {
        finite(&format!("{path}.rotation"), &self.rotation)?;
        finite(&format!("{path}.translation"), &self.translation)?;
        let t = Transform::new(
            Matrix3::from_row_slice(&self.rotation),
            Vector3::from_column_slice(&self.translation),
        );
        if !t.is_valid(ROTATION_TOLERANCE) {
            return Err(invalid(
                format!("{path}.rotation"),
                format!(
                    "not a proper rotation (|RᵀR − I| = {:e}, det = {})",
                    t.orthogonality_error(),
                    t.rotation.determinant()
                ),
            ));
        }
        Ok(t.orthonormalized())
    }
}

impl JointDoc {
    fn to_joint(&self, index: usize) -> Result<Joint> {
        let path = format!("joints[{index}]");
        finite(&format!("{path}.axis"), &self.axis)?;
        let axis = Twist(Vector6::from_column_slice(&self.axis));
        let (wn, vn) = (axis.angular().norm(), axis.linear().norm());
        let kind = match self.kind {
            KindDoc::Revolute => {
                if (wn - 1.0).abs() > AXIS_TOLERANCE {
                    return Err(invalid(
                        format!("{path}.axis"),
                        format!("revolute axis needs unit angular part, |ω| = {wn}"),
                    ));
                }
                JointKind::Revolute
            }
            KindDoc::Prismatic => {
                if wn > AXIS_TOLERANCE || (vn - 1.0).abs() > AXIS_TOLERANCE {
                    return Err(invalid(
                        format!("{path}.axis"),
                        format!(
                            "prismatic axis needs ω = 0 and |v| = 1, got |ω| = {wn}, |v| = {vn}"
                        ),
                    ));
                }
                JointKind::Prismatic
            }
        };
        let limits = match self.limits {
            Some([lo, hi]) => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(invalid(format!("{path}.limits"), "need finite lo <= hi"));
                }
                Some((lo, hi))
            }
            None => None,
        };
        Ok(Joint {
            axis,
            kind,
            home: self.home.to_transform(&format!("{path}.home"))?,
            limits,
        })
    }
}

impl LinkDoc {
    fn to_link(&self, index: usize) -> Result<Link> {
        let path = format!("links[{index}]");
        finite(&format!("{path}.mass"), &[self.mass])?;
        finite(&format!("{path}.com"), &self.com)?;
        finite(&format!("{path}.inertia"), &self.inertia)?;
        if self.mass < 0.0 {
            return Err(invalid(format!("{path}.mass"), "mass must be >= 0"));
        }
        let inertia = Matrix3::from_row_slice(&self.inertia);
        let scale = inertia.amax().max(1.0);
        if (inertia - inertia.transpose()).amax() > INERTIA_TOLERANCE * scale {
            return Err(invalid(
                format!("{path}.inertia"),
                "inertia is not symmetric",
            ));
        }
        let sym = (inertia + inertia.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
        if min_eig < -INERTIA_TOLERANCE * scale {
            return Err(invalid(
                format!("{path}.inertia"),
                format!("inertia is not positive semidefinite (eigenvalue {min_eig:e})"),
            ));
        }
        Ok(Link {
            mass: self.mass,
            com: Vector3::from_column_slice(&self.com),
            inertia: sym,
        })
    }
}

impl ModelDoc {
    pub(super) fn into_model(self) -> Result<RobotModel> {
        if self.joints.is_empty() {
            return Err(invalid("joints", "a chain needs at least one joint"));
        }
        if self.links.len() != self.joints.len() {
            return Err(invalid(
                "links",
                format!(
                    "expected one link per joint ({}), got {}",
                    self.joints.len(),
                    self.links.len()
                ),
            ));
        }
        let joints = self
            .joints
            .iter()
            .enumerate()
            .map(|(i, j)| j.to_joint(i))
            .collect::<Result<Vec<_>>>()?;
        let links = self
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| l.to_link(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(RobotModel {
            name: self.name,
            joints,
            links,
            end_effector: self.end_effector.to_transform("end_effector")?,
        })
    }
}
