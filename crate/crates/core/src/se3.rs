//! Rigid-body transforms, twists, wrenches and the Lie algebra se(3).
//!
//! Six-vectors are ordered linear-first: entries 1..3 are the linear part
//! (velocity / force), entries 4..6 the angular part (angular velocity /
//! moment). Every matrix in the crate uses this ordering.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};

/// Structure tolerance used by [`vee`].
pub const HAT_TOLERANCE: f64 = 1e-12;
/// Axis normalization tolerance used by [`exp_twist`].
pub const AXIS_TOLERANCE: f64 = 1e-9;
/// Below this rotation magnitude `exp_twist` switches to a series expansion.
pub const SMALL_ANGLE: f64 = 1e-8;

/// 3x3 cross-product matrix, `skew(a) * b == a.cross(&b)`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rigid-body pose: an element of SE(3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self::new(Matrix3::identity(), translation)
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Self {
        Self::new(rotation, Vector3::zeros())
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    pub fn compose(&self, other: &Transform) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Reads the rotation and translation blocks of a homogeneous matrix.
    /// The bottom row is not checked.
    pub fn from_homogeneous(m: &Matrix4<f64>) -> Self {
        Self::new(
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 1>(0, 3).into_owned(),
        )
    }

    /// Frobenius norm of `RᵀR − I`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).norm()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.orthogonality_error() <= tol && self.rotation.determinant() > 0.0
    }

    /// Projects the rotation block back onto SO(3) (nearest rotation via SVD).
    pub fn orthonormalized(&self) -> Self {
        let svd = self.rotation.svd(true, true);
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        Self::new(r, self.translation)
    }
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Transform {
    type Output = Transform;
    fn mul(self, rhs: Transform) -> Transform {
        self.compose(&rhs)
    }
}

impl Mul<&Transform> for &Transform {
    type Output = Transform;
    fn mul(self, rhs: &Transform) -> Transform {
        self.compose(rhs)
    }
}

macro_rules! six_vector {
    ($name:ident, $lin:ident, $ang:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Default)]
        pub struct $name(pub Vector6<f64>);

        impl $name {
            pub fn zero() -> Self {
                Self(Vector6::zeros())
            }

            pub fn new($lin: Vector3<f64>, $ang: Vector3<f64>) -> Self {
                Self(Vector6::new($lin.x, $lin.y, $lin.z, $ang.x, $ang.y, $ang.z))
            }

            pub fn from_slice(c: &[f64]) -> Result<Self> {
                if c.len() != 6 {
                    return Err(Error::DimensionMismatch {
                        expected: 6,
                        actual: c.len(),
                    });
                }
                Ok(Self(Vector6::from_column_slice(c)))
            }

            /// Standard basis element `e_i`, `i` in 1..=6.
            pub fn basis(i: usize) -> Result<Self> {
                check_index(i)?;
                let mut v = Vector6::zeros();
                v[i - 1] = 1.0;
                Ok(Self(v))
            }

            pub fn $lin(&self) -> Vector3<f64> {
                self.0.fixed_rows::<3>(0).into_owned()
            }

            pub fn $ang(&self) -> Vector3<f64> {
                self.0.fixed_rows::<3>(3).into_owned()
            }

            pub fn as_vector(&self) -> &Vector6<f64> {
                &self.0
            }

            pub fn scale(&self, s: f64) -> Self {
                Self(self.0 * s)
            }
        }

        impl From<Vector6<f64>> for $name {
            fn from(v: Vector6<f64>) -> Self {
                Self(v)
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                $name(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                $name(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(-self.0)
            }
        }

        impl Mul<f64> for $name {
            type Output = $name;
            fn mul(self, rhs: f64) -> $name {
                $name(self.0 * rhs)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let c = &self.0;
                write!(
                    f,
                    "({}, {}, {}, {}, {}, {})",
                    c[0], c[1], c[2], c[3], c[4], c[5]
                )
            }
        }
    };
}

six_vector!(Twist, linear, angular);
six_vector!(Wrench, force, moment);

impl Wrench {
    /// Dual pairing ⟨F, ξ⟩ (power / work).
    pub fn pair(&self, twist: &Twist) -> f64 {
        self.0.dot(&twist.0)
    }
}

/// Matrix form of a twist, `Σᵢ ξⁱ ẽᵢ`.
pub fn hat(twist: &Twist) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&skew(&twist.angular()));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&twist.linear());
    m
}

/// Inverse of [`hat`]; rejects matrices without the se(3) structure.
pub fn vee(m: &Matrix4<f64>) -> Result<Twist> {
    let tol = HAT_TOLERANCE;
    for c in 0..4 {
        if m[(3, c)].abs() > tol {
            return Err(Error::MalformedMatrix(format!(
                "bottom row entry (4,{}) = {}",
                c + 1,
                m[(3, c)]
            )));
        }
    }
    let w = m.fixed_view::<3, 3>(0, 0);
    for r in 0..3 {
        for c in 0..3 {
            if (w[(r, c)] + w[(c, r)]).abs() > tol {
                return Err(Error::MalformedMatrix(format!(
                    "rotation block not skew at ({},{})",
                    r + 1,
                    c + 1
                )));
            }
        }
    }
    let v = Vector3::new(m[(0, 3)], m[(1, 3)], m[(2, 3)]);
    let omega = Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]);
    Ok(Twist::new(v, omega))
}

/// Exponential of a unit screw axis scaled by `angle` (rad for revolute,
/// m for prismatic axes).
pub fn exp_twist(axis: &Twist, angle: f64) -> Result<Transform> {
    let w = axis.angular();
    let v = axis.linear();
    let wn = w.norm();
    if (wn - 1.0).abs() <= AXIS_TOLERANCE {
        let wh = skew(&w);
        let wh2 = wh * wh;
        let (rotation, vmap) = if angle.abs() < SMALL_ANGLE {
            let t2 = angle * angle;
            (
                Matrix3::identity() + wh * angle + wh2 * (0.5 * t2),
                Matrix3::identity() * angle + wh * (0.5 * t2) + wh2 * (t2 * angle / 6.0),
            )
        } else {
            let (s, c) = angle.sin_cos();
            (
                Matrix3::identity() + wh * s + wh2 * (1.0 - c),
                Matrix3::identity() * angle + wh * (1.0 - c) + wh2 * (angle - s),
            )
        };
        Ok(Transform::new(rotation, vmap * v))
    } else if wn <= AXIS_TOLERANCE && (v.norm() - 1.0).abs() <= AXIS_TOLERANCE {
        Ok(Transform::from_translation(v * angle))
    } else {
        Err(Error::BadAxis(format!(
            "|ω| = {wn}, |v| = {}; need |ω| = 1 or (ω = 0, |v| = 1)",
            v.norm()
        )))
    }
}

/// Adjoint map of `t`: `[R, p̂R; 0, R]` in linear-first ordering.
pub fn adjoint(t: &Transform) -> Matrix6<f64> {
    let r = t.rotation;
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
    m.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&(skew(&t.translation) * r));
    m
}

/// Matrix of the Lie bracket `ad_ξ`, so that `ad(a) * b = [a, b]`.
pub fn ad(twist: &Twist) -> Matrix6<f64> {
    let wh = skew(&twist.angular());
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&wh);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&wh);
    m.fixed_view_mut::<3, 3>(0, 3)
        .copy_from(&skew(&twist.linear()));
    m
}

/// Lie bracket `[a, b] = vee(â b̂ − b̂ â)`.
pub fn bracket(a: &Twist, b: &Twist) -> Twist {
    let (va, wa) = (a.linear(), a.angular());
    let (vb, wb) = (b.linear(), b.angular());
    Twist::new(wa.cross(&vb) - wb.cross(&va), wa.cross(&wb))
}

pub(crate) fn check_index(i: usize) -> Result<()> {
    if (1..=6).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, max: 6 })
    }
}

/// Nonzero structure coefficients `C^k_{ij}` of se(3) as `(k, i, j, value)`,
/// 1-based, defined by `[ẽᵢ, ẽⱼ] = C^k_{ij} ẽₖ`.
pub const STRUCTURE_NONZERO: [(usize, usize, usize, f64); 18] = [
    (3, 1, 5, 1.0),
    (1, 2, 6, 1.0),
    (2, 3, 4, 1.0),
    (6, 4, 5, 1.0),
    (4, 5, 6, 1.0),
    (2, 6, 1, 1.0),
    (3, 4, 2, 1.0),
    (1, 5, 3, 1.0),
    (5, 6, 4, 1.0),
    (3, 5, 1, -1.0),
    (1, 6, 2, -1.0),
    (2, 4, 3, -1.0),
    (6, 5, 4, -1.0),
    (4, 6, 5, -1.0),
    (2, 1, 6, -1.0),
    (3, 2, 4, -1.0),
    (1, 3, 5, -1.0),
    (5, 4, 6, -1.0),
];

/// Dense table of the se(3) structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    table: [[[f64; 6]; 6]; 6],
}

impl StructureConstants {
    pub fn new() -> Self {
        let mut table = [[[0.0; 6]; 6]; 6];
        for &(k, i, j, v) in STRUCTURE_NONZERO.iter() {
            table[k - 1][i - 1][j - 1] = v;
        }
        Self { table }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Result<f64> {
        check_index(k)?;
        check_index(i)?;
        check_index(j)?;
        Ok(self.table[k - 1][i - 1][j - 1])
    }

    /// Iterates the nonzero entries, 1-based.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        (0..216).filter_map(move |n| {
            let (k, i, j) = (n / 36, (n / 6) % 6, n % 6);
            let v = self.table[k][i][j];
            (v != 0.0).then_some((k + 1, i + 1, j + 1, v))
        })
    }
}

impl Default for StructureConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// Structure coefficient `C^k_{ij}` (1-based indices).
pub fn structure_constant(k: usize, i: usize, j: usize) -> Result<f64> {
    check_index(k)?;
    check_index(i)?;
    check_index(j)?;
    Ok(STRUCTURE_NONZERO
        .iter()
        .find(|&&(kk, ii, jj, _)| (kk, ii, jj) == (k, i, j))
        .map_or(0.0, |e| e.3))
}
