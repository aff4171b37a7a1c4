use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use crate::model::{ModelError, Plane, Transform};

/// Where a scene is placed: a point and heading on a physical plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorPose {
    plane: Plane,
    position: [f64; 2],
    yaw: f64,
}

impl AnchorPose {
    /// `position` is `(u, v)` in plane-local meters and must lie within the
    /// plane's extents (boundary inclusive).
    pub fn new(plane: Plane, position: [f64; 2], yaw: f64) -> Result<Self, ModelError> {
        if position.iter().any(|c| !c.is_finite()) || !yaw.is_finite() {
            return Err(ModelError::NonFinite("anchor"));
        }
        let ext = plane.extents();
        if position[0].abs() > ext.width() / 2.0 || position[1].abs() > ext.depth() / 2.0 {
            return Err(ModelError::OutOfRange("anchor position"));
        }
        Ok(Self {
            plane,
            position,
            yaw,
        })
    }

    /// Anchor at the plane's center with no extra heading.
    pub fn centered(plane: Plane) -> Self {
        Self {
            plane,
            position: [0.0, 0.0],
            yaw: 0.0,
        }
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn position(&self) -> [f64; 2] {
        self.position
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    /// Rigid motion taking the anchor's local frame to world coordinates.
    pub fn rigid(&self) -> (Vector3<f64>, UnitQuaternion<f64>) {
        let plane_rot = yaw_rotation(self.plane.yaw());
        let o = self.plane.origin();
        let origin = Vector3::new(o[0], o[1], o[2])
            + plane_rot * Vector3::new(self.position[0], 0.0, self.position[1]);
        (origin, plane_rot * yaw_rotation(self.yaw))
    }
}

/// Rotation about +y (the plane normal); positive angles turn +x toward -z.
pub fn yaw_rotation(angle: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), angle)
}

pub(crate) fn to_unit_quaternion(q: [f64; 4]) -> UnitQuaternion<f64> {
    UnitQuaternion::new_normalize(Quaternion::new(q[0], q[1], q[2], q[3]))
}

/// Unquantized pose in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldPose {
    pub position: Vector3<f64>,
    pub rotation: UnitQuaternion<f64>,
    pub scale: f64,
}

impl WorldPose {
    pub fn position_array(&self) -> [f64; 3] {
        [self.position.x, self.position.y, self.position.z]
    }

    /// Quaternion `(w, x, y, z)`.
    pub fn rotation_array(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

/// Places an anchor-relative transform into the world. Scale is unchanged.
pub fn compose(anchor: &AnchorPose, local: &Transform) -> WorldPose {
    let (origin, rot) = anchor.rigid();
    let p = local.position();
    WorldPose {
        position: origin + rot * Vector3::new(p[0], p[1], p[2]),
        rotation: rot * to_unit_quaternion(local.rotation()),
        scale: local.scale(),
    }
}

/// Inverse of [`compose`]: expresses a world pose relative to the anchor and
/// quantizes it.
pub fn relative_to(anchor: &AnchorPose, world: &WorldPose) -> Result<Transform, ModelError> {
    let (origin, rot) = anchor.rigid();
    let inv = rot.inverse();
    let p = inv * (world.position - origin);
    let q = (inv * world.rotation).into_inner();
    Transform::quantize([p.x, p.y, p.z], [q.w, q.i, q.j, q.k], world.scale)
}
