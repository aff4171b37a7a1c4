use serde::{Deserialize, Serialize};

use super::anchor::{to_unit_quaternion, yaw_rotation};
use crate::model::{ModelError, Transform};

/// Touch edits on a placed object, in plane-local terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gesture {
    /// Drag: move along the plane.
    Translate { du: f64, dv: f64 },
    /// Twist: turn about the plane normal.
    RotateYaw { radians: f64 },
    /// Pinch: multiply the scale; the result is clamped to `[0.01, 100]`.
    Scale { factor: f64 },
    /// Two-finger drag: raise or lower along the normal.
    Elevate { dy: f64 },
}

pub fn apply_gesture(t: &Transform, g: Gesture) -> Result<Transform, ModelError> {
    let mut p = t.position();
    let mut q = t.rotation();
    let mut s = t.scale();
    match g {
        Gesture::Translate { du, dv } => {
            if !du.is_finite() || !dv.is_finite() {
                return Err(ModelError::NonFinite("gesture"));
            }
            p[0] += du;
            p[2] += dv;
        }
        Gesture::RotateYaw { radians } => {
            if !radians.is_finite() {
                return Err(ModelError::NonFinite("gesture"));
            }
            let r = (yaw_rotation(radians) * to_unit_quaternion(q)).into_inner();
            q = [r.w, r.i, r.j, r.k];
        }
        Gesture::Scale { factor } => {
            if !factor.is_finite() {
                return Err(ModelError::NonFinite("gesture"));
            }
            if factor <= 0.0 {
                return Err(ModelError::NonPositiveScale);
            }
            s *= factor;
        }
        Gesture::Elevate { dy } => {
            if !dy.is_finite() {
                return Err(ModelError::NonFinite("gesture"));
            }
            p[1] += dy;
        }
    }
    Transform::quantize(p, q, s)
}
