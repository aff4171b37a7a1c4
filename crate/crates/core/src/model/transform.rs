use serde::{Deserialize, Serialize};

use super::ModelError;

/// Grid steps per meter for positions and offsets (micrometers).
pub const POSITION_STEPS_PER_METER: f64 = 1e6;
/// Grid steps per unit for scale factors (parts per million).
pub const SCALE_STEPS_PER_UNIT: f64 = 1e6;
/// Grid steps per unit for quaternion components (nano-units).
pub const ROTATION_STEPS_PER_UNIT: f64 = 1e9;

pub const MIN_SCALE: f64 = 0.01;
pub const MAX_SCALE: f64 = 100.0;
const MIN_SCALE_PPM: i64 = 10_000;
const MAX_SCALE_PPM: i64 = 100_000_000;

/// Largest representable coordinate magnitude, in meters.
pub const MAX_COORDINATE_M: f64 = 1e6;
const MAX_COORDINATE_UM: i64 = 1_000_000_000_000;

const ONE_NANO: i128 = 1_000_000_000;

/// A 3-vector stored on the micrometer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MicroVec3([i64; 3]);

impl MicroVec3 {
    pub const ZERO: MicroVec3 = MicroVec3([0; 3]);

    /// Rounds a meter-valued vector to the nearest micrometer.
    pub fn from_meters(v: [f64; 3]) -> Result<Self, ModelError> {
        let mut out = [0i64; 3];
        for (o, &c) in out.iter_mut().zip(v.iter()) {
            if !c.is_finite() {
                return Err(ModelError::NonFinite("position"));
            }
            if c.abs() > MAX_COORDINATE_M {
                return Err(ModelError::OutOfRange("position"));
            }
            *o = (c * POSITION_STEPS_PER_METER).round() as i64;
        }
        Ok(Self(out))
    }

    pub fn from_micros(v: [i64; 3]) -> Result<Self, ModelError> {
        if v.iter().any(|c| c.abs() > MAX_COORDINATE_UM) {
            return Err(ModelError::OutOfRange("position"));
        }
        Ok(Self(v))
    }

    pub fn micros(&self) -> [i64; 3] {
        self.0
    }

    pub fn meters(&self) -> [f64; 3] {
        self.0.map(|c| c as f64 / POSITION_STEPS_PER_METER)
    }
}

/// Plane-local pose of a placed object: position (x right, y along the plane
/// normal, z forward), unit quaternion `(w, x, y, z)` and uniform scale.
///
/// Components live on fixed integer grids so equality is exact and encoding is
/// lossless. Instances are only obtainable through [`Transform::quantize`] or
/// [`Transform::from_units`], both of which enforce the invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transform {
    position: MicroVec3,
    rotation: [i64; 4],
    scale_ppm: i64,
}

impl Default for Transform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        position: MicroVec3::ZERO,
        rotation: [ONE_NANO as i64, 0, 0, 0],
        scale_ppm: 1_000_000,
    };

    /// Builds a transform from raw floating-point components.
    ///
    /// The quaternion is renormalized and rounded to the nano grid, the
    /// position to micrometers and the scale (clamped to `[0.01, 100]`) to
    /// parts per million. Quantizing an already quantized transform returns it
    /// unchanged.
    pub fn quantize(
        position: [f64; 3],
        rotation: [f64; 4],
        scale: f64,
    ) -> Result<Self, ModelError> {
        if !scale.is_finite() {
            return Err(ModelError::NonFinite("scale"));
        }
        if scale <= 0.0 {
            return Err(ModelError::NonPositiveScale);
        }
        let position = MicroVec3::from_meters(position)?;
        let rotation = quantize_rotation(rotation)?;
        let scale_ppm = quantize_scale(scale);
        Ok(Self {
            position,
            rotation,
            scale_ppm,
        })
    }

    /// Builds a transform from grid units, rejecting values that break the
    /// invariants instead of repairing them.
    pub fn from_units(
        position_um: [i64; 3],
        rotation_nano: [i64; 4],
        scale_ppm: i64,
    ) -> Result<Self, ModelError> {
        let position = MicroVec3::from_micros(position_um)?;
        if !(MIN_SCALE_PPM..=MAX_SCALE_PPM).contains(&scale_ppm) {
            return Err(ModelError::ScaleRange);
        }
        if !is_unit_on_grid(&rotation_nano) {
            return Err(ModelError::NotUnitQuaternion);
        }
        Ok(Self {
            position,
            rotation: rotation_nano,
            scale_ppm,
        })
    }

    pub fn from_position(position: [f64; 3]) -> Result<Self, ModelError> {
        Self::quantize(position, [1.0, 0.0, 0.0, 0.0], 1.0)
    }

    pub fn position(&self) -> [f64; 3] {
        self.position.meters()
    }

    pub fn position_um(&self) -> [i64; 3] {
        self.position.micros()
    }

    /// Quaternion `(w, x, y, z)`.
    pub fn rotation(&self) -> [f64; 4] {
        self.rotation.map(|c| c as f64 / ROTATION_STEPS_PER_UNIT)
    }

    pub fn rotation_nano(&self) -> [i64; 4] {
        self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale_ppm as f64 / SCALE_STEPS_PER_UNIT
    }

    pub fn scale_ppm(&self) -> i64 {
        self.scale_ppm
    }

    /// `|q| - 1` computed in f64.
    pub fn rotation_norm_error(&self) -> f64 {
        let q = self.rotation();
        (q.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0).abs()
    }
}

fn quantize_scale(scale: f64) -> i64 {
    let s = scale.clamp(MIN_SCALE, MAX_SCALE);
    ((s * SCALE_STEPS_PER_UNIT).round() as i64).clamp(MIN_SCALE_PPM, MAX_SCALE_PPM)
}

/// `|q|` within one nano-unit of 1, checked in exact integer arithmetic.
fn is_unit_on_grid(q: &[i64; 4]) -> bool {
    let sq: i128 = q.iter().map(|&c| (c as i128) * (c as i128)).sum();
    let lo = (ONE_NANO - 1) * (ONE_NANO - 1);
    let hi = (ONE_NANO + 1) * (ONE_NANO + 1);
    (lo..=hi).contains(&sq)
}

/// Normalize then round to the nano grid, choosing the hemisphere with a
/// positive leading component.
fn normalize_and_round(q: [f64; 4]) -> Option<[i64; 4]> {
    let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !norm.is_finite() || norm <= 0.0 {
        return None;
    }
    let mut r = q.map(|c| (c / norm * ROTATION_STEPS_PER_UNIT).round() as i64);
    let leading = r.iter().copied().find(|&c| c != 0).unwrap_or(0);
    if leading < 0 {
        r = r.map(|c| -c);
    }
    Some(r)
}

fn quantize_rotation(q: [f64; 4]) -> Result<[i64; 4], ModelError> {
    if q.iter().any(|c| !c.is_finite()) {
        return Err(ModelError::NonFinite("rotation"));
    }
    let mut current = normalize_and_round(q).ok_or(ModelError::ZeroQuaternion)?;
    // Iterate to a fixpoint of the rounding map so that quantizing the
    // result again reproduces it exactly.
    for _ in 0..32 {
        let as_float = current.map(|c| c as f64 / ROTATION_STEPS_PER_UNIT);
        let next = normalize_and_round(as_float).ok_or(ModelError::ZeroQuaternion)?;
        if next == current {
            return Ok(current);
        }
        current = next;
    }
    Ok(current)
}
