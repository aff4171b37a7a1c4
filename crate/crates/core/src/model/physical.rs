use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Kind of physical surface a plane represents, or a story expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    Floor,
    Table,
    Counter,
    TubEdge,
    Outdoor,
    Any,
}

impl SurfaceClass {
    pub const ALL: [SurfaceClass; 6] = [
        SurfaceClass::Floor,
        SurfaceClass::Table,
        SurfaceClass::Counter,
        SurfaceClass::TubEdge,
        SurfaceClass::Outdoor,
        SurfaceClass::Any,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceClass::Floor => "floor",
            SurfaceClass::Table => "table",
            SurfaceClass::Counter => "counter",
            SurfaceClass::TubEdge => "tub_edge",
            SurfaceClass::Outdoor => "outdoor",
            SurfaceClass::Any => "any",
        }
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurfaceClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ModelError::UnknownSurface(s.to_owned()))
    }
}

/// Rectangular size on a plane, in meters. Both sides strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extents {
    width: f64,
    depth: f64,
}

impl Extents {
    pub fn new(width: f64, depth: f64) -> Result<Self, ModelError> {
        if !width.is_finite() || !depth.is_finite() {
            return Err(ModelError::NonFinite("extents"));
        }
        if width <= 0.0 || depth <= 0.0 {
            return Err(ModelError::NonPositiveExtents);
        }
        Ok(Self { width, depth })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }
}

/// A detected horizontal plane: world origin, yaw about world up, and size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    origin: [f64; 3],
    yaw: f64,
    extents: Extents,
    surface_class: SurfaceClass,
}

impl Plane {
    pub fn new(
        origin: [f64; 3],
        yaw: f64,
        extents: Extents,
        surface_class: SurfaceClass,
    ) -> Result<Self, ModelError> {
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(ModelError::NonFinite("plane origin"));
        }
        if !yaw.is_finite() {
            return Err(ModelError::NonFinite("plane yaw"));
        }
        Ok(Self {
            origin,
            yaw,
            extents,
            surface_class,
        })
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn extents(&self) -> Extents {
        self.extents
    }

    pub fn surface_class(&self) -> SurfaceClass {
        self.surface_class
    }
}

/// Viewer camera: world position, orientation (looking down its local -z,
/// +y up), vertical field of view in degrees and width/height aspect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    position: [f64; 3],
    orientation: [f64; 4],
    vertical_fov_deg: f64,
    aspect: f64,
}

impl CameraPose {
    pub fn new(
        position: [f64; 3],
        orientation: [f64; 4],
        vertical_fov_deg: f64,
        aspect: f64,
    ) -> Result<Self, ModelError> {
        if position
            .iter()
            .chain(orientation.iter())
            .any(|c| !c.is_finite())
            || !vertical_fov_deg.is_finite()
            || !aspect.is_finite()
        {
            return Err(ModelError::NonFinite("camera"));
        }
        let norm = orientation.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(ModelError::ZeroQuaternion);
        }
        if !(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0) {
            return Err(ModelError::FieldOfView);
        }
        if aspect <= 0.0 {
            return Err(ModelError::Aspect);
        }
        Ok(Self {
            position,
            orientation: orientation.map(|c| c / norm),
            vertical_fov_deg,
            aspect,
        })
    }

    pub fn position(&self) -> [f64; 3] {
        self.position
    }

    /// Unit quaternion `(w, x, y, z)`.
    pub fn orientation(&self) -> [f64; 4] {
        self.orientation
    }

    pub fn vertical_fov_deg(&self) -> f64 {
        self.vertical_fov_deg
    }

    pub fn aspect(&self) -> f64 {
        self.aspect
    }
}

const MAX_BOUNDS_UM: i64 = 1_000_000_000;

/// Local axis-aligned bounding box of an asset, on the micrometer grid.
/// Coordinates are limited to 1 km so that exact footprint arithmetic fits
/// in 128-bit integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Aabb {
    min: [i64; 3],
    max: [i64; 3],
}

impl Aabb {
    pub const UNIT_CUBE: Aabb = Aabb {
        min: [-500_000; 3],
        max: [500_000; 3],
    };

    pub fn from_micros(min: [i64; 3], max: [i64; 3]) -> Result<Self, ModelError> {
        if min
            .iter()
            .chain(max.iter())
            .any(|c| c.abs() > MAX_BOUNDS_UM)
        {
            return Err(ModelError::OutOfRange("bounds"));
        }
        if min.iter().zip(max.iter()).any(|(a, b)| a > b) {
            return Err(ModelError::InvertedBounds);
        }
        Ok(Self { min, max })
    }

    pub fn from_meters(min: [f64; 3], max: [f64; 3]) -> Result<Self, ModelError> {
        let q = |v: [f64; 3]| -> Result<[i64; 3], ModelError> {
            let mut out = [0i64; 3];
            for (o, c) in out.iter_mut().zip(v) {
                if !c.is_finite() {
                    return Err(ModelError::NonFinite("bounds"));
                }
                if c.abs() > 1e3 {
                    return Err(ModelError::OutOfRange("bounds"));
                }
                *o = (c * 1e6).round() as i64;
            }
            Ok(out)
        };
        Self::from_micros(q(min)?, q(max)?)
    }

    pub fn min_um(&self) -> [i64; 3] {
        self.min
    }

    pub fn max_um(&self) -> [i64; 3] {
        self.max
    }

    pub fn min(&self) -> [f64; 3] {
        self.min.map(|c| c as f64 / 1e6)
    }

    pub fn max(&self) -> [f64; 3] {
        self.max.map(|c| c as f64 / 1e6)
    }

    pub fn center(&self) -> [f64; 3] {
        let (a, b) = (self.min(), self.max());
        [
            (a[0] + b[0]) / 2.0,
            (a[1] + b[1]) / 2.0,
            (a[2] + b[2]) / 2.0,
        ]
    }

    pub fn half_diagonal(&self) -> f64 {
        let (a, b) = (self.min(), self.max());
        (0..3)
            .map(|i| ((b[i] - a[i]) / 2.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

impl Default for Aabb {
    fn default() -> Self {
        Self::UNIT_CUBE
    }
}
