use serde::Serialize;

use super::anchor::AnchorPose;
use crate::model::{Aabb, AssetRef, Scene, Transform};

/// Supplies local bounding boxes for assets.
pub trait BoundsSource {
    fn bounds(&self, asset: &AssetRef) -> Aabb;
}

/// Every asset is a unit cube centered on its origin.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitCubeBounds;

impl BoundsSource for UnitCubeBounds {
    fn bounds(&self, _asset: &AssetRef) -> Aabb {
        Aabb::UNIT_CUBE
    }
}

impl<F: Fn(&AssetRef) -> Aabb> BoundsSource for F {
    fn bounds(&self, asset: &AssetRef) -> Aabb {
        self(asset)
    }
}

/// Axis-aligned rectangle on the plane (`u` along local x, `v` along local
/// z), stored in nanometers and rounded outward so it always contains the
/// exact projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Footprint {
    pub min_u_nm: i64,
    pub min_v_nm: i64,
    pub max_u_nm: i64,
    pub max_v_nm: i64,
}

impl Footprint {
    pub const EMPTY: Footprint = Footprint {
        min_u_nm: 0,
        min_v_nm: 0,
        max_u_nm: 0,
        max_v_nm: 0,
    };

    /// `(min_u, min_v, max_u, max_v)` in meters.
    pub fn meters(&self) -> [f64; 4] {
        [self.min_u_nm, self.min_v_nm, self.max_u_nm, self.max_v_nm].map(|c| c as f64 / 1e9)
    }

    pub fn width(&self) -> f64 {
        (self.max_u_nm - self.min_u_nm) as f64 / 1e9
    }

    pub fn depth(&self) -> f64 {
        (self.max_v_nm - self.min_v_nm) as f64 / 1e9
    }

    pub fn union(&self, other: &Footprint) -> Footprint {
        Footprint {
            min_u_nm: self.min_u_nm.min(other.min_u_nm),
            min_v_nm: self.min_v_nm.min(other.min_v_nm),
            max_u_nm: self.max_u_nm.max(other.max_u_nm),
            max_v_nm: self.max_v_nm.max(other.max_v_nm),
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

/// Plane projection of one object's transformed bounding box.
///
/// Computed exactly in integer arithmetic: the quaternion `q` (nano units,
/// not necessarily unit length) defines the rotation `M(q) / |q|^2`, so the
/// extent along `u` is `center_u ± Σ_j |M_0j| * scale * half_j`. Only the
/// final division rounds, outward to the nanometer grid.
pub fn object_footprint(transform: &Transform, bounds: &Aabb) -> Footprint {
    let [w, x, y, z] = transform.rotation_nano().map(i128::from);
    let q2 = w * w + x * x + y * y + z * z;
    let row_u = [
        w * w + x * x - y * y - z * z,
        2 * (x * y - w * z),
        2 * (x * z + w * y),
    ];
    let row_v = [
        2 * (x * z - w * y),
        2 * (y * z + w * x),
        w * w - x * x - y * y + z * z,
    ];
    let s = i128::from(transform.scale_ppm());
    let (lo, hi) = (bounds.min_um(), bounds.max_um());
    let center2: [i128; 3] = std::array::from_fn(|j| i128::from(lo[j]) + i128::from(hi[j]));
    let size: [i128; 3] = std::array::from_fn(|j| i128::from(hi[j]) - i128::from(lo[j]));
    let p = transform.position_um().map(i128::from);

    // Numerators are in units of nm * (2 * |q|^2 * 1e3).
    let den = 2 * q2 * 1000;
    let extent = |row: &[i128; 3], pos_um: i128| -> (i64, i64) {
        let c: i128 = (0..3).map(|j| row[j] * s * center2[j]).sum();
        let h: i128 = (0..3).map(|j| row[j].abs() * s * size[j]).sum();
        let base = pos_um * 1000;
        (
            (base + floor_div(c - h, den)) as i64,
            (base + ceil_div(c + h, den)) as i64,
        )
    };
    let (min_u_nm, max_u_nm) = extent(&row_u, p[0]);
    let (min_v_nm, max_v_nm) = extent(&row_v, p[2]);
    Footprint {
        min_u_nm,
        min_v_nm,
        max_u_nm,
        max_v_nm,
    }
}

/// Smallest plane-local rectangle containing every object's projected box.
/// An empty scene has a zero-area footprint at the origin.
pub fn scene_footprint(scene: &Scene, bounds: &dyn BoundsSource) -> Footprint {
    scene
        .objects
        .iter()
        .map(|o| object_footprint(&o.transform, &bounds.bounds(&o.asset)))
        .reduce(|a, b| a.union(&b))
        .unwrap_or(Footprint::EMPTY)
}

/// Outcome of a fit check. `margin` is the signed minimum clearance to the
/// plane edges in meters (negative when overhanging).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub fits: bool,
    pub margin: f64,
}

/// Footprint corners placed on the plane via the anchor, as `(u, v)`.
pub fn anchored_corners(footprint: &Footprint, anchor: &AnchorPose) -> [[f64; 2]; 4] {
    let [a, b, c, d] = footprint.meters();
    let (sin, cos) = anchor.yaw().sin_cos();
    let [pu, pv] = anchor.position();
    [[a, b], [c, b], [c, d], [a, d]].map(|[u, v]| [pu + cos * u + sin * v, pv - sin * u + cos * v])
}

pub fn fits_on_plane(scene: &Scene, anchor: &AnchorPose, bounds: &dyn BoundsSource) -> FitReport {
    let fp = scene_footprint(scene, bounds);
    let ext = anchor.plane().extents();
    let (hw, hd) = (ext.width() / 2.0, ext.depth() / 2.0);
    let raw = anchored_corners(&fp, anchor)
        .iter()
        .flat_map(|[u, v]| [hw - u, hw + u, hd - v, hd + v])
        .fold(f64::INFINITY, f64::min);
    // Same nanometer grid as the footprint itself.
    let margin = (raw * 1e9).round() / 1e9;
    FitReport {
        fits: margin >= 0.0,
        margin,
    }
}
