use nalgebra::{UnitQuaternion, Vector3};
use serde::Serialize;

use super::anchor::{compose, to_unit_quaternion, AnchorPose};
use super::footprint::BoundsSource;
use crate::model::{CameraPose, Scene};

/// Samples per viewport side for [`clutter_ratio`].
pub const CLUTTER_GRID: usize = 64;
/// Ratio above which a scene counts as crowded.
pub const CROWDED_THRESHOLD: f64 = 0.6;

/// Whether the scene is visible, and if not, which way to turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NavigationHint {
    pub in_view: bool,
    /// Unit screen-space direction (x right, y up); present iff not in view.
    pub arrow: Option<[f64; 2]>,
}

fn camera_frame(camera: &CameraPose) -> (Vector3<f64>, UnitQuaternion<f64>) {
    let p = camera.position();
    (
        Vector3::new(p[0], p[1], p[2]),
        to_unit_quaternion(camera.orientation()),
    )
}

fn half_tangents(camera: &CameraPose) -> (f64, f64) {
    let ty = (camera.vertical_fov_deg().to_radians() / 2.0).tan();
    (ty * camera.aspect(), ty)
}

/// Arithmetic mean of the objects' world positions.
pub fn scene_centroid(anchor: &AnchorPose, scene: &Scene) -> Option<[f64; 3]> {
    if scene.objects.is_empty() {
        return None;
    }
    let sum = scene
        .objects
        .iter()
        .map(|o| compose(anchor, &o.transform).position)
        .fold(Vector3::zeros(), |a, b| a + b);
    let c = sum / scene.objects.len() as f64;
    Some([c.x, c.y, c.z])
}

/// Tells a viewer whether `centroid` is inside the camera frustum (boundary
/// inclusive) and otherwise points an on-screen arrow toward it.
pub fn navigation_hint(camera: &CameraPose, centroid: [f64; 3]) -> NavigationHint {
    let (pos, rot) = camera_frame(camera);
    let d = rot.inverse() * (Vector3::new(centroid[0], centroid[1], centroid[2]) - pos);
    let (tx, ty) = half_tangents(camera);
    // Slack absorbs tan() rounding so points exactly on an edge count as inside.
    let depth = -d.z * (1.0 + 1e-12);
    if depth > 0.0 && d.x.abs() <= tx * depth && d.y.abs() <= ty * depth {
        return NavigationHint {
            in_view: true,
            arrow: None,
        };
    }
    let lateral = (d.x * d.x + d.y * d.y).sqrt();
    let arrow = if lateral <= 1e-12 * d.norm() {
        [1.0, 0.0]
    } else {
        [d.x / lateral, d.y / lateral]
    };
    NavigationHint {
        in_view: false,
        arrow: Some(arrow),
    }
}

/// Bounding sphere of a placed object, in camera coordinates.
#[derive(Debug, Clone, Copy)]
struct CameraSphere {
    center: Vector3<f64>,
    radius_sq: f64,
}

/// Fraction of a `CLUTTER_GRID`² sample grid over the viewport whose rays
/// hit at least one object's circumscribed bounding sphere. Objects whose
/// center lies behind the camera are ignored.
pub fn clutter_ratio(
    camera: &CameraPose,
    anchor: &AnchorPose,
    scene: &Scene,
    bounds: &dyn BoundsSource,
) -> f64 {
    let (cam_pos, cam_rot) = camera_frame(camera);
    let to_camera = cam_rot.inverse();
    let spheres: Vec<CameraSphere> = scene
        .objects
        .iter()
        .filter_map(|o| {
            let b = bounds.bounds(&o.asset);
            let world = compose(anchor, &o.transform);
            let c = b.center();
            let center_world =
                world.position + world.rotation * (Vector3::new(c[0], c[1], c[2]) * world.scale);
            let center = to_camera * (center_world - cam_pos);
            let radius = b.half_diagonal() * world.scale;
            (center.z < 0.0).then_some(CameraSphere {
                center,
                radius_sq: radius * radius,
            })
        })
        .collect();
    if spheres.is_empty() {
        return 0.0;
    }

    let (tx, ty) = half_tangents(camera);
    let n = CLUTTER_GRID;
    let mut hits = 0usize;
    for row in 0..n {
        let sy = 1.0 - (row as f64 + 0.5) * 2.0 / n as f64;
        for col in 0..n {
            let sx = (col as f64 + 0.5) * 2.0 / n as f64 - 1.0;
            let dir = Vector3::new(sx * tx, sy * ty, -1.0);
            let dd = dir.dot(&dir);
            let hit = spheres.iter().any(|s| {
                // Closest approach of the ray origin + t*dir (t >= 0) to the center.
                let t = (s.center.dot(&dir) / dd).max(0.0);
                (s.center - dir * t).norm_squared() <= s.radius_sq
            });
            if hit {
                hits += 1;
            }
        }
    }
    hits as f64 / (n * n) as f64
}

pub fn is_crowded(ratio: f64) -> bool {
    ratio > CROWDED_THRESHOLD
}
