//! Reference computations the acceptance suite checks the library against.
//! They share no code with the implementations they check.

use std::collections::HashMap;

use microar_core::layout::{compose, AnchorPose, Footprint};
use microar_core::{Aabb, CameraPose, Scene, Transform};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

/// Serializes `v` with shuffled object keys and random whitespace.
pub fn scrambled_json<R: Rng>(v: &Value, rng: &mut R, out: &mut String) {
    const SPACE: [&str; 4] = ["", " ", "\n", "\t  "];
    let ws = |rng: &mut R, out: &mut String| out.push_str(SPACE.choose(rng).unwrap());
    ws(rng, out);
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.shuffle(rng);
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                ws(rng, out);
                out.push_str(&serde_json::to_string(k).unwrap());
                ws(rng, out);
                out.push(':');
                scrambled_json(&map[*k], rng, out);
            }
            ws(rng, out);
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                scrambled_json(item, rng, out);
            }
            ws(rng, out);
            out.push(']');
        }
        other => out.push_str(&serde_json::to_string(other).unwrap()),
    }
    ws(rng, out);
}

/// Rotates `v` by the unit quaternion `(w, x, y, z)` with a sandwich product.
pub fn rotate(q: [f64; 4], v: [f64; 3]) -> [f64; 3] {
    let mul = |a: [f64; 4], b: [f64; 4]| {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    };
    let r = mul(mul(q, [0.0, v[0], v[1], v[2]]), [q[0], -q[1], -q[2], -q[3]]);
    [r[1], r[2], r[3]]
}

/// Orientation whose local -z points from `eye` at `target`.
pub fn look_at(eye: [f64; 3], target: [f64; 3]) -> [f64; 4] {
    let d = [target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]];
    let yaw = (-d[0]).atan2(-d[2]);
    let pitch = d[1].atan2((d[0] * d[0] + d[2] * d[2]).sqrt());
    let (sy, cy) = (yaw / 2.0).sin_cos();
    let (sp, cp) = (pitch / 2.0).sin_cos();
    [cy * cp, cy * sp, sy * cp, -sy * sp]
}

type Quat = [BigInt; 4];

fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        &a[0] * &b[0] - &a[1] * &b[1] - &a[2] * &b[2] - &a[3] * &b[3],
        &a[0] * &b[1] + &a[1] * &b[0] + &a[2] * &b[3] - &a[3] * &b[2],
        &a[0] * &b[2] - &a[1] * &b[3] + &a[2] * &b[0] + &a[3] * &b[1],
        &a[0] * &b[3] + &a[1] * &b[2] - &a[2] * &b[1] + &a[3] * &b[0],
    ]
}

/// Exact plane footprint of one box by projecting its eight corners in
/// arbitrary precision, rounded outward to nanometers.
pub fn footprint_of_box(t: &Transform, b: &Aabb) -> [BigInt; 4] {
    let q: Quat = t.rotation_nano().map(BigInt::from);
    let conj: Quat = [q[0].clone(), -&q[1], -&q[2], -&q[3]];
    let q2: BigInt = q.iter().map(|c| c * c).sum();
    let den = &q2 * 1000;
    let s = BigInt::from(t.scale_ppm());
    let p = t.position_um().map(BigInt::from);
    let (lo, hi) = (b.min_um(), b.max_um());
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for mask in 0..8 {
        let c: [i64; 3] = std::array::from_fn(|j| if mask & (1 << j) == 0 { lo[j] } else { hi[j] });
        let r = qmul(
            &qmul(
                &q,
                &[BigInt::from(0), c[0].into(), c[1].into(), c[2].into()],
            ),
            &conj,
        );
        us.push(&p[0] * 1000 * &den + &s * &r[1]);
        vs.push(&p[2] * 1000 * &den + &s * &r[3]);
    }
    let min = |xs: &[BigInt]| xs.iter().min().unwrap().div_floor(&den);
    let max = |xs: &[BigInt]| -(-xs.iter().max().unwrap()).div_floor(&den);
    [min(&us), min(&vs), max(&us), max(&vs)]
}

pub fn scene_footprint(scene: &Scene, bounds: &HashMap<String, Aabb>) -> Footprint {
    if scene.objects.is_empty() {
        return Footprint::EMPTY;
    }
    let boxes: Vec<[BigInt; 4]> = scene
        .objects
        .iter()
        .map(|o| footprint_of_box(&o.transform, &bounds[o.asset.asset_key()]))
        .collect();
    let pick = |i: usize, take_min: bool| -> i64 {
        let it = boxes.iter().map(|b| b[i].clone());
        let v = if take_min {
            it.min().unwrap()
        } else {
            it.max().unwrap()
        };
        i64::try_from(v).unwrap()
    };
    Footprint {
        min_u_nm: pick(0, true),
        min_v_nm: pick(1, true),
        max_u_nm: pick(2, false),
        max_v_nm: pick(3, false),
    }
}

/// Fraction of an `n` x `n` grid of pixel-center rays that hit any object's
/// bounding sphere. Spheres centered behind the camera are skipped.
pub fn clutter(
    camera: &CameraPose,
    anchor: &AnchorPose,
    scene: &Scene,
    bounds: &HashMap<String, Aabb>,
    n: usize,
) -> f64 {
    let cq = camera.orientation();
    let origin = camera.position();
    let forward = rotate(cq, [0.0, 0.0, -1.0]);
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let spheres: Vec<([f64; 3], f64)> = scene
        .objects
        .iter()
        .filter_map(|o| {
            let b = bounds[o.asset.asset_key()];
            let world = compose(anchor, &o.transform);
            let c = b.center().map(|x| x * world.scale);
            let rc = rotate(world.rotation_array(), c);
            let p = world.position_array();
            let center = [p[0] + rc[0], p[1] + rc[1], p[2] + rc[2]];
            let (lo, hi) = (b.min(), b.max());
            let radius =
                (0..3).map(|j| (hi[j] - lo[j]).powi(2)).sum::<f64>().sqrt() / 2.0 * world.scale;
            (dot(sub(center, origin), forward) > 0.0).then_some((center, radius))
        })
        .collect();
    let ty = (camera.vertical_fov_deg().to_radians() / 2.0).tan();
    let tx = ty * camera.aspect();
    let mut hits = 0;
    for row in 0..n {
        for col in 0..n {
            let sx = (2.0 * col as f64 + 1.0) / n as f64 - 1.0;
            let sy = 1.0 - (2.0 * row as f64 + 1.0) / n as f64;
            let d = rotate(cq, [sx * tx, sy * ty, -1.0]);
            let hit = spheres.iter().any(|&(c, r)| {
                let oc = sub(origin, c);
                let a = dot(d, d);
                let b = 2.0 * dot(oc, d);
                let k = dot(oc, oc) - r * r;
                let disc = b * b - 4.0 * a * k;
                disc >= 0.0 && (-b + disc.sqrt()) / (2.0 * a) >= 0.0
            });
            hits += usize::from(hit);
        }
    }
    hits as f64 / (n * n) as f64
}
