use std::collections::HashMap;

use microar_core::layout::{
    anchored_corners, clutter_ratio, compose, fits_on_plane, relative_to, scene_footprint,
    AnchorPose, Footprint, UnitCubeBounds,
};
use microar_core::synth::random_transform;
use microar_core::{
    Aabb, AssetRef, CameraPose, Extents, ObjectId, PlacedObject, Plane, Scene, SceneId,
    SurfaceClass, Transform,
};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_plane(rng: &mut ChaCha8Rng) -> Plane {
    let origin = [
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-50.0..50.0),
    ];
    let extents = Extents::new(rng.gen_range(0.2..10.0), rng.gen_range(0.2..10.0)).unwrap();
    Plane::new(origin, rng.gen_range(-7.0..7.0), extents, SurfaceClass::Any).unwrap()
}

fn random_anchor(rng: &mut ChaCha8Rng) -> AnchorPose {
    let plane = random_plane(rng);
    let e = plane.extents();
    let pos = [
        rng.gen_range(-0.5..=0.5) * e.width(),
        rng.gen_range(-0.5..=0.5) * e.depth(),
    ];
    AnchorPose::new(plane, pos, rng.gen_range(-7.0..7.0)).unwrap()
}

// ---- compose / relative_to -------------------------------------------------

#[test]
fn relative_to_inverts_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let anchor = random_anchor(&mut rng);
        let t = random_transform(&mut rng);
        let back = relative_to(&anchor, &compose(&anchor, &t)).unwrap();
        for (a, b) in t.position().iter().zip(back.position()) {
            assert!((a - b).abs() <= 1e-6, "{t:?} vs {back:?}");
        }
        for (a, b) in t.rotation().iter().zip(back.rotation()) {
            assert!((a - b).abs() <= 1e-9 + 1e-15, "{t:?} vs {back:?}");
        }
        assert_eq!(t.scale_ppm(), back.scale_ppm());
    }
}

/// Rotates `v` by the unit quaternion `q = (w, x, y, z)` with an explicit
/// sandwich product, independent of the library's quaternion type.
fn rotate(q: [f64; 4], v: [f64; 3]) -> [f64; 3] {
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

fn yaw_quat(angle: f64) -> [f64; 4] {
    [(angle / 2.0).cos(), 0.0, (angle / 2.0).sin(), 0.0]
}

#[test]
fn compose_matches_hand_rolled_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let anchor = random_anchor(&mut rng);
        let t = random_transform(&mut rng);
        let world = compose(&anchor, &t);
        let plane = anchor.plane();
        let o = plane.origin();
        let [u, v] = anchor.position();
        let pr = yaw_quat(plane.yaw());
        let ar = yaw_quat(anchor.yaw());
        let anchor_origin = rotate(pr, [u, 0.0, v]);
        let local = rotate(pr, rotate(ar, t.position()));
        let expected: Vec<f64> = (0..3).map(|i| o[i] + anchor_origin[i] + local[i]).collect();
        let scale = t.position().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in world.position_array().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
        }
    }
}

// ---- footprint -------------------------------------------------------------

type Quat = [BigInt; 4];

fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        &a[0] * &b[0] - &a[1] * &b[1] - &a[2] * &b[2] - &a[3] * &b[3],
        &a[0] * &b[1] + &a[1] * &b[0] + &a[2] * &b[3] - &a[3] * &b[2],
        &a[0] * &b[2] - &a[1] * &b[3] + &a[2] * &b[0] + &a[3] * &b[1],
        &a[0] * &b[3] + &a[1] * &b[2] - &a[2] * &b[1] + &a[3] * &b[0],
    ]
}

/// Exact footprint by projecting all eight box corners. A corner `c` (µm)
/// maps to `p + s * (q c q*) / |q|^2` with `s = scale_ppm / 1e6`; in
/// nanometers the coordinate is `N / D` with `D = 1000 |q|^2`.
fn oracle_object(t: &Transform, b: &Aabb) -> [BigInt; 4] {
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
    let max = |xs: &[BigInt]| {
        let m = xs.iter().max().unwrap();
        -(-m).div_floor(&den)
    };
    [min(&us), min(&vs), max(&us), max(&vs)]
}

fn oracle_scene(scene: &Scene, bounds: &HashMap<String, Aabb>) -> Footprint {
    if scene.objects.is_empty() {
        return Footprint::EMPTY;
    }
    let boxes: Vec<[BigInt; 4]> = scene
        .objects
        .iter()
        .map(|o| oracle_object(&o.transform, &bounds[o.asset.asset_key()]))
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

fn random_box(rng: &mut ChaCha8Rng) -> Aabb {
    let min: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-3_000_000..3_000_000));
    let max: [i64; 3] = std::array::from_fn(|j| min[j] + rng.gen_range(0..4_000_000));
    Aabb::from_micros(min, max).unwrap()
}

fn random_scene(
    rng: &mut ChaCha8Rng,
    max_objects: usize,
    bounds: &mut HashMap<String, Aabb>,
) -> Scene {
    let mut scene = Scene::new(SceneId::random(rng), 0);
    for i in 0..rng.gen_range(0..=max_objects) {
        let key = format!("box{}-{i}", bounds.len());
        bounds.insert(key.clone(), random_box(rng));
        scene.objects.push(PlacedObject {
            object_id: ObjectId::random(rng),
            asset: AssetRef::new(key, "box").unwrap(),
            transform: random_transform(rng),
            group_id: None,
            dialog: None,
        });
    }
    scene
}

#[test]
fn scene_footprint_equals_corner_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let mut bounds = HashMap::new();
        let scene = random_scene(&mut rng, 10, &mut bounds);
        let lookup = |a: &AssetRef| bounds[a.asset_key()];
        assert_eq!(
            scene_footprint(&scene, &lookup),
            oracle_scene(&scene, &bounds)
        );
    }
}

#[test]
fn fit_check_agrees_with_corner_containment() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = [0usize; 2];
    for _ in 0..2000 {
        let plane = Plane::new(
            [0.0; 3],
            0.0,
            Extents::new(rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0)).unwrap(),
            SurfaceClass::Table,
        )
        .unwrap();
        let e = plane.extents();
        let anchor = AnchorPose::new(
            plane,
            [
                rng.gen_range(-0.4..0.4) * e.width(),
                rng.gen_range(-0.4..0.4) * e.depth(),
            ],
            rng.gen_range(-4.0..4.0),
        )
        .unwrap();
        let mut scene = Scene::new(SceneId::from_u128(1), 0);
        for i in 0..rng.gen_range(1..4) {
            let t = Transform::quantize(
                [rng.gen_range(-0.6..0.6), 0.0, rng.gen_range(-0.6..0.6)],
                [1.0, 0.0, rng.gen_range(-1.0..1.0), 0.0],
                rng.gen_range(0.1..1.0),
            )
            .unwrap();
            scene.objects.push(PlacedObject {
                object_id: ObjectId::from_u128(i),
                asset: AssetRef::new("cube", "cube").unwrap(),
                transform: t,
                group_id: None,
                dialog: None,
            });
        }
        let report = fits_on_plane(&scene, &anchor, &UnitCubeBounds);
        let corners = anchored_corners(&scene_footprint(&scene, &UnitCubeBounds), &anchor);
        let (hw, hd) = (e.width() / 2.0, e.depth() / 2.0);
        let slack = 1e-9;
        let inside = corners
            .iter()
            .all(|[u, v]| u.abs() <= hw + slack && v.abs() <= hd + slack);
        let clearly_inside = corners
            .iter()
            .all(|[u, v]| u.abs() <= hw - slack && v.abs() <= hd - slack);
        if clearly_inside {
            assert!(report.fits);
        }
        if !inside {
            assert!(!report.fits);
        }
        assert_eq!(report.fits, report.margin >= 0.0);
        checked[usize::from(report.fits)] += 1;
    }
    assert!(checked[0] > 100 && checked[1] > 100, "{checked:?}");
}

// ---- clutter ---------------------------------------------------------------

/// Independent raycast: for each pixel-center sample, cast a world-space ray
/// and solve the ray/sphere quadratic against every object's bounding sphere.
fn oracle_clutter(
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
            let lo = b.min();
            let hi = b.max();
            let diag = (0..3).map(|j| (hi[j] - lo[j]).powi(2)).sum::<f64>().sqrt() / 2.0;
            (dot(sub(center, origin), forward) > 0.0).then_some((center, diag * world.scale))
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

fn look_at(eye: [f64; 3], target: [f64; 3]) -> [f64; 4] {
    // Yaw then pitch so that local -z points at the target.
    let d = [target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]];
    let yaw = (-d[0]).atan2(-d[2]);
    let pitch = d[1].atan2((d[0] * d[0] + d[2] * d[2]).sqrt());
    let (sy, cy) = (yaw / 2.0).sin_cos();
    let (sp, cp) = (pitch / 2.0).sin_cos();
    // q = yaw(about y) * pitch(about x)
    [cy * cp, cy * sp, sy * cp, -sy * sp]
}

#[test]
fn look_at_points_forward_at_target() {
    let eye = [1.0, 2.0, 3.0];
    let target = [-2.0, 0.5, 0.0];
    let f = rotate(look_at(eye, target), [0.0, 0.0, -1.0]);
    let d = [target[0] - eye[0], target[1] - eye[1], target[2] - eye[2]];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    for i in 0..3 {
        assert!((f[i] - d[i] / n).abs() < 1e-12);
    }
}

#[test]
fn clutter_matches_raycast_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut nontrivial = 0;
    for _ in 0..50 {
        let plane = Plane::new(
            [0.0; 3],
            rng.gen_range(-3.0..3.0),
            Extents::new(3.0, 3.0).unwrap(),
            SurfaceClass::Floor,
        )
        .unwrap();
        let anchor = AnchorPose::centered(plane);
        let mut bounds = HashMap::new();
        let mut scene = Scene::new(SceneId::from_u128(1), 0);
        for i in 0..rng.gen_range(0..=10) {
            let key = format!("k{i}");
            bounds.insert(key.clone(), random_box(&mut rng));
            let t = Transform::quantize(
                [
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(0.0..0.5),
                    rng.gen_range(-1.5..1.5),
                ],
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    1.0,
                ],
                rng.gen_range(0.02..0.3),
            )
            .unwrap();
            scene.objects.push(PlacedObject {
                object_id: ObjectId::from_u128(i),
                asset: AssetRef::new(key, "box").unwrap(),
                transform: t,
                group_id: None,
                dialog: None,
            });
        }
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let dist = rng.gen_range(1.0..6.0);
        let eye = [
            dist * angle.cos(),
            rng.gen_range(0.3..3.0),
            dist * angle.sin(),
        ];
        let target = [rng.gen_range(-0.5..0.5), 0.0, rng.gen_range(-0.5..0.5)];
        let camera = CameraPose::new(
            eye,
            look_at(eye, target),
            rng.gen_range(40.0..90.0),
            rng.gen_range(0.5..2.0),
        )
        .unwrap();
        let lookup = |a: &AssetRef| bounds[a.asset_key()];
        let got = clutter_ratio(&camera, &anchor, &scene, &lookup);
        let want = oracle_clutter(&camera, &anchor, &scene, &bounds, 64);
        assert!((got - want).abs() <= 1.0 / 4096.0, "{got} vs {want}");
        if got > 0.0 && got < 1.0 {
            nontrivial += 1;
        }
    }
    assert!(
        nontrivial >= 20,
        "only {nontrivial} scenes were partially covered"
    );
}

#[test]
fn clutter_extremes() {
    let plane = Plane::new(
        [0.0; 3],
        0.0,
        Extents::new(2.0, 2.0).unwrap(),
        SurfaceClass::Table,
    )
    .unwrap();
    let anchor = AnchorPose::centered(plane);
    let camera = CameraPose::new(
        [0.0, 1.0, 2.0],
        look_at([0.0, 1.0, 2.0], [0.0, 0.0, 0.0]),
        60.0,
        1.0,
    )
    .unwrap();
    let empty = Scene::new(SceneId::from_u128(1), 0);
    assert_eq!(
        clutter_ratio(&camera, &anchor, &empty, &UnitCubeBounds),
        0.0
    );

    let mut enclosing = empty.clone();
    enclosing.objects.push(PlacedObject {
        object_id: ObjectId::from_u128(1),
        asset: AssetRef::new("cube", "cube").unwrap(),
        transform: Transform::quantize([0.0; 3], [1.0, 0.0, 0.0, 0.0], 100.0).unwrap(),
        group_id: None,
        dialog: None,
    });
    assert_eq!(
        clutter_ratio(&camera, &anchor, &enclosing, &UnitCubeBounds),
        1.0
    );
}
