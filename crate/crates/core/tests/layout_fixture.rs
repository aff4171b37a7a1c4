//! Exported `compose` results for other implementations of the layout math.
//! Set `MICROAR_BLESS=1` to rewrite `layout.json` after an intended change.

use std::path::PathBuf;

use microar_core::layout::{compose, AnchorPose};
use microar_core::synth::random_transform;
use microar_core::{Extents, Plane, SurfaceClass, Transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const TOLERANCE: f64 = 1e-9;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn anchor_of(case: &Value) -> AnchorPose {
    let a = &case["anchor"];
    let f = |v: &Value| v.as_f64().unwrap();
    let extents = Extents::new(f(&a["plane_extents"][0]), f(&a["plane_extents"][1])).unwrap();
    let origin = [
        f(&a["plane_origin"][0]),
        f(&a["plane_origin"][1]),
        f(&a["plane_origin"][2]),
    ];
    let plane = Plane::new(origin, f(&a["plane_yaw"]), extents, SurfaceClass::Any).unwrap();
    AnchorPose::new(
        plane,
        [f(&a["position"][0]), f(&a["position"][1])],
        f(&a["yaw"]),
    )
    .unwrap()
}

fn transform_of(case: &Value) -> Transform {
    let t = &case["transform"];
    let ints = |v: &Value| {
        v.as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_i64().unwrap())
            .collect::<Vec<_>>()
    };
    let p = ints(&t["position_um"]);
    let q = ints(&t["rotation_nano"]);
    Transform::from_units(
        [p[0], p[1], p[2]],
        [q[0], q[1], q[2], q[3]],
        t["scale_ppm"].as_i64().unwrap(),
    )
    .unwrap()
}

fn case(anchor: &AnchorPose, t: &Transform) -> Value {
    let plane = anchor.plane();
    let world = compose(anchor, t);
    json!({
        "anchor": {
            "plane_origin": plane.origin(),
            "plane_yaw": plane.yaw(),
            "plane_extents": [plane.extents().width(), plane.extents().depth()],
            "position": anchor.position(),
            "yaw": anchor.yaw(),
        },
        "transform": {
            "position_um": t.position_um(),
            "rotation_nano": t.rotation_nano(),
            "scale_ppm": t.scale_ppm(),
        },
        "world": {
            "position": world.position_array(),
            "rotation": world.rotation_array(),
            "scale": world.scale,
        },
    })
}

fn generate() -> Value {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a_f1);
    let table = Plane::new(
        [0.3, 0.75, -1.2],
        0.4,
        Extents::new(1.2, 0.8).unwrap(),
        SurfaceClass::Table,
    )
    .unwrap();
    let mut cases = vec![
        case(
            &AnchorPose::centered(table),
            &Transform::from_units([0; 3], [1_000_000_000, 0, 0, 0], 1_000_000).unwrap(),
        ),
        case(
            &AnchorPose::new(table, [0.5, -0.3], -1.0).unwrap(),
            &Transform::quantize([0.2, 0.0, -0.1], [1.0, 0.0, 1.0, 0.0], 0.01).unwrap(),
        ),
        case(
            &AnchorPose::centered(table),
            &Transform::quantize([-0.4, 0.1, 0.3], [0.0, 1.0, 0.0, 0.0], 100.0).unwrap(),
        ),
    ];
    for _ in 0..29 {
        let extents = Extents::new(rng.gen_range(0.2..10.0), rng.gen_range(0.2..10.0)).unwrap();
        let origin = [
            rng.gen_range(-50.0..50.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-50.0..50.0),
        ];
        let plane =
            Plane::new(origin, rng.gen_range(-7.0..7.0), extents, SurfaceClass::Any).unwrap();
        let pos = [
            rng.gen_range(-0.5..=0.5) * extents.width(),
            rng.gen_range(-0.5..=0.5) * extents.depth(),
        ];
        let anchor = AnchorPose::new(plane, pos, rng.gen_range(-7.0..7.0)).unwrap();
        cases.push(case(&anchor, &random_transform(&mut rng)));
    }
    json!({ "tolerance": TOLERANCE, "cases": cases })
}

#[test]
fn layout_fixture_matches_compose() {
    let path = fixture("layout.json");
    if std::env::var_os("MICROAR_BLESS").is_some() {
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&generate()).unwrap() + "\n",
        )
        .unwrap();
    }
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let cases = doc["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 32);
    for (i, c) in cases.iter().enumerate() {
        let t = transform_of(c);
        let world = compose(&anchor_of(c), &t);
        let want = |k: &str| {
            c["world"][k]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect::<Vec<_>>()
        };
        for (a, b) in world.position_array().iter().zip(want("position")) {
            assert!((a - b).abs() <= TOLERANCE, "case {i}: position {a} vs {b}");
        }
        for (a, b) in world.rotation_array().iter().zip(want("rotation")) {
            assert!((a - b).abs() <= TOLERANCE, "case {i}: rotation {a} vs {b}");
        }
        assert_eq!(
            world.scale,
            c["world"]["scale"].as_f64().unwrap(),
            "case {i}"
        );
    }
}

/// Structural equality with floats compared to within parsing error.
fn same_numbers(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= 1e-14 * x.abs().max(1.0)
        }
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(x, y)| same_numbers(x, y))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| same_numbers(v, w)))
        }
        _ => a == b,
    }
}

#[test]
fn layout_fixture_inputs_are_current() {
    let doc: Value =
        serde_json::from_slice(&std::fs::read(fixture("layout.json")).unwrap()).unwrap();
    let fresh = generate();
    for (i, (a, b)) in doc["cases"]
        .as_array()
        .unwrap()
        .iter()
        .zip(fresh["cases"].as_array().unwrap())
        .enumerate()
    {
        assert!(
            same_numbers(&a["anchor"], &b["anchor"]),
            "case {i}: {} vs {}",
            a["anchor"],
            b["anchor"]
        );
        assert_eq!(a["transform"], b["transform"], "case {i}");
    }
}
