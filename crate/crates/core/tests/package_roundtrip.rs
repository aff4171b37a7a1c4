use std::io::{Cursor, Read, Write};
use std::time::Instant;

use microar_core::package::{self, PARTS};
use microar_core::synth::random_story;
use microar_core::{decode, encode, story_id};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Serializes `v` with shuffled object keys and random whitespace.
fn scrambled_json(v: &Value, rng: &mut ChaCha8Rng, out: &mut String) {
    const SPACE: [&str; 4] = ["", " ", "\n", "\t  "];
    let ws = |rng: &mut ChaCha8Rng, out: &mut String| out.push_str(SPACE.choose(rng).unwrap());
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

/// Rebuilds a package with scrambled parts in a random order, via the
/// independent `zip` writer.
fn scrambled_package(bytes: &[u8], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut parts: Vec<(&str, String)> = PARTS
        .iter()
        .map(|name| {
            let raw = package::read_part(bytes, name).unwrap();
            let value: Value = serde_json::from_slice(&raw).unwrap();
            let mut text = String::new();
            scrambled_json(&value, rng, &mut text);
            (*name, text)
        })
        .collect();
    parts.shuffle(rng);
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    let opts =
        zip::write::SimpleFileOptions::default().compression_method(zip::CompressionMethod::Stored);
    for (name, text) in parts {
        w.start_file(name, opts).unwrap();
        w.write_all(text.as_bytes()).unwrap();
    }
    w.finish().unwrap().into_inner()
}

#[test]
fn thousand_random_stories_round_trip_exactly() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let story = random_story(&mut rng);
        let bytes = encode(&story).unwrap();
        assert_eq!(decode(&bytes).unwrap(), story);
        assert_eq!(encode(&decode(&bytes).unwrap()).unwrap(), bytes);
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}

#[test]
fn key_order_and_whitespace_never_change_the_id() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        let story = random_story(&mut rng);
        let bytes = encode(&story).unwrap();
        let id = story_id(&story).unwrap();
        let variant = scrambled_package(&bytes, &mut rng);
        assert_ne!(variant, bytes);
        let decoded = decode(&variant).unwrap();
        assert_eq!(decoded, story);
        assert_eq!(story_id(&decoded).unwrap(), id);
        assert!(!package::is_canonical(&variant));
    }
}

#[test]
fn zip_crate_reads_our_archives() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let story = random_story(&mut rng);
    let bytes = encode(&story).unwrap();
    let mut archive = zip::ZipArchive::new(Cursor::new(&bytes)).unwrap();
    assert_eq!(archive.len(), 3);
    for (i, name) in PARTS.iter().enumerate() {
        let mut entry = archive.by_index(i).unwrap();
        assert_eq!(entry.name().unwrap(), *name);
        assert_eq!(entry.compression(), zip::CompressionMethod::Stored);
        let mut data = Vec::new();
        entry.read_to_end(&mut data).unwrap();
        assert_eq!(data, package::read_part(&bytes, name).unwrap());
    }
}

#[test]
fn ten_thousand_distinct_stories_have_distinct_ids() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut ids = std::collections::HashSet::new();
    let mut bodies = std::collections::HashSet::new();
    while bodies.len() < 10_000 {
        let mut story = random_story(&mut rng);
        story.scenes.truncate(1);
        story.scenes[0].objects.truncate(1);
        story.metadata.created_at = rng.gen_range(0..i64::MAX);
        let bytes = encode(&story).unwrap();
        if bodies.insert(bytes.clone()) {
            assert!(ids.insert(microar_core::StoryId::digest(&bytes)));
        }
    }
}

#[test]
fn encoding_is_reproducible_across_calls() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let story = random_story(&mut rng);
    let a = encode(&story).unwrap();
    let b = encode(&story.clone()).unwrap();
    assert_eq!(a, b);
}
