#![allow(dead_code)]

use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use microar_server::{serve, Config, Store};
use serde_json::Value;
use tempfile::TempDir;
use tokio::runtime::Runtime;

/// Repository service on a loopback port, backed by a temporary directory.
pub struct TestServer {
    pub url: String,
    pub dir: TempDir,
    runtime: Option<Runtime>,
}

impl TestServer {
    pub fn start() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let runtime = Runtime::new().unwrap();
        let store = Arc::new(Store::open(dir.path()).unwrap());
        let mut config = Config::from_lookup(|_| None).unwrap();
        config.request_log = false;
        let listener = runtime
            .block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))
            .unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        runtime.spawn(async move {
            serve(listener, store, &config, std::future::pending())
                .await
                .unwrap();
        });
        Self {
            url,
            dir,
            runtime: Some(runtime),
        }
    }
}

impl Drop for TestServer {
    fn drop(&mut self) {
        if let Some(rt) = self.runtime.take() {
            rt.shutdown_background();
        }
    }
}

/// Result of one `microar` invocation.
#[derive(Debug)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn last_line(&self) -> &str {
        self.stdout.lines().last().unwrap_or("")
    }

    /// The machine-readable error report on the final stderr line.
    pub fn error(&self) -> Value {
        let line = self.stderr.lines().last().unwrap_or("");
        serde_json::from_str::<Value>(line).unwrap_or_else(|e| panic!("{line:?} is not JSON: {e}"))
            ["error"]
            .clone()
    }

    pub fn ok(self) -> Self {
        assert_eq!(
            self.code, 0,
            "microar failed: {}{}",
            self.stdout, self.stderr
        );
        self
    }
}

pub fn microar(server: &str, cwd: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_microar"))
        .args(args)
        .env("MICROAR_SERVER", server)
        .env_remove("MICROAR_CATALOG")
        .current_dir(cwd)
        .output()
        .expect("microar runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Five scenes in the spirit of the study's "don_quixote".
pub const FIVE_SCENES: &str = "\
metadata:
  creator: P5
  title: don_quixote
  description: A knight mistakes a windmill for a giant.
  created_at: 1593561600
  placement_hints:
    surface: table
    min_extents: [0.8, 0.6]
    note: needs some room
scenes:
  - label: ride
    objects:
      - label: knight
        asset: knight
        dialog: To the moon!
      - label: horse
        asset: horse
        position: [0.8, 0, 0]
  - label: sighting
    objects:
      - label: windmill
        asset: windmill
        position: [0, 0, -3]
        scale: 0.2
      - label: knight
        asset: knight
        dialog: Watch out!
  - label: charge
    objects:
      - label: knight
        asset: knight
        position: [0.5, 0, -1]
        rotation: {yaw: 30}
        dialog: Raawr
  - label: crash
    objects:
      - label: windmill
        asset: windmill
        scale: 0.2
        dialog: Boom!
      - label: knight
        asset: knight
        position: [0.2, 0, 0.4]
        rotation: {quaternion: [0.7071067811865476, 0.7071067811865476, 0, 0]}
  - label: end
    objects:
      - label: knight
        asset: knight
        dialog: The end.
";

pub const ADD_SCENE: &str = "\
metadata:
  creator: P14
  created_at: 1593650000
  title: remix_don_quixote
add_scenes:
  - label: robot cat
    objects:
      - asset: robot cat
        dialog: Meow
";
