#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::de::DeserializeOwned;
use serde::Serialize;

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Runs the `schottky` binary with `args` and extra environment variables.
pub fn schottky(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_schottky"));
    cmd.args(args).env_remove(schottky_cli::THREADS_ENV).env("RUST_LOG", "info");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path
}

/// Parses `bytes` as `T`, re-serializes and parses again; returns whether the
/// two parsed values are equal and the re-serialized text matches the input.
pub fn round_trips<T: Serialize + DeserializeOwned + PartialEq>(bytes: &[u8]) -> Result<T, String> {
    let first: T = serde_json::from_slice(bytes).map_err(|e| format!("parse: {e}"))?;
    let mut again = serde_json::to_vec_pretty(&first).map_err(|e| format!("serialize: {e}"))?;
    again.push(b'\n');
    let second: T = serde_json::from_slice(&again).map_err(|e| format!("reparse: {e}"))?;
    if first != second {
        return Err("reparsed value differs".into());
    }
    if again != bytes {
        return Err("re-serialized text differs".into());
    }
    Ok(first)
}
