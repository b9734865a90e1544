//! Helpers shared by the binary's end-to-end tests: invoking the executable,
//! reading and writing the volume format directly (so the tests do not trust
//! the code under test to parse its own output), and comparing run
//! directories byte for byte.
//!
//! Each test target compiles its own copy, so helpers a target does not use
//! are expected.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// Runs the `hwfr` binary with the given arguments.
pub fn hwfr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwfr"))
        .args(args)
        .output()
        .expect("binary launches")
}

/// Runs the binary and panics (showing stderr) unless it exits 0.
pub fn run_ok(args: &[&str]) {
    let out = hwfr(args);
    assert!(
        out.status.success(),
        "hwfr {:?} exited {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Runs the binary and returns its exit code.
pub fn exit_code(args: &[&str]) -> i32 {
    hwfr(args).status.code().expect("process exits normally")
}

/// Reads a `.hwv` file with an independent parser.
pub fn read_volume(path: &Path) -> ((usize, usize, usize), Vec<f64>) {
    let bytes = fs::read(path).expect("volume file exists");
    assert!(bytes.len() >= 17, "header too short in {}", path.display());
    assert_eq!(&bytes[..4], b"HWV1", "bad magic in {}", path.display());
    assert_eq!(bytes[16], 0x01, "bad element tag in {}", path.display());
    let dim = |i: usize| {
        u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize
    };
    let dims = (dim(0), dim(1), dim(2));
    let values: Vec<f64> = bytes[17..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(values.len(), dims.0 * dims.1 * dims.2);
    (dims, values)
}

/// Writes a `.hwv` file byte by byte, independently of the production writer.
pub fn write_volume(path: &Path, dims: (usize, usize, usize), values: &[f64]) {
    assert_eq!(values.len(), dims.0 * dims.1 * dims.2);
    let mut bytes = Vec::with_capacity(17 + 8 * values.len());
    bytes.extend_from_slice(b"HWV1");
    for d in [dims.0, dims.1, dims.2] {
        bytes.extend_from_slice(&(d as u32).to_le_bytes());
    }
    bytes.push(0x01);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).expect("volume file writes");
}

/// All regular files under `dir`, as paths relative to it, sorted.
pub fn walk_files(dir: &Path) -> Vec<PathBuf> {
    fn go(root: &Path, dir: &Path, acc: &mut Vec<PathBuf>) {
        for entry in fs::read_dir(dir).expect("directory listable") {
            let path = entry.expect("directory entry").path();
            if path.is_dir() {
                go(root, &path, acc);
            } else {
                acc.push(path.strip_prefix(root).expect("under root").to_path_buf());
            }
        }
    }
    let mut acc = Vec::new();
    go(dir, dir, &mut acc);
    acc.sort();
    acc
}

/// Asserts two run directories are byte-identical, except that
/// `resolved_config.json` may differ in its `out` and `threads` fields.
pub fn assert_same_run(a: &Path, b: &Path) {
    let files = walk_files(a);
    assert_eq!(files, walk_files(b), "{} and {} hold different files", a.display(), b.display());
    for rel in files {
        let (fa, fb) = (a.join(&rel), b.join(&rel));
        if rel.file_name().is_some_and(|n| n == "resolved_config.json") {
            let mut ja: serde_json::Value =
                serde_json::from_slice(&fs::read(&fa).unwrap()).expect("valid config JSON");
            let mut jb: serde_json::Value =
                serde_json::from_slice(&fs::read(&fb).unwrap()).expect("valid config JSON");
            for j in [&mut ja, &mut jb] {
                let obj = j.as_object_mut().expect("config is an object");
                obj.remove("out");
                obj.remove("threads");
            }
            assert_eq!(ja, jb, "{} differs beyond out/threads", rel.display());
        } else {
            assert_eq!(
                fs::read(&fa).unwrap(),
                fs::read(&fb).unwrap(),
                "{} differs between {} and {}",
                rel.display(),
                a.display(),
                b.display()
            );
        }
    }
}

/// Parses a JSON file.
pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).expect("JSON file exists")).expect("valid JSON")
}

/// Reads a CSV file as lines of text.
pub fn read_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .expect("text file exists")
        .lines()
        .map(str::to_string)
        .collect()
}
