//! Shared access to the frozen oracle values.

#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde_json::Value;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/oracles.json")
}

pub fn oracles() -> Value {
    let text = std::fs::read_to_string(fixture_path()).expect("oracle fixture present");
    serde_json::from_str(&text).expect("oracle fixture parses")
}

pub fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

pub fn cplx(v: &Value) -> C64 {
    C64::new(num(&v[0]), num(&v[1]))
}

pub fn nums(v: &Value) -> Vec<f64> {
    v.as_array().expect("array").iter().map(num).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
