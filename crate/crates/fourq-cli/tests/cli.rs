// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! End-to-end command tests: JSON round trips, exit codes, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_BIN_EXE_fourq"));
    assert!(p.exists(), "{p:?}");
    p.pop();
    p.push("fourq");
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourq"))
        .args(args)
        .output()
        .expect("spawn")
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fourq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn seed_classify_verdict_pipeline() {
    let _ = bin();
    let dir = tempdir();
    let ghz = dir.join("ghz.json");
    let out = run(&["seed", "GHZ"]);
    assert!(out.status.success());
    std::fs::write(&ghz, &out.stdout).unwrap();

    let out = run(&["classify", ghz.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"family\":\"GHZ\""), "{text}");

    let out = run(&["verdict", ghz.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"in_mes\":true"));
    assert!(text.contains("\"convertible\":true"));
    assert!(text.contains("\"reachable\":false"));
}

#[test]
fn w_fixture_classifies() {
    let dir = tempdir();
    let w = dir.join("w.json");
    let out = run(&["seed", "W"]);
    assert!(out.status.success());
    std::fs::write(&w, &out.stdout).unwrap();
    let out = run(&["classify", w.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"family\":\"W\""), "{text}");
}

#[test]
fn parse_error_exit_code_two() {
    let dir = tempdir();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"amplitudes\": [[1.0, 0.0]]}").unwrap();
    let out = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn no_protocol_exit_code_four() {
    // a Haar-random generic state is isolated
    let dir = tempdir();
    let iso = dir.join("iso.json");
    let out = run(&["random", "--family", "Gabcd_generic", "--rng-seed", "5"]);
    assert!(out.status.success());
    std::fs::write(&iso, &out.stdout).unwrap();
    let out = run(&["protocol", "auto", iso.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{:?}", out);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempdir();
    let st = dir.join("rng.json");
    let a = run(&["random", "--family", "Labc2_generic", "--rng-seed", "11"]);
    let b = run(&["random", "--family", "Labc2_generic", "--rng-seed", "11"]);
    assert_eq!(a.stdout, b.stdout, "random output must be reproducible");
    std::fs::write(&st, &a.stdout).unwrap();
    let r1 = run(&["classify", st.to_str().unwrap()]);
    let r2 = run(&["classify", st.to_str().unwrap()]);
    assert_eq!(r1.stdout, r2.stdout, "classify reports must be byte-identical");
}

#[test]
fn lu_eq_detects_dressed_copy() {
    let dir = tempdir();
    let a = dir.join("a.json");
    let out = run(&["random", "--family", "Gabcd_aacc", "--rng-seed", "3", "--cond", "3"]);
    assert!(out.status.success());
    std::fs::write(&a, &out.stdout).unwrap();
    let out = run(&["lu-eq", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"equivalent\":true"), "{text}");
}

#[test]
fn sep_check_runs() {
    let dir = tempdir();
    let s = dir.join("s.json");
    let t = dir.join("t.json");
    // source: seed; target: single off-diagonal dressing in the same family
    let out = run(&["seed", "Labc2_generic"]);
    std::fs::write(&s, &out.stdout).unwrap();
    let out = run(&["random", "--family", "Labc2_generic", "--rng-seed", "2", "--cond", "2"]);
    std::fs::write(&t, &out.stdout).unwrap();
    let out = run(&["sep-check", s.to_str().unwrap(), t.to_str().unwrap()]);
    assert!(out.status.success(), "{:?}", out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"feasible\""), "{text}");
}
