use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use tempfile::TempDir;

const V3: &str = r#"{"n":2,"k":3,"monomials":[{"c":[0.5,0],"e":[2,1]},{"c":[2.6666666666666665,0],"e":[0,3]}]}"#;
const Q5: &str = r#"{"n":2,"k":5,"monomials":[{"c":[1,0],"e":[5,0]}]}"#;

fn relint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relint"))
        .args(args)
        .env_remove("RELINT_THREADS")
        .output()
        .expect("spawn relint")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn v3_is_obstructed_and_cites_one_eighth() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v3.json", V3);
    let o = relint(&["check", "--potential", s(&f), "--explain"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["verdict"], "CannotBeIntegrable");
    assert!(doc["explanation"].as_str().unwrap().contains("1/8"));
    let exact: Vec<&str> = doc["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|e| e["exact"].as_str())
        .collect();
    assert!(exact.contains(&"1/8") && exact.contains(&"15"));
    assert!(doc["eigenvalues"][0]["diagnostics"]["classical"].is_array());
}

#[test]
fn q1_fifth_passes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "q5.json", Q5);
    let o = relint(&["check", "--potential", s(&f), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PassesNecessaryConditions"));
}

#[test]
fn empty_monomial_list_is_an_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.json", r#"{"n":2,"k":3,"monomials":[]}"#);
    let o = relint(&["check", "--potential", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn jset_lists_degree_three_elements() {
    let o = relint(&["jset", "--k", "3", "--count", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "{0, 1, 5, 40, 176, 1365, 5985}");
}

#[test]
fn jscan_counts_nine_integers() {
    let o = relint(&["jscan", "--k", "4", "--pbound", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn poincare_smoke_has_crossings_for_every_orbit() {
    let o = relint(&["poincare", "--preset", "henon-heiles-b-rel", "--tend", "200", "--orbits", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("orbit_id,crossing_index,t,q2,p2,energy,casimir_drift"));
    let mut seen = [0usize; 4];
    for l in lines {
        let id: usize = l.split(',').next().unwrap().parse().unwrap();
        seen[id] += 1;
    }
    assert!(seen.iter().all(|&n| n >= 1), "{seen:?}");
}

#[test]
fn poincare_from_potential_file_with_flags() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "osc.json",
        r#"{"kind":"polynomial","n":2,"terms":[{"c":0.5,"e":[2,0]},{"c":0.5,"e":[0,2]}]}"#,
    );
    let o = relint(&[
        "poincare", "--potential", s(&f), "--kinetic", "classical", "--energy", "0.5", "--seed-range", "-0.9,0.9",
        "--tend", "50", "--orbits", "2", "--format", "svg",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("<svg"));
}

#[test]
fn manifest_replay_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let runs: [(&str, Vec<&str>); 3] = [
        ("sec.csv", vec!["poincare", "--preset", "kepler-rel", "--tend", "100", "--orbits", "3"]),
        ("sim.json", vec!["simulate", "--preset", "oscillator-classical", "--tend", "5", "--format", "json"]),
        ("j.csv", vec!["jset", "--k", "-5", "--count", "6", "--format", "csv"]),
    ];
    for (name, args) in runs {
        let out = dir.path().join(name);
        let mut full = args.clone();
        full.extend(["--out", s(&out)]);
        assert_eq!(relint(&full).status.code(), Some(0));
        let manifest = format!("{}.manifest.json", s(&out));
        let replayed = dir.path().join(format!("replay-{name}"));
        let o = relint(&["replay", &manifest, "--out", s(&replayed)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&replayed).unwrap(), "{name}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["poincare", "--preset", "henon-heiles-a-rel", "--tend", "100", "--orbits", "4"];
    let one = Command::new(env!("CARGO_BIN_EXE_relint"))
        .args(args)
        .env("RELINT_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_relint"))
        .args(args)
        .env("RELINT_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn bad_flags_and_formats_exit_two() {
    assert_eq!(relint(&["jset", "--k", "3", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(relint(&["jset", "--k", "0"]).status.code(), Some(2));
    assert_eq!(relint(&["poincare", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(relint(&["poincare", "--preset", "kepler-rel", "--rtol", "0"]).status.code(), Some(2));
    assert_eq!(relint(&["check", "--potential", "/nonexistent/v.json"]).status.code(), Some(2));
    assert_eq!(relint(&["frobnicate"]).status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Any corruption of a valid file either still parses (and then gives a
    // verdict, exit 0 or 1) or is rejected with exit 2; never a crash.
    #[test]
    fn corrupted_potential_files_honor_exit_contract(cut in 0usize..V3.len(), byte in any::<u8>(), mode in 0u8..3) {
        let mut bytes = V3.as_bytes().to_vec();
        match mode {
            0 => bytes.truncate(cut),
            1 => bytes[cut] = byte,
            _ => bytes.insert(cut, byte),
        }
        let dir = TempDir::new().unwrap();
        let p = dir.path().join("v.json");
        std::fs::write(&p, &bytes).unwrap();
        let o = relint(&["check", "--potential", s(&p)]);
        let code = o.status.code();
        prop_assert!(matches!(code, Some(0) | Some(1) | Some(2)), "{code:?}");
        if code == Some(2) {
            prop_assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
        }
    }
}
