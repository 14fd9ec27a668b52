use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fermient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermient"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn reports(o: &Output) -> Vec<Value> {
    json_lines(o)
        .into_iter()
        .filter(|v| v["record"] == "report")
        .map(|v| v["report"].clone())
        .collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn amplitude_lines(text: &str) -> Vec<(usize, f64, f64)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn yang_state_file_has_three_equal_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.fs");
    let o = fermient(&["state", "yang", "--m", "3", "--n", "2", "-o", path_str(&y)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("support 3"));
    let text = std::fs::read_to_string(&y).unwrap();
    assert!(text.starts_with("fermistate 6 4\n"));
    assert!(text.contains("# tolerances "));
    let amps = amplitude_lines(&text);
    assert_eq!(amps.len(), 3);
    for (_, re, im) in amps {
        assert!((re - 1.0 / 3f64.sqrt()).abs() < 1e-15 && im == 0.0);
    }
}

#[test]
fn slater_file_has_one_amplitude() {
    let o = fermient(&["state", "slater", "--M", "6", "--occ", "0,1,2,3"]);
    assert!(o.status.success());
    let amps = amplitude_lines(&stdout(&o));
    assert_eq!(amps, vec![(0, 1.0, 0.0)]);
}

#[test]
fn random_states_are_byte_identical() {
    let a = fermient(&["state", "random", "--M", "5", "--N", "3", "--seed", "7"]);
    let b = fermient(&["state", "random", "--M", "5", "--N", "3", "--seed", "7"]);
    let c = fermient(&["state", "random", "--M", "5", "--N", "3", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(amplitude_lines(&stdout(&a)), amplitude_lines(&stdout(&c)));
}

#[test]
fn rdm_spectra_and_normalization() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.fs");
    let s = dir.path().join("s.fs");
    assert!(fermient(&["state", "yang", "--m", "3", "--n", "2", "-o", path_str(&y)]).status.success());
    assert!(fermient(&["state", "slater", "--M", "6", "--occ", "0,1,2,3", "-o", path_str(&s)]).status.success());

    let o = fermient(&["rdm", path_str(&y), "--k", "2", "--format", "json"]);
    let v = &json_lines(&o)[0];
    let top: Vec<f64> = v["top_eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((top[0] - 2.0 / 9.0).abs() < 1e-12);
    assert!(top[1..].iter().all(|x| (x - 1.0 / 18.0).abs() < 1e-12));

    let o = fermient(&["rdm", path_str(&s), "--k", "1", "--format", "json"]);
    let v = &json_lines(&o)[0];
    let top: Vec<f64> = v["top_eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(top[..4].iter().all(|x| (x - 0.25).abs() < 1e-12));
    assert!(top[4].abs() < 1e-12);

    let o = fermient(&["rdm", path_str(&y), "--k", "2", "--norm", "physics", "--format", "json"]);
    let v = &json_lines(&o)[0];
    assert!((v["trace"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert_eq!(v["normalization"], "physics");
}

#[test]
fn rdm_file_round_trips_through_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let y = dir.path().join("y.fs");
    let r = dir.path().join("y2.rdm");
    assert!(fermient(&["state", "yang", "--m", "3", "--n", "2", "-o", path_str(&y)]).status.success());
    assert!(fermient(&["rdm", path_str(&y), "--k", "2", "--norm", "physics", "-o", path_str(&r)]).status.success());
    let from_rdm = json_lines(&fermient(&["entropy", path_str(&r), "--format", "json"]));
    let from_state = json_lines(&fermient(&["entropy", path_str(&y), "--k", "2", "--format", "json"]));
    let a = from_rdm[0]["entropy"].as_f64().unwrap();
    let b = from_state[0]["entropy"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-12);
    let bits = json_lines(&fermient(&["entropy", path_str(&y), "--k", "2", "--bits", "--format", "json"]));
    assert!((bits[0]["entropy"].as_f64().unwrap() - b / 2f64.ln()).abs() < 1e-12);
}

#[test]
fn verify_mutual_equality_on_slater_strict_on_yang() {
    let o = fermient(&["verify", "mutual", "--M", "6", "--N", "4", "--random", "5"]);
    assert!(o.status.success());
    let lines = json_lines(&o);
    assert_eq!(lines[0]["record"], "header");
    assert_eq!(lines[0]["config"]["command"]["verify"]["suite"], "mutual");
    let purity: Vec<Value> = reports(&o)
        .into_iter()
        .filter(|r| r["name"] == "mutual_info_purity")
        .collect();
    let slater = purity
        .iter()
        .find(|r| r["context"]["label"].as_str().unwrap().starts_with("slater"))
        .unwrap();
    assert_eq!(slater["context"]["equality"], "true");
    let yang = purity.iter().find(|r| r["context"]["label"] == "yang m=3 n=2").unwrap();
    assert_eq!(yang["context"]["equality"], "false");
    assert!(yang["slack"].as_f64().unwrap() > 1e-3);
}

#[test]
fn verify_squash_compares_with_closed_form() {
    let odd = fermient(&["verify", "squash", "--N", "5"]);
    assert!(odd.status.success());
    let r = reports(&odd);
    let closed = r.iter().find(|r| r["name"] == "squash_closed_form").unwrap();
    assert_eq!(closed["context"]["matches_closed_form"], "true");
    assert!((closed["lhs"].as_f64().unwrap() - 0.5 * 2f64.ln()).abs() < 1e-10);

    // the Slater k=2 extension value for N=4 is (1/2) ln(8/3), not (1/2) ln 3
    let even = fermient(&["verify", "squash", "--N", "4"]);
    assert_eq!(even.status.code(), Some(1));
    let r = reports(&even);
    let closed = r.iter().find(|r| r["name"] == "squash_closed_form").unwrap();
    assert_eq!(closed["context"]["matches_closed_form"], "false");
    assert!((closed["lhs"].as_f64().unwrap() - 0.5 * (8f64 / 3.0).ln()).abs() < 1e-12);
    assert!((closed["rhs"].as_f64().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn verify_all_full_sweep_holds() {
    let o = fermient(&["verify", "all", "--seed", "1", "--random", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = json_lines(&o);
    let summary = lines.last().unwrap();
    assert_eq!(summary["record"], "summary");
    assert_eq!(summary["violations"], 0);
    assert!(summary["states"].as_u64().unwrap() >= 200);
    for suite in ["mutual", "subadd", "elem", "ef", "yang", "squash"] {
        assert!(lines.iter().any(|l| l["suite"] == suite), "no {suite} reports");
    }
}

#[test]
fn verify_output_is_deterministic_across_jobs() {
    let body = |o: &Output| -> Vec<String> { stdout(o).lines().skip(1).map(String::from).collect() };
    let a = fermient(&["verify", "elem", "--random", "30", "--jobs", "1"]);
    let b = fermient(&["verify", "elem", "--random", "30", "--jobs", "2"]);
    let c = fermient(&["verify", "elem", "--random", "30", "--jobs", "1"]);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(body(&a), body(&b));
}

#[test]
fn verify_accepts_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("r.fs");
    assert!(fermient(&["state", "random", "--M", "5", "--N", "3", "--seed", "3", "-o", path_str(&s)]).status.success());
    let o = fermient(&["verify", "elem", "--random", "0", path_str(&s)]);
    assert!(o.status.success());
    assert!(reports(&o).iter().any(|r| r["context"]["label"] == path_str(&s)));
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn sweeps_agree_with_closed_forms() {
    let o = fermient(&["sweep", "yang-spectrum", "--m", "2..5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# column analytic_max:"));
    let (h, rows) = csv_rows(&o);
    assert_eq!(rows.len(), 14);
    assert!(column(&h, &rows, "max_diff").iter().all(|d| *d <= 1e-10));

    let o = fermient(&["sweep", "s2", "--N", "2..6", "--random", "0"]);
    let (h, rows) = csv_rows(&o);
    let n = column(&h, &rows, "N");
    let s2 = column(&h, &rows, "slater_s2");
    for (n, s) in n.iter().zip(&s2) {
        let binom = n * (n - 1.0) / 2.0;
        assert!((s - binom.ln()).abs() < 1e-10);
    }

    let o = fermient(&["sweep", "ef", "--M", "4..6", "--restarts", "20"]);
    let (h, rows) = csv_rows(&o);
    assert!(!rows.is_empty());
    assert!(column(&h, &rows, "ef").iter().all(|e| (e - 2f64.ln()).abs() <= 1e-4));
}

#[test]
fn exit_codes() {
    assert_eq!(fermient(&["state", "random", "--M", "40", "--N", "20"]).status.code(), Some(3));
    assert_eq!(fermient(&["state", "slater", "--M", "4"]).status.code(), Some(2));
    assert_eq!(fermient(&["rdm", "/nonexistent/file.fs", "--k", "1"]).status.code(), Some(2));
    assert_eq!(fermient(&["nonsense"]).status.code(), Some(2));
    assert_eq!(fermient(&["verify", "mutual", "--M", "6"]).status.code(), Some(2));
    assert_eq!(
        fermient(&["state", "yang", "--m", "4", "--n", "2", "--max-state-dim", "10"]).status.code(),
        Some(3)
    );
}
