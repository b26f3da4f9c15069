use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threephase")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn bound_spot_value() {
    let v = stdout_json(&run(&["bound", "--mat", "1,2,3,4", "--m1", "0.05", "--m2", "0.35", "--rho", "1"]));
    assert_eq!(v["region"], "A1");
    assert!((v["U_tr"].as_f64().unwrap() - 22.0).abs() < 1e-9);
    assert!((v["K_star"].as_f64().unwrap() - 11.0).abs() < 1e-9);
    assert!((v["L_star"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn bound_tie_break_at_zero() {
    let v = stdout_json(&run(&["bound", "--m1", "0.05", "--m2", "0.35", "--rho", "0"]));
    assert_eq!(v["region"], "A1");
}

#[test]
fn bound_with_oracle() {
    let v = stdout_json(&run(&["bound", "--m1", "0.12", "--m2", "0.35", "--rho", "0.8", "--verify"]));
    assert_eq!(v["region"], "B");
    assert!(v["oracle"]["deviation"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn invalid_spec_exits_2() {
    let out = run(&["bound", "--m1", "0.9", "--m2", "0.2", "--rho", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("fractions exceed 1"));
    assert_eq!(run(&["bound", "--m1", "0.1", "--m2", "0.2", "--rho", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--mat", "3,4,1,2", "--m1", "0.1", "--m2", "0.2", "--rho", "0"]).status.code(), Some(2));
}

#[test]
fn fig3_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--mat", "1,2,3,4", "--m1", "0.17", "--m2", "0.35", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["rho", "region", "U_tr", "alpha_star", "K_star", "L_star", "K_HS", "L_HS", "conjectured"]);
    assert_eq!(rows.len(), 2001);

    let switches: Vec<(f64, f64, &str, &str)> = rows
        .windows(2)
        .filter(|w| w[0][1] != w[1][1])
        .map(|w| (num(&w[0][0]), num(&w[1][0]), w[0][1].as_str(), w[1][1].as_str()))
        .collect();
    // the switch lies between two neighbouring rows
    let at = |rho: f64, a: &str, b: &str| switches.iter().any(|s| s.0 <= rho && rho <= s.1 && s.2 == a && s.3 == b);
    assert!(at(0.35, "C", "B"), "{switches:?}");
    assert!(at(-0.35, "B'", "C'"), "{switches:?}");

    for row in &rows {
        assert_eq!(row[6], "5.89473684");
        let rho = num(&row[0]);
        if row[1] == "D" {
            assert_eq!(row[4], row[6], "rho {rho}");
        }
        // the envelope identity, read back from the file
        if !row[4].is_empty() {
            let (u, k, l) = (num(&row[2]), num(&row[4]), num(&row[5]));
            let env = 0.5 * (k * (1.0 + rho).powi(2) + l * (1.0 - rho).powi(2));
            assert!((env - u).abs() <= 1e-8 * u, "rho {rho}: {u} vs {env}");
        }
    }

    let again = dir.path().join("again.csv");
    run(&["sweep", "--m1", "0.17", "--m2", "0.35", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn sweep_marks_region_e() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let out = run(&["sweep", "--m1", "0.5", "--m2", "0.35", "--rho-steps", "41", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&path);
    let e: Vec<_> = rows.iter().filter(|r| r[1] == "E").collect();
    assert!(!e.is_empty());
    for r in e {
        assert!(r[4].is_empty() && r[5].is_empty());
        assert_eq!(r[8], "true");
    }
    assert!(rows.iter().filter(|r| r[1] != "E").all(|r| r[8] == "false"));
}

#[test]
fn sweep_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.svg");
    let out = run(&["sweep", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let s = fs::read_to_string(&path).unwrap();
    assert!(s.contains("<svg") && s.trim_end().ends_with("</svg>"));
    assert!(s.matches("<polyline").count() >= 4);
}

fn region_map_csv(dir: &Path, grid: &str) -> (usize, usize, Vec<String>) {
    let path = dir.join(format!("map{grid}.csv"));
    let out = run(&["region-map", "--m2-plane", "0.35", "--grid", grid, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, ["rho", "m1", "region"]);
    let (n, m) = grid.split_once('x').map(|(a, b)| (a.parse().unwrap(), b.parse().unwrap())).unwrap();
    assert_eq!(rows.len(), n * m);
    (n, m, rows.into_iter().map(|r| r[2].clone()).collect())
}

#[test]
fn fig2_region_map() {
    let dir = tempfile::tempdir().unwrap();
    let (n, m, labels) = region_map_csv(dir.path(), "400x400");
    let distinct: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
    assert_eq!(distinct.len(), 11, "{distinct:?}");
    // the cell whose centre is nearest (ρ, m1) = (0.8, 0.12)
    let i = ((0.8 + 1.0) / 2.0 * n as f64 - 0.5).round() as usize;
    let j = (0.12 / 0.65 * m as f64 - 0.5).round() as usize;
    assert_eq!(labels[j * n + i], "B");
}

#[test]
fn region_map_svg_boundaries_match_csv() {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const PAD: f64 = 48.0;
    let dir = tempfile::tempdir().unwrap();
    let (n, m, labels) = region_map_csv(dir.path(), "200x200");
    let path = dir.path().join("map.svg");
    let out = run(&["region-map", "--grid", "200x200", "--format", "svg", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let svg = fs::read_to_string(&path).unwrap();

    // midpoints between 4-neighbours with different labels, bucketed by whole cells
    let mut flips: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
    for j in 0..m {
        for i in 0..n {
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni < n && nj < m && labels[j * n + i] != labels[nj * n + ni] {
                    let (x, y) = (0.5 * (i + ni) as f64, 0.5 * (j + nj) as f64);
                    flips.entry((x as i64, y as i64)).or_default().push((x, y));
                }
            }
        }
    }
    let mut checked = 0;
    for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        for p in pts.split_whitespace() {
            let (x, y) = p.split_once(',').unwrap();
            let fi = (num(x) - PAD) / (W - 2.0 * PAD) * n as f64 - 0.5;
            let fj = (H - PAD - num(y)) / (H - 2.0 * PAD) * m as f64 - 0.5;
            if !(0.0..=(n - 1) as f64).contains(&fi) || !(0.0..=(m - 1) as f64).contains(&fj) {
                continue;
            }
            let (bi, bj) = (fi as i64, fj as i64);
            let d = (bi - 2..=bi + 2)
                .flat_map(|a| (bj - 2..=bj + 2).map(move |b| (a, b)))
                .filter_map(|k| flips.get(&k))
                .flatten()
                .map(|&(a, b)| (a - fi).hypot(b - fj))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 1.0, "nearest label change {d:.2} cells from ({x}, {y})");
            checked += 1;
        }
    }
    assert!(checked > 500, "{checked}");
}

#[test]
fn degenerate_grid_exits_2() {
    let out = run(&["region-map", "--grid", "1x400"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn laminate_region_c() {
    let v = stdout_json(&run(&["laminate", "--m1", "0.2", "--m2", "0.35", "--rho", "0.2"]));
    assert_eq!(v["region"], "C");
    assert!((v["betas"]["beta1"].as_f64().unwrap() - 0.307692).abs() < 1e-6);
    assert!((v["betas"]["beta2"].as_f64().unwrap() - 0.35).abs() < 1e-12);
    let rep = &v["report"];
    let (e, u) = (rep["energy"].as_f64().unwrap(), rep["U_tr"].as_f64().unwrap());
    assert!((e - u).abs() <= 1e-9 * u);

    // the emitted tree evaluates back to the bound
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.json");
    fs::write(&tree, v["tree"].to_string()).unwrap();
    let w = stdout_json(&run(&["laminate", "--eval", tree.to_str().unwrap()]));
    assert!((w["report"]["energy"].as_f64().unwrap() - e).abs() <= 1e-12 * e);
    assert_eq!(w["bound"]["region"], "C");
    assert!(w["bound"]["gap"].as_f64().unwrap().abs() <= 1e-9);
}

#[test]
fn laminate_sg_in_b() {
    let v = stdout_json(&run(&["laminate", "--m1", "0.12", "--m2", "0.35", "--rho", "0.8", "--sg"]));
    assert_eq!(v["structure"], "sg");
    let b = &v["betas"];
    assert!((b["beta1"].as_f64().unwrap() - (0.8f64 * 0.35).sqrt()).abs() < 1e-12);
    assert!((b["beta2"].as_f64().unwrap() - (0.35f64 / 0.8).sqrt()).abs() < 1e-12);
    assert_eq!(b["beta3"], b["beta4"]);
    let avg = v["report"]["avg_stress"].as_array().unwrap();
    assert!((avg[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((avg[1].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn unattained_regions_exit_3() {
    let out = run(&["laminate", "--m1", "0.5", "--m2", "0.35", "--rho", "0.05"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("attaining structure conjectured only"));
    let out = run(&["laminate", "--m1", "0.6", "--m2", "0.35", "--rho", "0.9"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    // the periodic cell exists only in B
    assert_eq!(run(&["laminate", "--m1", "0.2", "--m2", "0.35", "--rho", "0.2", "--sg"]).status.code(), Some(3));
}

#[test]
fn laminate_svg_sketch() {
    let out = run(&["laminate", "--m1", "0.12", "--m2", "0.35", "--rho", "0.8", "--format", "svg"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.matches("<rect").count() >= 4);
}

#[test]
fn verify_default_run() {
    let out = run(&["verify", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("region"));
    for r in ["A1", "A2", "B", "C", "D", "A1'", "A2'", "B'", "C'", "D'"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(r)), "{r}");
    }
    assert!(text.contains("all checks passed"));
}

#[test]
fn verify_region_e_is_oracle_only() {
    let out = run(&["verify", "--regions", "E", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("attainment checks skipped"));
}

#[test]
fn verify_names_the_failing_metric() {
    let out = run(&["verify", "--regions", "B", "--samples", "5", "--tol-oracle", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("oracle deviation"));
}

#[test]
fn verify_json_is_deterministic() {
    let a = run(&["verify", "--samples", "22", "--seed", "3", "--format", "json"]);
    let b = run(&["verify", "--samples", "22", "--seed", "3", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["passed"], true);
}
