use std::path::Path;
use std::process::{Command, Output};

fn hierlat(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hierlat"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn derive_json_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = hierlat(&["--generator", "dhl", "--json", "derive"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generic_degree"], 4);
    assert_eq!(v["degree_dropped"], false);
    assert_eq!(v["v_deg"]["infinity"], true);
    assert_eq!(v["reduced_map"]["numerator"]["vars"], serde_json::json!(["q", "y"]));
    assert!(v["template"]["u_next"]["terms"].as_array().unwrap().len() > 1);
}

#[test]
fn chromatic_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for method in ["recursion", "deletion-contraction", "fk"] {
        let o = hierlat(
            &["--generator", "triangle", "--json", "chromatic", "--level", "2", "--method", method],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{method}");
        outputs.push(o.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn zeros_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = hierlat(
        &["--generator", "dhl", "zeros", "--level", "1", "--output", "r.csv", "--measure", "m.json", "--radius", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "re,im,multiplicity");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1.0000000000000000"));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(m["vertex_count"], "4");
    assert_eq!(m["total_mass"], 1.0);
    assert_eq!(m["summary"]["mass_within"], 1.0);
}

#[test]
fn render_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let o = hierlat(
        &["--generator", "dhl", "render", "--region=-2,4,-3,3", "--size", "32x16", "--iters", "50", "--out", "a.ppm"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(dir.path().join("a.ppm")).unwrap();
    let header = b"P6\n32 16\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 32 * 16 * 3);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = hierlat(&["--generator", "dhl", "--json", "verify", "--level-max", "2"], dir.path());
    assert_eq!(code(&ok), 0);
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["all_pass"], true);
    let tripod = hierlat(&["--generator", "tripod", "--json", "verify", "--level-max", "1"], dir.path());
    assert_eq!(code(&tripod), 1);
    let v: serde_json::Value = serde_json::from_slice(&tripod.stdout).unwrap();
    assert_eq!(v["in_scope"], false);
    assert_eq!(v["degree_dropped"], true);
    let chain = hierlat(&["--generator", "linear", "verify", "--level-max", "1"], dir.path());
    assert_eq!(code(&chain), 1);
    assert!(String::from_utf8_lossy(&chain.stdout).contains("FAIL not_exceptional"));
}

#[test]
fn verify_leaves_input_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let text = r#"{"vertices": 4, "edges": [[0,2],[2,1],[0,3],[3,1]], "a": 0, "b": 1}"#;
    std::fs::write(&path, text).unwrap();
    let o = hierlat(&["--graph", "g.json", "verify", "--level-max", "2"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"vertices": 2, "edges": [[0, 7]], "a": 0, "b": 1}"#).unwrap();
    assert_eq!(code(&hierlat(&["--graph", "bad.json", "derive"], dir.path())), 3);
    assert_eq!(code(&hierlat(&["--graph", "missing.json", "derive"], dir.path())), 3);
    assert_eq!(code(&hierlat(&["--no-such-flag"], dir.path())), 3);
    assert_eq!(code(&hierlat(&["--generator", "dhl", "zeros", "--level", "9"], dir.path())), 2);
    assert_eq!(
        code(&hierlat(&["--generator", "dhl", "--budget-digits", "100", "chromatic", "--level", "4"], dir.path())),
        2
    );
    assert_eq!(
        code(&hierlat(&["--generator", "dhl", "--budget-pixels", "10", "render", "--out", "x.ppm"], dir.path())),
        2
    );
    assert_eq!(code(&hierlat(&["--generator", "nope", "derive"], dir.path())), 1);
}

#[test]
fn deterministic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 6] = [
        &["--generator", "split-diamond", "--json", "derive"],
        &["--generator", "dhl", "chromatic", "--level", "3"],
        &["--generator", "dhl", "tutte"],
        &["--generator", "kfold:3", "zeros", "--level", "3"],
        &["--generator", "triangle", "--json", "verify", "--level-max", "2"],
        &["--generator", "split-diamond", "render", "--size", "40x40", "--out", "s.ppm", "--overlay-zeros", "2"],
    ];
    for args in runs {
        let a = hierlat(args, dir.path());
        let image_a = std::fs::read(dir.path().join("s.ppm")).ok();
        let b = hierlat(args, dir.path());
        let image_b = std::fs::read(dir.path().join("s.ppm")).ok();
        assert_eq!(code(&a), code(&b), "{args:?}");
        assert!(!a.stdout.is_empty(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(image_a, image_b, "{args:?}");
    }
}
