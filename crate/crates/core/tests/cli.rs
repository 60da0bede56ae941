use monobox::cli::{run, EXIT_ERROR, EXIT_FOUND, EXIT_OK};
use monobox::config::ConfigFile;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["monobox"];
    full.extend_from_slice(args);
    let out = run(full);
    let v = if out.stdout.trim().starts_with('{') {
        serde_json::from_str(&out.stdout).unwrap()
    } else {
        Value::String(out.stdout + &out.stderr)
    };
    (out.code, v)
}

#[test]
fn color2_origin() {
    let (code, v) = call(&["color2", "--point", "0,0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["color"], serde_json::json!([0, 0]));
}

#[test]
fn separation_certificate_and_refutation() {
    let (code, v) = call(&[
        "separation",
        "--scale",
        "10/3",
        "--half-width",
        "2/5",
        "--radius-sq",
        "4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["pass"], true);
    let central = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["offset"] == serde_json::json!([0, 0]))
        .unwrap();
    assert_eq!(central["max_dist_sq"], "32/9");
    let (code, v) = call(&[
        "separation",
        "--scale",
        "10/3",
        "--half-width",
        "49/100",
        "--radius-sq",
        "4",
    ]);
    assert_eq!(code, EXIT_FOUND);
    assert_eq!(v["pass"], false);
    let (code, _) = call(&[
        "separation",
        "--scale",
        "3.33",
        "--half-width",
        "2/5",
        "--radius-sq",
        "4",
    ]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn search_is_deterministic_and_clean() {
    let args = [
        "search",
        "--mode",
        "rect2d",
        "--trials",
        "3000",
        "--seed",
        "7",
        "--coloring",
        "plane25",
    ];
    let (code, mut a) = call(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a["counterexamples"], 0);
    assert_eq!(a["outcome"], "pass");
    let (_, mut b) = call(&[&args[..], &["--threads", "3"]].concat());
    a["wall_clock_ms"] = 0.into();
    b["wall_clock_ms"] = 0.into();
    assert_eq!(a, b);
}

#[test]
fn control_search_reports_round_trippable_witnesses() {
    let (code, v) = call(&[
        "search",
        "--mode",
        "rect2d",
        "--trials",
        "500",
        "--seed",
        "1",
        "--coloring",
        "quadrant4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["outcome"], "control-hit");
    let w = &v["witnesses"][0];
    let cfg: ConfigFile = serde_json::from_value(w["config"].clone()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    std::fs::write(&path, cfg.to_json().unwrap()).unwrap();
    let (code, checked) = call(&[
        "check",
        "--config",
        path.to_str().unwrap(),
        "--coloring",
        "quadrant4",
    ]);
    assert_eq!(code, EXIT_FOUND);
    assert_eq!(checked["monochromatic"], true);
    let (code, checked) = call(&["check", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(checked["coloring"], "plane25");
}

#[test]
fn adversarial_and_csv_output() {
    let (code, v) = call(&[
        "search",
        "--mode",
        "box-nd",
        "--n",
        "2",
        "--coloring",
        "no-rotation-net",
        "--adversarial",
        "--restarts",
        "8",
        "--steps",
        "300",
        "--seed",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["adversarial"]["score_increases"], 0);
    let out = run([
        "monobox", "search", "--mode", "rect2d", "--trials", "100", "--format", "csv",
    ]);
    assert!(out.stdout.starts_with("key,value\n"));
    assert!(out.stdout.contains("trial,vertex,coordinates,color"));
}

#[test]
fn check_box_with_nd_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.json");
    std::fs::write(&path, r#"{"type":"box","params":{"q":[1,1],"a":[2,0.5]}}"#).unwrap();
    let (code, v) = call(&["check", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["coloring"], "nd");
    assert_eq!(v["monochromatic"], false);
    assert_eq!(v["fast_path"], true);
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        call(&["check", "--config", path.to_str().unwrap()]).0,
        EXIT_ERROR
    );
    assert_eq!(
        call(&["check", "--config", "/nonexistent/file.json"]).0,
        EXIT_ERROR
    );
}

#[test]
fn colorn_net_identity() {
    let (code, v) = call(&["colorn", "--n", "2", "--point", "1,1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["m"], 202);
    assert_eq!(v["entries"][0], 8);
    assert_eq!(v["digest"].as_str().unwrap().len(), 32);
    let (code, _) = call(&["colorn", "--n", "3", "--point", "1,1"]);
    assert_eq!(code, EXIT_ERROR);
    let (code, v) = call(&["net", "--n", "2", "--eps", "2", "--samples", "100"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["m"], 2);
    assert_eq!(v["certified"], false);
    let (code, v) = call(&["identity", "--n", "4", "--trials", "50", "--exact"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["inexact_instances"], 0);
}

#[test]
fn plot_boundaries_files() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("b.svg");
    let (code, _) = call(&[
        "plot-boundaries",
        "--window",
        "-3,-3,3,3",
        "--range",
        "-9,9",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));
    let csv = dir.path().join("b.csv");
    call(&[
        "plot-boundaries",
        "--window",
        "-3,-3,3,3",
        "--range",
        "-9,9",
        "--out",
        csv.to_str().unwrap(),
    ]);
    for line in std::fs::read_to_string(&csv).unwrap().lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (p, x, y): (f64, f64, f64) = (
            f[1].parse().unwrap(),
            f[2].parse().unwrap(),
            f[3].parse().unwrap(),
        );
        let residual = match f[0] {
            "real" => (x - y) * (x + y) - 2.0 * p / 3.0,
            _ => x * y - p / 3.0,
        };
        assert!(residual.abs() <= 1e-9);
    }
    assert_eq!(
        call(&[
            "plot-boundaries",
            "--window",
            "-3,-3,3,3",
            "--range",
            "-9,9",
            "--out",
            "x.png"
        ])
        .0,
        EXIT_ERROR
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
    assert_eq!(call(&["color2", "--point", "1"]).0, EXIT_ERROR);
    assert_eq!(call(&["search", "--mode", "hexagon"]).0, EXIT_ERROR);
}
