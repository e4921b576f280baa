//! End-to-end tests of the `squeeze` binary: exit codes, report text,
//! determinism, JSON mode, and the SVG renderer.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_squeeze"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn measure_reports_closed_form_triangle_metrics() {
    let out = bin().arg("measure").arg(fixture("delta2.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("mesh    1.414213562"), "{text}");
    assert!(text.contains("comesh  0.408248290"), "{text}");
}

#[test]
fn measure_through_control_map_uses_codomain_charts() {
    let out = bin()
        .arg("measure")
        .arg(fixture("collapse_map.json"))
        .args(["--control", "collapse"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // The whole triangle collapses onto one edge, so its measured diameter
    // is the edge length.
    assert!(stdout(&out).contains("mesh    1.414213562"));
}

#[test]
fn constants_prints_the_threshold_for_the_triangle() {
    let out = bin()
        .arg("constants")
        .arg(fixture("delta2.json"))
        .arg(fixture("delta2.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("eps_xy=0.707106781"), "{text}");
    assert!(text.contains("k=1.732050808"), "{text}");
}

#[test]
fn lemma_check_passes_on_the_collapse_map() {
    let out = bin()
        .arg("lemma-check")
        .arg(fixture("collapse_map.json"))
        .args(["--rho", "0", "--epsilon", "0.1", "--samples", "60"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("result: PASS"), "{text}");
    assert!(!text.contains("fail=1"), "{text}");
}

#[test]
fn check_triangular_self_control_passes() {
    let out = bin()
        .arg("check-triangular")
        .arg(fixture("collapse_map.json"))
        .arg("--control")
        .arg(fixture("collapse_map.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("result: PASS"));
}

#[test]
fn check_triangular_failure_exits_one() {
    let doc = r#"{
  "format_version": "1",
  "vertices": [{"id": 0}, {"id": 1}],
  "maximal_simplices": [[0, 1]],
  "maps": {
    "toppled": {"vertices": [[0, 1], [1, 1]]},
    "id": {"vertices": [[0, 0], [1, 1]]}
  }
}"#;
    let path = tmp("toppled.json");
    std::fs::write(&path, doc).unwrap();
    let out = bin()
        .arg("check-triangular")
        .arg(&path)
        .args(["--map", "toppled"])
        .arg("--control")
        .arg(&path)
        .args(["--control-map", "id"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("result: FAIL"));
}

#[test]
fn subdivide_writes_a_parseable_document() {
    let out = bin()
        .arg("subdivide")
        .arg(fixture("delta1.json"))
        .args(["--iterations", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["maximal_simplices"].as_array().unwrap().len(), 4);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 5);
}

#[test]
fn dualcell_lists_the_barycentre_star() {
    let level1 = bin()
        .arg("dualcell")
        .arg(fixture("delta2.json"))
        .args(["--simplex", "0,1,2", "--iterations", "1"])
        .output()
        .unwrap();
    assert_eq!(level1.status.code(), Some(0));
    let text = stdout(&level1);
    assert!(text.contains("dual cell of (0 1 2) at level 1:"), "{text}");
    // At level 1 the cell is the barycentre alone.
    assert_eq!(text.lines().count(), 2, "{text}");
    let level2 = bin()
        .arg("dualcell")
        .arg(fixture("delta2.json"))
        .args(["--simplex", "0,1,2", "--iterations", "2"])
        .output()
        .unwrap();
    // One level deeper the cell is the barycentre's whole flag star.
    assert_eq!(stdout(&level2).lines().count(), 50, "{}", stdout(&level2));
}

#[test]
fn retraction_builds_and_verifies() {
    let out = bin()
        .arg("retraction")
        .arg(fixture("delta1.json"))
        .args(["--epsilon", "0.25", "--verify", "--samples", "40"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("retraction: depth="), "{text}");
    assert!(text.contains("result: PASS"), "{text}");
}

#[test]
fn squeeze_certifies_the_path_instance_and_is_deterministic() {
    let run = || {
        let out = bin()
            .arg("squeeze")
            .arg(fixture("squeeze_path.json"))
            .args(["--samples", "8", "--seed", "11"])
            .output()
            .unwrap();
        (out.status.code(), stdout(&out))
    };
    let (code_a, text_a) = run();
    assert_eq!(code_a, Some(0), "{text_a}");
    assert!(text_a.contains("certified: true"), "{text_a}");
    assert!(text_a.contains("result: PASS"), "{text_a}");
    let (code_b, text_b) = run();
    assert_eq!(code_b, Some(0));
    assert_eq!(text_a, text_b, "same seed must give byte-identical output");
}

#[test]
fn squeeze_json_mode_emits_valid_json() {
    let path = tmp("cert.json");
    let out = bin()
        .arg("squeeze")
        .arg(fixture("squeeze_path.json"))
        .args(["--samples", "6", "--json"])
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(cert["title"].as_str().unwrap().contains("squeeze"));
}

#[test]
fn samples_env_var_overrides_the_default_budget() {
    let baseline = bin()
        .arg("lemma-check")
        .arg(fixture("collapse_map.json"))
        .args(["--rho", "0", "--epsilon", "0.1"])
        .env("SQUEEZE_SAMPLES", "7")
        .output()
        .unwrap();
    let explicit = bin()
        .arg("lemma-check")
        .arg(fixture("collapse_map.json"))
        .args(["--rho", "0", "--epsilon", "0.1", "--samples", "7"])
        .output()
        .unwrap();
    assert_eq!(stdout(&baseline), stdout(&explicit));
    let default = bin()
        .arg("lemma-check")
        .arg(fixture("collapse_map.json"))
        .args(["--rho", "0", "--epsilon", "0.1"])
        .output()
        .unwrap();
    assert_ne!(stdout(&baseline), stdout(&default));
}

#[test]
fn render_emits_valid_svg_with_one_polygon_per_top_simplex() {
    let path = tmp("sd2.svg");
    let out = bin()
        .arg("render")
        .arg(fixture("delta2.json"))
        .args(["--iterations", "2", "--stages"])
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml version=\"1.0\""));
    // Stage panels: Sd has 6 top triangles, Sd^2 has 36.
    assert_eq!(svg.matches("<polygon").count(), 42, "{svg}");
    assert_eq!(svg.matches("</svg>").count(), 1);
}

#[test]
fn render_refuses_high_dimension() {
    let out = bin()
        .arg("render")
        .arg(fixture("delta3.json"))
        .arg("--output")
        .arg(tmp("refused.svg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn conjecture_probe_is_informative_not_failing() {
    let out = bin()
        .arg("conjecture-probe")
        .arg(fixture("squeeze_path.json"))
        .args(["--samples", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("experimental"));
}

#[test]
fn malformed_input_exits_two() {
    let path = tmp("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin().arg("measure").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let unknown = tmp("unknown_field.json");
    std::fs::write(
        &unknown,
        r#"{"format_version":"1","vertices":[{"id":0}],"maximal_simplices":[[0]],"surprise":1}"#,
    )
    .unwrap();
    let out = bin().arg("measure").arg(&unknown).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_claim_is_an_input_error() {
    let doc = std::fs::read_to_string(fixture("squeeze_identity.json")).unwrap();
    let doc = doc.replace("\"epsilon\": 0.05", "\"epsilon\": 0.75");
    let path = tmp("oversized.json");
    std::fs::write(&path, doc).unwrap();
    let out = bin().arg("squeeze").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}
