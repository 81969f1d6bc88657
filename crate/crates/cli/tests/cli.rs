//! End-to-end tests of the binary: exit codes, output shapes, and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exodromy"))
}

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_file(args: &[&str], file: &str) -> Output {
    let path = testdata(file);
    let mut full: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap().to_string();
    let leaked: &'static str = Box::leak(path_str.into_boxed_str());
    full.push(leaked);
    run(&full)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

#[test]
fn validates_bundled_fans() {
    for file in ["a1.json", "a2.json", "p1.json", "p2.json"] {
        let out = run_with_file(&["fan", "validate"], file);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", stderr(&out));
    }
    let out = run_with_file(&["fan", "validate"], "p1.json");
    assert!(stdout(&out).contains("3 cones"));
}

#[test]
fn warns_on_nonprimitive_rays() {
    let out = run_with_file(&["fan", "validate"], "nonprimitive_ray.json");
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("normalized"));
}

#[test]
fn rejects_overlapping_cones() {
    let out = run_with_file(&["fan", "validate"], "overlapping_cones.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("common face"));
}

#[test]
fn rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["fan", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["poset"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn poset_json_of_projective_plane() {
    let out = run_with_file(&["poset"], "p2.json");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["cones"].as_array().unwrap().len(), 7);
    assert_eq!(v["covers"].as_array().unwrap().len(), 9);
    assert_eq!(v["top"], 0);
}

#[test]
fn poset_dot_output() {
    let out = run_with_file(&["poset", "--dot"], "p1.json");
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches("->").count(), 2);
}

#[test]
fn fundcat_reports_ranks_and_levels() {
    let out = run_with_file(&["fundcat"], "p2.json");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ranks: Vec<u64> = v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["hom_rank"].as_u64().unwrap())
        .collect();
    assert_eq!(ranks.iter().filter(|&&r| r == 0).count(), 3);
    assert_eq!(ranks.iter().filter(|&&r| r == 2).count(), 1);

    let out = run(&[
        "fundcat",
        testdata("a1.json").to_str().unwrap(),
        "--level",
        "5",
        "--frob",
        "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // |Hom_5(top, top)| = 5 * ord(2 mod 5) = 20
    let sizes: Vec<u64> = v["objects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["endo_hom_size"].as_u64().unwrap())
        .collect();
    assert!(sizes.contains(&20));
}

#[test]
fn enumerate_affine_line_prints_three() {
    let out = run(&[
        "enumerate",
        testdata("a1.json").to_str().unwrap(),
        "--max-stalk",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().next(), Some("3"));
}

#[test]
fn sheaf_validate_and_sections() {
    let out = run_with_file(&["sheaf", "validate"], "swap_sheaf_a1.json");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out = run_with_file(&["sheaf", "sections"], "swap_sheaf_a1.json");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 0, "the swap system has no invariant sections");
}

#[test]
fn sheaf_validate_rejects_bad_monodromy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // swap monodromy on a fixed-point stalk cannot factor through the
    // trivial hom group
    std::fs::write(
        &path,
        r#"{
            "format": 1,
            "fan": { "format": 1, "rank": 1, "rays": [[1]], "cones": [[0]] },
            "stalks": [
                { "cone": 0, "size": 2, "monodromy": [[0, 1]] },
                { "cone": 1, "size": 2, "monodromy": [[1, 0]] }
            ],
            "structure": [ { "from": 1, "to": 0, "map": [0, 1] } ]
        }"#,
    )
    .unwrap();
    let out = run(&["sheaf", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("span sublattice"));
}

#[test]
fn pushforward_kills_the_swap_stalk() {
    let out = run_with_file(&["sheaf", "pushforward"], "swap_system_a1.json");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sizes: Vec<(u64, u64)> = v["stalks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["cone"].as_u64().unwrap(), s["size"].as_u64().unwrap()))
        .collect();
    assert_eq!(sizes, vec![(0, 2), (1, 0)]);
}

#[test]
fn decompose_glue_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bundle_path = dir.path().join("bundle.json");
    let out = run(&[
        "sheaf",
        "decompose",
        testdata("swap_sheaf_a1.json").to_str().unwrap(),
        "--stratum",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    std::fs::write(&bundle_path, stdout(&out)).unwrap();

    let out = run(&["sheaf", "glue", bundle_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let reglued: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let original: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(testdata("swap_sheaf_a1.json")).unwrap())
            .unwrap();
    assert_eq!(reglued, original, "gluing a decomposition restores the sheaf");
}

#[test]
fn hom_counts_swap_endomorphisms() {
    let path = testdata("swap_sheaf_a1.json");
    let out = run(&[
        "sheaf",
        "hom",
        "--left",
        path.to_str().unwrap(),
        "--right",
        path.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn cover_commands() {
    let out = run_with_file(&["cover", "build"], "squaring_cover.json");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["index"], 2);
    assert_eq!(v["denominator"], 2);

    let out = run(&[
        "cover",
        "components",
        testdata("squaring_cover.json").to_str().unwrap(),
        "--sub",
        "[[1]]",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["descends"], false);
    assert_eq!(v["component_count"], 1);

    let out = run(&[
        "cover",
        "crosscheck",
        testdata("squaring_cover.json").to_str().unwrap(),
        "--fan",
        testdata("a1.json").to_str().unwrap(),
        "--stratum",
        "1",
        "--level",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["pushforward_stalk"], 0);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["poset", testdata("p2.json").to_str().unwrap()],
        vec!["enumerate", testdata("p1.json").to_str().unwrap(), "--max-stalk", "1"],
        vec!["selfcheck", "--seed", "7"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "output of {args:?} must be byte-stable");
    }
}

#[test]
fn serialization_is_a_fixed_point() {
    // parse -> serialize is idempotent on the bundled sheaf files
    for file in ["swap_sheaf_a1.json", "swap_system_a1.json"] {
        let first = run_with_file(&["sheaf", "pushforward"], file);
        assert_eq!(first.status.code(), Some(0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        std::fs::write(&path, stdout(&first)).unwrap();
        let second = run(&["sheaf", "pushforward", path.to_str().unwrap()]);
        assert_eq!(second.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn selfcheck_passes() {
    let out = run(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("PASS").count(), 8);
}
