use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn glattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glattice"))
        .args(args)
        .env_remove("GLATTICE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn group_info_lists_subgroup_classes() {
    let out = glattice(&["group-info", "--group", &data("s3.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["order"], 6);
    assert_eq!(v["subgroup_classes"].as_array().unwrap().len(), 4);
    assert_eq!(v["all_sylow_cyclic"], true);
}

#[test]
fn pord_of_a_lattice_and_of_a_coset_space_agree() {
    let a = json(&glattice(&["pord", "--lattice", &data("jx_s3_c2.json")]));
    let b = json(&glattice(&["pord", "--group", &data("s3.json"), "--subgroup", &data("s3_c2.json")]));
    assert_eq!(a["pord"], 3);
    assert_eq!(a["pord"], b["pord"]);
    assert_eq!(a["by_resolution"], a["pord"]);
}

#[test]
fn lattice_cohomology_reports_h1_per_class() {
    let out = glattice(&["lattice-cohomology", "--lattice", &data("jx_s3_c2.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["subgroups"].as_array().unwrap().len(), 4);
}

#[test]
fn klein_four_torus_is_not_retract_rational() {
    let out = glattice(&["classify", "--group", &data("c2c2.json"), "--subgroup", &data("trivial.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["retract_rational"], false);
    assert_eq!(v["stably_rational"], "no");
}

#[test]
fn hasse_for_three_quadratic_fields() {
    let out = glattice(&["hasse", "--spec", &data("three_quadratic.json")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["routes_agree"], true);
    assert_eq!(v["sha2_omega"], v["sha2_omega_direct"]);
    assert!(v["statement"].as_str().unwrap().contains("Z/2"));
}

#[test]
fn batches_keep_input_order_for_any_job_count() {
    let specs = ["c2_quadratic.json", "three_quadratic.json", "c3_cyclic.json", "biquadratic.json", "s3_cubic.json"];
    let mut args = vec!["classify".to_string()];
    for s in specs {
        args.push("--spec".into());
        args.push(data(s));
    }
    let run = |jobs: &str| {
        let mut a: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        a.extend(["--jobs", jobs]);
        glattice(&a)
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    let orders: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["group_order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![2, 4, 3, 4, 6]);
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["tensor-check", "--seed", "5", "--spec", &data("s3_cubic.json"), "--spec", &data("c2_quadratic.json")];
    let a = glattice(&args);
    let b = glattice(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["coprime"], true);
    assert_eq!(v["splitting"]["verified"], true);
    assert_eq!(v["product_stable_deduced"], true);
}

#[test]
fn converse_flag_checks_restriction() {
    let out = glattice(&["tensor-check", "--converse", "--spec", &data("biquadratic.json"), "--spec", &data("c3_cyclic.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["restriction_verified"], true);
    assert_eq!(v["first_retract"], false);
}

#[test]
fn verify_seq_reports_the_failing_node() {
    let ok = glattice(&["verify-seq", "--sequence", &data("augmentation_s3_c2.json")]);
    assert!(ok.status.success());
    assert_eq!(json(&ok)["order"], 3);
    let bad = glattice(&["verify-seq", "--sequence", &data("corrupted.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["failing_node"], 1);
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"factors\": [\n  {\"group\": }\n]}").unwrap();
    let out = glattice(&["classify", "--spec", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = glattice(&["classify", "--spec", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn output_file_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.md");
    let out = glattice(&[
        "hasse",
        "--format",
        "md",
        "-o",
        path.to_str().unwrap(),
        "--spec",
        &data("three_quadratic.json"),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("Sha^2_omega"), "{text}");
}

#[test]
fn strict_mode_passes_when_verdicts_are_known() {
    let out = glattice(&["classify", "--strict", "--spec", &data("c6_orbits_2_3.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["stably_rational"], "yes");
}
