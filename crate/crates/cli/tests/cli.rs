use std::path::Path;
use std::process::{Command, Output};

use endslab_cli::output::read_report;

fn endslab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endslab"))
        .args(args)
        .current_dir(dir)
        .env_remove("ENDSLAB_JOBS")
        .output()
        .expect("binary runs")
}

fn metadata(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("metadata.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn shipped_example_passes_and_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = endslab(&["run", "gaussian", "--out", "g"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("g");
    for f in ["report.json", "report.md", "metadata.json", "series/f.csv"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let report = read_report(&dir).unwrap();
    assert!(report.passed);
    assert_eq!(report.kind, "soliton");
}

#[test]
fn default_output_dir_uses_name() {
    let tmp = tempfile::tempdir().unwrap();
    let out = endslab(&["run", "--config", "cylinder"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("out/cylinder/report.json").is_file());
}

#[test]
fn missing_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = endslab(&["run", "no_such_file.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_file.json"));
}

#[test]
fn malformed_config_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.json"), "{\n  \"name\": \"x\",\n  \"model\": [\n}").unwrap();
    let out = endslab(&["run", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:3:"));
}

#[test]
fn unconverged_demo_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = endslab(&["run", "tiny_demo", "--out", "t"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ladder_converged") && stdout.contains("FAIL"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("advisory"));
    assert!(!read_report(&tmp.path().join("t")).unwrap().passed);
}

#[test]
fn list_names_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let out = endslab(&["list"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["gaussian", "cylinder", "two_end_cone", "tiny_demo"] {
        assert!(text.contains(name), "{name} missing from list");
    }
}

#[test]
fn report_subcommand_renders_markdown() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(endslab(&["run", "gaussian", "--out", "g"], tmp.path()).status.code(), Some(0));
    let out = endslab(&["report", "g"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let md = String::from_utf8_lossy(&out.stdout);
    assert!(md.contains("entropy_refinement"));
    assert_eq!(endslab(&["report", "missing"], tmp.path()).status.code(), Some(1));
}

#[test]
fn seed_and_jobs_are_honored() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_endslab"))
        .args(["run", "two_end_cone", "--out", "a", "--seed", "99"])
        .current_dir(tmp.path())
        .env("ENDSLAB_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("a");
    assert_eq!(read_report(&dir).unwrap().config.seed, 99);
    assert_eq!(metadata(&dir)["jobs"], 3);

    let out = endslab(&["--jobs", "2", "run", "gaussian", "--out", "b"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(metadata(&tmp.path().join("b"))["jobs"], 2);
}

#[test]
fn bad_usage_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(endslab(&["frobnicate"], tmp.path()).status.code(), Some(1));
    assert_eq!(endslab(&["run"], tmp.path()).status.code(), Some(1));
}
