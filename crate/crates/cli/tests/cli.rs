use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shexchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

#[test]
fn seeded_generate_matches_golden() {
    let manifest = fixture("chain.toml");
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let golden = std::fs::read_to_string(fixture("chain.golden.ttl")).unwrap();
    assert_eq!(text(&out.stdout), golden);
}

#[test]
fn generate_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("chain.ttl");
    let manifest = fixture("chain.toml");
    let out = run(&[
        "generate",
        manifest.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let golden = std::fs::read_to_string(fixture("chain.golden.ttl")).unwrap();
    assert_eq!(std::fs::read_to_string(target).unwrap(), golden);
}

#[test]
fn input_used_as_source_exits_2() {
    let manifest = fixture("bad_wiring.toml");
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("#out:"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_instance_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("production.shex"), dir.path().join("p.shex")).unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(
        &manifest,
        "version = 1\n[[instances]]\nname = \"p\"\ntemplate = \"p.shex\"\n\
         [[edges]]\nfrom = { instance = \"p\", var = \"exVar:product\" }\n\
         to = { instance = \"ghost\", var = \"exVar:good\" }\n",
    )
    .unwrap();
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("ghost"));
}

#[test]
fn bad_manifest_version_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(&manifest, "version = 2\n").unwrap();
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("version 2"));
}

#[test]
fn unknown_manifest_key_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(&manifest, "version = 1\nseeds = 3\n").unwrap();
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("seeds"));
}

#[test]
fn duplicate_instance_name_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("production.shex"), dir.path().join("p.shex")).unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(
        &manifest,
        "version = 1\n[[instances]]\nname = \"p\"\ntemplate = \"p.shex\"\n\
         [[instances]]\nname = \"p\"\ntemplate = \"p.shex\"\n",
    )
    .unwrap();
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("declared twice"));
}

#[test]
fn empty_manifest_emits_base_only() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.toml");
    std::fs::write(&manifest, "version = 1\n").unwrap();
    let out = run(&["generate", manifest.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(text(&out.stdout), "@base <http://fokus.fraunhofer.de/> .\n");
}

#[test]
fn check_reports_io_variables() {
    let template = fixture("production.shex");
    let out = run(&["check", template.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        text(&out.stdout),
        "shapes: 1\n\
         exvars: exVar:location, exVar:product\n\
         in: exVar:location\n\
         out: exVar:product, exVar:location\n"
    );
    assert!(out.stderr.is_empty());
}

#[test]
fn check_warns_without_shapes() {
    let template = fixture("directives_only.shex");
    let out = run(&["check", template.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).starts_with("shapes: 0\n"));
    assert!(text(&out.stderr).contains("warning"));
}

#[test]
fn check_rejects_import_with_position() {
    let template = fixture("import.shex");
    let out = run(&["check", template.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = text(&out.stderr);
    assert!(err.contains("import.shex:2:1"), "{err}");
    assert!(err.contains("IMPORT"));
}

#[test]
fn check_missing_file_exits_1() {
    let out = run(&["check", "/nonexistent/none.shex"]);
    assert_eq!(out.status.code(), Some(1));
}
