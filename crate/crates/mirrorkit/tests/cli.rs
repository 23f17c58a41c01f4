use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mirrorkit");

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MIRRORKIT_FIXTURES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unknown_verb_is_usage_error() {
    let o = run(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn theta_verify_passes_at_standard_parameters() {
    let o = run(&["theta", "verify", "--tau1", "0.3,0.8", "--tau2", "-0.1,0.7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("check: theta.jacobi_triple_product\nstatus: pass"));
    assert!(text.contains("truncation: 40"));
}

#[test]
fn theta_rejects_lower_half_plane() {
    let o = run(&["theta", "verify", "--tau1", "0.3,-0.8", "--tau2", "-0.1,0.7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mirror_of_u_e8e8_is_named_u() {
    let o = run(&["lattice", "mirror", "--m", &fixture("u_e8e8.gram")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("result.n_congruent_to: U\n"));
    assert!(text.contains("result.det_n: -1\n"));
    assert!(text.contains("result.signature_n: (1, 1)\n"));
}

#[test]
fn mirror_with_explicit_f() {
    let mut f = vec!["0"; 22];
    f[2] = "1";
    let f = f.join(",");
    let o = run(&["lattice", "mirror", "--m", &fixture("u_e8e8.gram"), "--f", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("result.f_source: given\n"));
    // A vector of M itself is not in the complement.
    let mut g = vec!["0"; 22];
    g[0] = "1";
    let o = run(&["lattice", "mirror", "--m", &fixture("u_e8e8.gram"), "--f", &g.join(",")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gram");
    std::fs::write(&bad, "rank 2\n0 1\n").unwrap();
    let o = run(&["lattice", "sig", "--gram", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 2 rows"));
    let o = run(&["lattice", "sig", "--gram", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    let o = run(&["polytope", "torus", "--in", &fixture("overlap.sub")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("check: torus.face_to_face\nstatus: fail"));
    let o = run(&["monodromy", "split", "--fact", &fixture("fact24.txt"), "--cut", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["monodromy", "split", "--fact", &fixture("fact24.txt"), "--cut", "12"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tol_only_tightens() {
    let args = ["glue", "elliptic", "--samples", "4"];
    assert_eq!(run(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.extend(["--tol", "1e-30"]);
    assert_eq!(run(&strict).status.code(), Some(1));
}

#[test]
fn json_report_is_valid_and_sorted() {
    let o = run(&["--format", "json", "suite", "monodromy"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(v["status"], "pass");
    assert!(v["inputs"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let to_file = run(&["quantize", "count", "--poly", &fixture("p2.poly"), "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("result.bs_count: 28\n"));
}

#[test]
fn seed_changes_samples_but_not_outcome() {
    let a = run(&["theta", "verify", "--samples", "10"]);
    let b = run(&["theta", "verify", "--samples", "10", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert!(stdout(&b).contains("seed: 7\n"));
}

fn copy_fixtures(dir: &Path) {
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
}

#[test]
fn corrupted_fixture_names_failing_check() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    // Moving a vertex makes the quintic simplex non-reflexive.
    std::fs::write(dir.path().join("quintic.poly"), "dim 4\n-1 -1 -1 -1\n5 -1 -1 -1\n-1 4 -1 -1\n-1 -1 4 -1\n-1 -1 -1 4\n")
        .unwrap();
    let o = Command::new(BIN).args(["suite", "polytope"]).env("MIRRORKIT_FIXTURES", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("check: c5.quintic.reflexive\nstatus: fail"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("check failed: c5.quintic.reflexive"));
}

#[test]
fn missing_fixture_is_a_failing_check() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    std::fs::remove_file(dir.path().join("two.gram")).unwrap();
    let o = Command::new(BIN).args(["suite", "lattice"]).env("MIRRORKIT_FIXTURES", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("check: c4.fixture.two.gram\nstatus: fail"));
}

#[test]
fn suite_reports_are_deterministic_and_timed_on_stderr() {
    let a = run(&["suite", "quantize"]);
    let b = run(&["suite", "quantize"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("suite quantize:"));
}

#[test]
fn each_suite_owns_its_criteria() {
    let expect = [
        ("theta", &["c1.", "c2.", "c3."][..]),
        ("lattice", &["c4."][..]),
        ("polytope", &["c5."][..]),
        ("quantize", &["c6.", "c8."][..]),
        ("monodromy", &["c7."][..]),
    ];
    for (suite, tags) in expect {
        let text = stdout(&run(&["suite", suite]));
        for line in text.lines().filter_map(|l| l.strip_prefix("check: ")) {
            if line.starts_with('c') && line.as_bytes().get(1).is_some_and(u8::is_ascii_digit) {
                assert!(tags.iter().any(|t| line.starts_with(t)), "{suite} reports {line}");
            }
        }
        for t in tags {
            assert!(text.contains(&format!("check: {t}")), "{suite} lacks {t}");
        }
    }
}

fn linear_samples(path: &Path, s: [[f64; 2]; 2]) {
    let m = 100;
    let mut text = String::from("grid 2 0.01\n");
    for i in 0..m {
        for j in 0..m {
            let (x, y) = (i as f64 / m as f64, j as f64 / m as f64);
            let (a, b) = (s[0][0] * x + s[0][1] * y, s[1][0] * x + s[1][1] * y);
            text.push_str(&format!("{x} {y} {a} {b}\n"));
        }
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn curvature_from_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    linear_samples(&path, [[2.0, 1.0], [1.0, 3.0]]);
    let o = run(&["quantize", "curvature", "--samples", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // s = (2x + y, 2x + 3y) has d_x s_y - d_y s_x = 1.
    linear_samples(&path, [[2.0, 1.0], [2.0, 3.0]]);
    let o = run(&["quantize", "curvature", "--samples", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cup_and_kulikov() {
    let o = run(&["monodromy", "cup", "--class", "0", "1", "0", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result.type: Type II\n"));
    let o = run(&["monodromy", "kulikov", "--gram", &fixture("type2.mat")]);
    assert!(stdout(&o).contains("result.type: Type II\n"));
    let o = run(&["monodromy", "cup", "--class", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn section_of_two() {
    let o = run(&["quantize", "section", "--matrix", &fixture("two.mat")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result.points: (0) (1/2)\n"));
}

#[test]
fn classify_lists_sixteen() {
    let o = run(&["polytope", "classify2d"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result.classes: 16\n"));
}
