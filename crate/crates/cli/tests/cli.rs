use std::path::{Path, PathBuf};

use fedosov_cli::{parse_job, run, CliError};
use fedosov_core::fedosov::Observable;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn golden_cases() -> Vec<(String, PathBuf, Vec<String>)> {
    let mut cases: Vec<_> = std::fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "job"))
        .map(|job| {
            let args = std::fs::read_to_string(job.with_extension("args")).unwrap();
            let name = job.file_stem().unwrap().to_string_lossy().into_owned();
            (name, job, args.split_whitespace().map(String::from).collect())
        })
        .collect();
    cases.sort();
    cases
}

fn run_job(job: &Path, extra: &[&str]) -> Result<String, CliError> {
    let mut args = vec!["fedosov".to_string(), "--job".into(), job.display().to_string()];
    args.extend(extra.iter().map(|s| s.to_string()));
    run(args)
}

fn write_job(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fedosov-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Regenerate with `FEDOSOV_UPDATE_GOLDEN=1 cargo test -p fedosov-cli --test cli`.
#[test]
fn golden_outputs() {
    let update = std::env::var_os("FEDOSOV_UPDATE_GOLDEN").is_some();
    let cases = golden_cases();
    assert_eq!(cases.len(), 6);
    for (name, job, args) in cases {
        let extra: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run_job(&job, &extra).unwrap();
        let path = job.with_extension("out");
        if update {
            std::fs::write(&path, &out).unwrap();
        }
        assert_eq!(out, std::fs::read_to_string(&path).unwrap(), "{name}");
        assert_eq!(out, run_job(&job, &extra).unwrap(), "{name}: rerun");
    }
}

#[test]
fn command_examples() {
    let job = golden_dir().join("flat_plane.job");
    assert_eq!(run_job(&job, &["star", "x", "p"]).unwrap(), "q1*q2 + (1/2)i*hbar\n");
    assert_eq!(run_job(&job, &["star", "x", "one"]).unwrap(), "q1\n");
    assert_eq!(run_job(&job, &["bracket", "x", "p"]).unwrap(), "1\n");
    assert_eq!(run_job(&job, &["bracket", "p2", "p2"]).unwrap(), "0\n");
    assert_eq!(run_job(&job, &["bracket", "x", "p2"]).unwrap(), "2*q2\n");
    assert_eq!(run(["fedosov", "rank", "2", "1,2"]).unwrap(), "2\n");
    assert_eq!(run(["fedosov", "unrank", "2", "0", "1"]).unwrap(), "()\n");
    assert_eq!(run(["fedosov", "unrank", "4", "2", "2"]).unwrap(), "(1,2)\n");
    assert_eq!(run(["fedosov", "position", "2", "re", "0", "1"]).unwrap(), "3\n");
    assert_eq!(run(["fedosov", "position", "2", "im", "0", "()"]).unwrap(), "2\n");
}

#[test]
fn verbose_star_prints_lifts() {
    let job = golden_dir().join("flat_plane.job");
    let out = run_job(&job, &["--verbose", "star", "x", "p"]).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "lift x = hbar^0 * 1 * (q1) + hbar^0 * X1 * (1)");
    assert!(lines[1].starts_with("lift p = "));
    assert_eq!(lines[2], "q1*q2 + (1/2)i*hbar");
}

#[test]
fn order_flag_overrides_job() {
    let job = golden_dir().join("flat_hbar.job");
    let low = run_job(&job, &["--order", "2", "star", "f", "g"]).unwrap();
    let full = run_job(&job, &["star", "f", "g"]).unwrap();
    assert_ne!(low, full);
    assert!(!low.contains("hbar^2"));
}

#[test]
fn check_passes_on_flat_and_curved_jobs() {
    for name in ["flat_plane", "curved_constant", "curved_four"] {
        let out = run_job(&golden_dir().join(format!("{name}.job")), &["check"]).unwrap();
        assert!(out.lines().all(|l| l.ends_with(": pass")), "{name}: {out}");
        assert!(out.starts_with("validate: pass\ncurvature: pass\ncentrality: pass\n"));
    }
}

#[test]
fn asymmetric_connection_fails_validation() {
    let job = write_job("asym.job", "[chart]\ntwo_n = 2\norder = 4\n[connection]\n1 1 2 : q1\n2 1 1 : q2\n[observables]\nf = q1\n");
    let e = run_job(&job, &["check"]).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let CliError::CheckFailed { report, .. } = &e else { panic!("{e}") };
    assert!(report.starts_with("validate: fail (validation failed: connection is not totally symmetric"));
    assert!(report.contains("curvature: skipped\ncentrality: skipped\nlifts: skipped\n"));
    let e = run_job(&job, &["star", "f", "f"]).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    assert!(e.to_string().contains("Gamma[1, 1, 2] = q1 but Gamma[2, 1, 1] = q2"), "{e}");
}

#[test]
fn exit_codes() {
    let bad_poly = write_job("badpoly.job", "[chart]\ntwo_n = 2\norder = 4\n[observables]\nf = q1 +\n");
    let e = run_job(&bad_poly, &["star", "f", "f"]).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().starts_with("line 5:"));

    let odd = write_job("odd.job", "[chart]\ntwo_n = 3\norder = 4\n");
    assert_eq!(run_job(&odd, &["check"]).unwrap_err().exit_code(), 3);
    let low = write_job("low.job", "[chart]\ntwo_n = 2\norder = 1\n[observables]\nf = q1\n");
    assert_eq!(run_job(&low, &["star", "f", "f"]).unwrap_err().exit_code(), 3);
    let plane = golden_dir().join("flat_plane.job");
    assert_eq!(run_job(&plane, &["star", "x", "nope"]).unwrap_err().exit_code(), 3);
    assert_eq!(run(["fedosov", "star", "x", "p"]).unwrap_err().exit_code(), 2);
    assert_eq!(run(["fedosov", "rank", "2", "1,3"]).unwrap_err().exit_code(), 3);
    assert_eq!(run(["fedosov", "rank", "2", "1,a"]).unwrap_err().exit_code(), 2);
    assert_eq!(run(["fedosov", "unrank", "2", "1", "3"]).unwrap_err().exit_code(), 3);
    assert_eq!(run(["fedosov", "frobnicate"]).unwrap_err().exit_code(), 2);
}

#[test]
fn job_parser() {
    let job = parse_job(
        "# header\n[chart]\ntwo_n = 4   # inline\norder = 5\n\n[connection]\n1 2 3 : q1 + 1/2\n[observables]\nf_1 = q1*hbar\n",
    )
    .unwrap();
    assert_eq!(job.two_n, Some(4));
    assert_eq!(job.order, Some(5));
    assert_eq!(job.connection.len(), 1);
    assert_eq!(job.connection[0].line, 7);
    assert_eq!(job.connection[0].value, ([1, 2, 3], "q1 + 1/2".to_string()));
    assert_eq!(job.observables[0].value, ("f_1".to_string(), "q1*hbar".to_string()));
    let p = job.prepare(None).unwrap();
    assert_eq!(p.observable("f_1").unwrap(), &Observable::parse("hbar*q1", 4, 5).unwrap());
    assert_eq!(job.prepare(Some(3)).unwrap().order, 3);

    for (text, line) in [
        ("two_n = 2\n", 1),
        ("[chart]\n[bogus]\n", 2),
        ("[chart]\nwidth = 2\n", 2),
        ("[chart]\ntwo_n = two\n", 2),
        ("[connection]\n1 2 : q1\n", 2),
        ("[connection]\n1 2 x : q1\n", 2),
        ("[connection]\n1 2 3 q1\n", 2),
        ("[observables]\n2f = q1\n", 2),
        ("[observables]\nf = q1\nf = q2\n", 3),
        ("[observables]\nf q1\n", 2),
    ] {
        match parse_job(text) {
            Err(CliError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    let missing = parse_job("[chart]\norder = 4\n").unwrap();
    assert_eq!(missing.prepare(None).unwrap_err().exit_code(), 3);
    let bad_conn = parse_job("[chart]\ntwo_n = 2\norder = 4\n[connection]\n1 1 1 : q5\n").unwrap();
    match bad_conn.prepare(None) {
        Err(CliError::Parse { line: 5, message }) => assert!(message.contains("unknown variable")),
        other => panic!("{other:?}"),
    }
    let out_of_range = parse_job("[chart]\ntwo_n = 2\norder = 4\n[connection]\n1 1 3 : 1\n").unwrap();
    assert_eq!(out_of_range.prepare(None).unwrap_err().exit_code(), 3);
}

#[test]
fn graded_output_reparses() {
    for (name, job, args) in golden_cases() {
        let text = std::fs::read_to_string(job.with_extension("out")).unwrap();
        let p = parse_job(&std::fs::read_to_string(&job).unwrap()).unwrap().prepare(None).unwrap();
        let joined = text.lines().collect::<Vec<_>>().join(" + ");
        let parsed = Observable::parse(&joined, p.two_n, p.order).unwrap();
        let flat_args: Vec<&str> = args.iter().map(String::as_str).filter(|a| *a != "--graded").collect();
        let flat = run_job(&job, &flat_args).unwrap();
        assert_eq!(Observable::parse(flat.trim_end(), p.two_n, p.order).unwrap(), parsed, "{name}");
    }
}

#[test]
fn binary_exit_statuses() {
    let bin = env!("CARGO_BIN_EXE_fedosov");
    let plane = golden_dir().join("flat_plane.job");
    let ok = std::process::Command::new(bin).args(["--job"]).arg(&plane).args(["star", "x", "p"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap(), "q1*q2 + (1/2)i*hbar\n");
    let asym = write_job("asym-bin.job", "[chart]\ntwo_n = 2\norder = 4\n[connection]\n1 2 2 : 1\n2 2 1 : 2\n");
    let failed = std::process::Command::new(bin).args(["--job"]).arg(&asym).arg("check").output().unwrap();
    assert_eq!(failed.status.code(), Some(3));
    assert!(String::from_utf8(failed.stdout).unwrap().starts_with("validate: fail"));
    assert!(String::from_utf8(failed.stderr).unwrap().contains("check(s) failed"));
    let usage = std::process::Command::new(bin).arg("rank").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let help = std::process::Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8(help.stdout).unwrap().contains("bracket"));
}
