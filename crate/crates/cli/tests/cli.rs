use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use syzygp_cli::problem::ProblemSpec;
use syzygp_cli::{EXIT_NOT_PARAMETRIZABLE, REPORT_HEADER};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn syzygp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syzygp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bundled_problems_parse_and_round_trip() {
    for name in ["divfree.prob", "maxwell.prob", "control.prob", "torsion.prob"] {
        let src = fs::read_to_string(problem(name)).unwrap();
        let spec = ProblemSpec::parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = spec.to_string();
        assert_eq!(ProblemSpec::parse(&printed).unwrap(), spec, "{name}");
    }
    let maxwell = ProblemSpec::parse(&fs::read_to_string(problem("maxwell.prob")).unwrap()).unwrap();
    assert_eq!((maxwell.system.nrows(), maxwell.system.ncols()), (8, 10));
}

#[test]
fn format_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let once = stdout(&syzygp(&["format", problem("divfree.prob").to_str().unwrap()]));
    let path = dir.path().join("p.prob");
    fs::write(&path, &once).unwrap();
    let twice = stdout(&syzygp(&["format", path.to_str().unwrap()]));
    assert_eq!(once, twice);
}

#[test]
fn parametrize_divfree_succeeds() {
    let o = syzygp(&["parametrize", problem("divfree.prob").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with(REPORT_HEADER));
    assert!(s.contains("parametrizable = true\n[B]\nshape = 3x3\n"), "{s}");
}

#[test]
fn torsion_exits_with_two_and_reports_unit_row() {
    let o = syzygp(&["parametrize", problem("torsion.prob").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_NOT_PARAMETRIZABLE));
    let s = stdout(&o);
    assert!(s.contains("parametrizable = false"));
    assert!(s.ends_with("[A']\nshape = 1x1\n1\n"), "{s}");
    // later stages are skipped but the verdict is the same
    let o = syzygp(&["predict", problem("torsion.prob").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_NOT_PARAMETRIZABLE));
}

#[test]
fn syntax_errors_point_at_the_caret() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.prob");
    fs::write(&path, "[ring]\ncoordinates = x\nd1 = differentiate(x)\n[matrix]\nd1^\n").unwrap();
    let o = syzygp(&["parametrize", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.prob:5:3:"), "{err}");
}

#[test]
fn missing_file_is_an_error() {
    let o = syzygp(&["parametrize", "/nonexistent/problem.prob"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let o = syzygp(&[
            "predict",
            problem("control.prob").to_str().unwrap(),
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["report.txt", "kernel.txt", "fit.txt", "predictions.csv"] {
        let a = fs::read(dirs[0].path().join(f)).unwrap();
        let b = fs::read(dirs[1].path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn maxwell_prediction_circulates() {
    let dir = tempfile::tempdir().unwrap();
    let o = syzygp(&[
        "predict",
        problem("maxwell.prob").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,component,mean,std"));
    let value = |x: f64, y: f64, c: usize| -> f64 {
        lines_for(&csv)
            .find(|r| r[0] == x && r[1] == y && r[4] as usize == c)
            .unwrap_or_else(|| panic!("no row for ({x}, {y}) component {c}"))[5]
    };
    // B = (Bx, By) = components 3, 4
    assert!(value(1.0, 0.0, 4) > 0.0);
    assert!(value(-1.0, 0.0, 4) < 0.0);
    assert!(value(0.0, 1.0, 3) < 0.0);
    assert!(value(0.0, -1.0, 3) > 0.0);
}

fn lines_for(csv: &str) -> impl Iterator<Item = Vec<f64>> + '_ {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
}

#[test]
fn pushforward_prints_parseable_entries() {
    let o = syzygp(&["pushforward", problem("control.prob").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let vars = syzygp_core::KernelVars::new(["t"]);
    let entry = s.lines().find_map(|l| l.strip_prefix("[2,2] ")).unwrap();
    let e = vars.parse(entry).unwrap();
    assert_eq!(
        e,
        vars.parse("(t2 - t1 - 1)*(t1 - t2 - 1)/(t1^3*t2^3)*exp(-1/2*(t1 - t2)^2)")
            .unwrap()
    );
}

#[test]
fn fit_selects_from_noise_grid() {
    let dir = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(problem("control.prob")).unwrap().replace(
        "noise = 1e-10",
        "noise = 1e-6\nfit_noise = 1e-12, 1e-10, 1e-8, 1e-6, 1e-4",
    );
    let path = dir.path().join("control.prob");
    fs::write(&path, src).unwrap();
    let o = syzygp(&["fit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let fit = &s[s.find("# syzygp fit v1").unwrap()..];
    assert!(fit.contains("[candidates]"));
    assert_eq!(fit.lines().filter(|l| l.contains(": ")).count(), 5);
    assert!(
        !fit.contains("noise = 1e-6\n") && !fit.contains("noise = 0.000001\n"),
        "{fit}"
    );
}

#[test]
fn check_passes_on_bundled_examples() {
    for name in ["divfree.prob", "control.prob"] {
        let o = syzygp(&[
            "check",
            problem(name).to_str().unwrap(),
            "--seed",
            "11",
            "--samples",
            "50",
        ]);
        let s = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{s}");
        assert!(s.contains("annihilation = true") && s.contains("passed = true"), "{s}");
    }
}

#[test]
fn lex_order_gives_a_parametrization_too() {
    let o = syzygp(&[
        "parametrize",
        "--order",
        "lex",
        problem("divfree.prob").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("parametrizable = true"));
}
