use std::path::Path;
use std::process::{Command, Output};

fn sensornet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sensornet")).args(args).env_remove("SENSORNET_CONFIG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(csv: &'a str, row: usize, name: &str) -> &'a str {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines.nth(row).unwrap().split(',').nth(col).unwrap()
}

#[test]
fn pgm_spot_value() {
    let o = sensornet(&["sweep", "--strategy", "pgm", "--n", "2", "--theta", "pi/8", "--probe", "entangled"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(
        out.lines().next().unwrap(),
        "strategy,N,k,theta,p,probe,closed_form_success,numeric_success,failure_prob,error_prob,abs_diff,guessing_baseline,degenerate"
    );
    assert_eq!(out.lines().count(), 2);
    let v: f64 = field(&out, 0, "closed_form_success").parse().unwrap();
    assert!((v - 0.8535534).abs() < 5e-8);
    assert_eq!(field(&out, 0, "guessing_baseline"), "0.5");
}

#[test]
fn degenerate_theta_row() {
    let o = sensornet(&["report", "--strategy", "pgm", "--n", "4", "--theta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, 0, "degenerate"), "true");
    assert_eq!(field(&out, 0, "numeric_success"), "0.25");
}

#[test]
fn rows_are_sorted_and_numbers_use_17_digits() {
    let o = sensornet(&["sweep", "--strategy", "pgm_null,pgm", "--n", "4,2", "--theta", "0.3,0.1", "--p", "0.5,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let keys: Vec<(String, usize, f64, String)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[3].parse().unwrap(), f[4].to_string())
        })
        .collect();
    assert_eq!(keys.len(), 4 + 8);
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.total_cmp(&b.2)).then(a.3.cmp(&b.3)));
    assert_eq!(keys, sorted);
    assert_eq!(field(&out, 0, "theta"), "0.10000000000000001");
}

#[test]
fn json_mirrors_csv_fields() {
    let o = sensornet(&["sweep", "--strategy", "unambiguous", "--n", "4", "--theta", "0.2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v.as_array().unwrap()[0];
    for key in [
        "strategy",
        "N",
        "k",
        "theta",
        "p",
        "probe",
        "closed_form_success",
        "numeric_success",
        "failure_prob",
        "error_prob",
        "abs_diff",
        "guessing_baseline",
        "degenerate",
    ] {
        assert!(row.get(key).is_some(), "missing {key}");
    }
    assert!(row["error_prob"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--strategy", "pgm,pgm_numeric", "--n", "2:6:3", "--theta", "0.1:0.7:4", "--p", "0.25"];
    let a = sensornet(&args);
    let b = sensornet(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn degrees_flag_converts_exactly() {
    let rad = sensornet(&["report", "--strategy", "min_error_2", "--n", "2", "--theta", "pi/8"]);
    let deg = sensornet(&["report", "--strategy", "min_error_2", "--n", "2", "--theta", "22.5", "--degrees"]);
    assert_eq!(rad.stdout, deg.stdout);
}

#[test]
fn invalid_parameters_exit_2_naming_field() {
    for (args, flag) in [
        (&["sweep", "--strategy", "pgm", "--n", "2", "--theta", "0.9"][..], "--theta"),
        (&["sweep", "--strategy", "pgm_null", "--n", "2", "--theta", "0.1", "--p", "1.5"][..], "--p"),
        (&["sweep", "--strategy", "pgm", "--n", "1", "--theta", "0.1"][..], "--n"),
        (&["sweep", "--strategy", "bogus", "--n", "2", "--theta", "0.1"][..], "--strategy"),
        (&["sweep", "--strategy", "pgm", "--n", "2", "--theta", "0.1", "--probe", "ghz"][..], "--probe"),
        (&["sweep", "--strategy", "pgm", "--n", "2", "--theta", "0.1", "--format", "xml"][..], "--format"),
        (&["sweep", "--strategy", "pgm", "--n", "2"][..], "--theta"),
        (&["optimize", "--n", "7", "--theta", "0.1"][..], "--n"),
        (&["verify", "--preset", "huge"][..], "--preset"),
    ] {
        let o = sensornet(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(sensornet(&["sweep", "--unknown"]).status.code(), Some(2));
    assert_eq!(sensornet(&[]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("out.csv");
    let o = sensornet(&["sweep", "--strategy", "pgm", "--n", "2", "--theta", "0.1", "--out", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let args = ["sweep", "--strategy", "pgm", "--n", "2,4", "--theta", "0.2"];
    let direct = sensornet(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let o = sensornet(&with_out);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_env_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# grid\nstrategy = pgm\nn = 2, 4\ntheta = 0.1\n");
    let from_file = sensornet(&["sweep", "--config", &cfg]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(stdout(&from_file).lines().count(), 3);

    let from_env =
        Command::new(env!("CARGO_BIN_EXE_sensornet")).args(["sweep"]).env("SENSORNET_CONFIG", &cfg).output().unwrap();
    assert_eq!(from_env.stdout, from_file.stdout);

    let overridden = sensornet(&["sweep", "--config", &cfg, "--n", "6"]);
    let out = stdout(&overridden);
    assert_eq!(out.lines().count(), 2);
    assert_eq!(field(&out, 0, "N"), "6");

    let bad = write_config(dir.path(), "colour = blue\n");
    assert_eq!(sensornet(&["sweep", "--config", &bad]).status.code(), Some(2));
    let missing = dir.path().join("nope.conf");
    assert_eq!(sensornet(&["sweep", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn verify_quick_passes_and_zero_tolerance_fails() {
    let start = std::time::Instant::now();
    let o = sensornet(&["verify", "--preset", "quick"]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let summary = out.lines().last().unwrap();
    let (m, n) = summary.strip_prefix("PASS ").unwrap().split_once('/').unwrap();
    assert_eq!(m, n);
    assert!(out.lines().filter(|l| l.starts_with("FAIL")).count() == 0);

    let z = sensornet(&["verify", "--preset", "quick", "--tolerance", "0"]);
    assert_eq!(z.status.code(), Some(1));
    assert!(stdout(&z).lines().any(|l| l.starts_with("FAIL")));
}

#[test]
#[allow(clippy::approx_constant)]
fn optimize_two_detector_reference() {
    let o = sensornet(&["optimize", "--n", "2", "--theta", "pi/8", "--objective", "min_overlap", "--restarts", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let value: f64 = field(&out, 0, "value").parse().unwrap();
    let analytic: f64 = field(&out, 0, "analytic").parse().unwrap();
    assert!((value - 0.7071068).abs() < 1e-6);
    assert!((analytic - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    // weight sits on |+-> and |-+> only
    let coeffs: Vec<(f64, f64)> = out
        .lines()
        .skip(3)
        .map(|l| {
            let f: Vec<f64> = l.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .collect();
    let w: Vec<f64> = coeffs.iter().map(|(re, im)| re * re + im * im).collect();
    assert!(w[0] < 1e-9 && w[3] < 1e-9);
    assert!((w[1] - 0.5).abs() < 1e-6 && (w[2] - 0.5).abs() < 1e-6);

    let flat = sensornet(&["optimize", "--n", "2", "--theta", "pi/4", "--restarts", "20"]);
    let value: f64 = field(&stdout(&flat), 0, "value").parse().unwrap();
    assert!(value < 1e-9);

    let args = ["optimize", "--n", "4", "--theta", "0.3", "--restarts", "5", "--seed", "42"];
    assert_eq!(sensornet(&args).stdout, sensornet(&args).stdout);
}
