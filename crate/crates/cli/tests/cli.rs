use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PANTS: &str = r#"{"hexagons":2,"gluings":[[[0,0],[1,0]],[[0,1],[1,1]],[[0,2],[1,2]]]}"#;

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("psicoord-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, text: &str) -> String {
    let p = dir.join(file);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psicoord"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn field(out: &str, key: &str) -> Vec<f64> {
    let line = out
        .lines()
        .find(|l| l.starts_with(&format!("{key} ")))
        .unwrap();
    line.split_whitespace()
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect()
}

#[test]
fn hex_unit_lengths() {
    let o = run(&["hex", "--l", "1,1,1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    // cosh θ = (cosh 1 + cosh^2 1) / sinh^2 1
    let c = 1f64.cosh();
    let theta = ((c + c * c) / 1f64.sinh().powi(2)).acosh();
    for t in field(&out, "theta") {
        assert!((t - theta).abs() < 1e-10);
        assert!((t - 1.7049).abs() < 1e-4);
    }
    for r in field(&out, "r") {
        assert!((r - theta / 2.0).abs() < 1e-10);
    }
    assert!(field(&out, "tangent_residual")[0] < 1e-12);
}

#[test]
fn hex_from_theta_inverts() {
    let o = run(&["hex", "--theta", "1.2,0.8,2.0"]);
    let l = field(&stdout(&o), "l");
    let back = run(&[
        "hex",
        "--l",
        &l.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(","),
    ]);
    for (a, b) in field(&stdout(&back), "theta").iter().zip([1.2, 0.8, 2.0]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn mlambda_prints_both_routes() {
    let o = run(&["mlambda", "--lambda", "-2"]);
    assert_eq!(stdout(&o), "1.000000000000 1.000000000000\n");
    let o = run(&["mlambda", "--lambda", "-1"]);
    let v: Vec<f64> = stdout(&o)
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(v
        .iter()
        .all(|x| (x - std::f64::consts::FRAC_PI_2).abs() < 1e-11));
}

#[test]
fn forward_check_solve_round_trip() {
    let dir = workdir("round");
    let complex = write(&dir, "pants.json", PANTS);
    let metric = write(&dir, "m.json", r#"{"lengths":[0.7,1.3,2.1]}"#);
    let o = run(&[
        "psi",
        "--complex",
        &complex,
        "--metric",
        &metric,
        "--lambda",
        "-0.5",
    ]);
    assert_eq!(code(&o), 0);
    let target = write(&dir, "z.json", &stdout(&o));

    let o = run(&[
        "check",
        "--complex",
        &complex,
        "--lambda",
        "-0.5",
        "--target",
        &target,
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("verdict inside\n"));

    let hrep = run(&["polytope", "--complex", &complex, "--lambda", "-0.5"]);
    let system = write(&dir, "p.txt", &stdout(&hrep));
    assert_eq!(
        code(&run(&["check", "--system", &system, "--target", &target])),
        0
    );

    let report = dir.join("report.json");
    let report = report.to_str().unwrap();
    let o = run(&[
        "solve",
        "--complex",
        &complex,
        "--lambda",
        "-0.5",
        "--target",
        &target,
        "--report-json",
        report,
    ]);
    assert_eq!(code(&o), 0);
    for (a, b) in field(&stdout(&o), "lengths").iter().zip([0.7, 1.3, 2.1]) {
        assert!((a - b).abs() < 1e-8);
    }
    // the report doubles as a metric file
    let again = run(&[
        "psi",
        "--complex",
        &complex,
        "--metric",
        report,
        "--lambda",
        "-0.5",
    ]);
    assert_eq!(code(&again), 0);
    let json = fs::read_to_string(report).unwrap();
    assert!(json.contains("\"trace\""));
}

#[test]
fn check_exit_codes() {
    let dir = workdir("check");
    let complex = write(&dir, "pants.json", PANTS);
    let check = |psi: &str, extra: &[&str]| {
        let target = write(&dir, "t.json", psi);
        let mut args = vec![
            "check",
            "--complex",
            &complex,
            "--lambda",
            "-2",
            "--target",
            &target,
        ];
        args.extend_from_slice(extra);
        code(&run(&args))
    };
    assert_eq!(check(r#"{"psi":[0.5,0.5,0.5]}"#, &[]), 0);
    assert_eq!(check(r#"{"psi":[5,0.5,0.5]}"#, &[]), 2);
    // (1,1,0) cycle sum is exactly zero
    assert_eq!(check(r#"{"psi":[0.5,-0.5,0.7]}"#, &[]), 3);
    assert_eq!(check(r#"{"psi":[0.5,0.5,0.5]}"#, &["--cap", "3"]), 4);
    assert_eq!(check(r#"{"psi":[0.5,0.5]}"#, &[]), 70);
}

#[test]
fn paths_and_cycles() {
    let dir = workdir("paths");
    let complex = write(&dir, "pants.json", PANTS);
    let count = |args: &[&str]| {
        let mut a = vec!["paths", "--complex", &complex];
        a.extend_from_slice(args);
        stdout(&run(&a))
            .lines()
            .filter(|l| !l.starts_with('#'))
            .count()
    };
    assert_eq!(count(&[]), 23);
    assert_eq!(count(&["--cycles"]), 10);
    assert_eq!(count(&["--allow-backtrack"]), 26);
    assert_eq!(count(&["--cycles", "--allow-backtrack"]), 13);
    let first = stdout(&run(&["paths", "--complex", &complex]));
    assert_eq!(first.lines().next().unwrap(), "0 0 1 # H0 e2 H1");
}

#[test]
fn probe_is_deterministic_csv() {
    let args = [
        "probe",
        "--scenario",
        "one_to_inf",
        "--grid",
        "1:30:5",
        "--fixed",
        "1,1",
    ];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "t,l1,l2,l3,theta1,theta2,theta3,r1,r2,r3");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 30.0);
    assert!((last[5] - (1.0 / 1f64.tanh()).acosh()).abs() < 1e-6);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["hex"])), 64);
    assert_eq!(code(&run(&["hex", "--l", "1,2"])), 64);
    assert_eq!(code(&run(&["mlambda", "--lambda", "abc"])), 64);
    assert_eq!(
        code(&run(&["probe", "--scenario", "sideways", "--grid", "1,2"])),
        64
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn input_errors_exit_65() {
    let dir = workdir("input");
    let complex = write(&dir, "pants.json", PANTS);
    let broken = write(&dir, "broken.json", "{\"lengths\": [1, 2");
    let missing = dir.join("missing.json");
    let o = run(&[
        "psi",
        "--complex",
        &complex,
        "--metric",
        &broken,
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 65);
    let o = run(&[
        "psi",
        "--complex",
        missing.to_str().unwrap(),
        "--metric",
        &broken,
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 65);
    let negative = write(&dir, "neg.json", r#"{"lengths":[1,-1,1]}"#);
    let o = run(&[
        "psi",
        "--complex",
        &complex,
        "--metric",
        &negative,
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 65);
}

#[test]
fn domain_errors_exit_70_with_error_name() {
    let dir = workdir("domain");
    let odd = write(&dir, "odd.json", r#"{"hexagons":1,"gluings":[]}"#);
    let metric = write(&dir, "m.json", r#"{"lengths":[1,1,1]}"#);
    let o = run(&[
        "psi",
        "--complex",
        &odd,
        "--metric",
        &metric,
        "--lambda",
        "1",
    ]);
    assert_eq!(code(&o), 70);
    assert!(String::from_utf8_lossy(&o.stderr).contains("OddHexagonCount"));

    let complex = write(&dir, "pants.json", PANTS);
    let far = write(&dir, "far.json", r#"{"psi":[5,5,5]}"#);
    let o = run(&[
        "solve",
        "--complex",
        &complex,
        "--lambda",
        "-1",
        "--target",
        &far,
    ]);
    assert_eq!(code(&o), 70);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotInPolytope"));
}
