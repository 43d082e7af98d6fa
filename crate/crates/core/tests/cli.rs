use std::fs;
use std::io::Write;
use std::process::{Command, Stdio};

use bergerkit_core::cli;
use bergerkit_core::measure::Measure;
use bergerkit_core::shift::WeightSequence;
use bergerkit_core::Scalar;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: &str) -> Out {
    let mut argv = vec!["bergerkit"];
    argv.extend_from_slice(args);
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &mut input, &mut out, &mut err);
    Out {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Pipes `stdin` through the built binary.
fn run_bin(args: &[&str], stdin: &str) -> Out {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bergerkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

/// Rows of a tab separated table, skipping comment and header lines.
fn table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn parse_f64(s: &str) -> f64 {
    match Scalar::parse_decimal(s) {
        Some(r) => r.to_f64(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn square_of_lebesgue_is_minus_log() {
    let leb = run(&["measure", "catalog", "lebesgue"], "");
    assert_eq!(leb.code, 0, "{}", leb.stderr);
    let sq = run(&["measure", "square"], &leb.stdout);
    assert_eq!(sq.code, 0, "{}", sq.stderr);
    let m = Measure::from_json(&sq.stdout).unwrap();
    assert_eq!(m.terms().len(), 1);
    for x in [0.1, 0.5, 2.0, 7.0] {
        // density of -ln t at t = e^{-x} is x
        assert!((m.density_at_log(x) - x).abs() < 1e-14);
    }
}

#[test]
fn catalog_pipes_into_moments() {
    let c = run_bin(&["measure", "catalog", "pth-lebesgue", "--q", "0.5"], "");
    assert_eq!(c.code, 0, "{}", c.stderr);
    let m = run_bin(&["measure", "moments", "-n", "10"], &c.stdout);
    assert_eq!(m.code, 0, "{}", m.stderr);
    assert!(m.stdout.starts_with("# values:"));
    let rows = table(&m.stdout);
    assert_eq!(rows.len(), 11);
    for row in rows {
        let n: f64 = row[0].parse().unwrap();
        let g = parse_f64(&row[1]);
        assert!((g - 1.0 / (n + 1.0).sqrt()).abs() < 1e-15, "n={n} g={g}");
    }
}

#[test]
fn quadrature_moments_agree() {
    let c = run(&["measure", "catalog", "pth-lebesgue", "--q", "3/2"], "");
    let m = run(&["measure", "moments", "-n", "6", "--quad"], &c.stdout);
    assert_eq!(m.code, 0, "{}", m.stderr);
    for row in table(&m.stdout) {
        let n: f64 = row[0].parse().unwrap();
        let g = parse_f64(&row[1]);
        assert!((g - (n + 1.0).powf(-1.5)).abs() < 1e-10, "n={n} g={g}");
    }
}

#[test]
fn aluthge_of_bergman_square_is_agler3() {
    let sq = run(&["shift", "transform", "--shift", "bergman", "--op", "pow", "--p", "2"], "");
    assert_eq!(sq.code, 0, "{}", sq.stderr);
    let at = run_bin(&["shift", "transform", "--op", "aluthge"], &sq.stdout);
    assert_eq!(at.code, 0, "{}", at.stderr);
    let w: WeightSequence = serde_json::from_str(&at.stdout).unwrap();
    for n in 0..30usize {
        assert_eq!(w.weight_sq(n).unwrap(), Scalar::ratio(n as i64 + 1, n as i64 + 3), "n={n}");
    }
}

#[test]
fn shift_test_exit_codes() {
    let pass = run(&["shift", "test", "--shift", "constant:1", "--khypo", "1", "--mmax", "5"], "");
    assert_eq!(pass.code, 0, "{}", pass.stderr);
    assert!(pass.stdout.contains("pass"));

    // moments 1, 1/2, 1, ... are not even 1-hyponormal
    let fail = run(&["shift", "test", "--khypo", "1", "--mmax", "3"], r#"{"moments":["1","1/2","1","1/2","1","1/2","1"]}"#);
    assert_eq!(fail.code, 1, "{}{}", fail.stdout, fail.stderr);

    let json = run(&["shift", "test", "--shift", "bergman", "--khypo", "2", "--ncontr", "3", "--mmax", "6", "--json"], "");
    assert_eq!(json.code, 0, "{}", json.stderr);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn backstep_feasible_and_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let twot = dir.path().join("twot.json");
    fs::write(&twot, r#"{"terms":[{"coeff":"2","alpha":"1","k":"0"}]}"#).unwrap();
    let ext = dir.path().join("ext.json");
    let ok = run(
        &["shift", "transform", "--op", "backstep", "--x", "0.5", "--in", twot.to_str().unwrap(), "--out", ext.to_str().unwrap()],
        "",
    );
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(ok.stderr.contains("feasible"), "{}", ok.stderr);
    let m = Measure::from_json(&fs::read_to_string(&ext).unwrap()).unwrap();
    // prefixed weight 1/2 on moments 2/(n+2): γ_0 = 1, γ_n = (1/4) 2/(n+1)
    assert_eq!(m.moment(0), Scalar::one());
    for n in 1..12i64 {
        assert_eq!(m.moment(n as u32), Scalar::ratio(1, 2 * (n + 1)), "n={n}");
    }

    let bad = run(&["shift", "transform", "--op", "backstep", "--x", "2", "--in", twot.to_str().unwrap()], "");
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.contains("infeasible") || bad.stderr.contains("infeasible"));
}

#[test]
fn sqrt_atomic_exit_codes() {
    let two = r#"{"atoms":[{"log_pos":"0","mass":"1/2"},{"log_pos":"1","mass":"1/2"}]}"#;
    let none = run(&["measure", "sqrt-atomic"], two);
    assert_eq!(none.code, 1);
    assert!(format!("{}{}", none.stdout, none.stderr).contains("support mismatch"));

    // (1/2)δ_1 + (1/2)δ_{e^{-1}} squares to (1/4)δ_1 + (1/2)δ_{e^{-1}} + (1/4)δ_{e^{-2}}
    let three = r#"{"atoms":[{"log_pos":"0","mass":"1/4"},{"log_pos":"1","mass":"1/2"},{"log_pos":"2","mass":"1/4"}]}"#;
    let root = run(&["measure", "sqrt-atomic"], three);
    assert_eq!(root.code, 0, "{}", root.stderr);
    let m = Measure::from_json(&root.stdout).unwrap();
    assert_eq!(m, Measure::from_json(r#"{"atoms":[{"log_pos":"0","mass":"1/2"},{"log_pos":"1","mass":"1/2"}]}"#).unwrap());
}

#[test]
fn verify_square_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let nu = dir.path().join("nu.json");
    fs::write(
        &nu,
        r#"{"zero_mass":"1/4","atoms":[{"log_pos":"1/3","mass":"1/4"}],"terms":[{"coeff":"1","alpha":"1","k":"1"}]}"#,
    )
    .unwrap();
    let mu = dir.path().join("mu.json");
    let sq = run(&["measure", "square", "--in", nu.to_str().unwrap()], "");
    assert_eq!(sq.code, 0, "{}", sq.stderr);
    fs::write(&mu, &sq.stdout).unwrap();
    let v = run(&["measure", "verify-square", mu.to_str().unwrap(), nu.to_str().unwrap(), "--json"], "");
    assert_eq!(v.code, 0, "{}{}", v.stdout, v.stderr);
    let q = run(&["measure", "verify-square", mu.to_str().unwrap(), nu.to_str().unwrap(), "--quad"], "");
    assert_eq!(q.code, 0, "{}{}", q.stdout, q.stderr);

    // ν is not a square root of itself
    let wrong = run(&["measure", "verify-square", nu.to_str().unwrap(), nu.to_str().unwrap()], "");
    assert_eq!(wrong.code, 1);
}

#[test]
fn plotdata_minus_log() {
    let sq = run(&["measure", "square"], &run(&["measure", "catalog", "lebesgue"], "").stdout);
    let p = run(&["plotdata", "--samples", "5"], &sq.stdout);
    assert_eq!(p.code, 0, "{}", p.stderr);
    let rows: Vec<Vec<f64>> = p
        .stdout
        .lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    for (i, r) in rows.iter().enumerate() {
        let t = (i + 1) as f64 / 6.0;
        assert!((r[0] - t).abs() < 1e-11);
        assert!((r[1] + t.ln()).abs() < 1e-10);
        // ∫_0^t -ln s ds
        assert!((r[2] - (t - t * t.ln())).abs() < 1e-10);
    }
}

#[test]
fn plotdata_atomic_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("plot.csv");
    let two = r#"{"atoms":[{"log_pos":"0","mass":"1/2"},{"log_pos":"1","mass":"1/2"}]}"#;
    let p = run(&["plotdata", "--samples", "3", "--out", csv.to_str().unwrap()], two);
    assert_eq!(p.code, 0, "{}", p.stderr);
    let body = fs::read_to_string(&csv).unwrap();
    for line in body.lines().skip(1) {
        assert_eq!(line.split(',').nth(1), Some(""), "{line}");
    }
    let atoms = fs::read_to_string(dir.path().join("plot.atoms.csv")).unwrap();
    assert_eq!(atoms.lines().count(), 3);

    let few = run(&["plotdata", "--samples", "1"], two);
    assert_eq!(few.code, 2);
}

#[test]
fn sqrt_geometric_leading_coefficients() {
    let g = run(&["measure", "sqrt-geometric", "--masses", "1/2,1/4,1/8,1/16,1/32,1/64"], "");
    assert_eq!(g.code, 0, "{}", g.stderr);
    let rows = table(&g.stdout);
    assert_eq!(rows.len(), 6);
    // (2 - z)^{-1/2} = 2^{-1/2} Σ C(2n, n) (z/8)^n
    let mut central = 1.0;
    for (n, row) in rows.iter().enumerate() {
        if n > 0 {
            central *= (2 * n * (2 * n - 1)) as f64 / (n * n) as f64;
        }
        let want = central / 8f64.powi(n as i32) / 2f64.sqrt();
        assert!((parse_f64(&row[1]) - want).abs() < 1e-15, "n={n}");
    }
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["measure", "bogus"], "").code, 2);
    assert_eq!(run(&["measure", "moments", "--in", "/nonexistent/mu.json", "-n", "3"], "").code, 2);
    assert_eq!(run(&["measure", "catalog", "nope"], "").code, 2);
    assert_eq!(run(&["shift", "show", "--shift", "mystery"], "").code, 2);
    assert_eq!(run(&["measure", "square"], "{not json").code, 2);
    assert_eq!(run_bin(&["--help"], "").code, 0);
    assert_eq!(run_bin(&["--version"], "").code, 0);
}

#[test]
fn decimal_flag() {
    let exact = run(&["measure", "moments", "-n", "3"], &run(&["measure", "catalog", "lebesgue"], "").stdout);
    assert!(exact.stdout.contains("1/4"));
    let dec = run(&["--decimal", "--digits", "5", "measure", "moments", "-n", "3"], &run(&["measure", "catalog", "lebesgue"], "").stdout);
    assert!(!dec.stdout.contains("1/4"));
    assert!(dec.stdout.contains("2.5000e-1"), "{}", dec.stdout);
}
