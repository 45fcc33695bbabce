use std::process::{Command, Output};

use geneuler::qcalc::{big_e_q, q_factorial, q_number};
use geneuler::regime::{report, CubicCoeffs, Regime};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geneuler")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&a)).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn assert_exit(args: &[&str], code: i32) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic should be one line: {err}");
    err
}

#[test]
fn pmf_matches_euler_law() {
    let (header, rows) = csv_rows(&stdout(&["pmf", "--q", "0.5", "--m", "0", "--lambda", "0.5"]));
    assert_eq!(header, ["j", "p_j", "cumulative"]);
    let (tail, body) = rows.split_last().unwrap();
    assert_eq!(tail[0], "tail_bound");
    assert!(tail[1].parse::<f64>().unwrap() < 1e-12);
    let mut cum = 0.0;
    for row in body {
        let j: u32 = row[0].parse().unwrap();
        let p: f64 = row[1].parse().unwrap();
        let expect = 0.5f64.powi(j as i32) / q_factorial(j, 0.5).unwrap() * big_e_q(-0.5, 0.5).unwrap();
        assert!((p - expect).abs() < 1e-14, "j={j}");
        cum += p;
        assert!((row[2].parse::<f64>().unwrap() - cum).abs() < 1e-14);
    }
    assert!((cum - 1.0).abs() < 1e-12);
}

#[test]
fn pmf_point_mass_and_domain_edge() {
    let (_, rows) = csv_rows(&stdout(&["pmf", "--q", "0.5", "--m", "2", "--lambda", "0"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "2");
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.0);
    let err = assert_exit(&["pmf", "--q", "0.5", "--m", "1", "--lambda", "1.1"], 2);
    assert!(err.contains("lambda"));
    assert_exit(&["pmf", "--q", "0.04", "--m", "1", "--lambda", "0.1"], 2);
    assert_exit(&["pmf", "--q", "0.5", "--m", "61", "--lambda", "0"], 2);
    assert_exit(&["pmf", "--q", "0.5", "--m", "1"], 2);
    assert_exit(&["pmf", "--q", "0.5", "--m", "1", "--lambda", "0.1", "--zmod", "0.2"], 2);
}

#[test]
fn floats_round_trip() {
    let text = stdout(&["pmf", "--q", "0.7", "--m", "3", "--lambda", "0.4"]);
    let (_, rows) = csv_rows(&text);
    for row in &rows {
        for cell in &row[1..] {
            if cell.is_empty() {
                continue;
            }
            let x: f64 = cell.parse().unwrap();
            assert_eq!(&format!("{x:.16e}"), cell);
        }
    }
}

#[test]
fn zmod_is_squared() {
    let a = json(&["moments", "--q", "0.6", "--m", "2", "--zmod", "0.5"]);
    let b = json(&["moments", "--q", "0.6", "--m", "2", "--lambda", "0.25"]);
    assert_eq!(a, b);
}

#[test]
fn moments_examples() {
    let v = json(&["moments", "--q", "0.5", "--m", "0", "--lambda", "0.5"]);
    assert!((v["mean"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!((v["mandel_q"].as_f64().unwrap() + 0.25).abs() < 1e-15);
    assert_eq!(v["regime"], "sub-poissonian");

    for m in 0..4u32 {
        let v = json(&["moments", "--q", "0.7", "--m", &m.to_string(), "--lambda", "0"]);
        assert!((v["mean"].as_f64().unwrap() - q_number(f64::from(m), 0.7).unwrap()).abs() < 1e-15);
        assert_eq!(v["variance"].as_f64().unwrap(), 0.0);
    }
    let v = json(&["moments", "--q", "0.7", "--m", "0", "--lambda", "0"]);
    assert!(v["mandel_q"].is_null() && v["regime"].is_null());

    let r = report(0.95, 1).unwrap();
    let mid = r.domain_max / 2.0;
    let expect = r.intervals.iter().find(|i| mid >= i.lo && mid < i.hi).unwrap().regime;
    let v = json(&["moments", "--q", "0.95", "--m", "1", "--lambda", &mid.to_string()]);
    assert_eq!(v["regime"], expect.as_str());
}

#[test]
fn classify_report() {
    let v = json(&["classify", "--q", "0.95", "--m", "1", "--lambda", "5"]);
    let kinds: Vec<&str> = v["intervals"].as_array().unwrap().iter().map(|i| i["regime"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["sub-poissonian", "super-poissonian", "sub-poissonian"]);
    assert_eq!(v["m_q"], 20);
    assert_eq!(v["regime"], Regime::SuperPoissonian.as_str());
    let w = json(&["classify", "--q", "0.95", "--m", "1", "--lambda", "5", "--classifier", "mandel-moments"]);
    assert_eq!(w["regime"], v["regime"]);

    let v = json(&["classify", "--q", "0.5", "--m", "3"]);
    assert!(v["m_q"].is_null() && v["lambda_plus"].is_null() && v["regime"].is_null());
    assert_eq!(v["intervals"].as_array().unwrap().len(), 1);

    let (header, rows) = csv_rows(&stdout(&["classify", "--q", "0.9", "--m", "2"]));
    assert_eq!(header, ["field", "value"]);
    assert!(rows.iter().any(|r| r[0] == "interval.1.regime" && r[1] == "super-poissonian"));
    assert_exit(&["classify", "--q", "0.9", "--m", "2", "--classifier", "nope"], 2);
}

#[test]
fn phase_diagram_rows() {
    let (header, rows) = csv_rows(&stdout(&["phase-diagram", "--q-min", "0.8", "--q-max", "0.99", "--steps", "39"]));
    assert_eq!(header, ["q", "delta_tilde", "zeta_q", "m_q"]);
    assert_eq!(rows.len(), 39);
    let q0 = (5.0 * 5f64.sqrt() - 2.0) / 11.0;
    for r in &rows {
        let q: f64 = r[0].parse().unwrap();
        assert_eq!(r[3].is_empty(), q <= q0, "q={q}");
        if !r[2].is_empty() {
            let z: f64 = r[2].parse().unwrap();
            assert!(CubicCoeffs::new(q).unwrap().eval(z).abs() < 1e-9);
        }
    }
    assert!(rows.last().unwrap()[3] == "190");

    let v = json(&["phase-diagram", "--q-min", "0.9", "--q-max", "0.9", "--steps", "1", "--zeta-solver", "bisection"]);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["m_q"], 5);
    assert_exit(&["phase-diagram", "--q-min", "0.9", "--q-max", "0.8", "--steps", "3"], 2);
    assert_exit(&["phase-diagram", "--q-min", "0.01", "--q-max", "0.8", "--steps", "3"], 2);
    assert_exit(&["phase-diagram", "--q-min", "0.1", "--q-max", "0.8", "--steps", "0"], 2);
}

#[test]
fn sample_is_seeded_and_deterministic() {
    let err = assert_exit(&["sample", "--q", "0.6", "--m", "1", "--lambda", "0.5", "--n", "10"], 2);
    assert!(err.contains("--seed"));
    let args = ["sample", "--q", "0.6", "--m", "1", "--lambda", "0.5", "--n", "2000", "--seed", "9"];
    let a = run(&args).stdout;
    assert_eq!(a, run(&args).stdout);
    let v = json(&args);
    assert_eq!(v["draws"].as_array().unwrap().len(), 2000);
    let s = &v["summary"];
    let z = (s["empirical_mean"].as_f64().unwrap() - s["expected_mean"].as_f64().unwrap()) / s["std_error"].as_f64().unwrap();
    assert!(z.abs() < 4.0);
}

#[test]
fn pgf_methods() {
    let base = ["pgf", "--q", "0.7", "--m", "2", "--lambda", "0.3", "--t=-1,0.3,1"];
    let closed = json(&base);
    let mut b = base.to_vec();
    b.extend(["--method", "brute-force"]);
    let brute = json(&b);
    for (x, y) in closed.as_array().unwrap().iter().zip(brute.as_array().unwrap()) {
        assert!((x["value"].as_f64().unwrap() - y["value"].as_f64().unwrap()).abs() < 1e-10);
    }
    assert!((closed[2]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_exit(&["pgf", "--q", "0.7", "--m", "2", "--lambda", "0.3", "--t", "1.5"], 2);
    assert_exit(&["pgf", "--q", "0.7", "--m", "2", "--lambda", "0.3", "--t", "0.5", "--method", "nope"], 2);
}

#[test]
fn verify_quick_passes() {
    let v = json(&["verify", "--level", "quick"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 11);
    for s in v["suites"].as_array().unwrap() {
        assert!(s["points"].as_u64().unwrap() > 0);
    }
}

#[test]
fn verify_negative_control() {
    let o = run(&["verify", "--suite", "normalization", "--inject-perturbation", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("normalization/table-mass"), "{err}");
    assert_exit(&["verify", "--suite", "nope"], 2);
}
