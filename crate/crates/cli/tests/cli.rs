//! End-to-end tests of the `agp` binary: output formats, determinism, and
//! the exit-code contract (0 success, 1 verification failure, 2 input error).

use std::path::PathBuf;
use std::process::{Command, Output};

fn agp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn expand_golden_is_all_ones_with_zero_ratio() {
    let out = agp(&["expand", "golden", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "[1,1,1,1,1,1,1,1,1,1]");
    assert_eq!(lines.next().unwrap(), "n,digit,sum_log_digits,log_q,ratio");
    // every defined ratio row is exactly zero
    for line in lines {
        let ratio = line.rsplit(',').next().unwrap();
        if !ratio.is_empty() {
            assert_eq!(ratio.parse::<f64>().unwrap(), 0.0, "line {line}");
        }
    }
}

#[test]
fn expand_sqrt2_minus_one_converges_to_alpha_two() {
    let out = agp(&["expand", "sqrt2-1", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("[2,2,2,"));
    let last = text.lines().last().unwrap();
    let ratio: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    // ln 2 / ln(1 + sqrt 2) = 0.786439..., approached from above like 1/n
    assert!((ratio - 0.786_439_701_357_394_9).abs() < 0.02, "ratio {ratio}");
}

#[test]
fn expand_rational_terminates() {
    let out = agp(&["expand", "2/3", "10"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("[1,2] (terminates)\n"));
}

#[test]
fn expand_exhausted_decimal_exits_two() {
    let out = agp(&["expand", "0.414", "30"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("precision exhausted"), "stderr: {err}");
    assert!(err.contains("certain"), "stderr: {err}");
}

#[test]
fn precision_bits_widen_the_certain_prefix() {
    // the same literal with an explicit 2^-60 radius certifies more digits
    let out = agp(&["expand", "0.414", "30", "--precision-bits", "60"]);
    assert_eq!(out.status.code(), Some(2)); // 0.414 is rational; still exhausts
    let err = String::from_utf8(out.stderr).unwrap();
    let certain: usize = err
        .split("first ")
        .nth(1)
        .and_then(|s| s.split(' ').next())
        .and_then(|s| s.parse().ok())
        .expect("count in message");
    assert!(certain >= 5, "certain = {certain} from {err}");
}

#[test]
fn expand_garbage_exits_two() {
    let out = agp(&["expand", "xyz", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_grid_exits_two() {
    let out = agp(&["spectrum", "--grid", "obviously-bad"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_header_and_determinism() {
    let args = [
        "spectrum",
        "--grid",
        "0.3:0.7:3",
        "--truncation",
        "400",
        "--degree",
        "8",
        "--tol",
        "1e-7",
    ];
    let first = agp(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    assert_eq!(text.lines().next().unwrap(), "alpha,beta,t,f,err");
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));
    // byte-identical on a repeat run
    let second = agp(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn pressure_marks_the_infinite_region() {
    let out = agp(&[
        "pressure",
        "--beta",
        "0.1",
        "--grid",
        "0:1:2",
        "--truncation",
        "300",
        "--degree",
        "8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,beta,P,lower,upper");
    let first_row = lines.next().unwrap();
    assert!(first_row.contains(",inf,inf,inf"), "row: {first_row}");
    let second_row = lines.next().unwrap();
    assert!(!second_row.contains("inf"), "row: {second_row}");
}

#[test]
fn free_energy_rows_have_negative_slope() {
    let out = agp(&[
        "free-energy",
        "--grid",
        "0:1:2",
        "--truncation",
        "400",
        "--degree",
        "8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "beta,t,tprime,residual");
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let tprime: f64 = fields[2].parse().unwrap();
        assert!(tprime < 0.0, "row: {line}");
    }
}

#[test]
fn dimq_emits_integer_grid() {
    let out = agp(&["dimq", "--grid", "2:4:2", "--truncation", "400"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "q,dim,ratio");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("2,"));
    assert!(rows[1].starts_with("4,"));
    let dim2: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!(dim2 > 0.5 && dim2 < 1.0);
}

#[test]
fn config_file_applies_and_flags_win() {
    let dir = std::env::temp_dir().join("agp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path: PathBuf = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# sample config\ntruncation = 400\ndegree = 8\ngrid = 0.3:0.7:3\n",
    )
    .unwrap();
    let out_path = dir.join("spectrum.csv");
    // config grid gives 3 rows
    let out = agp(&[
        "spectrum",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 4);
    // the flag overrides the config grid: 2 rows
    let out = agp(&[
        "spectrum",
        "--config",
        cfg_path.to_str().unwrap(),
        "--grid",
        "0.4:0.6:2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = std::env::temp_dir().join("agp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("bad.cfg");
    std::fs::write(&cfg_path, "no_such_key = 1\n").unwrap();
    let out = agp(&["spectrum", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
