//! `agp` — pressure, free energy, multifractal spectrum, and restricted
//! dimensions for regular continued fractions, as CSV; plus digit expansion
//! and a one-shot verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input/precision error.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use agp_core::cf::{expand_real, log_q_trace, DigitWord, RealInput};
use agp_core::pressure::{pressure, AlphabetSpec, PressureQuery, PressureValue};
use agp_core::thermo::{dim_iq, ramharter_ratio, FreeEnergySolver, SpectrumSolver};
use agp_core::verify::{run_all, VerifyConfig, VerifyContext};
use agp_core::Error;

use config::{parse_config_file, GridSpec, RunConfig};

#[derive(Parser)]
#[command(
    name = "agp",
    about = "Arithmetic-geometric pressure toolkit for regular continued fractions",
    after_help = "Config file: flat `key = value` lines with `#` comments \
                  (keys: truncation, degree, tol, grid, out, precision_bits, beta). \
                  Flags win over the config file. CSV output is UTF-8 with LF line \
                  endings and 17 significant digits."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Config file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Largest digit kept in the alphabet.
    #[arg(long, global = true)]
    truncation: Option<u64>,

    /// Collocation degree of the transfer operator.
    #[arg(long, global = true)]
    degree: Option<usize>,

    /// Solver tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Evaluation grid, `start:stop:count`.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Output path for CSV (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Interval radius 2^-bits for decimal inputs to `expand`.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// First N continued-fraction digits of X with the per-prefix scaling
    /// trace. X is a rational ("2/3"), a decimal literal read as a half-ulp
    /// interval ("0.4142"), "golden", or "sqrt<D>-<K>" ("sqrt2-1").
    Expand { x: String, n: usize },
    /// Multifractal spectrum f(alpha) over a grid (CSV: alpha,beta,t,f,err).
    Spectrum,
    /// Pressure P(t, beta) over a t-grid at fixed beta
    /// (CSV: t,beta,P,lower,upper).
    Pressure {
        /// The beta at which the t-grid is evaluated.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Free energy t(beta) over a beta-grid
    /// (CSV: beta,t,tprime,residual).
    FreeEnergy,
    /// Restricted dimensions dim I_q over a q-grid (CSV: q,dim,ratio).
    Dimq,
    /// Run every verification check and print one PASS/FAIL line per check.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("agp: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        for (key, value) in parse_config_file(path)? {
            cfg.apply(&key, &value)?;
        }
    }
    if let Some(v) = cli.truncation {
        cfg.truncation = v;
    }
    if let Some(v) = cli.degree {
        cfg.degree = v;
    }
    if let Some(v) = cli.tol {
        cfg.tol = Some(v);
    }
    if let Some(g) = &cli.grid {
        cfg.grid = Some(GridSpec::parse(g)?);
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(b) = cli.precision_bits {
        cfg.precision_bits = Some(b);
    }
    Ok(cfg)
}

/// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn err_cell(e: &Error) -> String {
    e.to_string().replace(',', ";")
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg = resolve_config(&cli)?;
    match &cli.cmd {
        Cmd::Expand { x, n } => cmd_expand(&cfg, x, *n),
        Cmd::Spectrum => cmd_spectrum(&cfg),
        Cmd::Pressure { beta } => cmd_pressure(&cfg, beta.unwrap_or(cfg.beta)),
        Cmd::FreeEnergy => cmd_free_energy(&cfg),
        Cmd::Dimq => cmd_dimq(&cfg),
        Cmd::Verify => cmd_verify(&cfg),
    }
}

fn cmd_expand(cfg: &RunConfig, x: &str, n: usize) -> Result<ExitCode, String> {
    let input = RealInput::parse(x, cfg.precision_bits).map_err(|e| e.to_string())?;
    let (digits, terminated) = match expand_real(&input, n) {
        Ok(expansion) => (expansion.digits, expansion.terminated),
        Err(Error::PrecisionExhausted { certain, digits }) => {
            let list: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
            eprintln!(
                "agp: precision exhausted: only the first {certain} digits are certain: [{}]",
                list.join(",")
            );
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.to_string()),
    };
    let list: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
    println!(
        "[{}]{}",
        list.join(","),
        if terminated { " (terminates)" } else { "" }
    );
    let mut csv = String::from("n,digit,sum_log_digits,log_q,ratio\n");
    if !digits.is_empty() {
        let word = DigitWord::new(digits).map_err(|e| e.to_string())?;
        for row in log_q_trace(&word) {
            let ratio = row.ratio.map(num).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                row.n,
                row.digit,
                num(row.sum_log_digits),
                num(row.log_q),
                ratio
            ));
        }
    }
    write_csv(&cfg.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<ExitCode, String> {
    let grid = cfg
        .grid
        .unwrap_or(GridSpec {
            start: 0.05,
            stop: 0.95,
            count: 19,
        })
        .points();
    let fe = FreeEnergySolver::new(
        AlphabetSpec::full(cfg.truncation).map_err(|e| e.to_string())?,
        cfg.degree,
        cfg.tol_or(1e-9),
    )
    .map_err(|e| e.to_string())?;
    let solver = SpectrumSolver::new(fe);
    let rows = solver.curve(&grid);
    let mut csv = String::from("alpha,beta,t,f,err\n");
    let mut failures = 0usize;
    for row in &rows {
        match &row.point {
            Ok(p) => csv.push_str(&format!(
                "{},{},{},{},\n",
                num(p.alpha),
                num(p.beta),
                num(p.t),
                num(p.f)
            )),
            Err(e) => {
                failures += 1;
                csv.push_str(&format!("{},,,,{}\n", num(row.alpha), err_cell(e)));
            }
        }
    }
    write_csv(&cfg.out, &csv)?;
    if failures == rows.len() {
        return Err("every spectrum row failed".into());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_pressure(cfg: &RunConfig, beta: f64) -> Result<ExitCode, String> {
    let grid = cfg
        .grid
        .unwrap_or(GridSpec {
            start: 0.0,
            stop: 1.0,
            count: 11,
        })
        .points();
    let alphabet = AlphabetSpec::full(cfg.truncation).map_err(|e| e.to_string())?;
    let mut csv = String::from("t,beta,P,lower,upper\n");
    let mut failures = 0usize;
    for &t in &grid {
        let query = PressureQuery {
            t,
            beta,
            alphabet,
            depth: 1,
            tol: cfg.tol_or(1e-9),
        };
        match pressure(&query) {
            Ok(est) => {
                let v = match est.value {
                    PressureValue::Finite(v) => num(v),
                    PressureValue::Infinite => "inf".to_string(),
                };
                let bracket = |x: f64| {
                    if x.is_finite() {
                        num(x)
                    } else {
                        "inf".to_string()
                    }
                };
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    num(t),
                    num(beta),
                    v,
                    bracket(est.lower),
                    bracket(est.upper)
                ));
            }
            Err(e) => {
                failures += 1;
                eprintln!("agp: t = {t}: {e}");
                csv.push_str(&format!("{},{},nan,nan,nan\n", num(t), num(beta)));
            }
        }
    }
    write_csv(&cfg.out, &csv)?;
    if failures == grid.len() {
        return Err("every pressure row failed".into());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_free_energy(cfg: &RunConfig) -> Result<ExitCode, String> {
    let grid = cfg
        .grid
        .unwrap_or(GridSpec {
            start: -0.5,
            stop: 2.0,
            count: 11,
        })
        .points();
    let solver = FreeEnergySolver::new(
        AlphabetSpec::full(cfg.truncation).map_err(|e| e.to_string())?,
        cfg.degree,
        cfg.tol_or(1e-9),
    )
    .map_err(|e| e.to_string())?;
    let mut csv = String::from("beta,t,tprime,residual\n");
    let mut failures = 0usize;
    for &beta in &grid {
        match solver.solve(beta) {
            Ok(sample) => csv.push_str(&format!(
                "{},{},{},{}\n",
                num(beta),
                num(sample.t),
                num(sample.derivative),
                num(sample.residual)
            )),
            Err(e) => {
                failures += 1;
                eprintln!("agp: beta = {beta}: {e}");
                csv.push_str(&format!("{},nan,nan,nan\n", num(beta)));
            }
        }
    }
    write_csv(&cfg.out, &csv)?;
    if failures == grid.len() {
        return Err("every free-energy row failed".into());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dimq(cfg: &RunConfig) -> Result<ExitCode, String> {
    let spec = cfg.grid.unwrap_or(GridSpec {
        start: 2.0,
        stop: 64.0,
        count: 7,
    });
    let mut qs: Vec<u64> = spec
        .points()
        .iter()
        .map(|&x| x.round().max(1.0) as u64)
        .collect();
    qs.dedup();
    let mut csv = String::from("q,dim,ratio\n");
    let mut failures = 0usize;
    for &q in &qs {
        match dim_iq(q, cfg.tol_or(1e-3)) {
            Ok(dim) => {
                let ratio = if q >= 3 {
                    ramharter_ratio(q).map(num).unwrap_or_else(|_| "nan".into())
                } else {
                    "nan".into()
                };
                csv.push_str(&format!("{q},{},{ratio}\n", num(dim)));
            }
            Err(e) => {
                failures += 1;
                eprintln!("agp: q = {q}: {e}");
                csv.push_str(&format!("{q},nan,nan\n"));
            }
        }
    }
    write_csv(&cfg.out, &csv)?;
    if failures == qs.len() {
        return Err("every dimq row failed".into());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cfg: &RunConfig) -> Result<ExitCode, String> {
    let ctx = VerifyContext::new(VerifyConfig {
        truncation: cfg.truncation,
        degree: cfg.degree,
        tol: cfg.tol_or(1e-9),
    })
    .map_err(|e| e.to_string())?;
    let results = run_all(&ctx).map_err(|e| e.to_string())?;
    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        all_pass &= r.pass;
    }
    println!(
        "{} of {} checks passed",
        results.iter().filter(|r| r.pass).count(),
        results.len()
    );
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
