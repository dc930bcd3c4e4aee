//! One-shot verification suite: every quantitative claim the library is
//! expected to reproduce, each as a pass/fail check with its expected value,
//! measured value, and tolerance.

use std::time::Instant;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::cf::{convergents, scaling_ratio, DigitWord};
use crate::error::Result;
use crate::operator::pressure_via_operator_deg;
use crate::pressure::{analytic_bounds, is_finite, partition_sum, AlphabetSpec, PressureQuery};
use crate::special::{alpha0, zeta};
use crate::thermo::{
    verify_epsilon_lemma, FreeEnergySolver, SpectrumSolver,
};

/// Outcome of one acceptance check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: &'static str,
    pub expected: String,
    pub got: String,
    pub tol: String,
    pub pass: bool,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "{:<22} expected={:<34} got={:<40} tol={:<18} {} ({:.1}s)",
            self.id,
            self.expected,
            self.got,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds
        )
    }
}

/// Configuration shared by all checks.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub truncation: u64,
    pub degree: usize,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            truncation: 10_000,
            degree: 16,
            tol: 1e-9,
        }
    }
}

/// Shared solver state; the free-energy cache carries over between checks.
pub struct VerifyContext {
    pub cfg: VerifyConfig,
    pub spect: SpectrumSolver,
}

impl VerifyContext {
    pub fn new(cfg: VerifyConfig) -> Result<Self> {
        let fe = FreeEnergySolver::new(
            AlphabetSpec::full(cfg.truncation.max(10_000))?,
            cfg.degree.max(16),
            cfg.tol,
        )?;
        Ok(VerifyContext {
            cfg,
            spect: SpectrumSolver::new(fe),
        })
    }
}

pub const CHECK_IDS: [&str; 14] = [
    "alpha0",
    "t_at_zero",
    "spectrum_apex",
    "t_prime_at_zero",
    "zeta_slice",
    "finiteness_boundary",
    "pressure_sandwich",
    "oracle_equivalence",
    "monotone_pressure",
    "endpoint_trends",
    "ramharter_trend",
    "epsilon_lemma",
    "identity_properties",
    "convexity_concavity",
];

/// Run a single check by id.
pub fn run_check(ctx: &VerifyContext, id: &str) -> Result<CheckResult> {
    let start = Instant::now();
    let mut result = match id {
        "alpha0" => check_alpha0()?,
        "t_at_zero" => check_t_at_zero(ctx)?,
        "spectrum_apex" => check_spectrum_apex(ctx)?,
        "t_prime_at_zero" => check_t_prime_at_zero(ctx)?,
        "zeta_slice" => check_zeta_slice(ctx)?,
        "finiteness_boundary" => check_finiteness_boundary(ctx)?,
        "pressure_sandwich" => check_pressure_sandwich(ctx)?,
        "oracle_equivalence" => check_oracle_equivalence(ctx)?,
        "monotone_pressure" => check_monotone_pressure(ctx)?,
        "endpoint_trends" => check_endpoint_trends(ctx)?,
        "ramharter_trend" => check_ramharter_trend()?,
        "epsilon_lemma" => check_epsilon_lemma()?,
        "identity_properties" => check_identity_properties()?,
        "convexity_concavity" => check_convexity_concavity(ctx)?,
        other => {
            return Err(crate::error::Error::Precondition(format!(
                "unknown check id {other:?}"
            )))
        }
    };
    result.seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Run the whole suite in order.
pub fn run_all(ctx: &VerifyContext) -> Result<Vec<CheckResult>> {
    CHECK_IDS.iter().map(|id| run_check(ctx, id)).collect()
}

fn check(id: &'static str, expected: String, got: String, tol: String, pass: bool) -> CheckResult {
    CheckResult {
        id,
        expected,
        got,
        tol,
        pass,
        seconds: 0.0,
    }
}

const ALPHA0_REF: f64 = 0.8325;
const TWO_LN_GOLDEN: f64 = 0.962_423_650_119_206_9;

fn check_alpha0() -> Result<CheckResult> {
    let started = Instant::now();
    let a = alpha0(1e-5)?;
    let elapsed = started.elapsed().as_secs_f64();
    let pass = (a - ALPHA0_REF).abs() <= 5e-4 && elapsed < 1.0;
    Ok(check(
        "alpha0",
        format!("{ALPHA0_REF} (runtime < 1s)"),
        format!("{a:.6} in {elapsed:.3}s"),
        "5e-4".into(),
        pass,
    ))
}

fn check_t_at_zero(ctx: &VerifyContext) -> Result<CheckResult> {
    let started = Instant::now();
    let sample = ctx.spect.fe.solve(0.0)?;
    let elapsed = started.elapsed().as_secs_f64();
    let pass = (sample.t - 1.0).abs() <= 1e-3 && elapsed < 10.0;
    Ok(check(
        "t_at_zero",
        "1 (runtime < 10s)".into(),
        format!("{:.6} in {elapsed:.2}s", sample.t),
        "1e-3".into(),
        pass,
    ))
}

fn check_spectrum_apex(ctx: &VerifyContext) -> Result<CheckResult> {
    let a0 = alpha0(1e-7)?;
    let apex = ctx.spect.point(a0)?;
    // dense argmax scan around the reference location 0.8325
    let grid: Vec<f64> = (0..=60).map(|i| 0.8175 + 5e-4 * i as f64).collect();
    let rows = ctx.spect.curve(&grid);
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for row in &rows {
        if let Ok(p) = &row.point {
            if p.f > best.1 {
                best = (p.alpha, p.f);
            }
        }
    }
    let pass = (apex.f - 1.0).abs() <= 2e-3
        && apex.beta.abs() <= 2e-2
        && (best.0 - a0).abs() <= 1e-3;
    Ok(check(
        "spectrum_apex",
        format!("f(a0)=1, beta=0, argmax at a0={a0:.4}"),
        format!(
            "f={:.5}, beta={:.4}, argmax={:.4}",
            apex.f, apex.beta, best.0
        ),
        "2e-3 / 2e-2 / 1e-3".into(),
        pass,
    ))
}

fn check_t_prime_at_zero(ctx: &VerifyContext) -> Result<CheckResult> {
    let started = Instant::now();
    let a0 = alpha0(1e-7)?;
    let tp = ctx.spect.fe.t_prime(0.0, 1e-4)?;
    let elapsed = started.elapsed().as_secs_f64();
    let pass = (tp + a0).abs() <= 2e-3 && elapsed < 30.0;
    Ok(check(
        "t_prime_at_zero",
        format!("{:.6} (runtime < 30s)", -a0),
        format!("{tp:.6} in {elapsed:.2}s"),
        "2e-3".into(),
        pass,
    ))
}

fn check_zeta_slice(ctx: &VerifyContext) -> Result<CheckResult> {
    let alphabet = AlphabetSpec::full(ctx.cfg.truncation)?;
    let mut got = Vec::new();
    let mut pass = true;
    for beta in [0.75, 1.0, 2.0] {
        let est = pressure_via_operator_deg(0.0, beta, alphabet, 1e-13, ctx.cfg.degree)?;
        let v = est.value.finite().expect("finite region");
        let target = zeta(2.0 * beta, 1e-12)?.value.ln();
        let tail = est.upper - v;
        let ok = (v - target).abs() <= 1e-6 + tail;
        pass &= ok;
        got.push(format!("beta={beta}: |{v:.6}-{target:.6}|<=1e-6+{tail:.1e}"));
    }
    Ok(check(
        "zeta_slice",
        "P(0,beta) = ln zeta(2 beta) within certified tails".into(),
        got.join("; "),
        "1e-6 + tail".into(),
        pass,
    ))
}

fn check_finiteness_boundary(ctx: &VerifyContext) -> Result<CheckResult> {
    // 5x5 sign grid including the exact boundary 2(t+beta) = 1
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut pass = true;
    for &t in &grid {
        for &beta in &grid {
            let expected = 2.0 * (t + beta) > 1.0;
            pass &= is_finite(t, beta) == expected;
        }
    }
    // truncation-divergence scan at the infinite point (0.25, 0.25)
    let low = pressure_via_operator_deg(0.25, 0.25, AlphabetSpec::full(100)?, 1e-13, ctx.cfg.degree)?
        .value
        .finite()
        .expect("finite for finite alphabet");
    let high =
        pressure_via_operator_deg(0.25, 0.25, AlphabetSpec::full(10_000)?, 1e-13, ctx.cfg.degree)?
            .value
            .finite()
            .expect("finite for finite alphabet");
    let growth = high - low;
    pass &= growth > 0.5;
    Ok(check(
        "finiteness_boundary",
        "sign grid exact; log-lambda growth > 0.5 from M=1e2 to M=1e4".into(),
        format!("grid ok; growth = {growth:.3}"),
        "exact / 0.5".into(),
        pass,
    ))
}

fn sandwich_grid() -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for &t in &[0.0, 0.5, 1.0] {
        for &beta in &[0.6, 1.0, 2.0] {
            if is_finite(t, beta) {
                pts.push((t, beta));
            }
        }
    }
    pts
}

fn check_pressure_sandwich(ctx: &VerifyContext) -> Result<CheckResult> {
    let alphabet = AlphabetSpec::full(ctx.cfg.truncation)?;
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for (t, beta) in sandwich_grid() {
        let bounds = analytic_bounds(t, beta)?;
        let op = pressure_via_operator_deg(t, beta, alphabet, 1e-13, ctx.cfg.degree)?;
        let lo_ok = bounds.lower <= op.upper + 1e-9;
        let hi_ok = op.lower <= bounds.upper + 1e-9;
        pass &= lo_ok && hi_ok;
        worst = worst
            .min(op.upper + 1e-9 - bounds.lower)
            .min(bounds.upper + 1e-9 - op.lower);
    }
    Ok(check(
        "pressure_sandwich",
        "analytic lower <= operator pressure <= analytic upper (certified)".into(),
        format!("9-point grid, worst margin {worst:.2e}"),
        "certified tails".into(),
        pass,
    ))
}

fn check_oracle_equivalence(_ctx: &VerifyContext) -> Result<CheckResult> {
    let alphabet = AlphabetSpec::full(30)?;
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (t, beta) in [(1.0, 0.0), (0.8, 0.2), (0.6, 0.6)] {
        let op = pressure_via_operator_deg(t, beta, alphabet, 1e-13, 16)?
            .value
            .finite()
            .expect("finite");
        for depth in 2..=6u32 {
            let z = partition_sum(&PressureQuery {
                t,
                beta,
                alphabet,
                depth,
                tol: 1e-12,
            })? / depth as f64;
            let gap = (z - op).abs();
            let bound = std::f64::consts::LN_2 / depth as f64 + 1e-6;
            pass &= gap <= bound;
            worst = worst.max(gap * depth as f64 / std::f64::consts::LN_2);
        }
    }
    Ok(check(
        "oracle_equivalence",
        "|ln Z_n / n - log lambda| <= ln2/n + 1e-6, n=2..6, M=30".into(),
        format!("max gap = {worst:.3} * ln2/n"),
        "ln2/n + 1e-6".into(),
        pass,
    ))
}

fn check_monotone_pressure(ctx: &VerifyContext) -> Result<CheckResult> {
    let alphabet = AlphabetSpec::full(ctx.cfg.truncation)?;
    let h = 1e-4;
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    for (t, beta) in sandwich_grid() {
        let p0 = pressure_via_operator_deg(t, beta, alphabet, 1e-13, ctx.cfg.degree)?
            .value
            .finite()
            .expect("finite");
        let p1 = pressure_via_operator_deg(t + h, beta, alphabet, 1e-13, ctx.cfg.degree)?
            .value
            .finite()
            .expect("finite");
        let slope = (p1 - p0) / h;
        pass &= slope <= -TWO_LN_GOLDEN + 1e-6;
        worst = worst.max(slope);
    }
    Ok(check(
        "monotone_pressure",
        format!("dP/dt <= -2 ln golden = {:.6}", -TWO_LN_GOLDEN),
        format!("max slope = {worst:.6}"),
        "1e-6".into(),
        pass,
    ))
}

fn check_endpoint_trends(ctx: &VerifyContext) -> Result<CheckResult> {
    // alpha -> 0: f decreasing along {0.05, 0.02, 0.01}, dropping below 0.15
    let small = [0.05, 0.02, 0.01];
    let mut f_small = Vec::new();
    for &a in &small {
        f_small.push(ctx.spect.point(a)?.f);
    }
    let small_ok =
        f_small[0] > f_small[1] && f_small[1] > f_small[2] && f_small[1] < 0.15 && f_small[2] < 0.15;
    // alpha -> 1: f - 1/2 positive and decreasing on the reachable grid
    let near_one = [0.90, 0.93, 0.96];
    let mut f_one = Vec::new();
    for &a in &near_one {
        f_one.push(ctx.spect.point(a)?.f);
    }
    let one_ok = f_one.iter().all(|&f| f > 0.5)
        && f_one[0] - 0.5 > f_one[1] - 0.5
        && f_one[1] - 0.5 > f_one[2] - 0.5;
    Ok(check(
        "endpoint_trends",
        "f -> 0 monotonically (dropping below 0.15) and f -> 1/2 from above".into(),
        format!(
            "f(0.05,0.02,0.01)=({:.4},{:.4},{:.4}); f(0.90,0.93,0.96)=({:.4},{:.4},{:.4})",
            f_small[0], f_small[1], f_small[2], f_one[0], f_one[1], f_one[2]
        ),
        "monotone".into(),
        small_ok && one_ok,
    ))
}

fn check_ramharter_trend() -> Result<CheckResult> {
    let started = Instant::now();
    let mut ratios = Vec::new();
    for q in [100u64, 1_000, 10_000] {
        ratios.push(crate::thermo::ramharter_ratio(q)?);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let window = ratios.iter().all(|r| (0.3..=0.8).contains(r));
    // distance to the asymptotic limit 1/2 may not grow by more than the
    // slack per decade
    let trend = (ratios[1] - 0.5).abs() <= (ratios[0] - 0.5).abs() + 0.05
        && (ratios[2] - 0.5).abs() <= (ratios[1] - 0.5).abs() + 0.05;
    let pass = window && trend && elapsed < 300.0;
    Ok(check(
        "ramharter_trend",
        "ratios in [0.3, 0.8], drifting toward 1/2 within 0.05/decade, < 5min".into(),
        format!(
            "({:.4}, {:.4}, {:.4}) in {elapsed:.1}s",
            ratios[0], ratios[1], ratios[2]
        ),
        "[0.3, 0.8] / 0.05".into(),
        pass,
    ))
}

fn check_epsilon_lemma() -> Result<CheckResult> {
    let mut pass = true;
    let mut got = Vec::new();
    for eps in [0.30, 0.40, 0.45] {
        let started = Instant::now();
        let report = verify_epsilon_lemma(eps)?;
        let elapsed = started.elapsed().as_secs_f64();
        pass &= report.pass && elapsed < 60.0;
        got.push(format!(
            "eps={eps}: A={:.3}, B={:.1e}{} in {elapsed:.1}s",
            report.sum_a,
            report.sum_b,
            if report.sum_b_exact { "" } else { "(bound)" },
        ));
    }
    Ok(check(
        "epsilon_lemma",
        "both sums < 1/2 at eps in {0.30, 0.40, 0.45}, < 1min each".into(),
        got.join("; "),
        "1/2".into(),
        pass,
    ))
}

/// Deterministic splitmix64 stream for the property suite.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn in_range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next() % (hi - lo + 1)
    }
}

fn check_identity_properties() -> Result<CheckResult> {
    let mut rng = SplitMix64(0x00C0_FFEE);
    let mut pass = true;
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let len = rng.in_range(1, 50) as usize;
        let digits: Vec<u64> = (0..len).map(|_| rng.in_range(1, 100)).collect();
        let word = DigitWord::new(digits.clone())?;
        let convs = convergents(&word);
        // determinant p_{n-1} q_n - p_n q_{n-1} = (-1)^n, exactly
        let (p_prev, q_prev) = if len >= 2 {
            (convs[len - 2].p.clone(), convs[len - 2].q.clone())
        } else {
            (BigInt::zero(), BigInt::one())
        };
        let det = &p_prev * &convs[len - 1].q - &convs[len - 1].p * &q_prev;
        let want = if len.is_multiple_of(2) {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        pass &= det == want;
        // sandwich prod a_i <= q_n <= 2^n prod a_i, exactly
        let prod: BigInt = digits.iter().map(|&a| BigInt::from(a)).product();
        let q_n = &convs[len - 1].q;
        pass &= &prod <= q_n && q_n <= &(num::pow::pow(BigInt::from(2), len) * &prod);
        // refined lower bound, exactly in rational arithmetic
        let mut bound = BigRational::from(BigInt::from(digits[0]));
        for i in 1..len {
            let wi = BigInt::from(digits[i]);
            let wprev = BigInt::from(digits[i - 1]);
            bound *= BigRational::from(wi.clone())
                * (BigRational::one()
                    + BigRational::new(BigInt::one(), wi * (wprev + BigInt::one())));
        }
        pass &= bound <= BigRational::from(q_n.clone());
        checked += 1;
    }
    // heavy-digit inequality from the restricted systems
    for q in [3u64, 10, 100] {
        let floor = 1.0 - 1.0 / ((q * q) as f64 * (q as f64).ln());
        for _ in 0..300 {
            let len = rng.in_range(1, 50) as usize;
            let digits: Vec<u64> = (0..len).map(|_| rng.in_range(q, 4 * q)).collect();
            let word = DigitWord::new(digits)?;
            pass &= scaling_ratio(&word)? >= floor;
            checked += 1;
        }
    }
    Ok(check(
        "identity_properties",
        "determinant, sandwich, refined bound, heavy-digit floor".into(),
        format!("{checked} random words, all exact"),
        "exact".into(),
        pass,
    ))
}

fn check_convexity_concavity(ctx: &VerifyContext) -> Result<CheckResult> {
    // strict convexity of t on a non-uniform beta grid
    let betas = [-0.2, 0.0, 0.5, 1.0, 2.0];
    let ts: Vec<f64> = betas
        .iter()
        .map(|&b| ctx.spect.fe.t_value(b))
        .collect::<Result<_>>()?;
    let mut convex = true;
    for i in 1..betas.len() - 1 {
        let (b1, b2, b3) = (betas[i - 1], betas[i], betas[i + 1]);
        let chord = ts[i - 1] + (ts[i + 1] - ts[i - 1]) * (b2 - b1) / (b3 - b1);
        convex &= ts[i] < chord - 1e-6;
    }
    // strict concavity of f on 21 interior alphas
    let grid: Vec<f64> = (0..21).map(|i| 0.05 + 0.045 * i as f64).collect();
    let rows = ctx.spect.curve(&grid);
    let fs: Vec<f64> = rows
        .iter()
        .map(|r| r.point.as_ref().map(|p| p.f).map_err(|e| e.clone()))
        .collect::<Result<_>>()?;
    let mut concave = true;
    for i in 1..fs.len() - 1 {
        concave &= fs[i] > 0.5 * (fs[i - 1] + fs[i + 1]) + 1e-6;
    }
    Ok(check(
        "convexity_concavity",
        "t strictly convex on the beta grid; f strictly concave on 21 alphas".into(),
        format!("convex={convex}, concave={concave}"),
        "slack 1e-6".into(),
        convex && concave,
    ))
}
