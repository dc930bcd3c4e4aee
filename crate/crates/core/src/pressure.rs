//! The arithmetic-geometric pressure `P(t, beta)`: finiteness test, direct
//! partition-sum enumeration at small depth, and the analytic two-sided
//! bounds used to sandwich every other evaluation method.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator;
use crate::special::zeta_tail;

/// Digit alphabet `{min_digit, ..., truncation}` of the (restricted) Gauss
/// system; `min_digit = 1` is the full system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlphabetSpec {
    min_digit: u64,
    truncation: u64,
}

impl AlphabetSpec {
    pub fn new(min_digit: u64, truncation: u64) -> Result<Self> {
        if min_digit < 1 {
            return Err(Error::BadDigit(min_digit));
        }
        if truncation < min_digit {
            return Err(Error::Precondition(format!(
                "truncation {truncation} below min digit {min_digit}"
            )));
        }
        Ok(AlphabetSpec {
            min_digit,
            truncation,
        })
    }

    /// Full system `{1, ..., truncation}`.
    pub fn full(truncation: u64) -> Result<Self> {
        Self::new(1, truncation)
    }

    pub fn min_digit(&self) -> u64 {
        self.min_digit
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn branch_count(&self) -> u64 {
        self.truncation - self.min_digit + 1
    }

    pub fn digits(&self) -> impl Iterator<Item = u64> {
        self.min_digit..=self.truncation
    }
}

/// One pressure evaluation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureQuery {
    pub t: f64,
    pub beta: f64,
    pub alphabet: AlphabetSpec,
    /// Word length for enumeration-based evaluation.
    pub depth: u32,
    pub tol: f64,
}

/// Pressure value, with infinity as a regular outcome rather than an error:
/// the finiteness boundary is a legitimate query target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureValue {
    Finite(f64),
    Infinite,
}

impl PressureValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            PressureValue::Finite(v) => Some(*v),
            PressureValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PressureValue::Infinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    Operator,
    Enumeration,
    InfiniteMarker,
}

/// A pressure estimate together with its certified bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEstimate {
    pub value: PressureValue,
    pub lower: f64,
    pub upper: f64,
    pub method: PressureMethod,
    /// Depth (enumeration) or polynomial degree (operator) used.
    pub resolution: u32,
}

/// `P(t, beta) < inf  <=>  2(t + beta) > 1`.
pub fn is_finite(t: f64, beta: f64) -> bool {
    2.0 * (t + beta) > 1.0
}

/// Hard cap on enumerated words per partition sum.
pub const ENUMERATION_BUDGET: u128 = 1_000_000_000;

/// Natural log of the depth-n partition function
/// `Z_n = sum_w exp sup_{cylinder w} S_n(t phi + beta psi)`.
///
/// The cylinder sup is evaluated exactly from the two interval endpoints
/// `p_n/q_n` and `(p_n+p_{n-1})/(q_n+q_{n-1})`, i.e. from `q_n` and
/// `q_n + q_{n-1}`; accumulation is in log-sum-exp form with a fixed
/// digit order, so the result is deterministic under any parallel schedule.
pub fn partition_sum(query: &PressureQuery) -> Result<f64> {
    if query.depth < 1 {
        return Err(Error::Precondition("depth must be >= 1".into()));
    }
    let branches = query.alphabet.branch_count();
    let words = (branches as u128)
        .checked_pow(query.depth)
        .unwrap_or(u128::MAX);
    if words > ENUMERATION_BUDGET {
        let max_depth = (ENUMERATION_BUDGET as f64).ln() / (branches as f64).ln();
        return Err(Error::EnumerationBudget {
            depth: query.depth,
            branches,
            words,
            max_depth: max_depth.floor() as u32,
        });
    }
    let t = query.t;
    let beta = query.beta;
    let digits: Vec<u64> = query.alphabet.digits().collect();
    let ln_digits: Vec<f64> = digits.iter().map(|&a| (a as f64).ln()).collect();

    // one sequential log-sum-exp accumulator per leading digit, then a
    // sequential combine in digit order
    let depth = query.depth as usize;
    let subtotals: Vec<(f64, f64)> = digits
        .par_iter()
        .enumerate()
        .map(|(i, &a)| {
            let mut acc = LseAccumulator::new();
            let state = Node {
                ratio: 0.0,
                log_q: 0.0,
                sum_log: 0.0,
            }
            .step(a, ln_digits[i]);
            descend(&digits, &ln_digits, state, depth - 1, t, beta, &mut acc);
            (acc.max, acc.scaled_sum)
        })
        .collect();

    let mut total = LseAccumulator::new();
    for (m, s) in subtotals {
        if s > 0.0 {
            total.add(m + s.ln());
        }
    }
    Ok(total.max + total.scaled_sum.ln())
}

#[derive(Clone, Copy)]
struct Node {
    ratio: f64,
    log_q: f64,
    sum_log: f64,
}

impl Node {
    #[inline]
    fn step(self, digit: u64, ln_digit: f64) -> Node {
        let a = digit as f64;
        Node {
            ratio: 1.0 / (a + self.ratio),
            log_q: self.log_q + ln_digit + (self.ratio / a).ln_1p(),
            sum_log: self.sum_log + ln_digit,
        }
    }
}

struct LseAccumulator {
    max: f64,
    scaled_sum: f64,
}

impl LseAccumulator {
    fn new() -> Self {
        LseAccumulator {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }

    #[inline]
    fn add(&mut self, log_term: f64) {
        if log_term > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        } else {
            self.scaled_sum += (log_term - self.max).exp();
        }
    }
}

fn descend(
    digits: &[u64],
    ln_digits: &[f64],
    node: Node,
    remaining: usize,
    t: f64,
    beta: f64,
    acc: &mut LseAccumulator,
) {
    if remaining == 0 {
        // sup over the cylinder sits at one of the two endpoints: the weight
        // is q_n^{-2t} or (q_n + q_{n-1})^{-2t}, times prod a_i^{-2beta}
        let at_qn = -2.0 * t * node.log_q;
        let at_sum = -2.0 * t * (node.log_q + node.ratio.ln_1p());
        acc.add(at_qn.max(at_sum) - 2.0 * beta * node.sum_log);
        return;
    }
    for (i, &a) in digits.iter().enumerate() {
        descend(
            digits,
            ln_digits,
            node.step(a, ln_digits[i]),
            remaining - 1,
            t,
            beta,
            acc,
        );
    }
}

/// Analytic two-sided pressure bounds for `t >= 0`:
///
/// `ln sum_k (k+1)^{-2t} k^{-2beta}  <=  P(t,beta)  <=
///  (1/2) ln sum_{k,l} (kl)^{-2(t+beta)} (1 + 1/(k(l+1)))^{-2t}`,
///
/// reported with certified truncation tails folded in (the lower bound is
/// lowered, the upper bound raised, so the bracket always contains the two
/// exact series).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn analytic_bounds(t: f64, beta: f64) -> Result<AnalyticBounds> {
    if t < 0.0 {
        return Err(Error::Domain(format!(
            "analytic pressure bounds are proved only for t >= 0 (got t = {t})"
        )));
    }
    if !is_finite(t, beta) {
        return Err(Error::Domain(format!(
            "pressure is infinite at (t, beta) = ({t}, {beta}); no finite bounds"
        )));
    }
    let s = 2.0 * (t + beta);

    // lower: single series, certified from below
    let m1: u64 = 1_000_000;
    let (partial, _) = (1..=m1)
        .map(|k| {
            let kf = k as f64;
            (kf + 1.0).powf(-2.0 * t) * kf.powf(-2.0 * beta)
        })
        .fold((0.0f64, 0.0f64), |(sum, comp), term| {
            let y = term - comp;
            let new = sum + y;
            ((new), (new - sum) - y)
        });
    // tail terms are >= ((m1+1)/m1)^{-2t} k^{-s}
    let tail_factor = ((m1 as f64 + 1.0) / m1 as f64).powf(-2.0 * t);
    let tail_lo = (zeta_tail(s, m1).lower()).max(0.0) * tail_factor;
    let float_slack = 2.0 * f64::EPSILON * partial * 20.0;
    let lower = (partial + tail_lo - float_slack).ln();

    // upper: double series over k,l <= m2 plus a certified remainder
    let m2: u64 = 2_800;
    let u: Vec<f64> = (1..=m2).map(|k| (k as f64).powf(-s)).collect();
    let double: f64 = (1..=m2)
        .into_par_iter()
        .map(|k| {
            let kf = k as f64;
            let uk = u[(k - 1) as usize];
            let mut row = 0.0;
            for l in 1..=m2 {
                let lf = l as f64;
                row += uk * u[(l - 1) as usize] * (1.0 + 1.0 / (kf * (lf + 1.0))).powf(-2.0 * t);
            }
            row
        })
        .sum();
    let axis_partial: f64 = u.iter().sum();
    let tail_up = zeta_tail(s, m2).upper();
    let zeta_up = axis_partial + tail_up;
    // every remainder term has k > m2 or l > m2 and factor <= 1
    let remainder = 2.0 * tail_up * zeta_up;
    let upper = 0.5 * (double + remainder + float_slack * double).ln();

    Ok(AnalyticBounds { lower, upper })
}

/// Pressure `P(t, beta)` with the infinite region resolved exactly and the
/// finite region delegated to the transfer-operator method.
pub fn pressure(query: &PressureQuery) -> Result<PressureEstimate> {
    if !is_finite(query.t, query.beta) {
        return Ok(PressureEstimate {
            value: PressureValue::Infinite,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            method: PressureMethod::InfiniteMarker,
            resolution: 0,
        });
    }
    operator::pressure_via_operator(query.t, query.beta, query.alphabet, query.tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(t: f64, beta: f64, m: u64, depth: u32) -> PressureQuery {
        PressureQuery {
            t,
            beta,
            alphabet: AlphabetSpec::full(m).unwrap(),
            depth,
            tol: 1e-10,
        }
    }

    #[test]
    fn finiteness_region_boundary_is_exact() {
        assert!(is_finite(1.0, 0.0));
        assert!(!is_finite(0.25, 0.25)); // boundary: 2(t+beta) = 1 exactly
        assert!(is_finite(0.0, 2.0));
        assert!(!is_finite(0.0, 0.5));
        assert!(!is_finite(-1.0, 1.0));
    }

    #[test]
    fn depth_one_partition_sum_is_a_single_series() {
        // t >= 0: sup at the q_n endpoint, so ln Z_1 = ln sum a^{-2(t+beta)}
        let m = 500;
        for (t, beta) in [(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)] {
            let z = partition_sum(&query(t, beta, m, 1)).unwrap();
            let direct: f64 = (1..=m).map(|a| (a as f64).powf(-2.0 * (t + beta))).sum();
            assert!((z - direct.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_t_partition_sum_factorizes_exactly() {
        // t = 0: ln Z_n = n ln sum_{k<=M} k^{-2 beta}
        let m = 40;
        let beta = 0.8;
        let row: f64 = (1..=m).map(|a| (a as f64).powf(-2.0 * beta)).sum();
        for n in 1..=4u32 {
            let z = partition_sum(&query(0.0, beta, m, n)).unwrap();
            assert!((z - n as f64 * row.ln()).abs() < 1e-11 * n as f64);
        }
    }

    #[test]
    fn geometric_partition_sums_stay_in_the_distortion_band() {
        // t=1, beta=0: Z_n lies between the covered measure and twice it,
        // so (1/n) ln Z_n sits within [ln 1/2, ln 2] and drifts toward 0
        let m = 100;
        let mut prev = f64::INFINITY;
        for n in 1..=4u32 {
            let z = partition_sum(&query(1.0, 0.0, m, n)).unwrap() / n as f64;
            assert!(z >= 0.5f64.ln() && z <= 2.0f64.ln(), "n={n}: {z}");
            assert!(z.abs() <= prev.abs() + 1e-12);
            prev = z;
        }
    }

    #[test]
    fn negative_t_uses_the_other_endpoint() {
        // depth 1, t < 0: sup at x = 1, weight (a+1)^{-2t} a^{-2beta}
        let m = 300;
        let (t, beta) = (-0.5, 1.5);
        let z = partition_sum(&query(t, beta, m, 1)).unwrap();
        let direct: f64 = (1..=m)
            .map(|a| (a as f64 + 1.0).powf(-2.0 * t) * (a as f64).powf(-2.0 * beta))
            .sum();
        assert!((z - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn enumeration_budget_is_enforced_with_the_admissible_depth() {
        let q = query(1.0, 0.0, 100, 6); // 10^12 words
        match partition_sum(&q) {
            Err(Error::EnumerationBudget { max_depth, .. }) => assert_eq!(max_depth, 4),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn huge_beta_magnitudes_do_not_overflow() {
        for beta in [1e10, -1e10] {
            let z = partition_sum(&query(0.0, beta, 3, 2)).unwrap();
            assert!(z.is_finite());
            // dominated by the extreme digit: Z_2 ~ (a*)^(-4 beta)
            let a_star: f64 = if beta > 0.0 { 1.0 } else { 3.0 };
            assert!((z - (-4.0 * beta * a_star.ln())).abs() <= 1e-6 * beta.abs().max(1.0));
        }
    }

    #[test]
    fn analytic_bounds_collapse_to_zeta_at_t_zero() {
        // both bounds equal ln zeta(2 beta) when t = 0
        let b = analytic_bounds(0.0, 1.0).unwrap();
        let ln_zeta2 = 0.497_700_302_470_745_35; // ln(pi^2/6), mpmath
        assert!(b.lower <= ln_zeta2 + 1e-12, "lower {} above", b.lower);
        assert!(b.upper >= ln_zeta2 - 1e-12, "upper {} below", b.upper);
        assert!(b.lower > ln_zeta2 - 1e-4);
        assert!(b.upper < ln_zeta2 + 2e-3);
    }

    #[test]
    fn analytic_bounds_bracket_zero_at_the_dimension_point() {
        // P(1, 0) = 0 by the full-system dimension argument
        let b = analytic_bounds(1.0, 0.0).unwrap();
        assert!(b.lower <= 0.0, "lower = {}", b.lower);
        assert!(b.upper >= 0.0, "upper = {}", b.upper);
    }

    #[test]
    fn analytic_bounds_reject_negative_t() {
        assert!(analytic_bounds(-0.1, 2.0).is_err());
    }

    #[test]
    fn pressure_returns_the_infinity_marker_off_the_finite_region() {
        let est = pressure(&query(0.25, 0.25, 1000, 1)).unwrap();
        assert!(est.value.is_infinite());
        assert_eq!(est.method, PressureMethod::InfiniteMarker);
    }

    #[test]
    fn pressure_vanishes_at_the_dimension_point() {
        // the unit interval has dimension 1, so P(1, 0) = 0
        let est = pressure(&query(1.0, 0.0, 10_000, 1)).unwrap();
        let v = est.value.finite().unwrap();
        assert!(v.abs() < 1e-3, "P(1,0) = {v}");
        assert!(est.lower <= 0.0 + 1e-9 && est.upper >= 0.0 - 1e-9);
    }

    #[test]
    fn pressure_at_zeta_slice_point() {
        let est = pressure(&query(0.0, 1.0, 10_000, 1)).unwrap();
        let v = est.value.finite().unwrap();
        let ln_zeta2 = 0.497_700_302_470_745_35;
        assert!((v - ln_zeta2).abs() < 1e-3);
        assert!(est.lower <= v && v <= est.upper);
    }
}
