//! Exact and log-stable continued-fraction arithmetic.
//!
//! Digit words, convergents with the full integer recursion
//! `q_n = a_n q_{n-1} + q_{n-2}`, cylinder diameters, the arithmetic-geometric
//! scaling ratio `sum ln a_i / ln q_n`, and digit expansion of rationals,
//! decimal intervals, and quadratic surds.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// A finite word of continued-fraction digits `a_1..a_n`; every digit >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitWord(Vec<u64>);

impl DigitWord {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&bad) = digits.iter().find(|&&a| a == 0) {
            return Err(Error::BadDigit(bad));
        }
        Ok(DigitWord(digits))
    }

    /// The word `[digit, digit, ..., digit]` of the given length.
    pub fn uniform(digit: u64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyWord);
        }
        Self::new(vec![digit; len])
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees length >= 1
    }
}

/// Convergent `p_n/q_n` in exact integer arithmetic.
///
/// Satisfies `gcd(p, q) = 1` and the determinant identity
/// `p_{n-1} q_n - p_n q_{n-1} = (-1)^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    /// 1-based position in the word.
    pub index: usize,
}

/// All convergents `(p_k, q_k)`, k = 1..n, of a digit word.
pub fn convergents(word: &DigitWord) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(word.len());
    // p_{-1} = 1, p_0 = 0; q_{-1} = 0, q_0 = 1
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for (i, &a) in word.digits().iter().enumerate() {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent {
            p: p.clone(),
            q: q.clone(),
            index: i + 1,
        });
    }
    out
}

/// Overflow-free carrier of the denominator recursion: `ln q_n` and
/// `q_{n-1}/q_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogState {
    pub log_q: f64,
    /// `q_{n-1}/q_n`, in (0,1] once n >= 1.
    pub ratio: f64,
}

impl LogState {
    /// Seed state (n = 0): `q_0 = 1`, `q_{-1} = 0`.
    pub fn initial() -> Self {
        LogState {
            log_q: 0.0,
            ratio: 0.0,
        }
    }

    /// Advance by one digit: `q_n = a q_{n-1} + q_{n-2}`, carried as
    /// `ln q_n = ln a + ln q_{n-1} + ln(1 + ratio/a)`.
    pub fn step(self, digit: u64) -> Self {
        let a = digit as f64;
        LogState {
            log_q: self.log_q + a.ln() + (self.ratio / a).ln_1p(),
            ratio: 1.0 / (a + self.ratio),
        }
    }
}

/// Per-prefix arithmetic vs. geometric scaling data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingTrace {
    /// Prefix length (1-based).
    pub n: usize,
    /// Digit a_n consumed at this step.
    pub digit: u64,
    /// `sum_{i<=n} ln a_i`.
    pub sum_log_digits: f64,
    /// `ln q_n`.
    pub log_q: f64,
    /// `sum_log_digits / log_q`; undefined while `q_n < 2`.
    pub ratio: Option<f64>,
}

/// Stable trace of `ln q_n` and the scaling ratio along a word.
pub fn log_q_trace(word: &DigitWord) -> Vec<ScalingTrace> {
    let mut out = Vec::with_capacity(word.len());
    let mut state = LogState::initial();
    let mut sum_log = 0.0f64;
    for (i, &a) in word.digits().iter().enumerate() {
        state = state.step(a);
        sum_log += (a as f64).ln();
        // q_n >= 2 <=> log_q >= ln 2 (q_n is an integer)
        let ratio = if state.log_q >= 0.5 * std::f64::consts::LN_2 {
            Some(sum_log / state.log_q)
        } else {
            None
        };
        out.push(ScalingTrace {
            n: i + 1,
            digit: a,
            sum_log_digits: sum_log,
            log_q: state.log_q,
            ratio,
        });
    }
    out
}

/// Arithmetic-geometric scaling ratio `sum ln a_i / ln q_n` of a word.
///
/// The only rejected word is `[1]`, whose denominator `q_1 = 1` makes the
/// ratio undefined.
pub fn scaling_ratio(word: &DigitWord) -> Result<f64> {
    let trace = log_q_trace(word);
    let last = trace.last().expect("word is nonempty");
    last.ratio.ok_or(Error::DegenerateWord)
}

/// Exact diameter of the level-n cylinder of a word:
/// `1 / (q_n (q_n + q_{n-1}))`.
pub fn cylinder_diameter(word: &DigitWord) -> BigRational {
    let convs = convergents(word);
    let n = convs.len();
    let q_n = convs[n - 1].q.clone();
    // q_0 = 1 precedes the first convergent
    let q_prev = if n >= 2 {
        convs[n - 2].q.clone()
    } else {
        BigInt::one()
    };
    BigRational::new(BigInt::one(), &q_n * (&q_n + &q_prev))
}

/// Scaling exponent of the constant word `(k, k, k, ...)`:
/// `alpha(k) = ln k / ln((k + sqrt(k^2+4))/2)`, with `alpha(1) = 0`.
pub fn alpha_of_k(k: u64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let kf = k as f64;
    // 1/x_k for the fixed point x_k = (-k + sqrt(k^2+4))/2 of digit k
    let growth = 0.5 * (kf + (kf * kf + 4.0).sqrt());
    kf.ln() / growth.ln()
}

/// Fixed point of the inverse branch of digit `k`:
/// `x_k = (-k + sqrt(k^2+4))/2`, the value of the surd `[k; k, k, ...]`.
pub fn surd_fixed_point(k: u64) -> f64 {
    let kf = k as f64;
    // rationalized form avoids cancellation for large k
    2.0 / (kf + (kf * kf + 4.0).sqrt())
}

// ---------------------------------------------------------------------------
// digit expansion
// ---------------------------------------------------------------------------

/// A real number `(p + sqrt(d))/q` with `d > 0` not a perfect square.
///
/// Kept normalized so that `q` divides `d - p^2`, which the expansion step
/// preserves exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

/// Floor of sqrt(d) for d >= 0.
fn isqrt(d: &BigInt) -> BigInt {
    d.sqrt()
}

/// Compare sqrt(d) with the rational x (d > 0, not a perfect square).
fn sqrt_cmp(d: &BigInt, x: &BigRational) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if x.is_negative() || x.is_zero() {
        return Ordering::Greater;
    }
    // sqrt(d) vs a/b  <=>  d b^2 vs a^2   (both sides positive)
    let lhs = d * x.denom() * x.denom();
    let rhs = x.numer() * x.numer();
    lhs.cmp(&rhs)
}

impl QuadraticSurd {
    /// Build `(p + sqrt(d))/q`, normalizing the divisibility invariant.
    /// Requires `d > 0` not a perfect square, `q != 0`, and value in (0,1).
    pub fn new(p: BigInt, d: BigInt, q: BigInt) -> Result<Self> {
        if q.is_zero() || !d.is_positive() {
            return Err(Error::Domain(
                "surd needs q != 0 and d > 0".to_string(),
            ));
        }
        let root = isqrt(&d);
        if &root * &root == d {
            return Err(Error::Domain(
                "d is a perfect square; the value is rational".to_string(),
            ));
        }
        let (mut p, mut d, mut q) = (p, d, q);
        if !((&d - &p * &p) % &q).is_zero() {
            let scale = q.abs();
            p *= &scale;
            d *= &scale * &scale;
            q *= &scale;
        }
        let surd = QuadraticSurd { p, d, q };
        if surd.cmp_with_zero_one().is_none() {
            return Err(Error::OutOfUnitInterval(format!("{}", surd.to_f64())));
        }
        Ok(surd)
    }

    /// Exact check that the value lies in (0,1); None when it does not.
    fn cmp_with_zero_one(&self) -> Option<()> {
        use std::cmp::Ordering::*;
        // value > 0  <=>  sqrt(d) >< -p depending on sign of q
        let minus_p = BigRational::from(-self.p.clone());
        let q_minus_p = BigRational::from(&self.q - &self.p);
        let positive = matches!(
            (self.q.is_positive(), sqrt_cmp(&self.d, &minus_p)),
            (true, Greater) | (false, Less)
        );
        let below_one = matches!(
            (self.q.is_positive(), sqrt_cmp(&self.d, &q_minus_p)),
            (true, Less) | (false, Greater)
        );
        (positive && below_one).then_some(())
    }

    pub fn to_f64(&self) -> f64 {
        let p = bigint_to_f64(&self.p);
        let d = bigint_to_f64(&self.d);
        let q = bigint_to_f64(&self.q);
        (p + d.sqrt()) / q
    }

    /// One expansion step for a value in (0,1): returns the digit
    /// `a = floor(1/x)` and the next surd `1/x - a`.
    fn step(&self) -> (BigInt, QuadraticSurd) {
        // 1/x = (-p + sqrt(d)) / ((d - p^2)/q)
        let p1 = -&self.p;
        let q1 = (&self.d - &self.p * &self.p) / &self.q;
        let s = isqrt(&self.d);
        let a = if q1.is_positive() {
            (&p1 + &s).div_floor(&q1)
        } else {
            // floor((p1 + sqrt d)/q1) with q1 < 0: the floor of the numerator
            // of the negated form is -p1 - s - 1 since sqrt d is irrational
            (-&p1 - &s - BigInt::one()).div_floor(&-&q1)
        };
        let p2 = &p1 - &a * &q1;
        (
            a,
            QuadraticSurd {
                p: p2,
                d: self.d.clone(),
                q: q1,
            },
        )
    }
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Input for [`expand_real`].
#[derive(Debug, Clone)]
pub enum RealInput {
    /// Exact rational in (0,1); its expansion is finite.
    Rational(BigRational),
    /// An interval `[center - radius, center + radius]` of certainty, as
    /// produced by a decimal literal of limited precision.
    Interval {
        center: BigRational,
        radius: BigRational,
    },
    /// An exact quadratic surd in (0,1); its expansion is eventually periodic.
    Surd(QuadraticSurd),
}

impl RealInput {
    /// Parse `"p/q"`, a decimal literal `"0.dddd"` (read as a half-ulp
    /// interval), `"golden"`, or `"sqrt<D>-<K>"` (e.g. `"sqrt2-1"`).
    ///
    /// `radius_override`, when given, replaces the half-ulp uncertainty of a
    /// decimal literal by `2^-bits`.
    pub fn parse(text: &str, precision_bits: Option<u32>) -> Result<RealInput> {
        let s = text.trim();
        if s == "golden" {
            // (sqrt 5 - 1)/2
            return Ok(RealInput::Surd(QuadraticSurd::new(
                BigInt::from(-1),
                BigInt::from(5),
                BigInt::from(2),
            )?));
        }
        if let Some(rest) = s.strip_prefix("sqrt") {
            if let Some((d, k)) = rest.split_once('-') {
                let d: BigInt = d
                    .parse()
                    .map_err(|_| Error::UnparsableReal(text.to_string()))?;
                let k: BigInt = k
                    .parse()
                    .map_err(|_| Error::UnparsableReal(text.to_string()))?;
                return Ok(RealInput::Surd(QuadraticSurd::new(-k, d, BigInt::one())?));
            }
            return Err(Error::UnparsableReal(text.to_string()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num
                .parse()
                .map_err(|_| Error::UnparsableReal(text.to_string()))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| Error::UnparsableReal(text.to_string()))?;
            if den.is_zero() {
                return Err(Error::UnparsableReal(text.to_string()));
            }
            return Ok(RealInput::Rational(BigRational::new(num, den)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if int_part.chars().all(|c| c.is_ascii_digit())
                && !frac_part.is_empty()
                && frac_part.chars().all(|c| c.is_ascii_digit())
            {
                let digits = format!("{int_part}{frac_part}");
                let num: BigInt = digits
                    .parse()
                    .map_err(|_| Error::UnparsableReal(text.to_string()))?;
                let den = num::pow::pow(BigInt::from(10), frac_part.len());
                let center = BigRational::new(num, den.clone());
                let radius = match precision_bits {
                    Some(bits) => BigRational::new(
                        BigInt::one(),
                        num::pow::pow(BigInt::from(2), bits as usize),
                    ),
                    // half an ulp of the last printed digit
                    None => BigRational::new(BigInt::one(), BigInt::from(2) * den),
                };
                return Ok(RealInput::Interval { center, radius });
            }
        }
        Err(Error::UnparsableReal(text.to_string()))
    }
}

/// Result of a digit expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<u64>,
    /// True when the expansion is finite and completely emitted
    /// (rational inputs only).
    pub terminated: bool,
}

/// First `n` regular continued-fraction digits of `x` in (0,1).
///
/// Rational inputs terminate and say so; interval inputs stop with
/// [`Error::PrecisionExhausted`] as soon as the next digit is not certain;
/// surd inputs never fail.
pub fn expand_real(x: &RealInput, n: usize) -> Result<Expansion> {
    match x {
        RealInput::Rational(r) => expand_rational(r, n),
        RealInput::Interval { center, radius } => expand_interval(center, radius, n),
        RealInput::Surd(s) => expand_surd(s, n),
    }
}

fn expand_rational(r: &BigRational, n: usize) -> Result<Expansion> {
    let one = BigRational::one();
    if !(r > &BigRational::zero() && r < &one) {
        return Err(Error::OutOfUnitInterval(r.to_string()));
    }
    let mut digits = Vec::new();
    let mut rem = r.clone();
    while digits.len() < n {
        let inv = rem.recip();
        let a = inv.floor();
        let digit = rational_to_u64(&a)?;
        digits.push(digit);
        rem = inv - a;
        if rem.is_zero() {
            return Ok(Expansion {
                digits,
                terminated: true,
            });
        }
    }
    Ok(Expansion {
        digits,
        terminated: false,
    })
}

fn expand_interval(center: &BigRational, radius: &BigRational, n: usize) -> Result<Expansion> {
    if radius.is_negative() {
        return Err(Error::Domain("interval radius must be >= 0".into()));
    }
    if radius.is_zero() {
        return expand_rational(center, n);
    }
    let mut lo = center - radius;
    let mut hi = center + radius;
    if !(lo > BigRational::zero() && hi < BigRational::one()) {
        return Err(Error::OutOfUnitInterval(format!(
            "[{lo}, {hi}]"
        )));
    }
    let mut digits: Vec<u64> = Vec::new();
    while digits.len() < n {
        // 1/x maps [lo, hi] to [1/hi, 1/lo]
        let inv_lo = hi.recip();
        let inv_hi = lo.recip();
        let a_lo = inv_lo.floor();
        let a_hi = inv_hi.floor();
        if a_lo != a_hi {
            let certain = digits.len();
            return Err(Error::PrecisionExhausted { certain, digits });
        }
        digits.push(rational_to_u64(&a_lo)?);
        lo = inv_lo - &a_lo;
        hi = inv_hi - &a_lo;
        if !lo.is_positive() {
            // the enclosure touches the integer boundary: the true orbit may
            // terminate here, so no further digit is certain
            let certain = digits.len();
            return Err(Error::PrecisionExhausted { certain, digits });
        }
    }
    Ok(Expansion {
        digits,
        terminated: false,
    })
}

fn expand_surd(s: &QuadraticSurd, n: usize) -> Result<Expansion> {
    let mut digits = Vec::with_capacity(n);
    let mut state = s.clone();
    while digits.len() < n {
        let (a, next) = state.step();
        digits.push(bigint_to_u64(&a)?);
        state = next;
    }
    Ok(Expansion {
        digits,
        terminated: false,
    })
}

fn rational_to_u64(r: &BigRational) -> Result<u64> {
    if !r.is_integer() {
        return Err(Error::Domain(format!("{r} is not an integer")));
    }
    bigint_to_u64(r.numer())
}

fn bigint_to_u64(x: &BigInt) -> Result<u64> {
    use num::ToPrimitive;
    match x.to_u64() {
        Some(v) if v >= 1 => Ok(v),
        Some(_) => Err(Error::BadDigit(0)),
        None => Err(Error::Domain(format!("digit {x} does not fit in u64"))),
    }
}
